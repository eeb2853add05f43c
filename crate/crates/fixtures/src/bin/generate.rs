use std::path::PathBuf;

use anyhow::Context;

fn main() -> anyhow::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    std::fs::create_dir_all(&dir)?;
    for (name, doc) in uniformize_fixtures::all() {
        doc.validate().with_context(|| format!("fixture {name}"))?;
        let path = dir.join(format!("{name}.json"));
        let text = uniformize_core::io::mesh_to_json(&doc)?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!(
            "{}: {} vertices, {} cells",
            path.display(),
            doc.vertices.len(),
            doc.triangles.len() + doc.quads.len()
        );
    }
    Ok(())
}
