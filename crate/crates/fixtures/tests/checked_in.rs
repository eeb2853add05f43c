use std::path::Path;

use uniformize_core::io::load_mesh;

/// Vertex positions go through `sin` and `cos`, whose last bit may vary with
/// the optimization level; everything else must match exactly.
const POSITION_TOLERANCE: f64 = 1e-12;

#[test]
fn checked_in_fixtures_match_the_generator() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for (name, doc) in uniformize_fixtures::all() {
        doc.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        let on_disk = load_mesh(dir.join(format!("{name}.json"))).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc.triangles, on_disk.triangles, "{name}");
        assert_eq!(doc.quads, on_disk.quads, "{name}");
        assert_eq!(doc.boundary, on_disk.boundary, "{name}");
        assert_eq!(doc.conductances, on_disk.conductances, "{name}");
        assert_eq!(doc.k, on_disk.k, "{name}");
        assert_eq!(doc.vertices.len(), on_disk.vertices.len(), "{name}");
        for (i, (a, b)) in doc.vertices.iter().zip(&on_disk.vertices).enumerate() {
            let d = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
            assert!(d <= POSITION_TOLERANCE, "{name} vertex {i} moved by {d:e}");
        }
    }
}
