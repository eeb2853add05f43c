mod common;

use common::{fixture, fixture_path};
use uniformize_core::io::{export, load_mesh, load_result, run_pipeline, to_json_string, to_svg, ExportFormat};
use uniformize_core::pipeline::PipelineOptions;

#[test]
fn wheel_run_has_four_cells_and_fails_only_tiling() {
    let doc = run_pipeline(&fixture("wheel"), &PipelineOptions::default()).unwrap();
    assert_eq!(doc.input.vertices, 8);
    assert_eq!(doc.input.connectivity, 2);
    assert_eq!(doc.cell_count(), 4);
    assert!(doc.ladder.is_none());
    assert_eq!(doc.verification.failed, vec!["piece 0: tiling_completeness".to_string()]);
    assert!(!doc.verification.passed);
}

#[test]
fn pants_run_has_a_ladder_with_three_boundaries() {
    let doc = run_pipeline(&fixture("pants"), &PipelineOptions::default()).unwrap();
    let ladder = doc.ladder.as_ref().expect("ladder for m = 3");
    assert_eq!(ladder.boundaries.len(), 3);
    assert_eq!(doc.pieces.len(), 3);
    assert!(doc.verification.failed.iter().all(|name| name.ends_with("tiling_completeness")));
}

#[test]
fn json_round_trips_and_is_deterministic() {
    let mesh = load_mesh(fixture_path("g8x3")).unwrap();
    let doc = run_pipeline(&mesh, &PipelineOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g8x3.result.json");
    export(&doc, ExportFormat::Json, &path).unwrap();
    assert_eq!(load_result(&path).unwrap(), doc);
    let again = run_pipeline(&mesh, &PipelineOptions::default()).unwrap();
    assert_eq!(to_json_string(&again).unwrap(), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn svg_draws_one_shell_per_cell() {
    for name in ["wheel", "irregular_a", "pants"] {
        let doc = run_pipeline(&fixture(name), &PipelineOptions::default()).unwrap();
        let svg = to_svg(&doc);
        assert_eq!(svg.matches(r#"class="shell""#).count(), doc.cell_count(), "{name}");
        assert!(svg.contains(r#"class="g-level""#) && svg.contains(r#"class="h-level""#));
        assert_eq!(svg, to_svg(&doc));
    }
}

#[test]
fn unwritable_path_is_an_error() {
    let doc = run_pipeline(&fixture("wheel"), &PipelineOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.svg");
    assert!(export(&doc, ExportFormat::Svg, path).is_err());
}

fn schema(name: &str) -> serde_json::Value {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(value: &serde_json::Value) -> Vec<String> {
    let mut keys: Vec<String> = value.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    keys
}

#[test]
fn shipped_schemas_match_the_documents() {
    use uniformize_core::io::{MESH_SCHEMA, RESULT_SCHEMA};
    let mesh = schema("mesh.v1.schema.json");
    let result = schema("result.v1.schema.json");
    assert_eq!(mesh["$id"], MESH_SCHEMA);
    assert_eq!(result["$id"], RESULT_SCHEMA);

    let doc = run_pipeline(&fixture("pants"), &PipelineOptions::default()).unwrap();
    let value = serde_json::to_value(&doc).unwrap();
    assert_eq!(keys(&value), keys(&result["properties"]));
    assert_eq!(keys(&value["pieces"][0]), keys(&result["$defs"]["piece"]["properties"]));
    assert_eq!(keys(&value["ladder"]), keys(&result["$defs"]["ladder"]["properties"]));
    assert_eq!(
        keys(&value["pieces"][0]["net_cells"][0]),
        keys(&result["$defs"]["net_cell"]["properties"])
    );
}
