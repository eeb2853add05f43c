//! Mesh input, result documents, and figure output.

pub mod json;
pub mod mesh;
pub mod result;
pub mod svg;

pub use json::{to_json_string, FullPrecision};
pub use mesh::{
    load_mesh, mesh_to_json, parse_mesh, BoundarySpec, Conductances, EdgeConductance,
    MeshDocument, MESH_SCHEMA,
};
pub use result::{
    export, load_result, run_pipeline, CellRecord, ExportFormat, InputSummary, PieceDocument, Polyline, ResultDocument,
    VerificationReport, RESULT_SCHEMA,
};
pub use svg::to_svg;
