//! The result document: every computed field, the net, the target geometry
//! and the verification report of one run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::Cell;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::io::json::to_json_string;
use crate::io::mesh::MeshDocument;
use crate::io::svg::to_svg;
use crate::mapper::{Cylinder, Shell, TargetAnnulus};
use crate::network::VertexId;
use crate::pipeline::{AnnulusUniformization, Check, PipelineOptions};
use crate::plgeom::LevelCurve;
use crate::rectnet::LatticeIndex;
use crate::singular::{uniformize_domain, PantsLadder};

pub const RESULT_SCHEMA: &str = "uniformize-result/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub vertices: usize,
    pub triangles: usize,
    pub boundary: Vec<String>,
    pub connectivity: usize,
    pub k: f64,
}

/// A level curve reduced to its value and polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub value: f64,
    pub closed: bool,
    pub points: Vec<Point>,
}

impl From<&LevelCurve> for Polyline {
    fn from(curve: &LevelCurve) -> Self {
        Self {
            value: curve.value,
            closed: curve.closed,
            points: curve.positions(),
        }
    }
}

/// A net cell, its measures and the shell it is mapped onto.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub index: LatticeIndex,
    pub g_base: f64,
    pub g_top: f64,
    pub h_left: f64,
    pub h_right: f64,
    pub nu: f64,
    pub mu: f64,
    pub lambda: f64,
    pub rectangle_area: f64,
    pub shell: Shell,
}

/// One uniformized annulus. Fields on the cut complex are indexed by cut
/// vertex; `origin` maps each cut vertex to its annulus vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceDocument {
    pub positions: Vec<Point>,
    pub cells: Vec<Cell>,
    pub boundary: Vec<String>,
    /// Harmonic measure, zero on the inner boundary.
    pub g: Vec<f64>,
    pub k: f64,
    pub slit: Vec<VertexId>,
    pub origin: Vec<VertexId>,
    pub gstar: Vec<f64>,
    pub h: Vec<f64>,
    pub hstar: Vec<f64>,
    pub period: f64,
    pub width: f64,
    pub g_levels: Vec<Polyline>,
    pub h_levels: Vec<Polyline>,
    pub net_cells: Vec<CellRecord>,
    pub target: TargetAnnulus,
    pub cylinder: Cylinder,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub failed: Vec<String>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>) -> Self {
        let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        Self {
            passed: failed.is_empty(),
            failed,
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema: String,
    pub generator: String,
    pub input: InputSummary,
    pub options: PipelineOptions,
    /// Solution of the standard problem on the input, indexed by input vertex.
    pub g: Vec<f64>,
    pub pieces: Vec<PieceDocument>,
    /// Splitting tree, gluings and cone points; present when there are more
    /// than two boundary components.
    pub ladder: Option<PantsLadder>,
    pub verification: VerificationReport,
}

impl ResultDocument {
    pub fn cell_count(&self) -> usize {
        self.pieces.iter().map(|p| p.net_cells.len()).sum()
    }
}

fn piece_document(u: &AnnulusUniformization) -> Result<PieceDocument> {
    let measures: BTreeMap<LatticeIndex, _> = u.measures.iter().map(|m| (m.index, m)).collect();
    let net_cells = u
        .net
        .cells()
        .map(|index| -> Result<CellRecord> {
            let cell = u.net.cell(index)?;
            let m = measures
                .get(&index)
                .ok_or_else(|| Error::IndexMismatch(format!("no measure for cell ({}, {})", index.i, index.j)))?;
            Ok(CellRecord {
                index,
                g_base: cell.g_base,
                g_top: cell.g_top,
                h_left: cell.h_left,
                h_right: cell.h_right,
                nu: m.nu,
                mu: m.mu,
                lambda: m.lambda,
                rectangle_area: m.rectangle_area,
                shell: u.target.shell(index)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PieceDocument {
        positions: u.annulus.positions().to_vec(),
        cells: u.annulus.cells().to_vec(),
        boundary: u.annulus.boundary_components().iter().map(|b| b.name.clone()).collect(),
        g: u.g.values().to_vec(),
        k: u.k,
        slit: u.slit.path.clone(),
        origin: u.quad.origin.clone(),
        gstar: u.gstar.values.values().to_vec(),
        h: u.h.values().to_vec(),
        hstar: u.hstar.values.values().to_vec(),
        period: u.period,
        width: u.width,
        g_levels: u.net.g_levels.iter().map(Polyline::from).collect(),
        h_levels: u.net.h_levels.iter().map(Polyline::from).collect(),
        net_cells,
        target: u.target.clone(),
        cylinder: u.cylinder,
        checks: u.checks.clone(),
    })
}

/// Uniformize `doc`: the annulus pipeline for two boundary components, the
/// splitting pipeline otherwise. `options.k` overrides the document's constant.
pub fn run_pipeline(doc: &MeshDocument, options: &PipelineOptions) -> Result<ResultDocument> {
    let k = options.k.unwrap_or(doc.k);
    let complex = doc.to_complex()?;
    let boundary: Vec<String> = complex.boundary_components().iter().map(|b| b.name.clone()).collect();
    let connectivity = boundary.len();
    let out = uniformize_domain(&complex, k, options)?;
    let pieces = out.pieces().into_iter().map(piece_document).collect::<Result<Vec<_>>>()?;
    Ok(ResultDocument {
        schema: RESULT_SCHEMA.to_string(),
        generator: format!("uniformize {}", env!("CARGO_PKG_VERSION")),
        input: InputSummary {
            vertices: doc.vertices.len(),
            triangles: doc.triangles.len(),
            boundary,
            connectivity,
            k,
        },
        options: options.clone(),
        g: out.g.values().to_vec(),
        pieces,
        ladder: (connectivity > 2).then_some(out.ladder),
        verification: VerificationReport::new(out.checks),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Json,
    Svg,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Json => "json",
            ExportFormat::Svg => "svg",
        }
    }
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(ExportFormat::Json),
            "svg" => Ok(ExportFormat::Svg),
            other => Err(Error::Mesh(format!("unknown output format \"{other}\""))),
        }
    }
}

/// Write `doc` to `path` in the given format.
pub fn export(doc: &ResultDocument, format: ExportFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = match format {
        ExportFormat::Json => to_json_string(doc)?,
        ExportFormat::Svg => to_svg(doc),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_result(path: impl AsRef<Path>) -> Result<ResultDocument> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
