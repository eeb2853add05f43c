//! Mesh documents: parsing, validation and conversion to a cell complex.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{Cell, EdgeKey, PLComplex, VertexKind};
use crate::error::{Error, Result};
use crate::geometry::{segments_cross, signed_area, winding_number, Point};
use crate::network::{BoundaryComponent, VertexId};

pub const MESH_SCHEMA: &str = "uniformize-mesh/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub outer: Vec<VertexId>,
    #[serde(default)]
    pub inner: Vec<Vec<VertexId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeConductance {
    pub edge: [VertexId; 2],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Conductances {
    Uniform(f64),
    PerEdge(Vec<EdgeConductance>),
}

impl Default for Conductances {
    fn default() -> Self {
        Conductances::Uniform(1.0)
    }
}

/// A validated mesh with dense vertex ids `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub schema: String,
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[VertexId; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quads: Vec<[VertexId; 4]>,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub conductances: Conductances,
    #[serde(default = "default_k")]
    pub k: f64,
}

fn default_k() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawVertices {
    Plain(Vec<[f64; 2]>),
    Labeled(Vec<LabeledVertex>),
}

#[derive(Debug, Deserialize)]
struct LabeledVertex {
    id: u64,
    position: [f64; 2],
}

#[derive(Debug, Deserialize)]
struct RawMesh {
    schema: Option<String>,
    vertices: RawVertices,
    #[serde(default)]
    triangles: Vec<[u64; 3]>,
    #[serde(default)]
    quads: Vec<[u64; 4]>,
    boundary: RawBoundary,
    #[serde(default)]
    conductances: Option<RawConductances>,
    #[serde(default = "default_k")]
    k: f64,
}

#[derive(Debug, Deserialize)]
struct RawBoundary {
    outer: Vec<u64>,
    #[serde(default)]
    inner: Vec<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawConductances {
    Uniform(f64),
    PerEdge(Vec<RawEdgeConductance>),
}

#[derive(Debug, Deserialize)]
struct RawEdgeConductance {
    edge: [u64; 2],
    value: f64,
}

fn mesh_error(msg: impl Into<String>) -> Error {
    Error::Mesh(msg.into())
}

/// The mesh as JSON with full-precision floats.
pub fn mesh_to_json(doc: &MeshDocument) -> Result<String> {
    super::json::to_json_string(doc)
}

/// Read and validate a mesh file.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<MeshDocument> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_mesh(&text)
}

/// Parse and validate mesh JSON.
pub fn parse_mesh(text: &str) -> Result<MeshDocument> {
    let raw: RawMesh = serde_json::from_str(text)
        .map_err(|e| mesh_error(format!("line {} column {}: {e}", e.line(), e.column())))?;
    if let Some(schema) = &raw.schema {
        if schema != MESH_SCHEMA {
            return Err(mesh_error(format!(
                "schema: expected \"{MESH_SCHEMA}\", found \"{schema}\""
            )));
        }
    }
    let (vertices, index): (Vec<[f64; 2]>, HashMap<u64, VertexId>) = match raw.vertices {
        RawVertices::Plain(list) => {
            let index = (0..list.len()).map(|i| (i as u64, i)).collect();
            (list, index)
        }
        RawVertices::Labeled(list) => {
            let mut index = HashMap::new();
            let mut out = Vec::with_capacity(list.len());
            for (i, v) in list.into_iter().enumerate() {
                if index.insert(v.id, i).is_some() {
                    return Err(mesh_error(format!("vertices: duplicate vertex id {}", v.id)));
                }
                out.push(v.position);
            }
            (out, index)
        }
    };
    let resolve = |field: String, id: u64| -> Result<VertexId> {
        index
            .get(&id)
            .copied()
            .ok_or_else(|| mesh_error(format!("{field}: unknown vertex id {id}")))
    };
    let triangles = raw
        .triangles
        .iter()
        .enumerate()
        .map(|(i, t)| -> Result<[VertexId; 3]> {
            let mut out = [0; 3];
            for (slot, &id) in out.iter_mut().zip(t) {
                *slot = resolve(format!("triangles[{i}]"), id)?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let quads = raw
        .quads
        .iter()
        .enumerate()
        .map(|(i, q)| -> Result<[VertexId; 4]> {
            let mut out = [0; 4];
            for (slot, &id) in out.iter_mut().zip(q) {
                *slot = resolve(format!("quads[{i}]"), id)?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let outer = raw
        .boundary
        .outer
        .iter()
        .map(|&id| resolve("boundary.outer".into(), id))
        .collect::<Result<Vec<_>>>()?;
    let inner = raw
        .boundary
        .inner
        .iter()
        .enumerate()
        .map(|(i, cycle)| {
            cycle
                .iter()
                .map(|&id| resolve(format!("boundary.inner[{i}]"), id))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let conductances = match raw.conductances {
        None => Conductances::Uniform(1.0),
        Some(RawConductances::Uniform(c)) => Conductances::Uniform(c),
        Some(RawConductances::PerEdge(list)) => Conductances::PerEdge(
            list.iter()
                .enumerate()
                .map(|(i, e)| -> Result<EdgeConductance> {
                    let field = format!("conductances[{i}]");
                    Ok(EdgeConductance {
                        edge: [resolve(field.clone(), e.edge[0])?, resolve(field, e.edge[1])?],
                        value: e.value,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let doc = MeshDocument {
        schema: MESH_SCHEMA.to_string(),
        vertices,
        triangles,
        quads,
        boundary: BoundarySpec { outer, inner },
        conductances,
        k: raw.k,
    };
    doc.validate()?;
    Ok(doc)
}

impl MeshDocument {
    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|p| Point::new(p[0], p[1])).collect()
    }

    /// Number of boundary components.
    pub fn connectivity(&self) -> usize {
        1 + self.boundary.inner.len()
    }

    fn cells(&self) -> Vec<Cell> {
        self.triangles
            .iter()
            .map(|&t| Cell::Triangle(t))
            .chain(self.quads.iter().map(|&q| Cell::Quad(q)))
            .collect()
    }

    /// Check ids, cell orientation, boundary cycles, conductances and planarity.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(mesh_error("vertices: empty"));
        }
        if let Some(i) = self.vertices.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(mesh_error(format!("vertices[{i}]: non-finite coordinate")));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(mesh_error(format!("k: must be positive, got {}", self.k)));
        }
        let pts = self.points();
        let cells = self.cells();
        if cells.is_empty() {
            return Err(mesh_error("triangles: no cells"));
        }
        let mut orientation = 0i8;
        for (i, cell) in cells.iter().enumerate() {
            let vs = cell.vertices();
            if let Some(&v) = vs.iter().find(|&&v| v >= n) {
                return Err(mesh_error(format!("cells[{i}]: unknown vertex id {v}")));
            }
            let unique: BTreeSet<_> = vs.iter().collect();
            if unique.len() != vs.len() {
                return Err(mesh_error(format!("cells[{i}]: repeated vertex")));
            }
            let area = signed_area(&vs.iter().map(|&v| pts[v]).collect::<Vec<_>>());
            if area == 0.0 {
                return Err(mesh_error(format!("cells[{i}]: zero area")));
            }
            let s = if area > 0.0 { 1 } else { -1 };
            if orientation == 0 {
                orientation = s;
            } else if s != orientation {
                return Err(mesh_error(format!(
                    "cells[{i}]: orientation differs from the first cell"
                )));
            }
        }
        let mut edge_use: BTreeMap<EdgeKey, usize> = BTreeMap::new();
        for cell in &cells {
            for key in cell.edge_keys() {
                *edge_use.entry(key).or_default() += 1;
            }
        }
        if let Some((key, _)) = edge_use.iter().find(|(_, &c)| c > 2) {
            return Err(mesh_error(format!(
                "edge ({}, {}) belongs to more than two cells",
                key.0, key.1
            )));
        }
        let mesh_boundary: BTreeSet<EdgeKey> = edge_use
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(k, _)| *k)
            .collect();
        let mut declared: BTreeSet<EdgeKey> = BTreeSet::new();
        let mut seen_vertices = BTreeSet::new();
        let cycles = std::iter::once(("boundary.outer".to_string(), &self.boundary.outer)).chain(
            self.boundary
                .inner
                .iter()
                .enumerate()
                .map(|(i, c)| (format!("boundary.inner[{i}]"), c)),
        );
        for (field, cycle) in cycles {
            if cycle.len() < 3 {
                return Err(mesh_error(format!("{field}: a cycle needs at least three vertices")));
            }
            for &v in cycle {
                if v >= n {
                    return Err(mesh_error(format!("{field}: unknown vertex id {v}")));
                }
                if !seen_vertices.insert(v) {
                    return Err(mesh_error(format!(
                        "{field}: vertex {v} repeats; boundary cycles must be simple and disjoint"
                    )));
                }
            }
            for i in 0..cycle.len() {
                let key = EdgeKey::new(cycle[i], cycle[(i + 1) % cycle.len()]);
                if !mesh_boundary.contains(&key) {
                    return Err(mesh_error(format!(
                        "{field}: ({}, {}) is not a boundary edge of the mesh",
                        key.0, key.1
                    )));
                }
                declared.insert(key);
            }
        }
        if let Some(key) = mesh_boundary.difference(&declared).next() {
            return Err(mesh_error(format!(
                "boundary: mesh boundary edge ({}, {}) is not on a declared cycle",
                key.0, key.1
            )));
        }
        let outer_pts: Vec<Point> = self.boundary.outer.iter().map(|&v| pts[v]).collect();
        for (i, cycle) in self.boundary.inner.iter().enumerate() {
            if winding_number(&outer_pts, pts[cycle[0]]) == 0 {
                return Err(mesh_error(format!(
                    "boundary.inner[{i}]: lies outside the outer cycle"
                )));
            }
        }
        if let Conductances::Uniform(c) = self.conductances {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::NonPositiveConductance {
                    a: 0,
                    b: 0,
                    value: c,
                });
            }
        }
        if let Conductances::PerEdge(list) = &self.conductances {
            for (i, e) in list.iter().enumerate() {
                let key = EdgeKey::new(e.edge[0], e.edge[1]);
                if !edge_use.contains_key(&key) {
                    return Err(mesh_error(format!(
                        "conductances[{i}]: ({}, {}) is not an edge",
                        key.0, key.1
                    )));
                }
                if !(e.value > 0.0) || !e.value.is_finite() {
                    return Err(Error::NonPositiveConductance {
                        a: key.0,
                        b: key.1,
                        value: e.value,
                    });
                }
            }
        }
        let used: BTreeSet<VertexId> = cells.iter().flat_map(|c| c.vertices().to_vec()).collect();
        if used.len() != n {
            let v = (0..n).find(|v| !used.contains(v)).unwrap();
            return Err(mesh_error(format!("vertices[{v}]: not used by any cell")));
        }
        check_planar(&pts, edge_use.keys().copied())
    }

    /// The annulus or multiply connected complex, with the outer boundary first.
    /// All cells are counterclockwise and all boundary cycles are listed counterclockwise.
    pub fn to_complex(&self) -> Result<PLComplex> {
        let pts = self.points();
        let cells = self.cells();
        let mut conductance: BTreeMap<EdgeKey, f64> = BTreeMap::new();
        let default = match self.conductances {
            Conductances::Uniform(c) => c,
            Conductances::PerEdge(_) => 1.0,
        };
        for cell in &cells {
            for key in cell.edge_keys() {
                conductance.insert(key, default);
            }
        }
        if let Conductances::PerEdge(list) = &self.conductances {
            for e in list {
                conductance.insert(EdgeKey::new(e.edge[0], e.edge[1]), e.value);
            }
        }
        let ccw = |cycle: &[VertexId]| -> Vec<VertexId> {
            let mut c = cycle.to_vec();
            if signed_area(&c.iter().map(|&v| pts[v]).collect::<Vec<_>>()) < 0.0 {
                c.reverse();
            }
            c
        };
        let mut boundary = vec![BoundaryComponent {
            name: "E1".into(),
            vertices: ccw(&self.boundary.outer),
        }];
        for (i, cycle) in self.boundary.inner.iter().enumerate() {
            boundary.push(BoundaryComponent {
                name: format!("E2.{}", i + 1),
                vertices: ccw(cycle),
            });
        }
        let kinds = vec![VertexKind::Original; pts.len()];
        PLComplex::new(pts, kinds, cells, conductance, boundary)
    }
}

/// Edges may meet only at shared endpoints. Sweep over x-extents.
fn check_planar(pts: &[Point], edges: impl Iterator<Item = EdgeKey>) -> Result<()> {
    let mut list: Vec<(f64, f64, EdgeKey)> = edges
        .map(|k| {
            let (a, b) = (pts[k.0], pts[k.1]);
            (a.x.min(b.x), a.x.max(b.x), k)
        })
        .collect();
    list.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in 0..list.len() {
        let (_, hi, e) = list[i];
        for &(lo2, _, f) in &list[i + 1..] {
            if lo2 > hi {
                break;
            }
            if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
                let shared = if e.0 == f.0 || e.0 == f.1 { e.0 } else { e.1 };
                let (p, q) = (pts[e.other(shared)], pts[f.other(shared)]);
                if segments_cross(pts[shared], p, pts[shared], q) {
                    return Err(mesh_error(format!(
                        "edges ({}, {}) and ({}, {}) overlap",
                        e.0, e.1, f.0, f.1
                    )));
                }
                continue;
            }
            if segments_cross(pts[e.0], pts[e.1], pts[f.0], pts[f.1]) {
                return Err(mesh_error(format!(
                    "edges ({}, {}) and ({}, {}) cross",
                    e.0, e.1, f.0, f.1
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE_RING: &str = r#"{
        "schema": "uniformize-mesh/1",
        "vertices": [[-2,-2],[2,-2],[2,2],[-2,2],[-1,-1],[1,-1],[1,1],[-1,1]],
        "quads": [[0,1,5,4],[1,2,6,5],[2,3,7,6],[3,0,4,7]],
        "boundary": {"outer": [0,1,2,3], "inner": [[4,5,6,7]]},
        "k": 1.0
    }"#;

    #[test]
    fn default_conductance_is_one() {
        let doc = parse_mesh(SQUARE_RING).unwrap();
        assert_eq!(doc.vertices.len(), 8);
        assert_eq!(doc.conductances, Conductances::Uniform(1.0));
        let c = doc.to_complex().unwrap();
        assert!(c.conductances().values().all(|&v| v == 1.0));
    }

    #[test]
    fn duplicate_id_is_named() {
        let text = r#"{"vertices":[{"id":3,"position":[0,0]},{"id":3,"position":[1,0]}],
            "triangles":[], "boundary":{"outer":[3]}}"#;
        let err = parse_mesh(text).unwrap_err().to_string();
        assert!(err.contains("duplicate vertex id 3"), "{err}");
    }

    #[test]
    fn dangling_id_is_reported() {
        let text = SQUARE_RING.replace("[0,1,5,4]", "[0,1,5,44]");
        let err = parse_mesh(&text).unwrap_err().to_string();
        assert!(err.contains("unknown vertex id 44"), "{err}");
    }

    #[test]
    fn negative_conductance_rejected() {
        let text = SQUARE_RING.replace("\"k\": 1.0", "\"k\": 1.0, \"conductances\": [{\"edge\":[0,1],\"value\":-1}]");
        assert!(matches!(
            parse_mesh(&text),
            Err(Error::NonPositiveConductance { .. })
        ));
    }
}
