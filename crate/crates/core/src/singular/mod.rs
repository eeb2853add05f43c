//! Vertex index, singular levels, the maximal singular curve, the splitting
//! of a multiply connected domain along it, and gluing of the uniformized
//! pieces into a ladder of singular pairs of pants.

mod ladder;
mod split;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::PLComplex;
use crate::error::{Error, Result};
use crate::geometry::{winding_number, Point};
use crate::network::{FiniteNetwork, ScalarField, VertexId};
use crate::plgeom::{LevelCurve, LevelTracer, LEVEL_TOLERANCE};

pub use ladder::{
    assemble_ladder, build_split_tree, cone_angle, flatten, uniformize_domain,
    uniformize_singular_annulus, ConePoint, GeneralizedCylinder, Gluing, LadderBoundary,
    LadderPiece, PantsLadder, PieceKind, SingularUniformization, SplitRecord, SplitTree, Tangency,
    GLUING_TOLERANCE,
};
pub use split::{split_domain, DomainPiece, SingularAnnulus, SplitStep};

/// Sign changes of `f(w) − f(v)` around `v` and the index `1 − changes/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexIndex {
    pub sign_changes: usize,
    pub index: i64,
}

impl VertexIndex {
    pub fn is_singular(&self) -> bool {
        self.index != 0
    }
}

/// Index of `v` from its neighbors in counterclockwise order.
pub fn vertex_index(net: &FiniteNetwork, field: &ScalarField, v: VertexId) -> Result<VertexIndex> {
    let around = net.neighbors_ccw(v);
    let mut signs = Vec::with_capacity(around.len());
    for &w in &around {
        let d = field[w] - field[v];
        if d == 0.0 {
            return Err(Error::ZeroDifference {
                vertex: v,
                neighbor: w,
            });
        }
        signs.push(d > 0.0);
    }
    let n = signs.len();
    let sign_changes = (0..n).filter(|&i| signs[i] != signs[(i + 1) % n]).count();
    Ok(VertexIndex {
        sign_changes,
        index: 1 - (sign_changes / 2) as i64,
    })
}

/// A connected component of a level set: closed curves meeting only at
/// tangency vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bouquet {
    pub value: f64,
    pub circles: Vec<LevelCurve>,
    /// Tangency vertices with the number of circles through each.
    pub tangencies: Vec<(VertexId, usize)>,
}

impl Bouquet {
    /// Whether some circle winds around `p`.
    pub fn encloses(&self, p: Point) -> bool {
        self.circles
            .iter()
            .any(|c| c.closed && winding_number(&c.positions(), p) != 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelClassification {
    pub value: f64,
    pub singular: bool,
    /// Interior vertices on the level with nonzero index.
    pub singular_vertices: Vec<(VertexId, VertexIndex)>,
    pub bouquets: Vec<Bouquet>,
}

/// Trace level `t` and group its curves into bouquets.
pub fn classify_level(complex: &PLComplex, field: &ScalarField, t: f64) -> Result<LevelClassification> {
    let net = complex.network()?;
    classify_with(complex, &net, field, &LevelTracer::new(complex, field), t)
}

fn classify_with(
    complex: &PLComplex,
    net: &FiniteNetwork,
    field: &ScalarField,
    tracer: &LevelTracer<'_>,
    t: f64,
) -> Result<LevelClassification> {
    let set = tracer.trace(t)?;
    let tol = tracer.tolerance();
    let on_level: BTreeSet<VertexId> = set
        .curves
        .iter()
        .flat_map(|c| c.vertices())
        .filter(|&v| (field[v] - t).abs() <= tol && !complex.is_boundary_vertex(v))
        .collect();
    let mut singular_vertices = Vec::new();
    for v in on_level {
        let idx = vertex_index(net, field, v)?;
        if idx.is_singular() {
            singular_vertices.push((v, idx));
        }
    }
    let bouquets = group_into_bouquets(t, set.curves, &set.junctions);
    Ok(LevelClassification {
        value: t,
        singular: !singular_vertices.is_empty(),
        singular_vertices,
        bouquets,
    })
}

/// Union curves that share a vertex.
fn group_into_bouquets(
    t: f64,
    curves: Vec<LevelCurve>,
    junctions: &[(VertexId, usize)],
) -> Vec<Bouquet> {
    let n = curves.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = i;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    let mut first_owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ci, c) in curves.iter().enumerate() {
        for v in c.vertices() {
            if let Some(&other) = first_owner.get(&v) {
                let (a, b) = (find(&mut parent, ci), find(&mut parent, other));
                parent[a] = b;
            } else {
                first_owner.insert(v, ci);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut slots: Vec<Option<LevelCurve>> = curves.into_iter().map(Some).collect();
    groups
        .into_values()
        .map(|members| {
            let circles: Vec<LevelCurve> =
                members.iter().map(|&i| slots[i].take().expect("each curve once")).collect();
            let on: BTreeSet<VertexId> = circles.iter().flat_map(|c| c.vertices()).collect();
            let tangencies = junctions
                .iter()
                .filter(|(v, _)| on.contains(v))
                .copied()
                .collect();
            Bouquet {
                value: t,
                circles,
                tangencies,
            }
        })
        .collect()
}

/// The maximal singular curve with the index data of its singular vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalCurve {
    pub bouquet: Bouquet,
    pub singular_vertices: Vec<(VertexId, VertexIndex)>,
    /// Singular level components enclosing every inner boundary; one when unique.
    pub candidates: usize,
}

/// Scan the levels through interior vertices of nonzero index and return the
/// unique component that contains a singular vertex and winds around every
/// inner boundary component.
pub fn maximal_singular_curve(complex: &PLComplex, field: &ScalarField) -> Result<MaximalCurve> {
    let comps = complex.boundary_components();
    if comps.len() < 3 {
        return Err(Error::NotMultiplyConnected(comps.len()));
    }
    let net = complex.network()?;
    let probes: Vec<Point> = comps[1..]
        .iter()
        .map(|c| complex.position(c.vertices[0]))
        .collect();
    let tracer = LevelTracer::new(complex, field);
    let tol = LEVEL_TOLERANCE * field.range();
    let mut values: Vec<f64> = Vec::new();
    for v in 0..complex.vertex_count() {
        if complex.is_boundary_vertex(v) {
            continue;
        }
        if vertex_index(&net, field, v)?.is_singular() {
            values.push(field[v]);
        }
    }
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let mut found: Vec<MaximalCurve> = Vec::new();
    for t in values {
        let class = classify_with(complex, &net, field, &tracer, t)?;
        for bouquet in class.bouquets {
            let on: BTreeSet<VertexId> = bouquet.circles.iter().flat_map(|c| c.vertices()).collect();
            let singular: Vec<(VertexId, VertexIndex)> = class
                .singular_vertices
                .iter()
                .filter(|(v, _)| on.contains(v))
                .copied()
                .collect();
            if !singular.is_empty() && probes.iter().all(|&p| bouquet.encloses(p)) {
                found.push(MaximalCurve {
                    bouquet,
                    singular_vertices: singular,
                    candidates: 0,
                });
            }
        }
    }
    let count = found.len();
    if count != 1 {
        return Err(Error::MaximalCurveCount(count));
    }
    let mut curve = found.pop().expect("one candidate");
    curve.candidates = count;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::WeightedEdge;

    fn star(values: &[f64]) -> (FiniteNetwork, ScalarField) {
        let n = values.len();
        let mut pts = vec![Point::new(0.0, 0.0)];
        let mut edges = Vec::new();
        for i in 0..n {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            pts.push(Point::new(a.cos(), a.sin()));
            edges.push(WeightedEdge::new(0, i + 1, 1.0));
        }
        let mut field = vec![0.0];
        field.extend_from_slice(values);
        (FiniteNetwork::new(pts, &edges, Vec::new()).unwrap(), ScalarField::new(field))
    }

    #[test]
    fn index_examples() {
        let (net, f) = star(&[-1.0, -2.0, -1.0, -3.0]);
        assert_eq!(vertex_index(&net, &f, 0).unwrap().index, 1);
        let (net, f) = star(&[1.0, 2.0, -1.0, -3.0]);
        let idx = vertex_index(&net, &f, 0).unwrap();
        assert_eq!((idx.sign_changes, idx.index), (2, 0));
        let (net, f) = star(&[1.0, -2.0, 1.0, -3.0]);
        assert_eq!(vertex_index(&net, &f, 0).unwrap().index, -1);
        let (net, f) = star(&[1.0, 0.0, 1.0, -3.0]);
        assert!(matches!(
            vertex_index(&net, &f, 0),
            Err(Error::ZeroDifference { vertex: 0, neighbor: 2 })
        ));
    }
}
