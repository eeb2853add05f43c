//! Weighted planar graphs, their Laplacian and normal derivative, and the
//! Dirichlet and Dirichlet-Neumann boundary value problems.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::solver::SpdSystem;

pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: VertexId,
    pub conductance: f64,
}

/// A named boundary component. By convention index 0 of a network's components
/// is the outer boundary `E1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComponent {
    pub name: String,
    pub vertices: Vec<VertexId>,
}

/// An undirected edge with its conductance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub a: VertexId,
    pub b: VertexId,
    pub conductance: f64,
}

impl WeightedEdge {
    pub const fn new(a: VertexId, b: VertexId, conductance: f64) -> Self {
        Self { a, b, conductance }
    }
}

/// A simple graph embedded in the plane with strictly positive symmetric
/// conductances.
#[derive(Debug, Clone)]
pub struct FiniteNetwork {
    positions: Vec<Point>,
    adjacency: Vec<Vec<Neighbor>>,
    boundary: Vec<BoundaryComponent>,
}

impl FiniteNetwork {
    pub fn new(
        positions: Vec<Point>,
        edges: &[WeightedEdge],
        boundary: Vec<BoundaryComponent>,
    ) -> Result<Self> {
        let n = positions.len();
        let mut adjacency: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for e in edges {
            if e.a >= n {
                return Err(Error::UnknownVertex(e.a));
            }
            if e.b >= n {
                return Err(Error::UnknownVertex(e.b));
            }
            if e.a == e.b {
                return Err(Error::InvalidEdge(e.a, e.b));
            }
            if !(e.conductance > 0.0) || !e.conductance.is_finite() {
                return Err(Error::NonPositiveConductance {
                    a: e.a,
                    b: e.b,
                    value: e.conductance,
                });
            }
            adjacency[e.a].push(Neighbor {
                id: e.b,
                conductance: e.conductance,
            });
            adjacency[e.b].push(Neighbor {
                id: e.a,
                conductance: e.conductance,
            });
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_by_key(|nb| nb.id);
            if let Some(w) = list.windows(2).find(|w| w[0].id == w[1].id) {
                return Err(Error::InvalidEdge(v, w[0].id));
            }
        }
        let mut seen = BTreeSet::new();
        for comp in &boundary {
            for &v in &comp.vertices {
                if v >= n {
                    return Err(Error::UnknownVertex(v));
                }
                if !seen.insert(v) {
                    return Err(Error::BoundaryData(format!(
                        "vertex {v} belongs to more than one boundary component"
                    )));
                }
            }
        }
        Ok(Self {
            positions,
            adjacency,
            boundary,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, v: VertexId) -> Point {
        self.positions[v]
    }

    pub fn neighbors(&self, v: VertexId) -> &[Neighbor] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn conductance(&self, a: VertexId, b: VertexId) -> Option<f64> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by_key(&b, |nb| nb.id)
            .ok()
            .map(|i| list[i].conductance)
    }

    pub fn boundary_components(&self) -> &[BoundaryComponent] {
        &self.boundary
    }

    /// Each undirected edge once, with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, list)| {
            list.iter()
                .filter(move |nb| nb.id > a)
                .map(move |nb| WeightedEdge::new(a, nb.id, nb.conductance))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbors of `v` sorted counterclockwise by angle, starting from the
    /// direction of smallest angle in `(-π, π]`.
    pub fn neighbors_ccw(&self, v: VertexId) -> Vec<VertexId> {
        let p = self.positions[v];
        let mut ids: Vec<(f64, VertexId)> = self.adjacency[v]
            .iter()
            .map(|nb| (p.angle_to(self.positions[nb.id]), nb.id))
            .collect();
        ids.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        ids.into_iter().map(|(_, id)| id).collect()
    }

    /// Neighbors of `v` enumerated clockwise.
    pub fn neighbors_cw(&self, v: VertexId) -> Vec<VertexId> {
        let mut ids = self.neighbors_ccw(v);
        ids.reverse();
        ids
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for nb in &self.adjacency[v] {
                if !seen[nb.id] {
                    seen[nb.id] = true;
                    count += 1;
                    queue.push_back(nb.id);
                }
            }
        }
        count == n
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }
}

/// Per-vertex real values on a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|v| v * s).collect())
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.max() - self.min()
        }
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl std::ops::Index<VertexId> for ScalarField {
    type Output = f64;

    fn index(&self, v: VertexId) -> &f64 {
        &self.0[v]
    }
}

/// Value `high_value` on the high set, `low_value` on every low set.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSpec {
    pub high_set: Vec<VertexId>,
    pub high_value: f64,
    pub low_sets: Vec<Vec<VertexId>>,
    pub low_value: f64,
}

impl DirichletSpec {
    /// The standard problem: `k` on `high_set`, zero on `low_sets`.
    pub fn new(high_set: Vec<VertexId>, k: f64, low_sets: Vec<Vec<VertexId>>) -> Self {
        Self {
            high_set,
            high_value: k,
            low_sets,
            low_value: 0.0,
        }
    }

    pub fn with_low_value(mut self, value: f64) -> Self {
        self.low_value = value;
        self
    }

    fn prescribed(&self, n: usize) -> Result<Vec<Option<f64>>> {
        if self.high_set.is_empty() || self.low_sets.iter().all(Vec::is_empty) {
            return Err(Error::BoundaryData(
                "high set and low sets must be nonempty".into(),
            ));
        }
        if !(self.high_value > self.low_value) {
            return Err(Error::BoundaryData(format!(
                "high value {} must exceed low value {}",
                self.high_value, self.low_value
            )));
        }
        let mut out = vec![None; n];
        for &v in &self.high_set {
            *out.get_mut(v).ok_or(Error::UnknownVertex(v))? = Some(self.high_value);
        }
        for &v in self.low_sets.iter().flatten() {
            let slot = out.get_mut(v).ok_or(Error::UnknownVertex(v))?;
            if slot.is_some() {
                return Err(Error::BoundaryData(format!(
                    "vertex {v} is in both the high set and a low set"
                )));
            }
            *slot = Some(self.low_value);
        }
        Ok(out)
    }
}

/// A Dirichlet arc with per-vertex values.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletArc {
    pub vertices: Vec<VertexId>,
    pub values: Vec<f64>,
}

impl DirichletArc {
    pub fn constant(vertices: Vec<VertexId>, value: f64) -> Self {
        let values = vec![value; vertices.len()];
        Self { vertices, values }
    }
}

/// Dirichlet data on some arcs, zero normal derivative on others. Vertices in
/// neither are interior.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirichletNeumannSpec {
    pub dirichlet: Vec<DirichletArc>,
    pub neumann: Vec<Vec<VertexId>>,
}

impl DirichletNeumannSpec {
    fn prescribed(&self, n: usize) -> Result<Vec<Option<f64>>> {
        if self.dirichlet.iter().all(|a| a.vertices.is_empty()) {
            return Err(Error::NoDirichletData);
        }
        let mut out = vec![None; n];
        for arc in &self.dirichlet {
            if arc.values.len() != arc.vertices.len() {
                return Err(Error::BoundaryData(
                    "Dirichlet arc has mismatched vertex and value lists".into(),
                ));
            }
            for (&v, &value) in arc.vertices.iter().zip(&arc.values) {
                let slot = out.get_mut(v).ok_or(Error::UnknownVertex(v))?;
                if slot.is_some() {
                    return Err(Error::BoundaryData(format!(
                        "vertex {v} is on two Dirichlet arcs"
                    )));
                }
                *slot = Some(value);
            }
        }
        for &v in self.neumann.iter().flatten() {
            match out.get(v) {
                None => return Err(Error::UnknownVertex(v)),
                Some(Some(_)) => {
                    return Err(Error::BoundaryData(format!(
                        "vertex {v} is on both a Dirichlet and a Neumann arc"
                    )))
                }
                Some(None) => {}
            }
        }
        Ok(out)
    }
}

/// `Σ_{y~x} c(x,y)(u(x) − u(y))` over every neighbor of `x`.
pub fn laplacian(net: &FiniteNetwork, u: &ScalarField, x: VertexId) -> Result<f64> {
    net.check_vertex(x)?;
    let nbs = net.neighbors(x);
    if nbs.is_empty() {
        return Err(Error::IsolatedVertex(x));
    }
    Ok(nbs
        .iter()
        .map(|nb| nb.conductance * (u[x] - u[nb.id]))
        .sum())
}

fn membership(n: usize, set: &[VertexId]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &v in set {
        *mask.get_mut(v).ok_or(Error::UnknownVertex(v))? = true;
    }
    Ok(mask)
}

fn flux_into(net: &FiniteNetwork, u: &ScalarField, x: VertexId, inside: &[bool]) -> f64 {
    net.neighbors(x)
        .iter()
        .filter(|nb| inside[nb.id])
        .map(|nb| nb.conductance * (u[x] - u[nb.id]))
        .sum()
}

/// `Σ_{y~x, y∈F} c(x,y)(u(x) − u(y))` for `x` on the vertex boundary of `F`.
pub fn normal_derivative(
    net: &FiniteNetwork,
    u: &ScalarField,
    x: VertexId,
    set: &[VertexId],
) -> Result<f64> {
    net.check_vertex(x)?;
    let inside = membership(net.vertex_count(), set)?;
    if inside[x] || !net.neighbors(x).iter().any(|nb| inside[nb.id]) {
        return Err(Error::NotOnVertexBoundary(x));
    }
    Ok(flux_into(net, u, x, &inside))
}

/// Both sides of the first Green identity over `F`: the energy
/// `Σ_{edges meeting F} c·du·dv` and `Σ_{F} v·Δu + Σ_{δF} v·∂u/∂n`.
pub fn green_identity_sides(
    net: &FiniteNetwork,
    u: &ScalarField,
    v: &ScalarField,
    set: &[VertexId],
) -> Result<(f64, f64)> {
    let inside = membership(net.vertex_count(), set)?;
    let energy: f64 = net
        .edges()
        .filter(|e| inside[e.a] || inside[e.b])
        .map(|e| e.conductance * (u[e.a] - u[e.b]) * (v[e.a] - v[e.b]))
        .sum();
    let mut rhs = 0.0;
    for x in 0..net.vertex_count() {
        if inside[x] {
            let lap: f64 = net
                .neighbors(x)
                .iter()
                .map(|nb| nb.conductance * (u[x] - u[nb.id]))
                .sum();
            rhs += v[x] * lap;
        } else if net.neighbors(x).iter().any(|nb| inside[nb.id]) {
            rhs += v[x] * flux_into(net, u, x, &inside);
        }
    }
    Ok((energy, rhs))
}

/// `|LHS − RHS|` of the first Green identity over `F`.
pub fn green_identity_residual(
    net: &FiniteNetwork,
    u: &ScalarField,
    v: &ScalarField,
    set: &[VertexId],
) -> Result<f64> {
    let (lhs, rhs) = green_identity_sides(net, u, v, set)?;
    Ok((lhs - rhs).abs())
}

/// `Σ_e c(e)·|du(e)|·|dv(e)| + 1`, the scale the Green residual is measured against.
pub fn green_identity_scale(net: &FiniteNetwork, u: &ScalarField, v: &ScalarField) -> f64 {
    net.edges()
        .map(|e| e.conductance * (u[e.a] - u[e.b]).abs() * (v[e.a] - v[e.b]).abs())
        .sum::<f64>()
        + 1.0
}

/// Solve `Δu = 0` at every vertex without a prescribed value.
pub fn solve_prescribed(net: &FiniteNetwork, prescribed: &[Option<f64>]) -> Result<ScalarField> {
    let n = net.vertex_count();
    if prescribed.len() != n {
        return Err(Error::BoundaryData(format!(
            "{} prescribed slots for {n} vertices",
            prescribed.len()
        )));
    }
    if prescribed.iter().all(Option::is_none) {
        return Err(Error::NoDirichletData);
    }
    check_no_floating(net, prescribed)?;

    let mut index = vec![usize::MAX; n];
    let mut free = Vec::new();
    for (v, p) in prescribed.iter().enumerate() {
        if p.is_none() {
            index[v] = free.len();
            free.push(v);
        }
    }
    let mut entries = Vec::with_capacity(free.len() * 7);
    let mut rhs = vec![0.0; free.len()];
    for (row, &v) in free.iter().enumerate() {
        let mut diag = 0.0;
        for nb in net.neighbors(v) {
            diag += nb.conductance;
            match prescribed[nb.id] {
                Some(value) => rhs[row] += nb.conductance * value,
                None => entries.push((row, index[nb.id], -nb.conductance)),
            }
        }
        entries.push((row, row, diag));
    }
    let system = SpdSystem::from_triplets(free.len(), &entries);
    let solution = system.solve(&rhs)?;
    let mut values: Vec<f64> = prescribed.iter().map(|p| p.unwrap_or(0.0)).collect();
    for (&v, x) in free.iter().zip(solution) {
        values[v] = x;
    }
    let field = ScalarField::new(values);
    check_consistency(net, &field, prescribed)?;
    Ok(field)
}

fn check_no_floating(net: &FiniteNetwork, prescribed: &[Option<f64>]) -> Result<()> {
    let n = net.vertex_count();
    let mut reached: Vec<bool> = prescribed.iter().map(Option::is_some).collect();
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| reached[v]).collect();
    while let Some(v) = queue.pop_front() {
        for nb in net.neighbors(v) {
            if !reached[nb.id] {
                reached[nb.id] = true;
                queue.push_back(nb.id);
            }
        }
    }
    match reached.iter().position(|r| !r) {
        Some(v) => Err(Error::FloatingComponent(v)),
        None => Ok(()),
    }
}

/// The net flux out of the prescribed vertices must vanish up to solver error.
fn check_consistency(
    net: &FiniteNetwork,
    u: &ScalarField,
    prescribed: &[Option<f64>],
) -> Result<()> {
    let mut total = 0.0;
    let mut scale = 0.0;
    for v in (0..net.vertex_count()).filter(|&v| prescribed[v].is_some()) {
        let flux: f64 = net
            .neighbors(v)
            .iter()
            .map(|nb| nb.conductance * (u[v] - u[nb.id]))
            .sum();
        total += flux;
        scale += flux.abs();
    }
    let bound = 1e-9 * scale;
    if total.abs() > bound {
        return Err(Error::Inconsistent {
            flux: total.abs(),
            bound,
        });
    }
    Ok(())
}

pub fn solve_dirichlet(net: &FiniteNetwork, spec: &DirichletSpec) -> Result<ScalarField> {
    let prescribed = spec.prescribed(net.vertex_count())?;
    solve_prescribed(net, &prescribed)
}

/// Neumann vertices satisfy `Δu = 0` over all their neighbors, which is the
/// vanishing of the normal derivative into the rest of the network.
pub fn solve_dirichlet_neumann(
    net: &FiniteNetwork,
    spec: &DirichletNeumannSpec,
) -> Result<ScalarField> {
    let prescribed = spec.prescribed(net.vertex_count())?;
    solve_prescribed(net, &prescribed)
}

/// Vertices without prescribed data whose value is not strictly between the
/// minimum and maximum of the prescribed data.
pub fn maximum_principle_violations(
    u: &ScalarField,
    prescribed: &[Option<f64>],
) -> Vec<VertexId> {
    let data: Vec<f64> = prescribed.iter().flatten().copied().collect();
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Vec::new();
    }
    prescribed
        .iter()
        .enumerate()
        .filter(|(v, p)| p.is_none() && !(u[*v] > lo && u[*v] < hi))
        .map(|(v, _)| v)
        .collect()
}

impl DirichletSpec {
    /// Per-vertex prescribed values, checked against `n` vertices.
    pub fn to_prescribed(&self, n: usize) -> Result<Vec<Option<f64>>> {
        self.prescribed(n)
    }
}

impl DirichletNeumannSpec {
    pub fn to_prescribed(&self, n: usize) -> Result<Vec<Option<f64>>> {
        self.prescribed(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> FiniteNetwork {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ];
        let edges = [WeightedEdge::new(0, 1, 1.0), WeightedEdge::new(1, 2, 1.0)];
        FiniteNetwork::new(pts, &edges, vec![]).unwrap()
    }

    #[test]
    fn affine_is_harmonic_on_path() {
        let net = path3();
        let u = ScalarField::new(vec![0.0, 1.0, 2.0]);
        assert_eq!(laplacian(&net, &u, 1).unwrap(), 0.0);
    }

    #[test]
    fn star_laplacian() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
        ];
        let edges: Vec<_> = (1..4).map(|i| WeightedEdge::new(0, i, 1.0)).collect();
        let net = FiniteNetwork::new(pts, &edges, vec![]).unwrap();
        let u = ScalarField::new(vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(laplacian(&net, &u, 0).unwrap(), 3.0);
    }

    #[test]
    fn single_edge_conductance_two() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let net = FiniteNetwork::new(pts, &[WeightedEdge::new(0, 1, 2.0)], vec![]).unwrap();
        let u = ScalarField::new(vec![1.0, 0.0]);
        assert_eq!(laplacian(&net, &u, 0).unwrap(), 2.0);
        assert!(matches!(laplacian(&net, &u, 5), Err(Error::UnknownVertex(5))));
    }

    #[test]
    fn normal_derivative_examples() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        let edges = [WeightedEdge::new(0, 1, 1.0), WeightedEdge::new(0, 2, 1.0)];
        let net = FiniteNetwork::new(pts, &edges, vec![]).unwrap();
        let u = ScalarField::new(vec![1.0, 0.0, 0.5]);
        assert_eq!(normal_derivative(&net, &u, 0, &[1]).unwrap(), 1.0);
        assert_eq!(normal_derivative(&net, &u, 0, &[1, 2]).unwrap(), 1.5);
        let c = ScalarField::constant(3, 4.0);
        assert_eq!(normal_derivative(&net, &c, 0, &[1, 2]).unwrap(), 0.0);
        assert!(matches!(
            normal_derivative(&net, &u, 1, &[1]),
            Err(Error::NotOnVertexBoundary(1))
        ));
    }

    #[test]
    fn one_interior_vertex_is_average() {
        let net = path3();
        let spec = DirichletSpec::new(vec![0], 1.0, vec![vec![2]]);
        let u = solve_dirichlet(&net, &spec).unwrap();
        assert!((u[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_data_gives_constant_field() {
        let net = path3();
        let spec = DirichletNeumannSpec {
            dirichlet: vec![
                DirichletArc::constant(vec![0], 2.5),
                DirichletArc::constant(vec![2], 2.5),
            ],
            neumann: vec![],
        };
        let u = solve_dirichlet_neumann(&net, &spec).unwrap();
        assert!(u.values().iter().all(|v| (v - 2.5).abs() < 1e-15));
    }

    #[test]
    fn floating_component_rejected() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(6.0, 0.0),
        ];
        let edges = [WeightedEdge::new(0, 1, 1.0), WeightedEdge::new(2, 3, 1.0)];
        let net = FiniteNetwork::new(pts, &edges, vec![]).unwrap();
        let spec = DirichletSpec::new(vec![0], 1.0, vec![vec![1]]);
        assert!(matches!(
            solve_dirichlet(&net, &spec),
            Err(Error::FloatingComponent(2))
        ));
    }

    #[test]
    fn non_positive_conductance_rejected() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let err = FiniteNetwork::new(pts, &[WeightedEdge::new(0, 1, -1.0)], vec![]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveConductance { .. }));
    }

    #[test]
    fn missing_dirichlet_data() {
        let net = path3();
        let spec = DirichletNeumannSpec {
            dirichlet: vec![],
            neumann: vec![vec![0, 2]],
        };
        assert!(matches!(
            solve_dirichlet_neumann(&net, &spec),
            Err(Error::NoDirichletData)
        ));
    }

    #[test]
    fn green_single_edge() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let net = FiniteNetwork::new(pts, &[WeightedEdge::new(0, 1, 3.0)], vec![]).unwrap();
        let u = ScalarField::new(vec![1.0, 0.0]);
        let (lhs, rhs) = green_identity_sides(&net, &u, &u, &[0]).unwrap();
        assert_eq!(lhs, 3.0);
        assert_eq!(rhs, 3.0);
    }
}
