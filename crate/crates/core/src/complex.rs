//! Embedded cell complexes made of triangles and quadrilaterals.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{barycentric, orient, signed_area, winding_number, Point};
use crate::network::{BoundaryComponent, FiniteNetwork, ScalarField, VertexId, WeightedEdge};

/// An undirected edge stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey(pub VertexId, pub VertexId);

impl EdgeKey {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a < b {
            Self(a, b)
        } else {
            Self(b, a)
        }
    }

    pub fn other(self, v: VertexId) -> VertexId {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Original,
    TypeI,
    TypeII,
}

/// A 2-cell with vertices listed counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Triangle([VertexId; 3]),
    Quad([VertexId; 4]),
}

impl Cell {
    pub fn from_slice(ids: &[VertexId]) -> Option<Self> {
        match *ids {
            [a, b, c] => Some(Cell::Triangle([a, b, c])),
            [a, b, c, d] => Some(Cell::Quad([a, b, c, d])),
            _ => None,
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        match self {
            Cell::Triangle(v) => v,
            Cell::Quad(v) => v,
        }
    }

    fn vertices_mut(&mut self) -> &mut [VertexId] {
        match self {
            Cell::Triangle(v) => v,
            Cell::Quad(v) => v,
        }
    }

    /// Directed boundary edges `(v_i, v_{i+1})` in counterclockwise order.
    pub fn directed_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        let vs = self.vertices();
        let n = vs.len();
        (0..n).map(move |i| (vs[i], vs[(i + 1) % n]))
    }

    pub fn edge_keys(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.directed_edges().map(|(a, b)| EdgeKey::new(a, b))
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices().contains(&v)
    }
}

/// The outcome of cutting a complex along a set of edges.
#[derive(Debug, Clone)]
pub struct CutComplex {
    pub complex: PLComplex,
    /// Vertex of the input complex each output vertex was copied from.
    pub origin: Vec<VertexId>,
    /// Connected groups of cells after cutting.
    pub regions: Vec<Vec<usize>>,
}

/// Vertices, triangle and quadrilateral cells, per-edge conductances (zero on
/// edges that carry no current, such as level arcs) and boundary components.
#[derive(Debug, Clone)]
pub struct PLComplex {
    positions: Vec<Point>,
    kinds: Vec<VertexKind>,
    cells: Vec<Cell>,
    conductance: BTreeMap<EdgeKey, f64>,
    boundary: Vec<BoundaryComponent>,
    edge_cells: HashMap<EdgeKey, Vec<usize>>,
    vertex_cells: Vec<Vec<usize>>,
    adjacency: Vec<Vec<VertexId>>,
}

impl PLComplex {
    /// Cells are reoriented counterclockwise. Every cell edge needs a conductance.
    pub fn new(
        positions: Vec<Point>,
        kinds: Vec<VertexKind>,
        mut cells: Vec<Cell>,
        conductance: BTreeMap<EdgeKey, f64>,
        boundary: Vec<BoundaryComponent>,
    ) -> Result<Self> {
        let n = positions.len();
        if kinds.len() != n {
            return Err(Error::Topology(format!(
                "{} vertex kinds for {n} vertices",
                kinds.len()
            )));
        }
        for cell in &mut cells {
            if let Some(&v) = cell.vertices().iter().find(|&&v| v >= n) {
                return Err(Error::UnknownVertex(v));
            }
            let pts: Vec<Point> = cell.vertices().iter().map(|&v| positions[v]).collect();
            if signed_area(&pts) < 0.0 {
                cell.vertices_mut().reverse();
            }
        }
        let mut edge_cells: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
        let mut vertex_cells = vec![Vec::new(); n];
        for (ci, cell) in cells.iter().enumerate() {
            for &v in cell.vertices() {
                vertex_cells[v].push(ci);
            }
            for key in cell.edge_keys() {
                if key.0 == key.1 {
                    return Err(Error::InvalidEdge(key.0, key.1));
                }
                edge_cells.entry(key).or_default().push(ci);
            }
        }
        for (key, list) in &edge_cells {
            if list.len() > 2 {
                return Err(Error::Topology(format!(
                    "edge ({}, {}) is shared by {} cells",
                    key.0,
                    key.1,
                    list.len()
                )));
            }
            match conductance.get(key) {
                None => {
                    return Err(Error::Topology(format!(
                        "edge ({}, {}) has no conductance",
                        key.0, key.1
                    )))
                }
                Some(&c) if !(c >= 0.0) || !c.is_finite() => {
                    return Err(Error::NonPositiveConductance {
                        a: key.0,
                        b: key.1,
                        value: c,
                    })
                }
                Some(_) => {}
            }
        }
        if let Some(key) = conductance.keys().find(|k| !edge_cells.contains_key(k)) {
            return Err(Error::Topology(format!(
                "conductance given for ({}, {}), which is not a cell edge",
                key.0, key.1
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for key in conductance.keys() {
            adjacency[key.0].push(key.1);
            adjacency[key.1].push(key.0);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            positions,
            kinds,
            cells,
            conductance,
            boundary,
            edge_cells,
            vertex_cells,
            adjacency,
        })
    }

    /// All vertices original, all edges with the same conductance.
    pub fn from_cells(
        positions: Vec<Point>,
        cells: Vec<Cell>,
        conductance: f64,
        boundary: Vec<BoundaryComponent>,
    ) -> Result<Self> {
        let edges: BTreeMap<EdgeKey, f64> = cells
            .iter()
            .flat_map(|c| c.edge_keys().collect::<Vec<_>>())
            .map(|k| (k, conductance))
            .collect();
        let kinds = vec![VertexKind::Original; positions.len()];
        Self::new(positions, kinds, cells, edges, boundary)
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

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.kinds[v]
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn conductances(&self) -> &BTreeMap<EdgeKey, f64> {
        &self.conductance
    }

    pub fn conductance(&self, a: VertexId, b: VertexId) -> Option<f64> {
        self.conductance.get(&EdgeKey::new(a, b)).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.conductance.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.conductance.keys().copied()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.conductance.contains_key(&EdgeKey::new(a, b))
    }

    pub fn boundary_components(&self) -> &[BoundaryComponent] {
        &self.boundary
    }

    pub fn with_boundary(mut self, boundary: Vec<BoundaryComponent>) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn cells_of_edge(&self, key: EdgeKey) -> &[usize] {
        self.edge_cells.get(&key).map_or(&[], Vec::as_slice)
    }

    pub fn cells_of_vertex(&self, v: VertexId) -> &[usize] {
        &self.vertex_cells[v]
    }

    /// Neighbors in the 1-skeleton, including zero-conductance edges.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn is_boundary_edge(&self, key: EdgeKey) -> bool {
        self.cells_of_edge(key).len() == 1
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.adjacency[v]
            .iter()
            .any(|&w| self.is_boundary_edge(EdgeKey::new(v, w)))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.cells.len() as i64
    }

    pub fn cell_area(&self, i: usize) -> f64 {
        let pts: Vec<Point> = self.cells[i]
            .vertices()
            .iter()
            .map(|&v| self.positions[v])
            .collect();
        signed_area(&pts)
    }

    pub fn area(&self) -> f64 {
        (0..self.cells.len()).map(|i| self.cell_area(i)).sum()
    }

    /// The carrier network: every edge with positive conductance.
    pub fn network(&self) -> Result<FiniteNetwork> {
        let edges: Vec<WeightedEdge> = self
            .conductance
            .iter()
            .filter(|(_, &c)| c > 0.0)
            .map(|(k, &c)| WeightedEdge::new(k.0, k.1, c))
            .collect();
        FiniteNetwork::new(self.positions.clone(), &edges, self.boundary.clone())
    }

    /// Boundary edges chained into cycles, each traversed with the complex on its left.
    pub fn boundary_cycles(&self) -> Result<Vec<Vec<VertexId>>> {
        let mut next: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for cell in &self.cells {
            for (a, b) in cell.directed_edges() {
                if self.is_boundary_edge(EdgeKey::new(a, b)) && next.insert(a, b).is_some() {
                    return Err(Error::Topology(format!(
                        "vertex {a} starts two boundary edges"
                    )));
                }
            }
        }
        let mut cycles = Vec::new();
        let mut used = BTreeSet::new();
        for &start in next.keys() {
            if used.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            used.insert(start);
            let mut cur = next[&start];
            while cur != start {
                if !used.insert(cur) {
                    return Err(Error::Topology(format!(
                        "boundary through vertex {cur} does not close"
                    )));
                }
                cycle.push(cur);
                cur = *next.get(&cur).ok_or_else(|| {
                    Error::Topology(format!("boundary stops at vertex {cur}"))
                })?;
            }
            cycles.push(cycle);
        }
        Ok(cycles)
    }

    /// Index of a cell containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        const SLACK: f64 = 1e-12;
        self.cells.iter().position(|cell| {
            let vs = cell.vertices();
            let pts: Vec<Point> = vs.iter().map(|&v| self.positions[v]).collect();
            let scale = pts
                .iter()
                .map(|q| q.distance(pts[0]))
                .fold(0.0, f64::max)
                .max(1e-300);
            (0..pts.len()).all(|i| {
                let a = pts[i];
                let b = pts[(i + 1) % pts.len()];
                orient(a, b, p) >= -SLACK * scale * scale
            }) || (pts.len() == 4 && winding_number(&pts, p) != 0)
        })
    }

    /// Affine value on triangles, bilinear value on quadrilaterals.
    pub fn evaluate(&self, field: &ScalarField, p: Point) -> Result<f64> {
        let ci = self
            .locate(p)
            .ok_or(Error::OutsideDomain { x: p.x, y: p.y })?;
        Ok(self.evaluate_in_cell(field, ci, p))
    }

    pub fn evaluate_in_cell(&self, field: &ScalarField, ci: usize, p: Point) -> f64 {
        match self.cells[ci] {
            Cell::Triangle([a, b, c]) => {
                let w = barycentric(self.positions[a], self.positions[b], self.positions[c], p);
                w[0] * field[a] + w[1] * field[b] + w[2] * field[c]
            }
            Cell::Quad(q) => {
                let corners = q.map(|v| self.positions[v]);
                let (s, t) = inverse_bilinear(&corners, p);
                bilinear(q.map(|v| field[v]), s, t)
            }
        }
    }

    /// Cut along `cut` edges: around each vertex the incident cells are grouped
    /// into fans joined across uncut edges, and every fan gets its own copy of the
    /// vertex. `primary(v, groups)` picks which group keeps the id `v`; the other
    /// copies are appended in vertex order.
    pub fn split_along<F>(&self, cut: &BTreeSet<EdgeKey>, mut primary: F) -> Result<CutComplex>
    where
        F: FnMut(VertexId, &[Vec<usize>]) -> usize,
    {
        let n = self.vertex_count();
        let mut cell_copy: HashMap<(usize, VertexId), VertexId> = HashMap::new();
        let mut origin: Vec<VertexId> = (0..n).collect();
        for v in 0..n {
            let groups = self.fans_at(v, cut);
            if groups.is_empty() {
                continue;
            }
            let keep = primary(v, &groups).min(groups.len() - 1);
            for (gi, group) in groups.iter().enumerate() {
                let id = if gi == keep {
                    v
                } else {
                    origin.push(v);
                    origin.len() - 1
                };
                for &ci in group {
                    cell_copy.insert((ci, v), id);
                }
            }
        }
        let mut positions = self.positions.clone();
        let mut kinds = self.kinds.clone();
        for &o in &origin[n..] {
            positions.push(self.positions[o]);
            kinds.push(self.kinds[o]);
        }
        let cells: Vec<Cell> = self
            .cells
            .iter()
            .enumerate()
            .map(|(ci, cell)| {
                let mut c = cell.clone();
                for v in c.vertices_mut() {
                    *v = cell_copy[&(ci, *v)];
                }
                c
            })
            .collect();
        let mut conductance = BTreeMap::new();
        for (ci, cell) in cells.iter().enumerate() {
            for ((a, b), (oa, ob)) in cell.directed_edges().zip(self.cells[ci].directed_edges()) {
                conductance.insert(EdgeKey::new(a, b), self.conductance[&EdgeKey::new(oa, ob)]);
            }
        }
        let regions = self.regions_across(cut);
        let complex = PLComplex::new(positions, kinds, cells, conductance, Vec::new())?;
        Ok(CutComplex {
            complex,
            origin,
            regions,
        })
    }

    /// Incident cells of `v` grouped by connectivity across uncut edges at `v`.
    pub fn fans_at(&self, v: VertexId, cut: &BTreeSet<EdgeKey>) -> Vec<Vec<usize>> {
        let incident = &self.vertex_cells[v];
        let mut group_of: HashMap<usize, usize> = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &start in incident {
            if group_of.contains_key(&start) {
                continue;
            }
            let gi = groups.len();
            let mut group = vec![start];
            group_of.insert(start, gi);
            let mut stack = vec![start];
            while let Some(ci) = stack.pop() {
                for key in self.cells[ci].edge_keys() {
                    if !key.contains(v) || cut.contains(&key) {
                        continue;
                    }
                    for &other in self.cells_of_edge(key) {
                        if let std::collections::hash_map::Entry::Vacant(e) = group_of.entry(other)
                        {
                            e.insert(gi);
                            group.push(other);
                            stack.push(other);
                        }
                    }
                }
            }
            group.sort_unstable();
            groups.push(group);
        }
        groups.sort();
        groups
    }

    /// Connected groups of cells, joined across edges not in `cut`.
    pub fn regions_across(&self, cut: &BTreeSet<EdgeKey>) -> Vec<Vec<usize>> {
        let m = self.cells.len();
        let mut region = vec![usize::MAX; m];
        let mut out = Vec::new();
        for start in 0..m {
            if region[start] != usize::MAX {
                continue;
            }
            let ri = out.len();
            region[start] = ri;
            let mut members = vec![start];
            let mut stack = vec![start];
            while let Some(ci) = stack.pop() {
                for key in self.cells[ci].edge_keys() {
                    if cut.contains(&key) {
                        continue;
                    }
                    for &other in self.cells_of_edge(key) {
                        if region[other] == usize::MAX {
                            region[other] = ri;
                            members.push(other);
                            stack.push(other);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// The sub-complex on `cell_ids` with compacted vertex ids. Returns it with
    /// the parent id of each new vertex.
    pub fn extract(&self, cell_ids: &[usize]) -> Result<(PLComplex, Vec<VertexId>)> {
        let used: BTreeSet<VertexId> = cell_ids
            .iter()
            .flat_map(|&ci| self.cells[ci].vertices().iter().copied())
            .collect();
        let parent: Vec<VertexId> = used.into_iter().collect();
        let local: HashMap<VertexId, VertexId> =
            parent.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let positions = parent.iter().map(|&v| self.positions[v]).collect();
        let kinds = parent.iter().map(|&v| self.kinds[v]).collect();
        let mut cells = Vec::with_capacity(cell_ids.len());
        let mut conductance = BTreeMap::new();
        for &ci in cell_ids {
            let mut c = self.cells[ci].clone();
            for key in c.edge_keys() {
                conductance.insert(
                    EdgeKey::new(local[&key.0], local[&key.1]),
                    self.conductance[&key],
                );
            }
            for v in c.vertices_mut() {
                *v = local[v];
            }
            cells.push(c);
        }
        let boundary = self
            .boundary
            .iter()
            .filter_map(|b| {
                let vertices: Vec<VertexId> =
                    b.vertices.iter().filter_map(|v| local.get(v).copied()).collect();
                (!vertices.is_empty()).then(|| BoundaryComponent {
                    name: b.name.clone(),
                    vertices,
                })
            })
            .collect();
        let complex = PLComplex::new(positions, kinds, cells, conductance, boundary)?;
        Ok((complex, parent))
    }
}

pub(crate) fn bilinear(values: [f64; 4], s: f64, t: f64) -> f64 {
    (1.0 - s) * (1.0 - t) * values[0]
        + s * (1.0 - t) * values[1]
        + s * t * values[2]
        + (1.0 - s) * t * values[3]
}

fn bilinear_point(q: &[Point; 4], s: f64, t: f64) -> Point {
    Point::new(
        bilinear([q[0].x, q[1].x, q[2].x, q[3].x], s, t),
        bilinear([q[0].y, q[1].y, q[2].y, q[3].y], s, t),
    )
}

/// Parameters `(s, t)` of `p` under the bilinear map of the quadrilateral `q`.
pub(crate) fn inverse_bilinear(q: &[Point; 4], p: Point) -> (f64, f64) {
    let (mut s, mut t) = (0.5, 0.5);
    for _ in 0..50 {
        let cur = bilinear_point(q, s, t);
        let rx = cur.x - p.x;
        let ry = cur.y - p.y;
        let ds_x = (1.0 - t) * (q[1].x - q[0].x) + t * (q[2].x - q[3].x);
        let ds_y = (1.0 - t) * (q[1].y - q[0].y) + t * (q[2].y - q[3].y);
        let dt_x = (1.0 - s) * (q[3].x - q[0].x) + s * (q[2].x - q[1].x);
        let dt_y = (1.0 - s) * (q[3].y - q[0].y) + s * (q[2].y - q[1].y);
        let det = ds_x * dt_y - ds_y * dt_x;
        if det == 0.0 {
            break;
        }
        let step_s = (rx * dt_y - ry * dt_x) / det;
        let step_t = (ds_x * ry - ds_y * rx) / det;
        s -= step_s;
        t -= step_t;
        if step_s.abs() + step_t.abs() < 1e-15 {
            break;
        }
    }
    (s, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PLComplex {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        PLComplex::from_cells(pts, vec![Cell::Quad([0, 1, 2, 3])], 1.0, vec![]).unwrap()
    }

    #[test]
    fn quad_center_is_bilinear_average() {
        let q = unit_square();
        let f = ScalarField::new(vec![0.0, 1.0, 1.0, 0.0]);
        let v = q.evaluate(&f, Point::new(0.5, 0.5)).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(q.evaluate(&f, Point::new(2.0, 0.5)).is_err());
    }

    #[test]
    fn triangle_vertex_and_edge_midpoint() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        let c = PLComplex::from_cells(pts, vec![Cell::Triangle([0, 2, 1])], 1.0, vec![]).unwrap();
        let f = ScalarField::new(vec![0.0, 1.0, 3.0]);
        assert_eq!(c.cell(0).vertices(), &[1, 2, 0]);
        assert!((c.evaluate(&f, Point::new(0.0, 1.0)).unwrap() - 3.0).abs() < 1e-15);
        assert!((c.evaluate(&f, Point::new(0.5, 0.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn split_square_diagonal() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let cells = vec![Cell::Triangle([0, 1, 2]), Cell::Triangle([0, 2, 3])];
        let c = PLComplex::from_cells(pts, cells, 1.0, vec![]).unwrap();
        assert_eq!(c.euler_characteristic(), 1);
        let cut: BTreeSet<_> = [EdgeKey::new(0, 2)].into_iter().collect();
        let out = c.split_along(&cut, |_, _| 0).unwrap();
        assert_eq!(out.regions.len(), 2);
        assert_eq!(out.complex.vertex_count(), 6);
        assert_eq!(out.complex.boundary_cycles().unwrap().len(), 2);
    }
}
