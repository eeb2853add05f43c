use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::LEVEL_TOLERANCE;
use crate::complex::{Cell, EdgeKey, PLComplex, VertexKind};
use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point};
use crate::network::{ScalarField, VertexId};

/// Where a level point sits in the complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSite {
    Vertex(VertexId),
    /// Interior point of edge `(from, to)` at parameter `t` from `from`, with `from < to`.
    Edge { from: VertexId, to: VertexId, t: f64 },
}

impl PointSite {
    /// Affine interpolation of `field` at this site.
    pub fn interpolate(&self, field: &ScalarField) -> f64 {
        match *self {
            PointSite::Vertex(v) => field[v],
            PointSite::Edge { from, to, .. } if field[from] == field[to] => field[from],
            PointSite::Edge { from, to, t } => (1.0 - t) * field[from] + t * field[to],
        }
    }

    pub fn vertex(&self) -> Option<VertexId> {
        match *self {
            PointSite::Vertex(v) => Some(v),
            PointSite::Edge { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    OriginalVertex,
    TypeIVertex,
    TypeIIVertex,
    EdgePoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint {
    pub position: Point,
    pub site: PointSite,
    pub provenance: Provenance,
}

/// An ordered polyline on which the field is constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub value: f64,
    pub points: Vec<LevelPoint>,
    pub closed: bool,
}

impl LevelCurve {
    pub fn positions(&self) -> Vec<Point> {
        self.points.iter().map(|p| p.position).collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.points.iter().filter_map(|p| p.site.vertex())
    }

    pub fn reverse(&mut self) {
        self.points.reverse();
    }

    /// Euclidean length of the polyline.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        let open: f64 = self
            .points
            .windows(2)
            .map(|w| w[0].position.distance(w[1].position))
            .sum();
        if self.closed && n > 1 {
            open + self.points[n - 1].position.distance(self.points[0].position)
        } else {
            open
        }
    }
}

/// All components of one level, with the vertices where several circles meet.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub value: f64,
    pub curves: Vec<LevelCurve>,
    /// Vertices of segment-graph degree above two, with the number of circles through them.
    pub junctions: Vec<(VertexId, usize)>,
}

/// Comparison of vertex values, optionally breaking exact ties by vertex id as
/// if the larger id carried an infinitesimally larger value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValueOrder {
    pub perturb: bool,
}

impl ValueOrder {
    pub fn compare(&self, field: &ScalarField, a: VertexId, b: VertexId) -> Ordering {
        match field[a].total_cmp(&field[b]) {
            Ordering::Equal if self.perturb => a.cmp(&b),
            o => o,
        }
    }

    pub fn is_below(&self, field: &ScalarField, a: VertexId, b: VertexId) -> bool {
        self.compare(field, a, b) == Ordering::Less
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum NodeKey {
    Vertex(VertexId),
    Edge(EdgeKey),
}

/// Level-curve extraction with cells bucketed by value range.
pub struct LevelTracer<'a> {
    complex: &'a PLComplex,
    field: &'a ScalarField,
    tol: f64,
    lo: f64,
    hi: f64,
    bucket_width: f64,
    buckets: Vec<Vec<u32>>,
}

impl<'a> LevelTracer<'a> {
    pub fn new(complex: &'a PLComplex, field: &'a ScalarField) -> Self {
        Self::with_tolerance(complex, field, LEVEL_TOLERANCE)
    }

    pub fn with_tolerance(complex: &'a PLComplex, field: &'a ScalarField, relative: f64) -> Self {
        let lo = field.min();
        let hi = field.max();
        let range = (hi - lo).max(0.0);
        let tol = relative * range.max(f64::MIN_POSITIVE);
        let count = (complex.cells().len() / 2).clamp(1, 1 << 16);
        let bucket_width = if range > 0.0 {
            range / count as f64
        } else {
            1.0
        };
        let mut buckets = vec![Vec::new(); count];
        for (ci, cell) in complex.cells().iter().enumerate() {
            let (cmin, cmax) = cell
                .vertices()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(field[v]), b.max(field[v]))
                });
            let first = Self::bucket_of(lo, bucket_width, count, cmin - tol);
            let last = Self::bucket_of(lo, bucket_width, count, cmax + tol);
            for b in &mut buckets[first..=last] {
                b.push(ci as u32);
            }
        }
        Self {
            complex,
            field,
            tol,
            lo,
            hi,
            bucket_width,
            buckets,
        }
    }

    fn bucket_of(lo: f64, width: f64, count: usize, t: f64) -> usize {
        let idx = ((t - lo) / width).floor();
        if idx.is_nan() || idx < 0.0 {
            0
        } else {
            (idx as usize).min(count - 1)
        }
    }

    /// Absolute tolerance for "on the level".
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn complex(&self) -> &PLComplex {
        self.complex
    }

    pub fn field(&self) -> &ScalarField {
        self.field
    }

    fn side(&self, v: VertexId, t: f64) -> i8 {
        let d = self.field[v] - t;
        if d.abs() <= self.tol {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        }
    }

    fn vertex_point(&self, v: VertexId) -> LevelPoint {
        let provenance = match self.complex.kind(v) {
            VertexKind::Original => Provenance::OriginalVertex,
            VertexKind::TypeI => Provenance::TypeIVertex,
            VertexKind::TypeII => Provenance::TypeIIVertex,
        };
        LevelPoint {
            position: self.complex.position(v),
            site: PointSite::Vertex(v),
            provenance,
        }
    }

    fn edge_point(&self, key: EdgeKey, t: f64) -> LevelPoint {
        let fa = self.field[key.0];
        let fb = self.field[key.1];
        let s = ((t - fa) / (fb - fa)).clamp(0.0, 1.0);
        LevelPoint {
            position: self.complex.position(key.0).lerp(self.complex.position(key.1), s),
            site: PointSite::Edge {
                from: key.0,
                to: key.1,
                t: s,
            },
            provenance: Provenance::EdgePoint,
        }
    }

    fn cell_center_value(&self, cell: &Cell) -> f64 {
        let vs = cell.vertices();
        vs.iter().map(|&v| self.field[v]).sum::<f64>() / vs.len() as f64
    }

    /// Sign of the cell on the far side of its edge `key` relative to level `t`.
    fn side_across(&self, ci: usize, key: EdgeKey, t: f64) -> i8 {
        self.complex
            .cell(ci)
            .vertices()
            .iter()
            .filter(|&&v| !key.contains(v))
            .map(|&v| self.side(v, t))
            .find(|&s| s != 0)
            .unwrap_or(0)
    }

    /// Chords of level `t` across one cell, as pairs of nodes.
    fn cell_chords(&self, ci: usize, t: f64, nodes: &mut HashMap<NodeKey, LevelPoint>) -> Vec<(NodeKey, NodeKey)> {
        let cell = self.complex.cell(ci);
        let vs = cell.vertices();
        let n = vs.len();
        let sides: Vec<i8> = vs.iter().map(|&v| self.side(v, t)).collect();
        if sides.iter().all(|&s| s > 0) || sides.iter().all(|&s| s < 0) {
            return Vec::new();
        }
        // Points on the cell boundary in counterclockwise order, each with the
        // sign of the boundary arc that follows it.
        let mut points: Vec<NodeKey> = Vec::new();
        let mut arc_sign: Vec<i8> = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            if sides[i] == 0 {
                points.push(NodeKey::Vertex(vs[i]));
                nodes
                    .entry(NodeKey::Vertex(vs[i]))
                    .or_insert_with(|| self.vertex_point(vs[i]));
                arc_sign.push(sides[j]);
            }
            if sides[i] * sides[j] == -1 {
                let key = EdgeKey::new(vs[i], vs[j]);
                points.push(NodeKey::Edge(key));
                nodes
                    .entry(NodeKey::Edge(key))
                    .or_insert_with(|| self.edge_point(key, t));
                arc_sign.push(sides[j]);
            }
        }
        if points.len() < 2 {
            return Vec::new();
        }
        let center = self.cell_center_value(cell) - t;
        let cut_sign: i8 = if center >= 0.0 { -1 } else { 1 };
        let m = points.len();
        let mut chords = Vec::new();
        for k in 0..m {
            if arc_sign[k] == cut_sign {
                let a = points[k];
                let b = points[(k + 1) % m];
                let along_side = match (a, b) {
                    (NodeKey::Vertex(x), NodeKey::Vertex(y)) => {
                        let ix = vs.iter().position(|&v| v == x).unwrap();
                        let iy = vs.iter().position(|&v| v == y).unwrap();
                        (ix + 1) % n == iy || (iy + 1) % n == ix
                    }
                    _ => false,
                };
                if a != b && !along_side {
                    chords.push((a, b));
                }
            }
        }
        if m == 2 && chords.len() == 2 {
            chords.truncate(1);
        }
        chords
    }

    /// Trace the level set `{field = t}`.
    pub fn trace(&self, t: f64) -> Result<LevelSet> {
        if t < self.lo - self.tol || t > self.hi + self.tol || t.is_nan() {
            return Err(Error::LevelOutOfRange {
                value: t,
                min: self.lo,
                max: self.hi,
            });
        }
        let bucket = Self::bucket_of(self.lo, self.bucket_width, self.buckets.len(), t);
        let mut nodes: HashMap<NodeKey, LevelPoint> = HashMap::new();
        let mut segments: Vec<(NodeKey, NodeKey)> = Vec::new();
        let mut level_edges: BTreeSet<EdgeKey> = BTreeSet::new();
        for &ci in &self.buckets[bucket] {
            let ci = ci as usize;
            segments.extend(self.cell_chords(ci, t, &mut nodes));
            for (a, b) in self.complex.cell(ci).directed_edges() {
                if self.side(a, t) == 0 && self.side(b, t) == 0 {
                    level_edges.insert(EdgeKey::new(a, b));
                }
            }
        }
        for key in level_edges {
            let cells = self.complex.cells_of_edge(key);
            let emit = match cells {
                [_] => true,
                [c1, c2] => self.side_across(*c1, key, t) * self.side_across(*c2, key, t) == -1,
                _ => false,
            };
            if emit {
                for v in [key.0, key.1] {
                    nodes
                        .entry(NodeKey::Vertex(v))
                        .or_insert_with(|| self.vertex_point(v));
                }
                segments.push((NodeKey::Vertex(key.0), NodeKey::Vertex(key.1)));
            }
        }
        Ok(self.assemble(t, &nodes, &segments))
    }

    fn assemble(
        &self,
        t: f64,
        nodes: &HashMap<NodeKey, LevelPoint>,
        segments: &[(NodeKey, NodeKey)],
    ) -> LevelSet {
        let mut incident: BTreeMap<NodeKey, Vec<usize>> = BTreeMap::new();
        for (si, &(a, b)) in segments.iter().enumerate() {
            incident.entry(a).or_default().push(si);
            incident.entry(b).or_default().push(si);
        }
        let mut partner: HashMap<(NodeKey, usize), usize> = HashMap::new();
        let mut junctions = Vec::new();
        for (&node, segs) in &incident {
            if segs.len() <= 2 {
                continue;
            }
            if let NodeKey::Vertex(v) = node {
                let pairs = self.pair_at_junction(v, t, segs, segments, nodes);
                junctions.push((v, pairs.len()));
                for (x, y) in pairs {
                    partner.insert((node, x), y);
                    partner.insert((node, y), x);
                }
            }
        }
        let other = |si: usize, node: NodeKey| {
            let (a, b) = segments[si];
            if a == node {
                b
            } else {
                a
            }
        };
        let next_segment = |node: NodeKey, arrived: usize| -> Option<usize> {
            let segs = &incident[&node];
            match segs.len() {
                1 => None,
                2 => Some(if segs[0] == arrived { segs[1] } else { segs[0] }),
                _ => partner.get(&(node, arrived)).copied(),
            }
        };
        let mut used = vec![false; segments.len()];
        let mut curves = Vec::new();
        let walk = |start: NodeKey, first: usize, used: &mut Vec<bool>| -> LevelCurve {
            let mut points = vec![nodes[&start]];
            let mut node = start;
            let mut seg = first;
            let mut closed = false;
            loop {
                used[seg] = true;
                let next = other(seg, node);
                match next_segment(next, seg) {
                    Some(s) if s == first && next == start => {
                        closed = true;
                        break;
                    }
                    Some(s) if !used[s] => {
                        points.push(nodes[&next]);
                        node = next;
                        seg = s;
                    }
                    _ => {
                        if next == start {
                            closed = true;
                        } else {
                            points.push(nodes[&next]);
                        }
                        break;
                    }
                }
            }
            LevelCurve {
                value: t,
                points,
                closed,
            }
        };
        for (&node, segs) in &incident {
            if segs.len() == 1 && !used[segs[0]] {
                curves.push(walk(node, segs[0], &mut used));
            }
        }
        for si in 0..segments.len() {
            if !used[si] {
                let start = segments[si].0;
                curves.push(walk(start, si, &mut used));
            }
        }
        for c in &mut curves {
            if c.closed && signed_area(&c.positions()) < 0.0 {
                c.points.reverse();
                c.points.rotate_right(1);
            }
        }
        LevelSet {
            value: t,
            curves,
            junctions,
        }
    }

    /// Pair the level segments at a junction vertex so that each pair bounds a
    /// sector where the field is below the level.
    fn pair_at_junction(
        &self,
        v: VertexId,
        t: f64,
        segs: &[usize],
        segments: &[(NodeKey, NodeKey)],
        nodes: &HashMap<NodeKey, LevelPoint>,
    ) -> Vec<(usize, usize)> {
        let center = self.complex.position(v);
        let me = NodeKey::Vertex(v);
        let mut around: Vec<(f64, usize)> = segs
            .iter()
            .map(|&si| {
                let (a, b) = segments[si];
                let far = if a == me { b } else { a };
                (center.angle_to(nodes[&far].position), si)
            })
            .collect();
        around.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let neighbor_angles: Vec<(f64, i8)> = self
            .complex
            .neighbors(v)
            .iter()
            .map(|&w| (center.angle_to(self.complex.position(w)), self.side(w, t)))
            .collect();
        let m = around.len();
        let sector_sign = |k: usize| -> i8 {
            let a0 = around[k].0;
            let mut a1 = around[(k + 1) % m].0;
            if a1 <= a0 {
                a1 += std::f64::consts::TAU;
            }
            for &(ang, s) in &neighbor_angles {
                let mut a = ang;
                if a <= a0 {
                    a += std::f64::consts::TAU;
                }
                if a > a0 && a < a1 && s != 0 {
                    return s;
                }
            }
            let mid = 0.5 * (a0 + a1);
            let reach = self
                .complex
                .neighbors(v)
                .iter()
                .map(|&w| center.distance(self.complex.position(w)))
                .fold(f64::INFINITY, f64::min)
                * 1e-3;
            let probe = Point::new(center.x + reach * mid.cos(), center.y + reach * mid.sin());
            for &ci in self.complex.cells_of_vertex(v) {
                let pts: Vec<Point> = self
                    .complex
                    .cell(ci)
                    .vertices()
                    .iter()
                    .map(|&w| self.complex.position(w))
                    .collect();
                if crate::geometry::winding_number(&pts, probe) != 0 {
                    let value = self.complex.evaluate_in_cell(self.field, ci, probe);
                    return if value < t { -1 } else { 1 };
                }
            }
            1
        };
        let signs: Vec<i8> = (0..m).map(sector_sign).collect();
        let mut pairs = Vec::new();
        let mut taken = vec![false; m];
        for k in 0..m {
            let j = (k + 1) % m;
            if signs[k] < 0 && !taken[k] && !taken[j] {
                taken[k] = true;
                taken[j] = true;
                pairs.push((around[k].1, around[j].1));
            }
        }
        let rest: Vec<usize> = (0..m).filter(|&k| !taken[k]).collect();
        for w in rest.chunks(2) {
            if let [a, b] = *w {
                pairs.push((around[a].1, around[b].1));
            }
        }
        pairs
    }
}

/// Components of the level `{field = t}`; see [`LevelTracer::trace`].
pub fn level_curve(complex: &PLComplex, field: &ScalarField, t: f64) -> Result<Vec<LevelCurve>> {
    Ok(LevelTracer::new(complex, field).trace(t)?.curves)
}

/// Edges whose endpoint values agree within `relative · range` and that are not
/// explained by a constant boundary component or a level edge separating its two
/// sides. With `perturb`, ties are broken by vertex id and nothing is reported.
pub fn find_ties(
    complex: &PLComplex,
    field: &ScalarField,
    relative: f64,
    perturb: bool,
) -> Vec<EdgeKey> {
    if perturb {
        return Vec::new();
    }
    let tracer = LevelTracer::with_tolerance(complex, field, relative);
    let tol = tracer.tolerance();
    let mut component = vec![usize::MAX; complex.vertex_count()];
    for (i, b) in complex.boundary_components().iter().enumerate() {
        for &v in &b.vertices {
            component[v] = i;
        }
    }
    complex
        .edges()
        .filter(|key| (field[key.0] - field[key.1]).abs() <= tol)
        .filter(|&key| {
            if component[key.0] != usize::MAX && component[key.0] == component[key.1] {
                return false;
            }
            if complex.is_boundary_edge(key) {
                return false;
            }
            let t = 0.5 * (field[key.0] + field[key.1]);
            match complex.cells_of_edge(key) {
                [c1, c2] => tracer.side_across(*c1, key, t) * tracer.side_across(*c2, key, t) != -1,
                _ => true,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Cell;

    #[test]
    fn edge_crossing_parameter() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        let c = PLComplex::from_cells(pts, vec![Cell::Triangle([0, 1, 2])], 1.0, vec![]).unwrap();
        let f = ScalarField::new(vec![0.0, 1.0, 0.0]);
        let curves = level_curve(&c, &f, 0.25).unwrap();
        assert_eq!(curves.len(), 1);
        let crossing = curves[0]
            .points
            .iter()
            .find_map(|p| match p.site {
                PointSite::Edge { from: 0, to: 1, t } => Some(t),
                _ => None,
            })
            .unwrap();
        assert!((crossing - 0.25).abs() < 1e-15);
        assert!(level_curve(&c, &f, 2.0).is_err());
    }

    #[test]
    fn perturbed_order_breaks_ties_by_id() {
        let f = ScalarField::new(vec![1.0, 1.0]);
        let order = ValueOrder { perturb: true };
        assert!(order.is_below(&f, 0, 1));
        assert!(!ValueOrder::default().is_below(&f, 0, 1));
    }
}
