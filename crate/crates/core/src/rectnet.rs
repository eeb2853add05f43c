//! The rectangular net cut out of the slit quadrilateral by the level curves
//! of `g` and of `h`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conjugate::{crossing_count, level_values, oriented_level};
use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point};
use crate::network::{ScalarField, VertexId};
use crate::plgeom::{LevelCurve, LevelTracer, SlitQuadrilateral, LEVEL_TOLERANCE};

/// Lattice index: `g` level first, `h` level second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeIndex {
    pub i: usize,
    pub j: usize,
}

/// One cell of the net, between `g` levels `i, i + 1` and `h` levels `j, j + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetCell {
    pub index: LatticeIndex,
    pub g_base: f64,
    pub g_top: f64,
    pub h_left: f64,
    pub h_right: f64,
}

#[derive(Debug, Clone)]
pub struct RectNet {
    /// Levels of `g`, ascending from the inner to the outer boundary, each
    /// oriented from the base copy of the slit to the top copy.
    pub g_levels: Vec<LevelCurve>,
    /// Levels of `h`, ascending from the base copy to the top copy, each
    /// oriented from the outer boundary to the inner one.
    pub h_levels: Vec<LevelCurve>,
    pub g_values: Vec<f64>,
    pub h_values: Vec<f64>,
    /// `h` at every point of every `g` level.
    h_along_g: Vec<Vec<f64>>,
    /// `g` at every point of every `h` level.
    g_along_h: Vec<Vec<f64>>,
    /// Problems met while tracing; reported by [`verify_orthogonal_filling`].
    pub defects: Vec<String>,
    g_tol: f64,
    h_tol: f64,
}

fn values_along(curve: &LevelCurve, field: &ScalarField) -> Vec<f64> {
    curve.points.iter().map(|p| p.site.interpolate(field)).collect()
}

/// Position on `curve` where the sequence `values` first reaches `s`, by
/// linear interpolation on the crossing segment.
fn point_at(curve: &LevelCurve, values: &[f64], s: f64, tol: f64) -> Option<Point> {
    let pts = &curve.points;
    if let Some(i) = values.iter().position(|&x| (x - s).abs() <= tol) {
        return Some(pts[i].position);
    }
    values.windows(2).enumerate().find_map(|(i, w)| {
        let (a, b) = (w[0] - s, w[1] - s);
        (a * b < 0.0).then(|| pts[i].position.lerp(pts[i + 1].position, a / (a - b)))
    })
}

impl RectNet {
    /// Number of cells, `(|𝓛| − 1)(|𝓜| − 1)`.
    pub fn cell_count(&self) -> usize {
        self.g_levels.len().saturating_sub(1) * self.h_levels.len().saturating_sub(1)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.g_levels.len(), self.h_levels.len())
    }

    /// Where `g` level `i` meets `h` level `j`, found along the `g` level.
    pub fn lattice_point(&self, index: LatticeIndex) -> Result<Point> {
        let LatticeIndex { i, j } = index;
        let (curve, along) = self
            .g_levels
            .get(i)
            .zip(self.h_along_g.get(i))
            .ok_or_else(|| Error::IndexMismatch(format!("no g level {i}")))?;
        let s = *self
            .h_values
            .get(j)
            .ok_or_else(|| Error::IndexMismatch(format!("no h level {j}")))?;
        point_at(curve, along, s, self.h_tol).ok_or(Error::CellNotOnLevels(i, j))
    }

    pub fn cell(&self, index: LatticeIndex) -> Result<NetCell> {
        let LatticeIndex { i, j } = index;
        if i + 1 >= self.g_levels.len() || j + 1 >= self.h_levels.len() {
            return Err(Error::IndexMismatch(format!("no cell ({i}, {j})")));
        }
        Ok(NetCell {
            index,
            g_base: self.g_values[i],
            g_top: self.g_values[i + 1],
            h_left: self.h_values[j],
            h_right: self.h_values[j + 1],
        })
    }

    /// Corners `(i,j), (i+1,j), (i+1,j+1), (i,j+1)` of a cell.
    pub fn cell_corners(&self, index: LatticeIndex) -> Result<[Point; 4]> {
        let LatticeIndex { i, j } = self.cell(index)?.index;
        let at = |i, j| self.lattice_point(LatticeIndex { i, j });
        Ok([at(i, j)?, at(i + 1, j)?, at(i + 1, j + 1)?, at(i, j + 1)?])
    }

    /// `h` at the points of `g` level `i`.
    pub fn h_along_g(&self, i: usize) -> &[f64] {
        &self.h_along_g[i]
    }

    /// `g` at the points of `h` level `j`.
    pub fn g_along_h(&self, j: usize) -> &[f64] {
        &self.g_along_h[j]
    }

    /// Cells in row-major order, `i` outer.
    pub fn cells(&self) -> impl Iterator<Item = LatticeIndex> + '_ {
        let (nl, nm) = self.shape();
        (0..nl.saturating_sub(1)).flat_map(move |i| (0..nm.saturating_sub(1)).map(move |j| LatticeIndex { i, j }))
    }

    /// Piece of `g` level `i` between `h` values `s0 < s1`, endpoints included.
    fn g_arc(&self, i: usize, s0: f64, s1: f64) -> Result<Vec<Point>> {
        let curve = &self.g_levels[i];
        let along = &self.h_along_g[i];
        let mut out = vec![point_at(curve, along, s0, self.h_tol).ok_or(Error::CellNotOnLevels(i, 0))?];
        out.extend(
            curve
                .points
                .iter()
                .zip(along)
                .filter(|(_, &x)| x > s0 + self.h_tol && x < s1 - self.h_tol)
                .map(|(p, _)| p.position),
        );
        out.push(point_at(curve, along, s1, self.h_tol).ok_or(Error::CellNotOnLevels(i, 0))?);
        Ok(out)
    }

    /// Interior points of `h` level `j` strictly between `g` values `t0 < t1`,
    /// in the level's orientation (decreasing `g`).
    fn h_arc_interior(&self, j: usize, t0: f64, t1: f64) -> Vec<Point> {
        self.h_levels[j]
            .points
            .iter()
            .zip(&self.g_along_h[j])
            .filter(|(_, &x)| x > t0 + self.g_tol && x < t1 - self.g_tol)
            .map(|(p, _)| p.position)
            .collect()
    }

    /// Boundary of a cell: base arc, right side upward, top arc backward, left side downward.
    pub fn cell_polygon(&self, index: LatticeIndex) -> Result<Vec<Point>> {
        let LatticeIndex { i, j } = index;
        let (s0, s1) = (self.h_values[j], self.h_values[j + 1]);
        let (t0, t1) = (self.g_values[i], self.g_values[i + 1]);
        let mut ring = self.g_arc(i, s0, s1)?;
        let mut right = self.h_arc_interior(j + 1, t0, t1);
        right.reverse();
        ring.extend(right);
        let mut top = self.g_arc(i + 1, s0, s1)?;
        top.reverse();
        ring.extend(top);
        ring.extend(self.h_arc_interior(j, t0, t1));
        Ok(ring)
    }

    /// Euclidean area of a cell in the source domain.
    pub fn cell_area(&self, index: LatticeIndex) -> Result<f64> {
        Ok(signed_area(&self.cell_polygon(index)?).abs())
    }
}

/// Trace both families on the slit quadrilateral and index their intersections.
pub fn build_rectnet(q: &SlitQuadrilateral, g: &ScalarField, h: &ScalarField) -> Result<RectNet> {
    let g_tol = LEVEL_TOLERANCE * g.range();
    let h_tol = LEVEL_TOLERANCE * h.range();
    let (g_values, _) = level_values(g, g_tol);
    let (h_values, _) = level_values(h, h_tol);
    let base: HashSet<VertexId> = q.base.iter().copied().collect();
    let top: HashSet<VertexId> = q.top.iter().copied().collect();
    let outer: HashSet<VertexId> = q.outer.iter().copied().collect();
    let inner: HashSet<VertexId> = q.inner.iter().copied().collect();
    let g_tracer = LevelTracer::new(&q.complex, g);
    let g_levels = g_values
        .par_iter()
        .map(|&t| oriented_level(&g_tracer, t, &base, &top))
        .collect::<Result<Vec<_>>>()?;
    let h_tracer = LevelTracer::new(&q.complex, h);
    let mut defects = Vec::new();
    let mut h_levels = Vec::with_capacity(h_values.len());
    let traced: Vec<Result<LevelCurve>> = h_values
        .par_iter()
        .map(|&s| oriented_level(&h_tracer, s, &outer, &inner))
        .collect();
    for (s, r) in h_values.iter().zip(traced) {
        match r {
            Ok(c) => h_levels.push(c),
            Err(e) => {
                defects.push(format!("h level {s}: {e}"));
                h_levels.push(LevelCurve {
                    value: *s,
                    points: Vec::new(),
                    closed: false,
                });
            }
        }
    }
    let h_along_g = g_levels.iter().map(|c| values_along(c, h)).collect();
    let g_along_h = h_levels.iter().map(|c| values_along(c, g)).collect();
    Ok(RectNet {
        g_levels,
        h_levels,
        g_values,
        h_values,
        h_along_g,
        g_along_h,
        defects,
        g_tol,
        h_tol,
    })
}

/// A pair of levels that does not meet exactly once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub g_level: usize,
    pub h_level: usize,
    /// Meetings counted along the `g` level.
    pub count_along_g: usize,
    /// Meetings counted along the `h` level.
    pub count_along_h: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub g_levels: usize,
    pub h_levels: usize,
    pub pairs_checked: usize,
    /// Pairs meeting exactly once, counted along both curves.
    pub pairs_meeting_once: usize,
    pub violations: Vec<PairViolation>,
    pub defects: Vec<String>,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.defects.is_empty() && self.pairs_meeting_once == self.pairs_checked
    }
}

/// Crossing counts of `values` against every entry of `targets`; a strictly
/// monotone sequence meets each target in its range exactly once.
fn counts_against(values: &[f64], targets: &[f64], tol: f64) -> Vec<usize> {
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if values.len() >= 2 && (increasing || decreasing) {
        let (lo, hi) = if increasing {
            (values[0], values[values.len() - 1])
        } else {
            (values[values.len() - 1], values[0])
        };
        return targets
            .iter()
            .map(|&s| usize::from(s >= lo - tol && s <= hi + tol))
            .collect();
    }
    targets.iter().map(|&s| crossing_count(values, s, tol)).collect()
}

/// Count the meetings of every `g` level with every `h` level, along both curves.
pub fn verify_orthogonal_filling(net: &RectNet) -> OrthogonalityReport {
    let (nl, nm) = net.shape();
    let along_g: Vec<Vec<usize>> = net
        .h_along_g
        .par_iter()
        .map(|v| counts_against(v, &net.h_values, net.h_tol))
        .collect();
    let along_h: Vec<Vec<usize>> = net
        .g_along_h
        .par_iter()
        .map(|v| counts_against(v, &net.g_values, net.g_tol))
        .collect();
    let mut report = OrthogonalityReport {
        g_levels: nl,
        h_levels: nm,
        pairs_checked: nl * nm,
        defects: net.defects.clone(),
        ..Default::default()
    };
    for i in 0..nl {
        for j in 0..nm {
            let (a, b) = (along_g[i][j], along_h[j][i]);
            if a == 1 && b == 1 {
                report.pairs_meeting_once += 1;
            } else {
                report.violations.push(PairViolation {
                    g_level: i,
                    h_level: j,
                    count_along_g: a,
                    count_along_h: b,
                });
            }
        }
    }
    let disjoint = |values: &[f64]| values.windows(2).all(|w| w[1] > w[0]);
    if !disjoint(&net.g_values) || !disjoint(&net.h_values) {
        report.defects.push("level values are not strictly increasing".into());
    }
    report
}
