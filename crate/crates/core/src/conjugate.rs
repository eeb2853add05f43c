//! Conjugate functions on the slit quadrilateral: `g*` integrated along the
//! level curves of `g`, its period, the harmonic conjugate `h`, and `h*`
//! integrated along the level curves of `h`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::PLComplex;
use crate::error::{Error, Result};
use crate::network::{solve_dirichlet_neumann, DirichletArc, DirichletNeumannSpec, ScalarField, VertexId};
use crate::plgeom::{LevelCurve, LevelPoint, LevelTracer, PointSite, SlitQuadrilateral, LEVEL_TOLERANCE};

/// Relative tolerance for the spread of a conjugate over its far boundary arc.
pub const SPREAD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateBase {
    OfG,
    OfH,
}

/// One level curve of the base field with the running integral at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedLevel {
    pub curve: LevelCurve,
    pub integral: Vec<f64>,
}

impl IntegratedLevel {
    pub fn value(&self) -> f64 {
        self.curve.value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateField {
    pub values: ScalarField,
    pub base: ConjugateBase,
    /// Flux through the origin arc: the period for `g*`, the width for `h*`.
    pub total: f64,
    /// Base-field levels in ascending value, each oriented from the origin arc.
    pub levels: Vec<IntegratedLevel>,
}

/// Distinct values of `field` merged within `tol`, ascending, with the cluster
/// index of every vertex.
pub fn level_values(field: &ScalarField, tol: f64) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<VertexId> = (0..field.len()).collect();
    order.sort_by(|&a, &b| field[a].total_cmp(&field[b]).then(a.cmp(&b)));
    let mut values: Vec<f64> = Vec::new();
    let mut cluster = vec![0; field.len()];
    let mut anchor = f64::NEG_INFINITY;
    for v in order {
        if values.is_empty() || field[v] - anchor > tol {
            anchor = field[v];
            values.push(field[v]);
        }
        cluster[v] = values.len() - 1;
    }
    (values, cluster)
}

fn positive_neighbors(complex: &PLComplex, v: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
    complex.neighbors(v).iter().filter_map(move |&w| {
        let c = complex.conductance(v, w).unwrap_or(0.0);
        (c > 0.0).then_some((w, c))
    })
}

/// Flux from `v` to its neighbors strictly below `level`.
fn downward_flux(complex: &PLComplex, u: &ScalarField, v: VertexId, level: f64, tol: f64) -> f64 {
    positive_neighbors(complex, v)
        .filter(|&(w, _)| u[w] < level - tol)
        .map(|(w, c)| c * (u[v] - u[w]))
        .sum()
}

/// Flux into `v` from its neighbors strictly above `level`.
fn upward_flux(complex: &PLComplex, u: &ScalarField, v: VertexId, level: f64, tol: f64) -> f64 {
    positive_neighbors(complex, v)
        .filter(|&(w, _)| u[w] > level + tol)
        .map(|(w, c)| c * (u[w] - u[v]))
        .sum()
}

fn site_in(site: &PointSite, set: &HashSet<VertexId>) -> bool {
    match *site {
        PointSite::Vertex(v) => set.contains(&v),
        PointSite::Edge { from, to, .. } => set.contains(&from) && set.contains(&to),
    }
}

/// Trace the single level curve at `t` and orient it from `start` to `end`.
pub(crate) fn oriented_level(
    tracer: &LevelTracer<'_>,
    t: f64,
    start: &HashSet<VertexId>,
    end: &HashSet<VertexId>,
) -> Result<LevelCurve> {
    let set = tracer.trace(t)?;
    let [curve] = <[LevelCurve; 1]>::try_from(set.curves).map_err(|curves| {
        Error::LevelTrace(format!("level {t} has {} components instead of one", curves.len()))
    })?;
    let mut curve = curve;
    if curve.closed || curve.points.len() < 2 {
        return Err(Error::LevelTrace(format!("level {t} is not an arc")));
    }
    let first = curve.points[0].site;
    let last = curve.points[curve.points.len() - 1].site;
    if site_in(&last, start) && site_in(&first, end) && !(site_in(&first, start) && site_in(&last, end)) {
        curve.reverse();
    }
    let (first, last) = (curve.points[0].site, curve.points[curve.points.len() - 1].site);
    if !site_in(&first, start) || !site_in(&last, end) {
        return Err(Error::LevelTrace(format!(
            "level {t} does not join the two expected boundary arcs"
        )));
    }
    Ok(curve)
}

fn running_sum(fluxes: &[f64], include_first: bool) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(fluxes.len());
    for (i, f) in fluxes.iter().enumerate() {
        if i > 0 || include_first {
            acc += f;
        }
        out.push(if i == 0 { 0.0 } else { acc });
    }
    out
}

fn assign_values(
    n: usize,
    levels: &[IntegratedLevel],
    what: &'static str,
) -> Result<ScalarField> {
    let mut values = vec![f64::NAN; n];
    for level in levels {
        for (p, &x) in level.curve.points.iter().zip(&level.integral) {
            if let PointSite::Vertex(v) = p.site {
                values[v] = x;
            }
        }
    }
    if let Some(v) = values.iter().position(|x| x.is_nan()) {
        return Err(Error::LevelTrace(format!(
            "vertex {v} lies on no traced level curve of {what}"
        )));
    }
    Ok(ScalarField::new(values))
}

/// Sum of `∂g/∂n` over the outer boundary of the annulus.
pub fn outer_flux(q: &SlitQuadrilateral, g: &ScalarField) -> f64 {
    let a = &q.annulus;
    a.boundary_components()[0]
        .vertices
        .iter()
        .flat_map(|&u| positive_neighbors(a, u).map(move |(w, c)| c * (g[u] - g[w])))
        .sum()
}

/// `g*` on the slit quadrilateral: zero on the base copy of the slit, increasing
/// counterclockwise along every level curve of `g` by the flux of `g` into the
/// region below the curve. On the inner boundary, where nothing lies below, the
/// flux from above is used.
pub fn conjugate_of_g(q: &SlitQuadrilateral, g: &ScalarField) -> Result<ConjugateField> {
    let tol = LEVEL_TOLERANCE * g.range();
    let (values, _) = level_values(g, tol);
    let tracer = LevelTracer::new(&q.complex, g);
    let base: HashSet<VertexId> = q.base.iter().copied().collect();
    let top: HashSet<VertexId> = q.top.iter().copied().collect();
    let annulus = &q.annulus;
    let lowest = g.min();
    let annulus_vertex = |v: VertexId| q.origin[v];
    let levels = values
        .par_iter()
        .map(|&t| -> Result<IntegratedLevel> {
            let curve = oriented_level(&tracer, t, &base, &top)?;
            let bottom = t - lowest <= tol;
            let fluxes: Vec<f64> = curve
                .points
                .iter()
                .map(|p| point_flux_g(annulus, g, p, t, tol, bottom, annulus_vertex))
                .collect();
            let integral = running_sum(&fluxes, false);
            Ok(IntegratedLevel { curve, integral })
        })
        .collect::<Result<Vec<_>>>()?;
    let values = assign_values(q.complex.vertex_count(), &levels, "g")?;
    Ok(ConjugateField {
        values,
        base: ConjugateBase::OfG,
        total: outer_flux(q, g),
        levels,
    })
}

fn point_flux_g(
    annulus: &PLComplex,
    g: &ScalarField,
    p: &LevelPoint,
    t: f64,
    tol: f64,
    bottom: bool,
    annulus_vertex: impl Fn(VertexId) -> VertexId,
) -> f64 {
    match p.site {
        PointSite::Vertex(v) => {
            let a = annulus_vertex(v);
            if bottom {
                upward_flux(annulus, g, a, t, tol)
            } else {
                downward_flux(annulus, g, a, t, tol)
            }
        }
        PointSite::Edge { from, to, .. } => {
            annulus.conductance(annulus_vertex(from), annulus_vertex(to)).unwrap_or(0.0)
                * (g[from] - g[to]).abs()
        }
    }
}

/// The period of `g*`: the outer-boundary flux of `g`, checked against the
/// value of `g*` at the top end of every level curve.
pub fn period(q: &SlitQuadrilateral, g: &ScalarField, gstar: &ConjugateField) -> Result<f64> {
    let p = outer_flux(q, g);
    check_spread(p, gstar, "g* on the top copy of the slit")?;
    Ok(p)
}

/// Largest distance between `conj.total` and the far end of any integrated level.
pub fn spread(conj: &ConjugateField) -> f64 {
    conj.levels
        .iter()
        .filter_map(|l| l.integral.last())
        .map(|e| (e - conj.total).abs())
        .fold(0.0, f64::max)
}

fn check_spread(total: f64, conj: &ConjugateField, what: &'static str) -> Result<()> {
    if !(total > 0.0) {
        return Err(Error::Spread {
            what,
            spread: f64::NAN,
            bound: 0.0,
        });
    }
    let spread = conj
        .levels
        .iter()
        .filter_map(|l| l.integral.last())
        .map(|e| (e - total).abs())
        .fold(0.0, f64::max);
    let bound = SPREAD_TOLERANCE * total;
    if spread > bound {
        return Err(Error::Spread {
            what,
            spread,
            bound,
        });
    }
    Ok(())
}

/// Interior-side corners of the quadrilateral, which are exempt from the
/// Neumann condition.
fn without_corners(arc: &[VertexId], q: &SlitQuadrilateral) -> Vec<VertexId> {
    let corners = q.corners();
    arc.iter().copied().filter(|v| !corners.contains(v)).collect()
}

/// Solve for `h`: zero on the base copy of the slit, `period` on the top copy,
/// zero normal derivative on the outer and inner arcs away from the corners.
pub fn harmonic_conjugate(q: &SlitQuadrilateral, period: f64) -> Result<ScalarField> {
    if !(period > 0.0) {
        return Err(Error::BoundaryData(format!("period must be positive, got {period}")));
    }
    let net = q.complex.network()?;
    let spec = DirichletNeumannSpec {
        dirichlet: vec![
            DirichletArc::constant(q.base.clone(), 0.0),
            DirichletArc::constant(q.top.clone(), period),
        ],
        neumann: vec![without_corners(&q.outer, q), without_corners(&q.inner, q)],
    };
    solve_dirichlet_neumann(&net, &spec)
}

/// Sum of `|∂h/∂n|` over the base copy of the slit.
pub fn base_flux(q: &SlitQuadrilateral, h: &ScalarField) -> f64 {
    let tol = LEVEL_TOLERANCE * h.range();
    q.base
        .iter()
        .map(|&v| upward_flux(&q.complex, h, v, h[v], tol))
        .sum()
}

/// `h*` on the slit quadrilateral: zero on the outer arc, increasing along every
/// level curve of `h` toward the inner arc by the flux of `h` into the region
/// below the curve. The first point's own flux is counted from the second point
/// on, so the value at the inner end is the full flux through the curve.
pub fn conjugate_of_h(q: &SlitQuadrilateral, h: &ScalarField) -> Result<ConjugateField> {
    let tol = LEVEL_TOLERANCE * h.range();
    let (values, _) = level_values(h, tol);
    let tracer = LevelTracer::new(&q.complex, h);
    let outer: HashSet<VertexId> = q.outer.iter().copied().collect();
    let inner: HashSet<VertexId> = q.inner.iter().copied().collect();
    let complex = &q.complex;
    let lowest = h.min();
    let levels = values
        .par_iter()
        .map(|&s| -> Result<IntegratedLevel> {
            let curve = oriented_level(&tracer, s, &outer, &inner)?;
            let bottom = s - lowest <= tol;
            let fluxes: Vec<f64> = curve
                .points
                .iter()
                .map(|p| match p.site {
                    PointSite::Vertex(v) if bottom => upward_flux(complex, h, v, s, tol),
                    PointSite::Vertex(v) => downward_flux(complex, h, v, s, tol),
                    PointSite::Edge { from, to, .. } => {
                        complex.conductance(from, to).unwrap_or(0.0) * (h[from] - h[to]).abs()
                    }
                })
                .collect();
            let integral = running_sum(&fluxes, true);
            Ok(IntegratedLevel { curve, integral })
        })
        .collect::<Result<Vec<_>>>()?;
    let values = assign_values(q.complex.vertex_count(), &levels, "h")?;
    Ok(ConjugateField {
        values,
        base: ConjugateBase::OfH,
        total: base_flux(q, h),
        levels,
    })
}

/// The width of `h*`: its value on the inner arc, checked for spread.
pub fn width(hstar: &ConjugateField) -> Result<f64> {
    check_spread(hstar.total, hstar, "h* on the inner arc")?;
    Ok(hstar.total)
}

/// Findings of [`verify_level_topology`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelTopologyReport {
    pub base_levels: usize,
    pub conjugate_levels: usize,
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

impl LevelTopologyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Number of separate places where the piecewise-linear sequence `values`
/// meets `s`: runs of values within `tol` of `s` count once, as do strict sign
/// changes between consecutive entries.
pub fn crossing_count(values: &[f64], s: f64, tol: f64) -> usize {
    let signs: Vec<i8> = values
        .iter()
        .map(|&x| {
            if (x - s).abs() <= tol {
                0
            } else if x < s {
                -1
            } else {
                1
            }
        })
        .collect();
    let mut count = 0;
    for (i, &sg) in signs.iter().enumerate() {
        if sg == 0 {
            if i == 0 || signs[i - 1] != 0 {
                count += 1;
            }
        } else if i > 0 && signs[i - 1] == -sg {
            count += 1;
        }
    }
    count
}

/// The conjugate along a level: its own value at vertices, the recorded
/// integral at edge crossings. Crossings of zero-conductance edges subdivide
/// a single conducting cell and carry no flux, so they are skipped.
fn conjugate_along(q: &SlitQuadrilateral, level: &IntegratedLevel, conj: &ScalarField) -> Vec<f64> {
    level
        .curve
        .points
        .iter()
        .zip(&level.integral)
        .filter_map(|(p, &x)| match p.site {
            PointSite::Vertex(v) => Some(conj[v]),
            PointSite::Edge { from, to, .. } => {
                let c = q.annulus.conductance(q.origin[from], q.origin[to]).unwrap_or(0.0);
                (c > 0.0).then_some(x)
            }
        })
        .collect()
}

/// Check the level structure of `conj` against the levels of `field` it was
/// integrated along. A level of `conj` is realized as the chain of points, one
/// per level of `field`, where the conjugate takes that value. The check
/// asserts that each chain exists and is unique, so that every level of `conj`
/// joins the two prescribed boundary arcs and meets every level of `field`
/// exactly once.
pub fn verify_level_topology(
    q: &SlitQuadrilateral,
    field: &ScalarField,
    conj: &ConjugateField,
) -> LevelTopologyReport {
    let mut report = LevelTopologyReport {
        base_levels: conj.levels.len(),
        ..Default::default()
    };
    let ctol = LEVEL_TOLERANCE * conj.values.range().max(conj.total);
    let ftol = LEVEL_TOLERANCE * field.range();
    let (conj_values, _) = level_values(&conj.values, ctol);
    report.conjugate_levels = conj_values.len();
    let found: Vec<Vec<String>> = conj
        .levels
        .par_iter()
        .map(|level| {
            let mut out = Vec::new();
            let t = level.value();
            let points = &level.curve.points;
            if points.iter().any(|p| (p.site.interpolate(field) - t).abs() > ftol) {
                out.push(format!("curve recorded for level {t} leaves the level"));
            }
            for (p, &x) in points.iter().zip(&level.integral) {
                if let PointSite::Vertex(v) = p.site {
                    if (conj.values[v] - x).abs() > ctol {
                        out.push(format!(
                            "value {} at vertex {v} differs from the integral {x} along level {t}",
                            conj.values[v]
                        ));
                    }
                }
            }
            let along = conjugate_along(q, level, &conj.values);
            if let Some(i) = along.windows(2).position(|w| !(w[1] > w[0])) {
                out.push(format!("conjugate does not increase along level {t} at point {}", i + 1));
            }
            let (first, last) = (along[0], along[along.len() - 1]);
            if first.abs() > ctol || (last - conj.total).abs() > SPREAD_TOLERANCE * conj.total {
                out.push(format!(
                    "level {t} runs from {first} to {last} instead of 0 to {}",
                    conj.total
                ));
            }
            for &s in &conj_values {
                let n = crossing_count(&along, s, ctol);
                if n != 1 {
                    out.push(format!("level {t} meets conjugate level {s} {n} times"));
                }
            }
            out
        })
        .collect();
    report.pairs_checked = conj.levels.len() * conj_values.len();
    report.violations = found.into_iter().flatten().collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_runs() {
        assert_eq!(crossing_count(&[0.0, 1.0, 2.0], 1.5, 1e-12), 1);
        assert_eq!(crossing_count(&[0.0, 1.0, 2.0], 1.0, 1e-12), 1);
        assert_eq!(crossing_count(&[0.0, 2.0, 0.5, 3.0], 1.0, 1e-12), 3);
        assert_eq!(crossing_count(&[0.0, 1.0, 1.0, 2.0], 1.0, 1e-12), 1);
        assert_eq!(crossing_count(&[0.0, 1.0], 5.0, 1e-12), 0);
    }

    #[test]
    fn running_sum_conventions() {
        assert_eq!(running_sum(&[5.0, 1.0, 2.0], false), vec![0.0, 1.0, 3.0]);
        assert_eq!(running_sum(&[5.0, 1.0, 2.0], true), vec![0.0, 6.0, 8.0]);
    }

    #[test]
    fn clusters_merge_within_tolerance() {
        let f = ScalarField::new(vec![0.0, 1.0, 1.0 + 1e-12, 0.5]);
        let (values, cluster) = level_values(&f, 1e-9);
        assert_eq!(values, vec![0.0, 0.5, 1.0]);
        assert_eq!(cluster, vec![0, 2, 2, 1]);
    }
}
