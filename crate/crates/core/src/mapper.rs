//! The target annulus, its tiling by annular shells, the cell-to-shell map,
//! and the passage to a flat cylinder.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::metrics::{cell_measure_lambda, cell_measure_nu, total_nu, PairFluxWeight};
use crate::rectnet::{LatticeIndex, RectNet};

/// Relative tolerance for per-cell measure comparisons.
pub const MEASURE_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for totals.
pub const TOTAL_TOLERANCE: f64 = 1e-8;

/// Concentric annulus with its circles and radial lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetAnnulus {
    pub k: f64,
    pub period: f64,
    /// Boundary radii `{1, 2π·exp(2πk/period)}`.
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// `r_i = exp(2π g_i / period)` for the `g` levels.
    pub radii: Vec<f64>,
    /// `φ_j = 2π h_j / period` for the `h` levels.
    pub angles: Vec<f64>,
    pub g_levels: Vec<f64>,
    pub h_levels: Vec<f64>,
}

/// Annular shell between two circles and two radial segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub index: LatticeIndex,
    pub r_inner: f64,
    pub r_outer: f64,
    pub phi_start: f64,
    pub phi_end: f64,
    /// `log(r_outer / r_inner)`, taken from the level difference.
    pub log_ratio: f64,
    /// `φ_end − φ_start`, taken from the level difference.
    pub sweep: f64,
}

impl Shell {
    /// `½(r_outer² − r_inner²)(φ_end − φ_start)`, evaluated as
    /// `½·r_inner²·expm1(2·log_ratio)·sweep`.
    pub fn area(&self) -> f64 {
        0.5 * self.r_inner * self.r_inner * (2.0 * self.log_ratio).exp_m1() * self.sweep
    }

    /// Counterclockwise corners `r_i e^{iφ_j}, r_{i+1} e^{iφ_j}, r_{i+1} e^{iφ_{j+1}}, r_i e^{iφ_{j+1}}`.
    pub fn corners(&self) -> [Point; 4] {
        let at = |r: f64, phi: f64| Point::new(r * phi.cos(), r * phi.sin());
        [
            at(self.r_inner, self.phi_start),
            at(self.r_outer, self.phi_start),
            at(self.r_outer, self.phi_end),
            at(self.r_inner, self.phi_end),
        ]
    }
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

/// Circles at the `g` levels and radial lines at the `h` levels.
pub fn build_target(k: f64, period: f64, g_levels: &[f64], h_levels: &[f64]) -> Result<TargetAnnulus> {
    let w = PairFluxWeight::new(period)?;
    if !strictly_increasing(g_levels) || !strictly_increasing(h_levels) {
        return Err(Error::NonMonotoneLevels);
    }
    Ok(TargetAnnulus {
        k,
        period,
        inner_radius: 1.0,
        outer_radius: TAU * w.radius(k),
        radii: g_levels.iter().map(|&g| w.radius(g)).collect(),
        angles: h_levels.iter().map(|&h| w.scale() * h).collect(),
        g_levels: g_levels.to_vec(),
        h_levels: h_levels.to_vec(),
    })
}

impl TargetAnnulus {
    /// `2π / period`.
    pub fn scale(&self) -> f64 {
        TAU / self.period
    }

    pub fn boundary_radii(&self) -> [f64; 2] {
        [self.inner_radius, self.outer_radius]
    }

    /// `μ(S_A) = π(r₂² − r₁²)`.
    pub fn area(&self) -> f64 {
        PI * (self.outer_radius * self.outer_radius - self.inner_radius * self.inner_radius)
    }

    pub fn shell_count(&self) -> usize {
        self.radii.len().saturating_sub(1) * self.angles.len().saturating_sub(1)
    }

    pub fn shell(&self, index: LatticeIndex) -> Result<Shell> {
        let LatticeIndex { i, j } = index;
        if i + 1 >= self.radii.len() || j + 1 >= self.angles.len() {
            return Err(Error::IndexMismatch(format!("no shell ({i}, {j})")));
        }
        Ok(Shell {
            index,
            r_inner: self.radii[i],
            r_outer: self.radii[i + 1],
            phi_start: self.angles[j],
            phi_end: self.angles[j + 1],
            log_ratio: self.scale() * (self.g_levels[i + 1] - self.g_levels[i]),
            sweep: self.scale() * (self.h_levels[j + 1] - self.h_levels[j]),
        })
    }

    pub fn shells(&self) -> impl Iterator<Item = Shell> + '_ {
        let (nr, na) = (self.radii.len(), self.angles.len());
        (0..nr.saturating_sub(1))
            .flat_map(move |i| (0..na.saturating_sub(1)).map(move |j| LatticeIndex { i, j }))
            .map(|idx| self.shell(idx).expect("index in range"))
    }

    /// Sum of the shell areas.
    pub fn tiled_area(&self) -> f64 {
        self.shells().map(|s| s.area()).sum()
    }
}

/// The cell-to-shell correspondence, bilinear in `(g, h)` onto `(r, φ)` in each cell.
#[derive(Debug, Clone)]
pub struct PLMap<'a> {
    pub net: &'a RectNet,
    pub target: &'a TargetAnnulus,
}

fn locate(values: &[f64], x: f64) -> usize {
    let n = values.len();
    values.partition_point(|&v| v <= x).clamp(1, n - 1) - 1
}

pub fn build_map<'a>(net: &'a RectNet, target: &'a TargetAnnulus) -> Result<PLMap<'a>> {
    if net.g_values.len() != target.radii.len() || net.h_values.len() != target.angles.len() {
        return Err(Error::IndexMismatch(format!(
            "net has {:?} levels, target has {} circles and {} radial lines",
            net.shape(),
            target.radii.len(),
            target.angles.len()
        )));
    }
    Ok(PLMap { net, target })
}

impl PLMap<'_> {
    /// Polar coordinates `(r, φ)` of the image of a point with the given `g`
    /// and `h` values.
    pub fn polar_image(&self, g: f64, h: f64) -> (f64, f64) {
        let (gs, hs) = (&self.net.g_values, &self.net.h_values);
        let (rs, phis) = (&self.target.radii, &self.target.angles);
        let blend = |values: &[f64], images: &[f64], x: f64| {
            if values.len() == 1 {
                return images[0];
            }
            let i = locate(values, x);
            let span = values[i + 1] - values[i];
            let s = ((x - values[i]) / span).clamp(0.0, 1.0);
            images[i] + s * (images[i + 1] - images[i])
        };
        (blend(gs, rs, g), blend(hs, phis, h))
    }

    pub fn image(&self, g: f64, h: f64) -> Point {
        let (r, phi) = self.polar_image(g, h);
        Point::new(r * phi.cos(), r * phi.sin())
    }

    /// Shell corresponding to a net cell.
    pub fn shell_of(&self, index: LatticeIndex) -> Result<Shell> {
        self.target.shell(index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMeasure {
    pub index: LatticeIndex,
    pub nu: f64,
    pub mu: f64,
    pub lambda: f64,
    pub rectangle_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub cells: usize,
    pub failing_cells: Vec<LatticeIndex>,
    pub max_relative_error: f64,
    pub total_nu: f64,
    pub expected_total_nu: f64,
    pub total_relative_error: f64,
}

impl MeasureReport {
    pub fn passed(&self) -> bool {
        self.failing_cells.is_empty() && self.total_relative_error <= TOTAL_TOLERANCE
    }
}

/// ν, μ of the image shell, λ and the cylinder rectangle area for every cell.
pub fn cell_measures(map: &PLMap<'_>) -> Result<Vec<CellMeasure>> {
    let w = PairFluxWeight::new(map.target.period)?;
    let cells: Vec<LatticeIndex> = map.net.cells().collect();
    cells
        .par_iter()
        .map(|&index| {
            let cell = map.net.cell(index)?;
            let shell = map.shell_of(index)?;
            Ok(CellMeasure {
                index,
                nu: cell_measure_nu(&cell, &w)?,
                mu: shell.area(),
                lambda: cell_measure_lambda(&cell, &w)?,
                rectangle_area: Cylinder::rectangle(&shell).area(),
            })
        })
        .collect()
}

/// Compare ν(R) with μ(T_R) cell by cell and the total with its closed form.
pub fn verify_measure_preservation(map: &PLMap<'_>, measures: &[CellMeasure]) -> MeasureReport {
    let mut failing = Vec::new();
    let mut max_rel: f64 = 0.0;
    for m in measures {
        let rel = if m.mu > 0.0 {
            (m.nu - m.mu).abs() / m.mu
        } else {
            (m.nu - m.mu).abs()
        };
        max_rel = max_rel.max(rel);
        if rel > MEASURE_TOLERANCE {
            failing.push(m.index);
        }
    }
    let total: f64 = measures.iter().map(|m| m.nu).sum();
    let expected = total_nu(map.target.k, map.target.period);
    MeasureReport {
        cells: measures.len(),
        failing_cells: failing,
        max_relative_error: max_rel,
        total_nu: total,
        expected_total_nu: expected,
        total_relative_error: (total - expected).abs() / expected,
    }
}

/// Round cylinder of radius one, `log a ≤ z ≤ log b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub height: f64,
}

/// Rectangle `[φ0, φ1] × [z0, z1]` on the unrolled cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub phi0: f64,
    pub phi1: f64,
    pub z0: f64,
    pub z1: f64,
    pub width: f64,
    pub height: f64,
}

impl Rectangle {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

impl Cylinder {
    /// `(ρ cos φ, ρ sin φ) ↦ (cos φ, sin φ, log ρ)`.
    pub fn map_point(&self, p: Point) -> [f64; 3] {
        let rho = p.x.hypot(p.y);
        let phi = p.y.atan2(p.x);
        [phi.cos(), phi.sin(), rho.ln()]
    }

    /// Image of a shell: `Δφ × log(r_outer / r_inner)`.
    pub fn rectangle(shell: &Shell) -> Rectangle {
        Rectangle {
            phi0: shell.phi_start,
            phi1: shell.phi_end,
            z0: shell.r_inner.ln(),
            z1: shell.r_outer.ln(),
            width: shell.sweep,
            height: shell.log_ratio,
        }
    }
}

/// The cylinder over the boundary radii of `target`.
pub fn to_cylinder(target: &TargetAnnulus) -> Result<Cylinder> {
    cylinder_between(target.inner_radius, target.outer_radius)
}

pub fn cylinder_between(a: f64, b: f64) -> Result<Cylinder> {
    if !(a > 0.0) {
        return Err(Error::NonPositiveRadius(a));
    }
    if !(b >= a) {
        return Err(Error::NonPositiveRadius(b));
    }
    Ok(Cylinder {
        inner_radius: a,
        outer_radius: b,
        height: (b / a).ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wheel_target() {
        let t = build_target(1.0, 4.0, &[0.0, 1.0], &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.radii, vec![1.0, (PI / 2.0).exp()]);
        assert_eq!(t.boundary_radii(), [1.0, TAU * (TAU / 4.0).exp()]);
        assert_eq!(*t.angles.last().unwrap(), TAU);
        assert_eq!(t.shell_count(), 4);
    }

    #[test]
    fn cylinder_height() {
        let c = cylinder_between(1.0, 1f64.exp()).unwrap();
        assert!((c.height - 1.0).abs() < 1e-15);
        assert!(cylinder_between(0.0, 1.0).is_err());
    }

    #[test]
    fn shell_rectangle() {
        let s = Shell {
            index: LatticeIndex { i: 0, j: 0 },
            r_inner: 1.0,
            r_outer: 2.0,
            phi_start: 0.5,
            phi_end: 1.5,
            log_ratio: 2f64.ln(),
            sweep: 1.0,
        };
        let r = Cylinder::rectangle(&s);
        assert!((r.area() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn non_monotone_levels_rejected() {
        assert!(matches!(
            build_target(1.0, 4.0, &[0.0, 0.0], &[0.0, 4.0]),
            Err(Error::NonMonotoneLevels)
        ));
    }
}
