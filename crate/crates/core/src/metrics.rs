//! Pair-flux weights, level-curve lengths, and the cell measures ν and λ.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rectnet::{LatticeIndex, NetCell, RectNet};

/// Relative tolerance for closed-form length comparisons.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFluxWeight {
    period: f64,
}

impl PairFluxWeight {
    pub fn new(period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::BoundaryData(format!("period must be positive, got {period}")));
        }
        Ok(Self { period })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `2π / period`.
    pub fn scale(&self) -> f64 {
        TAU / self.period
    }

    /// Weight of an oriented edge with `g` at its tail and increment `dh` of `h`.
    pub fn edge_weight(&self, g_tail: f64, dh: f64) -> f64 {
        self.scale() * (self.scale() * g_tail).exp() * dh.abs()
    }

    /// Radius of the circle carrying the level `g = m`.
    pub fn radius(&self, m: f64) -> f64 {
        (self.scale() * m).exp()
    }
}

/// Pair-flux length of `g` level `i` of the net, summed edge by edge and
/// checked against `2π·exp(2πm/period)`.
pub fn g_level_length(w: &PairFluxWeight, net: &RectNet, i: usize) -> Result<f64> {
    let m = *net
        .g_values
        .get(i)
        .ok_or_else(|| Error::IndexMismatch(format!("no g level {i}")))?;
    let along = net.h_along_g(i);
    let computed: f64 = along.windows(2).map(|e| w.edge_weight(m, e[1] - e[0])).sum();
    let expected = TAU * w.radius(m);
    if (computed - expected).abs() > LENGTH_TOLERANCE * expected {
        return Err(Error::LengthMismatch { computed, expected });
    }
    Ok(computed)
}

/// Length of an `h` level running from `g = g_start` to `g = g_end`:
/// `exp(g_end) − exp(g_start)`.
pub fn h_level_length(g_start: f64, g_end: f64) -> f64 {
    g_end.exp() - g_start.exp()
}

/// `h` difference across a cell. Both `g` sides run between the same two `h`
/// levels, so the base and top differences coincide.
fn cell_dh(cell: &NetCell) -> f64 {
    cell.h_right - cell.h_left
}

fn check_cell(cell: &NetCell) -> Result<()> {
    if !(cell.g_top >= cell.g_base) {
        return Err(Error::CellNotOnLevels(cell.index.i, cell.index.j));
    }
    Ok(())
}

/// `ν(R) = ½(exp(2s·g_top) − exp(2s·g_base))·s·dh` with `s = 2π/period`.
pub fn cell_measure_nu(cell: &NetCell, w: &PairFluxWeight) -> Result<f64> {
    check_cell(cell)?;
    let s = w.scale();
    let base = (2.0 * s * cell.g_base).exp();
    let growth = (2.0 * s * (cell.g_top - cell.g_base)).exp_m1();
    Ok(0.5 * base * growth * s * cell_dh(cell))
}

/// `λ(R) = s·dh·log(r_top / r_base) = s·dh·s·dg` with `s = 2π/period`.
pub fn cell_measure_lambda(cell: &NetCell, w: &PairFluxWeight) -> Result<f64> {
    check_cell(cell)?;
    let s = w.scale();
    Ok(s * cell_dh(cell) * s * (cell.g_top - cell.g_base))
}

/// `π(exp(4πk/period) − 1)`, the total ν of an annulus with outer value `k`.
pub fn total_nu(k: f64, period: f64) -> f64 {
    PI * ((2.0 * TAU * k / period).exp() - 1.0)
}

/// ν of every cell in row-major order.
pub fn all_nu(net: &RectNet, w: &PairFluxWeight) -> Result<Vec<(LatticeIndex, f64)>> {
    net.cells()
        .map(|idx| Ok((idx, cell_measure_nu(&net.cell(idx)?, w)?)))
        .collect()
}
