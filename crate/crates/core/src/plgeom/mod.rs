//! Piecewise-linear geometry on cell complexes: field evaluation, level curves,
//! refinement along levels, and cutting an annulus open along a monotone slit.

mod level;
mod refine;
mod slit;

pub use level::{
    find_ties, level_curve, LevelCurve, LevelPoint, LevelSet, LevelTracer, PointSite,
    Provenance, ValueOrder,
};
pub use refine::{refine_levels, refine_type1, refine_type2, Refined};
pub use slit::{cut_along_slit, find_slit, validate_slit, Slit, SlitQuadrilateral};

use crate::complex::PLComplex;
use crate::error::Result;
use crate::geometry::Point;
use crate::network::ScalarField;

/// Relative tolerance, against the field range, for a point to count as on a level.
pub const LEVEL_TOLERANCE: f64 = 1e-9;

/// Value of the piecewise affine/bilinear extension of `field` at `p`.
pub fn evaluate(complex: &PLComplex, field: &ScalarField, p: Point) -> Result<f64> {
    complex.evaluate(field, p)
}
