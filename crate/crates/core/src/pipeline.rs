//! End-to-end uniformization of an annulus with a report of labeled checks.

use serde::{Deserialize, Serialize};

use crate::complex::PLComplex;
use crate::conjugate::{
    conjugate_of_g, conjugate_of_h, harmonic_conjugate, outer_flux, spread, verify_level_topology,
    ConjugateField, SPREAD_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::mapper::{
    build_map, build_target, cell_measures, to_cylinder, verify_measure_preservation, CellMeasure,
    Cylinder, TargetAnnulus, MEASURE_TOLERANCE, TOTAL_TOLERANCE,
};
use crate::metrics::{h_level_length, PairFluxWeight, LENGTH_TOLERANCE};
use crate::network::{
    green_identity_residual, green_identity_scale, maximum_principle_violations, solve_dirichlet,
    DirichletSpec, ScalarField, VertexId,
};
use crate::plgeom::{
    cut_along_slit, find_slit, find_ties, validate_slit, Slit, SlitQuadrilateral, ValueOrder,
};
use crate::rectnet::{build_rectnet, verify_orthogonal_filling, RectNet};

/// Relative bound on the first Green identity residual.
pub const GREEN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlitChoice {
    #[default]
    Auto,
    Path(Vec<VertexId>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// Overrides the outer boundary value of the mesh.
    pub k: Option<f64>,
    /// Relative tolerance for detecting equal adjacent values.
    pub tolerance: f64,
    pub slit: SlitChoice,
    pub perturb_ties: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            k: None,
            tolerance: 1e-9,
            slit: SlitChoice::Auto,
            perturb_ties: false,
        }
    }
}

/// Outcome of one verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub bound: f64,
    pub detail: Option<String>,
}

impl Check {
    fn bounded(name: &str, residual: f64, bound: f64) -> Self {
        Self {
            name: name.to_owned(),
            passed: residual <= bound,
            residual,
            bound,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    fn count(name: &str, failures: usize, detail: Option<String>) -> Self {
        Self {
            name: name.to_owned(),
            passed: failures == 0,
            residual: failures as f64,
            bound: 0.0,
            detail,
        }
    }
}

/// Every intermediate of the annulus pipeline.
#[derive(Debug, Clone)]
pub struct AnnulusUniformization {
    pub annulus: PLComplex,
    /// Harmonic measure shifted so that the inner boundary carries zero.
    pub g: ScalarField,
    pub k: f64,
    pub slit: Slit,
    pub quad: SlitQuadrilateral,
    pub gstar: ConjugateField,
    pub period: f64,
    pub h: ScalarField,
    pub hstar: ConjugateField,
    pub width: f64,
    pub net: RectNet,
    pub target: TargetAnnulus,
    pub measures: Vec<CellMeasure>,
    pub cylinder: Cylinder,
    pub checks: Vec<Check>,
}

impl AnnulusUniformization {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// The standard problem on an annulus: `k` on the outer cycle, zero on the inner.
pub fn standard_problem(annulus: &PLComplex, k: f64) -> Result<DirichletSpec> {
    match annulus.boundary_components() {
        [outer, inner] => Ok(DirichletSpec::new(
            outer.vertices.clone(),
            k,
            vec![inner.vertices.clone()],
        )),
        comps => Err(Error::Topology(format!(
            "an annulus has two boundary components, found {}",
            comps.len()
        ))),
    }
}

/// Solve the standard problem on `annulus` and run the remaining stages.
pub fn uniformize_annulus(
    annulus: &PLComplex,
    k: f64,
    options: &PipelineOptions,
) -> Result<AnnulusUniformization> {
    let spec = standard_problem(annulus, k)?;
    let net = annulus.network()?;
    let prescribed = spec.to_prescribed(annulus.vertex_count())?;
    let g = solve_dirichlet(&net, &spec)?;
    let mut checks = Vec::new();
    let scale = green_identity_scale(&net, &g, &g);
    let free: Vec<VertexId> = (0..net.vertex_count())
        .filter(|&v| prescribed[v].is_none())
        .collect();
    let residual = green_identity_residual(&net, &g, &g, &free)?;
    checks.push(Check::bounded("green_identity", residual, GREEN_TOLERANCE * scale));
    let violations = maximum_principle_violations(&g, &prescribed);
    checks.push(Check::count(
        "maximum_principle",
        violations.len(),
        (!violations.is_empty()).then(|| format!("vertices {violations:?}")),
    ));
    let mut out = uniformize_harmonic(annulus, &g, options)?;
    checks.append(&mut out.checks);
    out.checks = checks;
    Ok(out)
}

/// Run the stages after the Dirichlet solve on an annulus whose `g` is
/// constant on each boundary cycle, larger on the outer one.
pub fn uniformize_harmonic(
    annulus: &PLComplex,
    g: &ScalarField,
    options: &PipelineOptions,
) -> Result<AnnulusUniformization> {
    let comps = annulus.boundary_components();
    let [outer, inner] = comps else {
        return Err(Error::Topology(format!(
            "an annulus has two boundary components, found {}",
            comps.len()
        )));
    };
    let low = g[inner.vertices[0]];
    let high = g[outer.vertices[0]];
    let k = high - low;
    let g = ScalarField::new(g.values().iter().map(|x| x - low).collect());

    let ties = find_ties(annulus, &g, options.tolerance, options.perturb_ties);
    if !ties.is_empty() {
        return Err(Error::EqualAdjacentValues(
            ties.iter().map(|e| (e.0, e.1)).collect(),
        ));
    }
    let order = ValueOrder {
        perturb: options.perturb_ties,
    };
    let slit = match &options.slit {
        SlitChoice::Auto => find_slit(annulus, &g, order)?,
        SlitChoice::Path(path) => validate_slit(annulus, &g, path, order)?,
    };
    let quad = cut_along_slit(annulus, &g, &slit)?;
    let gstar = conjugate_of_g(&quad, &quad.field)?;
    let period = outer_flux(&quad, &quad.field);
    let h = harmonic_conjugate(&quad, period)?;
    let hstar = conjugate_of_h(&quad, &h)?;
    let width = hstar.total;
    let net = build_rectnet(&quad, &quad.field, &h)?;
    let target = build_target(k, period, &net.g_values, &net.h_values)?;
    let map = build_map(&net, &target)?;
    let measures = cell_measures(&map)?;
    let cylinder = to_cylinder(&target)?;

    let mut checks = Vec::new();
    checks.push(Check::bounded(
        "period_spread",
        spread(&gstar),
        SPREAD_TOLERANCE * period,
    ));
    checks.push(Check::bounded(
        "width_spread",
        spread(&hstar),
        SPREAD_TOLERANCE * width,
    ));
    for (name, field, conj) in [
        ("gstar_topology", &quad.field, &gstar),
        ("hstar_topology", &h, &hstar),
    ] {
        let report = verify_level_topology(&quad, field, conj);
        checks.push(Check::count(
            name,
            report.violations.len(),
            report.violations.first().cloned(),
        ));
    }
    let ortho = verify_orthogonal_filling(&net);
    checks.push(Check::count(
        "orthogonal_filling",
        ortho.violations.len() + ortho.defects.len(),
        ortho
            .defects
            .first()
            .cloned()
            .or_else(|| ortho.violations.first().map(|v| format!("{v:?}"))),
    ));
    let measure = verify_measure_preservation(&map, &measures);
    checks.push(
        Check::bounded(
            "cell_measure",
            measure.max_relative_error,
            MEASURE_TOLERANCE,
        )
        .with_detail(format!("{} cells", measure.cells)),
    );
    checks.push(
        Check::bounded(
            "total_measure",
            measure.total_relative_error,
            TOTAL_TOLERANCE,
        )
        .with_detail(format!(
            "sum {} against {}",
            measure.total_nu, measure.expected_total_nu
        )),
    );
    checks.push(tiling_check(&target));
    checks.push(boundary_radii_check(&target));
    checks.push(cylinder_height_check(&cylinder));
    let rect_error = measures
        .iter()
        .map(|m| (m.lambda - m.rectangle_area).abs() / m.rectangle_area.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    checks.push(Check::bounded("cylinder_cell_measure", rect_error, LENGTH_TOLERANCE));
    checks.push(h_lengths_check(&net, k));
    checks.push(g_lengths_check(&net, period)?);

    Ok(AnnulusUniformization {
        annulus: annulus.clone(),
        g,
        k,
        slit,
        quad,
        gstar,
        period,
        h,
        hstar,
        width,
        net,
        target,
        measures,
        cylinder,
        checks,
    })
}

/// Sum of the shell areas against `μ(S_A)`.
fn tiling_check(target: &TargetAnnulus) -> Check {
    let tiled = target.tiled_area();
    let area = target.area();
    Check::bounded("tiling_completeness", (tiled - area).abs() / area, TOTAL_TOLERANCE).with_detail(
        format!(
            "shells cover {tiled} of {area}; outermost circle {} against boundary radius {}",
            target.radii.last().copied().unwrap_or(f64::NAN),
            target.outer_radius
        ),
    )
}

fn boundary_radii_check(target: &TargetAnnulus) -> Check {
    let w = PairFluxWeight::new(target.period).expect("period checked by build_target");
    let [inner, outer] = target.boundary_radii();
    let expected = std::f64::consts::TAU * w.radius(target.k);
    let residual = (inner - 1.0).abs().max((outer - expected).abs() / expected);
    Check::bounded("boundary_radii", residual, LENGTH_TOLERANCE)
}

fn cylinder_height_check(cylinder: &Cylinder) -> Check {
    let expected = (cylinder.outer_radius / cylinder.inner_radius).ln();
    Check::bounded(
        "cylinder_height",
        (cylinder.height - expected).abs(),
        LENGTH_TOLERANCE * expected.abs().max(1.0),
    )
}

/// Each `h` level runs from the outer to the inner boundary; its length is
/// taken from the `g` values at its ends.
fn h_lengths_check(net: &RectNet, k: f64) -> Check {
    let expected = h_level_length(0.0, k);
    let lengths: Vec<f64> = (0..net.h_values.len())
        .map(|j| {
            let along = net.g_along_h(j);
            match (along.first(), along.last()) {
                (Some(&start), Some(&end)) => h_level_length(end, start),
                _ => f64::NAN,
            }
        })
        .collect();
    let residual = lengths
        .iter()
        .map(|l| (l - expected).abs())
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    Check::bounded("h_level_lengths", residual, LENGTH_TOLERANCE * expected.max(1.0))
        .with_detail(format!("{} levels, expected length {expected}", lengths.len()))
}

/// Pair-flux length of each `g` level against `2π·exp(2πm/period)`.
fn g_lengths_check(net: &RectNet, period: f64) -> Result<Check> {
    let w = PairFluxWeight::new(period)?;
    let residual = net
        .g_values
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let computed: f64 = net
                .h_along_g(i)
                .windows(2)
                .map(|e| w.edge_weight(m, e[1] - e[0]))
                .sum();
            let expected = std::f64::consts::TAU * w.radius(m);
            (computed - expected).abs() / expected
        })
        .fold(0.0, f64::max);
    Ok(Check::bounded("g_level_lengths", residual, LENGTH_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_check_passes_only_on_zero() {
        assert!(Check::count("x", 0, None).passed);
        assert!(!Check::count("x", 2, None).passed);
        let c = Check::bounded("y", 1e-12, 1e-9);
        assert!(c.passed && c.detail.is_none());
    }
}
