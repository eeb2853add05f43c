//! Acceptance suite: one line per criterion, every tolerance pinned below.
//!
//! Runs without the libtest harness so that the lines always appear in the
//! output. Criterion 7 cannot hold together with criteria 6 and 8 (see the
//! README); it is evaluated at its full tolerance, reported as FAIL, and
//! listed in `EXPECTED_FAILURES`. The process exits nonzero when any other
//! criterion fails, when an expected failure starts passing, or, with
//! `ACCEPTANCE_STRICT=1`, when any criterion fails at all.

mod common;

use std::f64::consts::{PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use common::oracle::{complex_edges, dense_solve};
use common::{fixture, random_network, standard_spec, ANNULI};
use rand::{Rng, SeedableRng};
use uniformize_core::conjugate::{spread, verify_level_topology};
use uniformize_core::mapper::Cylinder;
use uniformize_core::network::{
    green_identity_residual, green_identity_scale, maximum_principle_violations, solve_dirichlet,
    solve_dirichlet_neumann, solve_prescribed, DirichletArc, DirichletNeumannSpec, ScalarField,
};
use uniformize_core::pipeline::{uniformize_annulus, AnnulusUniformization, PipelineOptions, SlitChoice};
use uniformize_core::rectnet::verify_orthogonal_filling;
use uniformize_core::singular::{uniformize_domain, SingularUniformization};

const GREEN_TOLERANCE: f64 = 1e-9;
const ORACLE_TOLERANCE: f64 = 1e-10;
const PERIOD_TOLERANCE: f64 = 1e-9;
const CELL_MEASURE_TOLERANCE: f64 = 1e-9;
const TOTAL_MEASURE_TOLERANCE: f64 = 1e-8;
const TILING_TOLERANCE: f64 = 1e-8;
const CYLINDER_TOLERANCE: f64 = 1e-9;
const GLUING_TOLERANCE: f64 = 1e-9;

const RADIAL_SMOKE_TOLERANCE: f64 = 0.05;

const RANDOM_NETWORKS: u64 = 50;
const RANDOM_SEED: u64 = 0x5eed;
const EXPECTED_FAILURES: [u8; 1] = [7];

const ALL_FIXTURES: [&str; 7] = ["wheel", "g8x3", "irregular_a", "irregular_b", "fine_annulus", "pants", "three_holes"];
const FILLING_FIXTURES: [&str; 4] = ["wheel", "g8x3", "irregular_a", "irregular_b"];
const MULTIPLY_CONNECTED: [(&str, usize); 2] = [("pants", 3), ("three_holes", 4)];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn annuli() -> &'static [(&'static str, AnnulusUniformization)] {
    static RUNS: OnceLock<Vec<(&'static str, AnnulusUniformization)>> = OnceLock::new();
    RUNS.get_or_init(|| {
        ANNULI
            .iter()
            .map(|&name| {
                let doc = fixture(name);
                let complex = doc.to_complex().unwrap();
                let run = uniformize_annulus(&complex, doc.k, &PipelineOptions::default())
                    .unwrap_or_else(|e| panic!("{name}: {e}"));
                (name, run)
            })
            .collect()
    })
}

fn annulus(name: &str) -> &'static AnnulusUniformization {
    &annuli().iter().find(|(n, _)| *n == name).expect("known annulus").1
}

fn domains() -> &'static [(&'static str, usize, SingularUniformization)] {
    static RUNS: OnceLock<Vec<(&'static str, usize, SingularUniformization)>> = OnceLock::new();
    RUNS.get_or_init(|| {
        MULTIPLY_CONNECTED
            .iter()
            .map(|&(name, m)| {
                let doc = fixture(name);
                let complex = doc.to_complex().unwrap();
                let run = uniformize_domain(&complex, doc.k, &PipelineOptions::default())
                    .unwrap_or_else(|e| panic!("{name}: {e}"));
                (name, m, run)
            })
            .collect()
    })
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Zero on the base copy of the slit, the period on the top copy, zero normal
/// derivative on the rest of both boundary cycles.
fn conjugate_problem(run: &AnnulusUniformization) -> DirichletNeumannSpec {
    let q = &run.quad;
    let on_slit = |v: &usize| q.base.contains(v) || q.top.contains(v);
    DirichletNeumannSpec {
        dirichlet: vec![
            DirichletArc::constant(q.base.clone(), 0.0),
            DirichletArc::constant(q.top.clone(), run.period),
        ],
        neumann: [&q.outer, &q.inner]
            .into_iter()
            .map(|arc| arc.iter().copied().filter(|v| !on_slit(v)).collect())
            .collect(),
    }
}

fn green_identity() -> Outcome {
    let mut sizes = rand_chacha::ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let mut worst = 0.0_f64;
    for seed in 0..RANDOM_NETWORKS {
        let n = sizes.gen_range(10..=200);
        let rn = random_network(RANDOM_SEED + seed, n);
        let g = solve_prescribed(&rn.net, &rn.prescribed).unwrap();
        let one = ScalarField::constant(n, 1.0);
        for v in [&one, &g] {
            let residual = green_identity_residual(&rn.net, &g, v, &rn.free()).unwrap();
            worst = worst.max(residual / green_identity_scale(&rn.net, &g, v));
        }
    }
    Outcome::new(
        worst <= GREEN_TOLERANCE,
        format!("{RANDOM_NETWORKS} networks, worst residual/scale {worst:.2e} (bound {GREEN_TOLERANCE:e})"),
    )
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn oracle_equivalence() -> Outcome {
    let mut dirichlet = 0.0_f64;
    for name in ALL_FIXTURES {
        let doc = fixture(name);
        let complex = doc.to_complex().unwrap();
        let spec = standard_spec(&complex, doc.k);
        let sparse = solve_dirichlet(&complex.network().unwrap(), &spec).unwrap();
        let prescribed = spec.to_prescribed(complex.vertex_count()).unwrap();
        let dense = dense_solve(complex.vertex_count(), &complex_edges(&complex), &prescribed);
        dirichlet = dirichlet.max(max_diff(sparse.values(), &dense));
    }
    let mut mixed = 0.0_f64;
    for (_, run) in annuli() {
        let spec = conjugate_problem(run);
        let complex = &run.quad.complex;
        let sparse = solve_dirichlet_neumann(&complex.network().unwrap(), &spec).unwrap();
        let n = complex.vertex_count();
        let dense = dense_solve(n, &complex_edges(complex), &spec.to_prescribed(n).unwrap());
        mixed = mixed.max(max_diff(sparse.values(), &dense));
    }
    Outcome::new(
        dirichlet <= ORACLE_TOLERANCE && mixed <= ORACLE_TOLERANCE,
        format!("Dirichlet {dirichlet:.2e} on {} fixtures, Dirichlet-Neumann {mixed:.2e} on {} annuli (bound {ORACLE_TOLERANCE:e})", ALL_FIXTURES.len(), ANNULI.len()),
    )
}

fn maximum_principle() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for name in ALL_FIXTURES {
        let doc = fixture(name);
        let complex = doc.to_complex().unwrap();
        let spec = standard_spec(&complex, doc.k);
        let g = solve_dirichlet(&complex.network().unwrap(), &spec).unwrap();
        violations += maximum_principle_violations(&g, &spec.to_prescribed(complex.vertex_count()).unwrap()).len();
        checked += 1;
    }
    for (_, run) in annuli() {
        let prescribed = conjugate_problem(run).to_prescribed(run.quad.complex.vertex_count()).unwrap();
        violations += maximum_principle_violations(&run.h, &prescribed).len();
        checked += 1;
    }
    Outcome::new(violations == 0, format!("{checked} solutions, {violations} interior values outside the data range"))
}

fn period_well_defined() -> Outcome {
    let worst = annuli()
        .iter()
        .map(|(_, run)| spread(&run.gstar) / run.period)
        .fold(0.0, f64::max);
    let auto = annulus("g8x3");
    let alternative = if auto.slit.path.first() == Some(&16) { vec![20, 12, 4] } else { vec![16, 8, 0] };
    let doc = fixture("g8x3");
    let options = PipelineOptions {
        slit: SlitChoice::Path(alternative.clone()),
        ..PipelineOptions::default()
    };
    let other = uniformize_annulus(&doc.to_complex().unwrap(), doc.k, &options).unwrap();
    let difference = relative(other.period, auto.period);
    Outcome::new(
        worst <= PERIOD_TOLERANCE && difference <= PERIOD_TOLERANCE && auto.slit.path != alternative,
        format!(
            "worst spread/period {worst:.2e}; g8x3 slits {:?} and {alternative:?} give periods differing by {difference:.2e} (bound {PERIOD_TOLERANCE:e})",
            auto.slit.path
        ),
    )
}

fn orthogonal_filling() -> Outcome {
    let mut pairs = 0;
    let mut bad = 0;
    for name in FILLING_FIXTURES {
        let run = annulus(name);
        let report = verify_orthogonal_filling(&run.net);
        pairs += report.pairs_checked;
        bad += report.violations.len() + report.defects.len() + (report.pairs_checked - report.pairs_meeting_once);
        for (field, conj) in [(&run.quad.field, &run.gstar), (&run.h, &run.hstar)] {
            bad += verify_level_topology(&run.quad, field, conj).violations.len();
        }
    }
    Outcome::new(bad == 0, format!("{pairs} level pairs on {} fixtures, {bad} violations", FILLING_FIXTURES.len()))
}

fn measure_preservation() -> Outcome {
    let mut worst_cell = 0.0_f64;
    let mut worst_total = 0.0_f64;
    let mut cells = 0;
    for (_, run) in annuli() {
        for m in &run.measures {
            worst_cell = worst_cell.max((m.nu - m.mu).abs() / m.mu);
        }
        cells += run.measures.len();
        let total: f64 = run.measures.iter().map(|m| m.nu).sum();
        let expected = PI * ((4.0 * PI * run.k / run.period).exp() - 1.0);
        worst_total = worst_total.max(relative(total, expected));
    }
    Outcome::new(
        worst_cell <= CELL_MEASURE_TOLERANCE && worst_total <= TOTAL_MEASURE_TOLERANCE,
        format!(
            "{cells} cells, worst |nu-mu|/mu {worst_cell:.2e} (bound {CELL_MEASURE_TOLERANCE:e}), worst total {worst_total:.2e} (bound {TOTAL_MEASURE_TOLERANCE:e})"
        ),
    )
}

fn tiling_completeness() -> Outcome {
    let mut worst = 0.0_f64;
    let mut overlaps = 0;
    for (_, run) in annuli() {
        let t = &run.target;
        let tiled: f64 = t.shells().map(|s| s.area()).sum();
        let area = PI * (t.outer_radius.powi(2) - t.inner_radius.powi(2));
        worst = worst.max(relative(tiled, area));
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&t.radii) || !increasing(&t.angles) {
            overlaps += 1;
        }
    }
    Outcome::new(
        worst <= TILING_TOLERANCE && overlaps == 0,
        format!(
            "worst relative shortfall {worst:.4} (bound {TILING_TOLERANCE:e}); shells interior-disjoint on {} of {} annuli",
            annuli().len() - overlaps,
            annuli().len()
        ),
    )
}

fn boundary_radii() -> Outcome {
    let mut mismatches = Vec::new();
    for (name, run) in annuli() {
        let t = &run.target;
        let outer = TAU * (TAU / run.period * run.k).exp();
        if t.inner_radius != 1.0 || t.outer_radius != outer {
            mismatches.push(format!("{name}: {} {} vs 1 {outer}", t.inner_radius, t.outer_radius));
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} annuli have radii exactly 1 and 2*pi*exp(2*pi*k/period)", annuli().len())
        } else {
            mismatches.join("; ")
        },
    )
}

fn cylinder_map() -> Outcome {
    let mut worst_height = 0.0_f64;
    let mut worst_cell = 0.0_f64;
    for (_, run) in annuli() {
        let t = &run.target;
        let expected = (t.outer_radius / t.inner_radius).ln();
        worst_height = worst_height.max(relative(run.cylinder.height, expected));
        for (m, shell) in run.measures.iter().zip(t.shells()) {
            let rect = Cylinder::rectangle(&shell);
            let area = (rect.phi1 - rect.phi0) * (rect.z1 - rect.z0);
            worst_cell = worst_cell.max(relative(m.lambda, area));
        }
    }
    Outcome::new(
        worst_height <= CYLINDER_TOLERANCE && worst_cell <= CYLINDER_TOLERANCE,
        format!("height error {worst_height:.2e}, worst |lambda - dphi*dlog r| relative {worst_cell:.2e} (bound {CYLINDER_TOLERANCE:e})"),
    )
}

fn singular_pipeline() -> Outcome {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (name, m, run) in domains() {
        let ladder = &run.ladder;
        for split in &ladder.splits {
            if split.candidates != 1 {
                problems.push(format!("{name}: split at {} has {} maximal curves", split.value, split.candidates));
            }
        }
        let not_annuli = run.pieces().iter().filter(|u| u.annulus.boundary_components().len() != 2).count();
        if not_annuli > 0 {
            problems.push(format!("{name}: {not_annuli} pieces are not annuli"));
        }
        let gluing = ladder.max_gluing_error();
        if !(gluing <= GLUING_TOLERANCE) {
            problems.push(format!("{name}: gluing error {gluing:e}"));
        }
        for cone in &ladder.cone_points {
            if cone.incident < 3 || cone.angle != 2.0 * cone.incident as f64 * PI {
                problems.push(format!("{name}: cone angle {} with {} incident sheets", cone.angle, cone.incident));
            }
        }
        if ladder.boundaries.len() != *m {
            problems.push(format!("{name}: {} ladder boundaries for m = {m}", ladder.boundaries.len()));
        }
        summary.push(format!(
            "{name}: {} splits, {} pieces, {} boundaries, gluing {gluing:.1e}",
            ladder.splits.len(),
            ladder.pieces.len(),
            ladder.boundaries.len()
        ));
    }
    let passed = problems.is_empty();
    problems.extend(summary);
    Outcome::new(passed, problems.join("; "))
}

fn h_level_lengths() -> Outcome {
    let mut mismatched = 0;
    let mut levels = 0;
    let runs = annuli()
        .iter()
        .map(|(_, run)| run)
        .chain(domains().iter().flat_map(|(_, _, run)| run.pieces()));
    for run in runs {
        let expected = run.k.exp() - 1.0;
        for j in 0..run.net.h_values.len() {
            let along = run.net.g_along_h(j);
            let (start, end) = (along[0], along[along.len() - 1]);
            let length = start.exp() - end.exp();
            levels += 1;
            if length != expected {
                mismatched += 1;
            }
        }
    }
    Outcome::new(mismatched == 0, format!("{levels} h levels, {mismatched} with length other than exp(k) - 1"))
}

/// Informational: on the log-polar grid the images of the vertices should sit
/// near the radial map `z -> z` (inner radius already 1).
fn radial_smoke() -> Outcome {
    let run = annulus("fine_annulus");
    let outer = run.quad.complex.positions().iter().map(|p| p.x.hypot(p.y)).fold(0.0, f64::max);
    let exact_period = TAU * run.k / outer.ln();
    let mut worst = relative(run.period, exact_period);
    for (v, p) in run.annulus.positions().iter().enumerate() {
        let image = (TAU * run.g.values()[v] / run.period).exp();
        worst = worst.max(relative(image, p.x.hypot(p.y)));
    }
    Outcome::new(
        worst <= RADIAL_SMOKE_TOLERANCE,
        format!("fine_annulus worst relative deviation from the radial map {worst:.2e} (bound {RADIAL_SMOKE_TOLERANCE})"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, fn() -> Outcome); 11] = [
        (1, "green identity", green_identity),
        (2, "solver oracle equivalence", oracle_equivalence),
        (3, "maximum principle", maximum_principle),
        (4, "period well-definedness", period_well_defined),
        (5, "orthogonal filling", orthogonal_filling),
        (6, "measure preservation", measure_preservation),
        (7, "tiling completeness", tiling_completeness),
        (8, "boundary radii", boundary_radii),
        (9, "cylinder map", cylinder_map),
        (10, "singular pipeline", singular_pipeline),
        (11, "h-level lengths", h_level_lengths),
    ];
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut unexpected = 0;
    let mut failed = 0;
    println!("acceptance: {} criteria", criteria.len());
    for (number, title, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {message}"))
        });
        let expected_failure = EXPECTED_FAILURES.contains(&number);
        let status = match (outcome.passed, expected_failure) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as expected failure)",
            (false, true) => "FAIL (expected, see README)",
            (false, false) => "FAIL",
        };
        if !outcome.passed {
            failed += 1;
        }
        if outcome.passed == expected_failure {
            unexpected += 1;
        }
        println!(
            "criterion {number:>2} {title:<27} {status} [{:.2}s] {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    let smoke = radial_smoke();
    println!(
        "smoke        radial map (not gating)     {} {}",
        if smoke.passed { "PASS" } else { "FAIL" },
        smoke.detail
    );
    println!(
        "acceptance: {} passed, {failed} failed, {unexpected} unexpected",
        criteria.len() - failed
    );
    if unexpected > 0 || (strict && failed > 0) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
