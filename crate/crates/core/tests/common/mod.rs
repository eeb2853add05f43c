#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use uniformize_core::complex::PLComplex;
use uniformize_core::conjugate::{conjugate_of_g, harmonic_conjugate, period, ConjugateField};
use uniformize_core::io::{load_mesh, MeshDocument};
use uniformize_core::network::{solve_dirichlet, DirichletSpec, ScalarField};
use uniformize_core::plgeom::{cut_along_slit, find_slit, SlitQuadrilateral, ValueOrder};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> MeshDocument {
    load_mesh(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub const ANNULI: [&str; 5] = ["wheel", "g8x3", "irregular_a", "irregular_b", "fine_annulus"];

/// Dirichlet data of the standard problem: `k` on the outer cycle, zero on the others.
pub fn standard_spec(complex: &PLComplex, k: f64) -> DirichletSpec {
    let comps = complex.boundary_components();
    DirichletSpec::new(
        comps[0].vertices.clone(),
        k,
        comps[1..].iter().map(|c| c.vertices.clone()).collect(),
    )
}

pub fn solve_standard(complex: &PLComplex, k: f64) -> ScalarField {
    let net = complex.network().unwrap();
    solve_dirichlet(&net, &standard_spec(complex, k)).unwrap()
}

pub struct Stage {
    pub annulus: PLComplex,
    pub g: ScalarField,
    pub quad: SlitQuadrilateral,
    pub gstar: ConjugateField,
    pub period: f64,
    pub h: ScalarField,
}

/// Solve, cut along the automatic slit, and
/// build `g*`, the period and `h`.
pub fn stage(name: &str) -> Stage {
    let doc = fixture(name);
    let complex = doc.to_complex().unwrap();
    let g = solve_standard(&complex, doc.k);
    let slit = find_slit(&complex, &g, ValueOrder::default()).unwrap();
    let quad = cut_along_slit(&complex, &g, &slit).unwrap();
    let gstar = conjugate_of_g(&quad, &quad.field).unwrap();
    let period = period(&quad, &quad.field, &gstar).unwrap();
    let h = harmonic_conjugate(&quad, period).unwrap();
    Stage {
        annulus: complex,
        g,
        quad,
        gstar,
        period,
        h,
    }
}

/// A random planar network with Dirichlet data on its convex hull.
pub struct RandomNetwork {
    pub net: uniformize_core::network::FiniteNetwork,
    pub prescribed: Vec<Option<f64>>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl RandomNetwork {
    pub fn free(&self) -> Vec<usize> {
        (0..self.prescribed.len()).filter(|&v| self.prescribed[v].is_none()).collect()
    }
}

/// Delaunay triangulation of `n` uniform points in the unit square,
/// conductances uniform in `[0.5, 2]`, hull values uniform in `[0, 1]`.
pub fn random_network(seed: u64, n: usize) -> RandomNetwork {
    use rand::{Rng, SeedableRng};
    use uniformize_core::geometry::Point;
    use uniformize_core::network::{FiniteNetwork, WeightedEdge};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect();
    let tri = delaunator::triangulate(
        &points.iter().map(|p| delaunator::Point { x: p.x, y: p.y }).collect::<Vec<_>>(),
    );
    let mut pairs: Vec<(usize, usize)> = tri
        .triangles
        .chunks(3)
        .flat_map(|t| (0..3).map(move |i| (t[i].min(t[(i + 1) % 3]), t[i].max(t[(i + 1) % 3]))))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let edges: Vec<(usize, usize, f64)> = pairs.into_iter().map(|(a, b)| (a, b, rng.gen_range(0.5..=2.0))).collect();
    let weighted: Vec<WeightedEdge> = edges.iter().map(|&(a, b, c)| WeightedEdge::new(a, b, c)).collect();
    let net = FiniteNetwork::new(points, &weighted, Vec::new()).unwrap();
    let mut prescribed = vec![None; n];
    for &v in &tri.hull {
        prescribed[v] = Some(rng.gen_range(0.0..1.0));
    }
    RandomNetwork { net, prescribed, edges }
}
