//! Test meshes: small structured annuli, Delaunay meshes of perforated disks,
//! and a log-polar annulus.

use std::f64::consts::TAU;

use delaunator::triangulate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniformize_core::geometry::{winding_number, Point};
use uniformize_core::io::{BoundarySpec, Conductances, EdgeConductance, MeshDocument, MESH_SCHEMA};

fn document(
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    quads: Vec<[usize; 4]>,
    outer: Vec<usize>,
    inner: Vec<Vec<usize>>,
    conductances: Conductances,
) -> MeshDocument {
    MeshDocument {
        schema: MESH_SCHEMA.to_string(),
        vertices,
        triangles,
        quads,
        boundary: BoundarySpec { outer, inner },
        conductances,
        k: 1.0,
    }
}

fn ring(center: [f64; 2], rx: f64, ry: f64, count: usize, phase: f64) -> Vec<[f64; 2]> {
    (0..count)
        .map(|i| {
            let a = phase + TAU * i as f64 / count as f64;
            [center[0] + rx * a.cos(), center[1] + ry * a.sin()]
        })
        .collect()
}

/// Two rings of four vertices joined by four spokes into four quadrilaterals.
pub fn wheel() -> MeshDocument {
    let mut vertices = ring([0.0, 0.0], 1.0, 1.0, 4, 0.0);
    vertices.extend(ring([0.0, 0.0], 2.0, 2.0, 4, 0.0));
    let quads = (0..4).map(|i| [i, 4 + i, 4 + (i + 1) % 4, (i + 1) % 4]).collect();
    document(
        vertices,
        Vec::new(),
        quads,
        (4..8).collect(),
        vec![(0..4).collect()],
        Conductances::Uniform(1.0),
    )
}

/// `rings` concentric rings of `spokes` vertices, each quadrilateral split by
/// the diagonal from ring `r`, spoke `j` to ring `r + 1`, spoke `j + 1`.
pub fn polar_grid(rings: usize, spokes: usize) -> MeshDocument {
    let mut vertices = Vec::new();
    for r in 0..rings {
        vertices.extend(ring([0.0, 0.0], 1.0 + r as f64, 1.0 + r as f64, spokes, 0.0));
    }
    let id = |r: usize, j: usize| r * spokes + j % spokes;
    let mut triangles = Vec::new();
    for r in 0..rings - 1 {
        for j in 0..spokes {
            triangles.push([id(r, j), id(r + 1, j + 1), id(r + 1, j)]);
            triangles.push([id(r, j), id(r, j + 1), id(r + 1, j + 1)]);
        }
    }
    document(
        vertices,
        triangles,
        Vec::new(),
        (0..spokes).map(|j| id(rings - 1, j)).collect(),
        vec![(0..spokes).collect()],
        Conductances::Uniform(1.0),
    )
}

/// Three rings of eight spokes.
pub fn g8x3() -> MeshDocument {
    polar_grid(3, 8)
}

/// Quadrilateral grid with radii `exp(2πi/spokes)`, `i = 0..=layers`.
pub fn log_polar(layers: usize, spokes: usize) -> MeshDocument {
    let mut vertices = Vec::new();
    for i in 0..=layers {
        let r = (TAU * i as f64 / spokes as f64).exp();
        vertices.extend(ring([0.0, 0.0], r, r, spokes, 0.0));
    }
    let id = |i: usize, j: usize| i * spokes + j % spokes;
    let quads = (0..layers)
        .flat_map(|i| (0..spokes).map(move |j| [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]))
        .collect();
    document(
        vertices,
        Vec::new(),
        quads,
        (0..spokes).map(|j| id(layers, j)).collect(),
        vec![(0..spokes).collect()],
        Conductances::Uniform(1.0),
    )
}

/// An elliptical outline for a perforated disk.
#[derive(Debug, Clone, Copy)]
pub struct Outline {
    pub center: [f64; 2],
    pub rx: f64,
    pub ry: f64,
    pub count: usize,
}

impl Outline {
    pub const fn circle(center: [f64; 2], r: f64, count: usize) -> Self {
        Self {
            center,
            rx: r,
            ry: r,
            count,
        }
    }

    fn points(&self) -> Vec<[f64; 2]> {
        ring(self.center, self.rx, self.ry, self.count, 0.0)
    }

    /// Approximate distance from `p` to the outline.
    fn distance(&self, p: [f64; 2]) -> f64 {
        let (dx, dy) = ((p[0] - self.center[0]) / self.rx, (p[1] - self.center[1]) / self.ry);
        ((dx * dx + dy * dy).sqrt() - 1.0).abs() * self.rx.min(self.ry)
    }

    fn spacing(&self) -> f64 {
        TAU * self.rx.max(self.ry) / self.count as f64
    }
}

/// Delaunay mesh of the disk `outer` minus the holes, with interior points
/// placed by dart throwing at roughly the boundary spacing.
pub fn perforated_disk(
    outer: Outline,
    holes: &[Outline],
    seed: u64,
    random_conductance: bool,
) -> MeshDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = outer.points();
    let outer_ids: Vec<usize> = (0..vertices.len()).collect();
    let mut inner_ids = Vec::new();
    for hole in holes {
        let start = vertices.len();
        vertices.extend(hole.points());
        inner_ids.push((start..vertices.len()).collect::<Vec<_>>());
    }
    let spacing = std::iter::once(&outer)
        .chain(holes)
        .map(Outline::spacing)
        .fold(f64::INFINITY, f64::min);
    let inside = |p: [f64; 2]| {
        let (dx, dy) = ((p[0] - outer.center[0]) / outer.rx, (p[1] - outer.center[1]) / outer.ry);
        dx * dx + dy * dy < 1.0
            && holes.iter().all(|h| {
                let (hx, hy) = ((p[0] - h.center[0]) / h.rx, (p[1] - h.center[1]) / h.ry);
                hx * hx + hy * hy > 1.0
            })
    };
    let clearance = 0.9 * spacing;
    let mut misses = 0;
    while misses < 4000 {
        let p = [
            outer.center[0] + rng.gen_range(-outer.rx..outer.rx),
            outer.center[1] + rng.gen_range(-outer.ry..outer.ry),
        ];
        let clear = inside(p)
            && std::iter::once(&outer).chain(holes).all(|o| o.distance(p) > clearance)
            && vertices
                .iter()
                .all(|q| (q[0] - p[0]).hypot(q[1] - p[1]) > spacing);
        if clear {
            vertices.push(p);
            misses = 0;
        } else {
            misses += 1;
        }
    }
    let points: Vec<delaunator::Point> = vertices
        .iter()
        .map(|p| delaunator::Point { x: p[0], y: p[1] })
        .collect();
    let tri = triangulate(&points);
    let hole_polygons: Vec<Vec<Point>> = inner_ids
        .iter()
        .map(|ids| ids.iter().map(|&i| Point::new(vertices[i][0], vertices[i][1])).collect())
        .collect();
    let triangles: Vec<[usize; 3]> = tri
        .triangles
        .chunks(3)
        .map(|t| [t[0], t[1], t[2]])
        .filter(|t| {
            let c = Point::new(
                (vertices[t[0]][0] + vertices[t[1]][0] + vertices[t[2]][0]) / 3.0,
                (vertices[t[0]][1] + vertices[t[1]][1] + vertices[t[2]][1]) / 3.0,
            );
            hole_polygons.iter().all(|poly| winding_number(poly, c) == 0)
        })
        .collect();
    let conductances = if random_conductance {
        let mut edges: Vec<[usize; 2]> = triangles
            .iter()
            .flat_map(|t| (0..3).map(move |i| {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                [a.min(b), a.max(b)]
            }))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Conductances::PerEdge(
            edges
                .into_iter()
                .map(|edge| EdgeConductance {
                    edge,
                    value: (rng.gen_range(0.5..2.0_f64) * 1e6).round() / 1e6,
                })
                .collect(),
        )
    } else {
        Conductances::Uniform(1.0)
    };
    document(vertices, triangles, Vec::new(), outer_ids, inner_ids, conductances)
}

/// Circular disk with an off-center circular hole, unit conductances.
pub fn irregular_annulus_a() -> MeshDocument {
    perforated_disk(
        Outline::circle([0.0, 0.0], 3.0, 48),
        &[Outline::circle([0.4, 0.2], 1.0, 20)],
        11,
        false,
    )
}

/// Elliptical disk with a circular hole, random conductances in `[0.5, 2]`.
pub fn irregular_annulus_b() -> MeshDocument {
    perforated_disk(
        Outline {
            center: [0.0, 0.0],
            rx: 4.0,
            ry: 2.5,
            count: 56,
        },
        &[Outline::circle([-0.6, 0.1], 0.8, 16)],
        23,
        true,
    )
}

/// Disk with two holes.
pub fn pants() -> MeshDocument {
    perforated_disk(
        Outline::circle([0.0, 0.0], 4.0, 56),
        &[
            Outline::circle([-1.7, 0.15], 0.7, 14),
            Outline::circle([1.6, -0.1], 0.6, 12),
        ],
        37,
        false,
    )
}

/// Disk with three holes in a row.
pub fn three_holes() -> MeshDocument {
    perforated_disk(
        Outline {
            center: [0.0, 0.0],
            rx: 5.5,
            ry: 3.5,
            count: 64,
        },
        &[
            Outline::circle([-3.0, 0.1], 0.6, 12),
            Outline::circle([0.1, 0.35], 0.7, 14),
            Outline::circle([2.9, -0.2], 0.65, 12),
        ],
        41,
        false,
    )
}

/// Every fixture with its file stem.
pub fn all() -> Vec<(&'static str, MeshDocument)> {
    vec![
        ("wheel", wheel()),
        ("g8x3", g8x3()),
        ("irregular_a", irregular_annulus_a()),
        ("irregular_b", irregular_annulus_b()),
        ("fine_annulus", log_polar(8, 32)),
        ("pants", pants()),
        ("three_holes", three_holes()),
    ]
}
