use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::level::LevelCurve;
use super::LEVEL_TOLERANCE;
use crate::complex::{Cell, EdgeKey, PLComplex, VertexKind};
use crate::error::{Error, Result};
use crate::geometry::{orient, signed_area, Point};
use crate::network::{BoundaryComponent, ScalarField, VertexId};

/// A refined complex with the field extended to the new vertices.
#[derive(Debug, Clone)]
pub struct Refined {
    pub complex: PLComplex,
    pub field: ScalarField,
    /// New zero-conductance edges lying along a level.
    pub level_arcs: BTreeSet<EdgeKey>,
    /// Vertices with id below this bound are the vertices of the input complex.
    pub original_vertices: usize,
}

/// Insert a type I vertex wherever `curve`'s level crosses an edge interior and
/// cut the cells along the level. Every crossing of the level set at
/// `curve.value` is refined, not only those on `curve`.
pub fn refine_type1(complex: &PLComplex, field: &ScalarField, curve: &LevelCurve) -> Result<Refined> {
    let tol = LEVEL_TOLERANCE * field.range();
    if let Some(p) = curve
        .points
        .iter()
        .find(|p| (p.site.interpolate(field) - curve.value).abs() > tol.max(1e-300) * 10.0)
    {
        return Err(Error::NotALevelCurve(format!(
            "point at ({}, {}) has value {} instead of {}",
            p.position.x,
            p.position.y,
            p.site.interpolate(field),
            curve.value
        )));
    }
    refine_levels(complex, field, &[curve.value])
}

/// Type I refinement along several levels at once. Crossed edges are split in
/// series so that every new vertex is harmonic and edge currents are unchanged;
/// the level arcs get conductance zero.
pub fn refine_levels(complex: &PLComplex, field: &ScalarField, levels: &[f64]) -> Result<Refined> {
    let mut sorted: Vec<f64> = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let tol = LEVEL_TOLERANCE * field.range();
    let inside = |a: f64, b: f64| -> Vec<f64> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let start = sorted.partition_point(|&t| t <= lo + tol);
        let end = sorted.partition_point(|&t| t < hi - tol);
        let mut vals: Vec<f64> = sorted[start..end.max(start)].to_vec();
        if a > b {
            vals.reverse();
        }
        vals
    };
    build(complex, field, inside, &sorted, VertexKind::TypeI, tol, true)
}

/// Type II refinement: on every edge with positive conductance, one vertex per
/// gap `(t_j, t_{j+1})` of `levels` that the edge spans, placed at the gap's
/// midpoint value. Cells are re-split along the new vertices.
pub fn refine_type2(complex: &PLComplex, field: &ScalarField, levels: &[f64]) -> Result<Refined> {
    let mut sorted: Vec<f64> = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let tol = LEVEL_TOLERANCE * field.range();
    let mids: Vec<f64> = sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let spanned = |a: f64, b: f64| -> Vec<f64> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut vals: Vec<f64> = sorted
            .windows(2)
            .filter(|w| w[0] >= lo - tol && w[1] <= hi + tol)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect();
        if a > b {
            vals.reverse();
        }
        vals
    };
    build(complex, field, spanned, &mids, VertexKind::TypeII, tol, false)
}

fn build<F>(
    complex: &PLComplex,
    field: &ScalarField,
    values_on_edge: F,
    split_values: &[f64],
    kind: VertexKind,
    tol: f64,
    zero_conductance_too: bool,
) -> Result<Refined>
where
    F: Fn(f64, f64) -> Vec<f64>,
{
    let original = complex.vertex_count();
    let mut positions: Vec<Point> = complex.positions().to_vec();
    let mut kinds: Vec<VertexKind> = complex.kinds().to_vec();
    let mut values: Vec<f64> = field.values().to_vec();
    let mut chains: HashMap<EdgeKey, Vec<VertexId>> = HashMap::new();
    let mut conductance: BTreeMap<EdgeKey, f64> = BTreeMap::new();

    for (&key, &c) in complex.conductances() {
        let fa = field[key.0];
        let fb = field[key.1];
        let inserted = if c > 0.0 || zero_conductance_too {
            values_on_edge(fa, fb)
        } else {
            Vec::new()
        };
        let mut chain = vec![key.0];
        for value in inserted {
            let s = (value - fa) / (fb - fa);
            positions.push(complex.position(key.0).lerp(complex.position(key.1), s));
            kinds.push(kind);
            values.push(value);
            chain.push(values.len() - 1);
        }
        chain.push(key.1);
        for w in chain.windows(2) {
            let piece = if chain.len() == 2 {
                c
            } else if c > 0.0 {
                let drop = values[w[0]] - values[w[1]];
                if drop == 0.0 {
                    return Err(Error::Topology(format!(
                        "edge ({}, {}) split at a point with an endpoint's value",
                        key.0, key.1
                    )));
                }
                c * (fa - fb) / drop
            } else {
                0.0
            };
            conductance.insert(EdgeKey::new(w[0], w[1]), piece);
        }
        if chain.len() > 2 {
            chains.insert(key, chain[1..chain.len() - 1].to_vec());
        }
    }

    let chain_between = |a: VertexId, b: VertexId| -> Vec<VertexId> {
        match chains.get(&EdgeKey::new(a, b)) {
            None => Vec::new(),
            Some(c) if a < b => c.clone(),
            Some(c) => c.iter().rev().copied().collect(),
        }
    };

    let mut cells = Vec::new();
    let mut level_arcs = BTreeSet::new();
    for cell in complex.cells() {
        let mut polygon = Vec::new();
        for (a, b) in cell.directed_edges() {
            polygon.push(a);
            polygon.extend(chain_between(a, b));
        }
        let center = cell.vertices().iter().map(|&v| field[v]).sum::<f64>()
            / cell.vertices().len() as f64;
        let mut pieces = vec![polygon];
        for &t in split_values {
            let mut next = Vec::new();
            for piece in pieces {
                let (parts, chords) = split_by_level(piece, t, center, &values, tol);
                level_arcs.extend(chords);
                next.extend(parts);
            }
            pieces = next;
        }
        for piece in pieces {
            for tri in finalize(&piece, &positions)? {
                for key in tri.edge_keys() {
                    conductance.entry(key).or_insert(0.0);
                }
                cells.push(tri);
            }
        }
    }
    for key in &level_arcs {
        conductance.insert(*key, 0.0);
    }

    let boundary = complex
        .boundary_components()
        .iter()
        .map(|b| {
            let n = b.vertices.len();
            let mut vertices = Vec::with_capacity(n);
            for i in 0..n {
                let a = b.vertices[i];
                let next = b.vertices[(i + 1) % n];
                vertices.push(a);
                if n > 1 && complex.has_edge(a, next) {
                    vertices.extend(chain_between(a, next));
                }
            }
            BoundaryComponent {
                name: b.name.clone(),
                vertices,
            }
        })
        .collect();

    let complex = PLComplex::new(positions, kinds, cells, conductance, boundary)?;
    Ok(Refined {
        complex,
        field: ScalarField::new(values),
        level_arcs,
        original_vertices: original,
    })
}

fn side(value: f64, t: f64, tol: f64) -> i8 {
    let d = value - t;
    if d.abs() <= tol {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// Cut a polygon along level `t` between its on-level vertices.
fn split_by_level(
    polygon: Vec<VertexId>,
    t: f64,
    center: f64,
    values: &[f64],
    tol: f64,
) -> (Vec<Vec<VertexId>>, Vec<EdgeKey>) {
    let n = polygon.len();
    let sides: Vec<i8> = polygon.iter().map(|&v| side(values[v], t, tol)).collect();
    let straddles = (0..n).any(|i| sides[i] * sides[(i + 1) % n] == -1);
    let zeros: Vec<usize> = (0..n).filter(|&i| sides[i] == 0).collect();
    if straddles || zeros.len() < 2 {
        return (vec![polygon], Vec::new());
    }
    let m = zeros.len();
    let arc_sign = |k: usize| -> i8 {
        let from = zeros[k];
        let to = zeros[(k + 1) % m];
        let mut i = (from + 1) % n;
        while i != to {
            if sides[i] != 0 {
                return sides[i];
            }
            i = (i + 1) % n;
        }
        0
    };
    let cut_sign: i8 = if center - t >= 0.0 { -1 } else { 1 };
    let mut chords: Vec<(usize, usize)> = (0..m)
        .filter(|&k| arc_sign(k) == cut_sign)
        .map(|k| (zeros[k], zeros[(k + 1) % m]))
        .filter(|&(a, b)| (b + n - a) % n > 1 && (a + n - b) % n > 1)
        .collect();
    if m == 2 && chords.len() == 2 {
        chords.truncate(1);
    }
    if chords.is_empty() {
        return (vec![polygon], Vec::new());
    }
    let mut pieces = vec![polygon.clone()];
    let mut arcs = Vec::new();
    for (ia, ib) in chords {
        let (a, b) = (polygon[ia], polygon[ib]);
        arcs.push(EdgeKey::new(a, b));
        let Some(pi) = pieces
            .iter()
            .position(|p| p.contains(&a) && p.contains(&b))
        else {
            continue;
        };
        let piece = pieces.swap_remove(pi);
        let pa = piece.iter().position(|&v| v == a).unwrap();
        let pb = piece.iter().position(|&v| v == b).unwrap();
        let len = piece.len();
        let walk = |from: usize, to: usize| -> Vec<VertexId> {
            let mut out = vec![piece[from]];
            let mut i = from;
            while i != to {
                i = (i + 1) % len;
                out.push(piece[i]);
            }
            out
        };
        pieces.push(walk(pa, pb));
        pieces.push(walk(pb, pa));
    }
    (pieces, arcs)
}

/// Turn a polygon into triangle or quadrilateral cells, fanning larger or
/// degenerate pieces from a vertex that keeps every triangle proper.
fn finalize(polygon: &[VertexId], positions: &[Point]) -> Result<Vec<Cell>> {
    let n = polygon.len();
    let pts: Vec<Point> = polygon.iter().map(|&v| positions[v]).collect();
    let scale = pts
        .iter()
        .map(|p| p.distance(pts[0]))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-12 * scale * scale;
    let straight: Vec<bool> = (0..n)
        .map(|i| orient(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]).abs() <= eps)
        .collect();
    if n == 3 || (n == 4 && !straight.iter().any(|&s| s) && signed_area(&pts) > 0.0 && is_convexish(&pts)) {
        return Ok(vec![Cell::from_slice(polygon).unwrap()]);
    }
    let mut starts: Vec<usize> = (0..n).filter(|&i| straight[i]).collect();
    starts.extend((0..n).filter(|&i| !straight[i]));
    for k in starts {
        let fan: Vec<[usize; 3]> = (1..n - 1)
            .map(|i| [k, (k + i) % n, (k + i + 1) % n])
            .collect();
        if fan
            .iter()
            .all(|tri| orient(pts[tri[0]], pts[tri[1]], pts[tri[2]]) > eps)
        {
            return Ok(fan
                .into_iter()
                .map(|tri| Cell::Triangle(tri.map(|i| polygon[i])))
                .collect());
        }
    }
    Err(Error::Topology(format!(
        "could not subdivide refined cell {polygon:?}"
    )))
}

fn is_convexish(pts: &[Point]) -> bool {
    let n = pts.len();
    (0..n).all(|i| orient(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{solve_dirichlet, DirichletSpec};

    #[test]
    fn series_split_doubles_conductance() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        let c = PLComplex::from_cells(pts, vec![Cell::Triangle([0, 1, 2])], 1.0, vec![]).unwrap();
        let f = ScalarField::new(vec![1.0, 0.0, 1.0]);
        let r = refine_levels(&c, &f, &[0.5]).unwrap();
        assert_eq!(r.complex.vertex_count(), 5);
        let x = 3;
        assert_eq!(r.complex.conductance(0, x), Some(2.0));
        assert_eq!(r.complex.conductance(1, x), Some(2.0));
        assert_eq!(r.level_arcs.len(), 1);
    }

    #[test]
    fn refined_square_grid_keeps_solution() {
        let mut pts = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                pts.push(Point::new(i as f64, j as f64 + 0.1 * i as f64));
            }
        }
        let mut cells = Vec::new();
        for j in 0..2 {
            for i in 0..2 {
                let a = j * 3 + i;
                cells.push(Cell::Triangle([a, a + 1, a + 4]));
                cells.push(Cell::Triangle([a, a + 4, a + 3]));
            }
        }
        let c = PLComplex::from_cells(pts, cells, 1.0, vec![]).unwrap();
        let net = c.network().unwrap();
        let spec = DirichletSpec::new(vec![0, 1, 2, 3], 1.0, vec![vec![6, 7, 8, 5]]);
        let g = solve_dirichlet(&net, &spec).unwrap();
        let r = refine_levels(&c, &g, &[0.3, 0.55, 0.8]).unwrap();
        let rnet = r.complex.network().unwrap();
        let g2 = solve_dirichlet(&rnet, &spec).unwrap();
        assert!(g2.max_abs_diff(&r.field) < 1e-12);
        assert!((r.complex.area() - c.area()).abs() < 1e-12);
    }
}
