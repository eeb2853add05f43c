use std::collections::{BTreeMap, BTreeSet};

use super::MaximalCurve;
use crate::complex::{EdgeKey, PLComplex};
use crate::error::{Error, Result};
use crate::geometry::signed_area;
use crate::network::{solve_dirichlet, BoundaryComponent, DirichletSpec, ScalarField, VertexId};
use crate::plgeom::{refine_levels, LEVEL_TOLERANCE};

/// A component of the complement of a level, with the restriction of the
/// field and the Dirichlet problem it solves. The first boundary component
/// carries the larger value.
#[derive(Debug, Clone)]
pub struct DomainPiece {
    pub complex: PLComplex,
    pub g: ScalarField,
    pub spec: DirichletSpec,
    /// Id of each vertex in the refined parent complex.
    pub parent: Vec<VertexId>,
    /// Largest difference between the restricted field and a fresh solve of `spec`.
    pub restriction_error: f64,
}

impl DomainPiece {
    pub fn connectivity(&self) -> usize {
        self.complex.boundary_components().len()
    }
}

/// An annulus whose inner cycle is labeled: the copies in each label group
/// are identified by the quotient onto the singular boundary.
#[derive(Debug, Clone)]
pub struct SingularAnnulus {
    pub piece: DomainPiece,
    /// Lifted copies of each tangency vertex.
    pub labels: Vec<Vec<VertexId>>,
    /// The tangency vertex, in refined parent ids, of each label group.
    pub tangencies: Vec<VertexId>,
    /// Lobe bordered by each edge of the inner cycle.
    pub arc_owner: BTreeMap<EdgeKey, usize>,
}

/// One application of the splitting scheme.
#[derive(Debug, Clone)]
pub struct SplitStep {
    pub value: f64,
    pub maximal: MaximalCurve,
    /// The parent complex with the level made into edges.
    pub refined: PLComplex,
    pub exterior: SingularAnnulus,
    pub lobes: Vec<DomainPiece>,
}

/// Refine along the level of `maximal`, cut along it, and set up the
/// induced problems on the pieces. Tangency vertices are duplicated once per
/// incident sector, so the exterior piece is the lifted singular annulus.
pub fn split_domain(complex: &PLComplex, field: &ScalarField, maximal: &MaximalCurve) -> Result<SplitStep> {
    let t = maximal.bouquet.value;
    let refined = refine_levels(complex, field, &[t])?;
    let tol = LEVEL_TOLERANCE * field.range();
    let values = &refined.field;
    let cut: BTreeSet<EdgeKey> = refined.level_arcs.clone();
    let cut_complex = refined.complex.split_along(&cut, |_, _| 0)?;

    let mut boundary_name: BTreeMap<VertexId, (usize, String)> = BTreeMap::new();
    for (i, b) in refined.complex.boundary_components().iter().enumerate() {
        for &v in &b.vertices {
            boundary_name.insert(v, (i, b.name.clone()));
        }
    }

    let mut exterior = None;
    let mut lobes = Vec::new();
    for region in &cut_complex.regions {
        let (sub, local_parent) = cut_complex.complex.extract(region)?;
        let parent: Vec<VertexId> = local_parent.iter().map(|&v| cut_complex.origin[v]).collect();
        let g = ScalarField::new(parent.iter().map(|&v| values[v]).collect());
        let mut level_cycles = Vec::new();
        let mut kept = Vec::new();
        for cycle in sub.boundary_cycles()? {
            if cycle.iter().all(|&v| (g[v] - t).abs() <= tol) {
                level_cycles.push(cycle);
            } else {
                let (index, name) = boundary_name.get(&parent[cycle[0]]).cloned().ok_or_else(|| {
                    Error::Topology(format!(
                        "boundary cycle through vertex {} lies neither on the level nor on the domain boundary",
                        parent[cycle[0]]
                    ))
                })?;
                kept.push((index, name, cycle));
            }
        }
        let [level_cycle] = <[Vec<VertexId>; 1]>::try_from(level_cycles).map_err(|c| {
            Error::Topology(format!("a piece meets the level in {} cycles", c.len()))
        })?;
        kept.sort_by_key(|(index, _, _)| *index);
        let is_exterior = kept.first().is_some_and(|(index, _, _)| *index == 0);
        let ccw = |mut cycle: Vec<VertexId>| {
            let pts: Vec<_> = cycle.iter().map(|&v| sub.position(v)).collect();
            if signed_area(&pts) < 0.0 {
                cycle.reverse();
            }
            cycle
        };
        let level_component = |name: String| BoundaryComponent {
            name,
            vertices: ccw(level_cycle.clone()),
        };
        let piece_boundary: Vec<BoundaryComponent> = if is_exterior {
            if kept.len() != 1 {
                return Err(Error::Topology(format!(
                    "exterior piece has {} boundary cycles off the level",
                    kept.len()
                )));
            }
            let (_, name, cycle) = kept.pop().expect("one cycle");
            vec![
                BoundaryComponent {
                    name,
                    vertices: ccw(cycle),
                },
                level_component(format!("level {t}")),
            ]
        } else {
            if kept.is_empty() {
                return Err(Error::Topology("a piece inside the level has no boundary of its own".into()));
            }
            std::iter::once(level_component(format!("level {t}")))
                .chain(kept.into_iter().map(|(_, name, cycle)| BoundaryComponent {
                    name,
                    vertices: ccw(cycle),
                }))
                .collect()
        };
        let piece_complex = conduct_along_level(&sub, &level_cycle)?.with_boundary(piece_boundary);
        let piece = induced_piece(piece_complex, g, parent)?;
        if is_exterior {
            if exterior.is_some() {
                return Err(Error::Topology("two pieces meet the outer boundary".into()));
            }
            exterior = Some(piece);
        } else {
            lobes.push(piece);
        }
    }
    let exterior = exterior.ok_or_else(|| Error::Topology("no piece meets the outer boundary".into()))?;
    let exterior = label_exterior(exterior, &lobes, maximal)?;
    Ok(SplitStep {
        value: t,
        maximal: maximal.clone(),
        refined: refined.complex,
        exterior,
        lobes,
    })
}

/// Give the zero-conductance arcs of the level cycle the mean positive
/// conductance at their ends. Both ends carry the same Dirichlet value, so the
/// field is unaffected; the arcs matter only for Neumann problems on the piece.
fn conduct_along_level(sub: &PLComplex, cycle: &[VertexId]) -> Result<PLComplex> {
    let mut conductance = sub.conductances().clone();
    let mean_at = |v: VertexId| {
        let (sum, count) = sub
            .neighbors(v)
            .iter()
            .filter_map(|&w| sub.conductance(v, w))
            .filter(|&c| c > 0.0)
            .fold((0.0, 0usize), |(s, n), c| (s + c, n + 1));
        (count > 0).then(|| sum / count as f64)
    };
    for i in 0..cycle.len() {
        let key = EdgeKey::new(cycle[i], cycle[(i + 1) % cycle.len()]);
        if conductance.get(&key) == Some(&0.0) {
            let ends: Vec<f64> = [key.0, key.1].into_iter().filter_map(mean_at).collect();
            if ends.is_empty() {
                return Err(Error::Topology(format!(
                    "level arc ({}, {}) has no conducting neighbor",
                    key.0, key.1
                )));
            }
            conductance.insert(key, ends.iter().sum::<f64>() / ends.len() as f64);
        }
    }
    PLComplex::new(
        sub.positions().to_vec(),
        sub.kinds().to_vec(),
        sub.cells().to_vec(),
        conductance,
        sub.boundary_components().to_vec(),
    )
}

/// The Dirichlet problem the restriction of the field solves on `complex`.
fn induced_piece(complex: PLComplex, g: ScalarField, parent: Vec<VertexId>) -> Result<DomainPiece> {
    let comps = complex.boundary_components();
    let high = g[comps[0].vertices[0]];
    let low = g[comps[1].vertices[0]];
    let spec = DirichletSpec::new(
        comps[0].vertices.clone(),
        high,
        comps[1..].iter().map(|c| c.vertices.clone()).collect(),
    )
    .with_low_value(low);
    let solved = solve_dirichlet(&complex.network()?, &spec)?;
    let restriction_error = solved.max_abs_diff(&g);
    Ok(DomainPiece {
        complex,
        g,
        spec,
        parent,
        restriction_error,
    })
}

fn label_exterior(piece: DomainPiece, lobes: &[DomainPiece], maximal: &MaximalCurve) -> Result<SingularAnnulus> {
    let inner = &piece.complex.boundary_components()[1].vertices;
    let mut labels = Vec::new();
    let mut tangencies = Vec::new();
    for &(v, circles) in &maximal.bouquet.tangencies {
        let copies: Vec<VertexId> = inner.iter().copied().filter(|&w| piece.parent[w] == v).collect();
        if copies.len() != circles {
            return Err(Error::Topology(format!(
                "tangency vertex {v} on {circles} circles has {} lifted copies",
                copies.len()
            )));
        }
        labels.push(copies);
        tangencies.push(v);
    }
    let mut lobe_of_edge: BTreeMap<EdgeKey, usize> = BTreeMap::new();
    for (li, lobe) in lobes.iter().enumerate() {
        let cycle = &lobe.complex.boundary_components()[0].vertices;
        for i in 0..cycle.len() {
            let key = EdgeKey::new(lobe.parent[cycle[i]], lobe.parent[cycle[(i + 1) % cycle.len()]]);
            lobe_of_edge.insert(key, li);
        }
    }
    let mut arc_owner = BTreeMap::new();
    for i in 0..inner.len() {
        let (a, b) = (inner[i], inner[(i + 1) % inner.len()]);
        let key = EdgeKey::new(piece.parent[a], piece.parent[b]);
        let lobe = lobe_of_edge
            .get(&key)
            .ok_or_else(|| Error::Topology(format!("level edge ({}, {}) borders no inner piece", key.0, key.1)))?;
        arc_owner.insert(EdgeKey::new(a, b), *lobe);
    }
    Ok(SingularAnnulus {
        piece,
        labels,
        tangencies,
        arc_owner,
    })
}

