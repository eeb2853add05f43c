use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::level::ValueOrder;
use crate::complex::{EdgeKey, PLComplex};
use crate::error::{Error, Result};
use crate::network::{BoundaryComponent, ScalarField, VertexId};

/// A monotone path in the 1-skeleton from the outer to the inner boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slit {
    pub path: Vec<VertexId>,
}

impl Slit {
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.path.windows(2).map(|w| EdgeKey::new(w[0], w[1]))
    }
}

/// The annulus cut open along a slit. The base copy of the slit keeps the
/// original vertex ids; top copies are appended. Arcs are listed with the base
/// end first; the outer and inner arcs run counterclockwise around the annulus.
#[derive(Debug, Clone)]
pub struct SlitQuadrilateral {
    /// The annulus before cutting.
    pub annulus: PLComplex,
    pub complex: PLComplex,
    /// The annulus field carried to the cut complex.
    pub field: ScalarField,
    /// Annulus vertex each cut vertex was copied from.
    pub origin: Vec<VertexId>,
    pub slit: Slit,
    pub base: Vec<VertexId>,
    pub top: Vec<VertexId>,
    pub outer: Vec<VertexId>,
    pub inner: Vec<VertexId>,
}

impl SlitQuadrilateral {
    /// Base and top ends on the outer boundary, then on the inner boundary.
    pub fn corners(&self) -> [VertexId; 4] {
        [
            self.base[0],
            self.top[0],
            *self.base.last().unwrap(),
            *self.top.last().unwrap(),
        ]
    }

    /// `(base, top)` twin pairs along the slit.
    pub fn twins(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.base.iter().copied().zip(self.top.iter().copied())
    }
}

fn components(complex: &PLComplex) -> Result<(&BoundaryComponent, &BoundaryComponent)> {
    match complex.boundary_components() {
        [outer, inner] => Ok((outer, inner)),
        other => Err(Error::InvalidSlit(format!(
            "an annulus has two boundary components, found {}",
            other.len()
        ))),
    }
}

fn network_neighbors(complex: &PLComplex, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
    complex
        .neighbors(v)
        .iter()
        .copied()
        .filter(move |&w| complex.conductance(v, w).unwrap_or(0.0) > 0.0)
}

/// Steepest descent from the outer-boundary vertex of largest degree, ties
/// broken by the smallest vertex id.
pub fn find_slit(complex: &PLComplex, field: &ScalarField, order: ValueOrder) -> Result<Slit> {
    let (outer, inner) = components(complex)?;
    let outer_set: HashSet<VertexId> = outer.vertices.iter().copied().collect();
    let inner_set: HashSet<VertexId> = inner.vertices.iter().copied().collect();
    let start = outer
        .vertices
        .iter()
        .copied()
        .max_by(|&a, &b| {
            let da = network_neighbors(complex, a).count();
            let db = network_neighbors(complex, b).count();
            da.cmp(&db).then(b.cmp(&a))
        })
        .ok_or_else(|| Error::InvalidSlit("outer boundary is empty".into()))?;
    let mut path = vec![start];
    let mut cur = start;
    while !inner_set.contains(&cur) {
        let here = complex.position(cur);
        let next = network_neighbors(complex, cur)
            .filter(|&w| !outer_set.contains(&w) && order.is_below(field, w, cur))
            .map(|w| {
                let slope = (field[cur] - field[w]) / here.distance(complex.position(w));
                (slope, w)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, w)| w)
            .ok_or_else(|| {
                Error::InvalidSlit(format!("no lower neighbor to descend to from vertex {cur}"))
            })?;
        path.push(next);
        cur = next;
    }
    validate_slit(complex, field, &path, order)
}

/// Check that `path` is a simple monotone decreasing 1-skeleton path from the
/// outer to the inner boundary whose interior avoids the boundary.
pub fn validate_slit(
    complex: &PLComplex,
    field: &ScalarField,
    path: &[VertexId],
    order: ValueOrder,
) -> Result<Slit> {
    let (outer, inner) = components(complex)?;
    if path.len() < 2 {
        return Err(Error::InvalidSlit("a slit needs at least one edge".into()));
    }
    if let Some(&v) = path.iter().find(|&&v| v >= complex.vertex_count()) {
        return Err(Error::UnknownVertex(v));
    }
    if !outer.vertices.contains(&path[0]) {
        return Err(Error::InvalidSlit(format!(
            "vertex {} is not on the outer boundary",
            path[0]
        )));
    }
    let last = *path.last().unwrap();
    if !inner.vertices.contains(&last) {
        return Err(Error::InvalidSlit(format!(
            "vertex {last} is not on the inner boundary"
        )));
    }
    let mut seen = HashSet::new();
    if let Some(&v) = path.iter().find(|&&v| !seen.insert(v)) {
        return Err(Error::InvalidSlit(format!("vertex {v} is visited twice")));
    }
    let on_boundary: HashSet<VertexId> = outer
        .vertices
        .iter()
        .chain(&inner.vertices)
        .copied()
        .collect();
    if let Some(&v) = path[1..path.len() - 1]
        .iter()
        .find(|&&v| on_boundary.contains(&v))
    {
        return Err(Error::InvalidSlit(format!(
            "interior slit vertex {v} lies on the boundary"
        )));
    }
    for w in path.windows(2) {
        if complex.conductance(w[0], w[1]).unwrap_or(0.0) <= 0.0 {
            return Err(Error::InvalidSlit(format!(
                "({}, {}) is not an edge of the network",
                w[0], w[1]
            )));
        }
        if !order.is_below(field, w[1], w[0]) {
            return Err(Error::InvalidSlit(format!(
                "values do not decrease from {} to {}",
                w[0], w[1]
            )));
        }
    }
    Ok(Slit {
        path: path.to_vec(),
    })
}

/// Cut the annulus open along `slit` into a topological disk.
pub fn cut_along_slit(
    complex: &PLComplex,
    field: &ScalarField,
    slit: &Slit,
) -> Result<SlitQuadrilateral> {
    let path = &slit.path;
    let n = path.len() - 1;
    let cut: BTreeSet<EdgeKey> = slit.edges().collect();
    if cut.len() != n {
        return Err(Error::InvalidSlit("slit is not simple".into()));
    }
    // Cell on the right of the directed slit edge at each slit vertex.
    let right_cell = |i: usize| -> Option<usize> {
        let (a, b) = if i < n {
            (path[i], path[i + 1])
        } else {
            (path[n - 1], path[n])
        };
        complex
            .cells_of_edge(EdgeKey::new(a, b))
            .iter()
            .copied()
            .find(|&ci| complex.cell(ci).directed_edges().any(|e| e == (b, a)))
    };
    let mut base_cell = std::collections::HashMap::new();
    for i in 0..=n {
        let ci = right_cell(i).ok_or_else(|| {
            Error::InvalidSlit(format!("slit edge at vertex {} has no cell on its right", path[i]))
        })?;
        base_cell.insert(path[i], ci);
    }
    let mut split_error = None;
    let out = complex.split_along(&cut, |v, groups| match base_cell.get(&v) {
        None => 0,
        Some(ci) => {
            if groups.len() != 2 {
                split_error = Some(v);
            }
            groups.iter().position(|g| g.contains(ci)).unwrap_or(0)
        }
    })?;
    if let Some(v) = split_error {
        return Err(Error::InvalidSlit(format!(
            "slit vertex {v} does not separate into exactly two sides"
        )));
    }
    let twin_of = |v: VertexId| -> Result<VertexId> {
        out.origin
            .iter()
            .enumerate()
            .skip(complex.vertex_count())
            .find(|&(_, &o)| o == v)
            .map(|(id, _)| id)
            .ok_or_else(|| Error::InvalidSlit(format!("slit vertex {v} was not duplicated")))
    };
    let base: Vec<VertexId> = path.clone();
    let top: Vec<VertexId> = path.iter().map(|&v| twin_of(v)).collect::<Result<_>>()?;

    let cycles = out.complex.boundary_cycles()?;
    let [cycle] = cycles.as_slice() else {
        return Err(Error::InvalidSlit(format!(
            "cut complex has {} boundary cycles instead of one",
            cycles.len()
        )));
    };
    let start = cycle
        .iter()
        .position(|&v| v == base[0])
        .ok_or_else(|| Error::InvalidSlit("outer base corner missing from boundary".into()))?;
    let mut ring = cycle.clone();
    ring.rotate_left(start);
    let pos = |v: VertexId| ring.iter().position(|&w| w == v);
    let (Some(p_top_outer), Some(p_top_inner), Some(p_base_inner)) =
        (pos(top[0]), pos(top[n]), pos(base[n]))
    else {
        return Err(Error::InvalidSlit("slit corners missing from boundary".into()));
    };
    if !(p_top_outer < p_top_inner && p_top_inner < p_base_inner) {
        return Err(Error::InvalidSlit(
            "boundary of the cut complex is not ordered outer, top, inner, base".into(),
        ));
    }
    let outer: Vec<VertexId> = ring[..=p_top_outer].to_vec();
    let mut inner: Vec<VertexId> = ring[p_top_inner..=p_base_inner].to_vec();
    inner.reverse();
    let top_arc: Vec<VertexId> = ring[p_top_outer..=p_top_inner].to_vec();
    if top_arc != top {
        return Err(Error::InvalidSlit("top copy of the slit is not a boundary arc".into()));
    }

    let values: Vec<f64> = out.origin.iter().map(|&o| field[o]).collect();
    let complex_before = complex.clone();
    let complex = out.complex.with_boundary(vec![BoundaryComponent {
        name: "boundary".into(),
        vertices: ring,
    }]);
    Ok(SlitQuadrilateral {
        annulus: complex_before,
        complex,
        field: ScalarField::new(values),
        origin: out.origin,
        slit: slit.clone(),
        base,
        top,
        outer,
        inner,
    })
}
