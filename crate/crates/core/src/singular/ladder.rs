use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::{split_domain, DomainPiece, SingularAnnulus};
use super::{maximal_singular_curve, VertexIndex};
use crate::complex::{EdgeKey, PLComplex};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mapper::Cylinder;
use crate::metrics::PairFluxWeight;
use crate::network::{solve_dirichlet, DirichletSpec, ScalarField, VertexId};
use crate::pipeline::{
    uniformize_annulus, uniformize_harmonic, AnnulusUniformization, Check, PipelineOptions,
};

/// Relative tolerance on glued boundary lengths.
pub const GLUING_TOLERANCE: f64 = 1e-9;

/// Cone angle at a point where `incident` cylinders meet: `2·incident·π`.
pub fn cone_angle(incident: usize) -> f64 {
    2.0 * incident as f64 * PI
}

/// A uniformized singular annulus: the annulus pipeline on the lift, with the
/// images of the lifted tangency copies on the inner circle.
#[derive(Debug, Clone)]
pub struct GeneralizedCylinder {
    pub uniformization: AnnulusUniformization,
    /// Field value on the singular boundary.
    pub low: f64,
    /// Angles on the inner circle of the copies in each label group.
    pub singular_angles: Vec<Vec<f64>>,
    /// Total variation of `h` along the inner arcs bordering each lobe.
    pub arc_variation: Vec<f64>,
}

/// Run the annulus stages on the lifted annulus and mark its singular set.
pub fn uniformize_singular_annulus(
    sa: &SingularAnnulus,
    lobes: usize,
    options: &PipelineOptions,
) -> Result<GeneralizedCylinder> {
    let piece = &sa.piece;
    let out = uniformize_harmonic(&piece.complex, &piece.g, options)?;
    let low = piece.spec.low_value;
    let q = &out.quad;
    let scale = TAU / out.period;
    let mut singular_angles = Vec::with_capacity(sa.labels.len());
    for group in &sa.labels {
        let mut angles = Vec::with_capacity(group.len());
        for &copy in group {
            let at = q
                .inner
                .iter()
                .find(|&&w| q.origin[w] == copy)
                .ok_or_else(|| Error::Gluing(format!("lifted copy {copy} is not on the inner arc")))?;
            angles.push((scale * out.h[*at]).rem_euclid(TAU));
        }
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[1] - w[0] <= 0.0) {
            return Err(Error::Gluing("lifted copies of a tangency share an angle".into()));
        }
        singular_angles.push(angles);
    }
    let mut arc_variation = vec![0.0; lobes];
    for w in q.inner.windows(2) {
        let key = EdgeKey::new(q.origin[w[0]], q.origin[w[1]]);
        let lobe = *sa
            .arc_owner
            .get(&key)
            .ok_or_else(|| Error::Gluing(format!("inner edge ({}, {}) has no lobe", key.0, key.1)))?;
        let slot = arc_variation
            .get_mut(lobe)
            .ok_or_else(|| Error::Gluing(format!("lobe {lobe} out of range")))?;
        *slot += (out.h[w[1]] - out.h[w[0]]).abs();
    }
    Ok(GeneralizedCylinder {
        uniformization: out,
        low,
        singular_angles,
        arc_variation,
    })
}

/// Summary of one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub value: f64,
    pub depth: usize,
    pub candidates: usize,
    pub circles: usize,
    pub tangencies: Vec<Tangency>,
    pub singular_vertices: Vec<(VertexId, VertexIndex)>,
    pub pieces: usize,
    pub restriction_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangency {
    pub vertex: VertexId,
    pub position: Point,
    pub circles: usize,
}

/// The splitting tree with every leaf uniformized.
#[derive(Debug, Clone)]
pub enum SplitTree {
    Annulus {
        uniformization: Box<AnnulusUniformization>,
        low: f64,
        high: f64,
        hole: String,
    },
    Split {
        record: SplitRecord,
        exterior: Box<GeneralizedCylinder>,
        high: f64,
        children: Vec<SplitTree>,
    },
}

fn grow(piece: DomainPiece, depth: usize, options: &PipelineOptions) -> Result<SplitTree> {
    let comps = piece.complex.boundary_components();
    let low = piece.spec.low_value;
    let high = piece.spec.high_value;
    if comps.len() == 2 {
        let hole = comps[1].name.clone();
        let out = uniformize_harmonic(&piece.complex, &piece.g, options)?;
        return Ok(SplitTree::Annulus {
            uniformization: Box::new(out),
            low,
            high,
            hole,
        });
    }
    let maximal = maximal_singular_curve(&piece.complex, &piece.g)?;
    let step = split_domain(&piece.complex, &piece.g, &maximal)?;
    let lobes = step.lobes.len();
    let restriction_error = std::iter::once(&step.exterior.piece)
        .chain(&step.lobes)
        .map(|p| p.restriction_error)
        .fold(0.0, f64::max);
    let record = SplitRecord {
        value: step.value,
        depth,
        candidates: maximal.candidates,
        circles: maximal.bouquet.circles.len(),
        tangencies: maximal
            .bouquet
            .tangencies
            .iter()
            .map(|&(vertex, circles)| Tangency {
                vertex,
                position: piece.complex.position(vertex),
                circles,
            })
            .collect(),
        singular_vertices: maximal.singular_vertices.clone(),
        pieces: lobes + 1,
        restriction_error,
    };
    let exterior = uniformize_singular_annulus(&step.exterior, lobes, options)?;
    let children = step
        .lobes
        .into_par_iter()
        .map(|lobe| grow(lobe, depth + 1, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(SplitTree::Split {
        record,
        exterior: Box::new(exterior),
        high,
        children,
    })
}

/// Split `complex` recursively under the field `g` until every piece is an
/// annulus or a singular annulus, and uniformize each piece.
pub fn build_split_tree(complex: &PLComplex, g: &ScalarField, options: &PipelineOptions) -> Result<SplitTree> {
    let comps = complex.boundary_components();
    if comps.len() < 2 {
        return Err(Error::NotMultiplyConnected(comps.len()));
    }
    let high = g[comps[0].vertices[0]];
    let low = g[comps[1].vertices[0]];
    let spec = DirichletSpec::new(
        comps[0].vertices.clone(),
        high,
        comps[1..].iter().map(|c| c.vertices.clone()).collect(),
    )
    .with_low_value(low);
    let piece = DomainPiece {
        complex: complex.clone(),
        g: g.clone(),
        spec,
        parent: (0..complex.vertex_count()).collect(),
        restriction_error: 0.0,
    };
    grow(piece, 0, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    Cylinder,
    GeneralizedCylinder,
}

/// One cylinder of the ladder, scaled so that it fits its parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderPiece {
    pub kind: PieceKind,
    pub depth: usize,
    /// Parent piece and the lobe slot of the parent this piece is glued into.
    pub parent: Option<(usize, usize)>,
    pub low: f64,
    pub high: f64,
    pub period: f64,
    pub scale: f64,
    /// Scaled pair-flux length of the outer circle.
    pub outer_length: f64,
    /// Scaled pair-flux lengths of the inner circle, one per lobe for a
    /// generalized cylinder.
    pub inner_lengths: Vec<f64>,
    pub cylinder: Cylinder,
    pub singular_angles: Vec<Vec<f64>>,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub parent: usize,
    pub child: usize,
    pub lobe: usize,
    /// Length of the parent's inner arc, measured edge by edge.
    pub parent_length: f64,
    /// Length of the child's outer circle after scaling, measured edge by edge.
    pub child_length: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub position: Point,
    pub depth: usize,
    pub incident: usize,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderBoundary {
    pub name: String,
    pub piece: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PantsLadder {
    pub pieces: Vec<LadderPiece>,
    pub gluings: Vec<Gluing>,
    pub boundaries: Vec<LadderBoundary>,
    pub cone_points: Vec<ConePoint>,
    pub splits: Vec<SplitRecord>,
}

impl PantsLadder {
    pub fn max_gluing_error(&self) -> f64 {
        self.gluings.iter().map(|g| g.relative_error).fold(0.0, f64::max)
    }
}

/// Sum of pair-flux edge weights along consecutive values of `h` at level `m`.
fn edge_length(w: &PairFluxWeight, m: f64, h_values: &[f64]) -> f64 {
    h_values.windows(2).map(|e| w.edge_weight(m, e[1] - e[0])).sum()
}

/// `h` along the outer arc of a uniformized annulus, in arc order.
fn outer_h(out: &AnnulusUniformization) -> Vec<f64> {
    out.quad.outer.iter().map(|&v| out.h[v]).collect()
}

fn uniformization_of(tree: &SplitTree) -> &AnnulusUniformization {
    match tree {
        SplitTree::Annulus { uniformization, .. } => uniformization,
        SplitTree::Split { exterior, .. } => &exterior.uniformization,
    }
}

/// Uniformized pieces in the order [`assemble_ladder`] numbers them.
pub fn flatten(tree: &SplitTree) -> Vec<&AnnulusUniformization> {
    fn walk<'a>(t: &'a SplitTree, out: &mut Vec<&'a AnnulusUniformization>) {
        out.push(uniformization_of(t));
        if let SplitTree::Split { children, .. } = t {
            for c in children {
                walk(c, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(tree, &mut out);
    out
}

fn high_of(tree: &SplitTree) -> f64 {
    match tree {
        SplitTree::Annulus { high, .. } | SplitTree::Split { high, .. } => *high,
    }
}

/// Glue the pieces bottom-up: every child is scaled so that its outer
/// circle has the length of the parent arc it is attached to. Lengths are
/// pair-flux lengths taken with the unshifted field values.
pub fn assemble_ladder(tree: &SplitTree, outer_name: &str) -> Result<PantsLadder> {
    let mut ladder = PantsLadder {
        pieces: Vec::new(),
        gluings: Vec::new(),
        boundaries: Vec::new(),
        cone_points: Vec::new(),
        splits: Vec::new(),
    };
    let root = place(tree, None, 1.0, 0, &mut ladder)?;
    ladder.boundaries.insert(
        0,
        LadderBoundary {
            name: outer_name.to_owned(),
            piece: root,
            length: ladder.pieces[root].outer_length,
        },
    );
    let worst = ladder.max_gluing_error();
    if worst > GLUING_TOLERANCE {
        return Err(Error::Gluing(format!(
            "glued lengths differ by {worst:e} relative, above {GLUING_TOLERANCE:e}"
        )));
    }
    Ok(ladder)
}

fn place(
    tree: &SplitTree,
    parent: Option<(usize, usize)>,
    scale: f64,
    depth: usize,
    ladder: &mut PantsLadder,
) -> Result<usize> {
    let out = uniformization_of(tree);
    let high = high_of(tree);
    let w = PairFluxWeight::new(out.period)?;
    let outer_length = scale * TAU * w.radius(high);
    let index = ladder.pieces.len();
    match tree {
        SplitTree::Annulus { low, hole, .. } => {
            let inner = scale * TAU * w.radius(*low);
            ladder.pieces.push(LadderPiece {
                kind: PieceKind::Cylinder,
                depth,
                parent,
                low: *low,
                high,
                period: out.period,
                scale,
                outer_length,
                inner_lengths: vec![inner],
                cylinder: out.cylinder,
                singular_angles: Vec::new(),
                cells: out.net.cell_count(),
            });
            ladder.boundaries.push(LadderBoundary {
                name: hole.clone(),
                piece: index,
                length: inner,
            });
        }
        SplitTree::Split {
            record,
            exterior,
            children,
            ..
        } => {
            let arcs: Vec<f64> = exterior
                .arc_variation
                .iter()
                .map(|dh| scale * w.edge_weight(exterior.low, *dh))
                .collect();
            ladder.pieces.push(LadderPiece {
                kind: PieceKind::GeneralizedCylinder,
                depth,
                parent,
                low: exterior.low,
                high,
                period: out.period,
                scale,
                outer_length,
                inner_lengths: arcs.clone(),
                cylinder: out.cylinder,
                singular_angles: exterior.singular_angles.clone(),
                cells: out.net.cell_count(),
            });
            ladder.splits.push(record.clone());
            for t in &record.tangencies {
                let incident = t.circles + 1;
                ladder.cone_points.push(ConePoint {
                    position: t.position,
                    depth,
                    incident,
                    angle: cone_angle(incident),
                });
            }
            if children.len() != arcs.len() {
                return Err(Error::Gluing(format!(
                    "{} inner arcs for {} children",
                    arcs.len(),
                    children.len()
                )));
            }
            for (lobe, (child, &arc)) in children.iter().zip(&arcs).enumerate() {
                let child_out = uniformization_of(child);
                let cw = PairFluxWeight::new(child_out.period)?;
                let child_high = high_of(child);
                let child_scale = arc / (TAU * cw.radius(child_high));
                let ci = place(child, Some((index, lobe)), child_scale, depth + 1, ladder)?;
                let measured = child_scale * edge_length(&cw, child_high, &outer_h(child_out));
                ladder.gluings.push(Gluing {
                    parent: index,
                    child: ci,
                    lobe,
                    parent_length: arc,
                    child_length: measured,
                    relative_error: (measured - arc).abs() / arc,
                });
            }
        }
    }
    Ok(index)
}

/// The full uniformization of a multiply connected domain.
#[derive(Debug, Clone)]
pub struct SingularUniformization {
    pub g: ScalarField,
    pub tree: SplitTree,
    pub ladder: PantsLadder,
    pub checks: Vec<Check>,
}

impl SingularUniformization {
    /// Every uniformized piece in ladder order.
    pub fn pieces(&self) -> Vec<&AnnulusUniformization> {
        flatten(&self.tree)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, residual: f64, bound: f64, detail: String) -> Check {
    Check {
        name: name.to_owned(),
        passed: residual <= bound,
        residual,
        bound,
        detail: Some(detail),
    }
}

/// Solve the standard problem on `complex` (`k` on the outer cycle, zero on
/// the others), split, uniformize every piece and assemble the ladder.
pub fn uniformize_domain(complex: &PLComplex, k: f64, options: &PipelineOptions) -> Result<SingularUniformization> {
    let comps = complex.boundary_components();
    let m = comps.len();
    let (g, tree) = if m == 2 {
        let out = uniformize_annulus(complex, k, options)?;
        let g = out.g.clone();
        let tree = SplitTree::Annulus {
            uniformization: Box::new(out),
            low: 0.0,
            high: k,
            hole: comps[1].name.clone(),
        };
        (g, tree)
    } else {
        let spec = DirichletSpec::new(
            comps[0].vertices.clone(),
            k,
            comps[1..].iter().map(|c| c.vertices.clone()).collect(),
        );
        let g = solve_dirichlet(&complex.network()?, &spec)?;
        let tree = build_split_tree(complex, &g, options)?;
        (g, tree)
    };
    let ladder = assemble_ladder(&tree, &comps[0].name)?;

    let mut checks = Vec::new();
    let extra = ladder.splits.iter().map(|s| s.candidates.abs_diff(1)).sum::<usize>();
    checks.push(check(
        "maximal_curve_unique",
        extra as f64,
        0.0,
        format!("{} splits", ladder.splits.len()),
    ));
    let restriction = ladder.splits.iter().map(|s| s.restriction_error).fold(0.0, f64::max);
    checks.push(check(
        "restriction_solves_pieces",
        restriction,
        1e-10 * k.abs().max(1.0),
        "largest difference between the restricted field and the induced solve".into(),
    ));
    let uniformized = flatten(&tree);
    let not_annuli = uniformized
        .iter()
        .filter(|u| u.annulus.boundary_components().len() != 2)
        .count();
    checks.push(check(
        "pieces_are_annuli",
        not_annuli as f64,
        0.0,
        format!("{} pieces", uniformized.len()),
    ));
    checks.push(check(
        "glued_lengths",
        ladder.max_gluing_error(),
        GLUING_TOLERANCE,
        format!("{} gluings", ladder.gluings.len()),
    ));
    let cone_residual = ladder
        .cone_points
        .iter()
        .map(|c| (c.angle - 2.0 * c.incident as f64 * PI).abs() + if c.incident >= 3 { 0.0 } else { 1.0 })
        .fold(0.0, f64::max);
    checks.push(check(
        "cone_angles",
        cone_residual,
        0.0,
        format!("{} cone points", ladder.cone_points.len()),
    ));
    let labels_ok = ladder
        .pieces
        .iter()
        .filter(|p| p.kind == PieceKind::GeneralizedCylinder)
        .flat_map(|p| &p.singular_angles)
        .filter(|group| group.len() < 2)
        .count();
    checks.push(check(
        "singular_set_identified",
        labels_ok as f64,
        0.0,
        "every tangency has at least two marked copies on its inner circle".into(),
    ));
    checks.push(check(
        "ladder_boundaries",
        ladder.boundaries.len().abs_diff(m) as f64,
        0.0,
        format!("{} boundary components for a {m}-connected domain", ladder.boundaries.len()),
    ));
    for (i, u) in uniformized.iter().enumerate() {
        for c in &u.checks {
            let mut c = c.clone();
            c.name = format!("piece {i}: {}", c.name);
            checks.push(c);
        }
    }
    Ok(SingularUniformization {
        g,
        tree,
        ladder,
        checks,
    })
}
