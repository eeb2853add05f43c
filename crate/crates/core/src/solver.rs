//! Symmetric positive definite sparse solves for reduced Laplacian systems.
//!
//! Systems up to [`DIRECT_LIMIT`] unknowns are factored with a sparse LDLᵀ under a
//! reverse Cuthill-McKee ordering and polished by iterative refinement. Larger
//! systems, or systems whose factorization breaks down, go to Jacobi-preconditioned
//! conjugate gradients.

use sprs::{CsMat, FillInReduction, SymmetryCheck, TriMat};
use sprs_ldl::Ldl;

use crate::error::{Error, Result};

/// Above this many unknowns the direct factorization is skipped.
pub const DIRECT_LIMIT: usize = 60_000;

/// Target relative residual for the iterative paths.
pub const RELATIVE_RESIDUAL: f64 = 1e-12;

const MAX_REFINEMENT_STEPS: usize = 6;

/// A symmetric matrix assembled from `(row, col, value)` triplets. Duplicate
/// entries are summed.
#[derive(Debug, Clone)]
pub struct SpdSystem {
    matrix: CsMat<f64>,
}

impl SpdSystem {
    pub fn from_triplets(size: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut tri = TriMat::with_capacity((size, size), entries.len());
        for &(r, c, v) in entries {
            tri.add_triplet(r, c, v);
        }
        Self {
            matrix: tri.to_csc(),
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (col, col_vec) in self.matrix.outer_iterator().enumerate() {
            let xc = x[col];
            for (row, &v) in col_vec.iter() {
                y[row] += v * xc;
            }
        }
        y
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.size()];
        for (col, col_vec) in self.matrix.outer_iterator().enumerate() {
            for (row, &v) in col_vec.iter() {
                if row == col {
                    d[row] += v;
                }
            }
        }
        d
    }

    fn inf_norm(&self) -> f64 {
        let mut rows = vec![0.0f64; self.size()];
        for col_vec in self.matrix.outer_iterator() {
            for (row, &v) in col_vec.iter() {
                rows[row] += v.abs();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Solve `A x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.size() {
            return Err(Error::Solver(format!(
                "right-hand side has length {}, system has {} unknowns",
                rhs.len(),
                self.size()
            )));
        }
        if self.size() == 0 {
            return Ok(Vec::new());
        }
        if self.size() == 1 {
            let d = self.diagonal()[0];
            if !(d > 0.0) {
                return Err(Error::Solver("1×1 system is not positive definite".into()));
            }
            return Ok(vec![rhs[0] / d]);
        }
        if self.size() <= DIRECT_LIMIT {
            if let Some(x) = self.solve_direct(rhs) {
                return Ok(x);
            }
        }
        self.solve_cg(rhs)
    }

    fn solve_direct(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let factor = Ldl::new()
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .check_symmetry(SymmetryCheck::DontCheckSymmetry)
            .numeric(self.matrix.view())
            .ok()?;
        if factor.d().iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return None;
        }
        let mut x: Vec<f64> = factor.solve(rhs);
        let a_norm = self.inf_norm();
        let b_norm = inf(rhs);
        for _ in 0..MAX_REFINEMENT_STEPS {
            let ax = self.apply(&x);
            let residual: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let scale = a_norm * inf(&x) + b_norm;
            if scale == 0.0 || inf(&residual) <= 1e-15 * scale {
                break;
            }
            let correction: Vec<f64> = factor.solve(&residual[..]);
            x.iter_mut().zip(&correction).for_each(|(xi, ci)| *xi += ci);
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }

    fn solve_cg(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.size();
        let inv_diag: Vec<f64> = self
            .diagonal()
            .into_iter()
            .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        let b_norm = l2(rhs);
        if b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let max_iter = 20 * n + 100;
        for _ in 0..max_iter {
            let ap = self.apply(&p);
            let alpha = rz / dot(&p, &ap);
            x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= alpha * api);
            if l2(&r) <= RELATIVE_RESIDUAL * b_norm {
                return Ok(x);
            }
            z = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        Err(Error::Solver(format!(
            "conjugate gradients did not reach relative residual {RELATIVE_RESIDUAL:e}"
        )))
    }

    /// Force the iterative path, for testing the fallback.
    pub fn solve_iterative(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_cg(rhs)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> SpdSystem {
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, 2.0));
            if i + 1 < n {
                entries.push((i, i + 1, -1.0));
                entries.push((i + 1, i, -1.0));
            }
        }
        SpdSystem::from_triplets(n, &entries)
    }

    #[test]
    fn direct_and_iterative_agree() {
        let sys = path_laplacian(40);
        let rhs: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let a = sys.solve(&rhs).unwrap();
        let b = sys.solve_iterative(&rhs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
        let back = sys.apply(&a);
        for (x, y) in back.iter().zip(&rhs) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_system() {
        let sys = SpdSystem::from_triplets(0, &[]);
        assert!(sys.solve(&[]).unwrap().is_empty());
    }
}
