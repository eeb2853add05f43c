//! Dense Gaussian elimination with partial pivoting on the full Kirchhoff
//! system, independent of the sparse solver.

use uniformize_core::complex::PLComplex;

/// Solve for the unknown values given `prescribed` entries. Every unprescribed
/// vertex satisfies `Σ c(x,y)(u(x) − u(y)) = 0` over all its neighbors.
pub fn dense_solve(n: usize, edges: &[(usize, usize, f64)], prescribed: &[Option<f64>]) -> Vec<f64> {
    let mut a = vec![vec![0.0_f64; n + 1]; n];
    for (i, p) in prescribed.iter().enumerate() {
        if let Some(v) = p {
            a[i][i] = 1.0;
            a[i][n] = *v;
        }
    }
    for &(x, y, c) in edges {
        for (p, q) in [(x, y), (y, x)] {
            if prescribed[p].is_none() {
                a[p][p] += c;
                a[p][q] -= c;
            }
        }
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let d = a[col][col];
        assert!(d.abs() > 1e-300, "singular system");
        for row in 0..n {
            if row != col && a[row][col] != 0.0 {
                let f = a[row][col] / d;
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

pub fn complex_edges(complex: &PLComplex) -> Vec<(usize, usize, f64)> {
    complex
        .conductances()
        .iter()
        .filter(|(_, &c)| c > 0.0)
        .map(|(k, &c)| (k.0, k.1, c))
        .collect()
}
