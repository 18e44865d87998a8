use super::eigen::eig_hermitian;
use super::matrix::{hermitize, ComplexMatrix, C64};
use crate::error::Result;

/// Singular values at or below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Compact SVD `P = U diag(sigma) V*` keeping only nonzero singular values.
#[derive(Debug, Clone)]
pub struct CompactSvd {
    pub u: ComplexMatrix,
    /// Strictly positive, nonincreasing.
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl CompactSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self, rows: usize, cols: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rows, cols);
        for (l, &s) in self.sigma.iter().enumerate() {
            for i in 0..rows {
                let ui = self.u[(i, l)] * s;
                for j in 0..cols {
                    out[(i, j)] += ui * self.v[(j, l)].conj();
                }
            }
        }
        out
    }
}

/// Compact SVD through the Hermitian dilation `[[0, P], [P*, 0]]`.
///
/// The dilation has eigenvalues `±σ_i` (plus zeros) and eigenvectors
/// `[u_i; ±v_i] / √2`, so zero singular values come out with absolute error
/// `O(ε‖P‖)` instead of the `O(√ε‖P‖)` a `P*P` route would give.
pub fn compact_svd(p: &ComplexMatrix) -> Result<CompactSvd> {
    let (m, n) = (p.rows(), p.cols());
    let dim = m + n;
    let mut big = ComplexMatrix::zeros(dim, dim);
    for i in 0..m {
        for j in 0..n {
            big[(i, m + j)] = p[(i, j)];
            big[(m + j, i)] = p[(i, j)].conj();
        }
    }
    let eig = eig_hermitian(&hermitize(&big)?)?;
    let top = eig.eigenvalues[dim - 1];
    let mut sigma = Vec::new();
    let mut u_cols: Vec<Vec<C64>> = Vec::new();
    let mut v_cols: Vec<Vec<C64>> = Vec::new();
    if top > 0.0 {
        let cutoff = RANK_TOLERANCE * top;
        for idx in (0..dim).rev() {
            let s = eig.eigenvalues[idx];
            if s <= cutoff || sigma.len() == m.min(n) {
                break;
            }
            let x = eig.vectors.column(idx);
            let u = normalized(&x[..m]);
            let v = normalized(&x[m..]);
            sigma.push(s);
            u_cols.push(u);
            v_cols.push(v);
        }
    }
    let k = sigma.len();
    let u = ComplexMatrix::from_fn(m, k, |i, j| u_cols[j][i]);
    let v = ComplexMatrix::from_fn(n, k, |i, j| v_cols[j][i]);
    Ok(CompactSvd { u, sigma, v })
}

fn normalized(x: &[C64]) -> Vec<C64> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    x.iter().map(|z| z / norm).collect()
}

/// Ratio of smallest to largest singular value over the full (not compact) spectrum.
pub fn inverse_condition(p: &ComplexMatrix) -> Result<f64> {
    let svd = compact_svd(p)?;
    if svd.rank() < p.rows().min(p.cols()) {
        return Ok(0.0);
    }
    Ok(svd.sigma[svd.rank() - 1] / svd.sigma[0])
}
