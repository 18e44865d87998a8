//! Cyclic complex Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real 2x2 Jacobi rotation. The product
//! of all rotations accumulates into the eigenvector matrix.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

/// Maximum number of cyclic sweeps before giving up.
pub const MAX_SWEEPS: usize = 30;

/// Ascending eigenvalues and the matching orthonormal eigenvectors (as columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Which end of the spectrum a partial sum is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Smallest,
    Largest,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in nonincreasing order.
    pub fn descending(&self) -> Vec<f64> {
        self.eigenvalues.iter().rev().copied().collect()
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        HermitianMatrix::from_spectral(&self.vectors, &self.eigenvalues)
    }

    /// Sum of the `k` smallest or largest eigenvalues.
    pub fn extremal_sum(&self, k: usize, side: Side) -> Result<f64> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange(format!("k = {k} outside 1..={n}")));
        }
        Ok(match side {
            Side::Smallest => self.eigenvalues[..k].iter().sum(),
            Side::Largest => self.eigenvalues[n - k..].iter().sum(),
        })
    }

    /// Eigenvectors of the `k` smallest eigenvalues as an `n x k` isometry.
    pub fn bottom_vectors(&self, k: usize) -> ComplexMatrix {
        let cols: Vec<usize> = (0..k).collect();
        self.vectors.select_columns(&cols)
    }

    /// Eigenvectors of the `k` largest eigenvalues, largest first.
    pub fn top_vectors(&self, k: usize) -> ComplexMatrix {
        let n = self.dim();
        let cols: Vec<usize> = (0..k).map(|i| n - 1 - i).collect();
        self.vectors.select_columns(&cols)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn eig_hermitian(matrix: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = matrix.dim();
    let mut a = matrix.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();

    let mut converged = n == 1 || norm == 0.0;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps: MAX_SWEEPS,
                off_norm: off_diagonal_norm(&a),
            });
        }
        let off = off_diagonal_norm(&a);
        if off <= 1e-3 * f64::EPSILON * norm {
            break;
        }
        let mut rotations = 0usize;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // After a few sweeps, pivots below the diagonal's resolution are dropped.
                if sweep > 3
                    && app.abs() + 100.0 * r == app.abs()
                    && aqq.abs() + 100.0 * r == aqq.abs()
                {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotations += 1;
                rotate(&mut a, &mut v, p, q, apq, r, app, aqq);
            }
        }
        sweep += 1;
        if rotations == 0 {
            converged = true;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.select_columns(&order);
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    apq: C64,
    r: f64,
    app: f64,
    aqq: f64,
) {
    let n = a.rows();
    let phase = (apq / r).conj();
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = diag(1, phase) * [[c, s], [-s, c]] restricted to (p, q).
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = phase * (-s);
    let jqq = phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * r, 0.0);
    a[(q, q)] = C64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// `Σ_{i≤k} λ↑_i(A)` or `Σ_{i≤k} λ↓_i(A)`.
pub fn sum_extremal_eigs(a: &HermitianMatrix, k: usize, side: Side) -> Result<f64> {
    eig_hermitian(a)?.extremal_sum(k, side)
}
