use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    let scale = m.max_abs();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .expect("non-empty range");
        let pv = a[(pivot, col)];
        if pv.norm() <= f64::EPSILON * scale * n as f64 || scale == 0.0 {
            return Err(Error::Singular(pv.norm() / scale.max(f64::MIN_POSITIVE)));
        }
        if pivot != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(pivot, j)];
                inv[(pivot, j)] = t;
            }
        }
        let recip = C64::new(1.0, 0.0) / pv;
        for j in 0..n {
            a[(col, j)] *= recip;
            inv[(col, j)] *= recip;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = a[(i, col)];
            if factor.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let av = a[(col, j)];
                let iv = inv[(col, j)];
                a[(i, j)] -= factor * av;
                inv[(i, j)] -= factor * iv;
            }
        }
    }
    Ok(inv)
}

/// Orthonormal basis for the column span via twice-applied modified Gram-Schmidt.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols > rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot orthonormalize {cols} columns in dimension {rows}"
        )));
    }
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.column(j);
        let original = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..2 {
            for b in &q {
                let dot: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-10 * original.max(f64::MIN_POSITIVE) {
            return Err(Error::Singular(norm));
        }
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}

/// Extends orthonormal columns `u` (n x r) to an n x n unitary by
/// Gram-Schmidt over the standard basis.
pub fn complete_to_unitary(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.rows();
    let mut basis: Vec<Vec<C64>> = (0..u.cols()).map(|j| u.column(j)).collect();
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let dot: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| basis[j][i])
}
