use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense row-major complex matrix with finite entries.
///
/// Serializes as `{"rows", "cols", "re": [...], "im": [...]}` in row-major
/// order; `im` may be omitted on input.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        let data = match r.im {
            None => r.re.iter().map(|&x| C64::new(x, 0.0)).collect(),
            Some(im) => {
                if im.len() != r.re.len() {
                    return Err(Error::Parse(format!(
                        "re has {} entries but im has {}",
                        r.re.len(),
                        im.len()
                    )));
                }
                r.re.iter()
                    .zip(&im)
                    .map(|(&a, &b)| C64::new(a, b))
                    .collect()
            }
        };
        ComplexMatrix::new(r.rows, r.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: Some(m.data.iter().map(|z| z.im).collect()),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                got: data.len(),
            });
        }
        if let Some(idx) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from an entry generator. Caller guarantees finiteness.
    pub(crate) fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> C64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * rhs` for operands whose shapes are known to agree.
    pub(crate) fn mul(&self, rhs: &Self) -> Self {
        self.matmul(rhs).expect("matrix shapes agree")
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Matrix made of the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// `‖self* self − I‖_F`.
    pub fn isometry_residual(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        gram.sub(&Self::identity(self.cols))
            .expect("gram matrix is square")
            .frobenius_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Square complex matrix with exact conjugate symmetry and a real diagonal.
///
/// Deserialization hermitizes the input; it must be square.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for HermitianMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        hermitize(&m)
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.inner
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.inner)
    }
}

/// Returns `(M + M*) / 2`. Hermitian input comes back bit-for-bit unchanged.
pub fn hermitize(m: &ComplexMatrix) -> Result<HermitianMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
    }
    Ok(HermitianMatrix { inner: out })
}

impl HermitianMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diag(diag),
        }
    }

    /// Hermitian matrix from real symmetric row-major data (symmetrized).
    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        hermitize(&ComplexMatrix::from_real(n, n, data)?)
    }

    /// `V diag(values) V*` for a matrix `V` with orthonormal columns.
    pub fn from_spectral(vectors: &ComplexMatrix, values: &[f64]) -> Self {
        let n = vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (l, &lam) in values.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = vectors[(i, l)] * lam;
                for j in 0..n {
                    out[(i, j)] += vi * vectors[(j, l)].conj();
                }
            }
        }
        hermitize(&out).expect("square by construction")
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.add(&rhs.inner)?,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.sub(&rhs.inner)?,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            inner: self.inner.scale(c),
        }
    }

    /// `tau * self + (1 - tau) * other`.
    pub fn convex_combination(&self, other: &Self, tau: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        hermitize(&self.inner.scale(tau).add(&other.inner.scale(1.0 - tau))?)
    }

    /// `U* self U` for any conforming `U`.
    pub fn congruence(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "congruence by {}x{} on dimension {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        hermitize(&u.adjoint().mul(&self.inner).mul(u))
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::new(1, 2, vec![C64::new(1.0, -2.0), C64::new(0.5, 0.0)]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"rows":1,"cols":2,"re":[1.0,0.5],"im":[-2.0,0.0]}"#
        );
        assert_eq!(serde_json::from_str::<ComplexMatrix>(&text).unwrap(), m);
        let real: ComplexMatrix = serde_json::from_str(r#"{"rows":1,"cols":1,"re":[3]}"#).unwrap();
        assert_eq!(real[(0, 0)], C64::new(3.0, 0.0));
        assert!(
            serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"re":[1,2,3]}"#).is_err()
        );
        assert!(
            serde_json::from_str::<ComplexMatrix>(r#"{"rows":1,"cols":1,"re":[1],"im":[]}"#)
                .is_err()
        );
        assert!(
            serde_json::from_str::<HermitianMatrix>(r#"{"rows":1,"cols":2,"re":[1,2]}"#).is_err()
        );
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitize_strict_upper() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let h = hermitize(&m).unwrap();
        assert_eq!(h[(0, 1)], c(0.5, 0.0));
        assert_eq!(h[(1, 0)], c(0.5, 0.0));
        assert_eq!(h[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn hermitize_fixed_point() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(1.5, 0.0), c(0.3, -0.7), c(0.3, 0.7), c(-2.0, 0.0)],
        )
        .unwrap();
        let h = hermitize(&m).unwrap();
        assert_eq!(h.as_matrix(), &m);
    }

    #[test]
    fn hermitize_drops_imaginary_diagonal() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let h = hermitize(&m).unwrap();
        assert_eq!(h.as_matrix(), &ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn hermitize_rejects_rectangular() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitize(&m),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(1))
        ));
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = ComplexMatrix::new(1, 2, vec![c(1.0, 1.0), c(0.0, 2.0)]).unwrap();
        let g = a.matmul(&a.adjoint()).unwrap();
        assert_eq!(g.rows(), 1);
        assert!((g[(0, 0)].re - 6.0).abs() < 1e-15);
        assert!(a.matmul(&a).is_err());
    }
}
