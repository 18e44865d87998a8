use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    fractional_power, hermitize, matrix_exp, matrix_log, ComplexMatrix, HermitianMatrix,
};

/// Rounding slack allowed on `p + q ≤ 1` and `Σ p_j ≤ 1`.
const SUM_SLACK: f64 = 1e-12;

/// Parameters `(K, p, q, s)` of the generalized Lieb map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiebMapParams {
    pub k: ComplexMatrix,
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

impl LiebMapParams {
    /// Requires `p, q ∈ [0, 1]`, `p + q ≤ 1` and `s ∈ (0, 1]`.
    pub fn new(k: ComplexMatrix, p: f64, q: f64, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!(
                "p = {p}, q = {q} must lie in [0, 1]"
            )));
        }
        if p + q > 1.0 + SUM_SLACK {
            return Err(Error::InvalidParameter(format!(
                "p + q = {} exceeds 1",
                p + q
            )));
        }
        Self::beyond_range(k, p, q, s)
    }

    /// Only checks `p, q ≥ 0` and `s ∈ (0, 1]`; used by negative controls with `p + q > 1`.
    pub fn beyond_range(k: ComplexMatrix, p: f64, q: f64, s: f64) -> Result<Self> {
        if !(p >= 0.0 && q >= 0.0 && p.is_finite() && q.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "p = {p}, q = {q} must be nonnegative"
            )));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidParameter(format!("s = {s} outside (0, 1]")));
        }
        Ok(Self { k, p, q, s })
    }

    /// `(m, n)` where `K` is `m x n`.
    pub fn dims(&self) -> (usize, usize) {
        (self.k.rows(), self.k.cols())
    }

    fn check_args(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
        let (m, n) = self.dims();
        if a.dim() != m || b.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "K is {m}x{n} but A is {0}x{0} and B is {1}x{1}",
                a.dim(),
                b.dim()
            )));
        }
        Ok(())
    }
}

/// `(B^{qs/2} K* A^{ps} K B^{qs/2})^{1/s}`, with `X⁰ = I`.
pub fn lieb_map(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    params: &LiebMapParams,
) -> Result<HermitianMatrix> {
    params.check_args(a, b)?;
    let LiebMapParams { k, p, q, s } = params;
    let a_ps = fractional_power(a, p * s)?;
    let b_half = fractional_power(b, q * s / 2.0)?;
    let kb = k.mul(b_half.as_matrix());
    let inner = kb.adjoint().mul(a_ps.as_matrix()).mul(&kb);
    fractional_power(&hermitize(&inner)?, 1.0 / s)
}

/// `Re tr[K* A^p K B^q]` for `p, q ∈ (0, 1]` with `p + q ≤ 1`.
pub fn classic_lieb_value(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    k: &ComplexMatrix,
    p: f64,
    q: f64,
) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p = {p}, q = {q} must lie in (0, 1]"
        )));
    }
    if p + q > 1.0 + SUM_SLACK {
        return Err(Error::InvalidParameter(format!(
            "p + q = {} exceeds 1",
            p + q
        )));
    }
    classic_unchecked(a, b, k, p, q)
}

pub(crate) fn classic_unchecked(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    k: &ComplexMatrix,
    p: f64,
    q: f64,
) -> Result<f64> {
    if a.dim() != k.rows() || b.dim() != k.cols() {
        return Err(Error::DimensionMismatch(format!(
            "K is {}x{} but A is {2}x{2} and B is {3}x{3}",
            k.rows(),
            k.cols(),
            a.dim(),
            b.dim()
        )));
    }
    let a_p = fractional_power(a, p)?;
    let b_q = fractional_power(b, q)?;
    let prod = k.adjoint().mul(a_p.as_matrix()).mul(k).mul(b_q.as_matrix());
    Ok(prod.trace().re)
}

/// Parameters `(H, p_1..p_m)` of the exp-log map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpLogParams {
    pub h: HermitianMatrix,
    pub weights: Vec<f64>,
}

impl ExpLogParams {
    /// Requires each `p_j ∈ [0, 1]` and `Σ p_j ≤ 1`.
    pub fn new(h: HermitianMatrix, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one weight is required".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidParameter(format!(
                "weight {w} outside [0, 1]"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + SUM_SLACK {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total} > 1"
            )));
        }
        Ok(Self { h, weights })
    }
}

/// `exp(H + Σ p_j log A_j)` for positive definite `A_j`.
pub fn explog_map(args: &[HermitianMatrix], params: &ExpLogParams) -> Result<HermitianMatrix> {
    if args.len() != params.weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices for {} weights",
            args.len(),
            params.weights.len()
        )));
    }
    let n = params.h.dim();
    let mut acc = params.h.clone();
    for (a, &w) in args.iter().zip(&params.weights) {
        if a.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "argument is {0}x{0}, H is {n}x{n}",
                a.dim()
            )));
        }
        acc = acc.add(&matrix_log(a)?.scale(w))?;
    }
    matrix_exp(&acc)
}

/// Which matrix map a trial exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Lieb,
    Explog,
    Classic,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Lieb => "lieb",
            MapKind::Explog => "explog",
            MapKind::Classic => "classic",
        })
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lieb" => Ok(MapKind::Lieb),
            "explog" => Ok(MapKind::Explog),
            "classic" => Ok(MapKind::Classic),
            other => Err(Error::Parse(format!(
                "unknown map '{other}' (expected lieb, explog or classic)"
            ))),
        }
    }
}

/// A map with its fixed parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "map", rename_all = "lowercase")]
pub enum ConcavityMap {
    Lieb(LiebMapParams),
    Explog(ExpLogParams),
    /// `tr[K* A^p K B^q]`; parameter checks are skipped so negative controls can use `p + q > 1`.
    Classic {
        k: ComplexMatrix,
        p: f64,
        q: f64,
    },
}

/// A point in the map's domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Pair {
        a: HermitianMatrix,
        b: HermitianMatrix,
    },
    Tuple(Vec<HermitianMatrix>),
}

impl Endpoint {
    /// `τ·self + (1 − τ)·other`, componentwise.
    pub fn convex_combination(&self, other: &Endpoint, tau: f64) -> Result<Endpoint> {
        match (self, other) {
            (Endpoint::Pair { a, b }, Endpoint::Pair { a: a2, b: b2 }) => Ok(Endpoint::Pair {
                a: a.convex_combination(a2, tau)?,
                b: b.convex_combination(b2, tau)?,
            }),
            (Endpoint::Tuple(x), Endpoint::Tuple(y)) if x.len() == y.len() => Ok(Endpoint::Tuple(
                x.iter()
                    .zip(y)
                    .map(|(u, v)| u.convex_combination(v, tau))
                    .collect::<Result<_>>()?,
            )),
            _ => Err(Error::DimensionMismatch(
                "endpoints have different shapes".into(),
            )),
        }
    }
}

/// Map value: a Hermitian matrix, or a scalar for the classic functional.
#[derive(Debug, Clone, PartialEq)]
pub enum MapOutput {
    Matrix(HermitianMatrix),
    Scalar(f64),
}

impl ConcavityMap {
    pub fn kind(&self) -> MapKind {
        match self {
            ConcavityMap::Lieb(_) => MapKind::Lieb,
            ConcavityMap::Explog(_) => MapKind::Explog,
            ConcavityMap::Classic { .. } => MapKind::Classic,
        }
    }

    pub fn apply(&self, x: &Endpoint) -> Result<MapOutput> {
        match (self, x) {
            (ConcavityMap::Lieb(params), Endpoint::Pair { a, b }) => {
                Ok(MapOutput::Matrix(lieb_map(a, b, params)?))
            }
            (ConcavityMap::Explog(params), Endpoint::Tuple(args)) => {
                Ok(MapOutput::Matrix(explog_map(args, params)?))
            }
            (ConcavityMap::Classic { k, p, q }, Endpoint::Pair { a, b }) => {
                Ok(MapOutput::Scalar(classic_unchecked(a, b, k, *p, *q)?))
            }
            _ => Err(Error::DimensionMismatch(format!(
                "endpoint shape does not fit the {} map",
                self.kind()
            ))),
        }
    }
}
