//! Vector majorization: prefix-sum checks, the bridge `a ≤ c ≺ b`, and
//! T-transform certificates whose product is a doubly stochastic witness.
//!
//! All comparisons are padded by `MAJORIZATION_TOLERANCE * scale` with
//! `scale = max(1, ‖a‖_∞, ‖b‖_∞)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::linalg::{eig_hermitian, HermitianMatrix};

pub const MAJORIZATION_TOLERANCE: f64 = 1e-10;
/// Relative tolerance of the Schur comparison.
pub const SCHUR_TOLERANCE: f64 = 1e-9;

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty vectors".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("vectors must be finite".into()));
    }
    Ok(())
}

fn scale_of(a: &[f64], b: &[f64]) -> f64 {
    a.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Indices that sort `x` into nonincreasing order (stable).
pub fn descending_order(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[j].total_cmp(&x[i]));
    idx
}

fn descending(x: &[f64]) -> Vec<f64> {
    descending_order(x).into_iter().map(|i| x[i]).collect()
}

fn prefix_sums(x: &[f64]) -> Vec<f64> {
    x.iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// `a ≺_w b`: every descending prefix sum of `a` is at most that of `b`.
pub fn weak_majorizes(b: &[f64], a: &[f64]) -> Result<bool> {
    check_lengths(a, b)?;
    let tol = MAJORIZATION_TOLERANCE * scale_of(a, b);
    let pa = prefix_sums(&descending(a));
    let pb = prefix_sums(&descending(b));
    Ok(pa.iter().zip(&pb).all(|(x, y)| *x <= y + tol))
}

/// `a ≺ b`: weak majorization with equal totals.
pub fn majorizes(b: &[f64], a: &[f64]) -> Result<bool> {
    if !weak_majorizes(b, a)? {
        return Ok(false);
    }
    let tol = MAJORIZATION_TOLERANCE * scale_of(a, b);
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    Ok((sa - sb).abs() <= tol)
}

/// Strongest relation `a` stands in to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    None,
    Weak,
    Strong,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::None => "none",
            Relation::Weak => "weak",
            Relation::Strong => "strong",
        })
    }
}

pub fn relation(b: &[f64], a: &[f64]) -> Result<Relation> {
    Ok(if majorizes(b, a)? {
        Relation::Strong
    } else if weak_majorizes(b, a)? {
        Relation::Weak
    } else {
        Relation::None
    })
}

/// A vector `c` with `a ≤ c` entrywise and `c ≺ b`, given `a ≺_w b`.
///
/// Works on `a↓`: with prefix gaps `g_k = B_k − A_k` and suffix minima
/// `h_i = min_{k ≥ i} g_k`, position `i` receives `h_i − h_{i−1}`. Then the
/// cumulative addition `h_k ≤ g_k` keeps every prefix feasible, the last one
/// is tight, and the result stays in descending order. The output is
/// re-checked before returning.
pub fn bridge_vector(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_lengths(a, b)?;
    if !weak_majorizes(b, a)? {
        return Err(Error::Precondition("a is not weakly majorized by b".into()));
    }
    let n = a.len();
    let order = descending_order(a);
    let a_desc: Vec<f64> = order.iter().map(|&i| a[i]).collect();
    let pa = prefix_sums(&a_desc);
    let pb = prefix_sums(&descending(b));
    let gaps: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| (y - x).max(0.0)).collect();
    let mut suffix_min = gaps.clone();
    for i in (0..n - 1).rev() {
        suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
    }
    let mut c = a.to_vec();
    let mut added = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        let s = (suffix_min[pos] - added).max(0.0);
        c[i] = a_desc[pos] + s;
        added += s;
    }

    let tol = 1e-12 * scale_of(a, b);
    if c.iter().zip(a).any(|(ci, ai)| *ci < ai - tol) || !majorizes(b, &c)? {
        return Err(Error::Postcondition(format!(
            "bridge construction failed for a = {a:?}, b = {b:?}, c = {c:?}"
        )));
    }
    Ok(c)
}

/// One T-transform `(1 − t) I + t Π_{ij}` acting on sorted coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

impl TTransform {
    pub fn apply(&self, x: &mut [f64]) {
        let (xi, xj) = (x[self.i], x[self.j]);
        x[self.i] = (1.0 - self.t) * xi + self.t * xj;
        x[self.j] = self.t * xi + (1.0 - self.t) * xj;
    }
}

/// Witness of `target ≺ source`: the chain maps `source↓` to `target↓`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationCertificate {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
    pub transforms: Vec<TTransform>,
    /// `source_order[r]` is the index in `source` of its `r`-th largest entry.
    pub source_order: Vec<usize>,
    /// `target_order[r]` is the index in `target` of its `r`-th largest entry.
    pub target_order: Vec<usize>,
}

impl MajorizationCertificate {
    /// Applies the chain to `source↓` and scatters the result back into `target`'s order.
    pub fn apply(&self) -> Vec<f64> {
        let mut x: Vec<f64> = self.source_order.iter().map(|&i| self.source[i]).collect();
        for t in &self.transforms {
            t.apply(&mut x);
        }
        let mut out = vec![0.0; x.len()];
        for (r, &i) in self.target_order.iter().enumerate() {
            out[i] = x[r];
        }
        out
    }

    /// Checks that lengths agree, both orders are permutations and every
    /// transform has `i < j < n` with `t ∈ [0, 1]`.
    pub fn check_shape(&self) -> Result<()> {
        let n = self.source.len();
        if n == 0
            || self.target.len() != n
            || self.source_order.len() != n
            || self.target_order.len() != n
        {
            return Err(Error::DimensionMismatch(
                "certificate vectors and orders must share one length".into(),
            ));
        }
        if self
            .source
            .iter()
            .chain(&self.target)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "certificate entries must be finite".into(),
            ));
        }
        for order in [&self.source_order, &self.target_order] {
            let mut seen = vec![false; n];
            for &i in order {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidParameter(
                        "certificate order is not a permutation".into(),
                    ));
                }
            }
        }
        if let Some(t) = self
            .transforms
            .iter()
            .find(|t| !(t.i < t.j && t.j < n && (0.0..=1.0).contains(&t.t)))
        {
            return Err(Error::InvalidParameter(format!(
                "invalid T-transform {t:?}"
            )));
        }
        Ok(())
    }

    /// `‖target − D·source‖_∞`.
    pub fn residual(&self) -> Result<f64> {
        self.check_shape()?;
        Ok(self
            .apply()
            .iter()
            .zip(&self.target)
            .fold(0.0f64, |m, (x, a)| m.max((x - a).abs())))
    }
}

/// Hardy–Littlewood–Pólya reduction of `b↓` to `a↓` in at most `n − 1` T-transforms.
///
/// Invariant: positional prefix sums of the working vector dominate those of
/// `a↓`. At the first mismatch `i` the working entry is too large; the next
/// index `j > i` that is too small receives `δ = min(x_i − a_i, a_j − x_j)`,
/// which matches at least one of the two coordinates exactly.
pub fn certify_majorization(a: &[f64], b: &[f64]) -> Result<MajorizationCertificate> {
    check_lengths(a, b)?;
    if !majorizes(b, a)? {
        return Err(Error::Precondition("a is not majorized by b".into()));
    }
    let n = a.len();
    let target_order = descending_order(a);
    let source_order = descending_order(b);
    let target: Vec<f64> = target_order.iter().map(|&i| a[i]).collect();
    let mut x: Vec<f64> = source_order.iter().map(|&i| b[i]).collect();
    let match_tol = 1e-13 * scale_of(a, b);
    let mut transforms = Vec::new();

    while transforms.len() < n {
        let Some(i) = (0..n).find(|&i| (x[i] - target[i]).abs() > match_tol) else {
            break;
        };
        if x[i] < target[i] {
            // Only reachable through tolerance slack in the precondition.
            break;
        }
        let Some(j) = ((i + 1)..n).find(|&j| target[j] - x[j] > match_tol) else {
            break;
        };
        let delta = (x[i] - target[i]).min(target[j] - x[j]);
        let t = delta / (x[i] - x[j]);
        let tt = TTransform { i, j, t };
        tt.apply(&mut x);
        if x[i] - target[i] <= target[j] - x[j] {
            x[i] = target[i];
        } else {
            x[j] = target[j];
        }
        transforms.push(tt);
    }
    if transforms.len() > n.saturating_sub(1) {
        return Err(Error::Postcondition(format!(
            "certificate chain has {} transforms for n = {n}",
            transforms.len()
        )));
    }
    Ok(MajorizationCertificate {
        source: b.to_vec(),
        target: a.to_vec(),
        transforms,
        source_order,
        target_order,
    })
}

/// Nonnegative matrix with unit row and column sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublyStochasticMatrix {
    pub dim: usize,
    /// Row-major entries.
    pub entries: Vec<f64>,
}

impl DoublyStochasticMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Largest violation of nonnegativity or of a unit row/column sum.
    pub fn stochastic_defect(&self) -> f64 {
        let n = self.dim;
        let neg = self.entries.iter().fold(0.0f64, |m, &v| m.max(-v));
        let rows = (0..n)
            .map(|i| ((0..n).map(|j| self.get(i, j)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        let cols = (0..n)
            .map(|j| ((0..n).map(|i| self.get(i, j)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        neg.max(rows).max(cols)
    }

    pub fn is_valid(&self) -> bool {
        let n = self.dim;
        self.entries.iter().all(|&v| v >= -1e-12)
            && (0..n).all(|i| ((0..n).map(|j| self.get(i, j)).sum::<f64>() - 1.0).abs() <= 1e-10)
            && (0..n).all(|j| ((0..n).map(|i| self.get(i, j)).sum::<f64>() - 1.0).abs() <= 1e-10)
    }
}

/// `D = P_a^T (T_m ⋯ T_1) P_b`, so that `a = D b`.
pub fn certificate_to_matrix(cert: &MajorizationCertificate) -> DoublyStochasticMatrix {
    let n = cert.source.len();
    // Start from the sorted-coordinate identity and apply each T on the left.
    let mut sorted = vec![0.0; n * n];
    for r in 0..n {
        sorted[r * n + r] = 1.0;
    }
    for t in &cert.transforms {
        for col in 0..n {
            let (vi, vj) = (sorted[t.i * n + col], sorted[t.j * n + col]);
            sorted[t.i * n + col] = (1.0 - t.t) * vi + t.t * vj;
            sorted[t.j * n + col] = t.t * vi + (1.0 - t.t) * vj;
        }
    }
    let mut entries = vec![0.0; n * n];
    for r in 0..n {
        for s in 0..n {
            entries[cert.target_order[r] * n + cert.source_order[s]] = sorted[r * n + s];
        }
    }
    DoublyStochasticMatrix { dim: n, entries }
}

/// Inequality direction predicted by Schur-convexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicted {
    /// `φ(a) ≤ φ(b)`
    AtMost,
    /// `φ(a) ≥ φ(b)`
    AtLeast,
}

/// Which majorization relation the prediction rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurBasis {
    /// `a ≺ b`
    Majorized,
    /// `a ≺_w b`
    WeaklySub,
    /// `−a ≺_w −b`
    WeaklySuper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurRecord {
    pub basis: SchurBasis,
    pub phi_a: f64,
    pub phi_b: f64,
    pub predicted: Predicted,
    pub holds: bool,
}

/// Evaluates `φ` on both vectors and checks the inequality Schur-convexity predicts.
///
/// * `a ≺ b`: convex `φ` gives `φ(a) ≤ φ(b)`, concave `φ` gives `φ(a) ≥ φ(b)`.
/// * `a ≺_w b` and `φ` monotone convex: `φ(a) ≤ φ(b)`.
/// * `−a ≺_w −b` and `φ` monotone concave: `φ(a) ≥ φ(b)`.
pub fn schur_test(form: &SymmetricForm, a: &[f64], b: &[f64]) -> Result<SchurRecord> {
    check_lengths(a, b)?;
    let d = form.declared();
    if !d.convex && !d.concave {
        return Err(Error::Precondition(format!(
            "{} is declared neither convex nor concave",
            form.label()
        )));
    }
    let neg = |x: &[f64]| x.iter().map(|v| -v).collect::<Vec<_>>();
    let (basis, predicted) = if majorizes(b, a)? {
        let p = if d.concave {
            Predicted::AtLeast
        } else {
            Predicted::AtMost
        };
        (SchurBasis::Majorized, p)
    } else if d.monotone && d.convex && weak_majorizes(b, a)? {
        (SchurBasis::WeaklySub, Predicted::AtMost)
    } else if d.monotone && d.concave && weak_majorizes(&neg(b), &neg(a))? {
        (SchurBasis::WeaklySuper, Predicted::AtLeast)
    } else {
        return Err(Error::Precondition(format!(
            "no majorization relation applicable to {} between a and b",
            form.label()
        )));
    };
    let phi_a = form.eval_vector(a)?;
    let phi_b = form.eval_vector(b)?;
    let tol = SCHUR_TOLERANCE * 1f64.max(phi_a.abs()).max(phi_b.abs());
    let holds = match predicted {
        Predicted::AtMost => phi_a <= phi_b + tol,
        Predicted::AtLeast => phi_a >= phi_b - tol,
    };
    Ok(SchurRecord {
        basis,
        phi_a,
        phi_b,
        predicted,
        holds,
    })
}

/// Checks `λ(A + B) ≺ λ↓(A) + λ↓(B)`.
pub fn eigen_sum_majorization(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let la = eig_hermitian(a)?.descending();
    let lb = eig_hermitian(b)?.descending();
    let lab = eig_hermitian(&a.add(b)?)?.eigenvalues;
    let sum: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| x + y).collect();
    majorizes(&sum, &lab)
}
