//! Variational formulas for partial eigenvalue sums.
//!
//! * idempotent form: `Σ_{i≤k} λ↑_i(f(M*AM)) = inf_{G²=G, rank G=k} tr f(M*G*AGM)`
//!   for PSD `A` and increasing `f` with `f(0) = 0`, attained at `G = MQQ*M⁻¹`
//!   when `M` is invertible;
//! * shift form: `Σ_{i≤k} λ↑_i(f(A)) = inf_{rank H = n−k} tr f(H + A)` for
//!   increasing `f` vanishing at `−∞`;
//! * Courant–Fischer windows and the isometry bound `tr f(Q*AQ) ≥ Σ_{i≤k} λ↑_i(f(A))`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    admit_spectrum, compact_svd, complete_to_unitary, eig_hermitian, hermitize, inverse,
    inverse_condition, orthonormalize_columns, ComplexMatrix, HermitianMatrix, Interval, ScalarFn,
    Side, C64, RANK_TOLERANCE, SPECTRAL_FLOOR,
};
use crate::rng::{gaussian_matrix, stream_rng};

/// `‖G² − G‖_F ≤ IDEMPOTENT_TOLERANCE · max(1, ‖G‖_F²)`.
pub const IDEMPOTENT_TOLERANCE: f64 = 1e-9;
/// Nonzero singular values of an idempotent must reach `1 − SINGULAR_FLOOR_SLACK`.
pub const SINGULAR_FLOOR_SLACK: f64 = 1e-8;
/// Tolerance on `‖Q*Q − I‖_F` for isometries.
pub const ISOMETRY_TOLERANCE: f64 = 1e-10;
/// `M` counts as invertible when `σ_min > INVERTIBILITY_THRESHOLD · σ_max`.
pub const INVERTIBILITY_THRESHOLD: f64 = 1e-10;
/// Condition-number cap for the similarity used by [`random_idempotent`].
pub const IDEMPOTENT_CONDITION_CAP: f64 = 1e4;
const RESAMPLE_CAP: usize = 100;

/// Square matrix `G` with `G² = G` and known rank.
#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentMatrix {
    matrix: ComplexMatrix,
    rank: usize,
}

fn idempotent_residual(g: &ComplexMatrix) -> f64 {
    g.mul(g).sub(g).expect("square").frobenius_norm()
}

impl IdempotentMatrix {
    /// Validates idempotency, the rank and the singular-value floor.
    pub fn new(matrix: ComplexMatrix, rank: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let norm = matrix.frobenius_norm();
        let residual = idempotent_residual(&matrix);
        if residual > IDEMPOTENT_TOLERANCE * norm.powi(2).max(1.0) {
            return Err(Error::NotIdempotent(residual));
        }
        let svd = compact_svd(&matrix)?;
        if svd.rank() != rank {
            return Err(Error::InvalidParameter(format!(
                "declared rank {rank} but {} singular values are nonzero",
                svd.rank()
            )));
        }
        if let Some(&smin) = svd.sigma.last() {
            if smin < 1.0 - SINGULAR_FLOOR_SLACK {
                return Err(Error::Postcondition(format!(
                    "idempotent has nonzero singular value {smin} below 1"
                )));
            }
        }
        Ok(Self { matrix, rank })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Hermitian `H` with exactly `n − k` nonzero eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct RankConstrainedShift {
    matrix: HermitianMatrix,
    rank: usize,
}

fn numerical_rank(eigenvalues: &[f64]) -> usize {
    let top = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return 0;
    }
    eigenvalues
        .iter()
        .filter(|v| v.abs() > RANK_TOLERANCE * top)
        .count()
}

impl RankConstrainedShift {
    pub fn new(matrix: HermitianMatrix, rank: usize) -> Result<Self> {
        let found = numerical_rank(&eig_hermitian(&matrix)?.eigenvalues);
        if found != rank {
            return Err(Error::InvalidParameter(format!(
                "declared rank {rank} but the spectrum has {found} nonzero eigenvalues"
            )));
        }
        Ok(Self { matrix, rank })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

fn spectrum_hull(eigenvalues: &[f64]) -> Interval {
    Interval::closed(eigenvalues[0], eigenvalues[eigenvalues.len() - 1])
}

/// `tr f(X)` for Hermitian `X`, with the spectral floor applied to `f`'s domain.
///
/// Eigenvalues within `SPECTRAL_FLOOR · ‖X‖_F` of zero are evaluated at 0:
/// congruences by rank-deficient factors leave roundoff there, and powers
/// below 1 would amplify it (`(1e-17)^0.3 ≈ 1e-5`).
pub fn trace_function(x: &HermitianMatrix, f: &ScalarFn) -> Result<f64> {
    let eig = eig_hermitian(x)?;
    let scale = x.frobenius_norm();
    let lam = admit_spectrum(&eig.eigenvalues, &f.domain(), scale, &f.label())?;
    Ok(lam
        .iter()
        .map(|&v| {
            f.eval(if v.abs() <= SPECTRAL_FLOOR * scale {
                0.0
            } else {
                v
            })
        })
        .sum())
}

fn require_psd(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let eig = eig_hermitian(a)?;
    admit_spectrum(
        &eig.eigenvalues,
        &Interval::nonnegative(),
        a.frobenius_norm(),
        "a PSD argument",
    )
}

fn require_f00_admissible(f: &ScalarFn) -> Result<()> {
    if !f.props_on(&Interval::nonnegative()).increasing {
        return Err(Error::Precondition(format!(
            "{} is not increasing on [0, inf)",
            f.label()
        )));
    }
    if !f.domain().contains(0.0) || f.eval(0.0) != 0.0 {
        return Err(Error::Precondition(format!(
            "{} does not satisfy f(0) = 0",
            f.label()
        )));
    }
    Ok(())
}

/// `tr f(Q*AQ)` for an `n x k` isometry `Q` and `f` increasing on the spectrum of `A`.
///
/// It always lies between `Σ_{i≤k} λ↑_i(f(A))` and `Σ_{i≤k} λ↓_i(f(A))`; `side`
/// only selects which bound [`exact_partial_sum`] reports for comparison.
pub fn partial_sum_via_isometry(
    a: &HermitianMatrix,
    k: usize,
    f: &ScalarFn,
    _side: Side,
    q: &ComplexMatrix,
) -> Result<f64> {
    let n = a.dim();
    check_k(k, n)?;
    if q.rows() != n || q.cols() != k {
        return Err(Error::DimensionMismatch(format!(
            "isometry is {}x{}, expected {n}x{k}",
            q.rows(),
            q.cols()
        )));
    }
    let residual = q.isometry_residual();
    if residual > ISOMETRY_TOLERANCE {
        return Err(Error::NotIsometry(residual));
    }
    let eig = eig_hermitian(a)?;
    if !f.props_on(&spectrum_hull(&eig.eigenvalues)).increasing {
        return Err(Error::Precondition(format!(
            "{} is not increasing on the spectrum",
            f.label()
        )));
    }
    trace_function(&a.congruence(q)?, f)
}

/// `Σ_{i≤k} λ↑_i(f(A))` or `Σ_{i≤k} λ↓_i(f(A))` for increasing `f`.
pub fn exact_partial_sum(a: &HermitianMatrix, k: usize, f: &ScalarFn, side: Side) -> Result<f64> {
    let n = a.dim();
    check_k(k, n)?;
    let eig = eig_hermitian(a)?;
    let lam = admit_spectrum(
        &eig.eigenvalues,
        &f.domain(),
        a.frobenius_norm(),
        &f.label(),
    )?;
    let vals = lam.iter().map(|&v| f.eval(v));
    Ok(match side {
        Side::Smallest => vals.take(k).sum(),
        Side::Largest => vals.skip(n - k).sum(),
    })
}

/// `tr f(M* G* A G M)`.
pub fn f00_objective(
    a: &HermitianMatrix,
    m: &ComplexMatrix,
    g: &IdempotentMatrix,
    f: &ScalarFn,
) -> Result<f64> {
    require_f00_admissible(f)?;
    require_psd(a)?;
    let n = a.dim();
    if m.rows() != n || m.cols() != n || g.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "A is {n}x{n}, M is {}x{}, G is {}x{}",
            m.rows(),
            m.cols(),
            g.dim(),
            g.dim()
        )));
    }
    let gm = g.matrix().mul(m);
    trace_function(&a.congruence(&gm)?, f)
}

fn congruence_by(a: &HermitianMatrix, m: &ComplexMatrix) -> Result<HermitianMatrix> {
    if !m.is_square() || m.rows() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "M is {}x{}, A is {}x{}",
            m.rows(),
            m.cols(),
            a.dim(),
            a.dim()
        )));
    }
    a.congruence(m)
}

/// Left side of the idempotent formula: `Σ_{i≤k} λ↑_i(f(M*AM))`.
pub fn f00_lower_bound(
    a: &HermitianMatrix,
    m: &ComplexMatrix,
    k: usize,
    f: &ScalarFn,
) -> Result<f64> {
    require_f00_admissible(f)?;
    require_psd(a)?;
    exact_partial_sum(&congruence_by(a, m)?, k, f, Side::Smallest)
}

/// `G = M Q Q* M⁻¹` with `Q` the eigenvectors of the `k` smallest eigenvalues of `M*AM`.
pub fn f00_minimizer(a: &HermitianMatrix, m: &ComplexMatrix, k: usize) -> Result<IdempotentMatrix> {
    let mam = congruence_by(a, m)?;
    check_k(k, a.dim())?;
    let ratio = inverse_condition(m)?;
    if ratio <= INVERTIBILITY_THRESHOLD {
        return Err(Error::Singular(ratio));
    }
    let m_inv = inverse(m)?;
    let q = eig_hermitian(&mam)?.bottom_vectors(k);
    let g = m.mul(&q).mul(&q.adjoint()).mul(&m_inv);
    IdempotentMatrix::new(g, k)
}

/// `S P_k S⁻¹` with `P_k` the first-`k` coordinate projector and `S` complex
/// Gaussian, resampled until its condition number is at most 1e4.
pub fn random_idempotent<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<IdempotentMatrix> {
    check_k(k, n)?;
    for _ in 0..RESAMPLE_CAP {
        let s = gaussian_matrix(n, n, 1.0, rng);
        let ratio = inverse_condition(&s)?;
        if ratio * IDEMPOTENT_CONDITION_CAP < 1.0 {
            continue;
        }
        let s_inv = inverse(&s)?;
        let g = ComplexMatrix::from_fn(n, n, |i, j| {
            (0..k).map(|l| s[(i, l)] * s_inv[(l, j)]).sum::<C64>()
        });
        if let Ok(g) = IdempotentMatrix::new(g, k) {
            return Ok(g);
        }
    }
    Err(Error::ResampleCapExceeded(RESAMPLE_CAP))
}

/// Smallest nonzero singular value of an idempotent (`+∞` for the zero matrix).
pub fn idempotent_singular_floor(p: &ComplexMatrix) -> Result<f64> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let residual = idempotent_residual(p);
    if residual > IDEMPOTENT_TOLERANCE * p.frobenius_norm().powi(2).max(1.0) {
        return Err(Error::NotIdempotent(residual));
    }
    Ok(compact_svd(p)?
        .sigma
        .last()
        .copied()
        .unwrap_or(f64::INFINITY))
}

/// Random `n x k` isometry from Gram-Schmidt on a Gaussian matrix.
pub fn random_isometry<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<ComplexMatrix> {
    for _ in 0..RESAMPLE_CAP {
        if let Ok(q) = orthonormalize_columns(&gaussian_matrix(n, k, 1.0, rng)) {
            return Ok(q);
        }
    }
    Err(Error::ResampleCapExceeded(RESAMPLE_CAP))
}

/// Random unitary: eigenvectors of a random Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let h = hermitize(&gaussian_matrix(n, n, 1.0, rng))?;
    Ok(eig_hermitian(&h)?.vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F00ProbeReport {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// `Σ_{i≤k} λ↑_i(f(M*AM))`.
    pub lower_bound: f64,
    /// Objective at `MQQ*M⁻¹`; `None` when `M` is singular.
    pub minimizer_objective: Option<f64>,
    pub min_sampled: f64,
    /// `min_sampled − lower_bound`.
    pub gap: f64,
    /// Samples below `lower_bound − 1e-8·scale`.
    pub violations: usize,
    /// Objective at `M` along minimizers of lifted invertible `M_j`, for `j = 1, 2, …`.
    pub lifted_sequence: Vec<f64>,
}

/// Length of the lifted sequence `ε_j = 2^{−j}`, `j = 1..=LIFTED_STEPS`.
pub const LIFTED_STEPS: usize = 20;

/// Relative tolerance of the idempotent lower bound.
pub const F00_TOLERANCE: f64 = 1e-8;

/// Samples random rank-`k` idempotents and checks none beats the lower bound.
///
/// For singular `M` the report also follows the lifted sequence
/// `M_j = U diag(max(σ_i, 2^{−j})) V*` and records `tr f(M* G_j* A G_j M)`
/// at the minimizers `G_j` of `M_j`.
pub fn f00_probe_infimum(
    a: &HermitianMatrix,
    m: &ComplexMatrix,
    k: usize,
    f: &ScalarFn,
    trials: usize,
    seed: u64,
) -> Result<F00ProbeReport> {
    let n = a.dim();
    let lower_bound = f00_lower_bound(a, m, k, f)?;
    let minimizer_objective = match f00_minimizer(a, m, k) {
        Ok(g) => Some(f00_objective(a, m, &g, f)?),
        Err(Error::Singular(_)) => None,
        Err(e) => return Err(e),
    };
    let mut rng = stream_rng(seed, 0);
    let mut min_sampled = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..trials {
        let g = random_idempotent(n, k, &mut rng)?;
        let v = f00_objective(a, m, &g, f)?;
        let scale = 1f64.max(v.abs()).max(lower_bound.abs());
        if v < lower_bound - F00_TOLERANCE * scale {
            violations += 1;
        }
        min_sampled = min_sampled.min(v);
    }
    let lifted_sequence = if minimizer_objective.is_none() {
        lifted_objectives(a, m, k, f, LIFTED_STEPS)?
    } else {
        Vec::new()
    };
    Ok(F00ProbeReport {
        k,
        trials,
        seed,
        lower_bound,
        minimizer_objective,
        min_sampled,
        gap: min_sampled - lower_bound,
        violations,
        lifted_sequence,
    })
}

fn lifted_objectives(
    a: &HermitianMatrix,
    m: &ComplexMatrix,
    k: usize,
    f: &ScalarFn,
    steps: usize,
) -> Result<Vec<f64>> {
    let n = m.rows();
    let svd = compact_svd(m)?;
    let u = complete_to_unitary(&svd.u);
    let v = complete_to_unitary(&svd.v);
    let mut out = Vec::with_capacity(steps);
    for j in 1..=steps {
        let eps = 0.5f64.powi(j as i32);
        let lifted: Vec<f64> = (0..n)
            .map(|i| svd.sigma.get(i).copied().unwrap_or(0.0).max(eps))
            .collect();
        let mj = ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|l| u[(r, l)] * lifted[l] * v[(c, l)].conj())
                .sum::<C64>()
        });
        let g = match f00_minimizer(a, &mj, k) {
            Ok(g) => g,
            Err(Error::Singular(_) | Error::NotIdempotent(_) | Error::Postcondition(_)) => break,
            Err(e) => return Err(e),
        };
        out.push(f00_objective(a, m, &g, f)?);
    }
    Ok(out)
}

fn require_fni0_admissible(f: &ScalarFn) -> Result<()> {
    f.validate_vanishes_at_neg_inf()?;
    if !f.props().increasing {
        return Err(Error::Precondition(format!(
            "{} is not increasing",
            f.label()
        )));
    }
    Ok(())
}

/// `tr f(H + A)` for increasing `f` with `f(−∞) = 0`.
pub fn fni0_objective(a: &HermitianMatrix, h: &RankConstrainedShift, f: &ScalarFn) -> Result<f64> {
    require_fni0_admissible(f)?;
    trace_function(&a.add(h.matrix())?, f)
}

/// Left side of the shift formula: `Σ_{i≤k} λ↑_i(f(A))`.
pub fn fni0_lower_bound(a: &HermitianMatrix, k: usize, f: &ScalarFn) -> Result<f64> {
    require_fni0_admissible(f)?;
    exact_partial_sum(a, k, f, Side::Smallest)
}

/// `H_δ = Q Λ_δ Q*` in the eigenbasis of `A`: zero on the bottom `k`
/// positions and `−δ − λ↑_i(A)` above them, so `H_δ + A` has spectrum
/// `λ↑_1, …, λ↑_k, −δ, …, −δ`.
pub fn fni0_shift(a: &HermitianMatrix, k: usize, delta: f64) -> Result<RankConstrainedShift> {
    let n = a.dim();
    check_k(k, n)?;
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let eig = eig_hermitian(a)?;
    let shifts: Vec<f64> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &lam)| if i < k { 0.0 } else { -delta - lam })
        .collect();
    let top = shifts.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(bad) = shifts[k..].iter().find(|&&s| s >= -RANK_TOLERANCE * top) {
        return Err(Error::Precondition(format!(
            "delta = {delta} too small: shift entry {bad} is not negative"
        )));
    }
    Ok(RankConstrainedShift {
        matrix: crate::linalg::HermitianMatrix::from_spectral(&eig.vectors, &shifts),
        rank: n - k,
    })
}

/// `Σ_{i=m1+1..m2} λ↓_i(A)`.
pub fn courant_fischer_window(a: &HermitianMatrix, m1: usize, m2: usize) -> Result<f64> {
    let n = a.dim();
    if m1 >= m2 || m2 > n {
        return Err(Error::IndexOutOfRange(format!(
            "window ({m1}, {m2}] invalid for dimension {n}"
        )));
    }
    let desc = eig_hermitian(a)?.descending();
    Ok(desc[m1..m2].iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowProbeReport {
    pub window: f64,
    /// Max over sampled `U` of `min_V tr[V*U*AUV]`.
    pub max_sampled_min: f64,
    /// `min_V tr[V*U*AUV]` at `U` spanning the top-`m2` eigenvectors.
    pub attained: f64,
    /// Samples where the inner minimum exceeded the window sum.
    pub violations: usize,
    /// Samples where a random `V` went below the exact inner minimum.
    pub inner_violations: usize,
    pub trials: usize,
}

/// Samples isometries `U` (n x m2) and checks `min_V tr[V*U*AUV] ≤ window`,
/// with equality at the top eigenvectors.
pub fn courant_fischer_probe(
    a: &HermitianMatrix,
    m1: usize,
    m2: usize,
    trials: usize,
    seed: u64,
) -> Result<WindowProbeReport> {
    let window = courant_fischer_window(a, m1, m2)?;
    let n = a.dim();
    let width = m2 - m1;
    let tol = 1e-9 * 1f64.max(a.frobenius_norm());
    let inner_min = |u: &ComplexMatrix| -> Result<(HermitianMatrix, f64)> {
        let b = a.congruence(u)?;
        let s = eig_hermitian(&b)?.extremal_sum(width, Side::Smallest)?;
        Ok((b, s))
    };
    let top = eig_hermitian(a)?.top_vectors(m2);
    let (_, attained) = inner_min(&top)?;
    let mut rng = stream_rng(seed, 0);
    let mut max_sampled_min = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut inner_violations = 0;
    for _ in 0..trials {
        let u = random_isometry(n, m2, &mut rng)?;
        let (b, s) = inner_min(&u)?;
        if s > window + tol {
            violations += 1;
        }
        max_sampled_min = max_sampled_min.max(s);
        let v = random_isometry(m2, width, &mut rng)?;
        if b.congruence(&v)?.trace() < s - tol {
            inner_violations += 1;
        }
    }
    Ok(WindowProbeReport {
        window,
        max_sampled_min,
        attained,
        violations,
        inner_violations,
        trials,
    })
}
