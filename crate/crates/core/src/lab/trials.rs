use rand::Rng;
use serde::Serialize;

use super::maps::{ConcavityMap, Endpoint, MapKind, MapOutput};
use super::random::{random_complex, random_psd};
use crate::error::{Error, Result};
use crate::forms::{FormKind, SymmetricForm};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix, SPECTRAL_FLOOR};
use crate::rng::stream_rng;

/// Deficits pass when `deficit ≥ −DEFICIT_TOLERANCE · scale`.
pub const DEFICIT_TOLERANCE: f64 = 1e-7;
/// A negative control counts as a violation below `−NEGATIVE_CONTROL_THRESHOLD`.
pub const NEGATIVE_CONTROL_THRESHOLD: f64 = 1e-6;

/// Outcome of one midpoint concavity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial_id: u64,
    pub seed: u64,
    pub map: MapKind,
    pub form: String,
    /// Output dimension.
    pub n: usize,
    /// Dimension of `A` (lieb, classic) or number of arguments (explog).
    pub m: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub tau: f64,
    /// `φ(F(τX + (1−τ)Y)) − [τ φ(F(X)) + (1−τ) φ(F(Y))]`.
    pub deficit: f64,
    /// `max(1, |φ(F(X))|, |φ(F(Y))|, |φ(F(mid))|)`.
    pub scale: f64,
    pub pass: bool,
}

/// Everything needed to replay a trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialInputs {
    #[serde(flatten)]
    pub map: ConcavityMap,
    pub form: SymmetricForm,
    pub x: Endpoint,
    pub y: Endpoint,
    pub tau: f64,
}

/// Map output reduced to what forms consume.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Evaluated {
    Spectrum { eigenvalues: Vec<f64>, scale: f64 },
    Scalar(f64),
}

impl Evaluated {
    /// Output eigenvalues with `|λ| ≤ SPECTRAL_FLOOR · ‖F‖_F` are set to 0: the maps
    /// are PSD-valued and rank deficient whenever `K` has fewer rows than columns.
    pub(crate) fn of(map: &ConcavityMap, x: &Endpoint) -> Result<Self> {
        Ok(match map.apply(x)? {
            MapOutput::Matrix(h) => {
                let scale = h.frobenius_norm();
                let eigenvalues = eig_hermitian(&h)?
                    .eigenvalues
                    .into_iter()
                    .map(|v| {
                        if v.abs() <= SPECTRAL_FLOOR * scale {
                            0.0
                        } else {
                            v
                        }
                    })
                    .collect();
                Evaluated::Spectrum { eigenvalues, scale }
            }
            MapOutput::Scalar(v) => Evaluated::Scalar(v),
        })
    }

    pub(crate) fn value(&self, form: &SymmetricForm) -> Result<f64> {
        match self {
            Evaluated::Spectrum { eigenvalues, scale } => form.eval_spectrum(eigenvalues, *scale),
            Evaluated::Scalar(v) if *form.kind() == FormKind::Trace => Ok(*v),
            Evaluated::Scalar(_) => Err(Error::Precondition(format!(
                "the classic functional only supports the Trace form, got {}",
                form.label()
            ))),
        }
    }

    /// `λ↑_1 / max(1, ‖F‖_F)` for matrix outputs.
    pub(crate) fn relative_min_eigenvalue(&self) -> Option<f64> {
        match self {
            Evaluated::Spectrum { eigenvalues, scale } => Some(eigenvalues[0] / scale.max(1.0)),
            Evaluated::Scalar(_) => None,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        match self {
            Evaluated::Spectrum { eigenvalues, .. } => eigenvalues.len(),
            Evaluated::Scalar(_) => 1,
        }
    }
}

/// Map outputs at both endpoints and at the interpolated point.
pub(crate) struct Triple {
    pub x: Evaluated,
    pub y: Evaluated,
    pub mid: Evaluated,
    pub tau: f64,
}

impl Triple {
    pub(crate) fn new(map: &ConcavityMap, x: &Endpoint, y: &Endpoint, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidParameter(format!(
                "tau = {tau} outside [0, 1]"
            )));
        }
        let mid = x.convex_combination(y, tau)?;
        Ok(Self {
            x: Evaluated::of(map, x)?,
            y: Evaluated::of(map, y)?,
            mid: Evaluated::of(map, &mid)?,
            tau,
        })
    }

    /// `(deficit, scale)` for `form`.
    pub(crate) fn deficit(&self, form: &SymmetricForm) -> Result<(f64, f64)> {
        let vx = self.x.value(form)?;
        let vy = self.y.value(form)?;
        let vm = self.mid.value(form)?;
        let deficit = vm - (self.tau * vx + (1.0 - self.tau) * vy);
        let scale = 1f64.max(vx.abs()).max(vy.abs()).max(vm.abs());
        Ok((deficit, scale))
    }
}

pub(crate) fn passes(deficit: f64, scale: f64, tolerance: f64) -> bool {
    deficit >= -tolerance * scale
}

/// `(n, m, p, q, s, weights)` echoed into reports.
type Echo = (
    usize,
    usize,
    Option<f64>,
    Option<f64>,
    Option<f64>,
    Option<Vec<f64>>,
);

pub(crate) fn echo(map: &ConcavityMap) -> Echo {
    match map {
        ConcavityMap::Lieb(pr) => (
            pr.k.cols(),
            pr.k.rows(),
            Some(pr.p),
            Some(pr.q),
            Some(pr.s),
            None,
        ),
        ConcavityMap::Explog(pr) => (
            pr.h.dim(),
            pr.weights.len(),
            None,
            None,
            None,
            Some(pr.weights.clone()),
        ),
        ConcavityMap::Classic { k, p, q } => (k.cols(), k.rows(), Some(*p), Some(*q), None, None),
    }
}

pub(crate) fn build_report(
    map: &ConcavityMap,
    form: &SymmetricForm,
    tau: f64,
    deficit: f64,
    scale: f64,
    tolerance: f64,
) -> TrialReport {
    let (n, m, p, q, s, weights) = echo(map);
    TrialReport {
        trial_id: 0,
        seed: 0,
        map: map.kind(),
        form: form.label(),
        n,
        m,
        p,
        q,
        s,
        weights,
        tau,
        deficit,
        scale,
        pass: passes(deficit, scale, tolerance),
    }
}

fn require_monotone_concave(form: &SymmetricForm) -> Result<()> {
    let d = form.declared();
    if !(d.monotone && d.concave) {
        return Err(Error::Precondition(format!(
            "{} is not declared monotone and concave",
            form.label()
        )));
    }
    Ok(())
}

/// Midpoint deficit of `φ ∘ F` between `x` and `y`; passes at tolerance 1e-7.
pub fn midpoint_concavity_trial(
    map: &ConcavityMap,
    form: &SymmetricForm,
    x: &Endpoint,
    y: &Endpoint,
    tau: f64,
) -> Result<TrialReport> {
    require_monotone_concave(form)?;
    let (deficit, scale) = Triple::new(map, x, y, tau)?.deficit(form)?;
    Ok(build_report(
        map,
        form,
        tau,
        deficit,
        scale,
        DEFICIT_TOLERANCE,
    ))
}

/// A negative-control violation with its full inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeExemplar {
    pub trial_id: u64,
    pub deficit: f64,
    pub inputs: TrialInputs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeControlReport {
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    /// Scalar instance `(2, 2)`, `(0, 0)` at `τ = 1/2`.
    pub deterministic: TrialReport,
    pub search_trials: usize,
    /// Search trials with deficit below `−1e-6`.
    pub violations: usize,
    pub min_deficit: Option<f64>,
    pub first_violation: Option<NegativeExemplar>,
}

impl NegativeControlReport {
    /// A control is effective when both the scalar instance and the search violate concavity.
    pub fn detected(&self) -> bool {
        self.deterministic.deficit < -NEGATIVE_CONTROL_THRESHOLD && self.violations > 0
    }
}

fn scalar_pair(a: f64, b: f64) -> Endpoint {
    Endpoint::Pair {
        a: HermitianMatrix::from_real_diag(&[a]),
        b: HermitianMatrix::from_real_diag(&[b]),
    }
}

/// Checks that `tr[K* A^p K B^q]` fails to be concave for `p + q > 1`.
///
/// Runs the scalar instance `(2, 2)`, `(0, 0)` at `τ = 1/2` (deficit
/// `1 − 2^{p+q−1}`), then `search_trials` random 2x2 instances with the trace
/// form; half of them use proportional endpoints `Y = cX`.
pub fn negative_control_trial(
    p: f64,
    q: f64,
    seed: u64,
    search_trials: usize,
) -> Result<NegativeControlReport> {
    if !p.is_finite() || !q.is_finite() || p + q <= 1.0 || p < 0.0 || q < 0.0 {
        return Err(Error::Precondition(format!(
            "negative controls need p, q ≥ 0 with p + q > 1, got p = {p}, q = {q}"
        )));
    }
    let trace = SymmetricForm::trace();
    let scalar_map = ConcavityMap::Classic {
        k: ComplexMatrix::identity(1),
        p,
        q,
    };
    let (deficit, scale) = Triple::new(
        &scalar_map,
        &scalar_pair(2.0, 2.0),
        &scalar_pair(0.0, 0.0),
        0.5,
    )?
    .deficit(&trace)?;
    let mut deterministic =
        build_report(&scalar_map, &trace, 0.5, deficit, scale, DEFICIT_TOLERANCE);
    deterministic.seed = seed;

    let mut violations = 0;
    let mut min_deficit: Option<f64> = None;
    let mut first_violation = None;
    for i in 0..search_trials {
        let mut rng = stream_rng(seed, i as u64);
        let map = ConcavityMap::Classic {
            k: random_complex(2, 2, &mut rng)?,
            p,
            q,
        };
        let x = Endpoint::Pair {
            a: random_psd(2, &mut rng)?,
            b: random_psd(2, &mut rng)?,
        };
        let y = if rng.random_bool(0.5) {
            let c: f64 = rng.random_range(0.0..3.0);
            match &x {
                Endpoint::Pair { a, b } => Endpoint::Pair {
                    a: a.scale(c),
                    b: b.scale(c),
                },
                Endpoint::Tuple(_) => unreachable!(),
            }
        } else {
            Endpoint::Pair {
                a: random_psd(2, &mut rng)?,
                b: random_psd(2, &mut rng)?,
            }
        };
        let tau: f64 = rng.random_range(0.0..=1.0);
        let (d, _) = Triple::new(&map, &x, &y, tau)?.deficit(&trace)?;
        min_deficit = Some(min_deficit.map_or(d, |m| m.min(d)));
        if d < -NEGATIVE_CONTROL_THRESHOLD {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some(NegativeExemplar {
                    trial_id: i as u64,
                    deficit: d,
                    inputs: TrialInputs {
                        map,
                        form: trace.clone(),
                        x,
                        y,
                        tau,
                    },
                });
            }
        }
    }
    Ok(NegativeControlReport {
        p,
        q,
        seed,
        deterministic,
        search_trials,
        violations,
        min_deficit,
        first_violation,
    })
}
