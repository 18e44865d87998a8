//! Symmetric forms: permutation-invariant functions of a real vector, extended
//! to Hermitian matrices by evaluation on the spectrum.
//!
//! Every form carries declared shape flags (monotone, concave, convex). Base
//! families get them from their known shape; compositions derive them from
//! the shape of the scalar function and of the wrapped form. Declarations are
//! metadata and are exercised by [`probe_monotone_concave`] rather than proven.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{admit_spectrum, eig_hermitian, HermitianMatrix, Interval, ScalarFn};
use crate::rng::stream_rng;

/// Largest vector length accepted by the subset enumeration of `GeomMeanSum`.
pub const GEOM_MEAN_MAX_DIM: usize = 20;

/// Relative tolerance used to flag monotonicity or concavity violations.
pub const PROBE_TOLERANCE: f64 = 1e-9;

/// Closed set of form families plus the two composition orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FormKind {
    /// `e_k(x)^{1/k}`.
    KTrace {
        k: usize,
    },
    /// `Σ_{|S|=k} (Π_{i∈S} x_i)^{1/k}`.
    GeomMeanSum {
        k: usize,
    },
    /// `(Σ x_i^p)^{1/p}` for `p ∈ (−∞, 0) ∪ (0, 1]`.
    SemiPNorm {
        p: f64,
    },
    /// `Σ a↓_i x↑_i`.
    WeightedSmallest {
        a: Vec<f64>,
    },
    /// `Σ a_i x↑_i` with the weights kept in the given order.
    OrderedWeights {
        a: Vec<f64>,
    },
    SmallestK {
        k: usize,
    },
    LargestK {
        k: usize,
    },
    Trace,
    /// `f(φ(x))`.
    OuterCompose {
        f: ScalarFn,
        inner: Box<SymmetricForm>,
    },
    /// `φ(f(x_1), …, f(x_n))`.
    InnerCompose {
        outer: Box<SymmetricForm>,
        f: ScalarFn,
    },
}

/// Shape declarations carried by a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declared {
    pub monotone: bool,
    pub concave: bool,
    pub convex: bool,
}

/// Composition order for [`compose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComposeOrder {
    /// `f ∘ φ`
    Outer,
    /// `φ ∘ f`
    Inner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormKind", into = "FormKind")]
pub struct SymmetricForm {
    kind: FormKind,
    declared: Declared,
    domain: Interval,
    range: Interval,
}

impl TryFrom<FormKind> for SymmetricForm {
    type Error = Error;

    fn try_from(kind: FormKind) -> Result<Self> {
        SymmetricForm::new(kind)
    }
}

impl From<SymmetricForm> for FormKind {
    fn from(form: SymmetricForm) -> FormKind {
        form.kind
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Ok(())
}

fn check_weights(a: &[f64]) -> Result<()> {
    if a.is_empty() || a.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter(
            "weights must be a non-empty finite vector".into(),
        ));
    }
    Ok(())
}

/// Image of `interval` under `f`, or `None` when `f` is not known to be increasing there.
fn image_under(f: &ScalarFn, interval: &Interval) -> Option<Interval> {
    if !f.props_on(interval).increasing {
        return None;
    }
    let lo = f.eval(interval.lo);
    let hi = f.eval(interval.hi);
    if lo.is_nan() || hi.is_nan() {
        return None;
    }
    Some(Interval {
        lo,
        hi,
        lo_open: interval.lo_open || lo.is_infinite(),
        hi_open: interval.hi_open || hi.is_infinite(),
    })
}

impl SymmetricForm {
    pub fn new(kind: FormKind) -> Result<Self> {
        let yes = Declared {
            monotone: true,
            concave: true,
            convex: false,
        };
        let (declared, domain, range) = match &kind {
            FormKind::KTrace { k } | FormKind::GeomMeanSum { k } => {
                check_k(*k)?;
                let declared = Declared {
                    convex: *k == 1,
                    ..yes
                };
                (declared, Interval::nonnegative(), Interval::nonnegative())
            }
            FormKind::SemiPNorm { p } => {
                if !p.is_finite() || *p == 0.0 || *p > 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "semi p-norm needs p in (-inf, 0) or (0, 1], got {p}"
                    )));
                }
                let declared = Declared {
                    convex: *p == 1.0,
                    ..yes
                };
                if *p < 0.0 {
                    (declared, Interval::positive(), Interval::positive())
                } else {
                    (declared, Interval::nonnegative(), Interval::nonnegative())
                }
            }
            FormKind::WeightedSmallest { a } => {
                check_weights(a)?;
                let declared = Declared {
                    monotone: a.iter().all(|&w| w >= 0.0),
                    concave: true,
                    convex: a.iter().all(|&w| w == a[0]),
                };
                (declared, Interval::all_reals(), Interval::all_reals())
            }
            FormKind::OrderedWeights { a } => {
                check_weights(a)?;
                let declared = Declared {
                    monotone: a.iter().all(|&w| w >= 0.0),
                    concave: a.windows(2).all(|w| w[0] >= w[1]),
                    convex: a.windows(2).all(|w| w[0] <= w[1]),
                };
                (declared, Interval::all_reals(), Interval::all_reals())
            }
            FormKind::SmallestK { k } => {
                check_k(*k)?;
                (yes, Interval::all_reals(), Interval::all_reals())
            }
            FormKind::LargestK { k } => {
                check_k(*k)?;
                let declared = Declared {
                    monotone: true,
                    concave: false,
                    convex: true,
                };
                (declared, Interval::all_reals(), Interval::all_reals())
            }
            FormKind::Trace => (
                Declared {
                    monotone: true,
                    concave: true,
                    convex: true,
                },
                Interval::all_reals(),
                Interval::all_reals(),
            ),
            FormKind::OuterCompose { f, inner } => {
                if !inner.range.is_subset_of(&f.domain()) {
                    return Err(Error::InconsistentDeclaration(format!(
                        "range {} of the inner form is not inside the domain {} of {}",
                        inner.range,
                        f.domain(),
                        f.label()
                    )));
                }
                let fp = f.props_on(&inner.range);
                let declared = Declared {
                    monotone: inner.declared.monotone && fp.increasing,
                    concave: inner.declared.concave && fp.increasing && fp.concave,
                    convex: inner.declared.convex && fp.increasing && fp.convex,
                };
                let range = image_under(f, &inner.range).unwrap_or(Interval::all_reals());
                (declared, inner.domain, range)
            }
            FormKind::InnerCompose { outer, f } => {
                let image = image_under(f, &f.domain());
                let fits = match image {
                    Some(img) => img.is_subset_of(&outer.domain),
                    None => outer.domain == Interval::all_reals(),
                };
                if !fits {
                    return Err(Error::InconsistentDeclaration(format!(
                        "values of {} are not known to stay inside the domain {} of the outer form",
                        f.label(),
                        outer.domain
                    )));
                }
                let fp = f.props();
                let declared = Declared {
                    monotone: fp.increasing && outer.declared.monotone,
                    concave: fp.concave && outer.declared.monotone && outer.declared.concave,
                    convex: fp.convex && outer.declared.monotone && outer.declared.convex,
                };
                (declared, f.domain(), outer.range)
            }
        };
        Ok(Self {
            kind,
            declared,
            domain,
            range,
        })
    }

    pub fn k_trace(k: usize) -> Result<Self> {
        Self::new(FormKind::KTrace { k })
    }

    pub fn geom_mean_sum(k: usize) -> Result<Self> {
        Self::new(FormKind::GeomMeanSum { k })
    }

    pub fn semi_p_norm(p: f64) -> Result<Self> {
        Self::new(FormKind::SemiPNorm { p })
    }

    pub fn weighted_smallest(a: Vec<f64>) -> Result<Self> {
        Self::new(FormKind::WeightedSmallest { a })
    }

    pub fn smallest_k(k: usize) -> Result<Self> {
        Self::new(FormKind::SmallestK { k })
    }

    pub fn largest_k(k: usize) -> Result<Self> {
        Self::new(FormKind::LargestK { k })
    }

    pub fn trace() -> Self {
        Self::new(FormKind::Trace).expect("trace has no parameters")
    }

    pub fn kind(&self) -> &FormKind {
        &self.kind
    }

    pub fn declared(&self) -> Declared {
        self.declared
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Replaces the declarations. Flags may be dropped freely but can only be
    /// raised when the construction rules already support them.
    pub fn with_declared(mut self, declared: Declared) -> Result<Self> {
        let derived = self.declared;
        let raised = (declared.monotone && !derived.monotone)
            || (declared.concave && !derived.concave)
            || (declared.convex && !derived.convex);
        if raised {
            return Err(Error::InconsistentDeclaration(format!(
                "{} supports {derived:?}, cannot declare {declared:?}",
                self.label()
            )));
        }
        self.declared = declared;
        Ok(self)
    }

    /// Short human-readable name, e.g. `KTrace(2)`.
    pub fn label(&self) -> String {
        match &self.kind {
            FormKind::KTrace { k } => format!("KTrace({k})"),
            FormKind::GeomMeanSum { k } => format!("GeomMeanSum({k})"),
            FormKind::SemiPNorm { p } => format!("SemiPNorm({p})"),
            FormKind::WeightedSmallest { a } => format!("WeightedSmallest({a:?})"),
            FormKind::OrderedWeights { a } => format!("OrderedWeights({a:?})"),
            FormKind::SmallestK { k } => format!("SmallestK({k})"),
            FormKind::LargestK { k } => format!("LargestK({k})"),
            FormKind::Trace => "Trace".into(),
            FormKind::OuterCompose { f, inner } => format!("{}∘{}", f.label(), inner.label()),
            FormKind::InnerCompose { outer, f } => format!("{}∘{}", outer.label(), f.label()),
        }
    }

    /// Parses the JSON descriptor form, e.g. `{"kind":"KTrace","k":2}`.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// `φ(x)`.
    pub fn eval_vector(&self, x: &[f64]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::InvalidParameter("empty input vector".into()));
        }
        if let Some((i, v)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !self.domain.contains(**v))
        {
            return Err(Error::Domain(format!(
                "entry {i} = {v} outside domain {} of {}",
                self.domain,
                self.label()
            )));
        }
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &[f64]) -> Result<f64> {
        let n = x.len();
        let need_k = |k: usize| -> Result<()> {
            if k > n {
                return Err(Error::IndexOutOfRange(format!(
                    "k = {k} exceeds length {n}"
                )));
            }
            Ok(())
        };
        let need_len = |a: &[f64]| -> Result<()> {
            if a.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} weights for a vector of length {n}",
                    a.len()
                )));
            }
            Ok(())
        };
        Ok(match &self.kind {
            FormKind::KTrace { k } => {
                need_k(*k)?;
                elementary_symmetric(x, *k)?.powf(1.0 / *k as f64)
            }
            FormKind::GeomMeanSum { k } => {
                need_k(*k)?;
                geom_mean_sum(x, *k)?
            }
            FormKind::SemiPNorm { p } => x.iter().map(|v| v.powf(*p)).sum::<f64>().powf(1.0 / p),
            FormKind::WeightedSmallest { a } => {
                need_len(a)?;
                let mut a = a.clone();
                a.sort_by(|u, v| v.total_cmp(u));
                dot_with_ascending(&a, x)
            }
            FormKind::OrderedWeights { a } => {
                need_len(a)?;
                dot_with_ascending(a, x)
            }
            FormKind::SmallestK { k } => {
                need_k(*k)?;
                ascending(x)[..*k].iter().sum()
            }
            FormKind::LargestK { k } => {
                need_k(*k)?;
                ascending(x)[n - *k..].iter().sum()
            }
            FormKind::Trace => x.iter().sum(),
            FormKind::OuterCompose { f, inner } => {
                let v = inner.eval_unchecked(x)?;
                let v = f
                    .domain()
                    .admit(v, 1e-12 * v.abs().max(1.0))
                    .ok_or_else(|| {
                        Error::Domain(format!("{v} outside the domain of {}", f.label()))
                    })?;
                f.eval(v)
            }
            FormKind::InnerCompose { outer, f } => {
                let y: Vec<f64> = x.iter().map(|&v| f.eval(v)).collect();
                outer.eval_vector(&y)?
            }
        })
    }

    /// `φ(λ(A))`; the spectrum is snapped onto the domain with the spectral floor.
    pub fn eval_matrix(&self, a: &HermitianMatrix) -> Result<f64> {
        let eig = eig_hermitian(a)?;
        self.eval_spectrum(&eig.eigenvalues, a.frobenius_norm())
    }

    /// Evaluates on a precomputed spectrum, with `scale` setting the spectral floor.
    pub fn eval_spectrum(&self, eigenvalues: &[f64], scale: f64) -> Result<f64> {
        let lam = admit_spectrum(eigenvalues, &self.domain, scale, &self.label())?;
        self.eval_vector(&lam)
    }
}

fn ascending(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn dot_with_ascending(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(ascending(x)).map(|(w, v)| w * v).sum()
}

/// `e_k(x)` by the prefix recurrence `e_j ← e_j + x_m e_{j−1}`.
pub fn elementary_symmetric(x: &[f64], k: usize) -> Result<f64> {
    let n = x.len();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!("k = {k} outside 1..={n}")));
    }
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (m, &v) in x.iter().enumerate() {
        for j in (1..=k.min(m + 1)).rev() {
            e[j] += v * e[j - 1];
        }
    }
    Ok(e[k])
}

/// Direct enumeration of k-subsets; cost grows like `C(n, k)`.
fn geom_mean_sum(x: &[f64], k: usize) -> Result<f64> {
    let n = x.len();
    if n > GEOM_MEAN_MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "GeomMeanSum enumerates subsets and is limited to n <= {GEOM_MEAN_MAX_DIM}, got {n}"
        )));
    }
    let inv_k = 1.0 / k as f64;
    let mut idx: Vec<usize> = (0..k).collect();
    let mut total = 0.0;
    loop {
        let prod: f64 = idx.iter().map(|&i| x[i]).product();
        total += prod.powf(inv_k);
        // Advance to the next combination in lexicographic order.
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(total)
}

/// Builds `f ∘ φ` or `φ ∘ f` with flags set by the composition rules.
pub fn compose(form: &SymmetricForm, f: ScalarFn, order: ComposeOrder) -> Result<SymmetricForm> {
    let kind = match order {
        ComposeOrder::Outer => FormKind::OuterCompose {
            f,
            inner: Box::new(form.clone()),
        },
        ComposeOrder::Inner => FormKind::InnerCompose {
            outer: Box::new(form.clone()),
            f,
        },
    };
    SymmetricForm::new(kind)
}

/// Outcome of randomized monotonicity and midpoint-concavity sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub form: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Most negative `φ(y) − φ(x)` over sampled `x ≤ y`.
    pub min_monotone_gap: f64,
    /// Most negative `φ((x+y)/2) − (φ(x)+φ(y))/2`.
    pub min_concavity_deficit: f64,
    pub monotone_violations: usize,
    pub concavity_violations: usize,
    /// Pair `(x, y)` that produced `min_monotone_gap`.
    pub worst_monotone_pair: Option<(Vec<f64>, Vec<f64>)>,
    /// Pair `(x, y)` that produced `min_concavity_deficit`.
    pub worst_concavity_pair: Option<(Vec<f64>, Vec<f64>)>,
}

fn sample_in<R: Rng + ?Sized>(domain: &Interval, n: usize, rng: &mut R) -> Vec<f64> {
    let lo = if domain.lo.is_finite() {
        domain.lo + if domain.lo_open { 0.05 } else { 0.0 }
    } else if domain.hi.is_finite() {
        domain.hi - 3.0
    } else {
        -3.0
    };
    let hi = if domain.hi.is_finite() {
        domain.hi - if domain.hi_open { 0.05 } else { 0.0 }
    } else {
        lo + 3.0
    };
    (0..n)
        .map(|_| {
            // Occasionally pin an entry to a closed lower end to exercise the boundary.
            if !domain.lo_open && domain.lo.is_finite() && rng.random_bool(0.1) {
                lo
            } else {
                rng.random_range(lo..=hi)
            }
        })
        .collect()
}

/// Samples `x ≤ y` pairs and random midpoints inside the form's domain and
/// records the worst monotonicity gap and concavity deficit.
pub fn probe_monotone_concave(
    form: &SymmetricForm,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "probe dimension must be positive".into(),
        ));
    }
    let mut rng = stream_rng(seed, 0);
    let domain = form.domain();
    let mut report = ProbeReport {
        form: form.label(),
        n,
        trials,
        seed,
        min_monotone_gap: f64::INFINITY,
        min_concavity_deficit: f64::INFINITY,
        monotone_violations: 0,
        concavity_violations: 0,
        worst_monotone_pair: None,
        worst_concavity_pair: None,
    };
    for _ in 0..trials {
        let x = sample_in(&domain, n, &mut rng);
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                let bumped = v + rng.random_range(0.0..1.0);
                if domain.contains(bumped) {
                    bumped
                } else {
                    v
                }
            })
            .collect();
        let (fx, fy) = (form.eval_vector(&x)?, form.eval_vector(&y)?);
        let gap = fy - fx;
        let scale = 1f64.max(fx.abs()).max(fy.abs());
        if gap < -PROBE_TOLERANCE * scale {
            report.monotone_violations += 1;
        }
        if gap < report.min_monotone_gap {
            report.min_monotone_gap = gap;
            report.worst_monotone_pair = Some((x, y));
        }

        let u = sample_in(&domain, n, &mut rng);
        let v = sample_in(&domain, n, &mut rng);
        let mid: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
        let (fu, fv, fm) = (
            form.eval_vector(&u)?,
            form.eval_vector(&v)?,
            form.eval_vector(&mid)?,
        );
        let deficit = fm - 0.5 * (fu + fv);
        let scale = 1f64.max(fu.abs()).max(fv.abs());
        if deficit < -PROBE_TOLERANCE * scale {
            report.concavity_violations += 1;
        }
        if deficit < report.min_concavity_deficit {
            report.min_concavity_deficit = deficit;
            report.worst_concavity_pair = Some((u, v));
        }
    }
    Ok(report)
}
