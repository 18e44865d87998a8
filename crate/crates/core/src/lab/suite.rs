use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maps::{ConcavityMap, Endpoint, ExpLogParams, LiebMapParams, MapKind};
use super::random::{random_complex, random_hermitian, random_posdef, random_psd};
use super::trials::{
    build_report, negative_control_trial, passes, NegativeControlReport, TrialInputs, TrialReport,
    Triple, DEFICIT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::forms::{FormKind, SymmetricForm};
use crate::rng::{stream_rng, TrialRng};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 1000;
/// Spectral floor added to explog endpoints.
pub const EXPLOG_FLOOR: f64 = 0.05;
/// Probability that `p` (and independently `q`) is set to exactly 0 in lieb trials.
pub const ZERO_EXPONENT_PROBABILITY: f64 = 0.1;
pub const S_CHOICES: [f64; 3] = [0.25, 0.5, 1.0];
/// `λ↑_1(F) ≥ −PSD_CLOSURE_TOLERANCE · max(1, ‖F‖_F)` on every output.
pub const PSD_CLOSURE_TOLERANCE: f64 = 1e-9;
/// Largest dimension accepted in a suite config.
pub const MAX_SUITE_DIM: usize = 12;
/// Forced `τ` values of trials 0, 1 and 2.
const FORCED_TAUS: [f64; 3] = [0.0, 0.5, 1.0];

/// Form families whose `k` is drawn per trial from `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KFamily {
    KTrace,
    GeomMeanSum,
    SmallestK,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormSpec {
    Fixed(SymmetricForm),
    RandomK(KFamily),
}

impl FormSpec {
    pub fn label(&self) -> String {
        match self {
            FormSpec::Fixed(form) => form.label(),
            FormSpec::RandomK(family) => format!("{family:?}(k)"),
        }
    }

    fn resolve(&self, n: usize, rng: &mut TrialRng) -> Result<SymmetricForm> {
        match self {
            FormSpec::Fixed(form) => Ok(form.clone()),
            FormSpec::RandomK(family) => {
                let k = rng.random_range(1..=n);
                match family {
                    KFamily::KTrace => SymmetricForm::k_trace(k),
                    KFamily::GeomMeanSum => SymmetricForm::geom_mean_sum(k),
                    KFamily::SmallestK => SymmetricForm::smallest_k(k),
                }
            }
        }
    }
}

/// Settings of the `p + q > 1` control run alongside a suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NegativeControlConfig {
    pub p: f64,
    pub q: f64,
    pub search_trials: usize,
}

impl Default for NegativeControlConfig {
    fn default() -> Self {
        Self {
            p: 0.9,
            q: 0.9,
            search_trials: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub map: MapKind,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Empty means the map's default form list.
    pub forms: Vec<FormSpec>,
    /// Inclusive range of the output dimension `n`; `None` means the map default.
    pub n_range: Option<[usize; 2]>,
    /// Inclusive range of `m` (dimension of `A`, or argument count for explog).
    pub m_range: Option<[usize; 2]>,
    /// Failure exemplars kept per form.
    pub max_exemplars: usize,
    pub negative_control: Option<NegativeControlConfig>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::new(MapKind::Lieb)
    }
}

impl SuiteConfig {
    pub fn new(map: MapKind) -> Self {
        Self {
            map,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            tolerance: DEFICIT_TOLERANCE,
            forms: Vec::new(),
            n_range: None,
            m_range: None,
            max_exemplars: 5,
            negative_control: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn form_specs(&self) -> Vec<FormSpec> {
        if !self.forms.is_empty() {
            return self.forms.clone();
        }
        match self.map {
            MapKind::Classic => vec![FormSpec::Fixed(SymmetricForm::trace())],
            MapKind::Lieb | MapKind::Explog => vec![
                FormSpec::RandomK(KFamily::KTrace),
                FormSpec::RandomK(KFamily::GeomMeanSum),
                FormSpec::Fixed(SymmetricForm::semi_p_norm(0.5).expect("p = 1/2 is admissible")),
                FormSpec::RandomK(KFamily::SmallestK),
                FormSpec::Fixed(SymmetricForm::trace()),
            ],
        }
    }

    pub fn dims(&self) -> ([usize; 2], [usize; 2]) {
        let (n, m) = match self.map {
            MapKind::Lieb | MapKind::Classic => ([2, 6], [2, 6]),
            MapKind::Explog => ([2, 5], [1, 3]),
        };
        (self.n_range.unwrap_or(n), self.m_range.unwrap_or(m))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        let (n, m) = self.dims();
        for (name, [lo, hi]) in [("n_range", n), ("m_range", m)] {
            if lo == 0 || lo > hi || hi > MAX_SUITE_DIM {
                return Err(Error::InvalidParameter(format!(
                    "{name} [{lo}, {hi}] must satisfy 1 ≤ lo ≤ hi ≤ {MAX_SUITE_DIM}"
                )));
            }
        }
        for spec in self.form_specs() {
            let FormSpec::Fixed(form) = &spec else {
                if self.map == MapKind::Classic {
                    return Err(Error::InvalidParameter(
                        "the classic map only supports the Trace form".into(),
                    ));
                }
                continue;
            };
            let d = form.declared();
            if !(d.monotone && d.concave) {
                return Err(Error::InvalidParameter(format!(
                    "{} is not declared monotone and concave",
                    form.label()
                )));
            }
            if self.map == MapKind::Classic && *form.kind() != FormKind::Trace {
                return Err(Error::InvalidParameter(format!(
                    "the classic map only supports the Trace form, got {}",
                    form.label()
                )));
            }
            for len in [n[0], n[1]] {
                form.eval_vector(&vec![1.0; len]).map_err(|e| {
                    Error::InvalidParameter(format!(
                        "{} cannot be evaluated in dimension {len}: {e}",
                        form.label()
                    ))
                })?;
            }
        }
        if let Some(nc) = &self.negative_control {
            if !(nc.p >= 0.0 && nc.q >= 0.0 && nc.p + nc.q > 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "negative control needs p, q ≥ 0 with p + q > 1, got p = {}, q = {}",
                    nc.p, nc.q
                )));
            }
        }
        Ok(())
    }
}

/// A failing trial with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exemplar {
    pub trial_id: u64,
    pub deficit: f64,
    pub scale: f64,
    pub inputs: TrialInputs,
}

/// Aggregate for one `(map, form)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub map: MapKind,
    pub form: String,
    pub trials: usize,
    pub failures: usize,
    /// `None` when no trial ran.
    pub min_deficit: Option<f64>,
    pub exemplars: Vec<Exemplar>,
}

/// Outcome of the smallest-k implication check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceSummary {
    pub trials: usize,
    /// Trials where every `SmallestK(k)`, `k = 1..=n`, passed.
    pub all_k_pass: usize,
    /// Trials where every `SmallestK(k)` passed but some configured form failed.
    pub defects: usize,
    pub defect_trials: Vec<u64>,
    /// Largest `|deficit(Trace) − deficit(SmallestK(n))|` when Trace is configured.
    pub max_trace_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdClosure {
    /// Smallest `λ↑_1(F) / max(1, ‖F‖_F)` over every map output.
    pub min_relative_eigenvalue: Option<f64>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub version: String,
    /// Filled in by callers; the only nondeterministic field.
    pub timestamp: Option<String>,
    pub map: MapKind,
    pub trials: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub meta: ReportMeta,
    pub suites: Vec<SuiteSummary>,
    pub equivalence: Option<EquivalenceSummary>,
    pub psd_closure: Option<PsdClosure>,
    pub negative_control: Option<NegativeControlReport>,
    /// One entry per (trial, form), ordered by trial then form.
    #[serde(skip)]
    pub trials: Vec<TrialReport>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    trial_id: u64,
    map: MapKind,
    form: &'a str,
    n: usize,
    m: usize,
    p: Option<f64>,
    q: Option<f64>,
    s: Option<f64>,
    tau: f64,
    deficit: f64,
    scale: f64,
    pass: bool,
}

impl SuiteReport {
    /// Concavity failures, equivalence defects and PSD-closure violations.
    /// Negative-control violations are expected and not counted.
    pub fn unexpected_failures(&self) -> usize {
        self.suites.iter().map(|s| s.failures).sum::<usize>()
            + self.equivalence.as_ref().map_or(0, |e| e.defects)
            + self.psd_closure.as_ref().map_or(0, |p| p.violations)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One row per (trial, form): `trial_id,map,form,n,m,p,q,s,tau,deficit,scale,pass`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.trials.is_empty() {
            w.write_record([
                "trial_id", "map", "form", "n", "m", "p", "q", "s", "tau", "deficit", "scale",
                "pass",
            ])
            .map_err(|e| Error::Parse(e.to_string()))?;
        }
        for t in &self.trials {
            w.serialize(CsvRow {
                trial_id: t.trial_id,
                map: t.map,
                form: &t.form,
                n: t.n,
                m: t.m,
                p: t.p,
                q: t.q,
                s: t.s,
                tau: t.tau,
                deficit: t.deficit,
                scale: t.scale,
                pass: t.pass,
            })
            .map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

struct Instance {
    map: ConcavityMap,
    x: Endpoint,
    y: Endpoint,
    tau: f64,
}

/// Draws `(p, q)` uniformly from the triangle `p, q ≥ 0`, `p + q ≤ 1`.
fn sample_pq(rng: &mut TrialRng, allow_zero: bool) -> (f64, f64) {
    let (mut p, mut q): (f64, f64) = loop {
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let (u, v) = if u + v > 1.0 {
            (1.0 - u, 1.0 - v)
        } else {
            (u, v)
        };
        if allow_zero || (u > 0.0 && v > 0.0) {
            break (u, v);
        }
    };
    if allow_zero {
        if rng.random_bool(ZERO_EXPONENT_PROBABILITY) {
            p = 0.0;
        }
        if rng.random_bool(ZERO_EXPONENT_PROBABILITY) {
            q = 0.0;
        }
    }
    (p, q)
}

fn sample_instance(config: &SuiteConfig, trial: u64, rng: &mut TrialRng) -> Result<Instance> {
    let ([n_lo, n_hi], [m_lo, m_hi]) = config.dims();
    let n = rng.random_range(n_lo..=n_hi);
    let m = rng.random_range(m_lo..=m_hi);
    let (map, x, y) = match config.map {
        MapKind::Lieb | MapKind::Classic => {
            let k = random_complex(m, n, rng)?;
            let lieb = config.map == MapKind::Lieb;
            let (p, q) = sample_pq(rng, lieb);
            let map = if lieb {
                let s = S_CHOICES[rng.random_range(0..S_CHOICES.len())];
                ConcavityMap::Lieb(LiebMapParams::new(k, p, q, s)?)
            } else {
                ConcavityMap::Classic { k, p, q }
            };
            let mut pair = || -> Result<Endpoint> {
                Ok(Endpoint::Pair {
                    a: random_psd(m, rng)?,
                    b: random_psd(n, rng)?,
                })
            };
            let x = pair()?;
            let y = pair()?;
            (map, x, y)
        }
        MapKind::Explog => {
            let h = random_hermitian(n, rng)?;
            let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            let total: f64 = if rng.random_bool(0.25) {
                1.0
            } else {
                rng.random()
            };
            let sum: f64 = raw.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            let weights = raw.iter().map(|u| (u / sum * total).min(1.0)).collect();
            let map = ConcavityMap::Explog(ExpLogParams::new(h, weights)?);
            let mut tuple = || -> Result<Endpoint> {
                Ok(Endpoint::Tuple(
                    (0..m)
                        .map(|_| random_posdef(n, rng, EXPLOG_FLOOR))
                        .collect::<Result<_>>()?,
                ))
            };
            let x = tuple()?;
            let y = tuple()?;
            (map, x, y)
        }
    };
    let tau = match FORCED_TAUS.get(trial as usize) {
        Some(&t) => t,
        None => rng.random_range(0.0..=1.0),
    };
    Ok(Instance { map, x, y, tau })
}

struct FormOutcome {
    form: SymmetricForm,
    report: TrialReport,
}

struct TrialOutcome {
    instance: Instance,
    forms: Vec<FormOutcome>,
    all_k_pass: Option<bool>,
    trace_gap: Option<f64>,
    min_relative_eigenvalue: Option<f64>,
}

fn run_trial(config: &SuiteConfig, specs: &[FormSpec], trial: u64) -> Result<TrialOutcome> {
    let mut rng = stream_rng(config.seed, trial);
    let instance = sample_instance(config, trial, &mut rng)?;
    let triple = Triple::new(&instance.map, &instance.x, &instance.y, instance.tau)?;
    let n = triple.mid.dim();
    let mut forms = Vec::with_capacity(specs.len());
    for spec in specs {
        let form = spec.resolve(n, &mut rng)?;
        let (deficit, scale) = triple.deficit(&form)?;
        let mut report = build_report(
            &instance.map,
            &form,
            instance.tau,
            deficit,
            scale,
            config.tolerance,
        );
        report.trial_id = trial;
        report.seed = config.seed;
        report.form = spec.label();
        forms.push(FormOutcome { form, report });
    }
    let (all_k_pass, trace_gap) = if config.map == MapKind::Classic {
        (None, None)
    } else {
        let mut all = true;
        let mut full = 0.0;
        for k in 1..=n {
            let (d, s) = triple.deficit(&SymmetricForm::smallest_k(k)?)?;
            all &= passes(d, s, config.tolerance);
            full = d;
        }
        let gap = forms
            .iter()
            .filter(|f| *f.form.kind() == FormKind::Trace)
            .map(|f| (f.report.deficit - full).abs())
            .fold(None, |acc: Option<f64>, g| {
                Some(acc.map_or(g, |a| a.max(g)))
            });
        (Some(all), gap)
    };
    let min_relative_eigenvalue = [&triple.x, &triple.y, &triple.mid]
        .iter()
        .filter_map(|e| e.relative_min_eigenvalue())
        .reduce(f64::min);
    Ok(TrialOutcome {
        instance,
        forms,
        all_k_pass,
        trace_gap,
        min_relative_eigenvalue,
    })
}

fn min_opt(acc: Option<f64>, v: Option<f64>) -> Option<f64> {
    match (acc, v) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Runs `config.trials` independent trials in parallel. Trial `i` draws from
/// stream `i` of the suite seed, so the report does not depend on scheduling.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let specs = config.form_specs();
    let outcomes: Vec<TrialOutcome> = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(config, &specs, i))
        .collect::<Result<_>>()?;

    let mut suites: Vec<SuiteSummary> = specs
        .iter()
        .map(|spec| SuiteSummary {
            map: config.map,
            form: spec.label(),
            trials: 0,
            failures: 0,
            min_deficit: None,
            exemplars: Vec::new(),
        })
        .collect();
    let mut equivalence = (config.map != MapKind::Classic).then(|| EquivalenceSummary {
        trials: 0,
        all_k_pass: 0,
        defects: 0,
        defect_trials: Vec::new(),
        max_trace_gap: None,
    });
    let mut psd = (config.map != MapKind::Classic).then_some(PsdClosure {
        min_relative_eigenvalue: None,
        violations: 0,
    });
    let mut trials = Vec::with_capacity(outcomes.len() * specs.len());

    for (i, outcome) in outcomes.into_iter().enumerate() {
        let mut any_form_failed = false;
        for (summary, fo) in suites.iter_mut().zip(&outcome.forms) {
            let r = &fo.report;
            summary.trials += 1;
            summary.min_deficit = min_opt(summary.min_deficit, Some(r.deficit));
            if !r.pass {
                any_form_failed = true;
                summary.failures += 1;
                if summary.exemplars.len() < config.max_exemplars {
                    summary.exemplars.push(Exemplar {
                        trial_id: i as u64,
                        deficit: r.deficit,
                        scale: r.scale,
                        inputs: TrialInputs {
                            map: outcome.instance.map.clone(),
                            form: fo.form.clone(),
                            x: outcome.instance.x.clone(),
                            y: outcome.instance.y.clone(),
                            tau: outcome.instance.tau,
                        },
                    });
                }
            }
        }
        if let (Some(eq), Some(all_k)) = (equivalence.as_mut(), outcome.all_k_pass) {
            eq.trials += 1;
            if all_k {
                eq.all_k_pass += 1;
                if any_form_failed {
                    eq.defects += 1;
                    eq.defect_trials.push(i as u64);
                }
            }
            eq.max_trace_gap = outcome
                .trace_gap
                .map(|g| eq.max_trace_gap.map_or(g, |m| m.max(g)))
                .or(eq.max_trace_gap);
        }
        if let (Some(psd), Some(rel)) = (psd.as_mut(), outcome.min_relative_eigenvalue) {
            psd.min_relative_eigenvalue = min_opt(psd.min_relative_eigenvalue, Some(rel));
            if rel < -PSD_CLOSURE_TOLERANCE {
                psd.violations += 1;
            }
        }
        trials.extend(outcome.forms.into_iter().map(|f| f.report));
    }

    let negative_control = config
        .negative_control
        .map(|nc| negative_control_trial(nc.p, nc.q, config.seed, nc.search_trials))
        .transpose()?;

    Ok(SuiteReport {
        meta: ReportMeta {
            seed: config.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: None,
            map: config.map,
            trials: config.trials,
            tolerance: config.tolerance,
        },
        suites,
        equivalence,
        psd_closure: psd,
        negative_control,
        trials,
    })
}

/// Checks that no trial passes every `SmallestK(k)` deficit while failing a
/// deficit of one of `forms`.
pub fn equivalence_probe(
    map: MapKind,
    forms: &[SymmetricForm],
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<EquivalenceSummary> {
    if map == MapKind::Classic {
        return Err(Error::Precondition(
            "the classic functional has no spectrum to probe".into(),
        ));
    }
    let config = SuiteConfig {
        trials,
        seed,
        forms: forms.iter().cloned().map(FormSpec::Fixed).collect(),
        n_range: Some([n, n]),
        max_exemplars: 0,
        ..SuiteConfig::new(map)
    };
    if forms.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one form is required".into(),
        ));
    }
    let report = run_suite(&config)?;
    Ok(report
        .equivalence
        .expect("spectral maps report equivalence"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(map: MapKind, trials: usize) -> SuiteConfig {
        SuiteConfig {
            trials,
            ..SuiteConfig::new(map)
        }
    }

    #[test]
    fn zero_trials_is_valid() {
        let r = run_suite(&small(MapKind::Lieb, 0)).unwrap();
        assert_eq!(r.suites.len(), 5);
        assert!(r
            .suites
            .iter()
            .all(|s| s.trials == 0 && s.min_deficit.is_none()));
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["meta"]["seed"], 42);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1);
    }

    #[test]
    fn small_lieb_suite_passes() {
        let r = run_suite(&small(MapKind::Lieb, 40)).unwrap();
        assert_eq!(r.unexpected_failures(), 0, "{:#?}", r.suites);
        assert_eq!(r.trials.len(), 200);
        let eq = r.equivalence.unwrap();
        assert_eq!(eq.defects, 0);
        assert!(eq.max_trace_gap.unwrap() < 1e-12);
        let taus: Vec<f64> = r.trials.iter().step_by(5).take(3).map(|t| t.tau).collect();
        assert_eq!(taus, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn explog_and_classic_suites_pass() {
        assert_eq!(
            run_suite(&small(MapKind::Explog, 20))
                .unwrap()
                .unexpected_failures(),
            0
        );
        let r = run_suite(&small(MapKind::Classic, 20)).unwrap();
        assert_eq!(r.unexpected_failures(), 0);
        assert!(r.equivalence.is_none());
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = small(MapKind::Lieb, 12);
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.trials, b.trials);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small(MapKind::Classic, 1);
        cfg.forms = vec![FormSpec::RandomK(KFamily::KTrace)];
        assert!(run_suite(&cfg).is_err());
        let mut cfg = small(MapKind::Lieb, 1);
        cfg.forms = vec![FormSpec::Fixed(SymmetricForm::largest_k(1).unwrap())];
        assert!(run_suite(&cfg).is_err());
        let mut cfg = small(MapKind::Lieb, 1);
        cfg.forms = vec![FormSpec::Fixed(SymmetricForm::k_trace(4).unwrap())];
        assert!(run_suite(&cfg).is_err());
        let mut cfg = small(MapKind::Lieb, 1);
        cfg.n_range = Some([3, 2]);
        assert!(run_suite(&cfg).is_err());
        let mut cfg = small(MapKind::Lieb, 1);
        cfg.tolerance = 0.0;
        assert!(run_suite(&cfg).is_err());
        assert!(SuiteConfig::from_json(r#"{"map":"lieb","bogus":1}"#).is_err());
        let cfg = SuiteConfig::from_json(r#"{"map":"explog","trials":3,"forms":[{"random_k":"KTrace"},{"fixed":{"kind":"Trace"}}]}"#).unwrap();
        assert_eq!(cfg.form_specs().len(), 2);
        assert_eq!(cfg.seed, DEFAULT_SEED);
    }

    #[test]
    fn negative_control_section() {
        let mut cfg = small(MapKind::Lieb, 3);
        cfg.negative_control = Some(NegativeControlConfig::default());
        let r = run_suite(&cfg).unwrap();
        let nc = r.negative_control.as_ref().unwrap();
        assert!(nc.detected());
        assert_eq!(r.unexpected_failures(), 0);
    }

    #[test]
    fn equivalence_probe_with_trace() {
        let eq = equivalence_probe(MapKind::Lieb, &[SymmetricForm::trace()], 3, 15, 7).unwrap();
        assert_eq!(eq.defects, 0);
        assert!(eq.max_trace_gap.unwrap() < 1e-12);
        let eq = equivalence_probe(
            MapKind::Lieb,
            &[SymmetricForm::k_trace(1).unwrap()],
            1,
            10,
            7,
        )
        .unwrap();
        assert_eq!(eq.defects, 0);
        assert!(equivalence_probe(MapKind::Classic, &[SymmetricForm::trace()], 2, 1, 1).is_err());
    }
}
