use std::fs;
use std::io::Write;

use liebconc::forms::SymmetricForm;
use liebconc::io::{parse_hermitian, parse_matrix, parse_scalar_fn, parse_vector};
use liebconc::lab::{
    run_suite, FormSpec, MapKind, NegativeControlConfig, SuiteConfig, SuiteReport,
};
use liebconc::linalg::{ComplexMatrix, HermitianMatrix};
use liebconc::majorization::{bridge_vector, certify_majorization, relation, Relation};
use liebconc::variational::{f00_probe_infimum, fni0_lower_bound, fni0_objective, fni0_shift};
use liebconc::Error;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

/// 2: malformed or inconsistent input. 3: input outside a mathematical
/// domain (non-PSD, singular, precondition). 4: numerical breakdown.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::DimensionMismatch(_)
        | Error::ShapeMismatch { .. }
        | Error::NotSquare { .. }
        | Error::NonFinite(_)
        | Error::IndexOutOfRange(_)
        | Error::InvalidParameter(_) => 2,
        Error::Domain(_)
        | Error::Singular(_)
        | Error::Precondition(_)
        | Error::NotIsometry(_)
        | Error::NotIdempotent(_)
        | Error::InconsistentDeclaration(_) => 3,
        Error::ConvergenceFailure { .. }
        | Error::Postcondition(_)
        | Error::ResampleCapExceeded(_) => 4,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file path.
fn inline_or_file(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| usage(format!("cannot read '{arg}': {e}")))
}

fn write_output(out: Option<&str>, text: &str) -> Result<(), Failure> {
    match out {
        None | Some("-") => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))
        }
        Some(path) => {
            fs::write(path, text).map_err(|e| usage(format!("cannot write '{path}': {e}")))
        }
    }
}

pub fn forms_eval(form: &str, vector: Option<String>, matrix: Option<String>) -> CmdResult {
    let form = SymmetricForm::from_json(&inline_or_file(form)?)?;
    let value = match (vector, matrix) {
        (Some(v), _) => form.eval_vector(&parse_vector(&v)?)?,
        (None, Some(m)) => form.eval_matrix(&parse_hermitian(&inline_or_file(&m)?)?)?,
        (None, None) => return Err(usage("one of --vector or --matrix is required")),
    };
    println!("{value}");
    Ok(0)
}

fn pair(a: &str, b: &str) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let a = parse_vector(a)?;
    let b = parse_vector(b)?;
    if a.len() != b.len() {
        return Err(usage(format!(
            "a has {} entries but b has {}",
            a.len(),
            b.len()
        )));
    }
    Ok((a, b))
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn major_check(a: &str, b: &str) -> CmdResult {
    let (a, b) = pair(a, b)?;
    let rel = relation(&b, &a)?;
    println!("{rel}");
    Ok(if rel == Relation::None { 1 } else { 0 })
}

pub fn major_bridge(a: &str, b: &str) -> CmdResult {
    let (a, b) = pair(a, b)?;
    if relation(&b, &a)? == Relation::None {
        eprintln!("a is not weakly majorized by b");
        return Ok(1);
    }
    println!("{}", join(&bridge_vector(&a, &b)?));
    Ok(0)
}

pub fn major_certify(a: &str, b: &str, out: Option<&str>) -> CmdResult {
    let (a, b) = pair(a, b)?;
    if relation(&b, &a)? != Relation::Strong {
        eprintln!("a is not majorized by b");
        return Ok(1);
    }
    let cert = certify_majorization(&a, &b)?;
    let text = serde_json::to_string_pretty(&cert).map_err(|e| usage(e.to_string()))?;
    write_output(out, &(text + "\n"))?;
    Ok(0)
}

pub struct MatrixSource {
    pub json: Option<String>,
    pub diag: Option<String>,
}

impl MatrixSource {
    fn load(&self) -> Result<HermitianMatrix, Failure> {
        match (&self.json, &self.diag) {
            (Some(j), _) => Ok(parse_hermitian(&inline_or_file(j)?)?),
            (None, Some(d)) => Ok(HermitianMatrix::from_real_diag(&parse_vector(d)?)),
            (None, None) => Err(usage("one of --a or --a-diag is required")),
        }
    }
}

fn check_tolerance(tol: f64) -> Result<(), Failure> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(usage(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

pub fn variational_f00(
    a: &MatrixSource,
    m: Option<&str>,
    k: usize,
    f: &str,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> CmdResult {
    check_tolerance(tolerance)?;
    let a = a.load()?;
    let m = match m {
        Some(text) => parse_matrix(&inline_or_file(text)?)?,
        None => ComplexMatrix::identity(a.dim()),
    };
    let f = parse_scalar_fn(f)?;
    let r = f00_probe_infimum(&a, &m, k, &f, trials, seed)?;
    println!("seed: {seed}");
    println!("k: {k}");
    println!("exact: {}", r.lower_bound);
    match r.minimizer_objective {
        Some(v) => println!("minimizer: {v}"),
        None => println!("minimizer: none"),
    }
    println!("probe_min: {}", r.min_sampled);
    println!("gap: {}", r.gap);
    println!("violations: {}", r.violations);
    let Some(min_obj) = r.minimizer_objective else {
        for (j, v) in r.lifted_sequence.iter().enumerate() {
            println!("lifted[{}]: {v:e}", j + 1);
        }
        return Err(Failure {
            code: 3,
            message: "M is singular: the infimum is not attained; lifted sequence printed".into(),
        });
    };
    let scale = 1f64.max(r.lower_bound.abs());
    let holds = (min_obj - r.lower_bound).abs() <= tolerance * scale && r.violations == 0;
    Ok(if holds { 0 } else { 1 })
}

pub fn variational_fni0(
    a: &MatrixSource,
    k: usize,
    f: &str,
    deltas: &str,
    tolerance: f64,
) -> CmdResult {
    check_tolerance(tolerance)?;
    let a = a.load()?;
    let f = parse_scalar_fn(f)?;
    let deltas = parse_vector(deltas)?;
    if deltas.iter().any(|d| *d <= 0.0) || deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage("deltas must be positive and strictly increasing"));
    }
    let n = a.dim();
    let lower = fni0_lower_bound(&a, k, &f)?;
    println!("k: {k}");
    println!("exact: {lower}");
    let scale = 1f64.max(lower.abs());
    let mut holds = true;
    let mut previous = f64::INFINITY;
    for &delta in &deltas {
        let shift = fni0_shift(&a, k, delta)?;
        let objective = fni0_objective(&a, &shift, &f)?;
        let expected = lower + (n - k) as f64 * f.eval(-delta);
        println!("delta: {delta} objective: {objective} expected: {expected}");
        holds &= (objective - expected).abs() <= tolerance * scale;
        holds &= objective >= lower - tolerance * scale;
        holds &= objective <= previous + tolerance * scale;
        previous = objective;
    }
    Ok(if holds { 0 } else { 1 })
}

pub struct SuiteRequest {
    pub map: Option<String>,
    pub config: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub forms: Option<String>,
    pub dims: Option<String>,
    pub m_dims: Option<String>,
    pub negative_control: bool,
    pub out: Option<String>,
    pub csv: bool,
    pub timestamp: bool,
}

fn parse_range(text: &str, flag: &str) -> Result<[usize; 2], Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let parsed: Result<Vec<usize>, _> = parts.iter().map(|p| p.parse::<usize>()).collect();
    match parsed.as_deref() {
        Ok([lo, hi]) => Ok([*lo, *hi]),
        _ => Err(usage(format!("{flag} expects LO,HI, got '{text}'"))),
    }
}

fn build_config(req: &SuiteRequest) -> Result<SuiteConfig, Failure> {
    let mut config = match (&req.config, &req.map) {
        (Some(text), _) => SuiteConfig::from_json(&inline_or_file(text)?)?,
        (None, Some(map)) => SuiteConfig::new(map.parse::<MapKind>()?),
        (None, None) => return Err(usage("suite run needs --map or --config")),
    };
    if let Some(map) = &req.map {
        config.map = map.parse()?;
    }
    if let Some(t) = req.trials {
        config.trials = t;
    }
    if let Some(s) = req.seed {
        config.seed = s;
    }
    if let Some(t) = req.tolerance {
        config.tolerance = t;
    }
    if let Some(forms) = &req.forms {
        config.forms = serde_json::from_str::<Vec<FormSpec>>(&inline_or_file(forms)?)
            .map_err(|e| usage(format!("invalid --forms: {e}")))?;
    }
    if let Some(d) = &req.dims {
        config.n_range = Some(parse_range(d, "--dims")?);
    }
    if let Some(d) = &req.m_dims {
        config.m_range = Some(parse_range(d, "--m-dims")?);
    }
    if req.negative_control && config.negative_control.is_none() {
        config.negative_control = Some(NegativeControlConfig::default());
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn summarize(report: &SuiteReport) -> String {
    let mut s = String::new();
    for suite in &report.suites {
        let min = suite
            .min_deficit
            .map_or("-".to_string(), |d| format!("{d:.3e}"));
        s += &format!(
            "{} {}: {} trials, {} failures, min deficit {min}\n",
            suite.map, suite.form, suite.trials, suite.failures
        );
    }
    if let Some(eq) = &report.equivalence {
        s += &format!(
            "equivalence: {} of {} trials pass every smallest-k deficit, {} defects\n",
            eq.all_k_pass, eq.trials, eq.defects
        );
    }
    if let Some(nc) = &report.negative_control {
        s += &format!(
            "negative control p={} q={}: scalar deficit {}, {} violations in {} searches (expected)\n",
            nc.p, nc.q, nc.deterministic.deficit, nc.violations, nc.search_trials
        );
    }
    s
}

pub fn suite_run(req: SuiteRequest, verbose: u8) -> CmdResult {
    let config = build_config(&req)?;
    if verbose > 0 {
        eprintln!(
            "running {} trials of the {} map, seed {}",
            config.trials, config.map, config.seed
        );
    }
    let mut report = run_suite(&config)?;
    if req.timestamp {
        report.meta.timestamp =
            Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    let text = if req.csv {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        String::from_utf8(buf).expect("csv output is utf-8")
    } else {
        report.to_json()? + "\n"
    };
    write_output(req.out.as_deref(), &text)?;
    let summary = summarize(&report);
    if verbose > 0 {
        eprint!("{summary}");
    } else if req.out.as_deref().is_some_and(|o| o != "-") {
        print!("{summary}");
    }
    let control_ok = report
        .negative_control
        .as_ref()
        .is_none_or(|nc| nc.detected());
    if !control_ok {
        eprintln!("negative control found no violation");
    }
    Ok(if report.unexpected_failures() == 0 && control_ok {
        0
    } else {
        1
    })
}
