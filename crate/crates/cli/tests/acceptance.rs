//! Acceptance gate: one PASS/FAIL line per criterion, written straight to
//! stderr so the lines survive the test harness's output capture.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use liebconc::forms::SymmetricForm;
use liebconc::lab::{
    classic_lieb_value, equivalence_probe, lieb_map, negative_control_trial, random_complex,
    random_hermitian, random_psd, run_suite, LiebMapParams, MapKind, SuiteConfig, SuiteReport,
};
use liebconc::linalg::{
    eig_hermitian, fractional_power, hermitize, inverse_condition, ComplexMatrix, HermitianMatrix,
    ScalarFn,
};
use liebconc::majorization::{
    bridge_vector, certificate_to_matrix, certify_majorization, eigen_sum_majorization,
};
use liebconc::rng::{stream_rng, TrialRng};
use liebconc::variational::{
    f00_probe_infimum, fni0_objective, fni0_shift, idempotent_singular_floor, random_idempotent,
    random_unitary,
};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn report(id: u32, name: &str, outcome: &Outcome) {
    let line = match outcome {
        Ok(detail) => format!("[PASS] {id:>2} {name}: {detail}\n"),
        Err(detail) => format!("[FAIL] {id:>2} {name}: {detail}\n"),
    };
    let mut err = std::io::stderr().lock();
    let _ = err.write_all(line.as_bytes());
}

fn run(id: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    report(id, name, &outcome);
    outcome.is_ok()
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    if elapsed > Duration::from_secs(limit_s) {
        return Err(format!(
            "runtime {:.2}s exceeds {limit_s}s",
            elapsed.as_secs_f64()
        ));
    }
    Ok(())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

// Independent prefix-sum oracle for (weak) majorization.
fn prefix_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.iter()
        .scan(0.0, |s, x| {
            *s += x;
            Some(*s)
        })
        .collect()
}

fn oracle_weak(b: &[f64], a: &[f64], tol: f64) -> bool {
    prefix_desc(a)
        .iter()
        .zip(prefix_desc(b))
        .all(|(pa, pb)| *pa <= pb + tol)
}

fn oracle_strong(b: &[f64], a: &[f64], tol: f64) -> bool {
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    oracle_weak(b, a, tol) && (sa - sb).abs() <= tol
}

/// Random doubly stochastic matrix as a convex combination of permutation matrices.
fn birkhoff(n: usize, rng: &mut TrialRng) -> Vec<Vec<f64>> {
    let terms = rng.random_range(1..=4);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut d = vec![vec![0.0; n]; n];
    for w in weights {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            d[i][j] += w;
        }
    }
    d
}

fn random_vector(n: usize, rng: &mut TrialRng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-5.0..5.0)).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_rec = 0.0f64;
    let mut worst_orth = 0.0f64;
    for t in 0..500u64 {
        let mut rng = stream_rng(101, t);
        let n = rng.random_range(2..=12);
        // Every fifth matrix gets a repeated eigenvalue.
        let a = if t % 5 == 0 {
            let u = random_unitary(n, &mut rng).map_err(|e| e.to_string())?;
            let lam: Vec<f64> = (0..n).map(|i| (i / 2) as f64).collect();
            HermitianMatrix::from_spectral(&u, &lam)
        } else {
            random_hermitian(n, &mut rng)
                .map_err(|e| e.to_string())?
                .scale(rng.random_range(0.1..10.0))
        };
        let eig = eig_hermitian(&a).map_err(|e| e.to_string())?;
        let v = &eig.vectors;
        let lam = ComplexMatrix::from_real_diag(&eig.eigenvalues);
        let rec = v.matmul(&lam).unwrap().matmul(&v.adjoint()).unwrap();
        let r = rec.sub(a.as_matrix()).unwrap().frobenius_norm() / a.frobenius_norm().max(1.0);
        let o = v.isometry_residual() / n as f64;
        worst_rec = worst_rec.max(r);
        worst_orth = worst_orth.max(o);
        ensure(r <= 1e-10, || format!("trial {t}: reconstruction {r:.3e}"))?;
        ensure(o <= 1e-11, || {
            format!("trial {t}: orthonormality {o:.3e}/n")
        })?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!(
        "500 matrices, max rel reconstruction {worst_rec:.2e}, max orth/n {worst_orth:.2e}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn suite_outcome(report: &SuiteReport, elapsed: Duration, limit: u64) -> Outcome {
    let failures: usize = report.suites.iter().map(|s| s.failures).sum();
    let min = report
        .suites
        .iter()
        .filter_map(|s| s.min_deficit)
        .fold(f64::INFINITY, f64::min);
    ensure(failures == 0, || {
        format!("{failures} deficits below -1e-7*scale")
    })?;
    let psd = report.psd_closure.as_ref().map_or(0, |p| p.violations);
    ensure(psd == 0, || format!("{psd} outputs violate PSD closure"))?;
    within(elapsed, limit)?;
    Ok(format!(
        "{} trials x {} forms, min deficit {min:.3e}, {:.2}s",
        report.meta.trials,
        report.suites.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..200u64 {
        let mut rng = stream_rng(404, t);
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=6);
        let k = random_complex(m, n, &mut rng).unwrap();
        let a = random_psd(m, &mut rng).unwrap();
        let b = random_psd(n, &mut rng).unwrap();
        let p: f64 = rng.random_range(0.01..=1.0);
        let q: f64 = rng.random_range(0.0..=1.0 - p).max(0.01).min(1.0 - p);
        if q <= 0.0 {
            continue;
        }
        let classic = classic_lieb_value(&a, &b, &k, p, q).map_err(|e| e.to_string())?;
        let mapped = lieb_map(&a, &b, &LiebMapParams::new(k, p, q, 1.0).unwrap())
            .map_err(|e| e.to_string())?
            .trace();
        let rel = (classic - mapped).abs() / classic.abs().max(1.0);
        worst = worst.max(rel);
        ensure(rel <= 1e-9, || format!("trial {t}: relative gap {rel:.3e}"))?;
    }
    Ok(format!("200 instances, max relative gap {worst:.2e}"))
}

/// Independent route to `λ(M*AM)`: the spectrum of `A^{1/2} M M* A^{1/2}`.
fn f00_oracle(a: &HermitianMatrix, m: &ComplexMatrix, k: usize, f: &ScalarFn) -> f64 {
    let root = fractional_power(a, 0.5).unwrap();
    let mm = m.matmul(&m.adjoint()).unwrap();
    let x = hermitize(
        &root
            .as_matrix()
            .matmul(&mm)
            .unwrap()
            .matmul(root.as_matrix())
            .unwrap(),
    )
    .unwrap();
    eig_hermitian(&x).unwrap().eigenvalues[..k]
        .iter()
        .map(|&v| f.eval(v.max(0.0)))
        .sum()
}

fn criterion_5() -> Outcome {
    let fs = [
        ScalarFn::Identity,
        ScalarFn::power(0.5).unwrap(),
        ScalarFn::power(2.0).unwrap(),
        ScalarFn::power(0.3).unwrap(),
        ScalarFn::power(1.7).unwrap(),
    ];
    let mut worst_min = 0.0f64;
    let mut worst_gap = f64::INFINITY;
    for t in 0..200u64 {
        let mut rng = stream_rng(505, t);
        let n = rng.random_range(2..=5);
        let k = rng.random_range(1..=n);
        let a = random_psd(n, &mut rng).unwrap();
        let m = loop {
            let m = random_complex(n, n, &mut rng).unwrap();
            if inverse_condition(&m).unwrap() > 1e-3 {
                break m;
            }
        };
        let f = &fs[t as usize % fs.len()];
        let r = f00_probe_infimum(&a, &m, k, f, 100, 5000 + t).map_err(|e| e.to_string())?;
        let oracle = f00_oracle(&a, &m, k, f);
        let scale = oracle.abs().max(1.0);
        let min_obj = r
            .minimizer_objective
            .ok_or("minimizer missing for invertible M")?;
        let rel = (min_obj - oracle).abs() / scale;
        worst_min = worst_min.max(rel);
        worst_gap = worst_gap.min(r.gap / scale);
        ensure(rel <= 1e-8, || {
            format!("trial {t}: minimizer off by {rel:.3e} relative")
        })?;
        ensure((r.lower_bound - oracle).abs() <= 1e-8 * scale, || {
            format!(
                "trial {t}: lower bound {} vs oracle {oracle}",
                r.lower_bound
            )
        })?;
        ensure(r.violations == 0, || {
            format!("trial {t}: {} idempotents beat the bound", r.violations)
        })?;
    }
    Ok(format!(
        "200 instances x 100 idempotents, max minimizer error {worst_min:.2e}, min sampled gap {worst_gap:.2e}"
    ))
}

fn criterion_6() -> Outcome {
    let deltas = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let mut worst = 0.0f64;
    let mut instances = 0;
    for t in 0..50u64 {
        let mut rng = stream_rng(606, t);
        let n = rng.random_range(2..=6);
        let k = rng.random_range(1..=n);
        // λ > -0.5 keeps every shift entry negative on the grid.
        let mut lam: Vec<f64> = (0..n).map(|_| rng.random_range(-0.45..2.0)).collect();
        lam.sort_by(f64::total_cmp);
        let a = if t == 0 {
            HermitianMatrix::from_real_diag(&[0.0, std::f64::consts::LN_2])
        } else {
            HermitianMatrix::from_spectral(&random_unitary(n, &mut rng).unwrap(), &lam)
        };
        let (n, k, lam) = if t == 0 {
            (2, 1, vec![0.0, std::f64::consts::LN_2])
        } else {
            (n, k, lam)
        };
        let base: f64 = lam[..k].iter().map(|v| v.exp()).sum();
        let mut prev = f64::INFINITY;
        for &delta in &deltas {
            let h = fni0_shift(&a, k, delta).map_err(|e| e.to_string())?;
            let obj = fni0_objective(&a, &h, &ScalarFn::Exp).map_err(|e| e.to_string())?;
            let expected = (n - k) as f64 * (-delta).exp() + base;
            let err = (obj - expected).abs();
            worst = worst.max(err);
            ensure(err <= 1e-9, || {
                format!("instance {t}, delta {delta}: |{obj} - {expected}| = {err:.3e}")
            })?;
            if k < n {
                ensure(obj < prev, || {
                    format!("instance {t}: objective not decreasing at delta {delta}")
                })?;
            }
            ensure(obj >= base - 1e-12, || {
                format!("instance {t}: objective below the infimum")
            })?;
            prev = obj;
        }
        instances += 1;
    }
    Ok(format!(
        "{instances} instances x {} deltas, max error {worst:.2e}",
        deltas.len()
    ))
}

fn criterion_7() -> Outcome {
    let mut worst_res = 0.0f64;
    let mut longest = 0usize;
    for t in 0..500u64 {
        let mut rng = stream_rng(707, t);
        let n = rng.random_range(1..=10);
        let b = random_vector(n, &mut rng);
        let d = birkhoff(n, &mut rng);
        let a: Vec<f64> = d
            .iter()
            .map(|row| row.iter().zip(&b).map(|(x, y)| x * y).sum())
            .collect();
        let cert = certify_majorization(&a, &b).map_err(|e| format!("trial {t}: {e}"))?;
        let dm = certificate_to_matrix(&cert);
        let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let res = max_abs_diff(&a, &dm.apply(&b)) / scale;
        worst_res = worst_res.max(res);
        longest = longest.max(cert.transforms.len());
        ensure(res <= 1e-10, || format!("trial {t}: |a - Db| = {res:.3e}"))?;
        ensure(cert.transforms.len() <= n.saturating_sub(1), || {
            format!(
                "trial {t}: chain length {} for n = {n}",
                cert.transforms.len()
            )
        })?;
        ensure(dm.stochastic_defect() <= 1e-12, || {
            format!("trial {t}: D is not doubly stochastic")
        })?;
    }
    for t in 0..500u64 {
        let mut rng = stream_rng(708, t);
        let n = rng.random_range(1..=10);
        let b = random_vector(n, &mut rng);
        let d = birkhoff(n, &mut rng);
        let a: Vec<f64> = d
            .iter()
            .map(|row| {
                row.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() - rng.random_range(0.0..2.0)
            })
            .collect();
        let c = bridge_vector(&a, &b).map_err(|e| format!("bridge {t}: {e}"))?;
        let tol = 1e-10 * b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        ensure(a.iter().zip(&c).all(|(x, y)| *x <= y + tol), || {
            format!("bridge {t}: a ≤ c fails")
        })?;
        ensure(oracle_strong(&b, &c, tol * n as f64), || {
            format!("bridge {t}: c ≺ b fails")
        })?;
    }
    for t in 0..500u64 {
        let mut rng = stream_rng(709, t);
        let n = rng.random_range(1..=8);
        let a = random_hermitian(n, &mut rng).unwrap();
        let b = random_hermitian(n, &mut rng).unwrap();
        ensure(eigen_sum_majorization(&a, &b).unwrap(), || {
            format!("eigen sum {t}: library check fails")
        })?;
        let mut la = eig_hermitian(&a).unwrap().descending();
        let lb = eig_hermitian(&b).unwrap().descending();
        la.iter_mut().zip(&lb).for_each(|(x, y)| *x += y);
        let lab = eig_hermitian(&a.add(&b).unwrap()).unwrap().eigenvalues;
        ensure(oracle_strong(&la, &lab, 1e-10), || {
            format!("eigen sum {t}: oracle check fails")
        })?;
    }
    Ok(format!(
        "500 certificates (max residual {worst_res:.2e}, longest chain {longest}), 500 bridges, 500 eigenvalue sums"
    ))
}

fn criterion_8() -> Outcome {
    let mut worst = f64::INFINITY;
    for t in 0..500u64 {
        let mut rng = stream_rng(808, t);
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=n);
        let g = random_idempotent(n, k, &mut rng).map_err(|e| e.to_string())?;
        let floor = idempotent_singular_floor(g.matrix()).map_err(|e| e.to_string())?;
        // Oracle: square roots of the nonzero eigenvalues of G*G.
        let gg = hermitize(&g.matrix().adjoint().matmul(g.matrix()).unwrap()).unwrap();
        let top = eig_hermitian(&gg).unwrap().descending();
        let oracle = top[k - 1].max(0.0).sqrt();
        ensure((floor - oracle).abs() <= 1e-6 * oracle.max(1.0), || {
            format!("trial {t}: floor {floor} vs oracle {oracle}")
        })?;
        worst = worst.min(floor);
        ensure(floor >= 1.0 - 1e-8, || {
            format!("trial {t}: smallest nonzero singular value {floor}")
        })?;
    }
    Ok(format!(
        "500 idempotents, smallest nonzero singular value {worst:.10}"
    ))
}

fn criterion_9(suites: &[&SuiteReport]) -> Outcome {
    let mut trials = 0;
    let mut all_k = 0;
    for r in suites {
        let eq = r
            .equivalence
            .as_ref()
            .ok_or("suite without equivalence section")?;
        ensure(eq.defects == 0, || {
            format!(
                "{} map: defects at trials {:?}",
                r.meta.map, eq.defect_trials
            )
        })?;
        trials += eq.trials;
        all_k += eq.all_k_pass;
    }
    let forms = [
        SymmetricForm::k_trace(2).unwrap(),
        SymmetricForm::geom_mean_sum(2).unwrap(),
        SymmetricForm::semi_p_norm(0.5).unwrap(),
        SymmetricForm::weighted_smallest(vec![3.0, 2.0, 1.0]).unwrap(),
        SymmetricForm::trace(),
    ];
    let eq = equivalence_probe(MapKind::Lieb, &forms, 3, 300, 909).map_err(|e| e.to_string())?;
    ensure(eq.defects == 0, || {
        format!("probe defects at {:?}", eq.defect_trials)
    })?;
    let gap = eq.max_trace_gap.unwrap_or(0.0);
    ensure(gap <= 1e-12, || {
        format!("Trace and SmallestK(n) deficits differ by {gap:.3e}")
    })?;
    let mut with_neg = forms.to_vec();
    with_neg.push(SymmetricForm::semi_p_norm(-1.0).unwrap());
    let eq2 =
        equivalence_probe(MapKind::Explog, &with_neg, 3, 200, 910).map_err(|e| e.to_string())?;
    ensure(eq2.defects == 0, || {
        format!("explog probe defects at {:?}", eq2.defect_trials)
    })?;
    let one = equivalence_probe(
        MapKind::Lieb,
        &[SymmetricForm::k_trace(1).unwrap()],
        1,
        50,
        911,
    )
    .map_err(|e| e.to_string())?;
    ensure(one.defects == 0, || "n = 1 probe has defects".into())?;
    Ok(format!(
        "{} suite trials ({all_k} with all smallest-k deficits passing) plus {} probe trials, 0 defects",
        trials,
        eq.trials + eq2.trials + one.trials
    ))
}

fn criterion_10() -> Outcome {
    let det = negative_control_trial(1.0, 1.0, 42, 0).map_err(|e| e.to_string())?;
    let d = det.deterministic.deficit;
    ensure((d + 1.0).abs() <= 1e-12, || format!("scalar deficit {d}"))?;
    let search = negative_control_trial(0.9, 0.9, 42, 1000).map_err(|e| e.to_string())?;
    let first = search
        .first_violation
        .as_ref()
        .ok_or("no violation in 1000 trials")?;
    ensure(first.deficit < -1e-6, || {
        format!("first violation deficit {}", first.deficit)
    })?;
    Ok(format!(
        "scalar deficit {d}, search at p=q=0.9: first violation at trial {} (deficit {:.3e}), {} of 1000",
        first.trial_id, first.deficit, search.violations
    ))
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_liebconc"))
        .args(args)
        .env_remove("LIEBCONC_SEED")
        .output()
        .expect("binary runs")
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bodies = Vec::new();
    for name in ["r1.json", "r2.json"] {
        let path = dir.path().join(name);
        let out = cli(&[
            "suite",
            "run",
            "--map",
            "lieb",
            "--trials",
            "1000",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        ensure(out.status.code() == Some(0), || {
            format!("suite run exited {:?}", out.status.code())
        })?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let mut v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        ensure(v["meta"]["timestamp"].is_string(), || {
            "timestamp missing".into()
        })?;
        v["meta"]["timestamp"] = Value::Null;
        bodies.push(serde_json::to_string(&v).unwrap());
    }
    ensure(bodies[0] == bodies[1], || {
        "reports differ beyond the timestamp".into()
    })?;
    let nc = dir.path().join("nc.json");
    let cases: [(&[&str], i32); 10] = [
        (
            &[
                "forms",
                "eval",
                "--form",
                r#"{"kind":"KTrace","k":2}"#,
                "--vector",
                "1,2,3",
            ],
            0,
        ),
        (
            &[
                "forms",
                "eval",
                "--form",
                r#"{"kind":"Trace"}"#,
                "--vector",
                "1,2,3",
            ],
            0,
        ),
        (
            &["forms", "eval", "--form", "{not json", "--vector", "1,2,3"],
            2,
        ),
        (&["major", "check", "--a", "1,2,3", "--b", "0,2,4"], 0),
        (&["major", "certify", "--a", "2,2", "--b", "3,1"], 0),
        (&["major", "check", "--a", "4,0,0", "--b", "3,1,1"], 1),
        (&["variational", "f00", "--a-diag", "1,2,3", "--k", "2"], 0),
        (
            &[
                "variational",
                "fni0",
                "--a-diag",
                "0,0.6931471805599453",
                "--k",
                "1",
            ],
            0,
        ),
        (&["variational", "f00", "--a-diag", "1,2,3", "--k", "4"], 2),
        (
            &[
                "suite",
                "run",
                "--map",
                "lieb",
                "--negative-control",
                "--out",
                nc.to_str().unwrap(),
            ],
            0,
        ),
    ];
    for (args, want) in cases {
        let got = cli(args).status.code();
        ensure(got == Some(want), || {
            format!("`{}` exited {got:?}, expected {want}", args.join(" "))
        })?;
    }
    let nc: Value = serde_json::from_str(&std::fs::read_to_string(&nc).unwrap()).unwrap();
    ensure(
        nc["negative_control"]["violations"].as_u64().unwrap_or(0) > 0,
        || "negative-control violations not recorded".into(),
    )?;
    Ok(
        "byte-identical reports for seed 42 (timestamp excluded); 10 documented invocations match"
            .into(),
    )
}

#[test]
fn acceptance() {
    let mut ok = true;
    ok &= run(1, "eigensolver", criterion_1);

    let start = Instant::now();
    let lieb = run_suite(&SuiteConfig {
        trials: 1000,
        ..SuiteConfig::new(MapKind::Lieb)
    });
    let lieb_time = start.elapsed();
    let start = Instant::now();
    let explog = run_suite(&SuiteConfig {
        trials: 500,
        ..SuiteConfig::new(MapKind::Explog)
    });
    let explog_time = start.elapsed();

    ok &= run(2, "general Lieb concavity suite", || {
        suite_outcome(lieb.as_ref().map_err(|e| e.to_string())?, lieb_time, 60)
    });
    ok &= run(3, "exp-log concavity suite", || {
        suite_outcome(explog.as_ref().map_err(|e| e.to_string())?, explog_time, 30)
    });
    ok &= run(4, "classic specialization", criterion_4);
    ok &= run(5, "idempotent variational formula", criterion_5);
    ok &= run(6, "shift variational formula", criterion_6);
    ok &= run(7, "majorization", criterion_7);
    ok &= run(8, "idempotent singular floor", criterion_8);
    ok &= run(9, "equivalence probe", || {
        let lieb = lieb.as_ref().map_err(|e| e.to_string())?;
        let explog = explog.as_ref().map_err(|e| e.to_string())?;
        criterion_9(&[lieb, explog])
    });
    ok &= run(10, "negative control", criterion_10);
    ok &= run(11, "CLI determinism and exit codes", criterion_11);
    assert!(ok, "at least one acceptance criterion failed");
}
