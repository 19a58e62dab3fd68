use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use hs_exterior::identities::{
    classical_ch_residual, conjugacy_invariance_check, eq17_report, generalized_ch_residual,
    integration_by_parts_report, star2_report, star3_report, tr_square_identity, IdentityReport,
};
use hs_exterior::random::{self, trial_rng};
use hs_exterior::traces::{trace_tensor_via_hs, trace_via_determinant_oracle};
use hs_exterior::{Result, Scalar};

use crate::input::DEFAULT_SEED;
use crate::run::{agrees, check_tolerance, to_json};
use crate::{exit, Cli, Failure, Mode, Outcome, Output};

const MAX_SUITE_DIM: usize = 6;

pub struct Budget {
    pub trials: u64,
    pub seconds: f64,
    pub memory_mb: u64,
}

#[derive(Serialize)]
struct CheckCount {
    identity: &'static str,
    passed: u64,
    failed: u64,
}

#[derive(Serialize)]
struct FailureRecord {
    trial: u64,
    identity: &'static str,
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    mode: &'static str,
    seed: u64,
    trials: u64,
    completed_trials: u64,
    checks: Vec<CheckCount>,
    failures: Vec<FailureRecord>,
    all_passed: bool,
    budget_exceeded: bool,
    elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    peak_rss_mb: Option<u64>,
}

/// Names of the checks run at dimension `n`, in report order.
fn check_names(n: usize) -> Vec<&'static str> {
    let mut names = Vec::new();
    if n >= 2 {
        names.extend(["thm48", "oracle", "conjugacy"]);
        if n <= 4 {
            names.push("ibp");
        }
    }
    names.push("classical-ch");
    match n {
        2 => names.extend(["star2", "trsq"]),
        3 => names.extend(["star3", "eq17"]),
        _ => {}
    }
    names
}

fn pass<S: Scalar>(r: Result<IdentityReport<S>>, tol: f64) -> bool {
    r.map(|r| r.with_tolerance(tol).is_zero).unwrap_or(false)
}

fn run_trial<S: Scalar>(n: usize, seed: u64, trial: u64, tol: f64) -> Vec<(&'static str, bool)> {
    let mut rng = trial_rng(seed, trial);
    let tuple = random::tuple::<S>(&mut rng, n, n);
    let mut out = Vec::new();
    if n >= 2 {
        let tensor = trace_tensor_via_hs(&tuple);
        let thm = tensor
            .as_ref()
            .map(|t| pass(generalized_ch_residual(&tuple, t), tol))
            .unwrap_or(false);
        out.push(("thm48", thm));
        let oracle = tensor
            .as_ref()
            .map(|t| {
                let scale = t.max_magnitude();
                t.all_entries().iter().all(|(i, v)| {
                    trace_via_determinant_oracle(&tuple, i)
                        .map(|o| agrees(v, &o, tol, scale.max(o.magnitude())))
                        .unwrap_or(false)
                })
            })
            .unwrap_or(false);
        out.push(("oracle", oracle));
        let p = random::invertible_matrix::<S>(&mut rng, n);
        out.push(("conjugacy", pass(conjugacy_invariance_check(&tuple, &p), tol)));
        if n <= 4 {
            let u = random::element::<S>(&mut rng, n, None, 3);
            let v = random::element::<S>(&mut rng, n, None, 3);
            out.push(("ibp", pass(integration_by_parts_report(&tuple, &u, &v), tol)));
        }
    }
    out.push(("classical-ch", pass(classical_ch_residual(tuple.get(0)), tol)));
    match n {
        2 => {
            out.push(("star2", pass(star2_report(tuple.get(0), tuple.get(1)), tol)));
            out.push(("trsq", pass(tr_square_identity(tuple.get(0)), tol)));
        }
        3 => {
            out.push(("star3", pass(star3_report(tuple.get(0), tuple.get(1), tuple.get(2), None), tol)));
            out.push(("eq17", pass(eq17_report(tuple.get(0), tuple.get(1)), tol)));
        }
        _ => {}
    }
    out
}

fn peak_rss_mb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let kib: u64 = status
        .lines()
        .find(|l| l.starts_with("VmHWM:"))?
        .split_whitespace()
        .nth(1)?
        .parse()
        .ok()?;
    Some(kib / 1024)
}

pub fn random_suite(cli: &Cli, budget: &Budget) -> std::result::Result<Outcome, Failure> {
    check_tolerance(cli.tol)?;
    if cli.input.is_some() {
        return Err(Failure::parse("random-suite generates its own inputs; --input is not accepted"));
    }
    let n = cli.n.ok_or_else(|| Failure::parse("random-suite needs --n"))?;
    if n == 0 || n > MAX_SUITE_DIM {
        return Err(Failure::dimension(format!("random-suite supports 1 <= n <= {MAX_SUITE_DIM}, got {n}")));
    }
    if budget.trials == 0 {
        return Err(Failure::parse("--trials must be at least 1"));
    }
    if !(budget.seconds.is_finite() && budget.seconds >= 0.0) {
        return Err(Failure::parse("--time-budget must be a non-negative number of seconds"));
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let mode = cli.mode.unwrap_or(Mode::Rational);
    let start = Instant::now();
    let limit = Duration::from_secs_f64(budget.seconds);
    let exceeded = AtomicBool::new(false);

    let run = |trial: u64| -> Option<Vec<(&'static str, bool)>> {
        if exceeded.load(Ordering::Relaxed) || start.elapsed() > limit {
            exceeded.store(true, Ordering::Relaxed);
            return None;
        }
        let result = match mode {
            Mode::Rational => run_trial::<hs_exterior::Rational>(n, seed, trial, cli.tol),
            Mode::Float => run_trial::<f64>(n, seed, trial, cli.tol),
        };
        if start.elapsed() > limit {
            exceeded.store(true, Ordering::Relaxed);
        }
        Some(result)
    };
    let results: Vec<Option<Vec<(&'static str, bool)>>> =
        (0..budget.trials).into_par_iter().map(run).collect();

    let elapsed = start.elapsed();
    let peak = peak_rss_mb();
    let over_memory = peak.is_some_and(|mb| mb > budget.memory_mb);
    let budget_exceeded = exceeded.load(Ordering::Relaxed) || over_memory;

    let mut checks: Vec<CheckCount> = check_names(n)
        .into_iter()
        .map(|identity| CheckCount {
            identity,
            passed: 0,
            failed: 0,
        })
        .collect();
    let mut failures = Vec::new();
    let mut completed = 0;
    for (trial, outcome) in results.iter().enumerate() {
        let Some(outcome) = outcome else { continue };
        completed += 1;
        for (name, ok) in outcome {
            let slot = checks.iter_mut().find(|c| c.identity == *name).expect("known check");
            if *ok {
                slot.passed += 1;
            } else {
                slot.failed += 1;
                failures.push(FailureRecord {
                    trial: trial as u64,
                    identity: name,
                });
            }
        }
    }
    let summary = Summary {
        n,
        mode: match mode {
            Mode::Rational => "rational",
            Mode::Float => "float",
        },
        seed,
        trials: budget.trials,
        completed_trials: completed,
        all_passed: failures.is_empty() && completed == budget.trials,
        checks,
        failures,
        budget_exceeded,
        elapsed_ms: elapsed.as_millis(),
        peak_rss_mb: peak,
    };
    let stdout = match cli.output {
        Output::Json => to_json(&summary),
        Output::Table => summary_table(&summary),
    };
    let (code, stderr) = if budget_exceeded {
        let why = if over_memory {
            format!("peak memory {} MiB exceeds {} MiB", peak.unwrap_or(0), budget.memory_mb)
        } else {
            format!("time budget of {}s exceeded after {completed} trials", budget.seconds)
        };
        (exit::BUDGET, Some(format!("hsx: {why}\n")))
    } else if summary.all_passed {
        (exit::OK, None)
    } else {
        (exit::NONZERO_RESIDUAL, None)
    };
    Ok(Outcome { stdout, stderr, code })
}

fn summary_table(s: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}, mode = {}, seed = {}, trials = {}/{}",
        s.n, s.mode, s.seed, s.completed_trials, s.trials
    );
    for c in &s.checks {
        let _ = writeln!(out, "{:<14} {}/{}", c.identity, c.passed, c.passed + c.failed);
    }
    for f in &s.failures {
        let _ = writeln!(out, "FAILED trial {} {}", f.trial, f.identity);
    }
    let _ = writeln!(out, "elapsed: {} ms", s.elapsed_ms);
    if s.budget_exceeded {
        let _ = writeln!(out, "budget exceeded");
    }
    out
}
