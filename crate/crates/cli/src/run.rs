use std::fmt::Write as _;

use serde::Serialize;

use hs_exterior::identities::{
    classical_ch_residual, conjugacy_invariance_check, eq17_report, generalized_ch_report,
    integration_by_parts_report, star2_report, star3_report, tr_square_identity, IdentityReport,
    Residual,
};
use hs_exterior::random::{self, trial_rng};
use hs_exterior::traces::{trace_tensor_via_hs, trace_via_determinant_oracle};
use hs_exterior::wire::{ReportJson, ScalarJson, TensorJson};
use hs_exterior::{EndoTuple, Matrix, Scalar};

use crate::input::{self, Identity, Loaded, Purpose};
use crate::{exit, Cli, Failure, Mode, Outcome, Output};

pub fn check_tolerance(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Failure::parse(format!("--tol must be a non-negative number, got {tol}")))
    }
}

pub fn traces(cli: &Cli, oracle: bool) -> Result<Outcome, Failure> {
    check_tolerance(cli.tol)?;
    let loaded = input::load(cli, Purpose::Traces)?;
    match loaded.mode {
        Mode::Rational => traces_in::<hs_exterior::Rational>(cli, &loaded, oracle),
        Mode::Float => traces_in::<f64>(cli, &loaded, oracle),
    }
}

pub fn verify(cli: &Cli, name: &str) -> Result<Outcome, Failure> {
    let identity = Identity::parse(name)?;
    check_tolerance(cli.tol)?;
    let loaded = input::load(cli, Purpose::Verify(identity))?;
    if loaded.doc.perturb_delta.is_some() && identity != Identity::Star3 {
        return Err(Failure::parse("perturb_delta only applies to star3"));
    }
    let (stdout, is_zero) = match loaded.mode {
        Mode::Rational => verify_in::<hs_exterior::Rational>(cli, &loaded, identity)?,
        Mode::Float => verify_in::<f64>(cli, &loaded, identity)?,
    };
    Ok(Outcome {
        stdout,
        stderr: None,
        code: if is_zero { exit::OK } else { exit::NONZERO_RESIDUAL },
    })
}

#[derive(Serialize)]
struct MismatchJson {
    index: Vec<u32>,
    series: String,
    oracle: String,
}

#[derive(Serialize)]
struct OracleJson {
    checked: usize,
    mismatches: Vec<MismatchJson>,
}

#[derive(Serialize)]
struct TracesJson {
    #[serde(flatten)]
    tensor: TensorJson,
    mode: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleJson>,
}

/// Exact equality, or agreement within `tol · scale` in float mode.
pub fn agrees<S: Scalar>(a: &S, b: &S, tol: f64, scale: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.clone() - b).magnitude() <= tol * scale
    }
}

fn traces_in<S: Scalar>(cli: &Cli, loaded: &Loaded, oracle: bool) -> Result<Outcome, Failure> {
    let tuple = EndoTuple::new(loaded.doc.matrices::<S>()?)?;
    let tensor = trace_tensor_via_hs(&tuple)?;
    let oracle_json = if oracle {
        let mut checked = 0;
        let mut mismatches = Vec::new();
        for (i, v) in tensor.all_entries() {
            let o = trace_via_determinant_oracle(&tuple, &i)?;
            let scale = v.magnitude().max(o.magnitude()).max(tensor.max_magnitude());
            if !agrees(&v, &o, cli.tol, scale) {
                mismatches.push(MismatchJson {
                    index: i.exponents().to_vec(),
                    series: v.to_string(),
                    oracle: o.to_string(),
                });
            }
            checked += 1;
        }
        Some(OracleJson { checked, mismatches })
    } else {
        None
    };
    let mismatch_count = oracle_json.as_ref().map_or(0, |o| o.mismatches.len());
    let out = TracesJson {
        tensor: TensorJson::from_tensor(&tensor),
        mode: S::MODE,
        seed: loaded.seed,
        oracle: oracle_json,
    };
    let stdout = match cli.output {
        Output::Json => to_json(&out),
        Output::Table => traces_table(&out),
    };
    let (code, stderr) = if mismatch_count > 0 {
        (
            exit::ORACLE_MISMATCH,
            Some(format!("hsx: {mismatch_count} entries disagree with the determinant oracle\n")),
        )
    } else {
        (exit::OK, None)
    };
    Ok(Outcome { stdout, stderr, code })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn scalar_text(s: &ScalarJson) -> String {
    match s {
        ScalarJson::Text(t) => t.clone(),
        ScalarJson::Number(n) => n.to_string(),
    }
}

fn index_text(i: &[u32]) -> String {
    let parts: Vec<String> = i.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

fn traces_table(out: &TracesJson) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n = {}, mode = {}, seed = {}", out.tensor.n, out.mode, out.seed);
    let width = out
        .tensor
        .entries
        .iter()
        .map(|e| index_text(&e.index).len())
        .max()
        .unwrap_or(0)
        + 3;
    for e in &out.tensor.entries {
        let label = format!("tau{}", index_text(&e.index));
        let _ = writeln!(s, "{label:<width$} = {}", scalar_text(&e.value));
    }
    if let Some(o) = &out.oracle {
        let _ = writeln!(s, "oracle: {} entries checked, {} mismatches", o.checked, o.mismatches.len());
        for m in &o.mismatches {
            let _ = writeln!(s, "  tau{}: series {} vs oracle {}", index_text(&m.index), m.series, m.oracle);
        }
    }
    s
}

/// Evaluates one identity on parsed inputs. Missing extras (conjugator,
/// elements) are drawn from the document seed.
pub fn evaluate<S: Scalar>(
    loaded: &Loaded,
    identity: Identity,
) -> Result<IdentityReport<S>, Failure> {
    let doc = &loaded.doc;
    let ms = doc.matrices::<S>()?;
    let n = doc.n;
    let report = match identity {
        Identity::Thm48 => generalized_ch_report(&EndoTuple::new(ms)?)?,
        Identity::Star2 => star2_report(&ms[0], &ms[1])?,
        Identity::Star3 => {
            let p = doc.perturbation::<S>()?;
            star3_report(&ms[0], &ms[1], &ms[2], p.as_ref())?
        }
        Identity::Eq17 => eq17_report(&ms[0], &ms[1])?,
        Identity::Ibp => {
            let (u, v) = match doc.elements::<S>()? {
                Some(pair) => pair,
                None => {
                    let mut rng = trial_rng(loaded.seed, 1);
                    (
                        random::element(&mut rng, n, None, 3),
                        random::element(&mut rng, n, None, 3),
                    )
                }
            };
            integration_by_parts_report(&EndoTuple::new(ms)?, &u, &v)?
        }
        Identity::Conjugacy => {
            let p = match doc.conjugator::<S>()? {
                Some(p) => p,
                None => random::invertible_matrix(&mut trial_rng(loaded.seed, 2), n),
            };
            conjugacy_invariance_check(&EndoTuple::new(ms)?, &p)?
        }
        Identity::Trsq => tr_square_identity(&ms[0])?,
        Identity::ClassicalCh => classical_ch_residual(&ms[0])?,
    };
    Ok(report)
}

fn verify_in<S: Scalar>(cli: &Cli, loaded: &Loaded, identity: Identity) -> Result<(String, bool), Failure> {
    let report = evaluate::<S>(loaded, identity)?
        .with_tolerance(cli.tol)
        .with_seed(loaded.seed);
    let stdout = match cli.output {
        Output::Json => to_json(&ReportJson::from_report(&report)),
        Output::Table => report_table(&report),
    };
    Ok((stdout, report.is_zero))
}

fn matrix_lines<S: Scalar>(m: &Matrix<S>, indent: &str, out: &mut String) {
    for row in m.row_vecs() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{indent}[{}]", cells.join(", "));
    }
}

fn report_table<S: Scalar>(r: &IdentityReport<S>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "identity: {}", r.identity);
    let _ = writeln!(s, "n: {}", r.n);
    let _ = writeln!(s, "mode: {}", S::MODE);
    if let Some(seed) = r.seed {
        let _ = writeln!(s, "seed: {seed}");
    }
    if let Some(err) = r.max_abs {
        let _ = writeln!(s, "max_abs: {err:e} (scale {:e})", r.scale);
    }
    let _ = writeln!(s, "result: {}", if r.is_zero { "zero" } else { "NONZERO" });
    let _ = writeln!(s, "residual:");
    match &r.residual {
        Residual::Scalar(x) => {
            let _ = writeln!(s, "  {x}");
        }
        Residual::Matrix(m) => matrix_lines(m, "  ", &mut s),
        Residual::Matrices(ms) => {
            for (k, m) in ms.iter().enumerate() {
                let _ = writeln!(s, "  #{k}");
                matrix_lines(m, "    ", &mut s);
            }
        }
        Residual::Tensor(t) => {
            if t.is_zero() {
                let _ = writeln!(s, "  (all entries zero)");
            }
            for (i, v) in t.nonzero_entries() {
                let _ = writeln!(s, "  tau{} = {v}", index_text(i.exponents()));
            }
        }
        Residual::Series(ss) => {
            for (k, series) in ss.iter().enumerate() {
                let _ = writeln!(s, "  form #{k}: {}", if series.is_zero() { "0" } else { "nonzero" });
                for (i, u) in series.coefficients() {
                    let _ = writeln!(s, "    z^{} : {u:?}", index_text(i.exponents()));
                }
            }
        }
    }
    s
}
