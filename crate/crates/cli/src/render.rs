//! Text, JSON and CSV renderings of each command's result.
//!
//! JSON reports are objects led by `"schema": 1` and `"command"`, followed
//! by `"input"`, `"settings"` and the command's payload.

use std::fmt::Write;

use morse_core::indexform::{GalerkinBasis, Identification, IndexReport};
use morse_core::jacobi::{ConjugateReport, JacobiSolution, TraceSample};
use morse_core::spectral::Crossing;
use morse_core::suite::{SuiteParams, SuiteReport};
use serde_json::{json, Value};

use crate::config::Input;

/// Uniform `λ` samples for eigenvalue trajectories in CSV output.
pub const TRAJECTORY_SAMPLES: usize = 200;
/// Number of smallest eigenvalues written per trajectory sample.
const TRAJECTORY_WIDTH: usize = 8;

pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: String,
    /// False when the computed quantities disagree (exit code 1).
    pub agree: bool,
}

pub fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn header(input: &Input, settings: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("input".into(), input.source.clone());
    m.insert("settings".into(), settings);
    m.insert("normal_dim".into(), json!(input.profile.dim()));
    if let Some(g) = &input.geodesic {
        m.insert(
            "geodesic".into(),
            json!({
                "speed": g.speed,
                "start": g.position[0],
                "end": g.position[g.position.len() - 1],
            }),
        );
    }
    m
}

fn describe(input: &Input) -> String {
    let src = &input.source;
    if let Some(name) = src.get("builtin").and_then(Value::as_str) {
        format!("built-in {name}, length {}", src["length"])
    } else if let Some(path) = src.get("spec").and_then(Value::as_str) {
        format!("spec {path}")
    } else {
        format!("constant profile {}, n={}", src["constant"], src["normal_dim"])
    }
}

pub fn conjugate(
    input: &Input,
    settings: Value,
    sol: &JacobiSolution,
    conj: &ConjugateReport,
    trace: &[TraceSample],
) -> Report {
    let mut m = header(input, settings);
    m.insert("conjugate_points".into(), json!(conj.points));
    m.insert("total".into(), json!(conj.total));
    m.insert("nondegenerate".into(), json!(conj.nondegenerate));
    m.insert("wronskian_defect".into(), json!(sol.wronskian_defect()));

    let mut text = format!("conjugate instants ({})\n{:>14}  {:>4}\n", describe(input), "t", "m(t)");
    for p in &conj.points {
        let _ = writeln!(text, "{:>14.10}  {:>4}", p.t, p.multiplicity);
    }
    let _ = writeln!(
        text,
        "total {}, endpoint {}",
        conj.total,
        if conj.nondegenerate { "nondegenerate" } else { "conjugate (degenerate)" }
    );

    let mut csv = String::from("t,det_j,sigma_min,count\n");
    for s in trace {
        let _ = writeln!(csv, "{},{},{},{}", s.t, s.det_j, s.sigma_min, s.count);
    }
    Report {
        json: Value::Object(m),
        text,
        csv,
        agree: true,
    }
}

pub fn index(input: &Input, settings: Value, basis: &GalerkinBasis, mu: usize, eigenvalues: &[f64]) -> Report {
    let mut m = header(input, settings);
    m.insert("galerkin_dim".into(), json!(basis.dim()));
    m.insert("index".into(), json!(mu));
    m.insert(
        "smallest_eigenvalues".into(),
        json!(eigenvalues.iter().take(TRAJECTORY_WIDTH).collect::<Vec<_>>()),
    );
    let text = format!(
        "Morse index {mu} ({}; {} sine modes, n={})\n",
        describe(input),
        basis.modes,
        basis.n
    );
    let mut csv = String::from("k,eigenvalue\n");
    for (k, e) in eigenvalues.iter().enumerate() {
        let _ = writeln!(csv, "{},{}", k + 1, e);
    }
    Report {
        json: Value::Object(m),
        text,
        csv,
        agree: true,
    }
}

pub fn crossings(
    input: &Input,
    settings: Value,
    crossings: &[Crossing],
    conj: &ConjugateReport,
    id: &Identification,
    trajectories: &[(f64, Vec<f64>)],
) -> Report {
    let mut m = header(input, settings);
    let rows: Vec<Value> = crossings
        .iter()
        .map(|c| {
            json!({
                "lambda0": c.lambda0,
                "kernel_dim": c.kernel_dim(),
                "signature": c.signature,
                "form_eigenvalues": c.form_eigenvalues,
            })
        })
        .collect();
    m.insert("crossings".into(), Value::Array(rows));
    m.insert("conjugate_points".into(), json!(conj.points));
    m.insert("matches_conjugate_points".into(), json!(id.matches));
    m.insert("max_offset".into(), json!(id.max_offset));

    let mut text = format!(
        "crossings of the index-form path ({})\n{:>14}  {:>6}  {:>9}\n",
        describe(input),
        "lambda",
        "kernel",
        "signature"
    );
    for c in crossings {
        let _ = writeln!(text, "{:>14.10}  {:>6}  {:>9}", c.lambda0, c.kernel_dim(), c.signature);
    }
    let _ = writeln!(
        text,
        "conjugate instants {}: {} (max offset {:.1e})",
        conj.points.len(),
        if id.matches { "match" } else { "MISMATCH" },
        id.max_offset
    );

    let width = trajectories.first().map_or(0, |(_, e)| e.len().min(TRAJECTORY_WIDTH));
    let mut csv = String::from("lambda");
    for k in 1..=width {
        let _ = write!(csv, ",ev{k}");
    }
    csv.push('\n');
    for (lambda, ev) in trajectories {
        csv.push_str(&lambda.to_string());
        for e in ev.iter().take(width) {
            let _ = write!(csv, ",{e}");
        }
        csv.push('\n');
    }
    Report {
        json: Value::Object(m),
        text,
        csv,
        agree: id.matches,
    }
}

fn diagnostics_csv(csv: &mut String, trial: Option<usize>, r: &IndexReport) {
    for d in &r.diagnostics {
        for (k, (c, f)) in d.closed_form.iter().zip(&d.finite_difference).enumerate() {
            if let Some(t) = trial {
                let _ = write!(csv, "{t},");
            }
            let _ = writeln!(csv, "{},{},{},{}", d.lambda0, k, c, f);
        }
    }
}

pub fn verify(input: &Input, settings: Value, r: &IndexReport) -> Report {
    let mut m = header(input, settings);
    if let Value::Object(fields) = json!(r) {
        m.extend(fields);
    }
    let mut text = format!("index theorem check ({})\n", describe(input));
    let _ = writeln!(text, "  Galerkin index          {}", r.mu_galerkin);
    let _ = writeln!(text, "  conjugate instants      {}", r.conjugate_total);
    let _ = writeln!(text, "  crossing signature sum  {}", r.crossing_signature_sum);
    let _ = writeln!(text, "  agree                   {}", if r.agree { "yes" } else { "NO" });
    if !r.diagnostics.is_empty() {
        let _ = writeln!(text, "{:>14}  {:>4}  {:>14}  {:>14}", "lambda", "m", "closed form", "finite diff");
        for d in &r.diagnostics {
            for (c, f) in d.closed_form.iter().zip(&d.finite_difference) {
                let _ = writeln!(text, "{:>14.10}  {:>4}  {:>14.8}  {:>14.8}", d.lambda0, d.multiplicity, c, f);
            }
        }
    }
    let mut csv = String::from("lambda0,vector,closed_form,finite_difference\n");
    diagnostics_csv(&mut csv, None, r);
    Report {
        json: Value::Object(m),
        text,
        csv,
        agree: r.agree,
    }
}

pub fn suite(params: &SuiteParams, settings: Value, r: &SuiteReport) -> Report {
    let mut m = serde_json::Map::new();
    m.insert(
        "input".into(),
        json!({ "random": params.trials, "seed": params.seed, "prng": r.prng, "fiber_dims": params.fiber_dims }),
    );
    m.insert("settings".into(), settings);
    m.insert(
        "summary".into(),
        json!({
            "trials": r.trials.len(),
            "all_agree": r.all_agree,
            "redraws": r.redraws,
            "redraw_rate": r.redraw_rate,
        }),
    );
    m.insert("trials".into(), json!(r.trials));

    let mut text = String::new();
    for t in &r.trials {
        let _ = writeln!(
            text,
            "trial {:>3}  n={}  index {:>2}  conjugate {:>2}  signatures {:>3}  {}",
            t.trial,
            t.fiber_dim,
            t.report.mu_galerkin,
            t.report.conjugate_total,
            t.report.crossing_signature_sum,
            if t.report.agree { "agree" } else { "DISAGREE" }
        );
    }
    let agreeing = r.trials.iter().filter(|t| t.report.agree).count();
    let _ = writeln!(
        text,
        "{agreeing}/{} trials agree; {} redraws (rate {:.3}); seed {} ({})",
        r.trials.len(),
        r.redraws,
        r.redraw_rate,
        r.seed,
        r.prng
    );

    let mut csv = String::from("trial,lambda0,vector,closed_form,finite_difference\n");
    for t in &r.trials {
        diagnostics_csv(&mut csv, Some(t.trial), &t.report);
    }
    Report {
        json: Value::Object(m),
        text,
        csv,
        agree: r.all_agree,
    }
}
