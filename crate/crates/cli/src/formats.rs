//! Input schemas and output rendering.

use std::fmt::Write as _;

use qmachine_core::conditional::{ClosedFormDiagnostics, SweepRow};
use qmachine_core::embeddability::{
    atom_label, parse_rational, render, render_over, Classification, ConditionalDatum, ConstraintSet, HilbertVerdict,
    KolmogorovVerdict, Literal, Rational, TriadData, ATOMS,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

/// A probability written as a JSON number (kept exact) or a `"p/q"` string.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ExactNumber {
    Number(serde_json::Number),
    Text(String),
}

impl ExactNumber {
    fn to_rational(&self) -> CliResult<Rational> {
        let text = match self {
            ExactNumber::Number(n) => n.to_string(),
            ExactNumber::Text(s) => s.clone(),
        };
        Ok(parse_rational(&text)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarginalsJson {
    #[serde(rename = "U")]
    u: ExactNumber,
    #[serde(rename = "V")]
    v: ExactNumber,
    #[serde(rename = "W")]
    w: ExactNumber,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionalJson {
    event: String,
    given: String,
    p: ExactNumber,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriadJson {
    marg: MarginalsJson,
    cond: Vec<ConditionalJson>,
    /// Optional slack allowed on every constraint row.
    #[serde(default)]
    tolerance: Option<ExactNumber>,
}

fn schema_error(what: &str, e: serde_json::Error) -> CliError {
    CliError::Usage(format!("schema error in {what}: {e}"))
}

pub fn parse_triad(text: &str) -> CliResult<TriadData> {
    let raw: TriadJson = serde_json::from_str(text).map_err(|e| schema_error("triad JSON", e))?;
    let marginals = [raw.marg.u.to_rational()?, raw.marg.v.to_rational()?, raw.marg.w.to_rational()?];
    let conditionals = raw
        .cond
        .iter()
        .map(|c| {
            Ok(ConditionalDatum { event: Literal::parse(&c.event)?, given: Literal::parse(&c.given)?, p: c.p.to_rational()? })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let triad = TriadData::new(marginals, conditionals)?;
    Ok(match raw.tolerance {
        Some(t) => triad.with_tolerance(t.to_rational()?)?,
        None => triad,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionJson {
    pub label: String,
    pub yes: f64,
    pub pre_yes: f64,
    pub pre_no: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyJson {
    pub questions: Vec<QuestionJson>,
    /// Coplanar axis angles; defaults to 0°, 60°, 120° for three questions.
    #[serde(default)]
    pub angles_deg: Option<Vec<f64>>,
}

pub fn parse_survey(text: &str) -> CliResult<SurveyJson> {
    let s: SurveyJson = serde_json::from_str(text).map_err(|e| schema_error("survey JSON", e))?;
    if s.questions.is_empty() {
        return Err(CliError::Usage("schema error in survey JSON: no questions".into()));
    }
    Ok(s)
}

pub fn metadata(seed: u64, trials: u64) -> Value {
    json!({ "seed": seed, "trials": trials, "version": env!("CARGO_PKG_VERSION") })
}

fn combination(set: &ConstraintSet, comb: &[(i32, usize)]) -> Vec<String> {
    comb.iter()
        .map(|&(k, i)| {
            let label = &set.rows[i].label;
            match k {
                1 => label.clone(),
                -1 => format!("-{label}"),
                k => format!("{k}·{label}"),
            }
        })
        .collect()
}

pub fn kolmogorov_json(triad: &TriadData, verdict: &KolmogorovVerdict) -> Value {
    let set = qmachine_core::embeddability::joint_constraints(triad);
    let scale = set.display_scale();
    let constraints: Vec<Value> = set
        .rows
        .iter()
        .map(|r| json!({ "row": r.label, "rhs": render_over(&r.rhs, &scale), "slack": render(&r.slack) }))
        .collect();
    match verdict {
        KolmogorovVerdict::Feasible { witness } => {
            let atoms: serde_json::Map<String, Value> =
                (0..ATOMS).rev().map(|a| (atom_label(a), Value::String(render(&witness[a])))).collect();
            json!({ "kolmogorov": "feasible", "witness": atoms, "constraints": constraints })
        }
        KolmogorovVerdict::Infeasible { certificate } => {
            let mut cert = serde_json::Map::new();
            if let Some(b) = &certificate.bound {
                cert.insert("atom".into(), json!(b.atom_label()));
                cert.insert("lower".into(), json!(render_over(&b.lower, &scale)));
                cert.insert("upper".into(), json!(render_over(&b.upper, &scale)));
                cert.insert("lower_from".into(), json!(combination(&set, &b.lower_from)));
                cert.insert("upper_from".into(), json!(combination(&set, &b.upper_from)));
            }
            let farkas: Vec<String> = certificate.farkas.iter().map(render).collect();
            cert.insert("farkas".into(), json!(farkas));
            cert.insert("verified".into(), json!(certificate.verify(&set)));
            json!({ "kolmogorov": "infeasible", "certificate": cert, "constraints": constraints })
        }
    }
}

pub fn hilbert_json(v: &HilbertVerdict) -> Value {
    json!({
        "hilbert": if v.feasible { "feasible" } else { "infeasible" },
        "gamma2": render(&v.gamma2),
        "delta2": render(&v.delta2),
        "required_cosine": v.required_cosine_f64(),
        "required_cosine_exact": render(&v.required_cosine),
    })
}

pub fn classification_json(triad: &TriadData, c: &Classification) -> Value {
    json!({
        "class": c.class.as_str(),
        "kolmogorov": kolmogorov_json(triad, &c.kolmogorov),
        "hilbert": hilbert_json(&c.hilbert),
    })
}

pub fn diagnostics_json(d: &ClosedFormDiagnostics) -> Value {
    json!({
        "heaviside_args": d.heaviside_args,
        "active_terms": d.active_terms,
        "p1": d.p1, "p2": d.p2, "p3": d.p3,
        "omega_u": d.omega_u, "omega_minus_u": d.omega_minus_u,
        "sigma_u": d.sigma_u, "sigma_minus_u": d.sigma_minus_u,
        "radicand_u": d.radicand_u, "radicand_minus_u": d.radicand_minus_u,
        "invalid": d.invalid,
    })
}

pub const CSV_HEADER: &str = "epsilon,alpha,p_quad,p_closed_form,validity,p_mc,mc_stderr";

fn field(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v}"),
        _ => String::new(),
    }
}

/// Rows in the given order; non-finite or absent values are left empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.epsilon,
            r.alpha,
            field(Some(r.p_quad)),
            field(Some(r.p_closed_form)),
            r.validity.as_str(),
            field(r.p_mc),
            field(r.mc_stderr)
        );
    }
    out
}
