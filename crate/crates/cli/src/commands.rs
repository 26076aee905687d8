use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use qmachine_core::conditional::{
    closed_form_for_query, conditional_mc, conditional_quad, sweep_grid, sweep_row, ConditionalQuery, ConditionalResult,
    McConfig,
};
use qmachine_core::embeddability::{check_hilbert2d, check_kolmogorov, classify, parse_rational};
use qmachine_core::machine::{estimate_probability_mc, outcome_probabilities};
use qmachine_core::survey::{
    census_counts, census_regions, classify_survey, predict_conditionals, CensusCounts, QuestionStats, SurveyModel,
};
use qmachine_core::{stream_from_seed, EpsilonExperiment, MixedState, Outcome, UnitVector};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::formats;

/// Samples per census chunk; each chunk draws from its own sub-stream.
const CENSUS_CHUNK: u64 = 1 << 16;

pub struct Units {
    degrees: bool,
}

impl Units {
    pub fn new(degrees: bool) -> Self {
        Units { degrees }
    }

    fn angle(&self, a: f64) -> f64 {
        if self.degrees {
            a.to_radians()
        } else {
            a
        }
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn vector(v: &[f64]) -> CliResult<UnitVector> {
    if v.len() != 3 {
        return Err(CliError::Usage(format!("expected three comma-separated components, got {}", v.len())));
    }
    Ok(UnitVector::normalize(v[0], v[1], v[2])?)
}

fn resolve_experiment(a: &ExperimentArgs, units: &Units) -> CliResult<(EpsilonExperiment, UnitVector)> {
    let s = &a.state;
    let axis = match &s.axis {
        Some(v) => vector(v)?,
        None => UnitVector::NORTH,
    };
    let e = EpsilonExperiment::new(axis, a.epsilon, a.d)?;
    let state = if let Some(theta) = s.theta {
        let theta = units.angle(theta);
        if !(0.0..=PI).contains(&theta) {
            return Err(CliError::Usage(format!("theta {theta} outside [0, π]")));
        }
        UnitVector::in_xz_plane(theta)
    } else if let Some(x) = s.x {
        if !(-1.0..=1.0).contains(&x) {
            return Err(CliError::Usage(format!("x {x} outside [-1, 1]")));
        }
        UnitVector::in_xz_plane(x.acos())
    } else if let Some(v) = &s.state {
        vector(v)?
    } else {
        return Err(CliError::Usage("one of --theta, --x or --state is required".into()));
    };
    Ok((e, state))
}

pub fn prob(a: &ProbArgs, units: &Units) -> CliResult<Value> {
    let (e, state) = resolve_experiment(&a.experiment, units)?;
    let dist = outcome_probabilities(&e, &state);
    Ok(json!({
        "epsilon": e.epsilon(),
        "d": e.d(),
        "x": state.dot(&e.axis),
        "p1": dist.p1,
        "p2": dist.p2,
    }))
}

pub fn simulate(a: &SimulateArgs, units: &Units) -> CliResult<Value> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let (e, state) = resolve_experiment(&a.experiment, units)?;
    let (p, se) = estimate_probability_mc(&e, &state, a.trials, a.seed.seed)?;
    Ok(json!({
        "estimate": p,
        "std_error": se,
        "exact": outcome_probabilities(&e, &state).p1,
        "metadata": formats::metadata(a.seed.seed, a.trials),
    }))
}

fn result_json(r: &ConditionalResult) -> Value {
    let mut v = json!({
        "value": r.value,
        "method": format!("{:?}", r.method).to_lowercase(),
        "error_bound": r.error_bound,
        "validity": r.validity.as_str(),
    });
    if let Some(d) = &r.diagnostics {
        v["diagnostics"] = formats::diagnostics_json(d);
    }
    v
}

pub fn conditional(a: &ConditionalArgs, units: &Units) -> CliResult<Value> {
    let alpha = units.angle(a.alpha);
    if !(0.0..=PI).contains(&alpha) {
        return Err(CliError::Usage(format!("alpha {alpha} outside [0, π]")));
    }
    let w = EpsilonExperiment::new(UnitVector::NORTH, a.epsilon, a.c)?;
    let u = EpsilonExperiment::new(UnitVector::in_xz_plane(alpha), a.epsilon, a.d)?;
    let q = ConditionalQuery::new(u, w, Outcome::O1, Outcome::O1, MixedState::Uniform)?;
    let (result, meta) = match a.method {
        MethodArg::Quad => (conditional_quad(&q, a.tol)?, None),
        MethodArg::Mc => {
            if a.trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            (conditional_mc(&q, a.trials, a.seed.seed)?, Some(formats::metadata(a.seed.seed, a.trials)))
        }
        MethodArg::Formula => {
            if a.d != 0.0 || a.c != 0.0 {
                return Err(CliError::Usage("the closed form is only defined for d = c = 0".into()));
            }
            (closed_form_for_query(&q)?, None)
        }
    };
    let mut v = json!({ "epsilon": a.epsilon, "alpha": alpha, "d": a.d, "c": a.c, "result": result_json(&result) });
    if let Some(m) = meta {
        v["metadata"] = m;
    }
    Ok(v)
}

/// Returns the CSV text and a summary. Rows are computed in parallel and
/// emitted in grid order.
pub fn sweep(a: &SweepArgs) -> CliResult<(String, Value)> {
    if a.epsilons.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(CliError::Usage("every epsilon must lie in [0, 1]".into()));
    }
    let grid = sweep_grid(&a.epsilons, a.alpha_steps)?;
    let mc = (a.mc_trials > 0).then_some(McConfig { trials: a.mc_trials, seed: a.seed.seed });
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(eps, alpha))| sweep_row(eps, alpha, a.tol, mc, i as u64))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = json!({
        "rows": rows.len(),
        "out": a.out.as_ref().map(|p| p.display().to_string()),
        "metadata": formats::metadata(a.seed.seed, a.mc_trials),
    });
    Ok((formats::sweep_csv(&rows), summary))
}

pub fn check(c: &CheckCommand) -> CliResult<Value> {
    match c {
        CheckCommand::Kolmogorov { triad } => {
            let t = formats::parse_triad(&read_input(triad)?)?;
            Ok(formats::kolmogorov_json(&t, &check_kolmogorov(&t)))
        }
        CheckCommand::Hilbert { gamma2 } => Ok(formats::hilbert_json(&check_hilbert2d(&parse_rational(gamma2)?)?)),
        CheckCommand::Classify { triad, gamma2 } => {
            let t = formats::parse_triad(&read_input(triad)?)?;
            let c = classify(&t, &parse_rational(gamma2)?)?;
            Ok(formats::classification_json(&t, &c))
        }
    }
}

/// Census over fixed-size chunks, each on its own sub-stream, so the result
/// does not depend on the number of threads.
pub fn parallel_census(m: &SurveyModel, n: u64, seed: u64) -> CliResult<CensusCounts> {
    let chunks = n.div_ceil(CENSUS_CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let size = CENSUS_CHUNK.min(n - k * CENSUS_CHUNK);
            census_counts(m, size, &mut stream_from_seed(seed, k))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = CensusCounts::empty();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

pub fn survey(a: &SurveyArgs) -> CliResult<Value> {
    let input = formats::parse_survey(&read_input(&a.input)?)?;
    let questions = input
        .questions
        .iter()
        .map(|q| QuestionStats::new(q.label.clone(), q.yes, q.pre_yes, q.pre_no))
        .collect::<Result<Vec<_>, _>>()?;
    let angles_deg = match input.angles_deg {
        Some(a) => a,
        None if questions.len() == 3 => vec![0.0, 60.0, 120.0],
        None => return Err(CliError::Usage("angles_deg is required unless there are exactly 3 questions".into())),
    };
    if angles_deg.len() != questions.len() {
        return Err(CliError::Usage(format!("{} questions but {} angles", questions.len(), angles_deg.len())));
    }
    let angles: Vec<f64> = angles_deg.iter().map(|d| d.to_radians()).collect();
    let model = SurveyModel::fit_coplanar(questions, &angles, a.force_epsilon)?;
    let label = |i: usize| model.questions[i].stats.label.clone();

    let fitted: Vec<Value> = model
        .questions
        .iter()
        .map(|q| {
            json!({
                "label": q.stats.label,
                "epsilon_fit": q.fit.epsilon,
                "d": q.fit.d,
                "predicted_yes": q.fit.diagnostics.predicted_yes,
                "yes_rate_mismatch": q.fit.diagnostics.yes_rate_mismatch,
            })
        })
        .collect();
    let tables: Vec<Value> = predict_conditionals(&model, a.tol)?
        .iter()
        .map(|t| {
            json!({
                "target": label(t.target),
                "given": label(t.given),
                "angle_deg": t.angle.to_degrees(),
                "yes_given_yes": t.yes_given_yes,
                "no_given_yes": t.no_given_yes,
                "yes_given_no": t.yes_given_no,
                "no_given_no": t.no_given_no,
            })
        })
        .collect();

    let mut out = json!({
        "model": { "epsilon": model.epsilon, "forced": a.force_epsilon.is_some(), "questions": fitted, "warnings": model.warnings },
        "conditionals": tables,
    });
    if model.questions.len() == 3 {
        let counts = parallel_census(&model, a.census_samples, a.seed.seed)?;
        let regions: Vec<Value> = census_regions(&counts)?
            .iter()
            .map(|r| {
                let name: Vec<String> =
                    r.opinions.iter().enumerate().map(|(i, o)| format!("{}:{}", label(i), o.as_str())).collect();
                json!({ "region": name.join(" "), "fraction": r.fraction, "std_error": r.std_error })
            })
            .collect();
        out["census"] = json!({ "regions": regions.len(), "fractions": regions });
        let s = classify_survey(&model, a.tol)?;
        out["classification"] = formats::classification_json(&s.triad, &s.classification);
        out["metadata"] = formats::metadata(a.seed.seed, a.census_samples);
    }
    Ok(out)
}
