//! Opinion polls read as ε-model experiments.
//!
//! Each question is an experiment `e^ε_{u,d}` on the respondent's state. The
//! fraction of people with a predetermined "yes" is the uniform measure of
//! the yes-eigenstate cap, `(1 − ε − d)/2`; predetermined "no" is
//! `(1 − ε + d)/2`. Inverting gives `ε` and `d`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::conditional::{conditional_quad, ConditionalQuery};
use crate::embeddability::{classify, rational_from_f64, Classification, Rational, TriadData};
use crate::error::{Error, Result};
use crate::machine::{frequency, EpsilonExperiment, Outcome};
use crate::math;
use crate::measures::{eig_set, MixedState, OutcomeSet};
use crate::sphere::{angle_between, sample_uniform_sphere, UnitVector};

/// Largest spread of fitted ε values accepted without a warning.
pub const EPSILON_SPREAD_TOL: f64 = 1e-9;
/// Largest gap between observed and predicted yes-rate before it is flagged.
pub const YES_RATE_TOL: f64 = 0.01;
/// Grid used to turn predicted probabilities into rationals.
pub const TRIAD_DENOMINATOR: u64 = 1_000_000_000;
/// Slack on every triad row, absorbing quadrature and rounding error.
pub const TRIAD_SLACK: &str = "1e-7";

#[derive(Debug, Clone, PartialEq)]
pub struct QuestionStats {
    pub label: String,
    pub yes_fraction: f64,
    pub predetermined_yes: f64,
    pub predetermined_no: f64,
}

impl QuestionStats {
    pub fn new(label: impl Into<String>, yes_fraction: f64, predetermined_yes: f64, predetermined_no: f64) -> Result<Self> {
        let label = label.into();
        for (name, v) in [("yes", yes_fraction), ("pre_yes", predetermined_yes), ("pre_no", predetermined_no)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InconsistentData(format!("{label}: {name} = {v} is not in [0,1]")));
            }
        }
        if predetermined_yes + predetermined_no > 1.0 + 1e-12 {
            return Err(Error::InconsistentData(format!("{label}: predetermined fractions exceed 1")));
        }
        Ok(QuestionStats { label, yes_fraction, predetermined_yes, predetermined_no })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics {
    /// Uniform-population yes-rate implied by the fit, `(1 − d)/2`.
    pub predicted_yes: f64,
    pub yes_rate_mismatch: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub epsilon: f64,
    pub d: f64,
    pub diagnostics: FitDiagnostics,
}

pub fn fit_epsilon_model(q: &QuestionStats) -> Result<Fit> {
    let (a, b) = (q.predetermined_yes, q.predetermined_no);
    let epsilon = 1.0 - a - b;
    let d = b - a;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InconsistentData(format!("{}: fitted ε = {epsilon} outside [0,1]", q.label)));
    }
    if math::abs(d) > 1.0 - epsilon + 1e-12 {
        return Err(Error::InconsistentData(format!("{}: fitted d = {d} outside [−1+ε, 1−ε]", q.label)));
    }
    let predicted_yes = (1.0 - d) / 2.0;
    let diagnostics = FitDiagnostics {
        predicted_yes,
        yes_rate_mismatch: math::abs(predicted_yes - q.yes_fraction) > YES_RATE_TOL,
    };
    Ok(Fit { epsilon, d, diagnostics })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedQuestion {
    pub stats: QuestionStats,
    pub fit: Fit,
    pub experiment: EpsilonExperiment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyModel {
    pub questions: Vec<FittedQuestion>,
    /// The ε shared by every experiment.
    pub epsilon: f64,
    pub warnings: Vec<String>,
}

impl SurveyModel {
    /// Fits each question and places its axis. With `force_epsilon`, every
    /// experiment uses that ε and keeps its fitted `d`.
    pub fn fit(questions: Vec<QuestionStats>, axes: Vec<UnitVector>, force_epsilon: Option<f64>) -> Result<Self> {
        if questions.len() != axes.len() {
            return Err(Error::Usage(format!("{} questions but {} axes", questions.len(), axes.len())));
        }
        if questions.is_empty() {
            return Err(Error::Usage("survey needs at least one question".into()));
        }
        let mut warnings = Vec::new();
        let mut fitted = Vec::with_capacity(questions.len());
        for (stats, axis) in questions.into_iter().zip(axes) {
            let fit = fit_epsilon_model(&stats)?;
            if fit.diagnostics.yes_rate_mismatch {
                warnings.push(format!(
                    "{}: observed yes-rate {} differs from predicted {:.4}",
                    stats.label, stats.yes_fraction, fit.diagnostics.predicted_yes
                ));
            }
            fitted.push((stats, fit, axis));
        }
        let lo = fitted.iter().map(|f| f.1.epsilon).fold(f64::INFINITY, f64::min);
        let hi = fitted.iter().map(|f| f.1.epsilon).fold(f64::NEG_INFINITY, f64::max);
        let epsilon = match force_epsilon {
            Some(e) => e,
            None => {
                if hi - lo > EPSILON_SPREAD_TOL {
                    warnings.push(format!("fitted ε ranges over [{lo}, {hi}]; using the mean"));
                }
                fitted.iter().map(|f| f.1.epsilon).sum::<f64>() / fitted.len() as f64
            }
        };
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Domain(format!("ε = {epsilon} outside [0,1]")));
        }
        let mut questions = Vec::with_capacity(fitted.len());
        for (stats, fit, axis) in fitted {
            if math::abs(fit.d) > 1.0 - epsilon + 1e-12 {
                return Err(Error::InconsistentData(format!(
                    "{}: d = {} incompatible with ε = {epsilon}",
                    stats.label, fit.d
                )));
            }
            let experiment = EpsilonExperiment::new(axis, epsilon, fit.d)?;
            questions.push(FittedQuestion { stats, fit, experiment });
        }
        Ok(SurveyModel { questions, epsilon, warnings })
    }

    /// Axes in the x–z plane at the given angles (radians).
    pub fn fit_coplanar(questions: Vec<QuestionStats>, angles: &[f64], force_epsilon: Option<f64>) -> Result<Self> {
        let axes = angles.iter().map(|&a| UnitVector::in_xz_plane(a)).collect();
        Self::fit(questions, axes, force_epsilon)
    }

    pub fn axis_angle(&self, i: usize, j: usize) -> f64 {
        angle_between(&self.questions[i].experiment.axis, &self.questions[j].experiment.axis)
    }
}

/// `P(answer_i = a | answer_j = b)` for every pair of answers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalTable {
    pub target: usize,
    pub given: usize,
    pub angle: f64,
    pub yes_given_yes: f64,
    pub no_given_yes: f64,
    pub yes_given_no: f64,
    pub no_given_no: f64,
}

fn answer(yes: bool) -> Outcome {
    if yes {
        Outcome::O1
    } else {
        Outcome::O2
    }
}

pub fn conditional_probability(m: &SurveyModel, target: usize, yes: bool, given: usize, given_yes: bool, tol: f64) -> Result<f64> {
    let q = ConditionalQuery::new(
        m.questions[target].experiment,
        m.questions[given].experiment,
        answer(yes),
        answer(given_yes),
        MixedState::Uniform,
    )?;
    Ok(conditional_quad(&q, tol)?.value)
}

/// One table per ordered pair of distinct questions.
pub fn predict_conditionals(m: &SurveyModel, tol: f64) -> Result<Vec<ConditionalTable>> {
    let n = m.questions.len();
    let mut out = Vec::new();
    for target in 0..n {
        for given in 0..n {
            if target == given {
                continue;
            }
            let p = |yes, given_yes| conditional_probability(m, target, yes, given, given_yes, tol);
            out.push(ConditionalTable {
                target,
                given,
                angle: m.axis_angle(target, given),
                yes_given_yes: p(true, true)?,
                no_given_yes: p(false, true)?,
                yes_given_no: p(true, false)?,
                no_given_no: p(false, false)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Opinion {
    Yes,
    No,
    Undecided,
}

impl Opinion {
    pub fn as_str(self) -> &'static str {
        match self {
            Opinion::Yes => "yes",
            Opinion::No => "no",
            Opinion::Undecided => "none",
        }
    }
}

fn opinion_of(e: &EpsilonExperiment, v: &UnitVector) -> Opinion {
    if eig_set(e, OutcomeSet::O1).contains(v) {
        Opinion::Yes
    } else if eig_set(e, OutcomeSet::O2).contains(v) {
        Opinion::No
    } else {
        Opinion::Undecided
    }
}

/// Raw census tallies indexed by `9·o₀ + 3·o₁ + o₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusCounts {
    pub counts: [u64; 27],
    pub total: u64,
}

impl CensusCounts {
    pub fn empty() -> Self {
        CensusCounts { counts: [0; 27], total: 0 }
    }

    pub fn merge(&mut self, other: &CensusCounts) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }
}

const OPINIONS: [Opinion; 3] = [Opinion::Yes, Opinion::No, Opinion::Undecided];

fn three_questions(m: &SurveyModel) -> Result<[EpsilonExperiment; 3]> {
    match m.questions.as_slice() {
        [a, b, c] => Ok([a.experiment, b.experiment, c.experiment]),
        qs => Err(Error::Usage(format!("census needs exactly 3 questions, got {}", qs.len()))),
    }
}

pub fn census_counts<R: Rng + ?Sized>(m: &SurveyModel, n: u64, stream: &mut R) -> Result<CensusCounts> {
    let es = three_questions(m)?;
    let mut c = CensusCounts::empty();
    for _ in 0..n {
        let v = sample_uniform_sphere(stream);
        let idx = es.iter().fold(0, |acc, e| 3 * acc + opinion_of(e, &v) as usize);
        c.counts[idx] += 1;
    }
    c.total = n;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusRegion {
    pub opinions: [Opinion; 3],
    pub fraction: f64,
    pub std_error: f64,
}

/// Nonempty regions, in pattern order.
pub fn census_regions(c: &CensusCounts) -> Result<Vec<CensusRegion>> {
    if c.total == 0 {
        return Err(Error::Usage("census needs at least one sample".into()));
    }
    Ok(c.counts
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| {
            let (fraction, std_error) = frequency(k, c.total);
            CensusRegion { opinions: [OPINIONS[i / 9], OPINIONS[i / 3 % 3], OPINIONS[i % 3]], fraction, std_error }
        })
        .collect())
}

pub fn region_census(m: &SurveyModel, n: u64, seed: u64) -> Result<Vec<CensusRegion>> {
    census_regions(&census_counts(m, n, &mut crate::stream_from_seed(seed, 0))?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyClassification {
    pub triad: TriadData,
    pub gamma2: Rational,
    pub classification: Classification,
}

/// Reads questions 0, 1, 2 as `U`, `V`, `W`. The triad is
/// `P(V|W)`, `P(U|W)`, `P(U^c|V)` with model marginals; `γ² = P(V|W)`.
pub fn classify_survey(m: &SurveyModel, tol: f64) -> Result<SurveyClassification> {
    three_questions(m)?;
    let to_q = |x: f64| rational_from_f64(x, TRIAD_DENOMINATOR);
    let marg = |i: usize| to_q((1.0 - m.questions[i].experiment.d()) / 2.0);
    let v_given_w = to_q(conditional_probability(m, 1, true, 2, true, tol)?)?;
    let u_given_w = to_q(conditional_probability(m, 0, true, 2, true, tol)?)?;
    let not_u_given_v = to_q(conditional_probability(m, 0, false, 1, true, tol)?)?;
    let slack = crate::embeddability::parse_rational(TRIAD_SLACK)?;
    let triad = TriadData::standard([marg(0)?, marg(1)?, marg(2)?], v_given_w.clone(), u_given_w, not_u_given_v)?
        .with_tolerance(slack)?;
    let gamma2 = v_given_w;
    let classification = classify(&triad, &gamma2)?;
    Ok(SurveyClassification { triad, gamma2, classification })
}
