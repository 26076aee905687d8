//! Conditional probability `P(u, w, μ)`: the chance that `e^ε_{u,d}` yields a
//! given outcome when the state was prepared so that `e^ε_{w,c}` would yield
//! a given outcome with certainty.
//!
//! Three routes are provided. Quadrature over the conditioned measure is the
//! reference. Monte Carlo samples the conditioned measure and runs the
//! machine. The published closed form (for `d = c = 0`) is evaluated exactly
//! as printed, with diagnostics for its Heaviside regimes and real domains.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::machine::{frequency, run_trial, EpsilonExperiment, Outcome};
use crate::math::{self, PI};
use crate::measures::{condition, eig_set, outcome_probability_mixed_tol, MixedState, OutcomeSet, Region};
use crate::sphere::{angle_between, UnitVector};

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    MonteCarlo,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// More than one Heaviside product of the closed form is switched on.
    RegimeOverlap,
    /// A radicand or inverse-trig argument left its real domain.
    DomainInvalid,
}

impl Validity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Validity::Valid => "valid",
            Validity::RegimeOverlap => "regime-overlap",
            Validity::DomainInvalid => "domain-invalid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalQuery {
    pub e_target: EpsilonExperiment,
    pub e_condition: EpsilonExperiment,
    pub target_outcome: Outcome,
    pub condition_outcome: Outcome,
    pub base: MixedState,
}

impl ConditionalQuery {
    pub fn new(
        e_target: EpsilonExperiment,
        e_condition: EpsilonExperiment,
        target_outcome: Outcome,
        condition_outcome: Outcome,
        base: MixedState,
    ) -> Result<Self> {
        if e_target.epsilon() != e_condition.epsilon() {
            return Err(domain!(
                "both experiments must share ε (got {} and {})",
                e_target.epsilon(),
                e_condition.epsilon()
            ));
        }
        Ok(Self { e_target, e_condition, target_outcome, condition_outcome, base })
    }

    /// `P(u, w, μ)` with `d = c = 0`, uniform base, `w` at the north pole and
    /// `u` at angle `alpha` from it.
    pub fn symmetric(epsilon: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&alpha) {
            return Err(domain!("alpha {alpha} outside [0, π]"));
        }
        let w = EpsilonExperiment::new(UnitVector::NORTH, epsilon, 0.0)?;
        let u = w.with_axis(UnitVector::in_xz_plane(alpha));
        Self::new(u, w, Outcome::O1, Outcome::O1, MixedState::Uniform)
    }

    /// Angle between the two experiment axes.
    pub fn alpha(&self) -> f64 {
        angle_between(&self.e_target.axis, &self.e_condition.axis)
    }

    /// The prepared state. When the eigenstate set shrinks to a single point
    /// where the base measure has positive density (ε + c = 1), the limit of
    /// conditioning on shrinking caps is the point mass there.
    pub fn conditioned_state(&self) -> Result<MixedState> {
        match condition(&self.base, &self.e_condition, self.condition_outcome.into()) {
            Err(Error::Conditioning(msg)) => {
                if let Region::Cap(k) = eig_set(&self.e_condition, self.condition_outcome.into()) {
                    if k.half_angle() == 0.0 && matches!(self.base.density_at(&k.center)?, Some(dens) if dens > 0.0) {
                        return Ok(MixedState::Point(k.center));
                    }
                }
                Err(Error::Conditioning(msg))
            }
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalResult {
    pub value: f64,
    pub method: Method,
    /// Quadrature: requested tolerance. Monte Carlo: standard error.
    /// Closed form: distance to the quadrature value.
    pub error_bound: f64,
    pub validity: Validity,
    pub diagnostics: Option<ClosedFormDiagnostics>,
}

pub fn conditional_quad(q: &ConditionalQuery, tol: f64) -> Result<ConditionalResult> {
    if !(tol > 0.0) {
        return Err(domain!("tolerance must be positive"));
    }
    let state = q.conditioned_state()?;
    let value = outcome_probability_mixed_tol(&q.e_target, OutcomeSet::from(q.target_outcome), &state, tol)?;
    Ok(ConditionalResult { value, method: Method::Quadrature, error_bound: tol, validity: Validity::Valid, diagnostics: None })
}

pub fn conditional_mc(q: &ConditionalQuery, n: u64, seed: u64) -> Result<ConditionalResult> {
    conditional_mc_stream(q, n, &mut crate::stream_from_seed(seed, 0))
}

pub fn conditional_mc_stream<R: rand::Rng + ?Sized>(q: &ConditionalQuery, n: u64, stream: &mut R) -> Result<ConditionalResult> {
    if n == 0 {
        return Err(Error::Usage("trial count must be at least 1".into()));
    }
    let state = q.conditioned_state()?;
    let mut hits = 0u64;
    for _ in 0..n {
        let v = state.sample(stream)?;
        if run_trial(&q.e_target, &v, stream).outcome == q.target_outcome {
            hits += 1;
        }
    }
    let (value, error_bound) = frequency(hits, n);
    Ok(ConditionalResult { value, method: Method::MonteCarlo, error_bound, validity: Validity::Valid, diagnostics: None })
}

/// Every intermediate quantity of the printed closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormDiagnostics {
    pub epsilon: f64,
    pub alpha: f64,
    /// Arguments of `H(ε − cos α/2)`, `H(ε − sin α/2)`, `H(cos α/2 − ε)`, `H(sin α/2 − ε)`.
    pub heaviside_args: [f64; 4],
    /// Which of the three terms (`p₁`, `p₂`, `p₃`) is switched on.
    pub active_terms: [bool; 3],
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub omega_u: f64,
    pub omega_minus_u: f64,
    pub sigma_u: f64,
    pub sigma_minus_u: f64,
    /// `1 − (ε / cos(α/2))²`, under the square roots of ω(u,w) and σ(u,w).
    pub radicand_u: f64,
    /// Same radicand with `α → π − α`.
    pub radicand_minus_u: f64,
    /// Quantities required by an active term that left their real domain.
    pub invalid: Vec<&'static str>,
}

fn heaviside(x: f64) -> bool {
    x >= 0.0
}

/// ω and σ at angle `a`, with the names of any domain violations.
fn omega_sigma(epsilon: f64, a: f64, invalid: &mut Vec<&'static str>, tag: (&'static str, &'static str)) -> (f64, f64, f64) {
    let half = a / 2.0;
    let (c, s) = (math::cos(half), math::sin(half));
    let radicand = if c == 0.0 { f64::NEG_INFINITY } else { 1.0 - (epsilon / c) * (epsilon / c) };
    let rest = 1.0 - epsilon * epsilon;
    let root_rest = math::sqrt(rest);

    let mut omega_ok = radicand >= 0.0 && rest > 0.0;
    let acos_arg = math::clamp_unit(math::sqrt(radicand.max(0.0) / rest));
    let asin_arg = math::clamp_unit(s / root_rest);
    omega_ok &= acos_arg.abs() <= 1.0 && asin_arg.abs() <= 1.0;
    let omega = if omega_ok {
        4.0 * epsilon * math::acos(acos_arg) - 4.0 * math::asin(asin_arg)
    } else {
        invalid.push(tag.0);
        f64::NAN
    };

    let tan = math::tan(half);
    let arc_arg = math::clamp_unit(epsilon * tan / root_rest);
    let sigma_ok = radicand >= 0.0 && rest > 0.0 && tan.is_finite() && c != 0.0 && arc_arg.abs() <= 1.0;
    let sigma = if sigma_ok {
        epsilon * tan * math::sqrt(radicand) - rest * math::acos(arc_arg)
    } else {
        invalid.push(tag.1);
        f64::NAN
    };
    (omega, sigma, radicand)
}

/// Evaluates the published closed form for `P(u, w, μ)` with `d = c = 0`.
/// The result's `error_bound` is its distance to [`conditional_quad`].
pub fn conditional_closed_form(epsilon: f64, alpha: f64) -> Result<ConditionalResult> {
    let mut r = closed_form_value(epsilon, alpha)?;
    let quad = conditional_quad(&ConditionalQuery::symmetric(epsilon, alpha)?, DEFAULT_TOL)?;
    r.error_bound = math::abs(r.value - quad.value);
    Ok(r)
}

/// The closed form alone; `error_bound` is left NaN.
pub fn closed_form_value(epsilon: f64, alpha: f64) -> Result<ConditionalResult> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(domain!("closed form needs ε in (0, 1], got {epsilon}"));
    }
    if !(0.0..=PI).contains(&alpha) {
        return Err(domain!("alpha {alpha} outside [0, π]"));
    }
    let (c, s) = (math::cos(alpha / 2.0), math::sin(alpha / 2.0));
    let cos_a = math::cos(alpha);
    let heaviside_args = [epsilon - c, epsilon - s, c - epsilon, s - epsilon];
    let mut active_terms = [
        heaviside(heaviside_args[0]),
        heaviside(heaviside_args[1]) && heaviside(heaviside_args[2]),
        heaviside(heaviside_args[3]),
    ];

    let p1 = cos_a * (1.0 + epsilon) / (4.0 * epsilon) + 0.5;

    let mut omega_issues = Vec::new();
    let (omega_u, sigma_u, radicand_u) = omega_sigma(epsilon, alpha, &mut omega_issues, ("omega(u,w)", "sigma(u,w)"));
    let mut minus_issues = Vec::new();
    let (omega_minus_u, sigma_minus_u, radicand_minus_u) =
        omega_sigma(epsilon, PI - alpha, &mut minus_issues, ("omega(-u,w)", "sigma(-u,w)"));

    let one_minus = 1.0 - epsilon;
    let p2 = p1 + 0.5 + omega_u / (4.0 * PI * one_minus) + (cos_a + 1.0) / (4.0 * PI * epsilon * one_minus) * sigma_u;
    let p3 = p1
        + (omega_u - omega_minus_u) / (4.0 * PI * one_minus)
        + ((cos_a - 1.0) * sigma_minus_u + (cos_a + 1.0) * sigma_u) / (4.0 * PI * epsilon * one_minus);

    // At ε = 1 only p₁ contributes; p₂ and p₃ carry 1/(1 − ε).
    if epsilon == 1.0 {
        active_terms = [true, false, false];
    }

    let mut invalid = Vec::new();
    if active_terms[1] {
        invalid.extend(omega_issues.iter().copied());
    }
    if active_terms[2] {
        for name in omega_issues.iter().chain(minus_issues.iter()) {
            if !invalid.contains(name) {
                invalid.push(*name);
            }
        }
    }

    let terms = [p1, p2, p3];
    let value: f64 = terms.iter().zip(active_terms).filter(|(_, on)| *on).map(|(p, _)| *p).sum();
    let active_count = active_terms.iter().filter(|on| **on).count();
    let validity = if active_count > 1 {
        Validity::RegimeOverlap
    } else if !invalid.is_empty() || !value.is_finite() {
        Validity::DomainInvalid
    } else {
        Validity::Valid
    };

    Ok(ConditionalResult {
        value,
        method: Method::ClosedForm,
        error_bound: f64::NAN,
        validity,
        diagnostics: Some(ClosedFormDiagnostics {
            epsilon,
            alpha,
            heaviside_args,
            active_terms,
            p1,
            p2,
            p3,
            omega_u,
            omega_minus_u,
            sigma_u,
            sigma_minus_u,
            radicand_u,
            radicand_minus_u,
            invalid,
        }),
    })
}

/// Closed form for a general query, reduced to `P(u, w, μ)` by the
/// complement law and `w → −w` (which maps α to π − α). Requires a uniform
/// base and `d = c = 0`.
pub fn closed_form_for_query(q: &ConditionalQuery) -> Result<ConditionalResult> {
    if q.base != MixedState::Uniform || q.e_target.d() != 0.0 || q.e_condition.d() != 0.0 {
        return Err(domain!("the closed form covers a uniform base with d = c = 0 only"));
    }
    let alpha = match q.condition_outcome {
        Outcome::O1 => q.alpha(),
        Outcome::O2 => PI - q.alpha(),
    };
    let mut r = closed_form_value(q.e_target.epsilon(), alpha.clamp(0.0, PI))?;
    if q.target_outcome == Outcome::O2 {
        r.value = 1.0 - r.value;
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub alpha: f64,
    pub p_quad: f64,
    pub p_closed_form: f64,
    pub validity: Validity,
    pub p_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
}

/// The `(ε, α)` grid of a sweep in output order: ε ascending, then α from 0
/// to π in `alpha_steps` equal steps.
pub fn sweep_grid(epsilons: &[f64], alpha_steps: usize) -> Result<Vec<(f64, f64)>> {
    if alpha_steps < 2 {
        return Err(Error::Usage("alpha_steps must be at least 2".into()));
    }
    if let Some(bad) = epsilons.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(domain!("epsilon {bad} outside [0, 1]"));
    }
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    let mut grid = Vec::with_capacity(eps.len() * alpha_steps);
    for e in eps {
        for k in 0..alpha_steps {
            grid.push((e, PI * k as f64 / (alpha_steps - 1) as f64));
        }
    }
    Ok(grid)
}

/// One sweep row. Monte Carlo draws from sub-stream `row_index` of the seed,
/// so rows can be computed in any order.
pub fn sweep_row(epsilon: f64, alpha: f64, tol: f64, mc: Option<McConfig>, row_index: u64) -> Result<SweepRow> {
    let q = ConditionalQuery::symmetric(epsilon, alpha)?;
    let p_quad = conditional_quad(&q, tol)?.value;
    let (p_closed_form, validity) = match closed_form_value(epsilon, alpha) {
        Ok(r) => (r.value, r.validity),
        Err(_) => (f64::NAN, Validity::DomainInvalid),
    };
    let (p_mc, mc_stderr) = match mc {
        Some(cfg) => {
            let r = conditional_mc_stream(&q, cfg.trials, &mut crate::stream_from_seed(cfg.seed, row_index))?;
            (Some(r.value), Some(r.error_bound))
        }
        None => (None, None),
    };
    Ok(SweepRow { epsilon, alpha, p_quad, p_closed_form, validity, p_mc, mc_stderr })
}

pub fn sweep(epsilons: &[f64], alpha_steps: usize, tol: f64, mc: Option<McConfig>) -> Result<Vec<SweepRow>> {
    sweep_grid(epsilons, alpha_steps)?
        .into_iter()
        .enumerate()
        .map(|(i, (e, a))| sweep_row(e, a, tol, mc, i as u64))
        .collect()
}
