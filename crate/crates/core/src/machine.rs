//! The experiment `e^ε_{u,d}`: exact outcome probabilities for a pure state
//! and single-trial simulation of the hidden break point.

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::sphere::{check_parameters, UnitVector};

/// A pure state `p_v` is the particle's position on the sphere.
pub type SphereState = UnitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    /// The particle ends at `u`.
    O1,
    /// The particle ends at `−u`.
    O2,
}

impl Outcome {
    pub fn other(self) -> Outcome {
        match self {
            Outcome::O1 => Outcome::O2,
            Outcome::O2 => Outcome::O1,
        }
    }
}

/// An experiment along `axis` whose elastic breaks uniformly on
/// `[(d−ε)u, (d+ε)u]` and nowhere else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonExperiment {
    pub axis: UnitVector,
    epsilon: f64,
    d: f64,
}

impl EpsilonExperiment {
    pub fn new(axis: UnitVector, epsilon: f64, d: f64) -> Result<Self> {
        check_parameters(epsilon, d)?;
        // Pull d back inside the range if it only overshot by rounding.
        let d = d.clamp(-1.0 + epsilon, 1.0 - epsilon);
        Ok(Self { axis, epsilon, d })
    }

    /// The original quantum machine: ε = 1, d = 0.
    pub fn quantum(axis: UnitVector) -> Self {
        Self { axis, epsilon: 1.0, d: 0.0 }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// End points `(d − ε, d + ε)` of the breakable band, as projections on the axis.
    pub fn band(&self) -> (f64, f64) {
        (self.d - self.epsilon, self.d + self.epsilon)
    }

    /// The same experiment around another axis.
    pub fn with_axis(&self, axis: UnitVector) -> Self {
        Self { axis, ..*self }
    }

    /// Probability of `O1` for a particle whose projection on the axis is `x`.
    pub fn p1_at_projection(&self, x: f64) -> f64 {
        let (lo, hi) = self.band();
        if self.epsilon == 0.0 {
            return if x > self.d {
                1.0
            } else if x < self.d {
                0.0
            } else {
                0.5
            };
        }
        if x <= lo {
            0.0
        } else if x >= hi {
            1.0
        } else {
            (x - lo) / (2.0 * self.epsilon)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution {
    pub p1: f64,
    pub p2: f64,
}

impl OutcomeDistribution {
    fn from_p1(p1: f64) -> Self {
        Self { p1, p2: 1.0 - p1 }
    }

    pub fn of(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::O1 => self.p1,
            Outcome::O2 => self.p2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub outcome: Outcome,
    /// `p_u` after `O1`, `p_{−u}` after `O2`.
    pub post_state: SphereState,
    /// Projection on the axis where the elastic broke.
    pub break_point: f64,
}

pub fn outcome_probabilities(e: &EpsilonExperiment, state: &SphereState) -> OutcomeDistribution {
    OutcomeDistribution::from_p1(e.p1_at_projection(state.dot(&e.axis)))
}

/// One run of the machine. The break point is drawn uniformly on the band;
/// the particle goes to `u` iff the break lies strictly below it.
pub fn run_trial<R: Rng + ?Sized>(e: &EpsilonExperiment, state: &SphereState, stream: &mut R) -> TrialResult {
    let x = state.dot(&e.axis);
    let (outcome, break_point) = if e.epsilon == 0.0 {
        let outcome = if x > e.d {
            Outcome::O1
        } else if x < e.d {
            Outcome::O2
        } else if stream.gen::<bool>() {
            Outcome::O1
        } else {
            Outcome::O2
        };
        (outcome, e.d)
    } else {
        let (lo, _) = e.band();
        let b = lo + 2.0 * e.epsilon * stream.gen::<f64>();
        (if b < x { Outcome::O1 } else { Outcome::O2 }, b)
    };
    let post_state = match outcome {
        Outcome::O1 => e.axis,
        Outcome::O2 => -e.axis,
    };
    TrialResult { outcome, post_state, break_point }
}

/// Frequency of `O1` over `n` trials and its binomial standard error.
pub fn estimate_with<R: Rng + ?Sized>(
    e: &EpsilonExperiment,
    state: &SphereState,
    n: u64,
    stream: &mut R,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Usage("trial count must be at least 1".into()));
    }
    let hits = (0..n).filter(|_| run_trial(e, state, stream).outcome == Outcome::O1).count();
    Ok(frequency(hits as u64, n))
}

pub fn estimate_probability_mc(e: &EpsilonExperiment, state: &SphereState, n: u64, seed: u64) -> Result<(f64, f64)> {
    estimate_with(e, state, n, &mut crate::stream_from_seed(seed, 0))
}

pub(crate) fn frequency(hits: u64, n: u64) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (p, math::sqrt(p * (1.0 - p) / n as f64))
}
