//! Two-dimensional Hilbert-space check for the symmetric triad.
//!
//! Three orthonormal bases `{φ₁,φ₂}`, `{ψ₁,ψ₂}`, `{χ₁,χ₂}` of ℂ² with all
//! adjacent transition probabilities `γ²` and all skew ones `δ² = 1 − γ²`
//! exist iff the phase condition `cos θ = (δ² − δ⁴ − γ⁴)/(2δ²γ²)` can be met.

use alloc::format;

use num_traits::{One, Signed, Zero};

use super::Rational;
use super::rational::to_f64;
use crate::error::{Error, Result};
use crate::math;
use crate::sphere::UnitVector;
use crate::spin::{spin_state, SpinState};

#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVerdict {
    pub feasible: bool,
    pub gamma2: Rational,
    pub delta2: Rational,
    pub required_cosine: Rational,
}

impl HilbertVerdict {
    pub fn required_cosine_f64(&self) -> f64 {
        to_f64(&self.required_cosine)
    }
}

pub fn check_hilbert2d(gamma2: &Rational) -> Result<HilbertVerdict> {
    if gamma2.is_zero() || gamma2.is_one() {
        return Err(Error::DegenerateInput(format!(
            "gamma2 = {gamma2} makes the phase condition undefined"
        )));
    }
    if gamma2.is_negative() || *gamma2 > Rational::one() {
        return Err(Error::Domain(format!("gamma2 = {gamma2} is not a probability")));
    }
    let delta2 = Rational::one() - gamma2;
    let g4 = gamma2 * gamma2;
    let d4 = &delta2 * &delta2;
    let two = Rational::from_integer(2.into());
    let required_cosine = (&delta2 - &d4 - &g4) / (two * &delta2 * gamma2);
    let feasible = required_cosine.abs() <= Rational::one();
    Ok(HilbertVerdict { feasible, gamma2: gamma2.clone(), delta2, required_cosine })
}

/// Explicit bases realizing a feasible symmetric triad.
#[derive(Debug, Clone)]
pub struct HilbertWitness {
    /// Bloch directions of `φ₁`, `ψ₁`, `χ₁`; the second vector of each basis is antipodal.
    pub directions: [UnitVector; 3],
    pub phi: [SpinState; 2],
    pub psi: [SpinState; 2],
    pub chi: [SpinState; 2],
}

impl HilbertWitness {
    /// Largest deviation of the six defining transition probabilities from `γ²`/`δ²`.
    pub fn max_defect(&self, gamma2: f64) -> f64 {
        let delta2 = 1.0 - gamma2;
        let tp = |a: &SpinState, b: &SpinState| a.inner(b).norm_sqr();
        [
            tp(&self.phi[0], &self.psi[0]) - gamma2,
            tp(&self.psi[0], &self.chi[0]) - gamma2,
            tp(&self.chi[0], &self.phi[1]) - gamma2,
            tp(&self.phi[0], &self.psi[1]) - delta2,
            tp(&self.psi[0], &self.chi[1]) - delta2,
            tp(&self.chi[0], &self.phi[0]) - delta2,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(math::abs(*d)))
    }
}

/// Builds the bases from a Cholesky factor of the Bloch-vector Gram matrix
/// `[[1,k,−k],[k,1,k],[−k,k,1]]`, `k = 2γ² − 1`. Returns `None` when infeasible.
pub fn hilbert_witness(gamma2: f64) -> Result<Option<HilbertWitness>> {
    if !(gamma2 > 0.0 && gamma2 < 1.0) {
        return Err(Error::DegenerateInput(format!("gamma2 = {gamma2} must lie strictly inside (0,1)")));
    }
    let k = 2.0 * gamma2 - 1.0;
    let s = math::sqrt(1.0 - k * k);
    let cy = k * (1.0 + k) / s;
    let cz2 = 1.0 - k * k - cy * cy;
    if cz2 < -1e-12 {
        return Ok(None);
    }
    let a = UnitVector::X;
    let b = UnitVector::new(k, s, 0.0)?;
    let c = UnitVector::normalize(-k, cy, math::sqrt(cz2.max(0.0)))?;
    Ok(Some(HilbertWitness {
        directions: [a, b, c],
        phi: [spin_state(&a), spin_state(&-a)],
        psi: [spin_state(&b), spin_state(&-b)],
        chi: [spin_state(&c), spin_state(&-c)],
    }))
}
