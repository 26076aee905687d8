//! Mixed states as probability measures on the sphere, the eigenstate and
//! possibility-state sets of an experiment, and conditioning.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::machine::{EpsilonExperiment, Outcome};
use crate::math::PI;
use crate::quadrature::{integrate_over_caps, Kernel};
use crate::sphere::{sample_uniform_cap, sample_uniform_sphere, Boundary, SectorCap, UnitVector};

use rand::Rng;

const MAX_REJECTIONS: usize = 1_000_000;

/// Absolute tolerance on probabilities computed by quadrature.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Slack used when comparing probabilities that should agree exactly.
pub const EQUALITY_TOL: f64 = 1e-9;

/// A subset `A ⊂ {o1, o2}` of an experiment's outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeSet {
    O1,
    O2,
    Both,
    Neither,
}

impl From<Outcome> for OutcomeSet {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::O1 => OutcomeSet::O1,
            Outcome::O2 => OutcomeSet::O2,
        }
    }
}

/// The sets of states the crate can measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Empty,
    Full,
    Cap(SectorCap),
    Complement(SectorCap),
}

impl Region {
    pub fn contains(&self, v: &UnitVector) -> bool {
        match self {
            Region::Empty => false,
            Region::Full => true,
            Region::Cap(c) => c.contains(v),
            Region::Complement(c) => !c.contains(v),
        }
    }
}

/// A situation of lack of knowledge about the state.
#[derive(Debug, Clone, PartialEq)]
pub enum MixedState {
    /// Uniform over the whole sphere.
    Uniform,
    /// A pure state: all mass at one point.
    Point(UnitVector),
    /// Uniform over a cap of positive area.
    CapUniform(SectorCap),
    /// Uniform over the intersection of several caps (positive area).
    CapIntersection(Vec<SectorCap>),
    /// Convex combination; weights sum to one.
    Mixture(Vec<(f64, MixedState)>),
}

impl MixedState {
    pub fn cap_uniform(cap: SectorCap) -> Result<Self> {
        if cap.half_angle() <= 0.0 {
            return Err(domain!("a cap-uniform state needs a cap of positive area"));
        }
        Ok(MixedState::CapUniform(cap))
    }

    pub fn mixture(components: Vec<(f64, MixedState)>) -> Result<Self> {
        if components.is_empty() {
            return Err(domain!("empty mixture"));
        }
        if components.iter().any(|(w, _)| !(0.0..=1.0).contains(w)) {
            return Err(domain!("mixture weights must lie in [0, 1]"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain!("mixture weights sum to {total}, not 1"));
        }
        Ok(MixedState::Mixture(components))
    }

    /// The caps whose intersection carries a uniform state, if any.
    fn support(&self) -> Option<&[SectorCap]> {
        match self {
            MixedState::CapUniform(c) => Some(core::slice::from_ref(c)),
            MixedState::CapIntersection(cs) => Some(cs),
            _ => None,
        }
    }

    /// Draws a state distributed according to this measure.
    pub fn sample<R: Rng + ?Sized>(&self, stream: &mut R) -> Result<UnitVector> {
        match self {
            MixedState::Uniform => Ok(sample_uniform_sphere(stream)),
            MixedState::Point(v) => Ok(*v),
            MixedState::CapUniform(c) => sample_uniform_cap(stream, c),
            MixedState::CapIntersection(cs) => {
                let smallest = cs
                    .iter()
                    .min_by(|a, b| a.half_angle().total_cmp(&b.half_angle()))
                    .ok_or_else(|| domain!("empty cap intersection"))?;
                for _ in 0..MAX_REJECTIONS {
                    let v = sample_uniform_cap(stream, smallest)?;
                    if cs.iter().all(|c| c.contains(&v)) {
                        return Ok(v);
                    }
                }
                Err(Error::Numeric { what: "rejection sampling of a cap intersection".into(), residual: 1.0 })
            }
            MixedState::Mixture(parts) => {
                let r: f64 = stream.gen();
                let mut acc = 0.0;
                for (w, part) in parts {
                    acc += w;
                    if r < acc {
                        return part.sample(stream);
                    }
                }
                parts.last().ok_or_else(|| domain!("empty mixture"))?.1.sample(stream)
            }
        }
    }

    /// Density with respect to surface area at `v`; `None` for a point mass.
    pub fn density_at(&self, v: &UnitVector) -> Result<Option<f64>> {
        Ok(match self {
            MixedState::Uniform => Some(1.0 / (4.0 * PI)),
            MixedState::Point(_) => None,
            MixedState::CapUniform(_) | MixedState::CapIntersection(_) => {
                let caps = self.support().unwrap_or(&[]);
                if caps.iter().all(|c| c.contains(v)) {
                    Some(1.0 / area(caps)?)
                } else {
                    Some(0.0)
                }
            }
            MixedState::Mixture(parts) => {
                let mut total = 0.0;
                for (w, part) in parts {
                    match part.density_at(v)? {
                        Some(dens) => total += w * dens,
                        None => return Ok(None),
                    }
                }
                Some(total)
            }
        })
    }
}

/// States for which `e` gives an outcome in `a` with certainty.
pub fn eig_set(e: &EpsilonExperiment, a: OutcomeSet) -> Region {
    let boundary = if e.epsilon() > 0.0 { Boundary::Closed } else { Boundary::Open };
    let (lambda, mu) = angles(e);
    match a {
        OutcomeSet::Both => Region::Full,
        OutcomeSet::Neither => Region::Empty,
        OutcomeSet::O1 => Region::Cap(cap(e.axis, lambda, boundary)),
        OutcomeSet::O2 => Region::Cap(cap(-e.axis, mu, boundary)),
    }
}

/// States for which an outcome in `a` is possible.
pub fn pos_set(e: &EpsilonExperiment, a: OutcomeSet) -> Region {
    let boundary = if e.epsilon() > 0.0 { Boundary::Open } else { Boundary::Closed };
    let (lambda, mu) = angles(e);
    match a {
        OutcomeSet::Both => Region::Full,
        OutcomeSet::Neither => Region::Empty,
        OutcomeSet::O1 => Region::Cap(cap(e.axis, PI - mu, boundary)),
        OutcomeSet::O2 => Region::Cap(cap(-e.axis, PI - lambda, boundary)),
    }
}

fn angles(e: &EpsilonExperiment) -> (f64, f64) {
    crate::sphere::sector_angles(e.epsilon(), e.d()).expect("experiment parameters are validated")
}

fn cap(center: UnitVector, half_angle: f64, boundary: Boundary) -> SectorCap {
    SectorCap::new(center, half_angle.clamp(0.0, PI), boundary).expect("clamped half-angle")
}

/// A measured probability. `below_resolution` marks a quadrature result that
/// could not be told apart from zero and was reported as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub below_resolution: bool,
}

impl Measured {
    fn exact(value: f64) -> Self {
        Self { value, below_resolution: false }
    }
}

pub fn measure_of(mu: &MixedState, region: &Region) -> Result<Measured> {
    match region {
        Region::Empty => Ok(Measured::exact(0.0)),
        Region::Full => Ok(Measured::exact(1.0)),
        Region::Cap(k) => mass_in_cap(mu, k),
        Region::Complement(k) => {
            let m = mass_in_cap(mu, k)?;
            Ok(Measured { value: 1.0 - m.value, below_resolution: m.below_resolution })
        }
    }
}

fn mass_in_cap(mu: &MixedState, k: &SectorCap) -> Result<Measured> {
    match mu {
        MixedState::Uniform => Ok(Measured::exact(k.area_fraction())),
        MixedState::Point(v) => Ok(Measured::exact(if k.contains(v) { 1.0 } else { 0.0 })),
        MixedState::CapUniform(c) => {
            if c.is_within(k) {
                Ok(Measured::exact(1.0))
            } else if c.is_disjoint_from(k) {
                Ok(Measured::exact(0.0))
            } else if k.is_within(c) {
                Ok(Measured::exact(k.area() / c.area()))
            } else {
                lens_fraction(core::slice::from_ref(c), k)
            }
        }
        MixedState::CapIntersection(cs) => {
            if cs.iter().any(|c| c.is_within(k)) {
                Ok(Measured::exact(1.0))
            } else if cs.iter().any(|c| c.is_disjoint_from(k)) {
                Ok(Measured::exact(0.0))
            } else {
                lens_fraction(cs, k)
            }
        }
        MixedState::Mixture(parts) => {
            let mut total = Measured::exact(0.0);
            for (w, part) in parts {
                let m = mass_in_cap(part, k)?;
                total.value += w * m.value;
                total.below_resolution |= m.below_resolution;
            }
            Ok(total)
        }
    }
}

/// `area(∩support ∩ k) / area(∩support)`.
fn lens_fraction(support: &[SectorCap], k: &SectorCap) -> Result<Measured> {
    let denom = area(support)?;
    let mut caps: Vec<SectorCap> = support.to_vec();
    caps.push(*k);
    let num = integrate_over_caps(&caps, &Kernel::One, DEFAULT_TOL * denom);
    if !num.converged {
        return Err(Error::Numeric { what: "cap intersection area".into(), residual: num.error / denom });
    }
    let value = (num.value / denom).clamp(0.0, 1.0);
    if value <= num.error / denom {
        return Ok(Measured { value: 0.0, below_resolution: true });
    }
    Ok(Measured::exact(value))
}

fn area(caps: &[SectorCap]) -> Result<f64> {
    if let [c] = caps {
        return Ok(c.area());
    }
    let r = integrate_over_caps(caps, &Kernel::One, DEFAULT_TOL * 1e-3);
    if !r.converged {
        return Err(Error::Numeric { what: "cap intersection area".into(), residual: r.error });
    }
    Ok(r.value)
}

/// The outcome-`O1` kernel of `e` as a function on the sphere.
pub(crate) fn o1_kernel(e: &EpsilonExperiment) -> Kernel {
    if e.epsilon() > 0.0 {
        let (lo, hi) = e.band();
        Kernel::Ramp { axis: e.axis, lo, hi }
    } else {
        Kernel::Step { axis: e.axis, threshold: e.d() }
    }
}

/// `P(a, μ) = ∫ P(a, p_v) dμ(v)`.
pub fn outcome_probability_mixed(e: &EpsilonExperiment, a: OutcomeSet, mu: &MixedState) -> Result<f64> {
    outcome_probability_mixed_tol(e, a, mu, DEFAULT_TOL)
}

pub fn outcome_probability_mixed_tol(e: &EpsilonExperiment, a: OutcomeSet, mu: &MixedState, tol: f64) -> Result<f64> {
    match a {
        OutcomeSet::Both => Ok(1.0),
        OutcomeSet::Neither => Ok(0.0),
        OutcomeSet::O1 => p1_mixed(e, mu, tol),
        OutcomeSet::O2 => Ok(1.0 - p1_mixed(e, mu, tol)?),
    }
}

fn p1_mixed(e: &EpsilonExperiment, mu: &MixedState, tol: f64) -> Result<f64> {
    match mu {
        // The projection of a uniform point is uniform on [−1, 1].
        MixedState::Uniform => Ok((1.0 - e.d()) / 2.0),
        MixedState::Point(v) => Ok(e.p1_at_projection(v.dot(&e.axis))),
        MixedState::CapUniform(_) | MixedState::CapIntersection(_) => {
            let caps = mu.support().unwrap_or(&[]);
            let denom = area(caps)?;
            let num = integrate_over_caps(caps, &o1_kernel(e), tol * denom);
            if !num.converged {
                return Err(Error::Numeric { what: "outcome probability".into(), residual: num.error / denom });
            }
            Ok((num.value / denom).clamp(0.0, 1.0))
        }
        MixedState::Mixture(parts) => {
            let mut total = 0.0;
            for (w, part) in parts {
                total += w * p1_mixed(e, part, tol)?;
            }
            Ok(total)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    /// `μ(eig(A))`
    pub lower: f64,
    /// `P(A, μ)`
    pub mid: f64,
    /// `μ(pos(A))`
    pub upper: f64,
    pub holds: bool,
}

/// Evaluates `μ(eig(A)) ≤ P(A, μ) ≤ μ(pos(A))`.
pub fn sandwich_check(e: &EpsilonExperiment, a: OutcomeSet, mu: &MixedState) -> Result<Sandwich> {
    let lower = measure_of(mu, &eig_set(e, a))?.value;
    let mid = outcome_probability_mixed(e, a, mu)?;
    let upper = measure_of(mu, &pos_set(e, a))?.value;
    let holds = lower <= mid + EQUALITY_TOL && mid <= upper + EQUALITY_TOL;
    Ok(Sandwich { lower, mid, upper, holds })
}

/// Whether every outcome of `e` is predetermined for μ-almost every state.
pub fn is_classical(e: &EpsilonExperiment, mu: &MixedState) -> Result<bool> {
    for a in [OutcomeSet::O1, OutcomeSet::O2] {
        let eig = measure_of(mu, &eig_set(e, a))?.value;
        let pos = measure_of(mu, &pos_set(e, a))?.value;
        if (eig - pos).abs() > EQUALITY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Restricts μ to `eig_f(A)` and renormalizes.
pub fn condition(mu: &MixedState, f: &EpsilonExperiment, a: OutcomeSet) -> Result<MixedState> {
    match eig_set(f, a) {
        Region::Full => Ok(mu.clone()),
        Region::Empty | Region::Complement(_) => {
            Err(Error::Conditioning("cannot condition on an empty eigenstate set".into()))
        }
        Region::Cap(k) => restrict(mu, &k),
    }
}

fn restrict(mu: &MixedState, k: &SectorCap) -> Result<MixedState> {
    let mass = mass_in_cap(mu, k)?.value;
    if mass <= 0.0 {
        return Err(Error::Conditioning("the eigenstate set has measure zero; this certainty cannot be prepared".into()));
    }
    Ok(match mu {
        MixedState::Uniform => MixedState::CapUniform(*k),
        MixedState::Point(v) => MixedState::Point(*v),
        MixedState::CapUniform(c) => {
            if c.is_within(k) {
                MixedState::CapUniform(*c)
            } else if k.is_within(c) {
                MixedState::CapUniform(*k)
            } else {
                MixedState::CapIntersection(alloc::vec![*c, *k])
            }
        }
        MixedState::CapIntersection(cs) => {
            if cs.iter().any(|c| c.is_within(k)) {
                mu.clone()
            } else if cs.iter().all(|c| k.is_within(c)) {
                MixedState::CapUniform(*k)
            } else {
                let mut caps = cs.clone();
                caps.push(*k);
                MixedState::CapIntersection(caps)
            }
        }
        MixedState::Mixture(parts) => {
            let mut kept = Vec::new();
            for (w, part) in parts {
                let m = mass_in_cap(part, k)?.value;
                if *w > 0.0 && m > 0.0 {
                    kept.push((w * m / mass, restrict(part, k)?));
                }
            }
            if kept.len() == 1 {
                kept.pop().map(|(_, s)| s).expect("one component")
            } else {
                // Renormalize away rounding in the weights.
                let total: f64 = kept.iter().map(|(w, _)| w).sum();
                MixedState::Mixture(kept.into_iter().map(|(w, s)| (w / total, s)).collect())
            }
        }
    })
}
