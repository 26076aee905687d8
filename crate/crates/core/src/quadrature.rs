//! Surface integrals over intersections of spherical caps.
//!
//! Integrals are taken in polar coordinates `(θ, φ)` around a pole. For a
//! fixed θ every cap constraint and every kernel threshold cuts the circle
//! of latitude into arcs, so the azimuthal integral is evaluated exactly
//! from arc end points. Only the remaining 1-D integral over θ is done
//! numerically, by adaptive Simpson split at the θ values where an arc
//! appears or vanishes.

use alloc::vec::Vec;

use crate::math::{self, PI};
use crate::sphere::{SectorCap, UnitVector};

const TWO_PI: f64 = 2.0 * PI;
const MIN_DEPTH: u32 = 4;
const MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the local Richardson error estimates.
    pub error: f64,
    /// False if some subinterval hit the depth limit above its tolerance.
    pub converged: bool,
}

impl Integral {
    pub const ZERO: Integral = Integral { value: 0.0, error: 0.0, converged: true };

    fn add(self, other: Integral) -> Integral {
        Integral {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
        }
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Integral {
    if b <= a {
        return Integral::ZERO;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Integral {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    let local_error = math::abs(delta) / 15.0;
    if depth >= MIN_DEPTH && local_error <= tol {
        return Integral { value: left + right + delta / 15.0, error: local_error, converged: true };
    }
    if depth >= MAX_DEPTH || m <= a || m >= b {
        return Integral { value: left + right + delta / 15.0, error: local_error, converged: local_error <= tol };
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        .add(simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
}

/// A finite union of disjoint closed arcs of `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    arcs: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn full() -> Self {
        Self { arcs: alloc::vec![(0.0, TWO_PI)] }
    }

    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    /// Arc `[center − half_width, center + half_width]` taken mod 2π.
    pub fn centered(center: f64, half_width: f64) -> Self {
        if half_width <= 0.0 {
            return Self::empty();
        }
        if half_width >= PI {
            return Self::full();
        }
        let lo = math::rem_euclid(center - half_width, TWO_PI);
        let hi = lo + 2.0 * half_width;
        if hi <= TWO_PI {
            Self { arcs: alloc::vec![(lo, hi)] }
        } else {
            Self { arcs: alloc::vec![(0.0, hi - TWO_PI), (lo, TWO_PI)] }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut arcs = Vec::new();
        for &(a0, a1) in &self.arcs {
            for &(b0, b1) in &other.arcs {
                let (lo, hi) = (a0.max(b0), a1.min(b1));
                if hi > lo {
                    arcs.push((lo, hi));
                }
            }
        }
        arcs.sort_by(|x, y| x.0.total_cmp(&y.0));
        ArcSet { arcs }
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    /// `∫_S cos(φ − center) dφ`.
    pub fn integrate_cos(&self, center: f64) -> f64 {
        self.arcs
            .iter()
            .map(|&(a, b)| math::sin(b - center) - math::sin(a - center))
            .sum()
    }
}

/// Integrand over the sphere as a function of the projection on an axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    One,
    /// `clamp((v·axis − lo)/(hi − lo), 0, 1)`.
    Ramp { axis: UnitVector, lo: f64, hi: f64 },
    /// `1` where `v·axis > threshold`, else `0`.
    Step { axis: UnitVector, threshold: f64 },
}

impl Kernel {
    pub fn eval(&self, v: &UnitVector) -> f64 {
        match *self {
            Kernel::One => 1.0,
            Kernel::Ramp { axis, lo, hi } => ((v.dot(&axis) - lo) / (hi - lo)).clamp(0.0, 1.0),
            Kernel::Step { axis, threshold } => {
                if v.dot(&axis) > threshold {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn axis(&self) -> Option<UnitVector> {
        match *self {
            Kernel::One => None,
            Kernel::Ramp { axis, .. } | Kernel::Step { axis, .. } => Some(axis),
        }
    }

    fn thresholds(&self) -> [Option<f64>; 2] {
        match *self {
            Kernel::One => [None, None],
            Kernel::Ramp { lo, hi, .. } => [Some(lo), Some(hi)],
            Kernel::Step { threshold, .. } => [Some(threshold), None],
        }
    }
}

/// Position of a direction relative to the integration pole.
#[derive(Debug, Clone, Copy)]
struct Polar {
    cos_beta: f64,
    sin_beta: f64,
    phi: f64,
}

impl Polar {
    fn new(pole: &UnitVector, e1: &UnitVector, e2: &UnitVector, c: &UnitVector) -> Self {
        let (p1, p2) = (c.dot(e1), c.dot(e2));
        Polar { cos_beta: c.dot(pole), sin_beta: math::sqrt(p1 * p1 + p2 * p2), phi: math::atan2(p2, p1) }
    }

    fn beta(&self) -> f64 {
        math::atan2(self.sin_beta, self.cos_beta)
    }

    /// `v·c = a + b cos(φ − φ_c)` on the circle of latitude θ.
    fn coefficients(&self, cos_t: f64, sin_t: f64) -> (f64, f64) {
        (cos_t * self.cos_beta, sin_t * self.sin_beta)
    }

    /// Azimuths on the circle of latitude where `v·c > threshold`.
    fn superlevel(&self, cos_t: f64, sin_t: f64, threshold: f64) -> ArcSet {
        let (a, b) = self.coefficients(cos_t, sin_t);
        if b <= 1e-15 {
            return if a > threshold { ArcSet::full() } else { ArcSet::empty() };
        }
        let r = (threshold - a) / b;
        if r >= 1.0 {
            ArcSet::empty()
        } else if r <= -1.0 {
            ArcSet::full()
        } else {
            ArcSet::centered(self.phi, math::acos(r))
        }
    }

    /// Latitudes where the superlevel arc for `threshold` changes shape.
    fn breakpoints(&self, threshold: f64, out: &mut Vec<f64>) {
        if !(-1.0..=1.0).contains(&threshold) {
            return;
        }
        let r0 = math::acos(threshold);
        let beta = self.beta();
        out.extend_from_slice(&[beta - r0, beta + r0, r0 - beta, TWO_PI - beta - r0]);
    }
}

/// `∫_{S ∩ {a + b cos(φ−φ₀) > L}} (a − L + b cos(φ − φ₀)) dφ`.
fn ramp_integral(set: &ArcSet, polar: &Polar, cos_t: f64, sin_t: f64, level: f64) -> f64 {
    let (a, b) = polar.coefficients(cos_t, sin_t);
    let positive = set.intersect(&polar.superlevel(cos_t, sin_t, level));
    (a - level) * positive.measure() + b * positive.integrate_cos(polar.phi)
}

/// `∫_{∩ caps} kernel dA` with absolute tolerance `tol` (area units, the
/// whole sphere being 4π). An empty cap list means the whole sphere.
pub fn integrate_over_caps(caps: &[SectorCap], kernel: &Kernel, tol: f64) -> Integral {
    let (pole, theta_max, others): (UnitVector, f64, Vec<&SectorCap>) = match caps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.half_angle().total_cmp(&b.1.half_angle()))
    {
        None => (kernel.axis().unwrap_or(UnitVector::NORTH), PI, Vec::new()),
        Some((i, smallest)) => (
            smallest.center,
            smallest.half_angle(),
            caps.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c).collect(),
        ),
    };
    if theta_max <= 0.0 {
        return Integral::ZERO;
    }
    let (e1, e2) = pole.orthonormal_frame();
    let constraints: Vec<(Polar, f64)> = others
        .iter()
        .map(|c| (Polar::new(&pole, &e1, &e2, &c.center), c.cos_half_angle()))
        .collect();
    let kernel_polar = kernel.axis().map(|a| Polar::new(&pole, &e1, &e2, &a));

    let mut cuts = alloc::vec![0.0, theta_max];
    for (p, t) in &constraints {
        p.breakpoints(*t, &mut cuts);
    }
    if let Some(kp) = &kernel_polar {
        for t in kernel.thresholds().into_iter().flatten() {
            kp.breakpoints(t, &mut cuts);
        }
    }
    cuts.retain(|t| (0.0..=theta_max).contains(t));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| math::abs(*a - *b) < 1e-14);

    let integrand = |theta: f64| {
        let (ct, st) = (math::cos(theta), math::sin(theta));
        let mut set = ArcSet::full();
        for (p, t) in &constraints {
            if set.is_empty() {
                break;
            }
            set = set.intersect(&p.superlevel(ct, st, *t));
        }
        let inner = match (*kernel, &kernel_polar) {
            (Kernel::One, _) => set.measure(),
            (Kernel::Step { threshold, .. }, Some(kp)) => set.intersect(&kp.superlevel(ct, st, threshold)).measure(),
            (Kernel::Ramp { lo, hi, .. }, Some(kp)) => {
                (ramp_integral(&set, kp, ct, st, lo) - ramp_integral(&set, kp, ct, st, hi)) / (hi - lo)
            }
            _ => unreachable!("kernels with thresholds always carry an axis"),
        };
        st * inner
    };

    cuts.windows(2).fold(Integral::ZERO, |acc, w| {
        let piece_tol = tol * (w[1] - w[0]) / theta_max;
        acc.add(adaptive_simpson(&integrand, w[0], w[1], piece_tol))
    })
}
