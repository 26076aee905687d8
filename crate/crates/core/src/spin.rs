//! Spin-½ representation of the ε = 1 machine on a two-dimensional complex
//! Hilbert space.

use core::ops::{Add, Mul, Sub};

use crate::math;
use crate::sphere::UnitVector;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// `e^{iθ}`
    pub fn cis(theta: f64) -> Self {
        Self { re: math::cos(theta), im: math::sin(theta) }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, k: f64) -> Self {
        Self { re: self.re * k, im: self.im * k }
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// Normalized state vector `(c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub c1: Complex,
    pub c2: Complex,
}

impl SpinState {
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &SpinState) -> Complex {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    /// The unit vector orthogonal to `self` (up to phase).
    pub fn orthogonal(&self) -> SpinState {
        SpinState { c1: self.c2.conj().scale(-1.0), c2: self.c1.conj() }
    }
}

/// 2×2 Hermitian matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservable {
    pub m: [[Complex; 2]; 2],
}

impl SpinObservable {
    pub fn apply(&self, s: &SpinState) -> SpinState {
        SpinState {
            c1: self.m[0][0] * s.c1 + self.m[0][1] * s.c2,
            c2: self.m[1][0] * s.c1 + self.m[1][1] * s.c2,
        }
    }

    pub fn trace(&self) -> Complex {
        self.m[0][0] + self.m[1][1]
    }

    /// Largest deviation of an entry from its Hermitian counterpart.
    pub fn hermitian_defect(&self) -> f64 {
        let d = |a: Complex, b: Complex| math::sqrt((a - b.conj()).norm_sqr());
        d(self.m[0][0], self.m[0][0]).max(d(self.m[1][1], self.m[1][1])).max(d(self.m[0][1], self.m[1][0]))
    }

    /// Roots of `λ² − tr λ + det`; real for Hermitian matrices.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.trace().re;
        let det = (self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]).re;
        let disc = math::sqrt((tr * tr - 4.0 * det).max(0.0));
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }
}

/// `ψ_v = (e^{−iφ/2} cos θ/2, e^{iφ/2} sin θ/2)` for `v` at polar angle θ and
/// azimuth φ. At the poles φ is taken as 0.
pub fn spin_state(v: &UnitVector) -> SpinState {
    let (theta, phi) = v.spherical_angles();
    SpinState {
        c1: Complex::cis(-phi / 2.0).scale(math::cos(theta / 2.0)),
        c2: Complex::cis(phi / 2.0).scale(math::sin(theta / 2.0)),
    }
}

/// `H_u = ½ [[cos α, e^{−iβ} sin α], [e^{iβ} sin α, −cos α]]` for `u` at polar
/// angle α and azimuth β.
pub fn spin_operator(u: &UnitVector) -> SpinObservable {
    let (alpha, beta) = u.spherical_angles();
    let (ca, sa) = (math::cos(alpha), math::sin(alpha));
    SpinObservable {
        m: [
            [Complex::new(ca / 2.0, 0.0), Complex::cis(-beta).scale(sa / 2.0)],
            [Complex::cis(beta).scale(sa / 2.0), Complex::new(-ca / 2.0, 0.0)],
        ],
    }
}

/// `|⟨ψ_u, ψ_v⟩|²`
pub fn transition_probability(u: &UnitVector, v: &UnitVector) -> f64 {
    spin_state(u).inner(&spin_state(v)).norm_sqr()
}
