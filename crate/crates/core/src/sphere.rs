//! Unit-sphere primitives: vectors, spherical caps, sector angles and
//! uniform samplers.

use core::ops::Neg;

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::math::{self, PI};

/// Slack allowed on parameter ranges before they count as out of domain.
pub(crate) const RANGE_SLACK: f64 = 1e-12;

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const NORTH: UnitVector = UnitVector { x: 0.0, y: 0.0, z: 1.0 };
    pub const X: UnitVector = UnitVector { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVector = UnitVector { x: 0.0, y: 1.0, z: 0.0 };

    /// Accepts components whose norm is within `1e-9` of one and
    /// renormalizes them.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || math::abs(n2 - 1.0) > 1e-9 {
            return Err(domain!("({x}, {y}, {z}) is not a unit vector"));
        }
        Ok(Self::scaled(x, y, z, math::sqrt(n2)))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = math::sqrt(x * x + y * y + z * z);
        if !n.is_finite() || n < 1e-300 {
            return Err(domain!("cannot normalize ({x}, {y}, {z})"));
        }
        Ok(Self::scaled(x, y, z, n))
    }

    fn scaled(x: f64, y: f64, z: f64, n: f64) -> Self {
        Self { x: x / n, y: y / n, z: z / n }
    }

    /// Point with polar angle `theta` from the north pole and azimuth `phi`:
    /// `(cos φ sin θ, sin φ sin θ, cos θ)`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let st = math::sin(theta);
        Self {
            x: math::cos(phi) * st,
            y: math::sin(phi) * st,
            z: math::cos(theta),
        }
    }

    /// Point in the x–z plane at `angle` from the north pole towards +x.
    pub fn in_xz_plane(angle: f64) -> Self {
        Self::from_spherical(angle, 0.0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Polar angle θ ∈ [0, π] and azimuth φ ∈ (−π, π]. At the poles φ is 0.
    pub fn spherical_angles(&self) -> (f64, f64) {
        let theta = math::acos(math::clamp_unit(self.z).clamp(-1.0, 1.0));
        let rho = math::sqrt(self.x * self.x + self.y * self.y);
        let phi = if rho == 0.0 { 0.0 } else { math::atan2(self.y, self.x) };
        (theta, phi)
    }

    /// Two unit vectors completing `self` to a right-handed orthonormal frame.
    pub fn orthonormal_frame(&self) -> (UnitVector, UnitVector) {
        // Cross with the coordinate axis least aligned with self.
        let helper = if math::abs(self.x) <= math::abs(self.y) && math::abs(self.x) <= math::abs(self.z) {
            UnitVector::X
        } else if math::abs(self.y) <= math::abs(self.z) {
            UnitVector::Y
        } else {
            UnitVector::NORTH
        };
        let e1 = cross(&helper, self);
        let e1 = UnitVector::normalize(e1.0, e1.1, e1.2).expect("helper axis is never parallel");
        let e2 = cross(self, &e1);
        let e2 = UnitVector::normalize(e2.0, e2.1, e2.2).expect("orthogonal unit vectors");
        (e1, e2)
    }

    /// The point at polar angle `theta`, azimuth `phi` around `self` in the
    /// frame returned by [`orthonormal_frame`](Self::orthonormal_frame).
    pub fn offset(&self, theta: f64, phi: f64) -> UnitVector {
        let (e1, e2) = self.orthonormal_frame();
        self.offset_in_frame(&e1, &e2, theta, phi)
    }

    pub(crate) fn offset_in_frame(&self, e1: &UnitVector, e2: &UnitVector, theta: f64, phi: f64) -> UnitVector {
        let (st, ct) = (math::sin(theta), math::cos(theta));
        let (sp, cp) = (math::sin(phi), math::cos(phi));
        let x = ct * self.x + st * (cp * e1.x + sp * e2.x);
        let y = ct * self.y + st * (cp * e1.y + sp * e2.y);
        let z = ct * self.z + st * (cp * e1.z + sp * e2.z);
        UnitVector::normalize(x, y, z).expect("rotation of a unit vector")
    }

    /// Rotation by `angle` about the z axis.
    pub fn rotate_z(&self, angle: f64) -> UnitVector {
        let (s, c) = (math::sin(angle), math::cos(angle));
        Self { x: c * self.x - s * self.y, y: s * self.x + c * self.y, z: self.z }
    }

    /// Rotation by `angle` about the x axis.
    pub fn rotate_x(&self, angle: f64) -> UnitVector {
        let (s, c) = (math::sin(angle), math::cos(angle));
        Self { x: self.x, y: c * self.y - s * self.z, z: s * self.y + c * self.z }
    }
}

impl Neg for UnitVector {
    type Output = UnitVector;
    fn neg(self) -> UnitVector {
        UnitVector { x: -self.x, y: -self.y, z: -self.z }
    }
}

fn cross(a: &UnitVector, b: &UnitVector) -> (f64, f64, f64) {
    (
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    )
}

/// Angle between two unit vectors, in `[0, π]`.
pub fn angle_between(a: &UnitVector, b: &UnitVector) -> f64 {
    math::acos(a.dot(b).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Closed,
}

/// The spherical cap `{v : v·center ≥ cos(half_angle)}` (strict for open caps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCap {
    pub center: UnitVector,
    half_angle: f64,
    pub boundary: Boundary,
}

impl SectorCap {
    pub fn new(center: UnitVector, half_angle: f64, boundary: Boundary) -> Result<Self> {
        if !(0.0..=PI).contains(&half_angle) {
            return Err(domain!("cap half-angle {half_angle} outside [0, π]"));
        }
        Ok(Self { center, half_angle, boundary })
    }

    pub fn closed(center: UnitVector, half_angle: f64) -> Result<Self> {
        Self::new(center, half_angle, Boundary::Closed)
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn cos_half_angle(&self) -> f64 {
        math::cos(self.half_angle)
    }

    pub fn contains(&self, v: &UnitVector) -> bool {
        let c = v.dot(&self.center);
        let t = self.cos_half_angle();
        match self.boundary {
            Boundary::Closed => c >= t,
            Boundary::Open => c > t,
        }
    }

    /// Uniform-measure fraction of the sphere covered by the cap.
    pub fn area_fraction(&self) -> f64 {
        cap_area_fraction(self.half_angle)
    }

    /// Surface area (the whole sphere is 4π).
    pub fn area(&self) -> f64 {
        4.0 * PI * self.area_fraction()
    }

    /// Whether `self ⊆ other` up to a rounding slack.
    pub fn is_within(&self, other: &SectorCap) -> bool {
        angle_between(&self.center, &other.center) + self.half_angle <= other.half_angle + 1e-12
    }

    /// Whether the two caps meet in at most a measure-zero set.
    pub fn is_disjoint_from(&self, other: &SectorCap) -> bool {
        angle_between(&self.center, &other.center) >= self.half_angle + other.half_angle - 1e-12
    }
}

/// Half-angles `(λ, μ)` of the certainty caps of `e^ε_{u,d}`:
/// `cos λ = ε + d` around `u` and `cos μ = ε − d` around `−u`.
pub fn sector_angles(epsilon: f64, d: f64) -> Result<(f64, f64)> {
    check_parameters(epsilon, d)?;
    let lambda = math::acos((epsilon + d).clamp(-1.0, 1.0));
    let mu = math::acos((epsilon - d).clamp(-1.0, 1.0));
    Ok((lambda, mu))
}

pub(crate) fn check_parameters(epsilon: f64, d: f64) -> Result<()> {
    if !(epsilon.is_finite() && (0.0..=1.0).contains(&epsilon)) {
        return Err(domain!("epsilon {epsilon} outside [0, 1]"));
    }
    if !d.is_finite() || d < -1.0 + epsilon - RANGE_SLACK || d > 1.0 - epsilon + RANGE_SLACK {
        return Err(domain!("d {d} outside [-1+ε, 1-ε] for ε = {epsilon}"));
    }
    Ok(())
}

/// Uniform-measure fraction `(1 − cos λ)/2` of a cap with half-angle `λ`.
pub fn cap_area_fraction(half_angle: f64) -> f64 {
    if half_angle <= 0.0 {
        return 0.0;
    }
    if half_angle >= PI {
        return 1.0;
    }
    (1.0 - math::cos(half_angle)) / 2.0
}

/// Uniform point on the sphere: height uniform on [−1, 1], azimuth uniform.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(stream: &mut R) -> UnitVector {
    let z = 2.0 * stream.gen::<f64>() - 1.0;
    let phi = 2.0 * PI * stream.gen::<f64>();
    let r = math::sqrt((1.0 - z * z).max(0.0));
    UnitVector { x: r * math::cos(phi), y: r * math::sin(phi), z }
}

/// Uniform point on a cap: height along the center uniform on
/// `[cos λ, 1]`, azimuth uniform.
pub fn sample_uniform_cap<R: Rng + ?Sized>(stream: &mut R, cap: &SectorCap) -> Result<UnitVector> {
    if cap.half_angle <= 0.0 {
        return Err(Error::Domain("cannot sample a zero-radius cap".into()));
    }
    let lo = cap.cos_half_angle();
    let h = lo + (1.0 - lo) * stream.gen::<f64>();
    let phi = 2.0 * PI * stream.gen::<f64>();
    let theta = math::acos(h.clamp(-1.0, 1.0));
    let (e1, e2) = cap.center.orthonormal_frame();
    let v = cap.center.offset_in_frame(&e1, &e2, theta, phi);
    // Renormalization can push a boundary draw a hair outside.
    if v.dot(&cap.center) < lo {
        return Ok(cap.center.offset_in_frame(&e1, &e2, theta.min(cap.half_angle) * (1.0 - 1e-15), phi));
    }
    Ok(v)
}
