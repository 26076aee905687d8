//! Thin float helpers over `libm` so the crate builds without `std`.

pub use core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}
#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}
#[inline]
pub fn asin(x: f64) -> f64 {
    libm::asin(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
/// Remainder in `[0, m)` for positive `m`.
#[inline]
pub fn rem_euclid(x: f64, m: f64) -> f64 {
    let r = libm::fmod(x, m);
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

/// Clamps a cosine that drifted past ±1 by rounding. Values further out
/// than `1e-9` are left alone so `acos` surfaces them as NaN.
#[inline]
pub fn clamp_unit(x: f64) -> f64 {
    if x > 1.0 && x <= 1.0 + 1e-9 {
        1.0
    } else if x < -1.0 && x >= -1.0 - 1e-9 {
        -1.0
    } else {
        x
    }
}
