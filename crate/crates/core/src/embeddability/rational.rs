//! Exact parsing and rendering of rationals.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Parses `"0.78"`, `"-1.5e-3"`, `"39/50"` or `"7"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Rounds a float to the nearest multiple of `1/denominator`.
pub fn rational_from_f64(x: f64, denominator: u64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite value {x}")));
    }
    let scaled = libm::round(x * denominator as f64);
    if scaled.abs() > 9.0e15 {
        return Err(Error::Domain(format!("value {x} too large for exact rounding")));
    }
    Ok(Rational::new(BigInt::from(scaled as i64), BigInt::from(denominator)))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders as `"p/q"` in lowest terms (`"p/1"` for integers).
pub fn render(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Renders as `"n/scale"` when `r·scale` is an integer, otherwise in lowest terms.
pub fn render_over(r: &Rational, scale: &BigInt) -> String {
    let scaled = r * Rational::from_integer(scale.clone());
    if scaled.is_integer() && scale.is_positive() {
        format!("{}/{}", scaled.to_integer(), scale)
    } else {
        render(r)
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Fixed-point decimal rendering, truncated toward zero at `places`.
pub fn render_decimal(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u8), places);
    let scaled = (r.abs() * Rational::from_integer(scale.clone())).to_integer();
    let (whole, frac) = scaled.div_rem(&scale);
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{whole}");
    }
    let frac = frac.to_string();
    format!("{sign}{whole}.{}{frac}", "0".repeat(places - frac.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.78").unwrap(), q(39, 50));
        assert_eq!(parse_rational("-.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("1.5e-3").unwrap(), q(3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), q(200, 1));
        assert_eq!(parse_rational(" 28/100 ").unwrap(), q(7, 25));
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", ".", "abc", "1/0", "0.5.5", "1e", "--1"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn renders() {
        assert_eq!(render(&q(28, 100)), "7/25");
        assert_eq!(render_over(&q(28, 100), &BigInt::from(100)), "28/100");
        assert_eq!(render_over(&q(1, 3), &BigInt::from(100)), "1/3");
        assert_eq!(render_decimal(&q(-14, 11), 4), "-1.2727");
        assert_eq!(render_decimal(&q(1, 20), 2), "0.05");
        assert_eq!(common_denominator(&[q(1, 2), q(39, 100), q(1, 4)]), BigInt::from(100));
    }

    #[test]
    fn rounds_floats() {
        assert_eq!(rational_from_f64(0.25, 1000).unwrap(), q(1, 4));
        assert!(rational_from_f64(f64::NAN, 10).is_err());
    }
}
