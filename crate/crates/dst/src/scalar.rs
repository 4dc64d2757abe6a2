//! Numeric abstraction shared by the floating-point and exact-rational paths.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used by the exact evaluation mode.
pub type Rational = BigRational;

/// Field operations plus the few conversions the models need.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for arithmetic without rounding.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Converts a float. Exact types go through the shortest decimal
    /// representation so that `0.68` becomes `17/25`.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn from_rational(r: &Rational) -> Option<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Tolerance for this type: `eps` for floats, zero for exact types.
    fn tolerance(eps: f64) -> Self {
        if Self::EXACT {
            Self::zero()
        } else {
            Self::from_f64(eps).unwrap_or_else(Self::zero)
        }
    }

    /// `|a - b| <= eps * max(1, |a|, |b|)` for floats, equality for exact types.
    fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let a = self.to_f64();
        let b = other.to_f64();
        (a - b).abs() <= eps * 1f64.max(a.abs()).max(b.abs())
    }

    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        items
            .into_iter()
            .fold(Self::zero(), |acc, v| acc + v.clone())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        let v = ToPrimitive::to_f64(r)?;
        v.is_finite().then_some(v)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        parse_rational(&format!("{v}"))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        Some(r.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Parses `"3/8"`, `"-0.125"`, `"2.5e-3"` or `"7"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if Zero::is_zero(&d) {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(numer);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -r } else { r })
}

/// Parses a scalar from text. Floats accept fractions like `"1/3"` too.
pub fn parse_scalar<T: Scalar>(s: &str) -> Option<T> {
    if !T::EXACT {
        if let Ok(v) = s.trim().parse::<f64>() {
            return T::from_f64(v);
        }
    }
    T::from_rational(&parse_rational(s)?)
}

/// Exact rational from a float, via its shortest decimal form.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    <Rational as Scalar>::from_f64(v)
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.68"), Some(ratio(17, 25)));
        assert_eq!(parse_rational("-1.5e-1"), Some(ratio(-3, 20)));
        assert_eq!(parse_rational("3/8"), Some(ratio(3, 8)));
        assert_eq!(parse_rational("7"), Some(ratio(7, 1)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn float_to_rational_uses_shortest_decimal() {
        assert_eq!(rational_from_f64(0.1), Some(ratio(1, 10)));
        assert_eq!(rational_from_f64(f64::NAN), None);
    }

    #[test]
    fn parse_scalar_accepts_fractions_for_floats() {
        let v: f64 = parse_scalar("1/4").unwrap();
        assert_eq!(v, 0.25);
        let r: Rational = parse_scalar("0.25").unwrap();
        assert_eq!(r, ratio(1, 4));
    }

    #[test]
    fn approx_eq_is_exact_for_rationals() {
        assert!(ratio(1, 3).approx_eq(&ratio(2, 6), 0.0));
        assert!(!ratio(1, 3).approx_eq(&ratio(333, 1000), 1e-2));
        assert!(0.3f64.approx_eq(&(0.1 + 0.2), 1e-12));
    }
}
