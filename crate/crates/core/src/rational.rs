//! Exact rational numbers.
//!
//! Thin newtype over `num_rational::Ratio<i128>`. Values are always kept in
//! lowest terms with a positive denominator. Arithmetic is checked: an
//! overflow of the 128-bit backing integers panics instead of silently
//! wrapping, so a result is either exact or absent.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal '{0}': expected 'p' or 'p/q' with integers p, q")]
    Malformed(String),
    #[error("zero denominator in '{0}'")]
    ZeroDenominator(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `numer/denom` reduced to lowest terms. Returns `None` when
    /// `denom` is zero.
    pub fn new(numer: i128, denom: i128) -> Option<Self> {
        if denom == 0 {
            None
        } else {
            Some(Rational(Ratio::new(numer, denom)))
        }
    }

    /// Like [`Rational::new`] but panics on a zero denominator. Intended
    /// for literals.
    pub fn frac(numer: i128, denom: i128) -> Self {
        Self::new(numer, denom).expect("zero denominator")
    }

    pub fn int(value: i128) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> i128 {
        Integer::div_floor(&self.numer(), &self.denom())
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> i128 {
        Integer::div_ceil(&self.numer(), &self.denom())
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        *self - Rational::int(self.floor())
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Option<Rational> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        self.0.checked_div(&rhs.0).map(Rational)
    }

    /// Approximate value, for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Lossless `num/den` form, denominator always present.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident, $what:literal) => {
        impl $trait for Rational {
            type Output = Rational;

            fn $method(self, rhs: Rational) -> Rational {
                match self.0.$checked(&rhs.0) {
                    Some(v) => Rational(v),
                    None => panic!(concat!("rational ", $what, " overflowed: {} and {}"), self, rhs),
                }
            }
        }

        impl $trait<i128> for Rational {
            type Output = Rational;

            fn $method(self, rhs: i128) -> Rational {
                $trait::$method(self, Rational::int(rhs))
            }
        }

        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;

            fn $method(self, rhs: &'a Rational) -> Rational {
                $trait::$method(self, *rhs)
            }
        }
    };
}

checked_binop!(Add, add, checked_add, "addition");
checked_binop!(Sub, sub, checked_sub, "subtraction");
checked_binop!(Mul, mul, checked_mul, "multiplication");

impl Div for Rational {
    type Output = Rational;

    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        match self.0.checked_div(&rhs.0) {
            Some(v) => Rational(v),
            None => panic!("rational division overflowed: {self} and {rhs}"),
        }
    }
}

impl Div<i128> for Rational {
    type Output = Rational;

    fn div(self, rhs: i128) -> Rational {
        self / Rational::int(rhs)
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl From<i128> for Rational {
    fn from(v: i128) -> Self {
        Rational::int(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::int(v as i128)
    }
}

impl From<u32> for Rational {
    fn from(v: u32) -> Self {
        Rational::int(v as i128)
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational::int(v as i128)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let malformed = || ParseRationalError::Malformed(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: i128 = num.parse().map_err(|_| malformed())?;
        let den: i128 = den.parse().map_err(|_| malformed())?;
        Rational::new(num, den).ok_or_else(|| ParseRationalError::ZeroDenominator(s.to_string()))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = Rational::frac(6, -4);
        assert_eq!((r.numer(), r.denom()), (-3, 2));
        assert_eq!(Rational::new(1, 0), None);
    }

    #[test]
    fn floor_ceil_fract() {
        let r = Rational::frac(-7, 2);
        assert_eq!(r.floor(), -4);
        assert_eq!(r.ceil(), -3);
        assert_eq!(r.fract(), Rational::frac(1, 2));
        assert_eq!(Rational::int(3).fract(), Rational::ZERO);
    }

    #[test]
    fn parse_accepts_integer_and_fraction() {
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::int(3));
        assert_eq!(" 7/2 ".parse::<Rational>().unwrap(), Rational::frac(7, 2));
        assert_eq!("-10/4".parse::<Rational>().unwrap(), Rational::frac(-5, 2));
        assert!(matches!("1/0".parse::<Rational>(), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!("1.5".parse::<Rational>(), Err(ParseRationalError::Malformed(_))));
        assert!(matches!("".parse::<Rational>(), Err(ParseRationalError::Empty)));
    }

    #[test]
    fn serializes_as_num_den_string() {
        let json = serde_json::to_string(&Rational::int(2)).unwrap();
        assert_eq!(json, "\"2/1\"");
        let back: Rational = serde_json::from_str("\"221/216\"").unwrap();
        assert_eq!(back, Rational::frac(221, 216));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_panics() {
        let big = Rational::int(i128::MAX / 2);
        let _ = big * big;
    }

    proptest! {
        #[test]
        fn json_round_trip(n in -1_000_000_000i128..1_000_000_000, d in 1i128..1_000_000) {
            let r = Rational::frac(n, d);
            let s = serde_json::to_string(&r).unwrap();
            let back: Rational = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back, r);
        }

        #[test]
        fn field_identities(a in -1000i128..1000, b in 1i128..1000, c in -1000i128..1000, d in 1i128..1000) {
            let x = Rational::frac(a, b);
            let y = Rational::frac(c, d);
            prop_assert_eq!(x + y - y, x);
            prop_assert_eq!((x + y) * Rational::int(2), x * Rational::int(2) + y * Rational::int(2));
            if !y.is_zero() {
                prop_assert_eq!(x / y * y, x);
            }
            prop_assert!(x.fract() >= Rational::ZERO && x.fract() < Rational::ONE);
        }
    }
}
