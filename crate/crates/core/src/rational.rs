//! Exact rational numbers.
//!
//! A thin wrapper over [`BigRational`] that parses and prints the `num/den`
//! notation used by instance files, and adds the few helpers the solvers need
//! (ceilings, integer step counts, rational gcd).

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_integer(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `self / step` when that is an integer fitting in `i64`.
    pub fn steps_of(&self, step: &Rational) -> Option<i64> {
        if step.is_zero() {
            return None;
        }
        let q = &self.0 / &step.0;
        if q.is_integer() {
            q.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Largest rational `g` such that both inputs are integer multiples of it.
    pub fn gcd(&self, other: &Rational) -> Rational {
        let l = self.denom().lcm(other.denom());
        let a = self.numer() * (&l / self.denom());
        let b = other.numer() * (&l / other.denom());
        Rational::from_big(a.gcd(&b), l)
    }

    /// Decimal rendering with `digits` places after the point, rounded half away from zero.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        let rounded = scaled.round().to_integer();
        let neg = rounded.is_negative();
        let (int_part, frac_part) = rounded.abs().div_rem(&scale);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            return format!("{sign}{int_part}");
        }
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits as usize)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn max_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a rational number: {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"7"`, `"-3/4"` and surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_big(num, den))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational((self.0).$f(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$f(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational((&self.0).$f(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $f(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$f(&rhs.0))
            }
        }
        impl $atr<Rational> for Rational {
            fn $af(&mut self, rhs: Rational) {
                (self.0).$af(rhs.0);
            }
        }
        impl<'a> $atr<&'a Rational> for Rational {
            fn $af(&mut self, rhs: &'a Rational) {
                (self.0).$af(&rhs.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        Rational(self.0 / &rhs.0)
    }
}

impl Div<Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(&self.0 / rhs.0)
    }
}

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Compares `a/b` with `c/d` for positive `b` and `d` without dividing.
pub fn cmp_fractions(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Ordering {
    debug_assert!(b.is_positive() && d.is_positive());
    (a * d).cmp(&(c * b))
}

/// `(a + c) / (b + d)`, which lies between `a/b` and `c/d` when both denominators are positive.
pub fn mediant(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Rational {
    (a + c) / (b + d)
}

/// Shorthand used heavily in tests: `rat(3, 4)` is three quarters.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        for s in ["0", "7", "-3/4", "1/3", "123456789012345678901234567891/7"] {
            let r: Rational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("6/8".parse::<Rational>().unwrap().to_string(), "3/4");
        assert_eq!(" 2 / -4 ".parse::<Rational>().unwrap(), rat(-1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("0.5".parse::<Rational>().is_err());
    }

    #[test]
    fn ceil_floor() {
        assert_eq!(rat(7, 2).ceil(), BigInt::from(4));
        assert_eq!(rat(-7, 2).ceil(), BigInt::from(-3));
        assert_eq!(rat(4, 1).ceil(), BigInt::from(4));
        assert_eq!(rat(-7, 2).floor(), BigInt::from(-4));
    }

    #[test]
    fn rational_gcd() {
        assert_eq!(rat(1, 2).gcd(&rat(1, 3)), rat(1, 6));
        assert_eq!(rat(3, 4).gcd(&rat(9, 8)), rat(3, 8));
        assert_eq!(rat(0, 1).gcd(&rat(2, 5)), rat(2, 5));
    }

    #[test]
    fn steps() {
        assert_eq!(rat(3, 4).steps_of(&rat(1, 4)), Some(3));
        assert_eq!(rat(3, 4).steps_of(&rat(1, 2)), None);
        assert_eq!(rat(-1, 2).steps_of(&rat(1, 4)), Some(-2));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rat(205, 24).to_decimal(6), "8.541667");
        assert_eq!(rat(-1, 3).to_decimal(3), "-0.333");
        assert_eq!(rat(5, 1).to_decimal(2), "5.00");
        assert_eq!(rat(1, 200).to_decimal(2), "0.01");
    }

    #[test]
    fn fraction_comparison() {
        assert_eq!(cmp_fractions(&rat(1, 1), &rat(3, 1), &rat(1, 1), &rat(2, 1)), Ordering::Less);
        assert_eq!(cmp_fractions(&rat(2, 1), &rat(4, 1), &rat(1, 1), &rat(2, 1)), Ordering::Equal);
    }
}
