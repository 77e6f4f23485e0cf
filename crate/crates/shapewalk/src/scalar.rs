//! Scalar flavors: exact arbitrary-precision rationals and IEEE doubles.
//!
//! Every geometric type in this crate is generic over [`Scalar`]. The
//! rational flavor [`Rat`] gives structural equality (normalized fractions,
//! positive denominator, reduced), so identities can be *decided*; the `f64`
//! flavor is for the Monte Carlo engine where square roots are unavoidable.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Arithmetic interface common to the scalar flavors.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True when equality is exact (rational flavor).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Nearest integer, halves away from zero (matches `f64::round`).
    fn round_int(&self) -> Self;
    /// Largest integer not exceeding the value.
    fn floor_int(&self) -> Self;
    fn abs(&self) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn round_int(&self) -> Self {
        f64::round(*self)
    }
    fn floor_int(&self) -> Self {
        f64::floor(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Arbitrary-precision rational scalar.
///
/// `BigRational` keeps fractions reduced with a positive denominator, so
/// `==` is structural equality of values.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    pub fn from_ratio(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rat(BigRational::new(numer, denom))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    /// Exact square root when one exists in Q.
    pub fn sqrt_exact(&self) -> Option<Rat> {
        if self.0.is_negative() {
            return None;
        }
        let sn = self.0.numer().sqrt();
        let sd = self.0.denom().sqrt();
        (&sn * &sn == *self.0.numer() && &sd * &sd == *self.0.denom())
            .then(|| Rat(BigRational::new(sn, sd)))
    }

    pub fn floor_bigint(&self) -> BigInt {
        self.0.floor().numer().clone()
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn one() -> Self {
        Rat(BigRational::one())
    }
    fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn round_int(&self) -> Self {
        Rat(self.0.round())
    }
    fn floor_int(&self) -> Self {
        Rat(self.0.floor())
    }
    fn abs(&self) -> Self {
        Rat(self.0.abs())
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}
impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}
impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}
impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.0.is_zero(), "rational division by zero");
        Rat(self.0 / rhs.0)
    }
}
impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl FromStr for Rat {
    type Err = String;

    /// Accepts `p`, `p/q` and plain decimal strings like `-3.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|e| e.to_string())?;
            let q = BigInt::from_str(q.trim()).map_err(|e| e.to_string())?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            return Ok(Rat(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.trim_start().starts_with('-');
            let int = BigInt::from_str(if int.is_empty() { "0" } else { int })
                .map_err(|e| e.to_string())?;
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("bad decimal literal: {s}"));
            }
            let digits = BigInt::from_str(frac).map_err(|e| e.to_string())?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let frac_part = BigRational::new(digits, scale);
            let whole = BigRational::from_integer(int);
            let val = if neg { whole - frac_part } else { whole + frac_part };
            return Ok(Rat(val));
        }
        BigInt::from_str(s)
            .map(|n| Rat(BigRational::from_integer(n)))
            .map_err(|e| e.to_string())
    }
}

/// Sign of a rational as -1, 0, 1.
pub fn rat_sign(x: &Rat) -> i32 {
    match x.0.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_is_normalized() {
        let a = Rat::new(2, 4);
        let b = Rat::new(-1, -2);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1/2");
        assert_eq!(Rat::new(3, -6).to_string(), "-1/2");
    }

    #[test]
    fn sqrt_exact_detects_squares() {
        assert_eq!(Rat::new(9, 4).sqrt_exact(), Some(Rat::new(3, 2)));
        assert_eq!(Rat::new(2, 1).sqrt_exact(), None);
        assert_eq!(Rat::new(-4, 1).sqrt_exact(), None);
        assert_eq!(Rat::new(0, 5).sqrt_exact(), Some(Rat::from_int(0)));
    }

    #[test]
    fn round_matches_f64_convention() {
        for (num, den, want) in [(1, 2, 1), (-1, 2, -1), (3, 2, 2), (-3, 2, -2), (1, 3, 0)] {
            assert_eq!(Rat::new(num, den).round_int(), Rat::from_int(want));
            assert_eq!((num as f64 / den as f64).round(), want as f64);
        }
    }

    #[test]
    fn parse_forms() {
        assert_eq!("7".parse::<Rat>().unwrap(), Rat::from_int(7));
        assert_eq!("-3/9".parse::<Rat>().unwrap(), Rat::new(-1, 3));
        assert_eq!("3.25".parse::<Rat>().unwrap(), Rat::new(13, 4));
        assert_eq!("-0.5".parse::<Rat>().unwrap(), Rat::new(-1, 2));
        assert!("1/0".parse::<Rat>().is_err());
    }
}
