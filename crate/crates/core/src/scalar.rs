//! Exact scalars: big rationals and the trait shared by every matrix entry type.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sign of an exact real value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

/// Arbitrary-precision rational, always stored in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Rat> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(BigRational::new(numer.into(), denom)))
    }

    /// Panics on a zero denominator; intended for literals.
    pub fn frac(numer: i64, denom: i64) -> Rat {
        Rat::new(numer, denom).expect("nonzero denominator")
    }

    pub fn int(value: impl Into<BigInt>) -> Rat {
        Rat(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn signum(&self) -> Sign {
        match self.0.numer().sign() {
            num_bigint::Sign::Minus => Sign::Negative,
            num_bigint::Sign::NoSign => Sign::Zero,
            num_bigint::Sign::Plus => Sign::Positive,
        }
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn recip(&self) -> Result<Rat> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Rat(self.0.recip()))
        }
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Rat> {
        if rhs.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Rat(&self.0 / &rhs.0))
        }
    }

    pub fn pow(&self, exp: u32) -> Rat {
        Rat(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Least common multiple of the denominators of `values` (1 for an empty list).
    pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
        values
            .into_iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rat {
    fn from(value: BigRational) -> Self {
        Rat(value)
    }
}

impl From<i64> for Rat {
    fn from(value: i64) -> Self {
        Rat::int(value)
    }
}

impl From<BigInt> for Rat {
    fn from(value: BigInt) -> Self {
        Rat::int(value)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let s = s.trim();
        let parse_int = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("invalid rational `{s}`")))
        };
        match s.split_once('/') {
            Some((p, q)) => Rat::new(parse_int(p)?, parse_int(q)?),
            None => Ok(Rat::int(parse_int(s)?)),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rat, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(i) => Ok(Rat::int(i)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Panics on division by zero, like the integer operators; use [`Rat::checked_div`] otherwise.
impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        self.checked_div(&rhs).expect("division by zero")
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

/// A commutative ring of exact reals usable as a matrix entry.
///
/// Equality is exact; `sign` may need numerical refinement (for exponential
/// sums) and is therefore fallible and bounded by `max_refinements`.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn is_zero(&self) -> bool;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Multiplicative inverse when it exists inside the ring.
    fn inverse(&self) -> Option<Self>;

    fn sign(&self, max_refinements: u32) -> Result<Sign>;

    fn from_int(i: i64) -> Self {
        Self::from_rat(&Rat::int(i))
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Rat::zero()
    }

    fn one() -> Self {
        Rat::one()
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }

    fn is_one(&self) -> bool {
        Rat::is_one(self)
    }

    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }

    fn sign(&self, _max_refinements: u32) -> Result<Sign> {
        Ok(self.signum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_arithmetic() {
        assert_eq!(Rat::frac(1, 2) + Rat::frac(1, 3), Rat::frac(5, 6));
        assert_eq!(Rat::frac(2, 3) * Rat::zero(), Rat::zero());
        assert_eq!(
            Rat::frac(1, 2).checked_div(&Rat::frac(1, 3)).unwrap(),
            Rat::frac(3, 2)
        );
        assert_eq!(
            Rat::frac(1, 2).checked_div(&Rat::zero()),
            Err(Error::DivisionByZero)
        );
        assert_eq!(Rat::new(1, 0), Err(Error::DivisionByZero));
    }

    #[test]
    fn normalized_on_construction() {
        let r = Rat::frac(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(r.to_string(), "-2/3");
        assert_eq!(Rat::int(5).to_string(), "5/1");
    }

    #[test]
    fn parse_and_json() {
        assert_eq!("6/-4".parse::<Rat>().unwrap(), Rat::frac(-3, 2));
        assert_eq!(" 7 ".parse::<Rat>().unwrap(), Rat::int(7));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
        let json = serde_json::to_string(&Rat::frac(-3, 2)).unwrap();
        assert_eq!(json, "\"-3/2\"");
        let back: Rat = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Rat::frac(-3, 2));
        let int: Rat = serde_json::from_str("4").unwrap();
        assert_eq!(int, Rat::int(4));
    }

    #[test]
    fn lcm_of_denominators() {
        let vals = [Rat::frac(1, 4), Rat::frac(5, 6), Rat::int(3)];
        assert_eq!(Rat::lcm_of_denominators(&vals), BigInt::from(12));
        assert_eq!(Rat::lcm_of_denominators(&[]), BigInt::from(1));
    }
}
