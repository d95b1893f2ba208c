//! Finite rational combinations of exponentials, `Σ c·e^q` with `c, q ∈ ℚ`.
//!
//! Equality is decided on the normalized term map: exponentials of distinct
//! rationals are linearly independent over ℚ, so two sums represent the same
//! real exactly when their maps coincide. Signs of nonzero sums are found by
//! rational interval evaluation with increasing Taylor depth.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar, Sign};

pub const DEFAULT_MAX_REFINEMENTS: u32 = 64;

/// Taylor depth used on the first interval pass; doubled on every refinement.
const INITIAL_DEPTH: u64 = 8;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExpSum {
    // exponent -> nonzero coefficient
    terms: BTreeMap<Rat, Rat>,
}

impl ExpSum {
    pub fn zero() -> ExpSum {
        ExpSum::default()
    }

    pub fn constant(c: Rat) -> ExpSum {
        ExpSum::monomial(c, Rat::zero())
    }

    /// `c·e^q`.
    pub fn monomial(coeff: Rat, exp: Rat) -> ExpSum {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        ExpSum { terms }
    }

    /// `e^q`.
    pub fn exp(q: Rat) -> ExpSum {
        ExpSum::monomial(Rat::one(), q)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rat, Rat)>) -> ExpSum {
        let mut out = ExpSum::zero();
        for (coeff, exp) in terms {
            out.add_term(exp, coeff);
        }
        out
    }

    fn add_term(&mut self, exp: Rat, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(c) => {
                *c = &*c + &coeff;
                if c.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, coeff);
            }
        }
    }

    /// Iterates `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns `Some(c)` when the sum is the rational constant `c·e^0`.
    pub fn as_rational(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Rat::zero()).cloned(),
            _ => None,
        }
    }

    /// Sign of the represented real.
    ///
    /// Zero is decided exactly from the term map. For nonzero sums each `e^q`
    /// is enclosed in a rational interval; the pass is repeated with doubled
    /// Taylor depth until the summed interval excludes zero.
    pub fn sign(&self, max_refinements: u32) -> Result<Sign> {
        if self.terms.is_empty() {
            return Ok(Sign::Zero);
        }
        if self.terms.len() == 1 {
            let c = self.terms.values().next().expect("one term");
            return Ok(c.signum());
        }
        let mut depth = INITIAL_DEPTH;
        for _ in 0..max_refinements {
            let enclosure = self.enclose(depth);
            if enclosure.lo.signum() == Sign::Positive {
                return Ok(Sign::Positive);
            }
            if enclosure.hi.signum() == Sign::Negative {
                return Ok(Sign::Negative);
            }
            depth = depth.saturating_mul(2);
        }
        Err(Error::PrecisionExhausted { max_refinements })
    }

    pub fn cmp_with(&self, other: &ExpSum, max_refinements: u32) -> Result<std::cmp::Ordering> {
        Ok((self.clone() - other.clone())
            .sign(max_refinements)?
            .to_ordering())
    }

    /// Rational interval containing the represented real at the given Taylor depth.
    pub fn enclose(&self, depth: u64) -> Interval {
        let e = euler_interval(depth);
        let bits = rounding_bits(depth);
        let mut total = Interval::point(Rat::zero());
        for (q, c) in &self.terms {
            let term = exp_interval(q, depth, &e, bits).scale(c);
            total = total.add(&term);
        }
        total
    }

    /// Approximate value, for display only.
    pub fn approx_f64(&self) -> f64 {
        let mid = self.enclose(32);
        let m = (&mid.lo + &mid.hi) * Rat::frac(1, 2);
        rat_to_f64(&m)
    }
}

fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.as_big_rational().to_f64().unwrap_or(f64::NAN)
}

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn point(v: Rat) -> Interval {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    fn scale(&self, c: &Rat) -> Interval {
        if c.signum() == Sign::Negative {
            Interval {
                lo: c * &self.hi,
                hi: c * &self.lo,
            }
        } else {
            Interval {
                lo: c * &self.lo,
                hi: c * &self.hi,
            }
        }
    }

    // both endpoints assumed nonnegative
    fn mul_nonneg(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    fn round_outward(&self, bits: u64) -> Interval {
        let scale = Rat::int(BigInt::one() << bits);
        let lo = Rat::new((&self.lo * &scale).floor(), BigInt::one() << bits).expect("nonzero");
        let hi = Rat::new((&self.hi * &scale).ceil(), BigInt::one() << bits).expect("nonzero");
        Interval { lo, hi }
    }
}

fn rounding_bits(depth: u64) -> u64 {
    2 * depth + 64
}

/// Encloses `e^x` for `0 ≤ x < 1` (also valid for `x = 1`) by the Taylor
/// partial sum of `depth` terms plus the geometric tail bound `x^N/N!·(N+1)/N`.
fn taylor_exp_interval(x: &Rat, depth: u64) -> Interval {
    if x.is_zero() {
        return Interval::point(Rat::one());
    }
    let n = depth.max(1);
    let mut sum = Rat::zero();
    let mut term = Rat::one();
    for j in 0..n {
        sum = &sum + &term;
        term = &(&term * x) * &Rat::new(1, j as i64 + 1).expect("nonzero");
    }
    // `term` now equals x^N / N!
    let tail = &term * &Rat::new(n as i64 + 1, n as i64).expect("nonzero");
    Interval {
        hi: &sum + &tail,
        lo: sum,
    }
}

fn euler_interval(depth: u64) -> Interval {
    taylor_exp_interval(&Rat::one(), depth)
}

fn exp_interval(q: &Rat, depth: u64, e: &Interval, bits: u64) -> Interval {
    let k = q.floor();
    let frac = q - &Rat::int(k.clone());
    let frac_part = taylor_exp_interval(&frac, depth);
    let power: u32 =
        num_traits::ToPrimitive::to_u32(&k.abs()).expect("exponent magnitude fits in u32");
    let int_part = if k.is_negative() {
        Interval {
            lo: e.hi.pow(power).recip().expect("positive"),
            hi: e.lo.pow(power).recip().expect("positive"),
        }
    } else {
        Interval {
            lo: e.lo.pow(power),
            hi: e.hi.pow(power),
        }
    };
    frac_part.mul_nonneg(&int_part).round_outward(bits)
}

impl fmt::Debug for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (q, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if q.is_zero() {
                write!(f, "{c:?}")?;
            } else {
                write!(f, "{c:?}·e^{q:?}")?;
            }
        }
        Ok(())
    }
}

impl Add for ExpSum {
    type Output = ExpSum;
    fn add(mut self, rhs: ExpSum) -> ExpSum {
        for (q, c) in rhs.terms {
            self.add_term(q, c);
        }
        self
    }
}

impl Neg for ExpSum {
    type Output = ExpSum;
    fn neg(self) -> ExpSum {
        ExpSum {
            terms: self.terms.into_iter().map(|(q, c)| (q, -c)).collect(),
        }
    }
}

impl Sub for ExpSum {
    type Output = ExpSum;
    fn sub(self, rhs: ExpSum) -> ExpSum {
        self + (-rhs)
    }
}

impl Mul for ExpSum {
    type Output = ExpSum;
    fn mul(self, rhs: ExpSum) -> ExpSum {
        let mut out = ExpSum::zero();
        for (q1, c1) in &self.terms {
            for (q2, c2) in &rhs.terms {
                out.add_term(q1 + q2, c1 * c2);
            }
        }
        out
    }
}

impl Scalar for ExpSum {
    fn zero() -> Self {
        ExpSum::zero()
    }

    fn one() -> Self {
        ExpSum::constant(Rat::one())
    }

    fn from_rat(r: &Rat) -> Self {
        ExpSum::constant(r.clone())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (q, c) = self.terms.iter().next().expect("one term");
        Some(ExpSum::monomial(c.recip().ok()?, -q))
    }

    fn sign(&self, max_refinements: u32) -> Result<Sign> {
        ExpSum::sign(self, max_refinements)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Rat,
    exp: Rat,
}

impl Serialize for ExpSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(q, c)| TermRepr {
                coeff: c.clone(),
                exp: q.clone(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExpSum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<ExpSum, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        Ok(ExpSum::from_terms(
            terms.into_iter().map(|t| (t.coeff, t.exp)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    #[test]
    fn exponent_addition() {
        let prod = ExpSum::exp(r(1, 1)) * ExpSum::exp(r(1, 2));
        assert_eq!(prod, ExpSum::exp(r(3, 2)));
    }

    #[test]
    fn cancellation_gives_empty_map() {
        let diff = ExpSum::exp(r(1, 1)) - ExpSum::exp(r(1, 1));
        assert!(diff.is_empty());
        assert_eq!(diff, ExpSum::zero());
    }

    #[test]
    fn distributivity_example() {
        let lhs = (ExpSum::constant(r(2, 1)) + ExpSum::exp(r(1, 1))) * ExpSum::exp(r(-1, 1));
        let rhs = ExpSum::monomial(r(2, 1), r(-1, 1)) + ExpSum::constant(r(1, 1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn signs() {
        let m = DEFAULT_MAX_REFINEMENTS;
        assert_eq!(ExpSum::zero().sign(m).unwrap(), Sign::Zero);
        let e_minus_one = ExpSum::exp(r(1, 1)) - ExpSum::constant(r(1, 1));
        assert_eq!(e_minus_one.sign(m).unwrap(), Sign::Positive);
        let three_minus_e = ExpSum::constant(r(3, 1)) - ExpSum::exp(r(1, 1));
        assert_eq!(three_minus_e.sign(m).unwrap(), Sign::Positive);
        assert_eq!((-three_minus_e).sign(m).unwrap(), Sign::Negative);
    }

    #[test]
    fn close_values_need_refinement() {
        // e^{1/1000} - (1 + 1/1000) ≈ 5.0e-7 > 0
        let v = ExpSum::exp(r(1, 1000)) - ExpSum::constant(r(1001, 1000));
        assert_eq!(v.sign(DEFAULT_MAX_REFINEMENTS).unwrap(), Sign::Positive);
        // e^{-3} - 1/20 ≈ -0.00021
        let w = ExpSum::exp(r(-3, 1)) - ExpSum::constant(r(1, 20));
        assert_eq!(w.sign(DEFAULT_MAX_REFINEMENTS).unwrap(), Sign::Negative);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let v = ExpSum::exp(r(1, 1000)) - ExpSum::constant(r(1001, 1000));
        assert_eq!(
            v.sign(0),
            Err(Error::PrecisionExhausted { max_refinements: 0 })
        );
    }

    #[test]
    fn enclosures_match_reference_values() {
        // e = 2.718281828459045..., e^{-5/2} = 0.0820849986238988...
        let e = ExpSum::exp(r(1, 1)).enclose(16);
        assert!(e.lo >= r(2_718_281_828, 1_000_000_000) && e.hi <= r(2_718_281_829, 1_000_000_000));
        let small = ExpSum::exp(r(-5, 2)).enclose(16);
        assert!(
            small.lo >= r(820_849_986, 10_000_000_000)
                && small.hi <= r(820_849_987, 10_000_000_000)
        );
    }

    #[test]
    fn inverse_of_monomial() {
        let m = ExpSum::monomial(r(2, 3), r(5, 4));
        assert_eq!(m.clone() * m.inverse().unwrap(), ExpSum::one());
        assert!((ExpSum::one() + ExpSum::exp(r(1, 1))).inverse().is_none());
    }

    #[test]
    fn json_sorted_by_exponent() {
        let v = ExpSum::from_terms([(r(1, 1), r(2, 1)), (r(-3, 1), r(-1, 2))]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(
            json,
            r#"[{"coeff":"-3/1","exp":"-1/2"},{"coeff":"1/1","exp":"2/1"}]"#
        );
        let back: ExpSum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
