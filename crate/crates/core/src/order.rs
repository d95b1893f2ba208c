//! Ordered abelian groups: `ℤ`, `ℚ`, an exact surrogate for `ℝ`, column
//! spaces `Λ₀ⁿ`, and finitely supported lexicographic products.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, RngCore};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expsum::{ExpSum, DEFAULT_MAX_REFINEMENTS};
use crate::sample;
use crate::scalar::{Rat, Scalar, Sign};

/// Upper bound on the support size of sampled points.
pub const MAX_SAMPLE_SUPPORT: usize = 8;

/// An ordered abelian group, written additively.
///
/// The structure value carries whatever is needed to interpret elements
/// (dimension, index set, refinement budget); elements themselves are plain data.
pub trait OrderedGroup: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync + Serialize + DeserializeOwned;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn neg(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn sign(&self, a: &Self::Elem) -> Result<Sign>;
    /// Whether `a` is a well-formed element of this group.
    fn contains(&self, a: &Self::Elem) -> bool;
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.add(a, &self.neg(b)?)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Ordering> {
        Ok(self.sign(&self.sub(a, b)?)?.to_ordering())
    }

    fn abs(&self, a: &Self::Elem) -> Result<Self::Elem> {
        match self.sign(a)? {
            Sign::Negative => self.neg(a),
            _ => Ok(a.clone()),
        }
    }

    /// The metric `d(a, b) = |a − b|` of the linear tree.
    fn dist(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.abs(&self.sub(a, b)?)
    }

    /// `k·a` for an integer `k`.
    fn times(&self, k: i64, a: &Self::Elem) -> Result<Self::Elem> {
        let base = if k < 0 { self.neg(a)? } else { a.clone() };
        let mut acc = self.zero();
        for _ in 0..k.unsigned_abs() {
            acc = self.add(&acc, &base)?;
        }
        Ok(acc)
    }
}

/// `ℤ` or `ℚ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineKind {
    #[serde(rename = "Z")]
    Int,
    #[serde(rename = "Q")]
    Rat,
}

/// `ℤ` or `ℚ` with elements stored as [`Rat`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Line {
    pub kind: LineKind,
}

impl Line {
    pub const INTEGERS: Line = Line {
        kind: LineKind::Int,
    };
    pub const RATIONALS: Line = Line {
        kind: LineKind::Rat,
    };

    pub fn new(kind: LineKind) -> Line {
        Line { kind }
    }

    /// Index set with the same elements.
    pub fn index_space(&self) -> IndexSpace {
        match self.kind {
            LineKind::Int => IndexSpace::Integers,
            LineKind::Rat => IndexSpace::Rationals,
        }
    }
}

impl OrderedGroup for Line {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }

    fn add(&self, a: &Rat, b: &Rat) -> Result<Rat> {
        Ok(a + b)
    }

    fn neg(&self, a: &Rat) -> Result<Rat> {
        Ok(-a)
    }

    fn sign(&self, a: &Rat) -> Result<Sign> {
        Ok(a.signum())
    }

    fn contains(&self, a: &Rat) -> bool {
        self.kind == LineKind::Rat || a.is_integer()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Rat {
        match self.kind {
            LineKind::Int => sample::small_int(rng, sample::GRID),
            LineKind::Rat => sample::rational(rng),
        }
    }

    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
}

/// `ℝ`, restricted to the exponential sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealLine {
    pub max_refinements: u32,
}

impl Default for RealLine {
    fn default() -> Self {
        RealLine {
            max_refinements: DEFAULT_MAX_REFINEMENTS,
        }
    }
}

impl OrderedGroup for RealLine {
    type Elem = ExpSum;

    fn zero(&self) -> ExpSum {
        ExpSum::zero()
    }

    fn add(&self, a: &ExpSum, b: &ExpSum) -> Result<ExpSum> {
        Ok(a.clone() + b.clone())
    }

    fn neg(&self, a: &ExpSum) -> Result<ExpSum> {
        Ok(-a.clone())
    }

    fn sign(&self, a: &ExpSum) -> Result<Sign> {
        a.sign(self.max_refinements)
    }

    fn contains(&self, _a: &ExpSum) -> bool {
        true
    }

    fn sample(&self, rng: &mut dyn RngCore) -> ExpSum {
        if rng.gen_bool(0.2) {
            ExpSum::zero()
        } else {
            sample::expsum(rng)
        }
    }

    fn is_zero(&self, a: &ExpSum) -> bool {
        Scalar::is_zero(a)
    }
}

/// `Λ₀ⁿ` as column vectors `(x_n, …, x_1)ᵀ` for matrices acting on the left.
///
/// The bottom entry is the most significant one, so upper triangular
/// matrices with positive diagonal preserve the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column<F> {
    pub dim: usize,
    pub fiber: F,
}

impl<F: OrderedGroup> Column<F> {
    pub fn new(dim: usize, fiber: F) -> Self {
        Column { dim, fiber }
    }

    fn check(&self, a: &[F::Elem]) -> Result<()> {
        if a.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.len(),
            })
        }
    }

    /// The same vector as a lexicographic product indexed from the most significant entry.
    pub fn to_lex(&self, a: &[F::Elem]) -> Result<LexVec<F::Elem>> {
        self.check(a)?;
        let support = a
            .iter()
            .rev()
            .enumerate()
            .filter(|(_, v)| !self.fiber.is_zero(v))
            .map(|(k, v)| (Rat::int(k as i64), v.clone()))
            .collect();
        Ok(LexVec {
            index_space: IndexSpace::Finite(self.dim),
            support,
        })
    }

    pub fn from_lex(&self, v: &LexVec<F::Elem>) -> Result<Vec<F::Elem>> {
        if v.index_space != IndexSpace::Finite(self.dim) {
            return Err(Error::IndexSpaceMismatch);
        }
        let mut out = vec![self.fiber.zero(); self.dim];
        for (k, value) in &v.support {
            let k = finite_position(k, self.dim)?;
            out[self.dim - 1 - k] = value.clone();
        }
        Ok(out)
    }
}

impl<F: OrderedGroup> OrderedGroup for Column<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.fiber.zero(); self.dim]
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        self.check(b)?;
        a.iter().zip(b).map(|(x, y)| self.fiber.add(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        a.iter().map(|x| self.fiber.neg(x)).collect()
    }

    fn sign(&self, a: &Self::Elem) -> Result<Sign> {
        self.check(a)?;
        for x in a.iter().rev() {
            if !self.fiber.is_zero(x) {
                return self.fiber.sign(x);
            }
        }
        Ok(Sign::Zero)
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        a.len() == self.dim && a.iter().all(|x| self.fiber.contains(x))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem {
        let mut out = self.zero();
        let slots = sample_positions(rng, self.dim);
        for k in slots {
            out[k] = self.fiber.sample(rng);
        }
        out
    }
}

fn sample_positions(rng: &mut dyn RngCore, dim: usize) -> Vec<usize> {
    if dim <= MAX_SAMPLE_SUPPORT {
        (0..dim).collect()
    } else {
        rand::seq::index::sample(rng, dim, MAX_SAMPLE_SUPPORT).into_vec()
    }
}

/// Ordered index set of a lexicographic product. Smaller indices are more significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexSpace {
    /// `{0, …, len−1}`.
    Finite(usize),
    Integers,
    Rationals,
}

impl IndexSpace {
    pub fn contains(&self, index: &Rat) -> bool {
        match self {
            IndexSpace::Finite(len) => finite_position(index, *len).is_ok(),
            IndexSpace::Integers => index.is_integer(),
            IndexSpace::Rationals => true,
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Rat {
        match self {
            IndexSpace::Finite(len) => Rat::int(rng.gen_range(0..*len as i64)),
            IndexSpace::Integers => sample::small_int(rng, 5),
            IndexSpace::Rationals => Rat::frac(rng.gen_range(-5..=5), rng.gen_range(1..=3)),
        }
    }
}

fn finite_position(index: &Rat, len: usize) -> Result<usize> {
    let max = len.saturating_sub(1);
    if !index.is_integer() {
        return Err(Error::IndexOutOfRange { index: 0, max });
    }
    let k: i64 = index
        .numer()
        .try_into()
        .map_err(|_| Error::IndexOutOfRange {
            index: usize::MAX,
            max,
        })?;
    if k < 0 || k as usize >= len {
        return Err(Error::IndexOutOfRange {
            index: k.max(0) as usize,
            max,
        });
    }
    Ok(k as usize)
}

/// Finitely supported element of `ℒ_{ω∈Ω} Λ₀`. Only nonzero values are stored.
#[derive(Clone, PartialEq, Debug)]
pub struct LexVec<V> {
    pub index_space: IndexSpace,
    pub support: BTreeMap<Rat, V>,
}

impl<V> LexVec<V> {
    pub fn empty(index_space: IndexSpace) -> Self {
        LexVec {
            index_space,
            support: BTreeMap::new(),
        }
    }

    /// Most significant index carrying a nonzero value.
    pub fn leading_index(&self) -> Option<&Rat> {
        self.support.keys().next()
    }
}

#[derive(Serialize, Deserialize)]
struct SupportEntry<V> {
    index: Rat,
    value: V,
}

#[derive(Serialize, Deserialize)]
struct LexVecRepr<V> {
    index_space: IndexSpace,
    support: Vec<SupportEntry<V>>,
}

impl<V: Serialize + Clone> Serialize for LexVec<V> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        LexVecRepr {
            index_space: self.index_space,
            support: self
                .support
                .iter()
                .map(|(index, value)| SupportEntry {
                    index: index.clone(),
                    value: value.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for LexVec<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = LexVecRepr::<V>::deserialize(deserializer)?;
        let mut support = BTreeMap::new();
        for entry in repr.support {
            if support.insert(entry.index, entry.value).is_some() {
                return Err(serde::de::Error::custom("duplicate index in support"));
            }
        }
        Ok(LexVec {
            index_space: repr.index_space,
            support,
        })
    }
}

/// The lexicographic product `ℒ_{ω∈Ω} F` with finite supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexSpace<F> {
    pub index: IndexSpace,
    pub fiber: F,
}

impl<F: OrderedGroup> LexSpace<F> {
    pub fn new(index: IndexSpace, fiber: F) -> Self {
        LexSpace { index, fiber }
    }

    fn check(&self, a: &LexVec<F::Elem>) -> Result<()> {
        if a.index_space == self.index {
            Ok(())
        } else {
            Err(Error::IndexSpaceMismatch)
        }
    }

    /// Builds an element, dropping zero values.
    pub fn vector(
        &self,
        entries: impl IntoIterator<Item = (Rat, F::Elem)>,
    ) -> Result<LexVec<F::Elem>> {
        let mut support = BTreeMap::new();
        for (index, value) in entries {
            if !self.index.contains(&index) {
                return Err(Error::IndexSpaceMismatch);
            }
            if !self.fiber.is_zero(&value) {
                support.insert(index, value);
            }
        }
        Ok(LexVec {
            index_space: self.index,
            support,
        })
    }

    /// `a ≪ |b|`: the leading index of `a` is strictly less significant than that of `b`.
    pub fn dominates(&self, a: &LexVec<F::Elem>, b: &LexVec<F::Elem>) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        let lb = b.leading_index().ok_or(Error::ZeroRight)?;
        Ok(match a.leading_index() {
            None => true,
            Some(la) => la > lb,
        })
    }

    fn combine(
        &self,
        a: &LexVec<F::Elem>,
        b: &LexVec<F::Elem>,
        op: impl Fn(&F::Elem, &F::Elem) -> Result<F::Elem>,
    ) -> Result<LexVec<F::Elem>> {
        self.check(a)?;
        self.check(b)?;
        let zero = self.fiber.zero();
        let keys: BTreeSet<&Rat> = a.support.keys().chain(b.support.keys()).collect();
        let mut support = BTreeMap::new();
        for k in keys {
            let x = a.support.get(k).unwrap_or(&zero);
            let y = b.support.get(k).unwrap_or(&zero);
            let v = op(x, y)?;
            if !self.fiber.is_zero(&v) {
                support.insert(k.clone(), v);
            }
        }
        Ok(LexVec {
            index_space: self.index,
            support,
        })
    }
}

impl<F: OrderedGroup> OrderedGroup for LexSpace<F> {
    type Elem = LexVec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        LexVec::empty(self.index)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.combine(a, b, |x, y| self.fiber.add(x, y))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.combine(a, b, |x, y| self.fiber.sub(x, y))
    }

    fn neg(&self, a: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        let support = a
            .support
            .iter()
            .map(|(k, v)| Ok((k.clone(), self.fiber.neg(v)?)))
            .collect::<Result<_>>()?;
        Ok(LexVec {
            index_space: self.index,
            support,
        })
    }

    fn sign(&self, a: &Self::Elem) -> Result<Sign> {
        self.check(a)?;
        match a.support.values().next() {
            None => Ok(Sign::Zero),
            Some(v) => self.fiber.sign(v),
        }
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        a.index_space == self.index
            && a.support.iter().all(|(k, v)| {
                self.index.contains(k) && !self.fiber.is_zero(v) && self.fiber.contains(v)
            })
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem {
        let size = rng.gen_range(0..=MAX_SAMPLE_SUPPORT.min(4));
        let mut support = BTreeMap::new();
        for _ in 0..size {
            let k = self.index.sample(rng);
            let v = self.fiber.sample(rng);
            if !self.fiber.is_zero(&v) {
                support.insert(k, v);
            }
        }
        LexVec {
            index_space: self.index,
            support,
        }
    }
}

/// Lexicographic comparison of two elements of the same product.
pub fn lex_compare<F: OrderedGroup>(
    space: &LexSpace<F>,
    a: &LexVec<F::Elem>,
    b: &LexVec<F::Elem>,
) -> Result<Ordering> {
    space.compare(a, b)
}

pub fn dominates<F: OrderedGroup>(
    space: &LexSpace<F>,
    a: &LexVec<F::Elem>,
    b: &LexVec<F::Elem>,
) -> Result<bool> {
    space.dominates(a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexOp {
    Add,
    Sub,
}

pub fn lex_arith<F: OrderedGroup>(
    space: &LexSpace<F>,
    a: &LexVec<F::Elem>,
    b: &LexVec<F::Elem>,
    op: LexOp,
) -> Result<LexVec<F::Elem>> {
    match op {
        LexOp::Add => space.add(a, b),
        LexOp::Sub => space.sub(a, b),
    }
}

/// Finite lexicographic product of possibly different groups of the same
/// type; component 0 is the most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpace<F> {
    pub components: Vec<F>,
}

impl<F: OrderedGroup> ProductSpace<F> {
    fn check(&self, a: &[F::Elem]) -> Result<()> {
        if a.len() == self.components.len() {
            Ok(())
        } else {
            Err(Error::IndexSpaceMismatch)
        }
    }
}

impl<F: OrderedGroup> OrderedGroup for ProductSpace<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        self.components.iter().map(|c| c.zero()).collect()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        self.check(b)?;
        self.components
            .iter()
            .zip(a.iter().zip(b))
            .map(|(c, (x, y))| c.add(x, y))
            .collect()
    }

    fn neg(&self, a: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        self.components
            .iter()
            .zip(a)
            .map(|(c, x)| c.neg(x))
            .collect()
    }

    fn sign(&self, a: &Self::Elem) -> Result<Sign> {
        self.check(a)?;
        for (c, x) in self.components.iter().zip(a) {
            let s = c.sign(x)?;
            if s != Sign::Zero {
                return Ok(s);
            }
        }
        Ok(Sign::Zero)
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        a.len() == self.components.len()
            && self.components.iter().zip(a).all(|(c, x)| c.contains(x))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem {
        self.components.iter().map(|c| c.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(k: i64) -> Rat {
        Rat::int(k)
    }

    fn finite(len: usize) -> LexSpace<Line> {
        LexSpace::new(IndexSpace::Finite(len), Line::RATIONALS)
    }

    fn vec2(space: &LexSpace<Line>, a: i64, b: i64) -> LexVec<Rat> {
        space.vector([(int(0), int(a)), (int(1), int(b))]).unwrap()
    }

    #[test]
    fn leading_coordinate_decides() {
        let s = finite(2);
        assert_eq!(
            lex_compare(&s, &vec2(&s, 1, 0), &vec2(&s, 0, 5)).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            lex_compare(&s, &vec2(&s, 3, 4), &vec2(&s, 3, 4)).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn column_bottom_entry_is_most_significant() {
        let col = Column::new(3, Line::RATIONALS);
        let e = |k: usize| {
            let mut v = vec![Rat::zero(); 3];
            v[k] = Rat::one();
            v
        };
        assert_eq!(col.compare(&e(0), &e(1)).unwrap(), Ordering::Less);
        assert_eq!(col.compare(&e(1), &e(2)).unwrap(), Ordering::Less);
        let lex = col.to_lex(&e(2)).unwrap();
        assert_eq!(lex.leading_index(), Some(&int(0)));
        assert_eq!(col.from_lex(&lex).unwrap(), e(2));
    }

    #[test]
    fn dominance_examples() {
        let s = finite(2);
        assert!(dominates(&s, &vec2(&s, 0, 1), &vec2(&s, 1, 0)).unwrap());
        assert!(!dominates(&s, &vec2(&s, 1, 0), &vec2(&s, 1, 1)).unwrap());
        assert!(dominates(&s, &s.zero(), &vec2(&s, 0, 3)).unwrap());
        assert_eq!(
            dominates(&s, &vec2(&s, 1, 0), &s.zero()),
            Err(Error::ZeroRight)
        );
    }

    #[test]
    fn arithmetic_examples() {
        let s = finite(2);
        let a = vec2(&s, 1, 2);
        assert_eq!(lex_arith(&s, &a, &s.zero(), LexOp::Add).unwrap(), a);
        assert!(lex_arith(&s, &a, &a, LexOp::Sub)
            .unwrap()
            .support
            .is_empty());
        let d = s.dist(&vec2(&s, 3, 1), &vec2(&s, 1, 4)).unwrap();
        assert_eq!(d, vec2(&s, 2, -3));
    }

    #[test]
    fn mismatched_index_spaces() {
        let a = finite(2);
        let b = finite(3);
        let x = a.vector([(int(0), int(1))]).unwrap();
        let y = b.vector([(int(0), int(1))]).unwrap();
        assert_eq!(lex_compare(&a, &x, &y), Err(Error::IndexSpaceMismatch));
        assert_eq!(a.vector([(int(5), int(1))]), Err(Error::IndexSpaceMismatch));
    }

    #[test]
    fn json_shape() {
        let s = LexSpace::new(IndexSpace::Integers, Line::INTEGERS);
        let v = s.vector([(int(2), int(-1)), (int(-1), int(3))]).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["index_space"], "integers");
        assert_eq!(json["support"][0]["index"], "-1/1");
        assert_eq!(json["support"][1]["value"], "-1/1");
        let back: LexVec<Rat> = serde_json::from_value(json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn real_line_orders_exponentials() {
        let r = RealLine::default();
        let a = ExpSum::exp(Rat::one());
        let b = ExpSum::constant(Rat::frac(27183, 10000));
        assert_eq!(r.compare(&a, &b).unwrap(), Ordering::Less);
    }
}
