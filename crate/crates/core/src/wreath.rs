//! Lexicographic wreath products `H ≀ Λ₁` with `Λ₁ ∈ {ℤ, ℚ}` and their affine
//! action on `Λ = Λ₁ × ℒ_{λ∈Λ₁} Λ₀`, where `H` acts on `Λ₀`.
//!
//! Elements are pairs `(λ*, (h_λ))` with finitely many `h_λ ≠ 1`:
//!
//! ```text
//! (λ⁺, (k_λ))·(λ*, (h_λ)) = (λ⁺ + λ*, (k_{λ−λ*} h_λ))
//! (λ*, (h_λ))·(λ', (μ_λ)) = (λ' + λ*, (h_{λ+λ*} μ_{λ+λ*}))
//! α_{(λ*, h)}(λ', (μ_λ))  = (λ', (θ_{h_{λ+λ*}} μ_{λ+λ*}))
//! (λ*, (h_λ))⁻¹           = (−λ*, (h_{λ+λ*}⁻¹))
//! ```
//!
//! `θ_h` is the dilation of `h` on `Λ₀`. In `Λ` the `Λ₁` coordinate is the most
//! significant; fibers follow, smaller indices first.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::affine::{AffineGroup, Point, Translations};
use crate::error::{Error, Result};
use crate::order::{LexSpace, LexVec, Line, LineKind, OrderedGroup};
use crate::scalar::{Rat, Sign};

/// `(λ*, (h_λ))`; `support` holds only non-identity values.
#[derive(Clone, PartialEq, Debug)]
pub struct WreathElem<E> {
    pub shift: Rat,
    pub support: BTreeMap<Rat, E>,
}

#[derive(Serialize, Deserialize)]
struct SupportEntry<E> {
    index: Rat,
    h: E,
}

#[derive(Serialize, Deserialize)]
struct WreathElemRepr<E> {
    shift: Rat,
    support: Vec<SupportEntry<E>>,
}

impl<E: Serialize + Clone> Serialize for WreathElem<E> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WreathElemRepr {
            shift: self.shift.clone(),
            support: self
                .support
                .iter()
                .map(|(index, h)| SupportEntry {
                    index: index.clone(),
                    h: h.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, E: Deserialize<'de>> Deserialize<'de> for WreathElem<E> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = WreathElemRepr::<E>::deserialize(deserializer)?;
        let mut support = BTreeMap::new();
        for entry in repr.support {
            if support.insert(entry.index, entry.h).is_some() {
                return Err(serde::de::Error::custom("duplicate index in support"));
            }
        }
        Ok(WreathElem {
            shift: repr.shift,
            support,
        })
    }
}

/// A point `(λ', (μ_λ))` of `Λ₁ × ℒ_{λ∈Λ₁} Λ₀`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "P: Serialize + Clone",
    deserialize = "P: Deserialize<'de>"
))]
pub struct WreathPoint<P> {
    pub base: Rat,
    pub fiber: LexVec<P>,
}

/// `Λ₁ × ℒ_{λ∈Λ₁} Λ₀`, ordered lexicographically with `Λ₁` first.
#[derive(Clone, Debug, PartialEq)]
pub struct WreathSpace<S> {
    pub base: Line,
    pub fibers: LexSpace<S>,
}

impl<S: OrderedGroup> WreathSpace<S> {
    pub fn new(base: Line, fiber: S) -> Self {
        WreathSpace {
            base,
            fibers: LexSpace::new(base.index_space(), fiber),
        }
    }

    pub fn point(
        &self,
        base: Rat,
        fiber: impl IntoIterator<Item = (Rat, S::Elem)>,
    ) -> Result<WreathPoint<S::Elem>> {
        if !self.base.contains(&base) {
            return Err(Error::StructureMismatch(format!(
                "{base} is not in the base group"
            )));
        }
        Ok(WreathPoint {
            base,
            fiber: self.fibers.vector(fiber)?,
        })
    }
}

impl<S: OrderedGroup> OrderedGroup for WreathSpace<S> {
    type Elem = WreathPoint<S::Elem>;

    fn zero(&self) -> Self::Elem {
        WreathPoint {
            base: Rat::zero(),
            fiber: self.fibers.zero(),
        }
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(WreathPoint {
            base: &a.base + &b.base,
            fiber: self.fibers.add(&a.fiber, &b.fiber)?,
        })
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(WreathPoint {
            base: &a.base - &b.base,
            fiber: self.fibers.sub(&a.fiber, &b.fiber)?,
        })
    }

    fn neg(&self, a: &Self::Elem) -> Result<Self::Elem> {
        Ok(WreathPoint {
            base: -&a.base,
            fiber: self.fibers.neg(&a.fiber)?,
        })
    }

    fn sign(&self, a: &Self::Elem) -> Result<Sign> {
        match a.base.signum() {
            Sign::Zero => self.fibers.sign(&a.fiber),
            s => Ok(s),
        }
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        self.base.contains(&a.base) && self.fibers.contains(&a.fiber)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem {
        WreathPoint {
            base: self.base.sample(rng),
            fiber: self.fibers.sample(rng),
        }
    }
}

/// `H ≀ Λ₁` acting on `Λ₁ × ℒ_{λ∈Λ₁} Λ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct Wreath<H: AffineGroup> {
    pub fiber_group: H,
    pub space: WreathSpace<H::Space>,
}

impl<H: AffineGroup> Wreath<H> {
    pub fn new(fiber_group: H, base: Line) -> Self {
        let space = WreathSpace::new(base, fiber_group.space().clone());
        Wreath { fiber_group, space }
    }

    pub fn base(&self) -> Line {
        self.space.base
    }

    fn check_index(&self, q: &Rat) -> Result<()> {
        if self.base().contains(q) {
            Ok(())
        } else {
            Err(Error::StructureMismatch(format!(
                "{q} is not in {:?}",
                self.base().kind
            )))
        }
    }

    fn check(&self, g: &WreathElem<H::Elem>) -> Result<()> {
        self.check_index(&g.shift)?;
        g.support.keys().try_for_each(|k| self.check_index(k))
    }

    fn check_point(&self, p: &WreathPoint<Point<H>>) -> Result<()> {
        self.check_index(&p.base)?;
        if p.fiber.index_space != self.base().index_space() {
            return Err(Error::IndexSpaceMismatch);
        }
        Ok(())
    }

    /// Builds an element, dropping identity values.
    pub fn element(
        &self,
        shift: Rat,
        support: impl IntoIterator<Item = (Rat, H::Elem)>,
    ) -> Result<WreathElem<H::Elem>> {
        let support = support
            .into_iter()
            .filter(|(_, h)| !self.fiber_group.is_identity(h))
            .collect();
        let g = WreathElem { shift, support };
        self.check(&g)?;
        Ok(g)
    }

    fn h_at<'a>(
        &self,
        g: &'a WreathElem<H::Elem>,
        index: &Rat,
        identity: &'a H::Elem,
    ) -> &'a H::Elem {
        g.support.get(index).unwrap_or(identity)
    }

    /// Applies `f(h_{λ+λ*}, μ_{λ+λ*})` at every index where the result can be nonzero.
    fn transport(
        &self,
        g: &WreathElem<H::Elem>,
        mu: &LexVec<Point<H>>,
        include_support: bool,
        f: impl Fn(&H::Elem, &Point<H>) -> Result<Point<H>>,
    ) -> Result<LexVec<Point<H>>> {
        let identity = self.fiber_group.identity();
        let zero = self.fiber_group.space().zero();
        let mut keys: BTreeSet<&Rat> = mu.support.keys().collect();
        if include_support {
            keys.extend(g.support.keys());
        }
        let mut out = Vec::with_capacity(keys.len());
        for kappa in keys {
            let value = f(
                self.h_at(g, kappa, &identity),
                mu.support.get(kappa).unwrap_or(&zero),
            )?;
            out.push((kappa - &g.shift, value));
        }
        self.space.fibers.vector(out)
    }
}

impl<H: AffineGroup> AffineGroup for Wreath<H> {
    type Elem = WreathElem<H::Elem>;
    type Space = WreathSpace<H::Space>;

    fn space(&self) -> &Self::Space {
        &self.space
    }

    fn identity(&self) -> Self::Elem {
        WreathElem {
            shift: Rat::zero(),
            support: BTreeMap::new(),
        }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        self.check(b)?;
        let identity = self.fiber_group.identity();
        let keys: BTreeSet<Rat> = a
            .support
            .keys()
            .map(|k| k + &b.shift)
            .chain(b.support.keys().cloned())
            .collect();
        let mut support = BTreeMap::new();
        for lambda in keys {
            let k = self.h_at(a, &(&lambda - &b.shift), &identity);
            let h = self.h_at(b, &lambda, &identity);
            let c = self.fiber_group.mul(k, h)?;
            if !self.fiber_group.is_identity(&c) {
                support.insert(lambda, c);
            }
        }
        Ok(WreathElem {
            shift: &a.shift + &b.shift,
            support,
        })
    }

    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        let support = a
            .support
            .iter()
            .map(|(k, h)| Ok((k - &a.shift, self.fiber_group.inv(h)?)))
            .collect::<Result<_>>()?;
        Ok(WreathElem {
            shift: -&a.shift,
            support,
        })
    }

    fn act(&self, g: &Self::Elem, p: &Point<Self>) -> Result<Point<Self>> {
        self.check(g)?;
        self.check_point(p)?;
        let fiber = self.transport(g, &p.fiber, true, |h, mu| self.fiber_group.act(h, mu))?;
        Ok(WreathPoint {
            base: &p.base + &g.shift,
            fiber,
        })
    }

    fn dilate(&self, g: &Self::Elem, delta: &Point<Self>) -> Result<Point<Self>> {
        self.check(g)?;
        self.check_point(delta)?;
        let fiber = self.transport(g, &delta.fiber, false, |h, d| self.fiber_group.dilate(h, d))?;
        Ok(WreathPoint {
            base: delta.base.clone(),
            fiber,
        })
    }

    fn sample_elem(&self, rng: &mut dyn RngCore) -> Self::Elem {
        let shift = if rng.gen_bool(1.0 / 3.0) {
            Rat::zero()
        } else {
            self.base().sample(rng)
        };
        let size = rng.gen_range(0..=3);
        let mut support = BTreeMap::new();
        for _ in 0..size {
            let k = self.base().sample(rng);
            support.insert(k, self.fiber_group.sample_nontrivial(rng));
        }
        WreathElem { shift, support }
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        a.shift.is_zero() && a.support.is_empty()
    }

    /// A nonzero shift moves the most significant coordinate by `λ*`; otherwise
    /// the lowest-indexed `h_λ` moves the most significant coordinate it touches.
    fn certify(&self, g: &Self::Elem) -> Result<Option<bool>> {
        if self.is_identity(g) {
            return Err(Error::IdentityInput);
        }
        if !g.shift.is_zero() {
            return Ok(Some(true));
        }
        let (_, h) = g.support.iter().next().expect("nontrivial");
        Ok(match self.fiber_group.certify(h)? {
            Some(true) => Some(true),
            _ => None,
        })
    }
}

pub fn wreath_mul<H: AffineGroup>(
    w: &Wreath<H>,
    a: &WreathElem<H::Elem>,
    b: &WreathElem<H::Elem>,
) -> Result<WreathElem<H::Elem>> {
    w.mul(a, b)
}

pub fn wreath_act<H: AffineGroup>(
    w: &Wreath<H>,
    g: &WreathElem<H::Elem>,
    p: &WreathPoint<Point<H>>,
) -> Result<WreathPoint<Point<H>>> {
    w.act(g, p)
}

pub fn wreath_dilation<H: AffineGroup>(
    w: &Wreath<H>,
    g: &WreathElem<H::Elem>,
    delta: &WreathPoint<Point<H>>,
) -> Result<WreathPoint<Point<H>>> {
    w.dilate(g, delta)
}

pub fn wreath_inverse<H: AffineGroup>(
    w: &Wreath<H>,
    g: &WreathElem<H::Elem>,
) -> Result<WreathElem<H::Elem>> {
    w.inv(g)
}

/// Description of `Λ₁ ≀ Λ₂ ≀ ⋯ ≀ Λ_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IteratedSpec {
    pub levels: Vec<LineKind>,
}

/// `Λ₁ ≀ ⋯ ≀ Λ_k` built left to right: the first level acts on itself by
/// translation and each further level wraps the previous group.
#[derive(Clone, Debug, PartialEq)]
pub struct IterGroup {
    pub level: IterLevel,
    space: IterSpace,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IterLevel {
    Base(Translations<Line>),
    Wrapped(Box<Wreath<IterGroup>>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum IterSpace {
    Base(Line),
    Wrapped(Box<WreathSpace<IterSpace>>),
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IterElem {
    Base(Rat),
    Wrapped(Box<WreathElem<IterElem>>),
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IterPoint {
    Base(Rat),
    Wrapped(Box<WreathPoint<IterPoint>>),
}

pub fn iterated_wreath(spec: &IteratedSpec) -> Result<IterGroup> {
    let (first, rest) = spec.levels.split_first().ok_or(Error::EmptyLevels)?;
    let mut group = IterGroup::from_level(IterLevel::Base(Translations::new(Line::new(*first))));
    for kind in rest {
        let wreath = Wreath::new(group, Line::new(*kind));
        group = IterGroup::from_level(IterLevel::Wrapped(Box::new(wreath)));
    }
    Ok(group)
}

impl IterGroup {
    fn from_level(level: IterLevel) -> Self {
        let space = match &level {
            IterLevel::Base(t) => IterSpace::Base(t.line),
            IterLevel::Wrapped(w) => IterSpace::Wrapped(Box::new(w.space.clone())),
        };
        IterGroup { level, space }
    }

    pub fn depth(&self) -> usize {
        match &self.level {
            IterLevel::Base(_) => 1,
            IterLevel::Wrapped(w) => 1 + w.fiber_group.depth(),
        }
    }
}

fn level_mismatch() -> Error {
    Error::StructureMismatch("value belongs to a different level".into())
}

impl OrderedGroup for IterSpace {
    type Elem = IterPoint;

    fn zero(&self) -> IterPoint {
        match self {
            IterSpace::Base(l) => IterPoint::Base(l.zero()),
            IterSpace::Wrapped(w) => IterPoint::Wrapped(Box::new(w.zero())),
        }
    }

    fn add(&self, a: &IterPoint, b: &IterPoint) -> Result<IterPoint> {
        match (self, a, b) {
            (IterSpace::Base(l), IterPoint::Base(x), IterPoint::Base(y)) => {
                Ok(IterPoint::Base(l.add(x, y)?))
            }
            (IterSpace::Wrapped(w), IterPoint::Wrapped(x), IterPoint::Wrapped(y)) => {
                Ok(IterPoint::Wrapped(Box::new(w.add(x, y)?)))
            }
            _ => Err(level_mismatch()),
        }
    }

    fn sub(&self, a: &IterPoint, b: &IterPoint) -> Result<IterPoint> {
        match (self, a, b) {
            (IterSpace::Base(l), IterPoint::Base(x), IterPoint::Base(y)) => {
                Ok(IterPoint::Base(l.sub(x, y)?))
            }
            (IterSpace::Wrapped(w), IterPoint::Wrapped(x), IterPoint::Wrapped(y)) => {
                Ok(IterPoint::Wrapped(Box::new(w.sub(x, y)?)))
            }
            _ => Err(level_mismatch()),
        }
    }

    fn neg(&self, a: &IterPoint) -> Result<IterPoint> {
        match (self, a) {
            (IterSpace::Base(l), IterPoint::Base(x)) => Ok(IterPoint::Base(l.neg(x)?)),
            (IterSpace::Wrapped(w), IterPoint::Wrapped(x)) => {
                Ok(IterPoint::Wrapped(Box::new(w.neg(x)?)))
            }
            _ => Err(level_mismatch()),
        }
    }

    fn sign(&self, a: &IterPoint) -> Result<Sign> {
        match (self, a) {
            (IterSpace::Base(l), IterPoint::Base(x)) => l.sign(x),
            (IterSpace::Wrapped(w), IterPoint::Wrapped(x)) => w.sign(x),
            _ => Err(level_mismatch()),
        }
    }

    fn contains(&self, a: &IterPoint) -> bool {
        match (self, a) {
            (IterSpace::Base(l), IterPoint::Base(x)) => l.contains(x),
            (IterSpace::Wrapped(w), IterPoint::Wrapped(x)) => w.contains(x),
            _ => false,
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> IterPoint {
        match self {
            IterSpace::Base(l) => IterPoint::Base(l.sample(rng)),
            IterSpace::Wrapped(w) => IterPoint::Wrapped(Box::new(w.sample(rng))),
        }
    }

    fn is_zero(&self, a: &IterPoint) -> bool {
        match (self, a) {
            (IterSpace::Base(_), IterPoint::Base(x)) => x.is_zero(),
            (IterSpace::Wrapped(_), IterPoint::Wrapped(x)) => {
                x.base.is_zero() && x.fiber.support.is_empty()
            }
            _ => false,
        }
    }
}

impl AffineGroup for IterGroup {
    type Elem = IterElem;
    type Space = IterSpace;

    fn space(&self) -> &IterSpace {
        &self.space
    }

    fn identity(&self) -> IterElem {
        match &self.level {
            IterLevel::Base(t) => IterElem::Base(t.identity()),
            IterLevel::Wrapped(w) => IterElem::Wrapped(Box::new(w.identity())),
        }
    }

    fn mul(&self, a: &IterElem, b: &IterElem) -> Result<IterElem> {
        match (&self.level, a, b) {
            (IterLevel::Base(t), IterElem::Base(x), IterElem::Base(y)) => {
                Ok(IterElem::Base(t.mul(x, y)?))
            }
            (IterLevel::Wrapped(w), IterElem::Wrapped(x), IterElem::Wrapped(y)) => {
                Ok(IterElem::Wrapped(Box::new(w.mul(x, y)?)))
            }
            _ => Err(level_mismatch()),
        }
    }

    fn inv(&self, a: &IterElem) -> Result<IterElem> {
        match (&self.level, a) {
            (IterLevel::Base(t), IterElem::Base(x)) => Ok(IterElem::Base(t.inv(x)?)),
            (IterLevel::Wrapped(w), IterElem::Wrapped(x)) => {
                Ok(IterElem::Wrapped(Box::new(w.inv(x)?)))
            }
            _ => Err(level_mismatch()),
        }
    }

    fn act(&self, g: &IterElem, p: &IterPoint) -> Result<IterPoint> {
        match (&self.level, g, p) {
            (IterLevel::Base(t), IterElem::Base(x), IterPoint::Base(y)) => {
                Ok(IterPoint::Base(t.act(x, y)?))
            }
            (IterLevel::Wrapped(w), IterElem::Wrapped(x), IterPoint::Wrapped(y)) => {
                Ok(IterPoint::Wrapped(Box::new(w.act(x, y)?)))
            }
            _ => Err(level_mismatch()),
        }
    }

    fn dilate(&self, g: &IterElem, delta: &IterPoint) -> Result<IterPoint> {
        match (&self.level, g, delta) {
            (IterLevel::Base(t), IterElem::Base(x), IterPoint::Base(y)) => {
                Ok(IterPoint::Base(t.dilate(x, y)?))
            }
            (IterLevel::Wrapped(w), IterElem::Wrapped(x), IterPoint::Wrapped(y)) => {
                Ok(IterPoint::Wrapped(Box::new(w.dilate(x, y)?)))
            }
            _ => Err(level_mismatch()),
        }
    }

    fn sample_elem(&self, rng: &mut dyn RngCore) -> IterElem {
        match &self.level {
            IterLevel::Base(t) => IterElem::Base(t.sample_elem(rng)),
            IterLevel::Wrapped(w) => IterElem::Wrapped(Box::new(w.sample_elem(rng))),
        }
    }

    fn is_identity(&self, a: &IterElem) -> bool {
        match (&self.level, a) {
            (IterLevel::Base(t), IterElem::Base(x)) => t.is_identity(x),
            (IterLevel::Wrapped(w), IterElem::Wrapped(x)) => w.is_identity(x),
            _ => false,
        }
    }

    fn certify(&self, g: &IterElem) -> Result<Option<bool>> {
        match (&self.level, g) {
            (IterLevel::Base(t), IterElem::Base(x)) => t.certify(x),
            (IterLevel::Wrapped(w), IterElem::Wrapped(x)) => w.certify(x),
            _ => Err(level_mismatch()),
        }
    }
}
