//! Order-preserving affine actions on linear trees `X = Λ`.
//!
//! A group acts through [`AffineGroup`]: every element `g` has an action
//! `x ↦ g·x` on the points of an [`OrderedGroup`] and a dilation `α_g`, an
//! order-preserving automorphism of the same group, with
//! `d(g·x, g·y) = α_g d(x, y)`.

use std::fmt;

use rand::RngCore;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::hyperbolic::is_essentially_hyperbolic;
use crate::lsa::{gamma_bar, lie_dim};
use crate::matrix::TriMat;
use crate::order::{Column, Line, OrderedGroup, ProductSpace, RealLine};
use crate::sample;
use crate::scalar::{Rat, Scalar, Sign};
use crate::tstar::{phi_bar, tstar_essentially_free, TStarElem};

/// Point type of an affine group's tree.
pub type Point<G> = <<G as AffineGroup>::Space as OrderedGroup>::Elem;

/// A group with an order-preserving affine action on an ordered abelian group.
pub trait AffineGroup: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync + Serialize + DeserializeOwned;
    type Space: OrderedGroup;

    fn space(&self) -> &Self::Space;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn act(&self, g: &Self::Elem, p: &Point<Self>) -> Result<Point<Self>>;
    /// `α_g` applied to a difference of points.
    fn dilate(&self, g: &Self::Elem, delta: &Point<Self>) -> Result<Point<Self>>;
    fn sample_elem(&self, rng: &mut dyn RngCore) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// Exact verdict on essential hyperbolicity of `g ≠ 1`, when one is available.
    fn certify(&self, _g: &Self::Elem) -> Result<Option<bool>> {
        Ok(None)
    }

    fn sample_nontrivial(&self, rng: &mut dyn RngCore) -> Self::Elem {
        loop {
            let g = self.sample_elem(rng);
            if !self.is_identity(&g) {
                return g;
            }
        }
    }
}

/// `x ↦ α x + ν` with `α` upper triangular with positive diagonal.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct AffineAut<S> {
    pub dilation: TriMat<S>,
    pub translation: Vec<S>,
}

impl<S: Scalar> AffineAut<S> {
    pub fn identity(dim: usize) -> Self {
        AffineAut {
            dilation: TriMat::identity(dim),
            translation: vec![S::zero(); dim],
        }
    }

    pub fn translation_by(v: Vec<S>) -> Self {
        AffineAut {
            dilation: TriMat::identity(v.len()),
            translation: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    /// Splits `[[α, ν], [0, 1]]`.
    pub fn from_affine_matrix(m: &TriMat<S>, max_refinements: u32) -> Result<Self> {
        let aut = Self::split(m)?;
        if !aut.dilation.has_positive_diagonal(max_refinements)? {
            return Err(Error::NotAffineForm);
        }
        Ok(aut)
    }

    fn split(m: &TriMat<S>) -> Result<Self> {
        let size = m.dim();
        if size == 0 || !m.is_upper_triangular() || !m.get(size - 1, size - 1).is_one() {
            return Err(Error::NotAffineForm);
        }
        let dim = size - 1;
        Ok(AffineAut {
            dilation: m.leading_block(dim),
            translation: (0..dim).map(|i| m.get(i, dim).clone()).collect(),
        })
    }

    pub fn to_affine_matrix(&self) -> TriMat<S> {
        let dim = self.dim();
        TriMat::from_fn(dim + 1, |i, j| {
            if i == dim {
                if j == dim {
                    S::one()
                } else {
                    S::zero()
                }
            } else if j == dim {
                self.translation[i].clone()
            } else {
                self.dilation.get(i, j).clone()
            }
        })
    }

    pub fn is_identity(&self) -> bool {
        self.dilation.is_identity() && self.translation.iter().all(Scalar::is_zero)
    }

    pub fn act(&self, x: &[S]) -> Result<Vec<S>> {
        let ax = self.dilation.mul_vec(x)?;
        Ok(ax
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b.clone())
            .collect())
    }

    pub fn dilate(&self, delta: &[S]) -> Result<Vec<S>> {
        self.dilation.mul_vec(delta)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(AffineAut {
            dilation: self.dilation.mul(&other.dilation)?,
            translation: self.act(&other.translation)?,
        })
    }

    pub fn invert(&self) -> Result<Self> {
        let inv = self.dilation.upper_inverse()?;
        let translation = inv
            .mul_vec(&self.translation)?
            .into_iter()
            .map(|v| -v)
            .collect();
        Ok(AffineAut {
            dilation: inv,
            translation,
        })
    }
}

/// How a [`MatrixGroup`] draws random elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSource {
    /// `γ̄(A)` for random unitriangular `A ∈ UT(n)`; integer entries when `integral`.
    GammaBar { n: usize, integral: bool },
    /// Random elements of `UT(dim+1)` with rational entries.
    Unitriangular,
}

/// A group of affine matrices acting on column vectors over `ℚ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGroup {
    pub space: Column<Line>,
    pub source: MatrixSource,
}

impl MatrixGroup {
    /// The image `γ̄(UT(n))` acting on `ℚ^m`.
    pub fn gamma_bar_image(n: usize, integral: bool) -> Self {
        MatrixGroup {
            space: Column::new(lie_dim(n), Line::RATIONALS),
            source: MatrixSource::GammaBar { n, integral },
        }
    }

    pub fn unitriangular(dim: usize) -> Self {
        MatrixGroup {
            space: Column::new(dim, Line::RATIONALS),
            source: MatrixSource::Unitriangular,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    fn check(&self, g: &AffineAut<Rat>) -> Result<()> {
        if g.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: g.dim(),
            })
        }
    }
}

impl AffineGroup for MatrixGroup {
    type Elem = AffineAut<Rat>;
    type Space = Column<Line>;

    fn space(&self) -> &Column<Line> {
        &self.space
    }

    fn identity(&self) -> AffineAut<Rat> {
        AffineAut::identity(self.dim())
    }

    fn mul(&self, a: &AffineAut<Rat>, b: &AffineAut<Rat>) -> Result<AffineAut<Rat>> {
        self.check(a)?;
        self.check(b)?;
        a.compose(b)
    }

    fn inv(&self, a: &AffineAut<Rat>) -> Result<AffineAut<Rat>> {
        self.check(a)?;
        a.invert()
    }

    fn act(&self, g: &AffineAut<Rat>, p: &Vec<Rat>) -> Result<Vec<Rat>> {
        self.check(g)?;
        g.act(p)
    }

    fn dilate(&self, g: &AffineAut<Rat>, delta: &Vec<Rat>) -> Result<Vec<Rat>> {
        self.check(g)?;
        g.dilate(delta)
    }

    fn sample_elem(&self, rng: &mut dyn RngCore) -> AffineAut<Rat> {
        let matrix = match self.source {
            MatrixSource::GammaBar { n, integral } => {
                let a = if integral {
                    sample::integer_unitriangular(rng, n, 3)
                } else {
                    sample::unitriangular(rng, n)
                };
                gamma_bar(&a).expect("unitriangular input").matrix
            }
            MatrixSource::Unitriangular => sample::unitriangular(rng, self.dim() + 1),
        };
        AffineAut::split(&matrix).expect("affine form")
    }

    fn is_identity(&self, a: &AffineAut<Rat>) -> bool {
        a.is_identity()
    }

    fn certify(&self, g: &AffineAut<Rat>) -> Result<Option<bool>> {
        is_essentially_hyperbolic(&g.to_affine_matrix()).map(Some)
    }
}

/// A group acting on itself by translation; a free isometric action.
#[derive(Clone, Debug, PartialEq)]
pub struct Translations<F> {
    pub line: F,
}

impl<F: OrderedGroup> Translations<F> {
    pub fn new(line: F) -> Self {
        Translations { line }
    }
}

impl<F: OrderedGroup> AffineGroup for Translations<F> {
    type Elem = F::Elem;
    type Space = F;

    fn space(&self) -> &F {
        &self.line
    }

    fn identity(&self) -> F::Elem {
        self.line.zero()
    }

    fn mul(&self, a: &F::Elem, b: &F::Elem) -> Result<F::Elem> {
        self.line.add(a, b)
    }

    fn inv(&self, a: &F::Elem) -> Result<F::Elem> {
        self.line.neg(a)
    }

    fn act(&self, g: &F::Elem, p: &F::Elem) -> Result<F::Elem> {
        self.line.add(p, g)
    }

    fn dilate(&self, _g: &F::Elem, delta: &F::Elem) -> Result<F::Elem> {
        Ok(delta.clone())
    }

    fn sample_elem(&self, rng: &mut dyn RngCore) -> F::Elem {
        self.line.sample(rng)
    }

    fn is_identity(&self, a: &F::Elem) -> bool {
        self.line.is_zero(a)
    }

    /// The displacement `g·x − x = g` does not depend on `x`.
    fn certify(&self, g: &F::Elem) -> Result<Option<bool>> {
        Ok(Some(!self.line.is_zero(g)))
    }
}

/// Upper triangular matrices with positive diagonal acting on `ℝ^{m+n}` via `φ̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct TStarGroup {
    pub n: usize,
    pub space: Column<RealLine>,
}

impl TStarGroup {
    pub fn new(n: usize, max_refinements: u32) -> Self {
        TStarGroup {
            n,
            space: Column::new(lie_dim(n) + n, RealLine { max_refinements }),
        }
    }

    fn aut(&self, g: &TStarElem) -> Result<AffineAut<ExpSum>> {
        if g.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: g.n,
            });
        }
        AffineAut::split(&phi_bar(g)?)
    }
}

impl AffineGroup for TStarGroup {
    type Elem = TStarElem;
    type Space = Column<RealLine>;

    fn space(&self) -> &Column<RealLine> {
        &self.space
    }

    fn identity(&self) -> TStarElem {
        TStarElem::identity(self.n)
    }

    fn mul(&self, a: &TStarElem, b: &TStarElem) -> Result<TStarElem> {
        a.mul(b)
    }

    fn inv(&self, a: &TStarElem) -> Result<TStarElem> {
        a.inverse()
    }

    fn act(&self, g: &TStarElem, p: &Vec<ExpSum>) -> Result<Vec<ExpSum>> {
        self.aut(g)?.act(p)
    }

    fn dilate(&self, g: &TStarElem, delta: &Vec<ExpSum>) -> Result<Vec<ExpSum>> {
        self.aut(g)?.dilate(delta)
    }

    fn sample_elem(&self, rng: &mut dyn RngCore) -> TStarElem {
        TStarElem::random(rng, self.n)
    }

    fn is_identity(&self, a: &TStarElem) -> bool {
        a.is_identity()
    }

    fn certify(&self, g: &TStarElem) -> Result<Option<bool>> {
        tstar_essentially_free(g).map(Some)
    }
}

/// Componentwise action of a finite family on the lexicographic product of
/// their trees; component 0 is the most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductGroup<G: AffineGroup> {
    pub components: Vec<G>,
    pub space: ProductSpace<G::Space>,
}

impl<G: AffineGroup> ProductGroup<G> {
    pub fn new(components: Vec<G>) -> Self {
        let space = ProductSpace {
            components: components.iter().map(|c| c.space().clone()).collect(),
        };
        ProductGroup { components, space }
    }

    fn check(&self, len: usize) -> Result<()> {
        if len == self.components.len() {
            Ok(())
        } else {
            Err(Error::IndexSpaceMismatch)
        }
    }
}

impl<G: AffineGroup> AffineGroup for ProductGroup<G> {
    type Elem = Vec<G::Elem>;
    type Space = ProductSpace<G::Space>;

    fn space(&self) -> &Self::Space {
        &self.space
    }

    fn identity(&self) -> Self::Elem {
        self.components.iter().map(|c| c.identity()).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.check(a.len())?;
        self.check(b.len())?;
        self.components
            .iter()
            .zip(a.iter().zip(b))
            .map(|(c, (x, y))| c.mul(x, y))
            .collect()
    }

    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem> {
        self.check(a.len())?;
        self.components
            .iter()
            .zip(a)
            .map(|(c, x)| c.inv(x))
            .collect()
    }

    fn act(&self, g: &Self::Elem, p: &Point<Self>) -> Result<Point<Self>> {
        self.check(g.len())?;
        self.check(p.len())?;
        self.components
            .iter()
            .zip(g.iter().zip(p))
            .map(|(c, (h, x))| c.act(h, x))
            .collect()
    }

    fn dilate(&self, g: &Self::Elem, delta: &Point<Self>) -> Result<Point<Self>> {
        self.check(g.len())?;
        self.check(delta.len())?;
        self.components
            .iter()
            .zip(g.iter().zip(delta))
            .map(|(c, (h, x))| c.dilate(h, x))
            .collect()
    }

    fn sample_elem(&self, rng: &mut dyn RngCore) -> Self::Elem {
        self.components
            .iter()
            .map(|c| {
                if rand::Rng::gen_bool(rng, 0.25) {
                    c.identity()
                } else {
                    c.sample_elem(rng)
                }
            })
            .collect()
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        a.len() == self.components.len()
            && self.components.iter().zip(a).all(|(c, x)| c.is_identity(x))
    }

    /// The most significant nontrivial component decides.
    fn certify(&self, g: &Self::Elem) -> Result<Option<bool>> {
        self.check(g.len())?;
        match self
            .components
            .iter()
            .zip(g)
            .find(|(c, x)| !c.is_identity(x))
        {
            None => Err(Error::IdentityInput),
            Some((c, x)) => Ok(match c.certify(x)? {
                Some(true) => Some(true),
                _ => None,
            }),
        }
    }
}

/// `(g_ω)·(x_ω) = (g_ω·x_ω)`.
pub fn product_action<G: AffineGroup>(
    group: &ProductGroup<G>,
    g: &[G::Elem],
    x: &[Point<G>],
) -> Result<Vec<Point<G>>> {
    group.act(&g.to_vec(), &x.to_vec())
}

/// Outcome of a sampled action check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionReport {
    /// Exact verdict where one exists; `None` means only sampling evidence.
    pub certified: Option<bool>,
    pub sampled_pass: usize,
    pub witness: Option<String>,
}

impl ActionReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none() && self.certified != Some(false)
    }
}

fn render<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!("<unserializable: {e}>"))
}

/// Checks `d(g·x, g·y) = α_g d(x, y)` and `x < y ⟹ g·x < g·y` on `samples` random pairs.
pub fn check_affine_law<G: AffineGroup>(
    group: &G,
    g: &G::Elem,
    samples: usize,
    seed: u64,
) -> Result<ActionReport> {
    check_affine_law_with(
        group.space(),
        |p| group.act(g, p),
        |d| group.dilate(g, d),
        samples,
        seed,
    )
}

/// [`check_affine_law`] for an action given as a pair of closures.
pub fn check_affine_law_with<F: OrderedGroup>(
    space: &F,
    act: impl Fn(&F::Elem) -> Result<F::Elem>,
    dilate: impl Fn(&F::Elem) -> Result<F::Elem>,
    samples: usize,
    seed: u64,
) -> Result<ActionReport> {
    if samples == 0 {
        return Err(Error::ConfigInvalid("samples must be at least 1".into()));
    }
    let mut passed = 0;
    for trial in 0..samples as u64 {
        let mut rng = sample::trial_rng(seed, "affine-law", trial);
        let x = space.sample(&mut rng);
        let y = space.sample(&mut rng);
        let (gx, gy) = (act(&x)?, act(&y)?);
        let lhs = space.dist(&gx, &gy)?;
        let rhs = dilate(&space.dist(&x, &y)?)?;
        if lhs != rhs {
            return Ok(ActionReport {
                certified: None,
                sampled_pass: passed,
                witness: Some(format!(
                    "trial {trial}: x = {}, y = {}, d(gx,gy) = {}, α d(x,y) = {}",
                    render(&x),
                    render(&y),
                    render(&lhs),
                    render(&rhs)
                )),
            });
        }
        if space.compare(&x, &y)? != space.compare(&gx, &gy)? {
            return Ok(ActionReport {
                certified: None,
                sampled_pass: passed,
                witness: Some(format!(
                    "trial {trial}: order reversed on x = {}, y = {}",
                    render(&x),
                    render(&y)
                )),
            });
        }
        passed += 1;
    }
    Ok(ActionReport {
        certified: None,
        sampled_pass: passed,
        witness: None,
    })
}

/// Samples points `x` (the first is always `0`) and checks that `g·x ≠ x`
/// and that the sign of `g·x − x` never changes.
pub fn check_free_and_rigid<G: AffineGroup>(
    group: &G,
    g: &G::Elem,
    samples: usize,
    seed: u64,
) -> Result<ActionReport> {
    if group.is_identity(g) {
        return Err(Error::IdentityInput);
    }
    if samples == 0 {
        return Err(Error::ConfigInvalid("samples must be at least 1".into()));
    }
    let certified = group.certify(g)?;
    let space = group.space();
    let mut passed = 0;
    let mut first_sign: Option<Sign> = None;
    for trial in 0..samples as u64 {
        let x = if trial == 0 {
            space.zero()
        } else {
            space.sample(&mut sample::trial_rng(seed, "free-rigid", trial))
        };
        let s = space.sign(&space.sub(&group.act(g, &x)?, &x)?)?;
        let failure = if s == Sign::Zero {
            Some("fixed point")
        } else if first_sign.is_some_and(|f| f != s) {
            Some("displacement changes sign")
        } else {
            None
        };
        if let Some(what) = failure {
            return Ok(ActionReport {
                certified,
                sampled_pass: passed,
                witness: Some(format!("{what} at x = {}", render(&x))),
            });
        }
        first_sign = Some(s);
        passed += 1;
    }
    Ok(ActionReport {
        certified,
        sampled_pass: passed,
        witness: None,
    })
}
