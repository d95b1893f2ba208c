//! The graded left-symmetric structure on strictly upper triangular matrices
//! and the affine embedding of the unitriangular group it induces.
//!
//! A strictly upper triangular `n×n` matrix `x` is split into its
//! superdiagonals `S_1, …, S_{n-1}` (`S_i` has length `n−i`). The product
//! `S_i*·S_j* = j/(i+j)·[S_i*, S_j*]`, extended bilinearly, is left-symmetric
//! and its commutator is the matrix commutator. In the coordinates
//! `t(x) = (S_{n-1}, …, S_1)` left multiplication by `x` is an `m×m` matrix
//! `λ(x)` (`m = n(n−1)/2`), and
//!
//! ```text
//! dγ̄(x) = | λ(x)  t(x) |        γ̄(g) = exp(dγ̄(log g))
//!         |  0     0   |
//! ```
//!
//! is a faithful representation of `UT(n)` in `UT(m+1)` whose nontrivial
//! elements are essentially hyperbolic affine maps of `ℚ^m`.
//!
//! Indices `ρ, σ, ν` of `t`-coordinates are 1-based throughout this module,
//! matching the block description of [`BlockIndex`]. Matrix storage stays 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{nilpotent_exp, unipotent_log, TriMat};
use crate::scalar::{Rat, Scalar};

/// `m = n(n−1)/2`, the dimension of `𝔲𝔱(n)`.
pub fn lie_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn triangular(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Position of a `t`-coordinate inside the block decomposition of `ℚ^m`.
///
/// Block `k` (of size `k`) holds the superdiagonal `S_{n−k}`; `pos` is the
/// offset `r` inside it, so coordinate `ν` carries the entry `x_{r, r+n−k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockIndex {
    pub nu: usize,
    pub block: usize,
    pub pos: usize,
}

impl BlockIndex {
    pub fn of(nu: usize) -> BlockIndex {
        assert!(nu >= 1, "coordinates are 1-based");
        let mut block = 1;
        while nu > triangular(block) {
            block += 1;
        }
        BlockIndex {
            nu,
            block,
            pos: nu - triangular(block - 1),
        }
    }

    pub fn from_block(block: usize, pos: usize) -> BlockIndex {
        assert!(1 <= pos && pos <= block);
        BlockIndex {
            nu: triangular(block - 1) + pos,
            block,
            pos,
        }
    }

    /// 1-based `(row, column)` of the matrix entry carried by this coordinate.
    pub fn entry(&self, n: usize) -> (usize, usize) {
        (self.pos, self.pos + n - self.block)
    }
}

fn require_strict<S: Scalar>(x: &TriMat<S>) -> Result<()> {
    if x.is_strict_upper() {
        Ok(())
    } else {
        Err(Error::NotStrictUpper)
    }
}

fn require_same_dim<S: Scalar>(x: &TriMat<S>, y: &TriMat<S>) -> Result<()> {
    if x.dim() == y.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        })
    }
}

/// Superdiagonals `S_1, …, S_{n−1}` of a strictly upper triangular matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperdiagDecomp<S> {
    pub n: usize,
    /// `diagonals[i-1] = S_i = (x_{1,1+i}, …, x_{n−i,n})`.
    pub diagonals: Vec<Vec<S>>,
}

impl<S: Scalar> SuperdiagDecomp<S> {
    pub fn decompose(x: &TriMat<S>) -> Result<Self> {
        require_strict(x)?;
        let n = x.dim();
        let diagonals = (1..n)
            .map(|i| (0..n - i).map(|k| x.get(k, k + i).clone()).collect())
            .collect();
        Ok(SuperdiagDecomp { n, diagonals })
    }

    pub fn recompose(&self) -> Result<TriMat<S>> {
        let n = self.n;
        if self.diagonals.len() != n.saturating_sub(1) {
            return Err(Error::DimensionMismatch {
                expected: n.saturating_sub(1),
                found: self.diagonals.len(),
            });
        }
        let mut x = TriMat::zero(n);
        for (idx, diag) in self.diagonals.iter().enumerate() {
            let i = idx + 1;
            if diag.len() != n - i {
                return Err(Error::DimensionMismatch {
                    expected: n - i,
                    found: diag.len(),
                });
            }
            for (k, v) in diag.iter().enumerate() {
                x.set(k, k + i, v.clone());
            }
        }
        Ok(x)
    }

    /// Index of the first nonzero superdiagonal, if any.
    pub fn lowest_nonzero(&self) -> Option<usize> {
        self.diagonals
            .iter()
            .position(|d| d.iter().any(|v| !v.is_zero()))
            .map(|idx| idx + 1)
    }
}

/// Matrix holding only the `i`-th superdiagonal of `x`.
pub fn superdiagonal_part<S: Scalar>(x: &TriMat<S>, i: usize) -> TriMat<S> {
    let n = x.dim();
    TriMat::from_fn(n, |r, c| {
        if c == r + i {
            x.get(r, c).clone()
        } else {
            S::zero()
        }
    })
}

/// The left-symmetric product `x·y`.
///
/// Entry `(k, k+i+j)` receives, for each pair of superdiagonals `i, j`,
/// `j/(i+j)·(x_{k,k+i} y_{k+i,k+i+j} − y_{k,k+j} x_{k+j,k+i+j})`.
pub fn lsa_product<S: Scalar>(x: &TriMat<S>, y: &TriMat<S>) -> Result<TriMat<S>> {
    require_strict(x)?;
    require_strict(y)?;
    require_same_dim(x, y)?;
    let n = x.dim();
    let mut out = TriMat::<S>::zero(n);
    for i in 1..n {
        for j in 1..n.saturating_sub(i) {
            let weight = S::from_rat(&Rat::frac(j as i64, (i + j) as i64));
            for k in 0..n - (i + j) {
                let xy = x.get(k, k + i).clone() * y.get(k + i, k + i + j).clone();
                let yx = y.get(k, k + j).clone() * x.get(k + j, k + i + j).clone();
                let term = xy - yx;
                if term.is_zero() {
                    continue;
                }
                let acc = out.get(k, k + i + j).clone();
                out.set(k, k + i + j, acc + weight.clone() * term);
            }
        }
    }
    Ok(out)
}

/// `t(x) = (S_{n−1}, S_{n−2}, …, S_1)ᵀ`.
pub fn t_iso<S: Scalar>(x: &TriMat<S>) -> Result<Vec<S>> {
    require_strict(x)?;
    let n = x.dim();
    Ok((1..=lie_dim(n))
        .map(|nu| {
            let (r, c) = BlockIndex::of(nu).entry(n);
            x.get(r - 1, c - 1).clone()
        })
        .collect())
}

/// Inverse of [`t_iso`] for a vector of length `n(n−1)/2`.
pub fn t_inv<S: Scalar>(n: usize, v: &[S]) -> Result<TriMat<S>> {
    let m = lie_dim(n);
    if v.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: v.len(),
        });
    }
    let mut x = TriMat::zero(n);
    for (idx, value) in v.iter().enumerate() {
        let (r, c) = BlockIndex::of(idx + 1).entry(n);
        x.set(r - 1, c - 1, value.clone());
    }
    Ok(x)
}

/// `λ(x)`: the matrix of `y ↦ x·y` in `t`-coordinates, built column by column
/// from the bilinear product.
pub fn lambda_via_lsa<S: Scalar>(x: &TriMat<S>) -> Result<TriMat<S>> {
    require_strict(x)?;
    let n = x.dim();
    let m = lie_dim(n);
    let mut lambda = TriMat::zero(m);
    for sigma in 0..m {
        let mut basis = vec![S::zero(); m];
        basis[sigma] = S::one();
        let column = t_iso(&lsa_product(x, &t_inv(n, &basis)?)?)?;
        for (rho, value) in column.into_iter().enumerate() {
            lambda.set(rho, sigma, value);
        }
    }
    Ok(lambda)
}

/// The `(ρ, σ)` entry of `λ(x)` from its closed form (1-based indices).
///
/// With `(k, r)` the block and in-block position of each index:
/// `(n−k_σ)/(n−k_ρ) · x_{r_ρ, r_ρ+k_σ−k_ρ}` when `k_ρ < k_σ` and
/// `r_σ − r_ρ = k_σ − k_ρ > 0`; `−(n−k_σ)/(n−k_ρ) · x_{n−k_σ+r_ρ, n−k_ρ+r_ρ}`
/// when `k_ρ < k_σ` and `r_ρ = r_σ`; zero otherwise.
pub fn lambda_closed_form<S: Scalar>(x: &TriMat<S>, rho: usize, sigma: usize) -> Result<S> {
    require_strict(x)?;
    let n = x.dim();
    let m = lie_dim(n);
    for index in [rho, sigma] {
        if index == 0 || index > m {
            return Err(Error::IndexOutOfRange { index, max: m });
        }
    }
    let a = BlockIndex::of(rho);
    let b = BlockIndex::of(sigma);
    if a.block >= b.block {
        return Ok(S::zero());
    }
    let gap = b.block - a.block;
    let ratio = S::from_rat(&Rat::frac((n - b.block) as i64, (n - a.block) as i64));
    if a.pos < b.pos && b.pos - a.pos == gap {
        let (i, j) = (a.pos, a.pos + gap);
        Ok(ratio * x.get(i - 1, j - 1).clone())
    } else if a.pos == b.pos {
        let (i, j) = (n - b.block + a.pos, n - a.block + a.pos);
        Ok(-(ratio * x.get(i - 1, j - 1).clone()))
    } else {
        Ok(S::zero())
    }
}

/// `λ(x)` assembled entrywise from [`lambda_closed_form`].
pub fn lambda_from_closed_form<S: Scalar>(x: &TriMat<S>) -> Result<TriMat<S>> {
    require_strict(x)?;
    let m = lie_dim(x.dim());
    let mut out = TriMat::zero(m);
    for rho in 1..=m {
        for sigma in 1..=m {
            out.set(rho - 1, sigma - 1, lambda_closed_form(x, rho, sigma)?);
        }
    }
    Ok(out)
}

/// `λ(x)` via the closed form; this is the fast path used by [`dgamma`].
pub fn lambda<S: Scalar>(x: &TriMat<S>) -> Result<TriMat<S>> {
    lambda_from_closed_form(x)
}

/// The affine Lie algebra embedding `dγ̄(x) = [[λ(x), t(x)], [0, 0]]`.
pub fn dgamma<S: Scalar>(x: &TriMat<S>) -> Result<TriMat<S>> {
    let lam = lambda(x)?;
    let t = t_iso(x)?;
    let m = t.len();
    let mut out = TriMat::zero(m + 1);
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, lam.get(i, j).clone());
        }
        out.set(i, m, t[i].clone());
    }
    Ok(out)
}

/// Image of a unitriangular matrix under `γ̄`, as an `(m+1)×(m+1)` affine matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct AffineRep<S> {
    pub n: usize,
    pub m: usize,
    pub matrix: TriMat<S>,
}

impl<S: Scalar> AffineRep<S> {
    pub fn new(n: usize, matrix: TriMat<S>) -> Result<Self> {
        let m = lie_dim(n);
        if matrix.dim() != m + 1 {
            return Err(Error::DimensionMismatch {
                expected: m + 1,
                found: matrix.dim(),
            });
        }
        if !matrix.is_unitriangular() {
            return Err(Error::NotUnitriangular);
        }
        Ok(AffineRep { n, m, matrix })
    }

    /// Top-left `m×m` block.
    pub fn linear_part(&self) -> TriMat<S> {
        self.matrix.leading_block(self.m)
    }

    /// Last column without the corner entry.
    pub fn translation(&self) -> Vec<S> {
        (0..self.m)
            .map(|i| self.matrix.get(i, self.m).clone())
            .collect()
    }
}

/// `γ̄(g) = exp(dγ̄(log g))` for unitriangular `g`.
pub fn gamma_bar<S: Scalar>(g: &TriMat<S>) -> Result<AffineRep<S>> {
    let x = unipotent_log(g)?;
    let matrix = nilpotent_exp(&dgamma(&x)?)?;
    Ok(AffineRep {
        n: g.dim(),
        m: lie_dim(g.dim()),
        matrix,
    })
}

/// Range of 0-based matrix indices occupied by block `k` of an `(m+1)`-dimensional
/// `dγ̄`-shaped matrix; block `n` is the final (affine) coordinate.
pub fn block_range(n: usize, k: usize) -> std::ops::Range<usize> {
    if k == n {
        let m = lie_dim(n);
        m..m + 1
    } else {
        let start = triangular(k - 1);
        start..start + k
    }
}

/// True when every block `(i, j)` with `j − i < depth` (including all `j ≤ i`)
/// of an `(m+1)×(m+1)` matrix vanishes. Blocks are numbered `1..=n`, block `n`
/// being the affine coordinate.
pub fn block_superdiagonals_vanish_below<S: Scalar>(
    mat: &TriMat<S>,
    n: usize,
    depth: usize,
) -> bool {
    for bi in 1..=n {
        for bj in 1..=n {
            if bj >= bi + depth {
                continue;
            }
            for r in block_range(n, bi) {
                for c in block_range(n, bj) {
                    if r < mat.dim() && c < mat.dim() && !mat.get(r, c).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    fn generic4() -> TriMat<Rat> {
        // x12=2, x13=3, x14=5, x23=7, x24=11, x34=13
        let mut x = TriMat::zero(4);
        for (i, j, v) in [
            (0, 1, 2),
            (0, 2, 3),
            (0, 3, 5),
            (1, 2, 7),
            (1, 3, 11),
            (2, 3, 13),
        ] {
            x.set(i, j, Rat::int(v));
        }
        x
    }

    #[test]
    fn block_index_layout() {
        let expected = [
            (1, 1, 1),
            (2, 2, 1),
            (3, 2, 2),
            (4, 3, 1),
            (5, 3, 2),
            (6, 3, 3),
        ];
        for (nu, k, pos) in expected {
            let b = BlockIndex::of(nu);
            assert_eq!((b.block, b.pos), (k, pos));
            assert_eq!(BlockIndex::from_block(k, pos).nu, nu);
        }
        assert_eq!(BlockIndex::of(1).entry(4), (1, 4));
        assert_eq!(BlockIndex::of(3).entry(4), (2, 4));
        assert_eq!(BlockIndex::of(6).entry(4), (3, 4));
    }

    #[test]
    fn decompose_layout() {
        let d = SuperdiagDecomp::decompose(&generic4()).unwrap();
        assert_eq!(d.diagonals[0], vec![Rat::int(2), Rat::int(7), Rat::int(13)]);
        assert_eq!(d.diagonals[1], vec![Rat::int(3), Rat::int(11)]);
        assert_eq!(d.diagonals[2], vec![Rat::int(5)]);
        assert_eq!(d.recompose().unwrap(), generic4());
        let z = SuperdiagDecomp::decompose(&TriMat::<Rat>::zero(4)).unwrap();
        assert!(z.diagonals.iter().flatten().all(|v| v.is_zero()));
        assert_eq!(z.lowest_nonzero(), None);
        assert_eq!(
            SuperdiagDecomp::decompose(&TriMat::<Rat>::identity(3)),
            Err(Error::NotStrictUpper)
        );
    }

    #[test]
    fn lsa_product_elementary() {
        let e12 = TriMat::<Rat>::unit(3, 0, 1);
        let e23 = TriMat::<Rat>::unit(3, 1, 2);
        let half_e13 = TriMat::<Rat>::unit(3, 0, 2).scale(&r(1, 2));
        assert_eq!(lsa_product(&e12, &e23).unwrap(), half_e13);
        assert_eq!(lsa_product(&e23, &e12).unwrap(), half_e13.neg());
    }

    #[test]
    fn t_iso_order() {
        let t = t_iso(&generic4()).unwrap();
        let expected: Vec<Rat> = [5, 3, 11, 2, 7, 13].iter().map(|&v| Rat::int(v)).collect();
        assert_eq!(t, expected);
        assert_eq!(t_inv(4, &t).unwrap(), generic4());
        assert_eq!(
            t_iso(&TriMat::<Rat>::zero(4)).unwrap(),
            vec![Rat::zero(); 6]
        );
        assert!(matches!(
            t_inv::<Rat>(4, &[Rat::zero()]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let x = generic4();
        assert_eq!(
            lambda_closed_form(&x, 1, 2).unwrap(),
            r(-2, 3) * Rat::int(13)
        );
        assert_eq!(
            lambda_closed_form(&x, 2, 4).unwrap(),
            r(-1, 2) * Rat::int(7)
        );
        assert_eq!(lambda_closed_form(&x, 4, 6).unwrap(), Rat::zero());
        assert_eq!(
            lambda_closed_form(&x, 0, 1),
            Err(Error::IndexOutOfRange { index: 0, max: 6 })
        );
        assert_eq!(
            lambda_closed_form(&x, 1, 7),
            Err(Error::IndexOutOfRange { index: 7, max: 6 })
        );
    }

    #[test]
    fn lambda_routes_agree_on_generic4() {
        let x = generic4();
        assert_eq!(
            lambda_via_lsa(&x).unwrap(),
            lambda_from_closed_form(&x).unwrap()
        );
        assert_eq!(
            lambda_via_lsa(&TriMat::<Rat>::zero(4)).unwrap(),
            TriMat::zero(6)
        );
    }

    #[test]
    fn dgamma_last_column_is_t() {
        let d = dgamma(&generic4()).unwrap();
        let col: Vec<Rat> = (0..7).map(|i| d.get(i, 6).clone()).collect();
        let expected: Vec<Rat> = [5, 3, 11, 2, 7, 13, 0]
            .iter()
            .map(|&v| Rat::int(v))
            .collect();
        assert_eq!(col, expected);
        assert!(dgamma(&TriMat::<Rat>::zero(4)).unwrap().is_zero());
    }

    #[test]
    fn gamma_bar_identity_and_errors() {
        let rep = gamma_bar(&TriMat::<Rat>::identity(4)).unwrap();
        assert_eq!(rep.matrix, TriMat::identity(7));
        assert_eq!(rep.m, 6);
        assert_eq!(
            gamma_bar(&TriMat::<Rat>::zero(3)),
            Err(Error::NotUnitriangular)
        );
    }

    #[test]
    fn block_ranges() {
        assert_eq!(block_range(4, 1), 0..1);
        assert_eq!(block_range(4, 2), 1..3);
        assert_eq!(block_range(4, 3), 3..6);
        assert_eq!(block_range(4, 4), 6..7);
    }
}
