//! Extension of `γ̄` to upper triangular matrices with positive diagonal.
//!
//! An element is stored as `u·d` with `u` unitriangular and
//! `d = diag(e^{q_1}, …, e^{q_n})`. With `m = n(n−1)/2` and
//! `γ̄(u) = [[φ₀(u), b(u)], [0, 1]]`,
//!
//! ```text
//!         | φ₀(u)  0   b(u) |           | d*  0   0     |
//! φ̄(u) =  |   0    Iₙ   0   |   φ̄(d) =  | 0   Iₙ  log d |
//!         |   0    0    1   |           | 0   0   1     |
//! ```
//!
//! and `φ̄(u·d) = φ̄(u)·φ̄(d)`, where `d*` is the matrix of `x ↦ d x d⁻¹` in
//! `t`-coordinates. All entries live in [`ExpSum`], so every identity below is
//! checked by exact equality.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::hyperbolic::is_essentially_hyperbolic;
use crate::lsa::{dgamma, gamma_bar, lambda, lie_dim, t_iso, BlockIndex};
use crate::matrix::{nilpotent_exp, unipotent_log, TriMat};
use crate::sample;
use crate::scalar::{Rat, Scalar};

/// Element `u·d` of the group of upper triangular real matrices with positive diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TStarElem {
    pub n: usize,
    pub u: TriMat<ExpSum>,
    /// `q_i` with diagonal entry `e^{q_i}`.
    #[serde(rename = "diag_exponents")]
    pub d: Vec<Rat>,
}

impl TStarElem {
    pub fn new(u: TriMat<ExpSum>, d: Vec<Rat>) -> Result<Self> {
        if !u.is_unitriangular() {
            return Err(Error::NotUnitriangular);
        }
        if d.len() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: d.len(),
            });
        }
        Ok(TStarElem { n: u.dim(), u, d })
    }

    /// Re-checks the invariants after deserialization.
    pub fn validate(self) -> Result<Self> {
        if self.u.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.u.dim(),
            });
        }
        TStarElem::new(self.u, self.d)
    }

    pub fn identity(n: usize) -> Self {
        TStarElem {
            n,
            u: TriMat::identity(n),
            d: vec![Rat::zero(); n],
        }
    }

    pub fn unipotent(u: TriMat<ExpSum>) -> Result<Self> {
        let n = u.dim();
        TStarElem::new(u, vec![Rat::zero(); n])
    }

    pub fn diagonal(d: Vec<Rat>) -> Self {
        let n = d.len();
        TStarElem {
            n,
            u: TriMat::identity(n),
            d,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_identity() && self.d.iter().all(Rat::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        self.u.is_identity()
    }

    pub fn is_unipotent(&self) -> bool {
        self.d.iter().all(Rat::is_zero)
    }

    /// `(u, d)·(u', d') = (u·(d u' d⁻¹), d d')`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let u = self.u.mul(&conjugate_by_diag(&self.d, &other.u)?)?;
        let d = self.d.iter().zip(&other.d).map(|(a, b)| a + b).collect();
        Ok(TStarElem { n: self.n, u, d })
    }

    /// `(u d)⁻¹ = (d⁻¹ u⁻¹ d) d⁻¹`.
    pub fn inverse(&self) -> Result<Self> {
        let neg: Vec<Rat> = self.d.iter().map(|q| -q).collect();
        let u = conjugate_by_diag(&neg, &self.u.upper_inverse()?)?;
        Ok(TStarElem {
            n: self.n,
            u,
            d: neg,
        })
    }

    /// The `n×n` matrix `u·d`.
    pub fn to_matrix(&self) -> TriMat<ExpSum> {
        let mut out = self.u.clone();
        for i in 0..self.n {
            for j in i..self.n {
                let scaled = out.get(i, j).clone() * ExpSum::exp(self.d[j].clone());
                out.set(i, j, scaled);
            }
        }
        out
    }

    /// Random element with entries on the sampling grid.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let mut u = sample::strict_upper_with(rng, n, random_entry);
        for i in 0..n {
            u.set(i, i, ExpSum::one());
        }
        let d = (0..n).map(|_| sample::rational(rng)).collect();
        TStarElem { n, u, d }
    }
}

fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> ExpSum {
    let roll: f64 = rng.gen();
    if roll < 0.2 {
        ExpSum::zero()
    } else if roll < 0.8 {
        ExpSum::monomial(sample::nonzero_rational(rng), sample::rational(rng))
    } else {
        sample::expsum(rng)
    }
}

/// Random strictly upper triangular matrix with exponential-sum entries.
pub fn random_strict_upper<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TriMat<ExpSum> {
    sample::strict_upper_with(rng, n, random_entry)
}

/// `χ_d(x) = d x d⁻¹` for `d = diag(e^{q})`: entry `(i, j)` is scaled by `e^{q_i − q_j}`.
pub fn conjugate_by_diag(q: &[Rat], x: &TriMat<ExpSum>) -> Result<TriMat<ExpSum>> {
    if q.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: q.len(),
        });
    }
    let n = x.dim();
    Ok(TriMat::from_fn(n, |i, j| {
        let e = x.get(i, j);
        if e.is_zero() {
            ExpSum::zero()
        } else {
            e.clone() * ExpSum::exp(&q[i] - &q[j])
        }
    }))
}

pub fn diag_matrix(q: &[Rat]) -> TriMat<ExpSum> {
    TriMat::diagonal(q.iter().cloned().map(ExpSum::exp).collect())
}

/// `d*`: diagonal `m×m` matrix whose entry for the coordinate carrying `x_{jk}` is `e^{q_j − q_k}`.
pub fn d_star(q: &[Rat]) -> TriMat<ExpSum> {
    let n = q.len();
    let m = lie_dim(n);
    let diag = (1..=m)
        .map(|nu| {
            let (j, k) = BlockIndex::of(nu).entry(n);
            ExpSum::exp(&q[j - 1] - &q[k - 1])
        })
        .collect();
    TriMat::diagonal(diag)
}

/// `d̃ = diag(d*, 1)`.
pub fn d_tilde(q: &[Rat]) -> TriMat<ExpSum> {
    let star = d_star(q);
    let m = star.dim();
    TriMat::from_fn(m + 1, |i, j| {
        if i == m && j == m {
            ExpSum::one()
        } else if i < m && j < m {
            star.get(i, j).clone()
        } else {
            ExpSum::zero()
        }
    })
}

/// `φ₀(u)` and `b(u)` with `γ̄(u) = [[φ₀(u), b(u)], [0, 1]]`.
pub fn phi0_and_b(u: &TriMat<ExpSum>) -> Result<(TriMat<ExpSum>, Vec<ExpSum>)> {
    let rep = gamma_bar(u)?;
    Ok((rep.linear_part(), rep.translation()))
}

/// `φ̄(u)` for unitriangular `u`.
pub fn phi_bar_unipotent(u: &TriMat<ExpSum>) -> Result<TriMat<ExpSum>> {
    let n = u.dim();
    let m = lie_dim(n);
    let (phi0, b) = phi0_and_b(u)?;
    let dim = m + n + 1;
    let mut out = TriMat::identity(dim);
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, phi0.get(i, j).clone());
        }
        out.set(i, dim - 1, b[i].clone());
    }
    Ok(out)
}

/// `φ̄(d)` for `d = diag(e^{q})`.
pub fn phi_bar_diagonal(q: &[Rat]) -> TriMat<ExpSum> {
    let n = q.len();
    let m = lie_dim(n);
    let dim = m + n + 1;
    let star = d_star(q);
    let mut out = TriMat::identity(dim);
    for i in 0..m {
        out.set(i, i, star.get(i, i).clone());
    }
    for (k, qk) in q.iter().enumerate() {
        out.set(m + k, dim - 1, ExpSum::constant(qk.clone()));
    }
    out
}

/// `φ̄(u·d) = φ̄(u)·φ̄(d)`, an `(m+n+1)×(m+n+1)` affine matrix.
pub fn phi_bar(g: &TStarElem) -> Result<TriMat<ExpSum>> {
    phi_bar_unipotent(&g.u)?.mul(&phi_bar_diagonal(&g.d))
}

/// Whether `φ̄(g)` is essentially hyperbolic, i.e. `g` acts on `ℝ^{m+n}` without
/// fixed points and without nesting.
pub fn tstar_essentially_free(g: &TStarElem) -> Result<bool> {
    if g.is_identity() {
        return Err(Error::IdentityInput);
    }
    is_essentially_hyperbolic(&phi_bar(g)?)
}

/// Factor by which `x ↦ d x d⁻¹` rescales the `(ρ, σ)` entry of `λ(x)`,
/// read off from the closed form of `λ` (1-based indices).
pub fn lambda_conjugation_multiplier(q: &[Rat], rho: usize, sigma: usize) -> ExpSum {
    let n = q.len();
    let a = BlockIndex::of(rho);
    let b = BlockIndex::of(sigma);
    let ratio = |i: usize, j: usize| ExpSum::exp(&q[i - 1] - &q[j - 1]);
    if b.block > a.block && b.pos > a.pos && b.block - a.block == b.pos - a.pos {
        ratio(a.pos, a.pos + (b.block - a.block))
    } else if b.block > a.block && b.pos == a.pos {
        ratio(n - b.block + a.pos, n - a.block + a.pos)
    } else {
        ExpSum::one()
    }
}

/// Tags of the commutation identities, in order.
pub const IDENTITY_TAGS: [&str; 10] = [
    "(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)", "(vii)", "(viii)", "(ix)", "(x)",
];

/// One random draw for the commutation identities.
#[derive(Clone, Debug)]
pub struct LemmaSample {
    pub u: TriMat<ExpSum>,
    pub q: Vec<Rat>,
    pub x: TriMat<ExpSum>,
    pub other: TStarElem,
}

impl LemmaSample {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let g = TStarElem::random(rng, n);
        let x = random_strict_upper(rng, n);
        let other = TStarElem::random(rng, n);
        LemmaSample {
            u: g.u,
            q: g.d,
            x,
            other,
        }
    }

    pub fn trivial(n: usize) -> Self {
        LemmaSample {
            u: TriMat::identity(n),
            q: vec![Rat::zero(); n],
            x: TriMat::zero(n),
            other: TStarElem::identity(n),
        }
    }
}

/// Evaluates all ten identities on one sample; entry `k` is `true` when
/// identity `IDENTITY_TAGS[k]` holds.
pub fn check_ten_identities(s: &LemmaSample) -> Result<[bool; 10]> {
    let n = s.u.dim();
    let q = &s.q;
    let dmat = diag_matrix(q);
    let star = d_star(q);
    let tilde = d_tilde(q);
    let chi_x = conjugate_by_diag(q, &s.x)?;
    let chi_u = conjugate_by_diag(q, &s.u)?;

    let dg = dgamma(&s.x)?;
    // (i) d̃ exp(N) d̃⁻¹ = exp(d̃ N d̃⁻¹)
    let i = nilpotent_exp(&dg)?.conjugate_by(&tilde)? == nilpotent_exp(&dg.conjugate_by(&tilde)?)?;
    // (ii) d log(u) d⁻¹ = log(d u d⁻¹)
    let ii = unipotent_log(&s.u)?.conjugate_by(&dmat)? == unipotent_log(&s.u.conjugate_by(&dmat)?)?;
    // (iii) d* t(x) = t(d x d⁻¹)
    let iii = star.mul_vec(&t_iso(&s.x)?)? == t_iso(&chi_x)?;
    // (iv) d* λ(x) d*⁻¹ = λ(d x d⁻¹)
    let iv = lambda(&s.x)?.conjugate_by(&star)? == lambda(&chi_x)?;
    // (v) d̃ dγ̄(x) d̃⁻¹ = dγ̄(d x d⁻¹)
    let v = dg.conjugate_by(&tilde)? == dgamma(&chi_x)?;
    // (vi) d̃ γ̄(u) d̃⁻¹ = γ̄(d u d⁻¹)
    let gu = gamma_bar(&s.u)?;
    let vi = gu.matrix.conjugate_by(&tilde)? == gamma_bar(&chi_u)?.matrix;
    // (vii), (viii)
    let (phi0, b) = (gu.linear_part(), gu.translation());
    let (phi0_chi, b_chi) = phi0_and_b(&chi_u)?;
    let vii = phi0.conjugate_by(&star)? == phi0_chi;
    let viii = star.mul_vec(&b)? == b_chi;
    // (ix) d̄ φ̄(u) d̄⁻¹ = φ̄(d u d⁻¹) with d̄ = φ̄(d)
    let dbar = phi_bar_diagonal(q);
    let ix = phi_bar_unipotent(&s.u)?.conjugate_by(&dbar)? == phi_bar_unipotent(&chi_u)?;
    // (x) isomorphism evidence
    let x = isomorphism_evidence(&TStarElem::new(s.u.clone(), q.clone())?, &s.other)?;
    debug_assert_eq!(n, s.x.dim());
    Ok([i, ii, iii, iv, v, vi, vii, viii, ix, x])
}

/// Multiplicativity and injectivity of `φ̄` on a pair, plus triviality of
/// `φ̄(U) ∩ φ̄(D)` on the factors of `g`.
fn isomorphism_evidence(g: &TStarElem, h: &TStarElem) -> Result<bool> {
    let pg = phi_bar(g)?;
    let ph = phi_bar(h)?;
    let multiplicative = phi_bar(&g.mul(h)?)? == pg.mul(&ph)?;
    let injective = (pg == ph) == (g == h) && (pg.is_identity() == g.is_identity());
    let pu = phi_bar_unipotent(&g.u)?;
    let pd = phi_bar_diagonal(&g.d);
    let disjoint = pu != pd || (g.u.is_identity() && g.d.iter().all(Rat::is_zero));
    let inverse = phi_bar(&g.inverse()?)? == pg.upper_inverse()?;
    Ok(multiplicative && injective && disjoint && inverse)
}

/// Pass counts per identity tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TenLemmaReport {
    pub samples: usize,
    pub passes: std::collections::BTreeMap<String, usize>,
}

/// Checks all ten identities on `samples` random draws with `n = dim`.
///
/// Any failure is an implementation defect and is returned as
/// [`Error::IdentityViolation`] with the offending sample.
pub fn verify_ten_lemma(dim: usize, samples: usize, seed: u64) -> Result<TenLemmaReport> {
    if samples == 0 {
        return Err(Error::ConfigInvalid("samples must be at least 1".into()));
    }
    let mut passes: std::collections::BTreeMap<String, usize> =
        IDENTITY_TAGS.iter().map(|t| (t.to_string(), 0)).collect();
    for trial in 0..samples as u64 {
        let mut rng = sample::trial_rng(seed, "ten-lemma", trial);
        let s = LemmaSample::random(&mut rng, dim);
        let verdicts = check_ten_identities(&s)?;
        for (tag, ok) in IDENTITY_TAGS.iter().zip(verdicts) {
            if !ok {
                return Err(Error::IdentityViolation {
                    tag: tag.to_string(),
                    witness: format!("seed {seed} trial {trial}: u = {:?}, q = {:?}", s.u, s.q),
                });
            }
            *passes.get_mut(*tag).expect("known tag") += 1;
        }
    }
    Ok(TenLemmaReport { samples, passes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    #[test]
    fn d_star_identity_for_trivial_diagonal() {
        assert_eq!(d_star(&vec![Rat::zero(); 4]), TriMat::identity(6));
    }

    #[test]
    fn d_star_block_layout() {
        let q: Vec<Rat> = vec![r(1, 1), r(2, 1), r(3, 1), r(5, 1)];
        let e = |a: &Rat, b: &Rat| ExpSum::exp(a - b);
        let expected = TriMat::diagonal(vec![
            e(&q[0], &q[3]),
            e(&q[0], &q[2]),
            e(&q[1], &q[3]),
            e(&q[0], &q[1]),
            e(&q[1], &q[2]),
            e(&q[2], &q[3]),
        ]);
        assert_eq!(d_star(&q), expected);
    }

    #[test]
    fn phi_bar_of_e_on_first_coordinate() {
        let q = vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)];
        let pb = phi_bar(&TStarElem::diagonal(q)).unwrap();
        let e1 = ExpSum::exp(r(1, 1));
        let diag: Vec<ExpSum> = (0..6).map(|i| pb.get(i, i).clone()).collect();
        assert_eq!(
            diag,
            vec![
                e1.clone(),
                e1.clone(),
                ExpSum::one(),
                e1,
                ExpSum::one(),
                ExpSum::one()
            ]
        );
        let log_col: Vec<ExpSum> = (6..10).map(|i| pb.get(i, 10).clone()).collect();
        assert_eq!(
            log_col,
            vec![
                ExpSum::one(),
                ExpSum::zero(),
                ExpSum::zero(),
                ExpSum::zero()
            ]
        );
    }

    #[test]
    fn phi_bar_identity() {
        assert_eq!(
            phi_bar(&TStarElem::identity(4)).unwrap(),
            TriMat::identity(11)
        );
    }

    #[test]
    fn group_law_matches_matrices() {
        let mut rng = sample::trial_rng(3, "tstar-group", 0);
        for _ in 0..5 {
            let g = TStarElem::random(&mut rng, 3);
            let h = TStarElem::random(&mut rng, 3);
            let gh = g.mul(&h).unwrap();
            assert_eq!(gh.to_matrix(), g.to_matrix().mul(&h.to_matrix()).unwrap());
            assert!(g.mul(&g.inverse().unwrap()).unwrap().is_identity());
        }
    }

    #[test]
    fn trivial_sample_passes() {
        assert_eq!(
            check_ten_identities(&LemmaSample::trivial(4)).unwrap(),
            [true; 10]
        );
    }

    #[test]
    fn essentially_free_edge_cases() {
        let diag = TStarElem::diagonal(vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)]);
        assert!(tstar_essentially_free(&diag).unwrap());
        let mut u = TriMat::<ExpSum>::identity(4);
        u.set(1, 2, ExpSum::exp(r(1, 2)));
        assert!(tstar_essentially_free(&TStarElem::unipotent(u).unwrap()).unwrap());
        assert_eq!(
            tstar_essentially_free(&TStarElem::identity(4)),
            Err(Error::IdentityInput)
        );
    }

    #[test]
    fn multiplier_table_n4() {
        let mut rng = sample::trial_rng(5, "multiplier", 0);
        let q: Vec<Rat> = (0..4).map(|_| sample::rational(&mut rng)).collect();
        let x = random_strict_upper(&mut rng, 4);
        let before = lambda(&x).unwrap();
        let after = lambda(&conjugate_by_diag(&q, &x).unwrap()).unwrap();
        for rho in 1..=6 {
            for sigma in 1..=6 {
                let scaled = before.get(rho - 1, sigma - 1).clone()
                    * lambda_conjugation_multiplier(&q, rho, sigma);
                assert_eq!(
                    &scaled,
                    after.get(rho - 1, sigma - 1),
                    "entry ({rho},{sigma})"
                );
            }
        }
    }

    #[test]
    fn json_field_names() {
        let g = TStarElem::diagonal(vec![r(1, 2), r(0, 1)]);
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["diag_exponents"][0], "1/2");
        assert_eq!(v["n"], 2);
        assert!(v["u"]["entries"].is_array());
    }
}
