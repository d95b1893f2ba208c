//! Essential hyperbolicity of triangular affine matrices and the admissibility
//! certificate for the `γ̄` embedding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsa::{block_superdiagonals_vanish_below, dgamma, gamma_bar, lie_dim, SuperdiagDecomp};
use crate::matrix::{nilpotent_exp, TriMat};
use crate::scalar::Scalar;

fn check_affine_form<S: Scalar>(g: &TriMat<S>) -> Result<usize> {
    let dim = g.dim();
    if dim == 0 || !g.is_upper_triangular() || !g.get(dim - 1, dim - 1).is_one() {
        return Err(Error::NotAffineForm);
    }
    if g.is_identity() {
        return Err(Error::IdentityInput);
    }
    Ok(dim)
}

/// Decides whether a nontrivial affine matrix `g = (a_ij)` of dimension `D`
/// is essentially hyperbolic: for every row `i < D`, if `a_ii ≠ 1` or
/// `a_ij ≠ 0` for some `i < j < D`, then `a_kD ≠ 0` for some `i < k < D`.
///
/// Only exact zero tests on the scalars are used.
pub fn is_essentially_hyperbolic<S: Scalar>(g: &TriMat<S>) -> Result<bool> {
    let dim = check_affine_form(g)?;
    let last = dim - 1;
    // lowest row (0-based, excluding the affine row) with a nonzero translation entry
    let lowest_translation = (0..last).rev().find(|&k| !g.get(k, last).is_zero());
    for i in 0..last {
        let triggers = !g.get(i, i).is_one() || (i + 1..last).any(|j| !g.get(i, j).is_zero());
        if triggers && !matches!(lowest_translation, Some(k) if k > i) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The positional reading of essential hyperbolicity: the lowest nonzero
/// entry of `g − 1` lies in the last column and every other nonzero entry of
/// `g − 1` sits in a strictly higher row.
///
/// Kept separate from [`is_essentially_hyperbolic`] so the two can be compared.
pub fn lowest_entry_dominates<S: Scalar>(g: &TriMat<S>) -> Result<bool> {
    let dim = check_affine_form(g)?;
    let last = dim - 1;
    let nonzero_offset = |i: usize, j: usize| {
        let e = g.get(i, j);
        if i == j {
            !e.is_one()
        } else {
            !e.is_zero()
        }
    };
    let lowest_row = (0..dim)
        .rev()
        .find(|&i| (i..dim).any(|j| nonzero_offset(i, j)))
        .expect("non-identity matrix has a nonzero entry in g - 1");
    let row_entries: Vec<usize> = (lowest_row..dim)
        .filter(|&j| nonzero_offset(lowest_row, j))
        .collect();
    Ok(row_entries == [last])
}

/// Outcome of [`certify_admissible`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    /// Index of the lowest nonzero superdiagonal of `x`.
    pub i0: usize,
    /// Number of `λ(x)` blocks `(i, j)` with `j − i < i0` that were inspected.
    pub blocks_checked: usize,
    /// All inspected blocks vanish and the translation column is nonzero.
    pub blocks_clean: bool,
    /// `γ̄(exp x)` passed [`is_essentially_hyperbolic`].
    pub hyperbolic: bool,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.blocks_clean && self.hyperbolic
    }
}

/// Certifies a nonzero strictly upper triangular `x`: `dγ̄(x)` has a nonzero
/// translation column, its blocks below block-superdiagonal `i0` vanish, and
/// `γ̄(exp x)` is essentially hyperbolic.
pub fn certify_admissible<S: Scalar>(x: &TriMat<S>) -> Result<AdmissibilityReport> {
    let decomp = SuperdiagDecomp::decompose(x)?;
    let i0 = decomp.lowest_nonzero().ok_or(Error::ZeroInput)?;
    let n = x.dim();
    let m = lie_dim(n);
    let dg = dgamma(x)?;
    let blocks_checked = (1..n)
        .flat_map(|bi| (1..n).map(move |bj| (bi, bj)))
        .filter(|&(bi, bj)| bj < bi + i0)
        .count();
    let translation_nonzero = (0..m).any(|i| !dg.get(i, m).is_zero());
    let blocks_clean = translation_nonzero && block_superdiagonals_vanish_below(&dg, n, i0);
    let g = nilpotent_exp(x)?;
    let hyperbolic = is_essentially_hyperbolic(&gamma_bar(&g)?.matrix)?;
    Ok(AdmissibilityReport {
        i0,
        blocks_checked,
        blocks_clean,
        hyperbolic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn from_entries(n: usize, entries: &[(usize, usize, i64)]) -> TriMat<Rat> {
        let mut g = TriMat::identity(n);
        for &(i, j, v) in entries {
            g.set(i, j, Rat::int(v));
        }
        g
    }

    #[test]
    fn pure_translation_is_hyperbolic() {
        let g = from_entries(3, &[(0, 2, 1)]);
        assert!(is_essentially_hyperbolic(&g).unwrap());
        assert!(lowest_entry_dominates(&g).unwrap());
    }

    #[test]
    fn shear_without_translation_is_not() {
        let g = from_entries(3, &[(0, 1, 1)]);
        assert!(!is_essentially_hyperbolic(&g).unwrap());
        assert!(!lowest_entry_dominates(&g).unwrap());
    }

    #[test]
    fn dilation_with_fixed_point_is_not() {
        let g = from_entries(3, &[(1, 1, 2)]);
        assert!(!is_essentially_hyperbolic(&g).unwrap());
    }

    #[test]
    fn shear_with_lower_translation_is() {
        let g = from_entries(3, &[(0, 1, 1), (1, 2, 1)]);
        assert!(is_essentially_hyperbolic(&g).unwrap());
    }

    #[test]
    fn errors() {
        assert_eq!(
            is_essentially_hyperbolic(&TriMat::<Rat>::identity(3)),
            Err(Error::IdentityInput)
        );
        let mut bad = TriMat::<Rat>::identity(2);
        bad.set(1, 1, Rat::int(2));
        assert_eq!(is_essentially_hyperbolic(&bad), Err(Error::NotAffineForm));
        let mut lower = TriMat::<Rat>::identity(2);
        lower.set(1, 0, Rat::int(1));
        assert_eq!(is_essentially_hyperbolic(&lower), Err(Error::NotAffineForm));
    }

    #[test]
    fn certify_second_superdiagonal() {
        // only S_2 nonzero in n = 4
        let mut x = TriMat::<Rat>::zero(4);
        x.set(0, 2, Rat::int(3));
        x.set(1, 3, Rat::frac(-1, 2));
        let report = certify_admissible(&x).unwrap();
        assert_eq!(report.i0, 2);
        assert!(report.blocks_clean && report.hyperbolic);
        // blocks (i, j) in 1..=3 with j < i + 2
        assert_eq!(report.blocks_checked, 8);
    }

    #[test]
    fn certify_first_superdiagonal() {
        let mut x = TriMat::<Rat>::zero(4);
        x.set(2, 3, Rat::int(1));
        let report = certify_admissible(&x).unwrap();
        assert_eq!(report.i0, 1);
        assert!(report.passed());
        assert_eq!(
            certify_admissible(&TriMat::<Rat>::zero(4)),
            Err(Error::ZeroInput)
        );
    }
}
