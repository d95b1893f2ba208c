//! Diagonal conjugation of a finite set of rational unitriangular matrices
//! into integer matrices.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::TriMat;
use crate::scalar::Rat;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integerized {
    /// Diagonal conjugator `P`.
    pub p: TriMat<Rat>,
    /// `P·A·P⁻¹` for each input `A`, in input order.
    pub conjugates: Vec<TriMat<Rat>>,
}

/// Finds a diagonal `P` with every `P·A·P⁻¹` integral.
///
/// `d_i` is the lcm of the denominators in row `i` over all generators,
/// `d̄_i = Π_{j≥i} d_j`, and `P = diag(d̄_1, …, d̄_n)`. Conjugation scales
/// entry `(i, j)` by `d̄_i/d̄_j = d_i ⋯ d_{j−1}`, which clears the denominator
/// of row `i`.
pub fn integerize(gens: &[TriMat<Rat>]) -> Result<Integerized> {
    let n = match gens.first() {
        Some(g) => g.dim(),
        None => {
            return Ok(Integerized {
                p: TriMat::identity(0),
                conjugates: Vec::new(),
            })
        }
    };
    for g in gens {
        if g.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.dim(),
            });
        }
        if !g.is_unitriangular() {
            return Err(Error::NotUnitriangular);
        }
    }
    for g in gens {
        let inv = g.upper_inverse()?;
        if !gens.contains(&inv) {
            return Err(Error::NotInverseClosed);
        }
    }
    let row_lcm: Vec<BigInt> = (0..n)
        .map(|i| {
            Rat::lcm_of_denominators(gens.iter().flat_map(|g| (i..n).map(move |j| g.get(i, j))))
        })
        .collect();
    let mut suffix = vec![BigInt::one(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = &suffix[i + 1] * &row_lcm[i];
    }
    let p = TriMat::diagonal(suffix[..n].iter().cloned().map(Rat::int).collect());
    let conjugates = gens
        .iter()
        .map(|g| g.conjugate_by(&p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Integerized { p, conjugates })
}

pub fn is_integral(m: &TriMat<Rat>) -> bool {
    (0..m.dim()).all(|i| (0..m.dim()).all(|j| m.get(i, j).is_integer()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(v: Rat) -> TriMat<Rat> {
        TriMat::from_rows(vec![vec![Rat::one(), v], vec![Rat::zero(), Rat::one()]]).unwrap()
    }

    #[test]
    fn half_shear() {
        let gens = [two_by_two(Rat::frac(1, 2)), two_by_two(Rat::frac(-1, 2))];
        let out = integerize(&gens).unwrap();
        assert_eq!(out.p, TriMat::diagonal(vec![Rat::int(2), Rat::int(1)]));
        assert_eq!(out.conjugates[0], two_by_two(Rat::int(1)));
        assert_eq!(out.conjugates[1], two_by_two(Rat::int(-1)));
    }

    #[test]
    fn integer_input_needs_no_scaling() {
        let gens = [two_by_two(Rat::int(3)), two_by_two(Rat::int(-3))];
        let out = integerize(&gens).unwrap();
        assert_eq!(out.p, TriMat::identity(2));
        assert_eq!(out.conjugates, gens.to_vec());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            integerize(&[two_by_two(Rat::frac(1, 2))]),
            Err(Error::NotInverseClosed)
        );
        let mut not_uni = two_by_two(Rat::zero());
        not_uni.set(0, 0, Rat::int(2));
        assert_eq!(integerize(&[not_uni]), Err(Error::NotUnitriangular));
    }

    #[test]
    fn three_by_three_chain() {
        let mut a = TriMat::<Rat>::identity(3);
        a.set(0, 1, Rat::frac(1, 3));
        a.set(1, 2, Rat::frac(1, 5));
        a.set(0, 2, Rat::frac(1, 7));
        let gens = [a.clone(), a.upper_inverse().unwrap()];
        let out = integerize(&gens).unwrap();
        assert!(out
            .conjugates
            .iter()
            .all(|c| is_integral(c) && c.is_unitriangular()));
    }
}
