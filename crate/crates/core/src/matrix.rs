//! Dense square matrices over an exact scalar ring, with the finite exponential
//! and logarithm series for nilpotent and unipotent triangular matrices.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar, Sign};

/// Square `n×n` matrix, row-major. Triangularity is a checked property, not a type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TriMat<S> {
    n: usize,
    entries: Vec<S>,
}

impl<S: Clone> TriMat<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(TriMat { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.entries[i * self.n + j] = value;
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.entries
            .chunks(self.n.max(1))
            .map(|r| r.to_vec())
            .take(self.n)
            .collect()
    }
}

impl<S: Scalar> TriMat<S> {
    pub fn zero(n: usize) -> Self {
        TriMat {
            n,
            entries: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn diagonal(diag: Vec<S>) -> Self {
        let mut m = Self::zero(diag.len());
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Elementary matrix with a single 1 at `(i, j)` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.set(i, j, S::one());
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        TriMat { n, entries }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TriMat<T> {
        TriMat {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(S::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_unitriangular(&self) -> bool {
        self.is_upper_triangular() && (0..self.n).all(|i| self.get(i, i).is_one())
    }

    pub fn is_strict_upper(&self) -> bool {
        self.is_upper_triangular() && (0..self.n).all(|i| self.get(i, i).is_zero())
    }

    pub fn has_positive_diagonal(&self, max_refinements: u32) -> Result<bool> {
        for i in 0..self.n {
            if self.get(i, i).sign(max_refinements)? != Sign::Positive {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    let acc = std::mem::replace(&mut out.entries[idx], S::zero());
                    out.entries[idx] = acc + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        TriMat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|e| c.clone() * e.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e.clone())
    }

    /// Matrix commutator `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| {
                (0..self.n).fold(S::zero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() || v[j].is_zero() {
                        acc
                    } else {
                        acc + a.clone() * v[j].clone()
                    }
                })
            })
            .collect())
    }

    /// `self^k` for `k ≥ 0`.
    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same dimension");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same dimension");
            }
        }
        result
    }

    /// Inverse of an upper triangular matrix whose diagonal entries are units,
    /// by back-substitution.
    pub fn upper_inverse(&self) -> Result<Self> {
        if !self.is_upper_triangular() {
            return Err(Error::NotAffineForm);
        }
        let n = self.n;
        let diag_inv: Vec<S> = (0..n)
            .map(|i| self.get(i, i).inverse().ok_or(Error::DivisionByZero))
            .collect::<Result<_>>()?;
        let mut inv = Self::zero(n);
        // column by column: solve self · x = e_j
        for j in 0..n {
            inv.set(j, j, diag_inv[j].clone());
            for i in (0..j).rev() {
                let mut acc = S::zero();
                for k in (i + 1)..=j {
                    let a = self.get(i, k);
                    let x = inv.get(k, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + a.clone() * x.clone();
                    }
                }
                inv.set(i, j, -(diag_inv[i].clone() * acc));
            }
        }
        Ok(inv)
    }

    /// `P · self · P⁻¹`.
    pub fn conjugate_by(&self, p: &Self) -> Result<Self> {
        p.mul(self)?.mul(&p.upper_inverse()?)
    }

    /// Top-left `k×k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        Self::from_fn(k, |i, j| self.get(i, j).clone())
    }
}

/// `exp(N) = Σ_{k=0}^{n-1} N^k / k!` for strictly upper triangular `N`.
///
/// The series is cut at `n−1` because `N^n = 0`; it stops earlier once a power vanishes.
pub fn nilpotent_exp<S: Scalar>(nil: &TriMat<S>) -> Result<TriMat<S>> {
    if !nil.is_strict_upper() {
        return Err(Error::NotStrictUpper);
    }
    let n = nil.dim();
    let mut result = TriMat::identity(n);
    let mut term = TriMat::identity(n);
    for k in 1..n {
        // term = N^k / k!
        term = term.mul(nil)?.scale(&S::from_rat(&Rat::frac(1, k as i64)));
        if term.is_zero() {
            break;
        }
        result = result.add(&term)?;
    }
    Ok(result)
}

/// `log(U) = Σ_{k=1}^{n-1} (−1)^{k+1} (U − I)^k / k` for unitriangular `U`.
pub fn unipotent_log<S: Scalar>(uni: &TriMat<S>) -> Result<TriMat<S>> {
    if !uni.is_unitriangular() {
        return Err(Error::NotUnitriangular);
    }
    let n = uni.dim();
    let b = uni.sub(&TriMat::identity(n))?;
    let mut result = TriMat::zero(n);
    let mut power = TriMat::identity(n);
    for k in 1..n {
        power = power.mul(&b)?;
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        result = result.add(&power.scale(&S::from_rat(&Rat::frac(sign, k as i64))))?;
    }
    Ok(result)
}

impl<S: fmt::Debug> fmt::Debug for TriMat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TriMat({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| format!("{:?}", self.entries[i * self.n + j]))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatRepr<S> {
    n: usize,
    entries: Vec<Vec<S>>,
}

impl<S: Clone + Serialize> Serialize for TriMat<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        MatRepr {
            n: self.n,
            entries: self.rows(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Clone + Deserialize<'de>> Deserialize<'de> for TriMat<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatRepr::<S>::deserialize(deserializer)?;
        if repr.entries.len() != repr.n {
            return Err(D::Error::custom(format!(
                "expected {} rows, found {}",
                repr.n,
                repr.entries.len()
            )));
        }
        TriMat::from_rows(repr.entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    fn mat(rows: &[&[Rat]]) -> TriMat<Rat> {
        TriMat::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let a = mat(&[&[r(1, 1), r(2, 3)], &[r(0, 1), r(5, 1)]]);
        assert_eq!(TriMat::identity(2).mul(&a).unwrap(), a);
        assert_eq!(a.mul(&TriMat::identity(2)).unwrap(), a);
    }

    #[test]
    fn elementary_product() {
        let e12 = TriMat::<Rat>::unit(3, 0, 1);
        let e23 = TriMat::<Rat>::unit(3, 1, 2);
        assert_eq!(e12.mul(&e23).unwrap(), TriMat::unit(3, 0, 2));
    }

    #[test]
    fn dimension_mismatch() {
        let a = TriMat::<Rat>::identity(2);
        let b = TriMat::<Rat>::identity(3);
        assert_eq!(
            a.mul(&b),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn predicates() {
        let u = mat(&[&[r(1, 1), r(7, 2)], &[r(0, 1), r(1, 1)]]);
        assert!(u.is_unitriangular() && u.is_upper_triangular() && !u.is_strict_upper());
        let s = mat(&[&[r(0, 1), r(7, 2)], &[r(0, 1), r(0, 1)]]);
        assert!(s.is_strict_upper() && !s.is_unitriangular());
        let low = mat(&[&[r(1, 1), r(0, 1)], &[r(1, 1), r(1, 1)]]);
        assert!(!low.is_upper_triangular());
        let neg = mat(&[&[r(-1, 1), r(0, 1)], &[r(0, 1), r(1, 1)]]);
        assert!(!neg.has_positive_diagonal(8).unwrap());
        assert!(u.has_positive_diagonal(8).unwrap());
    }

    #[test]
    fn exp_examples() {
        assert_eq!(
            nilpotent_exp(&TriMat::<Rat>::zero(3)).unwrap(),
            TriMat::identity(3)
        );
        let n2 = mat(&[&[r(0, 1), r(5, 7)], &[r(0, 1), r(0, 1)]]);
        assert_eq!(
            nilpotent_exp(&n2).unwrap(),
            mat(&[&[r(1, 1), r(5, 7)], &[r(0, 1), r(1, 1)]])
        );
        let n3 = TriMat::<Rat>::unit(3, 0, 1)
            .add(&TriMat::unit(3, 1, 2))
            .unwrap();
        assert_eq!(
            nilpotent_exp(&n3).unwrap(),
            mat(&[
                &[r(1, 1), r(1, 1), r(1, 2)],
                &[r(0, 1), r(1, 1), r(1, 1)],
                &[r(0, 1), r(0, 1), r(1, 1)],
            ])
        );
        assert_eq!(
            nilpotent_exp(&TriMat::<Rat>::identity(2)),
            Err(Error::NotStrictUpper)
        );
    }

    #[test]
    fn log_examples() {
        assert_eq!(
            unipotent_log(&TriMat::<Rat>::identity(4)).unwrap(),
            TriMat::zero(4)
        );
        assert_eq!(
            unipotent_log(&TriMat::<Rat>::zero(2)),
            Err(Error::NotUnitriangular)
        );
    }

    #[test]
    fn upper_inverse_of_unitriangular() {
        let a = mat(&[
            &[r(1, 1), r(2, 3), r(-1, 5)],
            &[r(0, 1), r(1, 1), r(4, 1)],
            &[r(0, 1), r(0, 1), r(1, 1)],
        ]);
        let inv = a.upper_inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), TriMat::identity(3));
        assert_eq!(inv.mul(&a).unwrap(), TriMat::identity(3));
    }

    #[test]
    fn json_shape() {
        let a = mat(&[&[r(1, 1), r(1, 2)], &[r(0, 1), r(1, 1)]]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"n":2,"entries":[["1/1","1/2"],["0/1","1/1"]]}"#);
        let back: TriMat<Rat> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<TriMat<Rat>>(r#"{"n":2,"entries":[["1"]]}"#).is_err());
    }
}
