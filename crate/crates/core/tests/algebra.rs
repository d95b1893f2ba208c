use std::cmp::Ordering;

use affine_lambda::matrix::{nilpotent_exp, unipotent_log};
use affine_lambda::order::{Column, IndexSpace, LexSpace, Line, OrderedGroup, RealLine};
use affine_lambda::{ExpSum, Rat, Sign, TriMat};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| Rat::frac(p, q))
}

fn expsum() -> impl Strategy<Value = ExpSum> {
    prop::collection::vec((rat(), (-6i64..=6, 1i64..=3)), 0..4).prop_map(|terms| {
        ExpSum::from_terms(terms.into_iter().map(|(c, (p, q))| (c, Rat::frac(p, q))))
    })
}

fn strict_upper(n: usize) -> impl Strategy<Value = TriMat<Rat>> {
    prop::collection::vec(rat(), n * (n - 1) / 2).prop_map(move |v| {
        let mut it = v.into_iter();
        TriMat::from_fn(n, |i, j| {
            if j > i {
                it.next().unwrap()
            } else {
                Rat::zero()
            }
        })
    })
}

proptest! {
    #[test]
    fn rat_field_axioms(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rat::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Rat::one());
        }
    }

    #[test]
    fn rat_order_is_translation_invariant(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(a.cmp(&b), (&a + &c).cmp(&(&b + &c)));
    }

    #[test]
    fn expsum_ring_axioms(a in expsum(), b in expsum(), c in expsum()) {
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!(a.clone() - a.clone(), ExpSum::zero());
    }

    #[test]
    fn expsum_sign_matches_float_when_clear(a in expsum()) {
        let s = a.sign(64).unwrap();
        let f = a.approx_f64();
        if f.abs() > 1e-6 {
            prop_assert_eq!(s, if f > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        prop_assert_eq!((-a.clone()).sign(64).unwrap(), s.flip());
    }

    #[test]
    fn expsum_order_is_translation_invariant(a in expsum(), b in expsum(), c in expsum()) {
        let line = RealLine::default();
        prop_assert_eq!(
            line.compare(&a, &b).unwrap(),
            line.compare(&line.add(&a, &c).unwrap(), &line.add(&b, &c).unwrap()).unwrap()
        );
    }

    #[test]
    fn column_order_is_total_and_invariant(
        a in prop::collection::vec(rat(), 3),
        b in prop::collection::vec(rat(), 3),
        c in prop::collection::vec(rat(), 3),
    ) {
        let col = Column::new(3, Line::RATIONALS);
        let ab = col.compare(&a, &b).unwrap();
        prop_assert_eq!(ab, col.compare(&b, &a).unwrap().reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        prop_assert_eq!(ab, col.compare(&col.add(&a, &c).unwrap(), &col.add(&b, &c).unwrap()).unwrap());
    }

    #[test]
    fn lex_order_is_transitive(
        a in prop::collection::vec((-4i64..4, rat()), 0..5),
        b in prop::collection::vec((-4i64..4, rat()), 0..5),
        c in prop::collection::vec((-4i64..4, rat()), 0..5),
    ) {
        let space = LexSpace::new(IndexSpace::Integers, Line::RATIONALS);
        let mk = |v: Vec<(i64, Rat)>| {
            let mut m = std::collections::BTreeMap::new();
            for (k, x) in v {
                m.insert(k, x);
            }
            space.vector(m.into_iter().map(|(k, x)| (Rat::int(k), x))).unwrap()
        };
        let (a, b, c) = (mk(a), mk(b), mk(c));
        let le = |x, y| space.compare(x, y).unwrap() != Ordering::Greater;
        if le(&a, &b) && le(&b, &c) {
            prop_assert!(le(&a, &c));
        }
    }

    #[test]
    fn exp_and_log_are_inverse(x in strict_upper(4)) {
        let g = nilpotent_exp(&x).unwrap();
        prop_assert!(g.is_unitriangular());
        prop_assert_eq!(unipotent_log(&g).unwrap(), x);
    }
}
