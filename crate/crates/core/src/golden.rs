//! Hand-written `n = 4` formulas for the product, `λ`, `dγ̄`, `log` and `γ̄`,
//! evaluated at concrete rationals. They are typed in independently of the
//! general construction and serve as fixed reference values for it.

use crate::matrix::TriMat;
use crate::scalar::Rat;

/// Entries `x_ij` of a strictly upper triangular `4×4` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Ut4 {
    pub x12: Rat,
    pub x13: Rat,
    pub x14: Rat,
    pub x23: Rat,
    pub x24: Rat,
    pub x34: Rat,
}

impl Ut4 {
    pub fn from_matrix(x: &TriMat<Rat>) -> Ut4 {
        assert_eq!(x.dim(), 4);
        let e = |i: usize, j: usize| x.get(i - 1, j - 1).clone();
        Ut4 {
            x12: e(1, 2),
            x13: e(1, 3),
            x14: e(1, 4),
            x23: e(2, 3),
            x24: e(2, 4),
            x34: e(3, 4),
        }
    }
}

/// The six entries `a, …, f` of
///
/// ```text
///     | 1 c e f |
/// A = | 0 1 b d |
///     | 0 0 1 a |
///     | 0 0 0 1 |
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct Slots {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
    pub e: Rat,
    pub f: Rat,
}

fn q(p: i64, d: i64) -> Rat {
    Rat::frac(p, d)
}

fn z() -> Rat {
    Rat::zero()
}

fn o() -> Rat {
    Rat::one()
}

fn matrix(rows: Vec<Vec<Rat>>) -> TriMat<Rat> {
    TriMat::from_rows(rows).expect("square template")
}

pub fn example_a(s: &Slots) -> TriMat<Rat> {
    let Slots { a, b, c, d, e, f } = s.clone();
    matrix(vec![
        vec![o(), c, e, f],
        vec![z(), o(), b, d],
        vec![z(), z(), o(), a],
        vec![z(), z(), z(), o()],
    ])
}

/// `x·y`.
pub fn product(x: &Ut4, y: &Ut4) -> TriMat<Rat> {
    let e13 = q(1, 2) * (&x.x12 * &y.x23 - &y.x12 * &x.x23);
    let e14 = q(2, 3) * (&x.x12 * &y.x24 - &y.x13 * &x.x34)
        + q(1, 3) * (&x.x13 * &y.x34 - &y.x12 * &x.x24);
    let e24 = q(1, 2) * (&x.x23 * &y.x34 - &y.x23 * &x.x34);
    matrix(vec![
        vec![z(), z(), e13, e14],
        vec![z(), z(), z(), e24],
        vec![z(), z(), z(), z()],
        vec![z(), z(), z(), z()],
    ])
}

/// `λ(x)` in the coordinates `(y14, y13, y24, y12, y23, y34)`.
pub fn lambda(x: &Ut4) -> TriMat<Rat> {
    let mut rows = vec![vec![z(); 6]; 6];
    rows[0][1] = q(-2, 3) * x.x34.clone();
    rows[0][2] = q(2, 3) * x.x12.clone();
    rows[0][3] = q(-1, 3) * x.x24.clone();
    rows[0][5] = q(1, 3) * x.x13.clone();
    rows[1][3] = q(-1, 2) * x.x23.clone();
    rows[1][4] = q(1, 2) * x.x12.clone();
    rows[2][4] = q(-1, 2) * x.x34.clone();
    rows[2][5] = q(1, 2) * x.x23.clone();
    matrix(rows)
}

pub fn t_column(x: &Ut4) -> Vec<Rat> {
    vec![
        x.x14.clone(),
        x.x13.clone(),
        x.x24.clone(),
        x.x12.clone(),
        x.x23.clone(),
        x.x34.clone(),
    ]
}

/// `dγ̄(x)`: `λ(x)` with the column `t(x)` and a zero row adjoined.
pub fn dgamma(x: &Ut4) -> TriMat<Rat> {
    let lam = lambda(x);
    let t = t_column(x);
    TriMat::from_fn(7, |i, j| {
        if i == 6 {
            z()
        } else if j == 6 {
            t[i].clone()
        } else {
            lam.get(i, j).clone()
        }
    })
}

pub fn log_a(s: &Slots) -> TriMat<Rat> {
    let Slots { a, b, c, d, e, f } = s.clone();
    let x13 = &e - &(q(1, 2) * &b * &c);
    let x14 = &f - &(q(1, 2) * &c * &d) - q(1, 2) * &a * &e + q(1, 3) * &a * &b * &c;
    let x24 = &d - &(q(1, 2) * &a * &b);
    matrix(vec![
        vec![z(), c, x13, x14],
        vec![z(), z(), b, x24],
        vec![z(), z(), z(), a],
        vec![z(), z(), z(), z()],
    ])
}

/// `γ̄(A)`.
pub fn gamma_bar(s: &Slots) -> TriMat<Rat> {
    let Slots { a, b, c, d, e, f } = s.clone();
    let row1 = vec![
        o(),
        q(-2, 3) * &a,
        q(2, 3) * &c,
        q(-1, 3) * &d + q(1, 3) * &a * &b,
        q(-1, 3) * &a * &c,
        q(1, 3) * &e,
        &f - &(q(1, 3) * &c * &d) - q(2, 3) * &a * &e + q(1, 3) * &a * &b * &c,
    ];
    let row2 = vec![
        z(),
        o(),
        z(),
        q(-1, 2) * &b,
        q(1, 2) * &c,
        z(),
        &e - &(q(1, 2) * &b * &c),
    ];
    let row3 = vec![
        z(),
        z(),
        o(),
        z(),
        q(-1, 2) * &a,
        q(1, 2) * &b,
        &d - &(q(1, 2) * &a * &b),
    ];
    let unit_row = |k: usize, last: &Rat| {
        let mut r = vec![z(); 7];
        r[k] = o();
        r[6] = last.clone();
        r
    };
    let mut last = vec![z(); 7];
    last[6] = o();
    matrix(vec![
        row1,
        row2,
        row3,
        unit_row(3, &c),
        unit_row(4, &b),
        unit_row(5, &a),
        last,
    ])
}
