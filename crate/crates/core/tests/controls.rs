//! Negative controls: the checks must reject actions that are not free.

use affine_lambda::affine::{check_free_and_rigid, AffineAut, AffineGroup, MatrixGroup};
use affine_lambda::harness::run_check;
use affine_lambda::order::Line;
use affine_lambda::wreath::Wreath;
use affine_lambda::{Rat, TriMat};

fn shear() -> AffineAut<Rat> {
    let m = TriMat::from_rows(vec![
        vec![Rat::one(), Rat::one(), Rat::zero()],
        vec![Rat::zero(), Rat::one(), Rat::zero()],
        vec![Rat::zero(), Rat::zero(), Rat::one()],
    ])
    .unwrap();
    AffineAut::from_affine_matrix(&m, 64).unwrap()
}

#[test]
fn shear_fixes_the_origin() {
    let group = MatrixGroup::unitriangular(2);
    let report = check_free_and_rigid(&group, &shear(), 10, 0).unwrap();
    assert_eq!(report.certified, Some(false));
    assert!(!report.passed());
}

#[test]
fn wreath_over_non_free_fiber_is_caught() {
    let w = Wreath::new(MatrixGroup::unitriangular(2), Line::INTEGERS);
    let g = w.element(Rat::zero(), [(Rat::int(3), shear())]).unwrap();
    let report = check_free_and_rigid(&w, &g, 20, 7).unwrap();
    assert_eq!(report.certified, None);
    assert!(report.witness.unwrap().contains("fixed point"));
}

#[test]
fn shifted_wreath_element_stays_free() {
    let w = Wreath::new(MatrixGroup::unitriangular(2), Line::INTEGERS);
    let g = w.element(Rat::int(1), [(Rat::int(3), shear())]).unwrap();
    let report = check_free_and_rigid(&w, &g, 20, 7).unwrap();
    assert_eq!(report.certified, Some(true));
    assert!(report.passed());
}

#[test]
fn harness_counts_failing_trials() {
    let w = Wreath::new(MatrixGroup::unitriangular(2), Line::INTEGERS);
    let result = run_check(
        "control/non-free",
        "fixed points are reported",
        5,
        12,
        |_, t| {
            let g = w.element(Rat::zero(), [(Rat::int(t as i64), shear())])?;
            let report = check_free_and_rigid(&w, &g, 5, t)?;
            Ok(report.witness)
        },
    );
    assert_eq!(result.failures, 12);
    assert!(result.witness.unwrap().starts_with("seed 5, trial 0:"));
}

#[test]
fn identity_is_rejected() {
    let group = MatrixGroup::unitriangular(2);
    assert!(check_free_and_rigid(&group, &group.identity(), 5, 0).is_err());
}
