use ainfty::derived::*;
use ainfty::models::weyl::{WeylConfig, WeylModel};
use ainfty::operator::MultiOperator;
use ainfty::random::random_monomial_operator;
use ainfty::report::check_equal;

fn setup() -> (WeylModel, Vec<MultiOperator>) {
    let w = WeylModel::new(WeylConfig::default()).unwrap();
    let ops = vec![
        random_monomial_operator(&w.space, 1, 0, &[1, 2]),
        random_monomial_operator(&w.space, 2, 1, &[1, 2]),
        random_monomial_operator(&w.space, 3, -1, &[0, 1]),
    ];
    (w, ops)
}

#[test]
fn getzler_lift_is_flat() {
    let (w, ops) = setup();
    let bank = w.bank(0..=4);
    for n in 0..=3 {
        let rep = getzler_check(&w.m, &ops[..n], &bank).unwrap();
        assert!(rep.is_ok(), "n={n}: {:?}", rep.failures.first());
    }
}

#[test]
fn cup_identities() {
    let (w, ops) = setup();
    let (a, b, c) = (&ops[0], &ops[1], &ops[2]);
    let bank = w.bank(0..=4);
    for (x, y) in [(a, b), (b, c), (c, a)] {
        assert!(cup_comm_check(&w.m, x, y, &bank).unwrap().is_ok());
        assert!(m12_check(&w.m, x, y, &bank).unwrap().is_ok());
    }
    assert!(cup_assoc_check(&w.m, a, b, c, &bank).unwrap().is_ok());
    assert!(cup_assoc_check(&w.m, c, a, b, &bank).unwrap().is_ok());
    assert!(poisson_check(&w.m, a, b, c, &bank).unwrap().is_ok());
    assert!(poisson_check(&w.m, b, c, a, &bank).unwrap().is_ok());
}

#[test]
fn m1_squares_to_zero_and_cup_sign() {
    let (w, ops) = setup();
    let bank = w.bank(0..=4);
    for a in &ops {
        let m1 = derived_m1(&w.m, a).unwrap();
        assert_eq!(m1.degree(), a.degree() + 1);
        let mm = derived_m1(&w.m, &m1).unwrap();
        assert!(ainfty::report::check_vanishes("m1m1", &mm, &bank).unwrap().is_ok());
    }
    // A ∪ B = (−1)^{|A|−1} M_2(A, B)
    let (a, b) = (&ops[1], &ops[0]);
    let cup_ab = cup(&w.m, a, b).unwrap();
    let m2 = derived_mk(&w.m, &[a.clone(), b.clone()]).unwrap();
    assert!(check_equal("cup", &cup_ab, &m2, &bank).unwrap().is_ok());
    let (a, b) = (&ops[0], &ops[1]);
    let cup_ab = cup(&w.m, a, b).unwrap();
    let m2 = derived_mk(&w.m, &[a.clone(), b.clone()]).unwrap().neg();
    assert!(check_equal("cup", &cup_ab, &m2, &bank).unwrap().is_ok());
}

#[test]
fn residuals_detect_a_curved_structure() {
    let (w, ops) = setup();
    let bank = w.bank(0..=3);
    let m = w.m.add(&random_monomial_operator(&w.space, 9, 1, &[2])).unwrap();
    assert!(!stasheff_check(&m, &bank).unwrap().is_ok());
    assert!(!getzler_check(&m, &ops[..2], &bank).unwrap().is_ok());
    assert!(!m12_check(&m, &ops[0], &ops[1], &bank).unwrap().is_ok());
    assert!(!cup_assoc_check(&m, &ops[0], &ops[1], &ops[2], &bank).unwrap().is_ok());
}
