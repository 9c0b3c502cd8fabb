mod oracles;

use medbw_core::special::{
    bessel_i, gamma, lower_incomplete_gamma, marcum_q, regularized_lower_gamma,
};
use oracles::{bessel_i_series, lower_gamma_quadrature, marcum_q_quadrature};
use proptest::prelude::*;

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

#[test]
fn lower_gamma_matches_quadrature_grid() {
    for &a in &[0.5, 1.0, 2.0] {
        for &x in &[0.1, 1.0, 10.0] {
            let got = lower_incomplete_gamma(a, x).unwrap();
            let want = lower_gamma_quadrature(a, x);
            assert!(rel_err(got, want) <= 1e-8, "γ({a}, {x}) = {got}, oracle {want}");
        }
    }
}

#[test]
fn lower_gamma_examples() {
    let v = lower_incomplete_gamma(1.0, 2.0).unwrap();
    assert!((v - (1.0 - (-2.0_f64).exp())).abs() < 1e-15);
    assert_eq!(lower_incomplete_gamma(0.5, 0.0).unwrap(), 0.0);
    assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
    assert!(lower_incomplete_gamma(1.0, -1.0).is_err());
    let big = lower_incomplete_gamma(0.5, 800.0).unwrap();
    assert!(rel_err(big, gamma(0.5)) < 1e-15);
}

#[test]
fn bessel_minus_half_matches_cosh_identity() {
    let mut x = 0.01;
    while x <= 30.0 {
        let got = bessel_i(-0.5, x).unwrap() * (std::f64::consts::PI * x / 2.0).sqrt();
        assert!(rel_err(got, x.cosh()) <= 1e-10, "x = {x}");
        x += 0.37;
    }
    let at_one = bessel_i(-0.5, 1.0).unwrap();
    assert!((at_one - 1.231_200_214_592_96).abs() < 1e-12);
}

#[test]
fn bessel_matches_series_oracle() {
    for &(order, x) in &[(-0.5, 3.0), (-0.5, 0.2), (0.0, 2.5), (0.5, 7.0), (1.5, 12.0)] {
        let got = bessel_i(order, x).unwrap();
        let want = bessel_i_series(order, x);
        assert!(rel_err(got, want) <= 1e-10, "I_{order}({x}) = {got}, oracle {want}");
    }
    assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
    assert!(bessel_i(0.0, -1.0).is_err());
}

#[test]
fn marcum_half_order_matches_defining_integral() {
    for &a in &[0.0, 1.0, 3.0] {
        for &b in &[0.1, 1.0, 5.0] {
            let got = marcum_q(0.5, a, b).unwrap();
            let want = marcum_q_quadrature(0.5, if a == 0.0 { 1e-9 } else { a }, b);
            assert!(rel_err(got, want) <= 1e-8, "Q(0.5, {a}, {b}) = {got}, oracle {want}");
        }
    }
    assert_eq!(marcum_q(0.5, 2.0, 0.0).unwrap(), 1.0);
    assert!(marcum_q(0.5, -1.0, 1.0).is_err());
    assert!(marcum_q(0.5, 1.0, -1.0).is_err());
}

#[test]
fn marcum_general_order_matches_defining_integral() {
    for &m in &[1.0, 1.5, 2.0] {
        for &(a, b) in &[(1.0, 0.5), (1.0, 2.0), (2.5, 3.0), (0.5, 4.0)] {
            let got = marcum_q(m, a, b).unwrap();
            let want = marcum_q_quadrature(m, a, b);
            assert!(rel_err(got, want) <= 1e-8, "Q({m}, {a}, {b}) = {got}, oracle {want}");
        }
    }
}

proptest! {
    #[test]
    fn regularized_lower_gamma_is_a_cdf(a in 0.05f64..20.0, x in 0.0f64..50.0, dx in 0.0f64..5.0) {
        let lo = regularized_lower_gamma(a, x).unwrap();
        let hi = regularized_lower_gamma(a, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-15);
    }

    #[test]
    fn marcum_is_a_survival_function(m in 0.5f64..3.0, a in 0.0f64..6.0, b in 0.0f64..12.0, db in 0.0f64..3.0) {
        let q0 = marcum_q(m, a, b).unwrap();
        let q1 = marcum_q(m, a, b + db).unwrap();
        prop_assert!((0.0..=1.0).contains(&q0));
        prop_assert!(q1 <= q0 + 1e-14);
        prop_assert_eq!(marcum_q(m, a, 0.0).unwrap(), 1.0);
    }
}

#[test]
fn marcum_tail_vanishes() {
    assert!(marcum_q(0.5, 1.0, 60.0).unwrap() < 1e-300);
    assert!(marcum_q(2.0, 1.0, 60.0).unwrap() < 1e-300);
}
