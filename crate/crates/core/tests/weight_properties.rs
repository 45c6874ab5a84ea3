mod common;

use frac_pp::weights::{caputo_coeffs, centered_weights, wsgd_weights};
use proptest::prelude::*;
use statrs::function::gamma::gamma;

const LEN: usize = 1000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn centered_signs_decay_recurrence_and_tail(beta in 1.0f64..2.0) {
        prop_assume!(beta > 1.0);
        let g = centered_weights(beta, LEN).unwrap();
        let v = g.as_slice();
        prop_assert!(v[0] >= 0.0);
        prop_assert!(v[1..].iter().all(|x| *x <= 0.0));
        for j in 1..LEN - 1 {
            prop_assert!(v[j + 1].abs() < v[j].abs());
        }
        for j in 0..LEN - 1 {
            let ratio = 1.0 - (beta + 1.0) / (beta / 2.0 + j as f64 + 1.0);
            prop_assert_eq!(v[j + 1], ratio * v[j]);
        }
        let mut tail = 0.0;
        for x in &v[1..] {
            tail += 2.0 * x.abs();
            prop_assert!(tail < v[0]);
        }
    }

    #[test]
    fn wsgd_signs_decay_recurrence_and_tail(beta in 1.0f64..2.0) {
        prop_assume!(beta > 1.0);
        let t = wsgd_weights(beta, LEN).unwrap();
        let v = t.as_slice();
        let cos = (beta * std::f64::consts::PI / 2.0).cos();
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-14 * b.abs();
        prop_assert!(v[0] > 0.0);
        prop_assert!(rel(v[0], (2.0 - beta - beta * beta) / (2.0 * cos)));
        prop_assert!(rel(v[1], beta * (beta + 2.0) * (beta - 1.0) / (8.0 * cos)));
        prop_assert!(v[1..].iter().all(|x| *x <= 0.0));
        prop_assert!(v[1].abs() > v[2].abs());
        for j in 2..LEN - 1 {
            prop_assert!(v[j].abs() >= v[j + 1].abs());
        }
        let bb = beta * beta;
        for j in 2..LEN - 1 {
            let jf = j as f64;
            let ratio = ((jf - beta) * (beta + bb - 2.0 * (2.0 + jf))) / ((2.0 + jf) * (beta + bb - 2.0 * (1.0 + jf)));
            prop_assert_eq!(v[j + 1], ratio * v[j]);
        }
        let mut tail = 0.0;
        for x in &v[1..] {
            tail += 2.0 * x.abs();
            prop_assert!(tail < v[0]);
        }
    }

    #[test]
    fn wsgd_matches_shifted_grunwald_combination(beta in 1.0f64..2.0) {
        prop_assume!(beta > 1.0);
        let t = wsgd_weights(beta, 200).unwrap();
        let reference = common::wsgd_from_grunwald(beta, 200);
        for (a, b) in t.as_slice().iter().zip(&reference) {
            prop_assert!((a - b).abs() <= 1e-11 * b.abs().max(1e-300), "{a} vs {b}");
        }
    }

    #[test]
    fn centered_recurrence_matches_gamma_closed_form(beta in 1.0f64..2.0) {
        prop_assume!(beta > 1.0);
        let g = centered_weights(beta, 21).unwrap();
        for (j, &v) in g.as_slice().iter().enumerate() {
            let jf = j as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let closed = sign * gamma(beta + 1.0) / (gamma(beta / 2.0 - jf + 1.0) * gamma(beta / 2.0 + jf + 1.0));
            prop_assert!((v - closed).abs() <= 1e-12 * closed.abs(), "j={j}: {v} vs {closed}");
        }
    }

    #[test]
    fn caputo_decreasing_and_above_derivative_bound(alpha in 0.0f64..1.0) {
        prop_assume!(alpha > 1e-6);
        let b = caputo_coeffs(alpha, 10_000).unwrap();
        let v = b.as_slice();
        prop_assert_eq!(v[0], 1.0);
        for n in 0..v.len() - 1 {
            prop_assert!(v[n] > v[n + 1]);
        }
        for k in 1..=v.len() {
            prop_assert!(v[k - 1] > (1.0 - alpha) * (k as f64).powf(-alpha));
        }
        // definition against a direct evaluation, whose cancellation error
        // scales with the size of the subtracted powers
        for n in [1usize, 7, 500, 9_999] {
            let nf = n as f64;
            let big = (nf + 1.0).powf(1.0 - alpha);
            let direct = big - nf.powf(1.0 - alpha);
            prop_assert!((v[n] - direct).abs() <= 8.0 * f64::EPSILON * big);
        }
    }
}

#[test]
fn classical_order_tables_coincide() {
    let g = centered_weights(2.0, LEN).unwrap();
    let t = wsgd_weights(2.0, LEN).unwrap();
    assert_eq!(g.as_slice(), t.as_slice());
    assert_eq!(&g.as_slice()[..3], &[2.0, -1.0, 0.0]);
    assert!(g.as_slice()[2..].iter().all(|v| *v == 0.0));
}

#[test]
fn tail_margin_positive_for_long_tables() {
    for &beta in &[1.01, 1.1, 1.5, 1.9, 1.99] {
        assert!(centered_weights(beta, 10_001).unwrap().tail_margin() > 0.0);
        assert!(wsgd_weights(beta, 10_001).unwrap().tail_margin() > 0.0);
    }
}
