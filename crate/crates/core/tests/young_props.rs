use parametrix_core::young::{boyd_indices, check_delta2, complementary, default_conjugate_grid, YoungFunction};
use proptest::prelude::*;

fn pair(p: f64) -> (YoungFunction, YoungFunction) {
    let m = YoungFunction::power(p, 1.0 / p).unwrap();
    let n = m.conjugate().unwrap();
    (m, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn youngs_inequality(p in 1.2f64..5.0, lu in -3.0f64..3.0, lv in -3.0f64..3.0) {
        let (m, n) = pair(p);
        let (u, v) = (10f64.powf(lu), 10f64.powf(lv));
        prop_assert!(u * v <= m.evaluate(u) + n.evaluate(v) + 1e-9 * (1.0 + u * v));
    }

    #[test]
    fn power_conjugate_matches_closed_form(p in 1.3f64..4.5, lv in -2.0f64..2.0) {
        let (_, n) = pair(p);
        let q = p / (p - 1.0);
        let v = 10f64.powf(lv);
        let exact = v.powf(q) / q;
        prop_assert!((n.evaluate(v) - exact).abs() <= 1e-6 * exact);
    }

    #[test]
    fn delta2_constant_of_power_is_two_to_p(p in 1.2f64..6.0) {
        let m = YoungFunction::power(p, 1.0).unwrap();
        let d = check_delta2(&m, 1.0, 1e6).unwrap();
        prop_assert!(d.satisfied);
        prop_assert!((d.k_hat - 2f64.powf(p)).abs() <= 1e-10 * d.k_hat);
    }
}

#[test]
fn biconjugate_returns_original() {
    for m in [YoungFunction::power(2.5, 1.0).unwrap(), YoungFunction::power_log(2.0, 1.0).unwrap()] {
        let n = m.conjugate().unwrap();
        let mm = complementary(&n, &default_conjugate_grid(&n)).unwrap();
        for k in 0..=40 {
            let u = 10f64.powf(-2.0 + 4.0 * k as f64 / 40.0);
            let (a, b) = (m.evaluate(u), mm.evaluate(u));
            assert!((a - b).abs() <= 1e-5 * a, "{} at {u}: {a} vs {b}", m.label());
        }
    }
}

#[test]
fn complementary_density_is_generalised_inverse() {
    let m = YoungFunction::power_log(2.0, 1.0).unwrap();
    let n = m.conjugate().unwrap();
    for k in 0..=20 {
        let s = 10f64.powf(-1.0 + 3.0 * k as f64 / 20.0);
        // q(s) = sup{t : p(t) ≤ s}, by bisection on the increasing density
        let (mut lo, mut hi) = (0.0, 1.0);
        while m.density(hi) <= s {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m.density(mid) <= s { lo = mid } else { hi = mid }
        }
        assert!((n.density(s) - lo).abs() <= 1e-4 * lo, "s = {s}: {} vs {lo}", n.density(s));
    }
}

#[test]
fn boyd_estimates_are_ordered() {
    for m in [
        YoungFunction::power(1.5, 1.0).unwrap(),
        YoungFunction::power(3.0, 2.0).unwrap(),
        YoungFunction::power_log(2.0, 1.0).unwrap(),
        YoungFunction::power_log(1.4, 0.5).unwrap(),
    ] {
        let b = boyd_indices(&m).unwrap();
        assert!(0.0 <= b.alpha && b.alpha <= b.beta && b.beta <= 1.0, "{}: {} {}", m.label(), b.alpha, b.beta);
    }
}
