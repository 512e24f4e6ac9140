use parametrix_core::operator::{apply, Coefficient, EllipticOperator, MultiIndex};
use parametrix_core::parametrix::{estimate_sigma, ParametrixOperator, RADIUS_LADDER};
use parametrix_core::probes::{mollifier_bump, polynomial_bump};
use parametrix_core::young::YoungFunction;
use proptest::prelude::*;

fn operator(eps: f64, c0: f64) -> EllipticOperator {
    EllipticOperator::neg_laplacian(2)
        .scaled_plus(Coefficient::func(move |x| 1.0 + eps * x[0]), vec![(MultiIndex::new(&[0, 0]), Coefficient::Const(c0))])
        .unwrap()
}

fn young() -> YoungFunction {
    YoungFunction::power(2.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn converged_solves_carry_the_certificate(eps in -1.0f64..1.0, c0 in -1.0f64..0.0, r in 0.1f64..0.3) {
        let tol = 1e-7;
        let p = ParametrixOperator::new(&operator(eps, c0), &[0.0, 0.0], r, 32, &young(), None).unwrap();
        let us = polynomial_bump(p.domain(), &[0.0, 0.0], 0.8 * r);
        let f = apply(p.operator(), &us).unwrap();
        let (_, rep) = p.neumann_solve(&f, tol, 100).unwrap();
        prop_assert!(rep.converged);
        prop_assert!(rep.fixed_point_defect <= 2.0 * tol);
        let steps: Vec<f64> = rep.iterations.iter().map(|i| i.step).collect();
        let tail = &steps[steps.len().saturating_sub(4)..];
        for w in tail.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn solve_is_linear_in_f(eps in -1.0f64..1.0, a in -2.0f64..2.0) {
        let tol = 1e-9;
        let p = ParametrixOperator::new(&operator(eps, -0.5), &[0.0, 0.0], 0.2, 32, &young(), None).unwrap();
        let f1 = mollifier_bump(p.domain(), &[0.02, 0.0], 0.12);
        let f2 = polynomial_bump(p.domain(), &[0.0, -0.03], 0.1).scale(a);
        let (u1, _) = p.neumann_solve(&f1, tol, 100).unwrap();
        let (u2, _) = p.neumann_solve(&f2, tol, 100).unwrap();
        let (u, _) = p.neumann_solve(&f1.add(&f2).unwrap(), tol, 100).unwrap();
        let diff = p.w_norm(&u.sub(&u1.add(&u2).unwrap()).unwrap()).unwrap();
        prop_assert!(diff <= 2.0 * tol * p.w_norm(&u).unwrap());
    }
}

#[test]
fn sigma_estimates_are_reproducible() {
    let l = operator(1.0, 0.0);
    let a = estimate_sigma(&l, &[0.0, 0.0], &RADIUS_LADDER, 8, 3, 32, &young()).unwrap();
    let b = estimate_sigma(&l, &[0.0, 0.0], &RADIUS_LADDER, 8, 3, 32, &young()).unwrap();
    assert_eq!(a, b);
    assert!(a.sigma_hat.iter().all(|&s| s >= 0.0));
    assert!(estimate_sigma(&l, &[0.0, 0.0], &RADIUS_LADDER, 4, 3, 32, &young()).is_err());
}
