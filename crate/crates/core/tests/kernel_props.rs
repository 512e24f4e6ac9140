use parametrix_core::kernels::{fundamental_solution, named_operator, singular_integral, Branch, SingularKernel};
use parametrix_core::operator::MultiIndex;
use parametrix_core::probes::mollifier_bump;
use parametrix_core::{GridDomain, GridFunction};
use proptest::prelude::*;

const SHIPPED: [&str; 6] = ["laplace2d", "laplace3d", "biharmonic2d", "biharmonic3d", "aniso2:2,0.5,1", "aniso2:2,0.3,0,1,0.2,1.5"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_branch_is_homogeneous(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, r in 0.05f64..2.0) {
        prop_assume!(a * a + b * b + c * c > 1e-4);
        for name in SHIPPED {
            let j = fundamental_solution(&named_operator(name).unwrap()).unwrap();
            if j.branch() != Branch::Power {
                continue;
            }
            let x: Vec<f64> = [a, b, c][..j.n()].iter().map(|v| v * r).collect();
            let deg = j.m() as f64 - j.n() as f64;
            for t in [0.5, 2.0, 10.0] {
                let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
                let (lhs, rhs) = (j.evaluate(&tx), t.powf(deg) * j.evaluate(&x));
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs(), "{name}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn derivative_decay_is_finite() {
    for name in SHIPPED {
        let j = fundamental_solution(&named_operator(name).unwrap()).unwrap();
        let k = j.decay_constant();
        assert!(k.is_finite() && k > 0.0, "{name}: {k}");
    }
}

#[test]
fn shipped_singular_kernels_are_mean_zero() {
    assert!(SingularKernel::cos2theta().mean_zero_defect() <= 1e-8);
    for name in SHIPPED {
        let j = fundamental_solution(&named_operator(name).unwrap()).unwrap();
        for p in MultiIndex::of_order(j.n(), j.m()) {
            let k = SingularKernel::from_fundamental(&j, &p).unwrap();
            assert!(k.mean_zero_defect() <= 1e-8, "{}: {}", k.label(), k.mean_zero_defect());
        }
    }
}

#[test]
fn principal_value_of_odd_input_vanishes_at_centre() {
    let dom = GridDomain::new(2, 32, 1.0).unwrap();
    let bump = mollifier_bump(&dom, &[0.0, 0.0], 0.4);
    let odd = GridFunction::from_fn(&dom, |x| x[0] + 0.3 * x[1]).mul(&bump).unwrap();
    let centre = dom.flat(&[16, 16]);
    for k in [
        SingularKernel::cos2theta(),
        SingularKernel::from_fundamental(&fundamental_solution(&named_operator("laplace2d").unwrap()).unwrap(), &MultiIndex::new(&[1, 1]))
            .unwrap(),
    ] {
        let out = singular_integral(&k, &odd).unwrap();
        assert!(out.values[centre].abs() <= 1e-12 * out.sup_norm(), "{}", out.values[centre]);
    }
}
