//! Shared fixtures for the benchmarks.

use parametrix_core::operator::{Coefficient, EllipticOperator};
use parametrix_core::probes::mollifier_bump;
use parametrix_core::{GridDomain, GridFunction};

/// Smooth bump of radius 0.3 on the unit cube with `npts` points per axis.
pub fn bump(n: usize, npts: usize) -> GridFunction {
    let dom = GridDomain::new(n, npts, 1.0).expect("valid grid");
    mollifier_bump(&dom, &vec![0.0; n], 0.3)
}

/// `-(1 + x₁)Δ` in 2D.
pub fn lipschitz_laplacian() -> EllipticOperator {
    EllipticOperator::neg_laplacian(2)
        .scaled_plus(Coefficient::func(|x| 1.0 + x[0]), vec![])
        .expect("valid operator")
}
