//! Fundamental solutions, weakly singular potentials and principal-value
//! singular integrals on the periodic lattice.

mod fundamental;
pub mod lattice;
mod potential;
mod singular;

pub use fundamental::{fundamental_solution, Branch, FundamentalSolution};
pub use potential::{
    potential, reproduction_error, singular_potential, verify_fundamental, SingularPotential, VerifyReport,
};
pub use singular::{
    equivariance_defect, shift_invariance_probe, singular_integral, InvarianceRow, SingularKernel,
};

use crate::error::{Error, Result};
use crate::numeric::unit_ball_volume;
use crate::operator::EllipticOperator;

/// `∫_{|y| < r} |y|^{-α} dy = n |B₁| r^{n-α} / (n - α)` for `α < n`.
pub fn ball_integral(alpha: f64, r: f64, n: usize) -> Result<f64> {
    if alpha >= n as f64 {
        return Err(Error::InvalidArgument(format!("∫|y|^-{alpha} diverges in {n} dimensions")));
    }
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius {r}")));
    }
    let nf = n as f64;
    Ok(nf * unit_ball_volume(n) * r.powf(nf - alpha) / (nf - alpha))
}

/// Operator behind a named kernel: `laplace1d`..`laplace3d`,
/// `biharmonic2d`, `biharmonic3d`, or `aniso2:<entries>` where the entries
/// are the upper triangle of a symmetric positive-definite matrix (three in
/// 2D, six in 3D) and the operator is `-Σ a_ij ∂_i∂_j`.
pub fn named_operator(name: &str) -> Result<EllipticOperator> {
    let name = name.trim();
    match name {
        "laplace1d" => Ok(EllipticOperator::neg_laplacian(1)),
        "laplace2d" => Ok(EllipticOperator::neg_laplacian(2)),
        "laplace3d" => Ok(EllipticOperator::neg_laplacian(3)),
        "biharmonic2d" => Ok(EllipticOperator::bilaplacian(2, 1.0)),
        "biharmonic3d" => Ok(EllipticOperator::bilaplacian(3, 1.0)),
        _ => {
            let Some(rest) = name.strip_prefix("aniso2:") else {
                return Err(Error::Capability(format!("unknown kernel '{name}'")));
            };
            let v = rest
                .split(|c| c == ',' || c == ' ')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("matrix entry '{s}'"))))
                .collect::<Result<Vec<_>>>()?;
            let n = match v.len() {
                3 => 2,
                6 => 3,
                k => return Err(Error::Parse(format!("aniso2 needs 3 or 6 entries, got {k}"))),
            };
            let mut a = vec![0.0; n * n];
            let mut it = v.iter();
            for i in 0..n {
                for j in i..n {
                    let x = -*it.next().unwrap();
                    a[i * n + j] = x;
                    a[j * n + i] = x;
                }
            }
            EllipticOperator::second_order(n, &a)
        }
    }
}
