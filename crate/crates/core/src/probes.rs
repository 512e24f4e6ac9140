//! Smooth compactly supported test functions.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::grid::{GridDomain, GridFunction};

/// `exp(-1/(1 - |x - c|²/R²))` inside the ball, zero outside.
pub fn mollifier_bump(domain: &GridDomain, c: &[f64], radius: f64) -> GridFunction {
    GridFunction::from_fn(domain, |x| {
        let r2 = dist2(x, c) / (radius * radius);
        if r2 < 1.0 {
            (-1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    })
}

/// `(1 - |x - c|²/R²)⁴` inside the ball, zero outside (C³ across the edge).
pub fn polynomial_bump(domain: &GridDomain, c: &[f64], radius: f64) -> GridFunction {
    GridFunction::from_fn(domain, |x| {
        let r2 = dist2(x, c) / (radius * radius);
        if r2 < 1.0 {
            (1.0 - r2).powi(4)
        } else {
            0.0
        }
    })
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum()
}

/// Exponents of all monomials of degree at most 3 in `n` variables.
fn monomials(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=3 {
        for b in 0..=(if n > 1 { 3 - a } else { 0 }) {
            for c in 0..=(if n > 2 { 3 - a - b } else { 0 }) {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Random probe supported in `B_r(x0)`: a polynomial bump centred within
/// `0.3 r` of `x0` with radius `(r - |c - x0|)·U(0.6, 1)`, multiplied by a
/// cubic polynomial in `(x - x0)/r` with standard normal coefficients.
pub fn bump_poly_probe<R: Rng>(domain: &GridDomain, x0: &[f64], r: f64, rng: &mut R) -> GridFunction {
    let n = domain.n();
    let c: Vec<f64> = x0.iter().map(|&x| x + rng.gen_range(-0.3..0.3) * r).collect();
    let rho = (r - dist2(&c, x0).sqrt()) * rng.gen_range(0.6..1.0);
    let mons = monomials(n);
    let coef: Vec<f64> = mons.iter().map(|_| rng.sample(StandardNormal)).collect();
    GridFunction::from_fn(domain, |x| {
        let r2 = dist2(x, &c) / (rho * rho);
        if r2 >= 1.0 {
            return 0.0;
        }
        let mut y = [0.0; 3];
        for k in 0..n {
            y[k] = (x[k] - x0[k]) / r;
        }
        let poly: f64 = mons
            .iter()
            .zip(&coef)
            .map(|(e, a)| a * y[0].powi(e[0] as i32) * y[1].powi(e[1] as i32) * y[2].powi(e[2] as i32))
            .sum();
        (1.0 - r2).powi(4) * poly
    })
}
