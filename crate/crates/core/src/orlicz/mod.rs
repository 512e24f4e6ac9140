//! Discrete Orlicz-space engine: modulars, norms, convolution, shifts,
//! mollification and the inequality suite.

mod conv;
mod inequalities;

pub use conv::{
    convolve, convolve_kernel, mollifier_kernel, mollify, shift, shift_modulus, ShiftModulusRow, Shifted,
};
pub use inequalities::{
    inequality_suite, inequality_suite_with, random_triple, InequalityEntry, InequalityReport,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::{golden_min, CompensatedSum};
use crate::young::YoungFunction;

const LUX_REL_TOL: f64 = 1e-14;

/// `ρ_M(u) = Σ_mask M(u(x)) h^n`; `+inf` when M overflows at some node.
pub fn modular(u: &GridFunction, m: &YoungFunction) -> f64 {
    scaled_modular(u, m, 1.0)
}

fn scaled_modular(u: &GridFunction, m: &YoungFunction, k: f64) -> f64 {
    let mut s = CompensatedSum::default();
    for (&v, &b) in u.values.iter().zip(u.domain.mask()) {
        if b && v != 0.0 {
            let val = m.evaluate(k * v);
            if !val.is_finite() {
                return f64::INFINITY;
            }
            s.add(val);
        }
    }
    s.value() * u.domain.cell_volume()
}

/// Luxemburg gauge `inf{λ > 0 : ρ_M(u/λ) ≤ 1}`, by bisection on `log λ`.
pub fn luxemburg_norm(u: &GridFunction, m: &YoungFunction) -> Result<f64> {
    let sup = u.sup_norm();
    if sup == 0.0 {
        return Ok(0.0);
    }
    let rho = |lam: f64| scaled_modular(u, m, 1.0 / lam);
    let mut hi = sup;
    let mut steps = 0;
    while !(rho(hi) <= 1.0) {
        hi *= 2.0;
        steps += 1;
        if steps > 2000 || !hi.is_finite() {
            return Err(Error::Bracket("modular never drops below 1".into()));
        }
    }
    let mut lo = hi;
    steps = 0;
    while rho(lo) <= 1.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2000 || lo == 0.0 {
            return Err(Error::Bracket("modular never exceeds 1".into()));
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > LUX_REL_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if rho(mid.exp()) <= 1.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(b.exp())
}

/// Dual norm through the Amemiya formula `inf_k (1 + ρ_M(k u))/k`.
pub fn orlicz_norm(u: &GridFunction, m: &YoungFunction) -> Result<f64> {
    let lam = luxemburg_norm(u, m)?;
    if lam == 0.0 {
        return Ok(0.0);
    }
    let g = |lk: f64| {
        let k = lk.exp();
        (1.0 + scaled_modular(u, m, k)) / k
    };
    // the minimiser is at least 1/(2λ): below that g(k) > 1/k > 2λ = g(1/λ)
    let lo = (0.5 / lam).ln();
    let mut hi = (1.0 / lam).ln();
    let mut steps = 0;
    while g(hi + std::f64::consts::LN_2) < g(hi) {
        hi += std::f64::consts::LN_2;
        steps += 1;
        if steps > 400 {
            return Err(Error::Bracket("Amemiya infimum not bracketed".into()));
        }
    }
    let (_, val) = golden_min(g, lo, hi + std::f64::consts::LN_2, 1e-10);
    Ok(val.min(2.0 * lam))
}

/// `mes(E) N⁻¹(1/mes(E))`, the closed form for the norm of an indicator.
pub fn characteristic_norm(measure: f64, n: &YoungFunction) -> Result<f64> {
    Ok(measure * n.inverse(1.0 / measure)?)
}

/// Randomised lower bound for `sup_{ρ_N(v) ≤ 1} |Σ u v h^n|`.
///
/// The first witnesses are `sign(u)`, `u` and the Young-equality witness
/// `sign(u) p(k*|u|)`; the rest are Gaussian fields mixed with `u`.
pub fn dual_norm_lower_bound_with(
    u: &GridFunction,
    m: &YoungFunction,
    n: &YoungFunction,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if u.sup_norm() == 0.0 {
        return Ok(0.0);
    }
    let lam = luxemburg_norm(u, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cv = u.domain.cell_volume();
    let mut best = 0.0f64;
    for t in 0..trials {
        let v = match t {
            0 => u.map(f64::signum),
            1 => u.clone(),
            2 => u.map(|x| x.signum() * m.density(x.abs() / lam)),
            _ => {
                let mix: f64 = rng.gen_range(0.0..1.0);
                let vals = u
                    .values
                    .iter()
                    .map(|&x| {
                        let z: f64 = rng.sample(StandardNormal);
                        mix * x / lam + (1.0 - mix) * z
                    })
                    .collect();
                GridFunction { domain: u.domain.clone(), values: vals }
            }
        };
        let scale = luxemburg_norm(&v, n)?;
        if scale == 0.0 {
            continue;
        }
        let mut s = CompensatedSum::default();
        for ((&a, &b), &mk) in u.values.iter().zip(&v.values).zip(u.domain.mask()) {
            if mk {
                s.add(a * b);
            }
        }
        best = best.max((s.value() * cv / scale).abs());
    }
    Ok(best)
}

/// As [`dual_norm_lower_bound_with`], computing the complementary function.
pub fn dual_norm_lower_bound(u: &GridFunction, m: &YoungFunction, trials: usize, seed: u64) -> Result<f64> {
    let n = m.conjugate()?;
    dual_norm_lower_bound_with(u, m, &n, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;

    fn unit_interval(npts: usize) -> GridDomain {
        // [0, 1) masked inside [-1, 1)
        GridDomain::new(1, npts, 2.0).unwrap().with_mask_fn(|x| x[0] >= 0.0 && x[0] < 1.0).unwrap()
    }

    #[test]
    fn constant_modular() {
        let g = unit_interval(64);
        let u = GridFunction::constant(&g, 3.0);
        let m = YoungFunction::power(2.0, 1.0).unwrap();
        assert!((modular(&u, &m) - 9.0).abs() < 1e-12);
        assert_eq!(modular(&GridFunction::zeros(&g), &m), 0.0);
    }

    #[test]
    fn linear_modular_converges() {
        let m = YoungFunction::power(2.0, 1.0).unwrap();
        let mut errs = vec![];
        for npts in [64, 128, 256] {
            let g = unit_interval(npts);
            let u = GridFunction::from_fn(&g, |x| x[0]);
            errs.push((modular(&u, &m) - 1.0 / 3.0).abs());
        }
        // left-endpoint lattice: first-order convergence
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
        assert!(errs[2] < 2.0 / 256.0);
    }

    #[test]
    fn luxemburg_examples() {
        let m = YoungFunction::power(2.0, 1.0).unwrap();
        let g = GridDomain::new(1, 64, 2.0).unwrap();
        let u = GridFunction::constant(&g, 1.0);
        assert!((luxemburg_norm(&u, &m).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let e = g.with_mask_fn(|x| x[0] >= 0.0 && x[0] < 0.25).unwrap();
        let chi = GridFunction::mask_indicator(&e);
        assert!((luxemburg_norm(&chi, &m).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(luxemburg_norm(&GridFunction::zeros(&g), &m).unwrap(), 0.0);
    }

    #[test]
    fn orlicz_norm_of_indicator() {
        let m = YoungFunction::power(2.0, 0.5).unwrap();
        let g = GridDomain::new(1, 64, 2.0).unwrap().with_mask_fn(|x| x[0] >= 0.0 && x[0] < 0.5).unwrap();
        let chi = GridFunction::mask_indicator(&g);
        let v = orlicz_norm(&chi, &m).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        let n = m.conjugate().unwrap();
        assert!((characteristic_norm(0.5, &n).unwrap() - 1.0).abs() < 1e-8);
        let lb = dual_norm_lower_bound_with(&chi, &m, &n, 8, 1).unwrap();
        assert!(lb <= v * (1.0 + 1e-6) && lb > 0.999 * v);
    }
}
