use rayon::prelude::*;

use super::FundamentalSolution;
use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::numeric::gauss_legendre;
use crate::operator::MultiIndex;

const CELL_ORDER: usize = 16;

/// Kernel value at lattice slot `idx`. On Nyquist planes (offset `-N/2` on
/// some axis) the sample is averaged over the sign flips of those axes, so
/// the two periodic images contribute symmetrically.
pub fn nyquist_sample<F: Fn(&[f64]) -> f64>(domain: &GridDomain, idx: usize, f: &F) -> f64 {
    let n = domain.n();
    let x = domain.offset_coords(idx);
    let m = domain.multi(idx);
    let half = domain.points() / 2;
    let axes: Vec<usize> = (0..n).filter(|&k| m[k] == half).collect();
    if axes.is_empty() {
        return f(&x[..n]);
    }
    let mut acc = 0.0;
    let count = 1usize << axes.len();
    for mask in 0..count {
        let mut y = x;
        for (b, &k) in axes.iter().enumerate() {
            if (mask >> b) & 1 == 1 {
                y[k] = -y[k];
            }
        }
        acc += f(&y[..n]);
    }
    acc / count as f64
}

/// `∫ g` over the cell `[-h/2, h/2]^n`, by splitting it into pyramids with
/// apex at the origin (Duffy) and using `t = v³` along each ray, which
/// absorbs integrable point singularities at the apex.
pub fn duffy_cell_integral<F: Fn(&[f64]) -> f64>(g: F, h: f64, n: usize) -> f64 {
    let (z, w) = gauss_legendre(CELL_ORDER);
    let a = 0.5 * h;
    // radial nodes on t ∈ (0, 1) via t = v³, dt = 3v² dv
    let radial: Vec<(f64, f64)> = z
        .iter()
        .zip(&w)
        .map(|(&zi, &wi)| {
            let v = 0.5 * (zi + 1.0);
            (v * v * v, 1.5 * wi * v * v)
        })
        .collect();
    let face: Vec<(f64, f64)> = z.iter().zip(&w).map(|(&zi, &wi)| (a * zi, a * wi)).collect();
    let face_pts: Vec<(Vec<f64>, f64)> = match n {
        1 => vec![(vec![], 1.0)],
        2 => face.iter().map(|&(s, ws)| (vec![s], ws)).collect(),
        _ => face
            .iter()
            .flat_map(|&(s, ws)| face.iter().map(move |&(r, wr)| (vec![s, r], ws * wr)))
            .collect(),
    };
    let mut total = 0.0;
    let mut q = vec![0.0; n];
    for axis in 0..n {
        for sign in [-1.0, 1.0] {
            for (pt, wf) in &face_pts {
                let mut k = 0;
                for (c, qc) in q.iter_mut().enumerate() {
                    if c == axis {
                        *qc = sign * a;
                    } else {
                        *qc = pt[k];
                        k += 1;
                    }
                }
                for &(t, wt) in &radial {
                    let y: Vec<f64> = q.iter().map(|v| v * t).collect();
                    total += g(&y) * t.powi(n as i32 - 1) * a * wt * wf;
                }
            }
        }
    }
    total
}

/// Lattice samples of `∂^p J` for `|p| < m`; the origin slot carries the
/// cell average of the kernel.
pub fn weak_kernel_grid(j: &FundamentalSolution, p: &MultiIndex, domain: &GridDomain) -> Result<Vec<f64>> {
    if p.order() >= j.m() {
        return Err(Error::InvalidArgument(format!(
            "|p| = {} is not weakly singular for order {}",
            p.order(),
            j.m()
        )));
    }
    if domain.n() != j.n() {
        return Err(Error::Dimension(format!("{}-D kernel on a {}-D grid", j.n(), domain.n())));
    }
    let f = |x: &[f64]| j.derivative(p, x);
    let mut k: Vec<f64> = (0..domain.len()).into_par_iter().map(|i| if i == 0 { 0.0 } else { nyquist_sample(domain, i, &f) }).collect();
    let h = domain.h();
    k[0] = duffy_cell_integral(f, h, domain.n()) / domain.cell_volume();
    Ok(k)
}

/// Lattice samples of a critical kernel with the singular cell excluded.
pub fn pv_kernel_grid<F: Fn(&[f64]) -> f64 + Sync>(f: F, domain: &GridDomain) -> Vec<f64> {
    (0..domain.len()).into_par_iter().map(|i| if i == 0 { 0.0 } else { nyquist_sample(domain, i, &f) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_integral_of_polynomial() {
        // ∫ x² + y² over [-1/2, 1/2]² = 1/6
        let v = duffy_cell_integral(|x| x[0] * x[0] + x[1] * x[1], 1.0, 2);
        assert!((v - 1.0 / 6.0).abs() < 1e-12);
        let v = duffy_cell_integral(|_| 1.0, 0.5, 3);
        assert!((v - 0.125).abs() < 1e-14);
        let v = duffy_cell_integral(|x| x[0].abs(), 2.0, 1);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cell_integral_of_singular_kernels() {
        // reference value from adaptive high-precision quadrature
        let exact_3d = 2.380_077_363_979_553_5;
        let v = duffy_cell_integral(|x| 1.0 / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt(), 1.0, 3);
        assert!((v - exact_3d).abs() < 1e-10, "{v} vs {exact_3d}");
        // ∫_{[-1/2,1/2]²} log(x² + y²) = log(1/2) - 3 + π/2
        let v = duffy_cell_integral(|x| (x[0] * x[0] + x[1] * x[1]).ln(), 1.0, 2);
        let exact = 0.5f64.ln() - 3.0 + std::f64::consts::FRAC_PI_2;
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn nyquist_average_cancels_odd_kernels() {
        let g = GridDomain::new(2, 8, 1.0).unwrap();
        let i = g.flat(&[4, 1]);
        assert_eq!(nyquist_sample(&g, i, &|x: &[f64]| x[0]), 0.0);
        assert_eq!(nyquist_sample(&g, i, &|x: &[f64]| x[1]), g.h());
    }
}
