use rayon::prelude::*;

use super::luxemburg_norm;
use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction, ShiftVector};
use crate::young::YoungFunction;

/// Row layout helper: splits a flat index into (row, last-axis index).
struct Rows {
    n: usize,
    npts: usize,
}

impl Rows {
    fn row_count(&self) -> usize {
        self.npts.pow(self.n as u32 - 1)
    }

    /// `row(a) ⊖ row(j)` with periodic wrap on every axis but the last.
    fn sub(&self, a: usize, j: usize) -> usize {
        let np = self.npts;
        match self.n {
            1 => 0,
            2 => (a + np - j) % np,
            _ => {
                let (a0, a1) = (a / np, a % np);
                let (j0, j1) = (j / np, j % np);
                ((a0 + np - j0) % np) * np + (a1 + np - j1) % np
            }
        }
    }
}

/// `out[a] = h^n Σ_j k[j] data[a ⊖ j]`, with `k` stored by lattice offset.
///
/// The sum runs over `j` in lexicographic order, skipping rows of `data`
/// that are identically zero, so results are bit-exactly equivariant under
/// lattice shifts of `data`.
pub fn convolve_kernel(kernel: &[f64], data: &GridFunction) -> Result<GridFunction> {
    let dom = &data.domain;
    if kernel.len() != dom.len() {
        return Err(Error::Dimension(format!("kernel has {} samples, grid {}", kernel.len(), dom.len())));
    }
    let np = dom.points();
    let rows = Rows { n: dom.n(), npts: np };
    let nrows = rows.row_count();
    let live: Vec<bool> = (0..nrows).map(|r| data.values[r * np..(r + 1) * np].iter().any(|&v| v != 0.0)).collect();
    if !live.iter().any(|&b| b) {
        return Ok(GridFunction::zeros(dom));
    }
    let cv = dom.cell_volume();
    let values: Vec<f64> = (0..dom.len())
        .into_par_iter()
        .map(|a| {
            let (ar, al) = (a / np, a % np);
            let mut s = 0.0;
            for jr in 0..nrows {
                let dr = rows.sub(ar, jr);
                if !live[dr] {
                    continue;
                }
                let krow = &kernel[jr * np..(jr + 1) * np];
                let drow = &data.values[dr * np..(dr + 1) * np];
                for (jl, &kv) in krow.iter().enumerate() {
                    let dv = drow[(al + np - jl) % np];
                    if dv != 0.0 {
                        s += kv * dv;
                    }
                }
            }
            s * cv
        })
        .collect();
    Ok(GridFunction { domain: dom.clone(), values })
}

/// Periodic convolution `(f*g)(x) = ∫ f(x-y) g(y) dy` of two grid functions,
/// with the domain center playing the role of the origin.
///
/// Each pair of products is summed symmetrically, so `f*g` and `g*f` agree
/// bit for bit.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.domain.check_same(&g.domain)?;
    let dom = &f.domain;
    let n = dom.n();
    let half = (dom.points() / 2) as i64;
    let cv = dom.cell_volume();
    let values: Vec<f64> = (0..dom.len())
        .into_par_iter()
        .map(|a| {
            let am = dom.multi(a);
            let mut s = 0.0;
            for b in 0..dom.len() {
                let (fb, gb) = (f.values[b], g.values[b]);
                let bm = dom.multi(b);
                let mut ix = [0i64; 3];
                for k in 0..n {
                    ix[k] = am[k] as i64 - bm[k] as i64 + half;
                }
                let c = dom.flat(&ix);
                let t1 = f.values[c] * gb;
                let t2 = fb * g.values[c];
                s += t1 + t2;
            }
            0.5 * s * cv
        })
        .collect();
    Ok(GridFunction { domain: dom.clone(), values })
}

/// Result of a shift: the translated function and whether interpolation was used.
#[derive(Debug, Clone)]
pub struct Shifted {
    pub function: GridFunction,
    pub interpolated: bool,
}

/// `T_δ f(x) = f(x + δ)`: exact index translation on-lattice, multilinear
/// interpolation otherwise.
pub fn shift(f: &GridFunction, delta: &ShiftVector) -> Result<Shifted> {
    let dom = &f.domain;
    let n = dom.n();
    if delta.delta.len() != n {
        return Err(Error::Dimension(format!("shift has {} components, grid is {n}-D", delta.delta.len())));
    }
    if let Some(steps) = delta.lattice_steps(dom) {
        let values = (0..dom.len())
            .map(|a| {
                let m = dom.multi(a);
                let mut ix = [0i64; 3];
                for k in 0..n {
                    ix[k] = m[k] as i64 + steps[k];
                }
                f.values[dom.flat(&ix)]
            })
            .collect();
        return Ok(Shifted { function: GridFunction { domain: dom.clone(), values }, interpolated: false });
    }
    let s = delta.in_steps(dom);
    let base: Vec<i64> = s.iter().map(|v| v.floor() as i64).collect();
    let frac: Vec<f64> = s.iter().map(|v| v - v.floor()).collect();
    let values = (0..dom.len())
        .map(|a| {
            let m = dom.multi(a);
            let mut acc = 0.0;
            for corner in 0..(1usize << n) {
                let mut w = 1.0;
                let mut ix = [0i64; 3];
                for k in 0..n {
                    let up = (corner >> k) & 1 == 1;
                    w *= if up { frac[k] } else { 1.0 - frac[k] };
                    ix[k] = m[k] as i64 + base[k] + up as i64;
                }
                if w != 0.0 {
                    acc += w * f.values[dom.flat(&ix)];
                }
            }
            acc
        })
        .collect();
    Ok(Shifted { function: GridFunction { domain: dom.clone(), values }, interpolated: true })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftModulusRow {
    pub magnitude: f64,
    pub modulus: f64,
    pub interpolated: bool,
}

/// Table of `(|δ|, ‖T_δ f − f‖_M)` with the Luxemburg norm on f's mask.
pub fn shift_modulus(f: &GridFunction, m: &YoungFunction, deltas: &[ShiftVector]) -> Result<Vec<ShiftModulusRow>> {
    deltas
        .iter()
        .map(|d| {
            let s = shift(f, d)?;
            let diff = s.function.sub(f)?;
            Ok(ShiftModulusRow {
                magnitude: d.magnitude(&f.domain),
                modulus: luxemburg_norm(&diff, m)?,
                interpolated: s.interpolated,
            })
        })
        .collect()
}

/// Lattice samples of the ε-cap `exp(-ε²/(ε² - |x|²))`, scaled to unit
/// discrete mass.
pub fn mollifier_kernel(domain: &GridDomain, eps: f64) -> Result<Vec<f64>> {
    let h = domain.h();
    if eps < 2.0 * h {
        return Err(Error::Resolution(format!("eps = {eps} is below two cells (h = {h})")));
    }
    if eps >= domain.side() / 4.0 {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be below d/4")));
    }
    let n = domain.n();
    let mut k: Vec<f64> = (0..domain.len())
        .map(|j| {
            let x = domain.offset_coords(j);
            let r2: f64 = x[..n].iter().map(|v| v * v).sum();
            if r2 < eps * eps {
                (-eps * eps / (eps * eps - r2)).exp()
            } else {
                0.0
            }
        })
        .collect();
    let mass: f64 = k.iter().sum::<f64>() * domain.cell_volume();
    for v in &mut k {
        *v /= mass;
    }
    Ok(k)
}

/// `f * ω_ε`.
pub fn mollify(f: &GridFunction, eps: f64) -> Result<GridFunction> {
    let k = mollifier_kernel(&f.domain, eps)?;
    convolve_kernel(&k, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_from_two_indicators() {
        let g = GridDomain::new(1, 256, 2.0).unwrap();
        let chi = GridFunction::from_fn(&g, |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 });
        let c = convolve(&chi, &chi).unwrap();
        let peak = c.values[g.flat(&[128 + 128])];
        // lattice quadrature of the overlap: O(h) off the exact value 1
        assert!((peak - 1.0).abs() <= 1.5 * g.h(), "{peak}");
        let mid = c.values[g.flat(&[128 + 64])];
        assert!((mid - 0.5).abs() <= 1.5 * g.h());
    }

    #[test]
    fn convolution_commutes_bitwise() {
        let g = GridDomain::new(2, 8, 1.0).unwrap();
        let f = GridFunction::from_fn(&g, |x| (3.0 * x[0]).sin() + x[1]);
        let h = GridFunction::from_fn(&g, |x| (x[0] * x[1]).exp());
        assert_eq!(convolve(&f, &h).unwrap().values, convolve(&h, &f).unwrap().values);
    }

    #[test]
    fn mollified_constant_is_constant() {
        let g = GridDomain::new(2, 32, 1.0).unwrap();
        let k = mollifier_kernel(&g, 0.1).unwrap();
        assert!((k.iter().sum::<f64>() * g.cell_volume() - 1.0).abs() < 1e-12);
        let out = mollify(&GridFunction::constant(&g, 2.5), 0.1).unwrap();
        assert!(out.values.iter().all(|v| (v - 2.5).abs() < 1e-12));
        assert!(matches!(mollify(&GridFunction::constant(&g, 1.0), 0.01), Err(Error::Resolution(_))));
    }

    #[test]
    fn shift_identities() {
        let g = GridDomain::new(1, 16, 1.0).unwrap();
        let f = GridFunction::from_fn(&g, |x| (x[0] * 5.0).sin());
        let zero = shift(&f, &ShiftVector::grid(&[0])).unwrap();
        assert_eq!(zero.function.values, f.values);
        let full = shift(&f, &ShiftVector::physical(&[1.0])).unwrap();
        assert_eq!(full.function.values, f.values);
        let half = shift(&f, &ShiftVector::grid(&[1])).unwrap();
        assert_eq!(half.function.values[3], f.values[4]);
        let off = shift(&f, &ShiftVector::physical(&[0.5 / 16.0])).unwrap();
        assert!(off.interpolated);
        assert!((off.function.values[3] - 0.5 * (f.values[3] + f.values[4])).abs() < 1e-15);
    }
}
