use std::fmt;
use std::sync::Arc;

use super::lattice::pv_kernel_grid;
use super::FundamentalSolution;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, ShiftVector};
use crate::numeric::gauss_legendre;
use crate::operator::MultiIndex;
use crate::orlicz::{convolve_kernel, shift, shift_modulus};
use crate::young::YoungFunction;

const DEFECT_TOL: f64 = 1e-8;

type Omega = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Calderón–Zygmund kernel `ω(x/|x|) / |x|ⁿ`.
#[derive(Clone)]
pub struct SingularKernel {
    n: usize,
    omega: Omega,
    defect: f64,
    label: String,
}

impl fmt::Debug for SingularKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularKernel").field("n", &self.n).field("label", &self.label).field("defect", &self.defect).finish()
    }
}

/// `∫_{|x|=1} ω dσ` by trapezoid in angle (2D) or Gauss–Legendre in the
/// polar cosine times trapezoid in azimuth (3D).
fn sphere_mean<F: Fn(&[f64]) -> f64>(n: usize, omega: F) -> f64 {
    match n {
        1 => omega(&[1.0]) + omega(&[-1.0]),
        2 => {
            let k = 4096;
            let dt = 2.0 * std::f64::consts::PI / k as f64;
            (0..k).map(|i| {
                let t = i as f64 * dt;
                omega(&[t.cos(), t.sin()])
            }).sum::<f64>() * dt
        }
        _ => {
            let (z, w) = gauss_legendre(64);
            let k = 256;
            let dp = 2.0 * std::f64::consts::PI / k as f64;
            let mut s = 0.0;
            for (&c, &wc) in z.iter().zip(&w) {
                let sn = (1.0 - c * c).sqrt();
                for i in 0..k {
                    let p = i as f64 * dp;
                    s += wc * dp * omega(&[sn * p.cos(), sn * p.sin(), c]);
                }
            }
            s
        }
    }
}

impl SingularKernel {
    /// Builds a kernel from its angular part; rejects `ω` whose sphere
    /// integral exceeds `1e-8`.
    pub fn new<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(n: usize, omega: F, label: &str) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::Dimension(format!("n = {n}")));
        }
        let defect = sphere_mean(n, &omega).abs();
        if !defect.is_finite() || defect > DEFECT_TOL {
            return Err(Error::InvalidKernel(format!("{label}: mean-zero defect {defect:e}")));
        }
        Ok(Self { n, omega: Arc::new(omega), defect, label: label.to_string() })
    }

    /// `ω(θ) = cos 2θ` in the plane.
    pub fn cos2theta() -> Self {
        Self::new(2, |u| u[0] * u[0] - u[1] * u[1], "cos2theta").expect("cos 2θ has zero mean")
    }

    /// `∂^p J` for `|p| = m`, which is homogeneous of degree `-n`.
    pub fn from_fundamental(j: &FundamentalSolution, p: &MultiIndex) -> Result<Self> {
        if p.order() != j.m() || p.dim() != j.n() {
            return Err(Error::InvalidArgument(format!("kernel index {p} needs order {} in {} dimensions", j.m(), j.n())));
        }
        let (j, q) = (j.clone(), p.clone());
        let label = format!("d{p}{}", j.label());
        Self::new(j.n(), move |u| j.derivative(&q, u), &label)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mean_zero_defect(&self) -> f64 {
        self.defect
    }

    pub fn omega(&self, unit: &[f64]) -> f64 {
        (self.omega)(unit)
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: Vec<f64> = x.iter().map(|v| v / r).collect();
        (self.omega)(&u) / r.powi(self.n as i32)
    }
}

/// `(Kf)(x) = PV ∫ k(x − y) f(y) dy` with the singular cell excluded.
pub fn singular_integral(k: &SingularKernel, f: &GridFunction) -> Result<GridFunction> {
    if k.n() != f.domain.n() {
        return Err(Error::Dimension(format!("{}-D kernel on a {}-D grid", k.n(), f.domain.n())));
    }
    let grid = pv_kernel_grid(|x| k.evaluate(x), &f.domain);
    convolve_kernel(&grid, f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceRow {
    pub magnitude: f64,
    pub input_modulus: f64,
    pub output_modulus: f64,
    pub interpolated: bool,
}

/// Shift moduli of `f` and of `Kf` side by side.
pub fn shift_invariance_probe(
    k: &SingularKernel,
    f: &GridFunction,
    m: &YoungFunction,
    deltas: &[ShiftVector],
) -> Result<Vec<InvarianceRow>> {
    let kf = singular_integral(k, f)?;
    let inp = shift_modulus(f, m, deltas)?;
    let out = shift_modulus(&kf, m, deltas)?;
    Ok(inp
        .into_iter()
        .zip(out)
        .map(|(a, b)| InvarianceRow {
            magnitude: a.magnitude,
            input_modulus: a.modulus,
            output_modulus: b.modulus,
            interpolated: a.interpolated,
        })
        .collect())
}

/// `K(T_δ f) − T_δ(K f)` for an on-lattice shift; zero bit for bit.
pub fn equivariance_defect(k: &SingularKernel, f: &GridFunction, delta: &ShiftVector) -> Result<f64> {
    let a = singular_integral(k, &shift(f, delta)?.function)?;
    let b = shift(&singular_integral(k, f)?, delta)?.function;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
