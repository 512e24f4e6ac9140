use rayon::prelude::*;

use super::YoungFunction;
use crate::error::{Error, Result};
use crate::numeric::{golden_max, log_grid};

const WINDOW_LO: f64 = 1e-30;
const WINDOW_PER_DECADE: usize = 8;

/// Default knot grid for `complementary`: log-spaced from
/// `max(1e-8, p(1e-25))` up to `min(1e16, p(cap/10))`, 25 points per decade.
/// The lower end keeps every maximiser inside the search window.
pub fn default_conjugate_grid(m: &YoungFunction) -> Vec<f64> {
    let lo = m.density(1e-25).max(1e-8);
    let top = m.density(0.1 * m.domain_cap()).min(1e16);
    log_grid(lo, top.max(10.0 * lo), 25)
}

fn conjugate_at(m: &YoungFunction, window: &[f64], v: f64) -> Result<(f64, f64)> {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &u) in window.iter().enumerate() {
        let val = u * v - m.evaluate(u);
        if val > best_val {
            best_val = val;
            best = i;
        }
    }
    if best == 0 || best + 1 == window.len() {
        return Err(Error::WindowOverflow { v });
    }
    let (u, val) = golden_max(|u| u * v - m.evaluate(u), window[best - 1], window[best + 1], 1e-15 * window[best]);
    let (u, val) = if val >= best_val { (u, val) } else { (window[best], best_val) };
    Ok((u, val))
}

/// Complementary N-function `N(v) = max_u {u|v| - M(u)}`, sampled on `v_grid`.
///
/// The maximiser at each knot is also the density of `N` there, so the
/// result carries exact knot derivatives for its Hermite interpolant.
pub fn complementary(m: &YoungFunction, v_grid: &[f64]) -> Result<YoungFunction> {
    if v_grid.len() < 2 {
        return Err(Error::InvalidArgument("v_grid needs at least two points".into()));
    }
    for w in v_grid.windows(2) {
        if !(w[0] > 0.0 && w[1] > w[0]) {
            return Err(Error::InvalidArgument("v_grid must be positive and increasing".into()));
        }
    }
    let window = log_grid(WINDOW_LO, m.domain_cap(), WINDOW_PER_DECADE);
    let pairs: Vec<(f64, f64)> = v_grid
        .par_iter()
        .map(|&v| conjugate_at(m, &window, v))
        .collect::<Result<_>>()?;
    let dens: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vals: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    YoungFunction::from_samples(v_grid.to_vec(), vals, dens, &format!("conj({})", m.label()))
}

impl YoungFunction {
    /// Complementary function on the default grid.
    pub fn conjugate(&self) -> Result<YoungFunction> {
        complementary(self, &default_conjugate_grid(self))
    }
}
