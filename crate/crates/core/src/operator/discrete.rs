use super::{EllipticOperator, MultiIndex};
use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction};

fn stride(dom: &GridDomain, axis: usize) -> usize {
    dom.points().pow((dom.n() - 1 - axis) as u32)
}

/// Applies `op(prev, centre, next)` along one axis with periodic wrap.
fn along_axis<F: Fn(f64, f64, f64) -> f64>(dom: &GridDomain, v: &[f64], axis: usize, op: F) -> Vec<f64> {
    let np = dom.points();
    let s = stride(dom, axis);
    let block = s * np;
    let mut out = vec![0.0; v.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let pos = (i / s) % np;
        let base = i - pos * s;
        let prev = base + ((pos + np - 1) % np) * s;
        let next = base + ((pos + 1) % np) * s;
        debug_assert!(next < base + block);
        *o = op(v[prev], v[i], v[next]);
    }
    out
}

/// Central-difference `D^p u`: per axis, `δ₂^q δ₁^r` with `p_k = 2q + r`.
pub fn derivative(u: &GridFunction, p: &MultiIndex) -> Result<GridFunction> {
    let dom = &u.domain;
    if p.dim() != dom.n() {
        return Err(Error::Dimension(format!("multi-index {p} on a {}-D grid", dom.n())));
    }
    let h = dom.h();
    let mut v = u.values.clone();
    for (axis, &k) in p.entries().iter().enumerate() {
        for _ in 0..k / 2 {
            let c = 1.0 / (h * h);
            v = along_axis(dom, &v, axis, |a, b, d| (a - 2.0 * b + d) * c);
        }
        if k % 2 == 1 {
            let c = 0.5 / h;
            v = along_axis(dom, &v, axis, |a, _, d| (d - a) * c);
        }
    }
    Ok(GridFunction { domain: dom.clone(), values: v })
}

/// Operator with coefficients sampled on a fixed lattice.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    domain: GridDomain,
    m: usize,
    terms: Vec<(MultiIndex, Vec<f64>)>,
}

impl DiscreteOperator {
    pub fn new(l: &EllipticOperator, domain: &GridDomain) -> Result<Self> {
        if l.n() != domain.n() {
            return Err(Error::Dimension(format!("{}-D operator on a {}-D grid", l.n(), domain.n())));
        }
        if domain.points() < 4 * l.m() {
            return Err(Error::Resolution(format!(
                "N = {} too small for order {} differences (need N >= {})",
                domain.points(),
                l.m(),
                4 * l.m()
            )));
        }
        let n = domain.n();
        let mut terms = Vec::new();
        for (p, c) in l.coefficients() {
            let samples: Vec<f64> = match c.as_const() {
                Some(v) => vec![v; domain.len()],
                None => (0..domain.len()).map(|i| c.eval(&domain.coords(i)[..n])).collect(),
            };
            if let Some(i) = samples.iter().zip(domain.mask()).position(|(v, &b)| b && !v.is_finite()) {
                return Err(Error::Config(format!(
                    "coefficient {p} is not finite at node {:?}",
                    &domain.coords(i)[..n]
                )));
            }
            // outside the mask, non-finite samples are replaced by zero
            let samples = samples.into_iter().map(|v| if v.is_finite() { v } else { 0.0 }).collect();
            terms.push((p.clone(), samples));
        }
        Ok(Self { domain: domain.clone(), m: l.m(), terms })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[(MultiIndex, Vec<f64>)] {
        &self.terms
    }

    /// `Σ a_p D^p u`, optionally restricted to terms with `filter(|p|)`.
    pub fn apply_filtered<F: Fn(usize) -> bool>(&self, u: &GridFunction, filter: F) -> Result<GridFunction> {
        self.domain.check_same(&u.domain)?;
        let mut out = vec![0.0; u.len()];
        for (p, a) in &self.terms {
            if !filter(p.order()) {
                continue;
            }
            let d = derivative(u, p)?;
            for ((o, &av), &dv) in out.iter_mut().zip(a).zip(&d.values) {
                *o += av * dv;
            }
        }
        Ok(GridFunction { domain: u.domain.clone(), values: out })
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        self.apply_filtered(u, |_| true)
    }
}

/// `L u` with coefficients sampled on `u`'s grid.
pub fn apply(l: &EllipticOperator, u: &GridFunction) -> Result<GridFunction> {
    DiscreteOperator::new(l, &u.domain)?.apply(u)
}
