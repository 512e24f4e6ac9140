use super::{derivative, MultiIndex};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::orlicz::luxemburg_norm;
use crate::young::YoungFunction;

/// Orlicz-Sobolev norms of a grid function over its mask.
#[derive(Debug, Clone)]
pub struct SobolevNorms {
    /// `Σ_{|p|≤m} ‖D^p u‖_M`.
    pub plain: f64,
    /// `Σ_{|p|≤m} d^{|p|} ‖D^p u‖_M`.
    pub weighted: f64,
    pub per_index: Vec<(MultiIndex, f64)>,
}

/// Luxemburg norms of all central-difference derivatives up to order `m`.
pub fn sobolev_norms(u: &GridFunction, m: usize, young: &YoungFunction, d_omega: f64) -> Result<SobolevNorms> {
    let dom = &u.domain;
    if dom.points() < 4 * m {
        return Err(Error::Resolution(format!("N = {} too small for order {m}", dom.points())));
    }
    let mut per_index = Vec::new();
    let (mut plain, mut weighted) = (0.0, 0.0);
    for p in MultiIndex::up_to(dom.n(), m) {
        let v = luxemburg_norm(&derivative(u, &p)?, young)?;
        plain += v;
        weighted += d_omega.powi(p.order() as i32) * v;
        per_index.push((p, v));
    }
    Ok(SobolevNorms { plain, weighted, per_index })
}
