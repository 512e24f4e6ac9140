use super::YoungFunction;
use crate::error::{Error, Result};
use crate::numeric::log_grid;

/// Sampled doubling-ratio diagnostic.
#[derive(Debug, Clone)]
pub struct Delta2Report {
    pub satisfied: bool,
    pub k_hat: f64,
    pub u0_used: f64,
    pub worst_ratio_trace: Vec<(f64, f64)>,
}

/// Samples `M(2u)/M(u)` on `[u0, u_max]`.
///
/// The condition is declared satisfied when the ratio is finite and the sup
/// over the last decade stays within 10% of the sup over the earlier samples
/// (the first half, in log scale, when the window is shorter than two
/// decades).
pub fn check_delta2(m: &YoungFunction, u0: f64, u_max: f64) -> Result<Delta2Report> {
    if !(u0 > 0.0 && u_max > u0) {
        return Err(Error::InvalidArgument(format!("need 0 < u0 < u_max, got {u0}, {u_max}")));
    }
    if u_max > m.domain_cap() / 2.0 {
        return Err(Error::Range { y: u_max, max: m.domain_cap() / 2.0 });
    }
    let mut trace = Vec::new();
    for u in log_grid(u0, u_max, 20) {
        let a = m.evaluate(u);
        if !(a > 0.0) {
            return Err(Error::InvalidYoung(format!("M({u}) = {a} is not positive")));
        }
        trace.push((u, m.evaluate(2.0 * u) / a));
    }
    let k_hat = trace.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    // last decade against everything before it; short windows split at the
    // geometric midpoint
    let split = if u_max >= 100.0 * u0 { u_max / 10.0 } else { (u0 * u_max).sqrt() };
    let early = trace.iter().filter(|t| t.0 < split).map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let late = trace.iter().filter(|t| t.0 >= split).map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let reference = if early.is_finite() { early } else { k_hat };
    let satisfied = k_hat.is_finite() && late <= 1.1 * reference;
    Ok(Delta2Report { satisfied, k_hat, u0_used: u0, worst_ratio_trace: trace })
}
