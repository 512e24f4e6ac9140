use rayon::prelude::*;

use super::YoungFunction;
use crate::error::{Error, Result};
use crate::numeric::{linear_fit, logspace};

/// Estimated Boyd indices.
#[derive(Debug, Clone)]
pub struct BoydIndices {
    pub alpha: f64,
    pub beta: f64,
    pub h_samples: Vec<(f64, f64)>,
    pub fit_residual: f64,
}

const EMBEDDING_MARGIN: f64 = 0.05;
/// Indices closer than this to 0 or 1 are treated as the non-reflexive regime.
const REFLEXIVE_GUARD: f64 = 0.05;

fn h_hat(m: &YoungFunction, xs: &[f64], t: f64) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &x in xs {
        let r = m.inverse(x)? / m.inverse(t * x)?;
        best = best.max(r);
    }
    Ok(best)
}

/// `ĥ(t) = max_x M⁻¹(x)/M⁻¹(tx)` over `x ∈ [1e3, 1e9]`; `alpha` and `beta`
/// are minus the fitted slopes of `log ĥ` against `log t` over
/// `t ∈ [1e2, 1e6]` and `t ∈ [1e-6, 1e-2]`.
///
/// If the two slope fits cross (`alpha > beta`, which happens for slowly
/// varying corrections) both are replaced by their mean.
pub fn boyd_indices(m: &YoungFunction) -> Result<BoydIndices> {
    let xs = logspace(1e3, 1e9, 61);
    let ta = logspace(1e2, 1e6, 21);
    let tb = logspace(1e-6, 1e-2, 21);
    let mut ts: Vec<f64> = tb.iter().chain(ta.iter()).cloned().collect();
    ts.sort_by(f64::total_cmp);
    let hs: Vec<f64> = ts.par_iter().map(|&t| h_hat(m, &xs, t)).collect::<Result<_>>()?;
    let trace: Vec<(f64, f64)> = ts.iter().cloned().zip(hs.iter().cloned()).collect();
    for w in trace.windows(2) {
        if w[1].1 > w[0].1 * (1.0 + 1e-6) {
            return Err(Error::UnstableLimsup { trace });
        }
    }
    let (la, lb): (Vec<_>, Vec<_>) = trace.iter().partition(|(t, _)| *t > 1.0);
    let fit = |pts: &[&(f64, f64)]| {
        let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
        linear_fit(&x, &y)
    };
    let (_, sa, ra) = fit(&la);
    let (_, sb, rb) = fit(&lb);
    let mut alpha = -sa;
    let mut beta = -sb;
    if alpha > beta {
        let mean = 0.5 * (alpha + beta);
        alpha = mean;
        beta = mean;
    }
    Ok(BoydIndices {
        alpha: alpha.clamp(0.0, 1.0),
        beta: beta.clamp(0.0, 1.0),
        h_samples: trace,
        fit_residual: ra.max(rb),
    })
}

/// Exponents `(p, q)` with `L_q ⊂ L_M ⊂ L_p` read off the Boyd indices.
pub fn embedding_exponents(b: &BoydIndices) -> Result<(f64, f64)> {
    if b.alpha < REFLEXIVE_GUARD || b.beta > 1.0 - REFLEXIVE_GUARD || b.alpha > b.beta {
        return Err(Error::NoReflexiveWindow { alpha: b.alpha, beta: b.beta });
    }
    let p = (1.0 / b.beta * (1.0 - EMBEDDING_MARGIN)).max(1.0);
    let q = 1.0 / b.alpha * (1.0 + EMBEDDING_MARGIN);
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_indices() {
        let m = YoungFunction::power(2.0, 1.0).unwrap();
        let b = boyd_indices(&m).unwrap();
        assert!((b.alpha - 0.5).abs() < 0.02 && (b.beta - 0.5).abs() < 0.02);
        let (p, q) = embedding_exponents(&b).unwrap();
        assert!((p - 1.9).abs() < 0.1 && (q - 2.1).abs() < 0.1);
    }

    #[test]
    fn exp_has_no_window() {
        let m = YoungFunction::exp_type(1.0).unwrap();
        let b = boyd_indices(&m).unwrap();
        assert!(b.alpha < 0.05);
        assert!(matches!(embedding_exponents(&b), Err(Error::NoReflexiveWindow { .. })));
    }

    #[test]
    fn cube_indices() {
        let m = YoungFunction::power(3.0, 1.0).unwrap();
        let b = boyd_indices(&m).unwrap();
        let (p, q) = embedding_exponents(&b).unwrap();
        assert!((p - 2.85).abs() < 0.05 && (q - 3.15).abs() < 0.05);
    }
}
