use super::{EllipticOperator, MultiIndex};
use crate::error::{Error, Result};

/// Quasi-uniform unit vectors: the pair ±1 in 1-D, equally spaced angles in
/// 2-D and a Fibonacci lattice in 3-D.
pub fn sphere_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct EllipticityReport {
    /// `(-1)^{m/2} Q` was uniformly negative and the operator must be negated.
    pub sign_flipped: bool,
    /// `min|Q| / max|Q|` over the samples.
    pub ratio: f64,
    pub min_abs: f64,
    pub max_abs: f64,
}

/// Checks that `(-1)^{m/2} Q(x, η)` keeps one strict sign over all samples.
pub fn ellipticity_check(
    l: &EllipticOperator,
    x_samples: &[Vec<f64>],
    eta_samples: &[Vec<f64>],
) -> Result<EllipticityReport> {
    if x_samples.is_empty() || eta_samples.is_empty() {
        return Err(Error::InvalidArgument("ellipticity check needs sample points and directions".into()));
    }
    let sign = if (l.m() / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let (mut pos, mut neg) = (0usize, 0usize);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for x in x_samples {
        for eta in eta_samples {
            let q = sign * l.characteristic_form(x, eta);
            if q > 0.0 {
                pos += 1;
            } else if q < 0.0 {
                neg += 1;
            } else {
                return Err(Error::NotElliptic(format!("Q vanishes at x = {x:?}, eta = {eta:?}")));
            }
            lo = lo.min(q.abs());
            hi = hi.max(q.abs());
        }
    }
    if pos > 0 && neg > 0 {
        return Err(Error::NotElliptic(format!("characteristic form changes sign ({pos} positive, {neg} negative)")));
    }
    Ok(EllipticityReport { sign_flipped: neg > 0, ratio: lo / hi, min_abs: lo, max_abs: hi })
}

#[derive(Debug, Clone)]
pub struct PropertyPRow {
    pub r: f64,
    /// `max_p sup_{B_r} |a_p|`.
    pub sup_abs: f64,
    /// `max_{|p|=m} sup_{B_r} |a_p(x) - a_p(x0)|`.
    pub oscillation: f64,
}

#[derive(Debug, Clone)]
pub struct PropertyPReport {
    pub rows: Vec<PropertyPRow>,
    pub passed: bool,
}

fn ball_samples(x0: &[f64], r: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let n = x0.len();
    let k = per_axis as i64;
    let total = (2 * k + 1).pow(n as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut g = vec![0.0; n];
        for v in g.iter_mut() {
            *v = (rem % (2 * k + 1) - k) as f64 / k as f64;
            rem /= 2 * k + 1;
        }
        if g.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12 {
            out.push(g.iter().zip(x0).map(|(a, b)| b + r * a).collect());
        }
    }
    out
}

/// Boundedness and continuity-at-`x0` diagnostics on shrinking balls.
///
/// Passes when every sup is finite, the oscillation does not grow along the
/// radii, and it either vanishes or falls at least by half from the first
/// radius to the last.
pub fn property_p_check(l: &EllipticOperator, x0: &[f64], radii: &[f64]) -> Result<PropertyPReport> {
    if x0.len() != l.n() {
        return Err(Error::Dimension(format!("x0 has {} entries, operator is {}-D", x0.len(), l.n())));
    }
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] < w[0])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive and strictly decreasing".into()));
    }
    let per_axis = match l.n() {
        1 => 200,
        2 => 30,
        _ => 10,
    };
    let leading: Vec<&MultiIndex> = l.coefficients().map(|(p, _)| p).filter(|p| p.order() == l.m()).collect();
    let rows: Vec<PropertyPRow> = radii
        .iter()
        .map(|&r| {
            let pts = ball_samples(x0, r, per_axis);
            let mut sup_abs = 0.0f64;
            let mut osc = 0.0f64;
            for (p, c) in l.coefficients() {
                let at0 = c.eval(x0);
                for x in &pts {
                    let v = c.eval(x);
                    sup_abs = if v.is_finite() { sup_abs.max(v.abs()) } else { f64::INFINITY };
                    if leading.contains(&p) {
                        osc = osc.max((v - at0).abs());
                    }
                }
            }
            PropertyPRow { r, sup_abs, oscillation: osc }
        })
        .collect();
    let finite = rows.iter().all(|r| r.sup_abs.is_finite() && r.oscillation.is_finite());
    let monotone = rows.windows(2).all(|w| w[1].oscillation <= w[0].oscillation * (1.0 + 1e-9) + 1e-15);
    let first = rows[0].oscillation;
    let last = rows[rows.len() - 1].oscillation;
    let decays = last <= 1e-12 || (rows.len() > 1 && last <= 0.5 * first);
    Ok(PropertyPReport { passed: finite && monotone && decays, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Coefficient;

    fn dirs() -> Vec<Vec<f64>> {
        sphere_directions(2, 64)
    }

    #[test]
    fn laplacian_signs() {
        let x = vec![vec![0.0, 0.0]];
        let r = ellipticity_check(&EllipticOperator::neg_laplacian(2), &x, &dirs()).unwrap();
        assert!(!r.sign_flipped && (r.ratio - 1.0).abs() < 1e-12);
        let r = ellipticity_check(&EllipticOperator::neg_laplacian(2).negated(), &x, &dirs()).unwrap();
        assert!(r.sign_flipped);
        let wave = EllipticOperator::second_order(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(matches!(ellipticity_check(&wave, &x, &dirs()), Err(Error::NotElliptic(_))));
    }

    #[test]
    fn ellipticity_is_scale_invariant() {
        let l = EllipticOperator::second_order(2, &[-2.0, 0.5, 0.5, -1.0]).unwrap();
        let x = vec![vec![0.0, 0.0]];
        let d3: Vec<Vec<f64>> = dirs().iter().map(|e| e.iter().map(|v| 3.0 * v).collect()).collect();
        let a = ellipticity_check(&l, &x, &dirs()).unwrap();
        let b = ellipticity_check(&l, &x, &d3).unwrap();
        assert_eq!(a.sign_flipped, b.sign_flipped);
        assert!((a.ratio - b.ratio).abs() < 1e-12);
    }

    fn with_leading(f: impl Fn(&[f64]) -> f64 + Send + Sync + Clone + 'static) -> EllipticOperator {
        let g = f.clone();
        EllipticOperator::new(
            2,
            2,
            vec![
                (MultiIndex::new(&[2, 0]), Coefficient::func(move |x| -f(x))),
                (MultiIndex::new(&[0, 2]), Coefficient::func(move |x| -g(x))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn property_p_examples() {
        let radii = [0.4, 0.2, 0.1, 0.05];
        let lip = property_p_check(&with_leading(|x| 1.0 + x[0]), &[0.0, 0.0], &radii).unwrap();
        assert!(lip.passed);
        for row in &lip.rows {
            assert!((row.oscillation - row.r).abs() < 1e-12);
        }
        let jump = property_p_check(&with_leading(|x| x[0].signum()), &[0.0, 0.0], &radii).unwrap();
        assert!(!jump.passed);
        assert!(jump.rows.iter().all(|r| (r.oscillation - 2.0).abs() < 1e-12));
        let holder = property_p_check(&with_leading(|x| 1.0 + x[0].abs().sqrt()), &[0.0, 0.0], &radii).unwrap();
        assert!(holder.passed);
        for row in &holder.rows {
            assert!((row.oscillation - row.r.sqrt()).abs() < 1e-12);
        }
    }
}
