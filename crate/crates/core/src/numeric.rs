//! Small numerical helpers shared across modules.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// `count` points spaced logarithmically from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Log-spaced points with roughly `per_decade` points per decade.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10().max(0.0);
    let count = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
    logspace(lo, hi, count)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is shorter than `tol`. Returns `(x, f(x))`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), a, b, tol);
    (x, -v)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[order - 1 - i] = wi;
    }
    (x, w)
}

/// Least-squares line `y = a + b x`; returns `(a, b, rms_residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = CompensatedSum::default();
    for v in it {
        s.add(v);
    }
    s.value()
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Volume of the unit ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => {
            // recursion V_n = 2 pi / n * V_{n-2}
            2.0 * PI / n as f64 * unit_ball_volume(n - 2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_finds_peak() {
        let (x, v) = golden_max(|x| -(x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-14);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn fit_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (a, b, r) = linear_fit(&x, &y);
        assert!((a - 1.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14 && r < 1e-14);
    }

    #[test]
    fn logspace_endpoints() {
        let v = logspace(1e-3, 1e3, 7);
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[6], 1e3);
        assert!((v[3] - 1.0).abs() < 1e-14);
    }
}
