//! N-functions (Young functions): evaluation, inverses, complementary pairs,
//! the doubling condition and Boyd indices.

mod boyd;
mod conjugate;
mod delta2;

use std::path::Path;
use std::sync::Arc;

pub use boyd::{boyd_indices, embedding_exponents, BoydIndices};
pub use conjugate::{complementary, default_conjugate_grid};
pub use delta2::{check_delta2, Delta2Report};

use crate::error::{Error, Result};

const INVERSE_MAX_ITER: usize = 200;
const INVERSE_REL_TOL: f64 = 1e-10;

/// Family tag of a Young function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YoungKind {
    Power { p: f64 },
    PowerLog { p: f64 },
    ExpType,
    DensitySampled,
}

#[derive(Debug, Clone)]
enum Repr {
    Power { p: f64, c: f64 },
    PowerLog { p: f64, c: f64 },
    Exp { c: f64 },
    Sampled(Arc<Sampled>),
}

/// Knot table for density-sampled functions: values and densities,
/// interpolated by cubic Hermite in `(ln t, ln M)` with slopes `t p / M`,
/// so power laws are reproduced exactly, and extended by power laws.
#[derive(Debug)]
struct Sampled {
    t: Vec<f64>,
    m: Vec<f64>,
    lt: Vec<f64>,
    lm: Vec<f64>,
    k: Vec<f64>,
    k_lo: f64,
    k_hi: f64,
}

impl Sampled {
    fn new(t: Vec<f64>, m: Vec<f64>, p: &[f64]) -> Self {
        let k: Vec<f64> = (0..t.len()).map(|i| t[i] * p[i] / m[i]).collect();
        let (k_lo, k_hi) = (k[0], k[t.len() - 1]);
        Self {
            lt: t.iter().map(|x| x.ln()).collect(),
            lm: m.iter().map(|x| x.ln()).collect(),
            t,
            m,
            k,
            k_lo,
            k_hi,
        }
    }

    /// `(M(u), d ln M / d ln u)` for `u > 0`.
    fn log_hermite(&self, u: f64) -> (f64, f64) {
        let n = self.t.len();
        if u <= self.t[0] {
            return (self.m[0] * (u / self.t[0]).powf(self.k_lo), self.k_lo);
        }
        if u >= self.t[n - 1] {
            return (self.m[n - 1] * (u / self.t[n - 1]).powf(self.k_hi), self.k_hi);
        }
        let i = (self.t.partition_point(|&x| x <= u) - 1).min(n - 2);
        let h = self.lt[i + 1] - self.lt[i];
        let s = (u.ln() - self.lt[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let (a, b) = (self.lm[i], self.lm[i + 1]);
        let (ka, kb) = (self.k[i], self.k[i + 1]);
        let l = (2.0 * s3 - 3.0 * s2 + 1.0) * a
            + (s3 - 2.0 * s2 + s) * h * ka
            + (-2.0 * s3 + 3.0 * s2) * b
            + (s3 - s2) * h * kb;
        let dl = ((6.0 * s2 - 6.0 * s) * a + (-6.0 * s2 + 6.0 * s) * b) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * ka
            + (3.0 * s2 - 2.0 * s) * kb;
        (l.exp(), dl.max(0.0))
    }

    fn eval(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        self.log_hermite(u).0
    }

    fn density(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let (m, k) = self.log_hermite(u);
        k * m / u
    }
}

/// An N-function `M` together with its density and trusted domain.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    repr: Repr,
    domain_cap: f64,
    label: String,
}

fn check_exponent(p: f64, c: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidYoung(format!("exponent p = {p} must exceed 1")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidYoung(format!("scale c = {c} must be positive")));
    }
    Ok(())
}

impl YoungFunction {
    /// `M(u) = c |u|^p`.
    pub fn power(p: f64, c: f64) -> Result<Self> {
        check_exponent(p, c)?;
        Ok(Self {
            repr: Repr::Power { p, c },
            domain_cap: 10f64.powf(250.0 / p).min(1e100),
            label: format!("power:p={p},c={c}"),
        })
    }

    /// `M(u) = c |u|^p log(e + |u|)`.
    pub fn power_log(p: f64, c: f64) -> Result<Self> {
        check_exponent(p, c)?;
        Ok(Self {
            repr: Repr::PowerLog { p, c },
            domain_cap: 10f64.powf(250.0 / p).min(1e100),
            label: format!("power-log:p={p},c={c}"),
        })
    }

    /// `M(u) = c (e^{|u|} - |u| - 1)`.
    pub fn exp_type(c: f64) -> Result<Self> {
        check_exponent(2.0, c)?;
        Ok(Self {
            repr: Repr::Exp { c },
            domain_cap: 700.0,
            label: format!("exp:c={c}"),
        })
    }

    /// Density-sampled function from knots `t` with values `m` and densities `p`.
    pub fn from_samples(t: Vec<f64>, m: Vec<f64>, p: Vec<f64>, label: &str) -> Result<Self> {
        let n = t.len();
        if n < 2 || m.len() != n || p.len() != n {
            return Err(Error::InvalidYoung("sample table needs at least two knots".into()));
        }
        for i in 0..n {
            if !(t[i] > 0.0 && m[i] > 0.0 && p[i] >= 0.0)
                || !(t[i].is_finite() && m[i].is_finite() && p[i].is_finite())
            {
                return Err(Error::InvalidYoung(format!("bad knot at t = {}", t[i])));
            }
            if i > 0 && !(t[i] > t[i - 1]) {
                return Err(Error::InvalidYoung("knots must be strictly increasing".into()));
            }
        }
        let sampled = Sampled::new(t, m, &p);
        let (k_lo, k_hi) = (sampled.k_lo, sampled.k_hi);
        if !(k_lo > 1.0 && k_hi > 1.0) {
            return Err(Error::InvalidYoung(format!(
                "tail exponents {k_lo:.4}, {k_hi:.4} do not exceed 1 (M(u)/u limits fail)"
            )));
        }
        Ok(Self {
            domain_cap: sampled.t[n - 1],
            repr: Repr::Sampled(Arc::new(sampled)),
            label: label.to_string(),
        })
    }

    /// Function given by its density on knots `t`. Values come from the
    /// trapezoid rule, with a linear density assumed below the first knot.
    pub fn from_density_table(t: Vec<f64>, p: Vec<f64>, label: &str) -> Result<Self> {
        if t.len() < 2 || p.len() != t.len() {
            return Err(Error::InvalidYoung("density table needs at least two rows".into()));
        }
        for w in p.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidYoung("density must be nondecreasing".into()));
            }
        }
        let mut m = Vec::with_capacity(t.len());
        m.push(0.5 * t[0] * p[0]);
        for i in 1..t.len() {
            let prev = m[i - 1];
            m.push(prev + 0.5 * (p[i] + p[i - 1]) * (t[i] - t[i - 1]));
        }
        Self::from_samples(t, m, p, label)
    }

    /// Reads a two-column CSV `t,p(t)` (an optional header line is skipped).
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut t = Vec::new();
        let mut p = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let (a, b) = match (parts.next(), parts.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Parse(format!("{}:{}: expected t,p", path.display(), lineno + 1)))
                }
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    t.push(a);
                    p.push(b);
                }
                _ if t.is_empty() && lineno == 0 => continue,
                _ => {
                    return Err(Error::Parse(format!(
                        "{}:{}: non-numeric entry",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Self::from_density_table(t, p, &format!("table:{}", path.display()))
    }

    /// Parses `power:p=3[,c=..]`, `power-log:p=2[,c=..]`, `exp[:c=..]` or `table:<path>`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (family, rest) = match text.split_once(':') {
            Some((f, r)) => (f.trim(), r.trim()),
            None => (text, ""),
        };
        if family == "table" {
            if rest.is_empty() {
                return Err(Error::Parse("table: needs a path".into()));
            }
            return Self::from_table_file(Path::new(rest));
        }
        let mut p = None;
        let mut c = 1.0;
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in Young function, got '{item}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{}' in Young function", v.trim())))?;
            match k.trim() {
                "p" => p = Some(v),
                "c" => c = v,
                other => return Err(Error::Parse(format!("unknown young parameter '{other}'"))),
            }
        }
        match family {
            "power" => Self::power(p.ok_or_else(|| Error::Parse("power needs p=".into()))?, c),
            "power-log" => Self::power_log(p.ok_or_else(|| Error::Parse("power-log needs p=".into()))?, c),
            "exp" => {
                if p.is_some() {
                    return Err(Error::Parse("exp takes no exponent".into()));
                }
                Self::exp_type(c)
            }
            other => Err(Error::Parse(format!("unknown young family '{other}'"))),
        }
    }

    pub fn kind(&self) -> YoungKind {
        match &self.repr {
            Repr::Power { p, .. } => YoungKind::Power { p: *p },
            Repr::PowerLog { p, .. } => YoungKind::PowerLog { p: *p },
            Repr::Exp { .. } => YoungKind::ExpType,
            Repr::Sampled(_) => YoungKind::DensitySampled,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_cap(&self) -> f64 {
        self.domain_cap
    }

    /// M(u); even in u.
    pub fn evaluate(&self, u: f64) -> f64 {
        let u = u.abs();
        match &self.repr {
            Repr::Power { p, c } => c * u.powf(*p),
            Repr::PowerLog { p, c } => c * u.powf(*p) * (std::f64::consts::E + u).ln(),
            Repr::Exp { c } => {
                if u < 1e-3 {
                    c * u * u * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0)))
                } else {
                    c * (u.exp_m1() - u)
                }
            }
            Repr::Sampled(s) => s.eval(u),
        }
    }

    /// Right derivative p(t) of M for t >= 0.
    pub fn density(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.repr {
            Repr::Power { p, c } => c * p * t.powf(p - 1.0),
            Repr::PowerLog { p, c } => {
                let e = std::f64::consts::E;
                c * (p * t.powf(p - 1.0) * (e + t).ln() + t.powf(*p) / (e + t))
            }
            Repr::Exp { c } => c * t.exp_m1(),
            Repr::Sampled(s) => s.density(t),
        }
    }

    /// Largest value M takes on the trusted domain.
    pub fn range_max(&self) -> f64 {
        self.evaluate(self.domain_cap)
    }

    /// M⁻¹(y) on the positive axis by bracketing and bisection.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::InvalidArgument(format!("inverse needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let max = self.range_max();
        if y > max {
            return Err(Error::Range { y, max });
        }
        let cap = self.domain_cap;
        let mut hi = 1.0f64.min(cap);
        while self.evaluate(hi) < y {
            hi = (hi * 2.0).min(cap);
        }
        let mut lo = hi * 0.5;
        while lo > 1e-300 && self.evaluate(lo) > y {
            lo *= 0.5;
        }
        if self.evaluate(lo) > y {
            lo = 0.0;
        }
        for _ in 0..INVERSE_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.evaluate(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        let u = 0.5 * (lo + hi);
        let err = (self.evaluate(u) - y).abs();
        if err > INVERSE_REL_TOL * y.max(1.0) && hi - lo > f64::EPSILON * hi * 4.0 {
            return Err(Error::Bracket(format!("inverse did not converge at y = {y}")));
        }
        Ok(u)
    }
}
