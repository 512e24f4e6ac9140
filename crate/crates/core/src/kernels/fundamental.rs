use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numeric::logspace;
use crate::operator::{sphere_directions, EllipticOperator, MultiIndex};

/// Whether `J` is homogeneous or carries a logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Power,
    Log,
}

/// Radial profile `F(s)` in `J(x) = κ F(xᵀCx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    /// `s^a`
    Pow(f64),
    /// `log s`
    Log,
    /// `s log s`
    SLogS,
}

impl Profile {
    fn derivs(&self, s: f64) -> [f64; 5] {
        match *self {
            Profile::Pow(a) => {
                let mut out = [0.0; 5];
                let mut c = 1.0;
                for (k, o) in out.iter_mut().enumerate() {
                    *o = c * s.powf(a - k as f64);
                    c *= a - k as f64;
                }
                out
            }
            Profile::Log => [s.ln(), 1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s), -6.0 / (s * s * s * s)],
            Profile::SLogS => [s * s.ln(), s.ln() + 1.0, 1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s)],
        }
    }
}

/// Closed-form fundamental solution `J` with `L₀ J = δ`.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    operator: EllipticOperator,
    n: usize,
    m: usize,
    branch: Branch,
    kappa: f64,
    cmat: [[f64; 3]; 3],
    profile: Profile,
    decay_constant: f64,
    label: String,
}

fn det(a: &[[f64; 3]; 3], n: usize) -> f64 {
    match n {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
    }
}

fn inverse(a: &[[f64; 3]; 3], n: usize) -> [[f64; 3]; 3] {
    let d = det(a, n);
    let mut out = [[0.0; 3]; 3];
    match n {
        1 => out[0][0] = 1.0 / d,
        2 => {
            out[0][0] = a[1][1] / d;
            out[1][1] = a[0][0] / d;
            out[0][1] = -a[0][1] / d;
            out[1][0] = -a[1][0] / d;
        }
        _ => {
            for i in 0..3 {
                for j in 0..3 {
                    let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
                    let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
                    out[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / d;
                }
            }
        }
    }
    out
}

/// Sylvester's criterion on leading minors.
fn positive_definite(a: &[[f64; 3]; 3], n: usize) -> bool {
    (1..=n).all(|k| det(a, k) > 0.0)
}

fn matrix_of(l0: &EllipticOperator) -> [[f64; 3]; 3] {
    let n = l0.n();
    let mut a = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            let mut e = vec![0; n];
            e[i] += 1;
            e[j] += 1;
            let v = l0.coefficient_at(&MultiIndex::new(&e), &vec![0.0; n]);
            a[i][j] = if i == j { v } else { 0.5 * v };
        }
    }
    a
}

/// The constant `c` when `L₀ = c Δ²`.
fn bilaplacian_constant(l0: &EllipticOperator) -> Option<f64> {
    let n = l0.n();
    let lead = l0.constant_leading()?;
    let mut e = vec![0; n];
    e[0] = 4;
    let c = lead.iter().find(|(p, _)| p.entries() == e.as_slice()).map(|(_, v)| *v)?;
    if c == 0.0 {
        return None;
    }
    let reference = EllipticOperator::bilaplacian(n, c);
    for p in MultiIndex::of_order(n, 4) {
        let want = reference.coefficient_at(&p, &vec![0.0; n]);
        let got = lead.iter().find(|(q, _)| *q == p).map_or(0.0, |(_, v)| *v);
        if (want - got).abs() > 1e-12 * c.abs() {
            return None;
        }
    }
    Some(c)
}

/// Closed-form `J` for constant-coefficient, pure-order operators:
/// second-order operators with definite symmetric matrix in 1-3 dimensions
/// (affine images of the Newton/log potential) and `c Δ²` in 2-3 dimensions.
pub fn fundamental_solution(l0: &EllipticOperator) -> Result<FundamentalSolution> {
    let (n, m) = (l0.n(), l0.m());
    if !l0.is_constant() || !l0.is_pure_order() {
        return Err(Error::Capability("fundamental solution needs a constant-coefficient pure-order operator".into()));
    }
    let branch = if n % 2 == 0 && n <= m { Branch::Log } else { Branch::Power };
    let (kappa, cmat, profile, label) = match (n, m) {
        (_, 2) => {
            let a = matrix_of(l0);
            let (b, sign) = if positive_definite(&a.map(|r| r.map(|v| -v)), n) {
                (a.map(|r| r.map(|v| -v)), 1.0)
            } else if positive_definite(&a, n) {
                (a, -1.0)
            } else {
                return Err(Error::NotElliptic("second-order matrix is not definite".into()));
            };
            let db = det(&b, n);
            let c = inverse(&b, n);
            match n {
                1 => (sign * -0.5 / db.sqrt(), c, Profile::Pow(0.5), "laplace1d"),
                2 => (sign * -1.0 / (4.0 * PI * db.sqrt()), c, Profile::Log, "laplace2d"),
                _ => (sign / (4.0 * PI * db.sqrt()), c, Profile::Pow(-0.5), "laplace3d"),
            }
        }
        (2 | 3, 4) => {
            let c = bilaplacian_constant(l0)
                .ok_or_else(|| Error::Capability("fourth-order kernels are limited to c·Δ²".into()))?;
            let mut id = [[0.0; 3]; 3];
            for (k, row) in id.iter_mut().enumerate().take(n) {
                row[k] = 1.0;
            }
            if n == 2 {
                (1.0 / (16.0 * PI * c), id, Profile::SLogS, "biharmonic2d")
            } else {
                (-1.0 / (8.0 * PI * c), id, Profile::Pow(0.5), "biharmonic3d")
            }
        }
        _ => return Err(Error::Capability(format!("no fundamental solution for n = {n}, m = {m}"))),
    };
    let mut j = FundamentalSolution {
        operator: l0.clone(),
        n,
        m,
        branch,
        kappa,
        cmat,
        profile,
        decay_constant: 0.0,
        label: label.to_string(),
    };
    j.decay_constant = j.measure_decay();
    Ok(j)
}

impl FundamentalSolution {
    pub fn operator(&self) -> &EllipticOperator {
        &self.operator
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn branch(&self) -> Branch {
        self.branch
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    /// `max |∂^p J(x)|·|x|^{n+|p|-m}` over the annulus `1e-3 ≤ |x| ≤ 1`, all `|p| ≤ m`.
    pub fn decay_constant(&self) -> f64 {
        self.decay_constant
    }

    fn quad(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += x[i] * self.cmat[i][j] * x[j];
            }
        }
        s
    }

    /// `J(x)` for `x ≠ 0`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let s = self.quad(x);
        self.kappa * self.profile.derivs(s)[0]
    }

    fn jet(&self, x: &[f64]) -> Jet {
        let vars: Vec<Jet> = (0..self.n).map(|k| Jet::variable(k, x[k])).collect();
        let mut s = Jet::constant(0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.cmat[i][j] != 0.0 {
                    s = s.add(&vars[i].mul(&vars[j]).scale(self.cmat[i][j]));
                }
            }
        }
        let d = self.profile.derivs(s.value());
        s.compose(&d).scale(self.kappa)
    }

    /// `∂^p J(x)` for `x ≠ 0`, `|p| ≤ 4`.
    pub fn derivative(&self, p: &MultiIndex, x: &[f64]) -> f64 {
        if p.order() == 0 {
            return self.evaluate(x);
        }
        self.jet(x).derivative(p.entries())
    }

    fn measure_decay(&self) -> f64 {
        let dirs = sphere_directions(self.n, if self.n == 1 { 2 } else { 32 });
        let mut worst = 0.0f64;
        for p in MultiIndex::up_to(self.n, self.m) {
            let k = self.n as f64 + p.order() as f64 - self.m as f64;
            for rho in logspace(1e-3, 1.0, 13) {
                for d in &dirs {
                    let x: Vec<f64> = d.iter().map(|v| v * rho).collect();
                    worst = worst.max(self.derivative(&p, &x).abs() * rho.powf(k));
                }
            }
        }
        worst
    }
}
