//! Elliptic operators `L = Σ_{|p|≤m} a_p(x) ∂^p`, their finite-difference
//! application, characteristic form and coefficient diagnostics.

mod checks;
mod discrete;
mod sobolev;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use checks::{
    ellipticity_check, property_p_check, sphere_directions, EllipticityReport, PropertyPReport, PropertyPRow,
};
pub use discrete::{apply, derivative, DiscreteOperator};
pub use sobolev::{sobolev_norms, SobolevNorms};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric::factorial;

/// Multi-index `p = (p_1, ..., p_n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: &[usize]) -> Self {
        Self(entries.to_vec())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|p|`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// `p!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// `η^p`.
    pub fn monomial(&self, eta: &[f64]) -> f64 {
        self.0.iter().zip(eta).map(|(&k, &e)| e.powi(k as i32)).product()
    }

    /// All multi-indices in `n` variables with `|p| = k`, lexicographically descending.
    pub fn of_order(n: usize, k: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() + 1 == n {
                cur.push(k);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for first in (0..=k).rev() {
                cur.push(first);
                rec(n, k - first, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, k, &mut Vec::new(), &mut out);
        out
    }

    /// All multi-indices with `|p| ≤ m`, ordered by order.
    pub fn up_to(n: usize, m: usize) -> Vec<MultiIndex> {
        (0..=m).flat_map(|k| Self::of_order(n, k)).collect()
    }

    /// Parses `(p1,...,pn)`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("multi-index '{t}' must look like (p1,...,pn)")))?;
        let entries = inner
            .split(',')
            .map(|v| v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad multi-index entry in '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(entries))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

type CoefFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A coefficient `a_p(x)`.
#[derive(Clone)]
pub enum Coefficient {
    Const(f64),
    Expr(Arc<Expr>),
    Func(CoefFn),
}

impl Coefficient {
    pub fn func<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Coefficient::Func(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Expr(e) => e.eval(x),
            Coefficient::Func(f) => f(x),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Coefficient::Const(c) => Some(*c),
            Coefficient::Expr(e) => e.constant(),
            Coefficient::Func(_) => None,
        }
    }

    fn negated(&self) -> Self {
        match self {
            Coefficient::Const(c) => Coefficient::Const(-c),
            other => {
                let inner = other.clone();
                Coefficient::func(move |x| -inner.eval(x))
            }
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "Const({c})"),
            Coefficient::Expr(e) => write!(f, "Expr({e})"),
            Coefficient::Func(_) => write!(f, "Func(..)"),
        }
    }
}

/// Linear differential operator of even order `m` in `n` variables.
#[derive(Debug, Clone)]
pub struct EllipticOperator {
    n: usize,
    m: usize,
    coeffs: BTreeMap<MultiIndex, Coefficient>,
    frozen_at: Option<Vec<f64>>,
}

impl EllipticOperator {
    pub fn new(n: usize, m: usize, coeffs: Vec<(MultiIndex, Coefficient)>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::Dimension(format!("dimension {n} not in 1..=3")));
        }
        if m == 0 || m % 2 != 0 {
            return Err(Error::Config(format!("order m = {m} must be even and positive")));
        }
        let mut map = BTreeMap::new();
        for (p, c) in coeffs {
            if p.dim() != n {
                return Err(Error::Config(format!("multi-index {p} has {} entries, expected {n}", p.dim())));
            }
            if p.order() > m {
                return Err(Error::Config(format!("multi-index {p} exceeds order {m}")));
            }
            if map.insert(p.clone(), c).is_some() {
                return Err(Error::Config(format!("coefficient for {p} given twice")));
            }
        }
        if !map.keys().any(|p| p.order() == m) {
            return Err(Error::Config(format!("no leading coefficient of order {m}")));
        }
        Ok(Self { n, m, coeffs: map, frozen_at: None })
    }

    /// Builds from `coeff` config lines of the form `p=(..) expr=<expression>`.
    pub fn from_coeff_lines(n: usize, m: usize, lines: &[&str]) -> Result<Self> {
        let coeffs = lines.iter().map(|l| parse_coeff_line(n, l)).collect::<Result<Vec<_>>>()?;
        Self::new(n, m, coeffs)
    }

    /// `-Δ` in `n` dimensions.
    pub fn neg_laplacian(n: usize) -> Self {
        let coeffs = (0..n)
            .map(|k| {
                let mut e = vec![0; n];
                e[k] = 2;
                (MultiIndex(e), Coefficient::Const(-1.0))
            })
            .collect();
        Self::new(n, 2, coeffs).expect("valid operator")
    }

    /// `c Δ²` in `n` dimensions.
    pub fn bilaplacian(n: usize, c: f64) -> Self {
        let mut coeffs = Vec::new();
        for k in 0..n {
            for l in k..n {
                let mut e = vec![0; n];
                e[k] += 2;
                e[l] += 2;
                coeffs.push((MultiIndex(e), Coefficient::Const(if k == l { c } else { 2.0 * c })));
            }
        }
        Self::new(n, 4, coeffs).expect("valid operator")
    }

    /// `Σ A_ij ∂_i ∂_j` for a symmetric matrix `A` given row-major.
    pub fn second_order(n: usize, a: &[f64]) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Dimension(format!("matrix needs {} entries", n * n)));
        }
        let mut coeffs = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                let v = if i == j { a[i * n + i] } else { a[i * n + j] + a[j * n + i] };
                if v != 0.0 || i == j {
                    coeffs.push((MultiIndex(e), Coefficient::Const(v)));
                }
            }
        }
        Self::new(n, 2, coeffs)
    }

    /// Multiplies every coefficient by `g(x)` and adds the terms `extra`.
    pub fn scaled_plus(&self, g: Coefficient, extra: Vec<(MultiIndex, Coefficient)>) -> Result<Self> {
        let mut coeffs: Vec<(MultiIndex, Coefficient)> = self
            .coeffs
            .iter()
            .map(|(p, c)| {
                let (c, g) = (c.clone(), g.clone());
                (p.clone(), Coefficient::func(move |x| g.eval(x) * c.eval(x)))
            })
            .collect();
        coeffs.extend(extra);
        Self::new(self.n, self.m, coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn frozen_at(&self) -> Option<&[f64]> {
        self.frozen_at.as_deref()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &Coefficient)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, p: &MultiIndex) -> Option<&Coefficient> {
        self.coeffs.get(p)
    }

    /// `a_p(x)`, zero when absent.
    pub fn coefficient_at(&self, p: &MultiIndex, x: &[f64]) -> f64 {
        self.coeffs.get(p).map_or(0.0, |c| c.eval(x))
    }

    /// Every coefficient is constant.
    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(|c| c.as_const().is_some())
    }

    /// Only order-m terms.
    pub fn is_pure_order(&self) -> bool {
        self.coeffs.keys().all(|p| p.order() == self.m)
    }

    /// Constant leading coefficients (order m), when the operator is constant.
    pub fn constant_leading(&self) -> Option<Vec<(MultiIndex, f64)>> {
        self.coeffs
            .iter()
            .filter(|(p, _)| p.order() == self.m)
            .map(|(p, c)| c.as_const().map(|v| (p.clone(), v)))
            .collect()
    }

    /// `-L`.
    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            m: self.m,
            coeffs: self.coeffs.iter().map(|(p, c)| (p.clone(), c.negated())).collect(),
            frozen_at: self.frozen_at.clone(),
        }
    }

    /// `Q(x, η) = Σ_{|p|=m} a_p(x) η^p`.
    pub fn characteristic_form(&self, x: &[f64], eta: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .filter(|(p, _)| p.order() == self.m)
            .map(|(p, c)| c.eval(x) * p.monomial(eta))
            .sum()
    }

    /// Leading part with coefficients frozen at `x0`.
    pub fn tangential(&self, x0: &[f64]) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(p, _)| p.order() == self.m)
            .map(|(p, c)| (p.clone(), Coefficient::Const(c.eval(x0))))
            .collect();
        Self { n: self.n, m: self.m, coeffs, frozen_at: Some(x0.to_vec()) }
    }
}

/// One `p=(..) expr=<expression>` coefficient line.
pub fn parse_coeff_line(n: usize, line: &str) -> Result<(MultiIndex, Coefficient)> {
    let line = line.trim();
    let rest = line.strip_prefix("p=").ok_or_else(|| Error::Parse(format!("coeff line '{line}' must start with p=")))?;
    let close = rest.find(')').ok_or_else(|| Error::Parse(format!("unclosed multi-index in '{line}'")))?;
    let p = MultiIndex::parse(&rest[..=close])?;
    if p.dim() != n {
        return Err(Error::Config(format!("multi-index {p} has {} entries, expected {n}", p.dim())));
    }
    let tail = rest[close + 1..].trim();
    let e = tail.strip_prefix("expr=").ok_or_else(|| Error::Parse(format!("coeff line '{line}' needs expr=")))?;
    let e = Expr::parse(e)?;
    if e.dimension_used() > n {
        return Err(Error::Config(format!("expression '{e}' uses x{} in {n}-D", e.dimension_used())));
    }
    let c = match e.constant() {
        Some(v) => Coefficient::Const(v),
        None => Coefficient::Expr(Arc::new(e)),
    };
    Ok((p, c))
}

pub fn characteristic_form(l: &EllipticOperator, x: &[f64], eta: &[f64]) -> f64 {
    l.characteristic_form(x, eta)
}

pub fn tangential(l: &EllipticOperator, x0: &[f64]) -> EllipticOperator {
    l.tangential(x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(MultiIndex::of_order(2, 2).len(), 3);
        assert_eq!(MultiIndex::up_to(2, 4).len(), 15);
        assert_eq!(MultiIndex::up_to(3, 2).len(), 10);
        assert_eq!(MultiIndex::parse("(2, 0)").unwrap(), MultiIndex::new(&[2, 0]));
        assert!(MultiIndex::parse("2,0").is_err());
    }

    #[test]
    fn characteristic_forms() {
        let l = EllipticOperator::neg_laplacian(2);
        assert_eq!(l.characteristic_form(&[0.0, 0.0], &[1.0, 2.0]), -5.0);
        let b = EllipticOperator::bilaplacian(2, 1.0);
        assert_eq!(b.characteristic_form(&[0.0, 0.0], &[1.0, 0.0]), 1.0);
        let eta = [0.3, -0.7];
        let q = b.characteristic_form(&[0.0, 0.0], &eta);
        assert!((q - (0.09f64 + 0.49).powi(2)).abs() < 1e-15);
        let q2 = b.characteristic_form(&[0.0, 0.0], &[0.6, -1.4]);
        assert!((q2 - 16.0 * q).abs() < 1e-13);
    }

    #[test]
    fn tangential_freezes_and_drops() {
        let l = EllipticOperator::from_coeff_lines(
            2,
            2,
            &[
                "p=(2,0) expr=-(1+0.1*(x1^2+x2^2))",
                "p=(0,2) expr=-(1+0.1*(x1^2+x2^2))",
                "p=(0,0) expr=-cos(x1)",
            ],
        )
        .unwrap();
        let t = l.tangential(&[0.0, 0.0]);
        assert!(t.is_pure_order() && t.is_constant());
        assert_eq!(t.coefficient_at(&MultiIndex::new(&[2, 0]), &[5.0, 5.0]), -1.0);
        let tt = t.tangential(&[0.0, 0.0]);
        assert_eq!(tt.constant_leading(), t.constant_leading());
    }

    #[test]
    fn rejects_invalid_operators() {
        assert!(EllipticOperator::from_coeff_lines(2, 3, &["p=(3,0) expr=1"]).is_err());
        assert!(EllipticOperator::from_coeff_lines(2, 2, &["p=(1,0) expr=1"]).is_err());
        assert!(EllipticOperator::from_coeff_lines(2, 2, &["p=(2,0,0) expr=1"]).is_err());
        assert!(EllipticOperator::from_coeff_lines(1, 2, &["p=(2) expr=x2"]).is_err());
        assert!(EllipticOperator::from_coeff_lines(1, 2, &["p=(2) expr=1", "p=(2) expr=2"]).is_err());
    }
}
