//! Uniform periodic grids on the cube `Q_d` and functions sampled on them.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform periodic lattice on `center + [-d/2, d/2)^n` with a node mask for Ω.
///
/// Nodes sit at `center - d/2 + i h`, so `center` itself is node `N/2`.
#[derive(Debug, Clone)]
pub struct GridDomain {
    n: usize,
    npts: usize,
    d: f64,
    center: [f64; 3],
    mask: Arc<Vec<bool>>,
}

impl GridDomain {
    pub fn new(n: usize, npts: usize, d: f64) -> Result<Self> {
        Self::centered(n, npts, d, &vec![0.0; n])
    }

    pub fn centered(n: usize, npts: usize, d: f64, center: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::Dimension(format!("dimension {n} not in 1..=3")));
        }
        if npts < 4 || npts % 2 != 0 {
            return Err(Error::Resolution(format!("N = {npts} must be even and at least 4")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("side length {d} must be positive")));
        }
        if center.len() != n {
            return Err(Error::Dimension(format!("center has {} entries, expected {n}", center.len())));
        }
        let mut c = [0.0; 3];
        c[..n].copy_from_slice(center);
        let len = npts.pow(n as u32);
        Ok(Self { n, npts, d, center: c, mask: Arc::new(vec![true; len]) })
    }

    /// Same lattice, new mask.
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::Dimension(format!("mask has {} nodes, expected {}", mask.len(), self.len())));
        }
        if !mask.iter().any(|&b| b) {
            return Err(Error::InvalidArgument("mask is empty".into()));
        }
        Ok(Self { mask: Arc::new(mask), ..self.clone() })
    }

    /// Mask of nodes with `pred(x)` true.
    pub fn with_mask_fn<F: Fn(&[f64]) -> bool>(&self, pred: F) -> Result<Self> {
        let mask = (0..self.len()).map(|i| pred(&self.coords(i)[..self.n])).collect();
        self.with_mask(mask)
    }

    /// Mask of the open ball `|x - c| < r`.
    pub fn with_ball_mask(&self, c: &[f64], r: f64) -> Result<Self> {
        let c = c.to_vec();
        self.with_mask_fn(|x| x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>() < r * r)
    }

    pub fn full_mask(&self) -> Self {
        Self { mask: Arc::new(vec![true; self.len()]), ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    /// Points per axis.
    pub fn points(&self) -> usize {
        self.npts
    }
    pub fn side(&self) -> f64 {
        self.d
    }
    pub fn center(&self) -> &[f64] {
        &self.center[..self.n]
    }
    pub fn h(&self) -> f64 {
        self.d / self.npts as f64
    }
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.n as i32)
    }
    pub fn len(&self) -> usize {
        self.mask.len()
    }
    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
    /// Measure of the masked set.
    pub fn mask_measure(&self) -> f64 {
        self.mask.iter().filter(|&&b| b).count() as f64 * self.cell_volume()
    }

    /// Same node layout (dimension, resolution, side and center).
    pub fn same_lattice(&self, other: &GridDomain) -> bool {
        self.n == other.n && self.npts == other.npts && self.d == other.d && self.center == other.center
    }

    pub fn check_same(&self, other: &GridDomain) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::Dimension("grid functions live on different lattices".into()))
        }
    }

    /// Per-axis indices of node `idx` (axis 0 slowest).
    pub fn multi(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for k in (0..self.n).rev() {
            out[k] = idx % self.npts;
            idx /= self.npts;
        }
        out
    }

    /// Flat index of per-axis indices, wrapped periodically.
    pub fn flat(&self, ix: &[i64]) -> usize {
        let n = self.npts as i64;
        ix[..self.n].iter().fold(0usize, |acc, &i| acc * self.npts + i.rem_euclid(n) as usize)
    }

    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let m = self.multi(idx);
        let h = self.h();
        let mut x = [0.0; 3];
        for k in 0..self.n {
            x[k] = self.center[k] - 0.5 * self.d + m[k] as f64 * h;
        }
        x
    }

    /// Lattice offset `j` on each axis as a signed displacement in `[-N/2, N/2)`.
    pub fn signed_offset(&self, j: usize) -> i64 {
        if j < self.npts / 2 {
            j as i64
        } else {
            j as i64 - self.npts as i64
        }
    }

    /// Physical displacement associated with kernel slot `idx`.
    pub fn offset_coords(&self, idx: usize) -> [f64; 3] {
        let m = self.multi(idx);
        let h = self.h();
        let mut x = [0.0; 3];
        for k in 0..self.n {
            x[k] = self.signed_offset(m[k]) as f64 * h;
        }
        x
    }
}

/// Real samples on a [`GridDomain`], periodic in every axis.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub domain: GridDomain,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(domain: &GridDomain) -> Self {
        Self { values: vec![0.0; domain.len()], domain: domain.clone() }
    }

    pub fn constant(domain: &GridDomain, c: f64) -> Self {
        Self { values: vec![c; domain.len()], domain: domain.clone() }
    }

    pub fn from_values(domain: &GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Dimension(format!("{} values for {} nodes", values.len(), domain.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid values must be finite".into()));
        }
        Ok(Self { domain: domain.clone(), values })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(domain: &GridDomain, f: F) -> Self {
        let n = domain.n();
        let values = (0..domain.len()).map(|i| f(&domain.coords(i)[..n])).collect();
        Self { domain: domain.clone(), values }
    }

    /// Indicator of the domain's mask.
    pub fn mask_indicator(domain: &GridDomain) -> Self {
        let values = domain.mask().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Self { domain: domain.clone(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at per-axis indices, periodically wrapped.
    pub fn at(&self, ix: &[i64]) -> f64 {
        self.values[self.domain.flat(ix)]
    }

    /// Same values, different mask on the same lattice.
    pub fn with_domain(&self, domain: &GridDomain) -> Result<Self> {
        self.domain.check_same(domain)?;
        Ok(Self { domain: domain.clone(), values: self.values.clone() })
    }

    /// Zero outside the mask.
    pub fn restrict(&self) -> Self {
        let values = self
            .values
            .iter()
            .zip(self.domain.mask())
            .map(|(&v, &b)| if b { v } else { 0.0 })
            .collect();
        Self { domain: self.domain.clone(), values }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { domain: self.domain.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Result<Self> {
        self.domain.check_same(&other.domain)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { domain: self.domain.clone(), values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }
    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Sup over masked nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.domain.mask())
            .filter(|(_, &b)| b)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Writes the text format: header `n,N,d`, then one value per line.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut s = String::new();
        let _ = writeln!(s, "{},{},{}", self.domain.n(), self.domain.points(), self.domain.side());
        for v in &self.values {
            let _ = writeln!(s, "{v:e}");
        }
        std::fs::write(path, s)?;
        Ok(())
    }

    /// Reads the text format on the origin-centred cube.
    pub fn read_text(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?;
        let parts: Vec<&str> = header.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("{}: header must be n,N,d", path.display())));
        }
        let bad = |_| Error::Parse(format!("{}: bad header '{header}'", path.display()));
        let n: usize = parts[0].parse().map_err(bad)?;
        let npts: usize = parts[1].parse().map_err(bad)?;
        let d: f64 = parts[2].parse().map_err(|_| Error::Parse(format!("{}: bad side length", path.display())))?;
        let domain = GridDomain::new(n, npts, d)?;
        let mut values = Vec::with_capacity(domain.len());
        for (k, l) in lines.enumerate() {
            values.push(
                l.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{}:{}: bad value", path.display(), k + 2)))?,
            );
        }
        Self::from_values(&domain, values)
    }

    /// Reads a 0/1 mask file onto `domain`'s lattice.
    pub fn read_mask(path: &Path, domain: &GridDomain) -> Result<GridDomain> {
        let f = Self::read_text(path)?;
        if f.domain.n() != domain.n() || f.domain.points() != domain.points() || f.domain.side() != domain.side() {
            return Err(Error::Dimension(format!("{}: mask lattice differs from grid", path.display())));
        }
        domain.with_mask(f.values.iter().map(|&v| v != 0.0).collect())
    }
}

/// A displacement, in grid steps or physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftVector {
    pub delta: Vec<f64>,
    pub physical: bool,
}

impl ShiftVector {
    pub fn grid(steps: &[i64]) -> Self {
        Self { delta: steps.iter().map(|&s| s as f64).collect(), physical: false }
    }

    pub fn physical(delta: &[f64]) -> Self {
        Self { delta: delta.to_vec(), physical: true }
    }

    /// Displacement in grid steps, reduced to `[0, N)` per axis.
    pub fn in_steps(&self, domain: &GridDomain) -> Vec<f64> {
        let h = domain.h();
        let n = domain.points() as f64;
        self.delta
            .iter()
            .map(|&v| {
                let s = if self.physical { v / h } else { v };
                let r = s.rem_euclid(n);
                // snap values within rounding of a lattice point
                if (r - r.round()).abs() < 1e-9 {
                    r.round().rem_euclid(n)
                } else {
                    r
                }
            })
            .collect()
    }

    /// Integer steps when the shift lies on the lattice.
    pub fn lattice_steps(&self, domain: &GridDomain) -> Option<Vec<i64>> {
        let s = self.in_steps(domain);
        if s.iter().all(|v| v.fract() == 0.0) {
            Some(s.iter().map(|&v| v as i64).collect())
        } else {
            None
        }
    }

    /// Euclidean length in physical units, after periodic reduction to the
    /// nearest image.
    pub fn magnitude(&self, domain: &GridDomain) -> f64 {
        let n = domain.points() as f64;
        let h = domain.h();
        self.in_steps(domain)
            .iter()
            .map(|&s| {
                let s = if s > n / 2.0 { s - n } else { s };
                (s * h).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}
