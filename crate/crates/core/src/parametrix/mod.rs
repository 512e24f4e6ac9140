//! The correction operator `T₀ = S₀(L₀ − L)` on a ball `B_r(x₀)`, its
//! empirical contraction profile, and the Neumann-series local solve.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction, ShiftVector};
use crate::kernels::lattice::weak_kernel_grid;
use crate::kernels::{fundamental_solution, potential, reproduction_error, FundamentalSolution, SingularPotential};
use crate::operator::{property_p_check, sobolev_norms, DiscreteOperator, EllipticOperator, MultiIndex};
use crate::orlicz::{convolve_kernel, luxemburg_norm, mollify, shift};
use crate::probes::{bump_poly_probe, polynomial_bump};
use crate::young::YoungFunction;

/// Standard radius ladder for contraction profiles.
pub const RADIUS_LADDER: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// `T₀` for one operator, point and radius, discretised on `Q_{4r}(x₀)`
/// with the ball `B_r(x₀)` as mask.
#[derive(Debug)]
pub struct ParametrixOperator {
    l: EllipticOperator,
    x0: Vec<f64>,
    frozen: EllipticOperator,
    j: FundamentalSolution,
    r: f64,
    domain: GridDomain,
    young: YoungFunction,
    dl: DiscreteOperator,
    dl0: DiscreteOperator,
    k0: Vec<f64>,
    singular: OnceLock<std::result::Result<SingularPotential, String>>,
}

/// `χ = T₀φ` with the norms of the leading and lower-order parts of
/// `ψ = (L₀ − L)φ`.
#[derive(Debug, Clone)]
pub struct TApply {
    pub chi: GridFunction,
    pub psi1_norm: f64,
    pub psi2_norm: f64,
    pub truncated: bool,
}

/// One Neumann step: `(k, ‖u_k‖_W, ‖u_k − u_{k-1}‖_W, ‖Lu_k − f‖_M / ‖f‖_M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub norm: f64,
    pub step: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    /// Geometric mean of the last (up to three) step ratios.
    pub empirical_ratio: f64,
    pub final_residual: f64,
    /// `‖u − T₀u − S₀f‖_W / ‖u‖_W` for the returned `u`.
    pub fixed_point_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionProfile {
    pub radii: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub probe_count: usize,
}

impl ContractionProfile {
    /// Non-increasing along the radii up to a relative slack.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.sigma_hat.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
    }
}

fn same_leading(a: &EllipticOperator, b: &EllipticOperator) -> bool {
    if a.n() != b.n() || a.m() != b.m() {
        return false;
    }
    let zero = vec![0.0; a.n()];
    MultiIndex::up_to(a.n(), a.m()).iter().all(|p| {
        let (u, v) = (a.coefficient_at(p, &zero), b.coefficient_at(p, &zero));
        (u - v).abs() <= 1e-12 * (1.0 + u.abs().max(v.abs()))
    })
}

impl ParametrixOperator {
    /// Freezes `l` at `x0` and builds the lattice of `N` points per axis on
    /// the cube of side `4r` centred at `x0`. An explicit kernel must belong
    /// to the frozen operator.
    pub fn new(
        l: &EllipticOperator,
        x0: &[f64],
        r: f64,
        npts: usize,
        young: &YoungFunction,
        kernel: Option<FundamentalSolution>,
    ) -> Result<Self> {
        let n = l.n();
        if x0.len() != n {
            return Err(Error::Dimension(format!("x0 has {} entries, operator is {n}-D", x0.len())));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius {r}")));
        }
        let frozen = l.tangential(x0);
        let j = match kernel {
            Some(j) => {
                if !same_leading(j.operator(), &frozen) {
                    return Err(Error::Config(format!(
                        "kernel '{}' does not belong to the operator frozen at {x0:?}",
                        j.label()
                    )));
                }
                j
            }
            None => fundamental_solution(&frozen)?,
        };
        let cube = GridDomain::centered(n, npts, 4.0 * r, x0)?;
        let domain = cube.with_ball_mask(x0, r)?;
        let dl = DiscreteOperator::new(l, &domain)?;
        let dl0 = DiscreteOperator::new(&frozen, &domain)?;
        let k0 = weak_kernel_grid(&j, &MultiIndex::new(&vec![0; n]), &domain)?;
        Ok(Self {
            l: l.clone(),
            x0: x0.to_vec(),
            frozen,
            j,
            r,
            domain,
            young: young.clone(),
            dl,
            dl0,
            k0,
            singular: OnceLock::new(),
        })
    }

    pub fn operator(&self) -> &EllipticOperator {
        &self.l
    }
    pub fn frozen(&self) -> &EllipticOperator {
        &self.frozen
    }
    pub fn kernel(&self) -> &FundamentalSolution {
        &self.j
    }
    pub fn x0(&self) -> &[f64] {
        &self.x0
    }
    pub fn radius(&self) -> f64 {
        self.r
    }
    /// Lattice with the ball mask.
    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    /// Reproduction error of the kernel on a bump filling 80% of the ball.
    pub fn verify_kernel(&self) -> Result<f64> {
        let phi = polynomial_bump(&self.domain, &self.x0, 0.8 * self.r);
        Ok(reproduction_error(&self.j, &phi)?.unwrap_or(0.0))
    }

    fn on_lattice(&self, u: &GridFunction) -> Result<GridFunction> {
        self.domain.check_same(&u.domain)?;
        u.with_domain(&self.domain)
    }

    /// `S₀g`: the weakly singular potential of `g` restricted to the ball.
    /// Values outside the ball are kept.
    pub fn s0(&self, g: &GridFunction) -> Result<GridFunction> {
        let g = self.on_lattice(g)?.restrict();
        convolve_kernel(&self.k0, &g)
    }

    fn t_inner(&self, phi: &GridFunction) -> Result<TApply> {
        let m = self.l.m();
        let lead = self.dl.apply_filtered(phi, |o| o == m)?;
        let psi1 = self.dl0.apply(phi)?.sub(&lead)?;
        let psi2 = self.dl.apply_filtered(phi, |o| o < m)?.scale(-1.0);
        let psi1_norm = luxemburg_norm(&psi1, &self.young)?;
        let psi2_norm = luxemburg_norm(&psi2, &self.young)?;
        let chi = self.s0(&psi1.add(&psi2)?)?;
        Ok(TApply { chi, psi1_norm, psi2_norm, truncated: false })
    }

    /// `T₀φ = S₀ψ₁ + S₀ψ₂` with `ψ₁ = Σ_{|p|=m} (a_p(x₀) − a_p(x)) D^pφ`
    /// and `ψ₂ = −Σ_{|p|<m} a_p D^pφ`. Input outside the ball is dropped
    /// with a warning.
    pub fn t_apply(&self, phi: &GridFunction) -> Result<TApply> {
        let phi = self.on_lattice(phi)?;
        let cut = phi.restrict();
        let truncated = cut.values != phi.values;
        if truncated {
            log::warn!("input to T0 extends beyond B_r(x0); truncated to the ball");
        }
        let mut out = self.t_inner(&cut)?;
        out.truncated = truncated;
        Ok(out)
    }

    /// `∂^p S₀ψ` through the kernel derivatives: the weakly singular
    /// potential for `|p| < m`, the calibrated principal value for `|p| = m`.
    pub fn potential_derivative(&self, psi: &GridFunction, p: &MultiIndex) -> Result<GridFunction> {
        let psi = self.on_lattice(psi)?.restrict();
        if p.order() < self.l.m() {
            return potential(&self.j, &psi, p);
        }
        let sp = self
            .singular
            .get_or_init(|| SingularPotential::calibrate(&self.j, &self.domain, 0).map_err(|e| e.to_string()));
        match sp {
            Ok(sp) => sp.apply(&psi, p),
            Err(msg) => Err(Error::Capability(format!("singular potential unavailable: {msg}"))),
        }
    }

    /// Weighted Orlicz–Sobolev norm over the ball, weight `(2r)^{|p|}`.
    pub fn w_norm(&self, u: &GridFunction) -> Result<f64> {
        let u = self.on_lattice(u)?;
        Ok(sobolev_norms(&u, self.l.m(), &self.young, 2.0 * self.r)?.weighted)
    }

    /// `‖φ − T₀φ − S₀Lφ‖_∞ / ‖φ‖_∞` over the ball; `None` for `φ ≡ 0`.
    pub fn parametrix_identity_check(&self, phi: &GridFunction) -> Result<Option<f64>> {
        let phi = self.on_lattice(phi)?.restrict();
        let scale = phi.sup_norm();
        if scale == 0.0 {
            return Ok(None);
        }
        let t = self.t_inner(&phi)?.chi;
        let sl = self.s0(&self.dl.apply(&phi)?)?;
        Ok(Some(phi.sub(&t)?.sub(&sl)?.sup_norm() / scale))
    }

    /// Largest `‖T₀φ‖_W / ‖φ‖_W` over `probes` random bump-times-cubic
    /// probes supported in the ball.
    pub fn sigma_hat(&self, probes: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0f64;
        for _ in 0..probes {
            let phi = bump_poly_probe(&self.domain, &self.x0, self.r, &mut rng).restrict();
            let den = self.w_norm(&phi)?;
            if den == 0.0 {
                continue;
            }
            let chi = self.t_inner(&phi)?.chi;
            best = best.max(self.w_norm(&chi)? / den);
        }
        Ok(best)
    }

    /// Iterates `u_{k+1} = T₀u_k + S₀f` from `u₀ = S₀f` until the step falls
    /// below `tol·‖u_{k+1}‖_W` or `k_max` steps. Three consecutive step
    /// increases abort with a divergence error carrying the partial report.
    ///
    /// The returned `u` keeps the potential's values outside the ball.
    pub fn neumann_solve(&self, f: &GridFunction, tol: f64, k_max: usize) -> Result<(GridFunction, SolveReport)> {
        if !(tol > 0.0) || k_max == 0 {
            return Err(Error::InvalidArgument("tol must be positive and k_max at least 1".into()));
        }
        let f = self.on_lattice(f)?;
        let f_norm = luxemburg_norm(&f, &self.young)?;
        let s0f = self.s0(&f)?;
        let rel = |u: &GridFunction| -> Result<f64> {
            let r = luxemburg_norm(&self.dl.apply(u)?.sub(&f)?, &self.young)?;
            Ok(if f_norm > 0.0 { r / f_norm } else { r })
        };
        if s0f.is_zero() {
            let u = GridFunction::zeros(&self.domain);
            let it = IterationRecord { k: 1, norm: 0.0, step: 0.0, residual: rel(&u)? };
            let report = SolveReport {
                iterations: vec![it],
                converged: true,
                empirical_ratio: 0.0,
                final_residual: it.residual,
                fixed_point_defect: 0.0,
            };
            return Ok((u, report));
        }
        let mut u = s0f.clone();
        let mut iterations: Vec<IterationRecord> = Vec::new();
        let mut converged = false;
        let mut rises = 0;
        for k in 1..=k_max {
            let next = self.t_inner(&u)?.chi.add(&s0f)?;
            let step = self.w_norm(&next.sub(&u)?)?;
            let norm = self.w_norm(&next)?;
            u = next;
            if let Some(prev) = iterations.last() {
                rises = if step > prev.step { rises + 1 } else { 0 };
            }
            iterations.push(IterationRecord { k, norm, step, residual: rel(&u)? });
            if step <= tol * norm {
                converged = true;
                break;
            }
            if rises >= 3 {
                let report = self.finish(iterations, false, &u, &s0f)?;
                return Err(Error::Divergence { report: Box::new(report) });
            }
        }
        if !converged {
            log::warn!("Neumann iteration stopped at k_max = {k_max} without meeting tol = {tol:e}");
        }
        let report = self.finish(iterations, converged, &u, &s0f)?;
        Ok((u, report))
    }

    fn finish(&self, iterations: Vec<IterationRecord>, converged: bool, u: &GridFunction, s0f: &GridFunction) -> Result<SolveReport> {
        let ratios: Vec<f64> = iterations
            .windows(2)
            .filter(|w| w[0].step > 0.0 && w[1].step > 0.0)
            .map(|w| w[1].step / w[0].step)
            .collect();
        let tail = &ratios[ratios.len().saturating_sub(3)..];
        let empirical_ratio =
            if tail.is_empty() { 0.0 } else { (tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp() };
        let un = self.w_norm(u)?;
        let defect_fn = self.t_inner(u)?.chi.add(s0f)?;
        let fixed_point_defect = if un > 0.0 { self.w_norm(&u.sub(&defect_fn)?)? / un } else { 0.0 };
        let final_residual = iterations.last().map_or(0.0, |i| i.residual);
        Ok(SolveReport { iterations, converged, empirical_ratio, final_residual, fixed_point_defect })
    }
}

/// `T₀φ` for a fresh operator; see [`ParametrixOperator::t_apply`].
pub fn t_apply(p: &ParametrixOperator, phi: &GridFunction) -> Result<TApply> {
    p.t_apply(phi)
}

pub fn parametrix_identity_check(p: &ParametrixOperator, phi: &GridFunction) -> Result<Option<f64>> {
    p.parametrix_identity_check(phi)
}

/// `σ̂(r)` along `radii` with `probes` random probes per radius; the probe
/// stream for the i-th radius is seeded with `seed + i`.
pub fn estimate_sigma(
    l: &EllipticOperator,
    x0: &[f64],
    radii: &[f64],
    probes: usize,
    seed: u64,
    npts: usize,
    young: &YoungFunction,
) -> Result<ContractionProfile> {
    if probes < 8 {
        return Err(Error::InvalidArgument(format!("at least 8 probes are needed, got {probes}")));
    }
    let pp = property_p_check(l, x0, radii)?;
    if !pp.passed {
        log::warn!("coefficients fail the continuity check at {x0:?}; the profile may not decay");
    }
    let sigma_hat = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| ParametrixOperator::new(l, x0, r, npts, young, None)?.sigma_hat(probes, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContractionProfile { radii: radii.to_vec(), sigma_hat, probe_count: probes })
}

/// Builds the operator on `f`'s lattice parameters and solves.
#[allow(clippy::too_many_arguments)]
pub fn neumann_solve(
    l: &EllipticOperator,
    f: &GridFunction,
    x0: &[f64],
    r: f64,
    young: &YoungFunction,
    tol: f64,
    k_max: usize,
) -> Result<(GridFunction, SolveReport)> {
    let p = ParametrixOperator::new(l, x0, r, f.domain.points(), young, None)?;
    p.neumann_solve(f, tol, k_max)
}

/// Shift moduli of `a·f` against the split
/// `T_δ(af) − af = T_δa·(T_δf − f) + (T_δa − a)·g + (T_δa − a)·(f − g)`
/// with `g` the ε-mollification of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierRow {
    pub magnitude: f64,
    pub product_modulus: f64,
    pub f_modulus: f64,
    pub a_sup: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    /// `‖a‖_∞·modulus(f) + Δ⁽²⁾ + Δ⁽³⁾`.
    pub bound: f64,
}

pub fn multiplier_shift_check(
    a: &GridFunction,
    f: &GridFunction,
    m: &YoungFunction,
    deltas: &[ShiftVector],
    eps: f64,
) -> Result<Vec<MultiplierRow>> {
    a.domain.check_same(&f.domain)?;
    let a = a.with_domain(&f.domain)?;
    let a_sup = a.values.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if !a_sup.is_finite() {
        return Err(Error::InvalidArgument("multiplier is unbounded".into()));
    }
    let g = mollify(&f.with_domain(&f.domain.full_mask())?, eps)?.with_domain(&f.domain)?;
    let af = a.mul(f)?;
    let rem = f.sub(&g)?;
    deltas
        .iter()
        .map(|d| {
            let ta = shift(&a, d)?.function;
            let tf = shift(f, d)?.function;
            let taf = shift(&af, d)?.function;
            let da = ta.sub(&a)?;
            let norm = |u: &GridFunction| luxemburg_norm(u, m);
            let f_modulus = norm(&tf.sub(f)?)?;
            let delta2 = norm(&da.mul(&g)?)?;
            let delta3 = norm(&da.mul(&rem)?)?;
            Ok(MultiplierRow {
                magnitude: d.magnitude(&f.domain),
                product_modulus: norm(&taf.sub(&af)?)?,
                f_modulus,
                a_sup,
                delta1: norm(&ta.mul(&tf.sub(f)?)?)?,
                delta2,
                delta3,
                bound: a_sup * f_modulus + delta2 + delta3,
            })
        })
        .collect()
}
