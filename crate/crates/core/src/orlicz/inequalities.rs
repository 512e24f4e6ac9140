use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{convolve, orlicz_norm};
use crate::error::Result;
use crate::grid::{GridDomain, GridFunction};
use crate::young::YoungFunction;

const SLACK: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct InequalityEntry {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub entries: Vec<InequalityEntry>,
}

impl InequalityReport {
    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| e.violated).count()
    }
}

fn entry(name: &'static str, lhs: f64, rhs: f64) -> InequalityEntry {
    InequalityEntry { name, lhs, rhs, violated: lhs > rhs + SLACK * (1.0 + rhs.abs()) }
}

fn l1(u: &GridFunction) -> f64 {
    u.values.iter().map(|v| v.abs()).sum::<f64>() * u.domain.cell_volume()
}

/// Evaluates both sides of the convolution inequalities over the whole cube,
/// with `N` the complementary function of `M` and Orlicz (dual) norms
/// throughout. The embedding constant is `Ĉ = mes·M⁻¹(1/mes)`.
pub fn inequality_suite_with(
    f: &GridFunction,
    g: &GridFunction,
    m: &YoungFunction,
    n: &YoungFunction,
) -> Result<InequalityReport> {
    let full = f.domain.full_mask();
    let f = f.with_domain(&full)?;
    let g = g.with_domain(&full)?;
    let mes = full.mask_measure();
    let c_hat = mes * m.inverse(1.0 / mes)?;
    let fg = convolve(&f, &g)?;
    let nf = orlicz_norm(&f, m)?;
    let ng_m = orlicz_norm(&g, m)?;
    let ng_n = orlicz_norm(&g, n)?;
    let nfg = orlicz_norm(&fg, m)?;
    let sup = fg.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut entries = vec![
        entry("holder_sup", sup, nf * ng_n),
        entry("convolution_minkowski", nfg, nf * l1(&g)),
        entry("convolution_orlicz", nfg, c_hat * nf * ng_m),
        entry("l1_embedding", l1(&f), c_hat * nf),
    ];

    // F(x, y) = f(x - y) g(x + y): ‖∫F(·,y)dy‖ ≤ ∫‖F(·,y)‖dy
    let dom = &full;
    let dim = dom.n();
    let half = (dom.points() / 2) as i64;
    let cv = dom.cell_volume();
    let slice = |b: usize| -> GridFunction {
        let bm = dom.multi(b);
        let values = (0..dom.len())
            .map(|a| {
                let am = dom.multi(a);
                let mut im = [0i64; 3];
                let mut ip = [0i64; 3];
                for k in 0..dim {
                    im[k] = am[k] as i64 - bm[k] as i64 + half;
                    ip[k] = am[k] as i64 + bm[k] as i64 - half;
                }
                f.values[dom.flat(&im)] * g.values[dom.flat(&ip)]
            })
            .collect();
        GridFunction { domain: dom.clone(), values }
    };
    let mut total = vec![0.0; dom.len()];
    let mut rhs = 0.0;
    for b in 0..dom.len() {
        let s = slice(b);
        for (t, v) in total.iter_mut().zip(&s.values) {
            *t += v * cv;
        }
        rhs += orlicz_norm(&s, m)? * cv;
    }
    let lhs = orlicz_norm(&GridFunction { domain: dom.clone(), values: total }, m)?;
    entries.push(entry("integral_minkowski", lhs, rhs));
    Ok(InequalityReport { entries })
}

/// As [`inequality_suite_with`], computing the complementary function.
pub fn inequality_suite(f: &GridFunction, g: &GridFunction, m: &YoungFunction) -> Result<InequalityReport> {
    let n = m.conjugate()?;
    inequality_suite_with(f, g, m, &n)
}

fn random_field(domain: &GridDomain, rng: &mut ChaCha8Rng, nonnegative: bool) -> GridFunction {
    let n = domain.n();
    let half = 0.5 * domain.side();
    let mut f = GridFunction::zeros(domain);
    for _ in 0..rng.gen_range(1..=3) {
        let c: Vec<f64> = (0..n).map(|k| domain.center()[k] + rng.gen_range(-0.5..0.5) * half).collect();
        let w = rng.gen_range(0.05..0.3) * half;
        let a: f64 = rng.sample(StandardNormal);
        let a = if nonnegative { a.abs() } else { a };
        let box_shape = rng.gen_bool(0.3);
        let bump = GridFunction::from_fn(domain, |x| {
            let r2: f64 = x.iter().zip(&c).map(|(u, v)| (u - v).powi(2)).sum::<f64>() / (w * w);
            if box_shape {
                if r2 < 1.0 { a } else { 0.0 }
            } else {
                a * (-r2).exp()
            }
        });
        f = f.add(&bump).expect("same lattice");
    }
    f
}

/// Seeded random `(f, g, M)`: sums of one to three Gaussian or box bumps
/// with normal amplitudes (`g` nonnegative half the time) and `M` a power or
/// power-log function with exponent in `[1.3, 3.5)`.
pub fn random_triple(domain: &GridDomain, seed: u64) -> Result<(GridFunction, GridFunction, YoungFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(1.3..3.5);
    let c = rng.gen_range(0.2..2.0);
    let m = if rng.gen_bool(0.5) { YoungFunction::power(p, c)? } else { YoungFunction::power_log(p, c)? };
    let f = random_field(domain, &mut rng, false);
    let nonneg = rng.gen_bool(0.5);
    let g = random_field(domain, &mut rng, nonneg);
    Ok((f, g, m))
}
