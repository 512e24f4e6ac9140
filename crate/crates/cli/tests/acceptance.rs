//! Acceptance criteria 1–10, one PASS/FAIL line each.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use parametrix_core::grid::ShiftVector;
use parametrix_core::kernels::{fundamental_solution, named_operator, shift_invariance_probe, verify_fundamental, SingularKernel};
use parametrix_core::numeric::logspace;
use parametrix_core::operator::{apply, Coefficient, EllipticOperator, MultiIndex};
use parametrix_core::orlicz::{
    characteristic_norm, inequality_suite_with, luxemburg_norm, orlicz_norm, random_triple,
};
use parametrix_core::parametrix::{estimate_sigma, ParametrixOperator, RADIUS_LADDER};
use parametrix_core::probes::{mollifier_bump, polynomial_bump};
use parametrix_core::young::{boyd_indices, complementary};
use parametrix_core::{GridDomain, GridFunction, YoungFunction};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn within(t: Instant, limit: Duration, out: Outcome) -> Outcome {
    let el = t.elapsed();
    match out {
        Ok(d) if el <= limit => Ok(format!("{d}; {:.1}s", el.as_secs_f64())),
        Ok(d) => Err(format!("{d}; {:.1}s exceeds {:?}", el.as_secs_f64(), limit)),
        Err(d) => Err(format!("{d}; {:.1}s", el.as_secs_f64())),
    }
}

fn half_power(p: f64) -> YoungFunction {
    YoungFunction::power(p, 1.0 / p).unwrap()
}

/// `max_u {uv − M(u)}` by a log scan and golden refinement, independent of
/// the library's search window.
fn brute_conjugate(m: &YoungFunction, v: f64) -> f64 {
    let f = |u: f64| u * v - m.evaluate(u);
    let us = logspace(1e-12, 1e12, 4801);
    let i = (0..us.len()).max_by(|&a, &b| f(us[a]).total_cmp(&f(us[b]))).unwrap();
    let (mut a, mut b) = (us[i.saturating_sub(1)], us[(i + 1).min(us.len() - 1)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) >= f(d) { b = d } else { a = c }
    }
    f(0.5 * (a + b))
}

fn c1_complementary() -> Outcome {
    let t = Instant::now();
    let vs = logspace(0.01, 100.0, 81);
    let (mut worst, mut worst_brute) = (0.0f64, 0.0f64);
    for p in [1.5, 2.0, 3.0, 4.0] {
        let m = half_power(p);
        let n = complementary(&m, &vs).map_err(|e| e.to_string())?;
        let q = p / (p - 1.0);
        for &v in &vs {
            let exact = v.powf(q) / q;
            worst = worst.max((n.evaluate(v) - exact).abs() / exact);
            worst_brute = worst_brute.max((brute_conjugate(&m, v) - exact).abs() / exact);
        }
    }
    within(
        t,
        Duration::from_secs(5),
        check(worst <= 1e-5 && worst_brute <= 1e-6, format!("max rel err {worst:.2e}, brute-force oracle {worst_brute:.2e}")),
    )
}

fn c2_boyd() -> Outcome {
    let t = Instant::now();
    let (mut idx, mut ident) = (0.0f64, 0.0f64);
    for p in [1.5, 2.0, 3.0, 4.0] {
        let b = boyd_indices(&half_power(p)).map_err(|e| e.to_string())?;
        idx = idx.max((b.alpha - 1.0 / p).abs()).max((b.beta - 1.0 / p).abs());
    }
    for p in [1.5, 2.0, 3.0] {
        let m = half_power(p);
        let bm = boyd_indices(&m).map_err(|e| e.to_string())?;
        let bn = boyd_indices(&m.conjugate().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ident = ident.max((bm.alpha + bn.beta - 1.0).abs());
    }
    within(
        t,
        Duration::from_secs(10),
        check(idx <= 0.02 && ident <= 0.03, format!("index err {idx:.2e}, |alpha_M + beta_N - 1| {ident:.2e}")),
    )
}

fn c3_norms() -> Outcome {
    let t = Instant::now();
    let dom = GridDomain::new(1, 200, 1.0).unwrap();
    let mut pnorm = 0.0f64;
    let mut bracket_fail = 0;
    for seed in 0..100u64 {
        let (f, _, m) = random_triple(&dom, 10_000 + seed).map_err(|e| e.to_string())?;
        let l = luxemburg_norm(&f, &m).map_err(|e| e.to_string())?;
        let o = orlicz_norm(&f, &m).map_err(|e| e.to_string())?;
        if !(l <= o * (1.0 + 1e-9) && o <= 2.0 * l * (1.0 + 1e-9)) {
            bracket_fail += 1;
        }
        let p = 1.5 + seed as f64 * 0.025;
        let m = YoungFunction::power(p, 1.0).unwrap();
        let direct = (f.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * dom.cell_volume()).powf(1.0 / p);
        pnorm = pnorm.max((luxemburg_norm(&f, &m).map_err(|e| e.to_string())? - direct).abs() / direct);
    }
    // ‖χ_E‖_M (Amemiya) against mes(E)·N⁻¹(1/mes(E))
    let mut chi = 0.0f64;
    for m in [YoungFunction::power(2.0, 0.5).unwrap(), YoungFunction::power(3.0, 0.5).unwrap(), YoungFunction::power_log(2.0, 1.0).unwrap()] {
        let n = m.conjugate().map_err(|e| e.to_string())?;
        for mes in [0.1, 0.25, 0.5] {
            let cells = (mes / dom.h()).round() as usize;
            let ind = GridFunction::from_values(&dom, (0..200).map(|i| if i < cells { 1.0 } else { 0.0 }).collect()).unwrap();
            let amemiya = orlicz_norm(&ind, &m).map_err(|e| e.to_string())?;
            let formula = characteristic_norm(mes, &n).map_err(|e| e.to_string())?;
            chi = chi.max((formula - amemiya).abs() / amemiya);
        }
    }
    within(
        t,
        Duration::from_secs(60),
        check(
            pnorm <= 1e-10 && bracket_fail == 0 && chi <= 0.05,
            format!("p-norm err {pnorm:.2e}, bracket failures {bracket_fail}/100, characteristic formula err {chi:.2e}"),
        ),
    )
}

fn c4_inequalities() -> Outcome {
    let t = Instant::now();
    let grids = [GridDomain::new(1, 64, 2.0).unwrap(), GridDomain::new(2, 16, 1.0).unwrap()];
    let mut violations = Vec::new();
    let mut checked = 0;
    for seed in 0..500u64 {
        let dom = &grids[(seed % 2) as usize];
        let (f, g, m) = random_triple(dom, seed).map_err(|e| e.to_string())?;
        let n = m.conjugate().map_err(|e| e.to_string())?;
        let rep = inequality_suite_with(&f, &g, &m, &n).map_err(|e| e.to_string())?;
        checked += rep.entries.len();
        for e in rep.entries.iter().filter(|e| e.violated) {
            violations.push(format!("seed {seed} {} {}: {:.3e} > {:.3e}", m.label(), e.name, e.lhs, e.rhs));
        }
    }
    let first = violations.first().cloned().unwrap_or_default();
    within(
        t,
        Duration::from_secs(120),
        check(violations.is_empty(), format!("{} violations in {checked} checks over 500 triples {first}", violations.len())),
    )
}

fn reproduction(name: &str, n: usize, npts: usize) -> Result<f64, String> {
    let j = fundamental_solution(&named_operator(name).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let g = GridDomain::new(n, npts, 1.0).unwrap();
    let c = vec![0.0; n];
    let ball = g.with_ball_mask(&c, 0.25).unwrap();
    let phis = [mollifier_bump(&ball, &c, 0.25), mollifier_bump(&ball, &[0.03; 3][..n], 0.2)];
    let rep = verify_fundamental(&j, &phis).map_err(|e| e.to_string())?;
    Ok(rep.errors.iter().flatten().fold(0.0f64, |a, &e| a.max(e)))
}

fn c5_reproduction() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["laplace2d", "biharmonic2d", "aniso2:2,0.5,1"] {
        let (e32, e64) = (reproduction(name, 2, 32)?, reproduction(name, 2, 64)?);
        ok &= e64 <= 0.05 && e32 >= 2.0 * e64;
        parts.push(format!("{name} {e32:.3}->{e64:.4}"));
    }
    for name in ["laplace3d", "biharmonic3d", "aniso2:2,0.3,0,1,0.2,1.5"] {
        let e = reproduction(name, 3, 32)?;
        ok &= e <= 0.05;
        parts.push(format!("{name} {e:.4}"));
    }
    within(t, Duration::from_secs(180), check(ok, parts.join(", ")))
}

fn lipschitz(eps: f64) -> EllipticOperator {
    EllipticOperator::neg_laplacian(2).scaled_plus(Coefficient::func(move |x| 1.0 + eps * x[0]), vec![]).unwrap()
}

fn c6_identity() -> Outcome {
    let young = YoungFunction::power(2.0, 1.0).unwrap();
    let mut d = Vec::new();
    for npts in [32, 64, 128] {
        let p = ParametrixOperator::new(&lipschitz(0.2), &[0.0, 0.0], 0.2, npts, &young, None).map_err(|e| e.to_string())?;
        let phi = mollifier_bump(p.domain(), &[0.0, 0.0], 0.16);
        d.push(p.parametrix_identity_check(&phi).map_err(|e| e.to_string())?.unwrap_or(f64::NAN));
    }
    check(d[1] <= 0.05 && d[0] > d[1] && d[1] > d[2], format!("defect N=32 {:.4}, N=64 {:.4}, N=128 {:.4}", d[0], d[1], d[2]))
}

fn c7_contraction() -> Outcome {
    let young = YoungFunction::power(2.0, 1.0).unwrap();
    let ops = [
        ("-(1+x1)Lap", lipschitz(1.0)),
        (
            "-Lap-I",
            EllipticOperator::neg_laplacian(2)
                .scaled_plus(Coefficient::Const(1.0), vec![(MultiIndex::new(&[0, 0]), Coefficient::Const(-1.0))])
                .unwrap(),
        ),
        (
            "-(1+sqrt|x1|)Lap",
            EllipticOperator::neg_laplacian(2)
                .scaled_plus(Coefficient::func(|x| 1.0 + x[0].abs().sqrt()), vec![])
                .unwrap(),
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, l)) in ops.iter().enumerate() {
        let prof = estimate_sigma(l, &[0.0, 0.0], &RADIUS_LADDER, 8, 7, 64, &young).map_err(|e| e.to_string())?;
        let s = &prof.sigma_hat;
        ok &= prof.is_monotone(0.1) && s[3] < 1.0;
        if i == 0 {
            ok &= s[3] <= 0.5 * s[0];
        }
        parts.push(format!("{name} [{}]", s.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(" ")));
    }
    check(ok, parts.join(", "))
}

fn c8_local_solve() -> Outcome {
    let t = Instant::now();
    let young = YoungFunction::power(2.0, 1.0).unwrap();
    let l = EllipticOperator::neg_laplacian(2)
        .scaled_plus(Coefficient::func(|x| 1.0 + 0.2 * x[0]), vec![(MultiIndex::new(&[0, 0]), Coefficient::Const(-0.5))])
        .unwrap();
    let tol = 1e-6;
    let mut errs = Vec::new();
    let mut ok = true;
    let mut detail = String::new();
    for npts in [32, 64] {
        let p = ParametrixOperator::new(&l, &[0.0, 0.0], 0.2, npts, &young, None).map_err(|e| e.to_string())?;
        let us = polynomial_bump(p.domain(), &[0.0, 0.0], 0.2);
        let f = apply(&l, &us).map_err(|e| e.to_string())?;
        let (u, rep) = p.neumann_solve(&f, tol, 200).map_err(|e| e.to_string())?;
        let err = p.w_norm(&u.sub(&us).unwrap()).unwrap() / p.w_norm(&us).unwrap();
        errs.push(err);
        if npts == 64 {
            let steps: Vec<f64> = rep.iterations.iter().map(|i| i.step).collect();
            let ratios: Vec<f64> = steps.windows(2).map(|w| w[1] / w[0]).collect();
            let worst = ratios[ratios.len().saturating_sub(3)..].iter().fold(0.0f64, |a, &r| a.max(r));
            ok &= rep.converged && worst < 1.0 && rep.fixed_point_defect <= 2.0 * tol && err <= 0.1;
            detail = format!(
                "N=64: {} iterations, max step ratio {worst:.3}, certificate {:.2e}, error {err:.4}",
                rep.iterations.len(),
                rep.fixed_point_defect
            );
        }
    }
    ok &= errs[1] < errs[0];
    within(t, Duration::from_secs(300), check(ok, format!("{detail}; error N=32 {:.4}", errs[0])))
}

fn c9_invariance() -> Outcome {
    let dom = GridDomain::new(2, 128, 1.0).unwrap();
    let f = mollifier_bump(&dom, &[0.0, 0.0], 0.25);
    let m = YoungFunction::power(2.0, 1.0).unwrap();
    let deltas: Vec<ShiftVector> = [32, 16, 8, 4, 2, 1].iter().map(|&k| ShiftVector::grid(&[k, 0])).collect();
    let k = SingularKernel::cos2theta();
    let rows = shift_invariance_probe(&k, &f, &m, &deltas).map_err(|e| e.to_string())?;
    let max = rows.iter().fold(0.0f64, |a, r| a.max(r.output_modulus));
    let last = rows.last().unwrap().output_modulus;
    check(
        k.mean_zero_defect() <= 1e-8 && last < 0.1 * max,
        format!("output modulus at one cell {last:.3e} = {:.1}% of max {max:.3e}", 100.0 * last / max),
    )
}

fn run_cli(cmd: &str, cfg: &Path, out: &Path) -> Result<std::path::PathBuf, String> {
    let st = Command::new(env!("CARGO_BIN_EXE_parametrix"))
        .args([cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "5"])
        .output()
        .map_err(|e| e.to_string())?;
    if !st.status.success() {
        return Err(format!("{cmd} exited {:?}: {}", st.status.code(), String::from_utf8_lossy(&st.stderr)));
    }
    let dir = std::fs::read_dir(out).map_err(|e| e.to_string())?.next().ok_or("no run directory")?.map_err(|e| e.to_string())?;
    Ok(dir.path())
}

fn c10_reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs = [
        ("young", "young = power-log:p=2\n"),
        ("norms", "young = power:p=3\ngrid.N = 32\nf = bump:0.5\ninequality.trials = 4\ndual.trials = 16\n"),
        ("mollify", "young = power:p=2\ngrid.n = 2\ngrid.N = 32\nf = indicator\nmask = ball:0.6\neps = 0.4,0.2\n"),
        ("shift", "young = power:p=2\ngrid.N = 32\nmultiplier = expr:1+0.5*x1\n"),
        ("contraction", "operator = n=2,m=2\ncoeff p=(2,0) expr=-(1+x1)\ncoeff p=(0,2) expr=-(1+x1)\ngrid.N = 32\n"),
        (
            "solve",
            "operator = n=2,m=2\ncoeff p=(2,0) expr=-(1+0.2*x1)\ncoeff p=(0,2) expr=-(1+0.2*x1)\ncoeff p=(0,0) expr=-0.5\ngrid.N = 32\nsigma.radii = 0.4,0.2\nf = manufactured:poly:0.2\n",
        ),
    ];
    let mut compared = 0;
    for (cmd, body) in configs {
        let cfg = tmp.path().join(format!("{cmd}.cfg"));
        std::fs::write(&cfg, body).map_err(|e| e.to_string())?;
        let a = run_cli(cmd, &cfg, &tmp.path().join(format!("a-{cmd}")))?;
        let b = run_cli(cmd, &cfg, &tmp.path().join(format!("b-{cmd}")))?;
        for entry in std::fs::read_dir(&a).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.extension().is_some_and(|e| e == "csv") {
                let name = path.file_name().unwrap();
                let (x, y) = (std::fs::read(&path).unwrap(), std::fs::read(b.join(name)).map_err(|e| e.to_string())?);
                if x != y {
                    return Err(format!("{cmd}: {} differs between runs", name.to_string_lossy()));
                }
                compared += 1;
            }
        }
        if !a.join("config.resolved").exists() || !a.join("manifest.json").exists() {
            return Err(format!("{cmd}: resolved config or manifest missing"));
        }
    }
    check(compared > 0, format!("{compared} CSV files byte-identical across two runs of six commands"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("complementary-pair oracle", c1_complementary),
        ("Boyd oracle", c2_boyd),
        ("norm consistency", c3_norms),
        ("inequality suite", c4_inequalities),
        ("fundamental-solution reproduction", c5_reproduction),
        ("parametrix identity", c6_identity),
        ("contraction profile", c7_contraction),
        ("local existence", c8_local_solve),
        ("singular-operator invariance", c9_invariance),
        ("reproducibility", c10_reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
