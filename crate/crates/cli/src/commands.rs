use parametrix_core::grid::ShiftVector;
use parametrix_core::kernels::{
    fundamental_solution, named_operator, shift_invariance_probe, singular_integral, FundamentalSolution,
    SingularKernel,
};
use parametrix_core::numeric::logspace;
use parametrix_core::operator::{apply, MultiIndex};
use parametrix_core::orlicz::{
    characteristic_norm, dual_norm_lower_bound_with, inequality_suite_with, luxemburg_norm, modular, mollifier_kernel,
    mollify, orlicz_norm, random_triple, shift_modulus,
};
use parametrix_core::parametrix::{estimate_sigma, multiplier_shift_check, ParametrixOperator};
use parametrix_core::young::{boyd_indices, check_delta2, complementary, embedding_exponents, YoungKind};
use parametrix_core::{Error, GridDomain, GridFunction};

use crate::config::Config;
use crate::output::{kv, num, Cell, Run, Table};
use crate::CliError;

pub fn dispatch(cfg: &Config, run: &mut Run) -> Result<i32, CliError> {
    match cfg.command.as_str() {
        "young" => young(cfg, run),
        "norms" => norms(cfg, run),
        "mollify" => mollify_cmd(cfg, run),
        "shift" => shift_cmd(cfg, run),
        "contraction" => contraction(cfg, run),
        "solve" => solve(cfg, run),
        other => Err(CliError::Usage(format!("unknown command '{other}'"))),
    }
}

fn young(cfg: &Config, run: &mut Run) -> Result<i32, CliError> {
    let m = cfg.young()?;
    let vs = logspace(cfg.f64("complementary.v_min")?, cfg.f64("complementary.v_max")?, cfg.usize("complementary.count")?);
    let n = complementary(&m, &vs)?;
    let mut t = Table::new(&["v", "N"]);
    for &v in &vs {
        t.row(vec![v.into(), n.evaluate(v).into()]);
    }
    run.table("complementary.csv", &t)?;
    run.mark("complementary");

    match boyd_indices(&m) {
        Ok(b) => {
            let (p, q) = match embedding_exponents(&b) {
                Ok((p, q)) => (Cell::Num(p), Cell::Num(q)),
                Err(e) => (Cell::Text(format!("none: {e}")), Cell::Text("none".into())),
            };
            run.table(
                "boyd.csv",
                &kv(vec![
                    ("status", "ok".into()),
                    ("alpha", b.alpha.into()),
                    ("beta", b.beta.into()),
                    ("fit_residual", b.fit_residual.into()),
                    ("embedding_p", p),
                    ("embedding_q", q),
                ]),
            )?;
            let mut h = Table::new(&["t", "h"]);
            for &(t, v) in &b.h_samples {
                h.row(vec![t.into(), v.into()]);
            }
            run.table("boyd_h.csv", &h)?;
        }
        Err(Error::UnstableLimsup { trace }) => {
            run.table("boyd.csv", &kv(vec![("status", "unstable limsup estimate".into())]))?;
            let mut h = Table::new(&["t", "h"]);
            for (t, v) in trace {
                h.row(vec![t.into(), v.into()]);
            }
            run.table("boyd_h.csv", &h)?;
        }
        Err(e) => return Err(e.into()),
    }
    run.mark("boyd");

    let u0 = cfg.f64("delta2.u0")?;
    let u_max = match cfg.get("delta2.u_max") {
        "auto" => (m.domain_cap() / 2.0).min(1e6),
        _ => cfg.f64("delta2.u_max")?,
    };
    let d = check_delta2(&m, u0, u_max)?;
    run.table(
        "delta2.csv",
        &kv(vec![
            ("verdict", if d.satisfied { "pass" } else { "fail" }.into()),
            ("k_hat", d.k_hat.into()),
            ("u0", d.u0_used.into()),
            ("u_max", u_max.into()),
        ]),
    )?;
    let mut tr = Table::new(&["u", "ratio"]);
    for &(u, r) in &d.worst_ratio_trace {
        tr.row(vec![u.into(), r.into()]);
    }
    run.table("delta2_trace.csv", &tr)?;
    run.mark("delta2");
    Ok(0)
}

fn shifts_along_x1(cfg: &Config, domain: &GridDomain) -> Result<Vec<(i64, ShiftVector)>, CliError> {
    Ok(cfg
        .list_i64("shifts")?
        .into_iter()
        .map(|k| {
            let mut s = vec![0; domain.n()];
            s[0] = k;
            (k, ShiftVector::grid(&s))
        })
        .collect())
}

fn p_norm(f: &GridFunction, p: f64) -> f64 {
    let s: f64 = f.values.iter().zip(f.domain.mask()).filter(|(_, &b)| b).map(|(v, _)| v.abs().powf(p)).sum();
    (s * f.domain.cell_volume()).powf(1.0 / p)
}

fn norms(cfg: &Config, run: &mut Run) -> Result<i32, CliError> {
    let seed = cfg.u64("seed")?;
    let m = cfg.young()?;
    let n = m.conjugate()?;
    let dom = cfg.domain()?;
    let f = cfg.function("f", &dom)?;
    let g = if cfg.get("g") == "f" { f.clone() } else { cfg.function("g", &dom)? };
    let mes = dom.mask_measure();
    let lux = luxemburg_norm(&f, &m)?;
    let mut rows: Vec<(&str, Cell)> = vec![
        ("measure", mes.into()),
        ("modular", modular(&f, &m).into()),
        ("luxemburg", lux.into()),
        ("orlicz", orlicz_norm(&f, &m)?.into()),
        ("dual_lower_bound", dual_norm_lower_bound_with(&f, &m, &n, cfg.usize("dual.trials")?, seed)?.into()),
        ("characteristic_formula", characteristic_norm(mes, &n)?.into()),
    ];
    if let YoungKind::Power { p } = m.kind() {
        let pn = m.evaluate(1.0).powf(1.0 / p) * p_norm(&f, p);
        rows.push(("scaled_p_norm", pn.into()));
        rows.push(("p_norm_abs_error", (lux - pn).abs().into()));
    }
    run.table("norms.csv", &kv(rows))?;
    run.mark("norms");

    let mut t = Table::new(&["trial", "young", "inequality", "lhs", "rhs", "violated"]);
    let mut push = |trial: usize, label: &str, r: parametrix_core::orlicz::InequalityReport| {
        for e in r.entries {
            t.row(vec![trial.into(), label.into(), e.name.into(), e.lhs.into(), e.rhs.into(), e.violated.into()]);
        }
    };
    push(0, m.label(), inequality_suite_with(&f, &g, &m, &n)?);
    let full = dom.full_mask();
    for k in 1..=cfg.usize("inequality.trials")? {
        let (rf, rg, rm) = random_triple(&full, seed.wrapping_add(k as u64))?;
        let rn = rm.conjugate()?;
        push(k, rm.label(), inequality_suite_with(&rf, &rg, &rm, &rn)?);
    }
    run.table("inequalities.csv", &t)?;
    run.mark("inequalities");

    let shifts = shifts_along_x1(cfg, &dom)?;
    let deltas: Vec<ShiftVector> = shifts.iter().map(|s| s.1.clone()).collect();
    let mut t = Table::new(&["steps", "magnitude", "modulus", "interpolated"]);
    for ((k, _), r) in shifts.iter().zip(shift_modulus(&f, &m, &deltas)?) {
        t.row(vec![(*k).into(), r.magnitude.into(), r.modulus.into(), r.interpolated.into()]);
    }
    run.table("shift_modulus.csv", &t)?;
    run.mark("shift_modulus");
    Ok(0)
}

fn mollify_cmd(cfg: &Config, run: &mut Run) -> Result<i32, CliError> {
    let m = cfg.young()?;
    let dom = cfg.domain()?;
    let f = cfg.function("f", &dom)?;
    let mut t = Table::new(&["eps", "kernel_mass", "distance_M", "distance_sup"]);
    for eps in cfg.list_f64("eps")? {
        let k = mollifier_kernel(&dom, eps)?;
        let mass = k.iter().sum::<f64>() * dom.cell_volume();
        let diff = mollify(&f, eps)?.sub(&f)?;
        t.row(vec![eps.into(), mass.into(), luxemburg_norm(&diff, &m)?.into(), diff.sup_norm().into()]);
    }
    run.table("mollify.csv", &t)?;
    run.mark("mollify");
    Ok(0)
}

fn singular_kernel(cfg: &Config, n: usize) -> Result<SingularKernel, CliError> {
    let v = cfg.get("kernel");
    if v == "cos2theta" {
        return Ok(SingularKernel::cos2theta());
    }
    let (name, p) = v
        .split_once(":(")
        .ok_or_else(|| CliError::Config(format!("kernel = {v}: expected cos2theta or <name>:(p1,..)")))?;
    let j = fundamental_solution(&named_operator(name)?)?;
    let p = MultiIndex::parse(&format!("({p}"))?;
    if j.n() != n {
        return Err(CliError::Config(format!("kernel = {v}: {}-D kernel on a {n}-D grid", j.n())));
    }
    Ok(SingularKernel::from_fundamental(&j, &p)?)
}

fn shift_cmd(cfg: &Config, run: &mut Run) -> Result<i32, CliError> {
    let m = cfg.young()?;
    let dom = cfg.domain()?;
    let f = cfg.function("f", &dom)?;
    let k = singular_kernel(cfg, dom.n())?;
    let shifts = shifts_along_x1(cfg, &dom)?;
    let deltas: Vec<ShiftVector> = shifts.iter().map(|s| s.1.clone()).collect();
    let rows = shift_invariance_probe(&k, &f, &m, &deltas)?;
    let mut t = Table::new(&["steps", "magnitude", "input_modulus", "output_modulus", "interpolated"]);
    for ((s, _), r) in shifts.iter().zip(&rows) {
        t.row(vec![(*s).into(), r.magnitude.into(), r.input_modulus.into(), r.output_modulus.into(), r.interpolated.into()]);
    }
    run.table("shift.csv", &t)?;
    let kf = singular_integral(&k, &f)?;
    let nf = luxemburg_norm(&f, &m)?;
    let ratio = if nf > 0.0 { luxemburg_norm(&kf, &m)? / nf } else { 0.0 };
    run.table(
        "shift_summary.csv",
        &kv(vec![("kernel", k.label().into()), ("mean_zero_defect", k.mean_zero_defect().into()), ("norm_ratio", ratio.into())]),
    )?;
    run.mark("shift");

    if let Some(e) = cfg.expr_value("multiplier", "expr:", dom.n())? {
        let a = GridFunction::from_fn(&dom, |x| e.eval(x));
        let eps = match cfg.get("multiplier.eps") {
            "auto" => 4.0 * dom.h(),
            _ => cfg.f64("multiplier.eps")?,
        };
        let mut t = Table::new(&[
            "steps", "magnitude", "product_modulus", "f_modulus", "a_sup", "delta1", "delta2", "delta3", "bound",
        ]);
        for ((s, _), r) in shifts.iter().zip(multiplier_shift_check(&a, &f, &m, &deltas, eps)?) {
            t.row(vec![
                (*s).into(),
                r.magnitude.into(),
                r.product_modulus.into(),
                r.f_modulus.into(),
                r.a_sup.into(),
                r.delta1.into(),
                r.delta2.into(),
                r.delta3.into(),
                r.bound.into(),
            ]);
        }
        run.table("multiplier.csv", &t)?;
        run.mark("multiplier");
    }
    Ok(0)
}

fn explicit_kernel(cfg: &Config) -> Result<Option<FundamentalSolution>, CliError> {
    match cfg.get("kernel") {
        "auto" => Ok(None),
        name => Ok(Some(fundamental_solution(&named_operator(name)?)?)),
    }
}

fn sigma_table(cfg: &Config, run: &mut Run) -> Result<(bool, f64), CliError> {
    let l = cfg.operator()?;
    let x0 = cfg.x0(l.n())?;
    let radii = cfg.list_f64("sigma.radii")?;
    let prof = estimate_sigma(&l, &x0, &radii, cfg.usize("sigma.probes")?, cfg.u64("seed")?, cfg.usize("grid.N")?, &cfg.young()?)?;
    let mut t = Table::new(&["r", "sigma_hat"]);
    for (r, s) in prof.radii.iter().zip(&prof.sigma_hat) {
        t.row(vec![(*r).into(), (*s).into()]);
    }
    run.table("sigma_profile.csv", &t)?;
    run.mark("sigma_profile");
    Ok((prof.is_monotone(0.1), prof.sigma_hat.last().copied().unwrap_or(0.0)))
}

fn contraction(cfg: &Config, run: &mut Run) -> Result<i32, CliError> {
    let l = cfg.operator()?;
    let x0 = cfg.x0(l.n())?;
    if let Some(j) = explicit_kernel(cfg)? {
        let r = cfg.list_f64("sigma.radii")?.first().copied().unwrap_or(0.2);
        ParametrixOperator::new(&l, &x0, r, cfg.usize("grid.N")?, &cfg.young()?, Some(j))?;
    }
    let (monotone, last) = sigma_table(cfg, run)?;
    run.table("contraction_summary.csv", &kv(vec![("monotone_within_10pct", monotone.into()), ("sigma_hat_smallest", last.into())]))?;
    println!("contraction: monotone {monotone}, smallest sigma_hat {}", num(last));
    Ok(0)
}

fn solve(cfg: &Config, run: &mut Run) -> Result<i32, CliError> {
    let l = cfg.operator()?;
    let x0 = cfg.x0(l.n())?;
    let young = cfg.young()?;
    let (r, tol, k_max, seed) = (cfg.f64("r")?, cfg.f64("tol")?, cfg.usize("k_max")?, cfg.u64("seed")?);
    let p = ParametrixOperator::new(&l, &x0, r, cfg.usize("grid.N")?, &young, explicit_kernel(cfg)?)?;
    let reproduction = p.verify_kernel()?;
    run.mark("setup");

    let manufactured = cfg.get("f").starts_with("manufactured:");
    let (f, u_star) = if manufactured {
        let u_star = cfg.function("f", p.domain())?;
        (apply(&l, &u_star)?, Some(u_star))
    } else {
        (cfg.function("f", p.domain())?, None)
    };

    let (monotone, _) = sigma_table(cfg, run)?;
    let sigma_r = p.sigma_hat(cfg.usize("sigma.probes")?, seed)?;
    run.mark("sigma_at_r");

    let (u, report, diverged) = match p.neumann_solve(&f, tol, k_max) {
        Ok((u, rep)) => (Some(u), rep, false),
        Err(Error::Divergence { report }) => (None, *report, true),
        Err(e) => return Err(e.into()),
    };
    run.mark("solve");

    let mut t = Table::new(&["k", "norm_W", "step_W", "residual_rel"]);
    for it in &report.iterations {
        t.row(vec![it.k.into(), it.norm.into(), it.step.into(), it.residual.into()]);
    }
    run.table("iterations.csv", &t)?;

    let certificate = report.converged && report.fixed_point_defect <= 2.0 * tol;
    let mut rows: Vec<(&str, Cell)> = vec![
        ("converged", report.converged.into()),
        ("diverged", diverged.into()),
        ("iterations", report.iterations.len().into()),
        ("empirical_ratio", report.empirical_ratio.into()),
        ("sigma_hat_r", sigma_r.into()),
        ("sigma_profile_monotone", monotone.into()),
        ("final_residual", report.final_residual.into()),
        ("fixed_point_defect", report.fixed_point_defect.into()),
        ("certificate", if certificate { "pass" } else { "fail" }.into()),
        ("kernel", p.kernel().label().into()),
        ("kernel_reproduction_error", reproduction.into()),
    ];
    if let (Some(u), Some(us)) = (&u, &u_star) {
        let err = p.w_norm(&u.sub(us)?)? / p.w_norm(us)?;
        rows.push(("solution_error_W", err.into()));
    }
    run.table("summary.csv", &kv(rows))?;
    if let Some(u) = &u {
        u.write_text(&run.dir.join("solution.txt"))?;
        run.register("solution.txt")?;
    }
    println!(
        "solve: converged={} iterations={} ratio={} residual={} defect={} certificate={}",
        report.converged,
        report.iterations.len(),
        num(report.empirical_ratio),
        num(report.final_residual),
        num(report.fixed_point_defect),
        if certificate { "pass" } else { "fail" }
    );
    Ok(if certificate { 0 } else { 3 })
}
