//! One function per subcommand, each producing tables and checks.

use crate::config::{point, Command, RunConfig};
use crate::data::{heat_field, read_records, reference_data, stationary_field, test_density};
use crate::output::{columns, num, Check, Outcome, Table};
use anyhow::{bail, Context};
use perpot::experiments::{run_epsilon_sweep, run_shape_sweep, ShapeSweep};
use perpot::geometry::{GeometryKind, Shape};
use perpot::greens::HeatSum;
use perpot::potentials::{jump_check, JumpIdentity, Side};
use perpot::solvers::{
    evaluate_solution, solve_heat_dirichlet_exterior, solve_helmholtz_dirichlet_exterior, solve_laplace_dirichlet_exterior,
};
use perpot::{BoundaryGeometry, Complex64, Density, HeatRepresentation, KernelFamily, KernelKind, Point, UnitCell};
use rayon::prelude::*;
use serde_json::json;

pub fn run(cmd: Command, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    match cmd {
        Command::EvalGreen => eval_green(cfg),
        Command::JumpCheck => jump(cfg),
        Command::Solve => solve(cfg),
        Command::Asymptotics => asymptotics(cfg),
        Command::ShapeSweep => shape_sweep(cfg),
    }
}

fn setup(cfg: &RunConfig) -> anyhow::Result<(UnitCell, KernelFamily)> {
    let cell = cfg.cell.as_ref().context("missing cell")?.build()?;
    let kf = cfg.kernel.as_ref().context("missing kernel")?.build(&cell)?;
    Ok((cell, kf))
}

fn geometry(cfg: &RunConfig, cell: &UnitCell) -> anyhow::Result<BoundaryGeometry> {
    Ok(cfg.geometry.as_ref().context("missing geometry")?.build(cell)?)
}

fn eval_green(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let (cell, kf) = setup(cfg)?;
    let n = cell.dim();
    let factor = cfg.kernel.as_ref().map_or(1.0, |k| k.split_factor);
    // second representation: another Ewald split, or the other heat series
    let alt_factor = if factor >= 1.0 { factor / 2.0 } else { factor * 2.0 };
    let alt = match kf.kind() {
        KernelKind::Heat => None,
        _ => Some(kf.clone().with_split_factor(alt_factor)?),
    };
    let t = cfg.controls.time;
    let mut header = columns("x", n);
    match kf.kind() {
        KernelKind::Laplace | KernelKind::Heat => {
            header.push("value".into());
            header.extend(columns("grad", n));
        }
        KernelKind::Helmholtz => {
            header.extend(["value_re".into(), "value_im".into()]);
            for j in 0..n {
                header.extend([format!("grad{j}_re"), format!("grad{j}_im")]);
            }
        }
        KernelKind::Lame => {
            for i in 0..n {
                header.extend((0..n).map(|j| format!("g{i}{j}")));
            }
        }
    }
    header.push("rep_agreement".into());
    let heat_pair = if kf.kind() == KernelKind::Heat {
        Some((
            HeatSum::new(&cell, t, HeatRepresentation::Spatial)?,
            HeatSum::new(&cell, t, HeatRepresentation::Spectral)?,
        ))
    } else {
        None
    };
    let rows: Vec<anyhow::Result<(Vec<String>, f64)>> = cfg
        .controls
        .points
        .par_iter()
        .map(|p| {
            let x = point(p);
            let mut row: Vec<String> = p.iter().map(|&v| num(v)).collect();
            let agree = match kf.kind() {
                KernelKind::Laplace => {
                    let (v, g) = kf.laplace_value_grad(&x)?;
                    row.push(num(v));
                    row.extend(g[..n].iter().map(|&v| num(v)));
                    let w = alt.as_ref().unwrap().laplace_green(&x)?;
                    (v - w).abs() / v.abs().max(f64::MIN_POSITIVE)
                }
                KernelKind::Helmholtz => {
                    let (v, g) = kf.helmholtz_value_grad(&x)?;
                    row.extend([num(v.re), num(v.im)]);
                    for gj in &g[..n] {
                        row.extend([num(gj.re), num(gj.im)]);
                    }
                    let w = alt.as_ref().unwrap().helmholtz_green(&x)?;
                    (v - w).norm() / v.norm().max(f64::MIN_POSITIVE)
                }
                KernelKind::Lame => {
                    let m = kf.lame_green(&x)?;
                    let w = alt.as_ref().unwrap().lame_green(&x)?;
                    let mut diff: f64 = 0.0;
                    let mut size: f64 = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            row.push(num(m[i][j]));
                            diff = diff.max((m[i][j] - w[i][j]).abs());
                            size = size.max(m[i][j].abs());
                        }
                    }
                    diff / size.max(f64::MIN_POSITIVE)
                }
                KernelKind::Heat => {
                    let (a, b) = heat_pair.as_ref().unwrap();
                    let (v, g) = a.eval(&x);
                    let (w, _) = b.eval(&x);
                    row.push(num(v));
                    row.extend(g[..n].iter().map(|&v| num(v)));
                    (v - w).abs()
                }
            };
            row.push(num(agree));
            Ok((row, agree))
        })
        .collect();
    let mut table = Table::new("eval_green", header);
    let mut worst: f64 = 0.0;
    for r in rows {
        let (row, agree) = r?;
        worst = worst.max(agree);
        table.push(row);
    }
    Ok(Outcome {
        checks: vec![Check::at_most("eval_green.rep_agreement", worst, cfg.acceptance.max_rep_disagreement)],
        tables: vec![table],
        results: json!({
            "family": kf.kind().name(),
            "points": cfg.controls.points.len(),
            "time": if kf.kind() == KernelKind::Heat { Some(t) } else { None },
            "alternate_split_factor": alt.as_ref().map(|_| alt_factor),
        }),
    })
}

fn jump(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let opts = cfg.jump_options();
    let mut summary = Table::new(
        "jump_check",
        ["case", "family", "identity", "interior_error", "exterior_error", "max_error", "threshold"]
            .map(String::from)
            .to_vec(),
    );
    let mut detail = Table::new(
        "jump_rows",
        [
            "case", "family", "identity", "side", "target", "component", "limit_re", "limit_im", "predicted_re",
            "predicted_im", "error", "spread",
        ]
        .map(String::from)
        .to_vec(),
    );
    let mut checks = Vec::new();
    for (ci, case) in cfg.cases().iter().enumerate() {
        let cell = case.cell.build()?;
        let kf = case.kernel.build(&cell)?;
        let g = case.geometry.build(&cell)?;
        let mu = test_density(cfg.data.expression, kf.kind(), g.kind() == GeometryKind::Sphere3d)?;
        let threshold = if kf.kind() == KernelKind::Heat {
            cfg.acceptance.max_heat_jump_error
        } else {
            cfg.acceptance.max_jump_error
        };
        let family = kf.kind().name();
        for identity in [JumpIdentity::DoubleLayer, JumpIdentity::SingleLayerNormal] {
            let mut errs = [0.0; 2];
            for (si, side) in [Side::Interior, Side::Exterior].into_iter().enumerate() {
                let rep = jump_check(&kf, &g, &*mu, identity, side, &opts)?;
                errs[si] = rep.max_error;
                for row in &rep.rows {
                    for comp in 0..row.components {
                        detail.push(vec![
                            ci.to_string(),
                            family.into(),
                            identity.name().into(),
                            format!("{side:?}").to_lowercase(),
                            row.target.to_string(),
                            comp.to_string(),
                            num(row.limit[comp].re),
                            num(row.limit[comp].im),
                            num(row.predicted[comp].re),
                            num(row.predicted[comp].im),
                            num(row.error),
                            num(row.spread),
                        ]);
                    }
                }
            }
            let worst = errs[0].max(errs[1]);
            summary.push(vec![
                ci.to_string(),
                family.into(),
                identity.name().into(),
                num(errs[0]),
                num(errs[1]),
                num(worst),
                num(threshold),
            ]);
            checks.push(Check::at_most(format!("jump.case{ci}.{family}.{}", identity.name()), worst, threshold));
        }
    }
    Ok(Outcome {
        results: json!({ "cases": summary.len() / 2, "targets": opts.targets }),
        tables: vec![summary, detail],
        checks,
    })
}

fn solve(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let (cell, kf) = setup(cfg)?;
    let g = geometry(cfg, &cell)?;
    let n = cell.dim();
    let opts = cfg.solve_options();
    let data = &cfg.data;
    let probes: Vec<Point> = cfg.controls.points.iter().map(|p| point(p)).collect();
    let file = match &data.file {
        Some(path) if data.expression == crate::config::Expression::File => Some(read_records(path)?),
        _ => None,
    };
    let horizon = cfg.controls.horizon;
    let steps = cfg.controls.steps;
    // exact[i] is the manufactured value at probe i, when the data define one
    let (sol, exact): (_, Option<Vec<Complex64>>) = match kf.kind() {
        KernelKind::Heat => {
            let levels: Vec<Vec<f64>> = match &file {
                Some(rec) => rec.clone(),
                None => {
                    let f = heat_field(data, &cell)?;
                    let dt = horizon / steps as f64;
                    (0..=steps)
                        .map(|m| {
                            let t = m as f64 * dt;
                            g.nodes().iter().map(|x| if m == 0 { 0.0 } else { (f.eval)(t, x) }).collect()
                        })
                        .collect()
                }
            };
            let sol = solve_heat_dirichlet_exterior(&cell, &g, horizon, steps, &levels, &opts)?;
            let exact = match file {
                None => {
                    let f = heat_field(data, &cell)?;
                    f.exact.then(|| probes.iter().map(|x| Complex64::new((f.eval)(horizon, x), 0.0)).collect())
                }
                Some(_) => None,
            };
            (sol, exact)
        }
        KernelKind::Laplace | KernelKind::Helmholtz => {
            let (values, field) = match &file {
                Some(rec) => {
                    if rec.len() != g.len() {
                        bail!("data file has {} records for {} nodes", rec.len(), g.len());
                    }
                    let v: Vec<Complex64> = rec.iter().map(|r| Complex64::new(r[0], r.get(1).copied().unwrap_or(0.0))).collect();
                    (v, None)
                }
                None => {
                    let f = stationary_field(data, &kf)?;
                    let v = g.nodes().iter().map(|x| (f.eval)(x)).collect::<anyhow::Result<Vec<_>>>()?;
                    (v, Some(f))
                }
            };
            let sol = if kf.kind() == KernelKind::Laplace {
                let re: Vec<f64> = values.iter().map(|z| z.re).collect();
                solve_laplace_dirichlet_exterior(&cell, &g, &re, &opts)?
            } else {
                solve_helmholtz_dirichlet_exterior(&kf, &g, &values, &opts)?
            };
            let exact = match field {
                Some(f) if f.exact => Some(probes.iter().map(|x| (f.eval)(x)).collect::<anyhow::Result<Vec<_>>>()?),
                _ => None,
            };
            (sol, exact)
        }
        KernelKind::Lame => bail!("solve does not support the Lamé family"),
    };
    let t = (kf.kind() == KernelKind::Heat).then_some(horizon);
    let values: Vec<Complex64> = probes
        .par_iter()
        .map(|x| evaluate_solution(&kf, &g, &sol, x, t))
        .collect::<perpot::Result<_>>()?;

    let mut header = columns("x", n);
    header.extend(["u_re", "u_im"].map(String::from));
    if exact.is_some() {
        header.extend(["exact_re", "exact_im", "rel_error"].map(String::from));
    }
    let mut table = Table::new("solve", header);
    let mut worst: f64 = 0.0;
    for (i, (x, u)) in probes.iter().zip(&values).enumerate() {
        let mut row: Vec<String> = x[..n].iter().map(|&v| num(v)).collect();
        row.extend([num(u.re), num(u.im)]);
        if let Some(e) = &exact {
            let rel = (u - e[i]).norm() / e[i].norm().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            row.extend([num(e[i].re), num(e[i].im), num(rel)]);
        }
        table.push(row);
    }
    let mut dens = Table::new("density", {
        let mut h = vec!["level".to_string(), "node".to_string()];
        h.extend(columns("x", n));
        h.extend(["re", "im"].map(String::from));
        h
    });
    let mut push_level = |level: usize, vals: &mut dyn Iterator<Item = Complex64>| {
        for (i, v) in vals.enumerate() {
            let mut row = vec![level.to_string(), i.to_string()];
            row.extend(g.nodes()[i][..n].iter().map(|&v| num(v)));
            row.extend([num(v.re), num(v.im)]);
            dens.push(row);
        }
    };
    match &sol.density {
        Density::Real(v) => push_level(0, &mut v.iter().map(|&x| Complex64::new(x, 0.0))),
        Density::Complex(v) => push_level(0, &mut v.iter().copied()),
        Density::Heat { values, .. } => {
            for (m, lvl) in values.iter().enumerate() {
                push_level(m, &mut lvl.iter().map(|&x| Complex64::new(x, 0.0)));
            }
        }
        Density::Vector { .. } => unreachable!(),
    }
    let mut checks = vec![Check::at_most("solve.residual", sol.residual, opts.tolerance)];
    if exact.is_some() && !probes.is_empty() {
        checks.push(Check::at_most("solve.max_relative_error", worst, cfg.acceptance.max_solution_error));
    }
    Ok(Outcome {
        tables: vec![table, dens],
        checks,
        results: json!({
            "family": kf.kind().name(),
            "representation": sol.representation,
            "residual": sol.residual,
            "condition": sol.condition,
            "constant": sol.constant,
            "manufactured": exact.is_some(),
        }),
    })
}

fn asymptotics(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let (cell, kf) = setup(cfg)?;
    let spec = cfg.geometry.as_ref().context("missing geometry")?;
    let Shape::Sphere { radius } = spec.shape()? else {
        bail!("asymptotics needs a spherical reference hole");
    };
    let reference = BoundaryGeometry::sphere([0.0; 3], radius, spec.resolution)?;
    let g = reference_data(&cfg.data, &reference)?;
    let sweep = cfg.epsilon_sweep(spec.center(&cell));
    let rep = run_epsilon_sweep(&kf, &reference, &g, &sweep, &cfg.solve_options())?;
    let mut table = Table::new(
        "asymptotics",
        ["epsilon", "u_re", "u_im", "scaled_re", "scaled_im", "gap_to_oracle", "halving_ratio", "condition"]
            .map(String::from)
            .to_vec(),
    );
    let a1 = rep.oracle_a1;
    for i in 0..rep.epsilons.len() {
        let s = rep.scaled[i];
        let gap = if a1.norm() > 0.0 { (s - a1).norm() / a1.norm() } else { s.norm() };
        table.push(vec![
            num(rep.epsilons[i]),
            num(rep.probe_values[i].re),
            num(rep.probe_values[i].im),
            num(s.re),
            num(s.im),
            num(gap),
            if i == 0 { String::new() } else { num(rep.halving_ratios[i - 1]) },
            num(rep.conditions[i]),
        ]);
    }
    let [lo, hi] = cfg.acceptance.ratio_range;
    let mut checks = vec![
        Check::at_most("asymptotics.relative_gap", rep.relative_gap, cfg.acceptance.max_relative_gap),
        Check::at_most("asymptotics.failed_scales", rep.failures.len() as f64, 0.0),
    ];
    for (i, r) in rep.halving_ratios.iter().enumerate() {
        checks.push(Check::within(format!("asymptotics.halving_ratio{i}"), *r, lo, hi));
    }
    Ok(Outcome {
        tables: vec![table],
        checks,
        results: serde_json::to_value(&rep)?,
    })
}

fn shape_sweep(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let (cell, kf) = setup(cfg)?;
    if kf.kind() != KernelKind::Heat {
        bail!("shape-sweep solves heat problems");
    }
    let base = geometry(cfg, &cell)?;
    let c = &cfg.controls;
    let times = if c.probe_times.is_empty() { vec![c.horizon; c.points.len()] } else { c.probe_times.clone() };
    let sweep = ShapeSweep {
        base,
        direction: c.direction,
        s_grid: cfg.s_grid(),
        probes: times.into_iter().zip(c.points.iter().map(|p| point(p))).collect(),
        horizon: c.horizon,
        steps: c.steps,
        nodes: cfg.geometry.as_ref().map_or(64, |g| g.resolution),
    };
    let f = heat_field(&cfg.data, &cell)?;
    let rep = run_shape_sweep(&cell, &sweep, &*f.eval, &cfg.solve_options())?;
    let mut header = vec!["s".to_string()];
    header.extend(columns("probe", sweep.probes.len()));
    let mut values = Table::new("shape_sweep", header);
    for (s, v) in rep.s.iter().zip(&rep.values) {
        let mut row = vec![num(*s)];
        row.extend(v.iter().map(|&x| num(x)));
        values.push(row);
    }
    let mut derivs = Table::new("derivatives", ["probe", "order", "coarse", "fine", "ratio"].map(String::from).to_vec());
    let mut checks = vec![
        Check::at_most("shape_sweep.periodicity", rep.periodicity_error, cfg.acceptance.max_periodicity_error),
        Check::at_most("shape_sweep.skipped", rep.skipped.len() as f64, 0.0),
    ];
    for d in &rep.derivatives {
        derivs.push(vec![d.probe.to_string(), d.order.to_string(), num(d.coarse), num(d.fine), num(d.ratio)]);
        checks.push(Check::at_most(
            format!("shape_sweep.probe{}.order{}.ratio_deviation", d.probe, d.order),
            (d.ratio - 1.0).abs(),
            cfg.acceptance.max_ratio_deviation,
        ));
    }
    let grid = &sweep.s_grid;
    if grid.len() > 1 && grid.iter().all(|&s| s == grid[0]) && !rep.values.is_empty() {
        let mut spread: f64 = 0.0;
        for v in &rep.values {
            for (a, b) in v.iter().zip(&rep.values[0]) {
                spread = spread.max((a - b).abs());
            }
        }
        checks.push(Check::at_most("shape_sweep.identity_spread", spread, cfg.acceptance.max_identity_spread));
    }
    Ok(Outcome {
        tables: vec![values, derivs],
        checks,
        results: serde_json::to_value(&rep)?,
    })
}

