//! Domain perturbation studies.
//!
//! [`run_epsilon_sweep`] shrinks a hole `p + eps Omega` and compares
//! `u_eps(xbar) / eps` with its predicted limit `G(xbar - p) int theta~`, where
//! `theta~` solves the free-space single layer equation on the reference
//! boundary. [`run_shape_sweep`] moves a curve along a one-parameter family of
//! diffeomorphisms and records heat-solution probe values together with finite
//! difference derivative estimates in the family parameter.

use crate::geometry::{BoundaryGeometry, DiffeoPerturbation, FieldBasis, GeometryKind, HoleSpec};
use crate::greens::{KernelFamily, KernelKind};
use crate::linalg::polyfit;
use crate::potentials::legendre_w;
use crate::solvers::{evaluate_solution, solve_first_kind, solve_heat_dirichlet_exterior, solve_helmholtz_dirichlet_exterior, SolveOptions};
use crate::{Density, Error, Point, Result, UnitCell};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Solution of the free-space equation `S theta = g` on a sphere, `S` with kernel `-1/(4 pi |t - s|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitDensity {
    pub density: Density,
    /// `int theta dsigma`.
    pub integral: Complex64,
}

pub fn limit_density(reference: &BoundaryGeometry, g: &[Complex64]) -> Result<LimitDensity> {
    if reference.kind() != GeometryKind::Sphere3d {
        return Err(Error::Unsupported("the limit equation is implemented on spheres only".into()));
    }
    if g.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            got: g.len(),
        });
    }
    let (_, w) = legendre_w(reference);
    let s = w.map(|v| Complex64::new(-v, 0.0));
    let (theta, _, _) = solve_first_kind(reference, s, g, &SolveOptions::default())?;
    let integral = theta.iter().zip(reference.weights()).map(|(t, w)| t * *w).sum();
    Ok(LimitDensity {
        density: Density::Complex(theta),
        integral,
    })
}

/// `G(xbar - p) int theta~ dsigma`, the limit of `u_eps(xbar) / eps`.
pub fn leading_coefficient(limit: &LimitDensity, kf: &KernelFamily, p: &Point, xbar: &Point) -> Result<Complex64> {
    if kf.kind() != KernelKind::Helmholtz {
        return Err(Error::InvalidParams("leading coefficient needs a Helmholtz kernel".into()));
    }
    if !kf.resonant_set().is_empty() {
        return Err(Error::Resonant {
            count: kf.resonant_set().len(),
        });
    }
    if limit.integral == Complex64::new(0.0, 0.0) {
        return Ok(limit.integral);
    }
    let z = [xbar[0] - p[0], xbar[1] - p[1], xbar[2] - p[2]];
    Ok(kf.helmholtz_green(&z)? * limit.integral)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    /// Successfully solved scales, decreasing.
    pub epsilons: Vec<f64>,
    pub probe_values: Vec<Complex64>,
    /// `u_eps(xbar) / eps`.
    pub scaled: Vec<Complex64>,
    /// Polynomial coefficients of `scaled` in `eps`, constant term first.
    pub fit: Vec<Complex64>,
    pub oracle_a1: Complex64,
    pub relative_gap: f64,
    /// `|scaled(eps) - a1| / |scaled(eps / 2) - a1|` for consecutive halvings.
    pub halving_ratios: Vec<f64>,
    /// Condition estimates of the per-eps systems.
    pub conditions: Vec<f64>,
    /// Scales whose solve failed, with the reason.
    pub failures: Vec<(f64, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSweep {
    pub p: Point,
    pub xbar: Point,
    pub epsilons: Vec<f64>,
    pub fit_degree: usize,
}

/// Solves the exterior Helmholtz problem on `p + eps Omega` for each `eps` with
/// data `g` given on the reference nodes.
pub fn run_epsilon_sweep(
    kf: &KernelFamily,
    reference: &BoundaryGeometry,
    g: &[Complex64],
    sweep: &EpsilonSweep,
    opts: &SolveOptions,
) -> Result<AsymptoticReport> {
    let eps = &sweep.epsilons;
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams("epsilons must be positive and strictly decreasing".into()));
    }
    if sweep.fit_degree > 3 {
        return Err(Error::InvalidParams("fit degree is limited to 3".into()));
    }
    let limit = limit_density(reference, g)?;
    let oracle_a1 = leading_coefficient(&limit, kf, &sweep.p, &sweep.xbar)?;
    let outcomes: Vec<Result<(Complex64, f64)>> = eps
        .par_iter()
        .map(|&e| {
            let hole = HoleSpec {
                center: sweep.p,
                epsilon: e,
                reference: reference.clone(),
            }
            .build(kf.cell())?;
            if kf.cell().distance_to_lattice(&sub(&sweep.xbar, &sweep.p)) <= e * reference.sphere_center_radius().map_or(1.0, |(_, r)| r) {
                return Err(Error::InvalidParams(format!("probe lies inside the hole at eps = {e}")));
            }
            let sol = solve_helmholtz_dirichlet_exterior(kf, &hole, g, opts)?;
            if sol.failed {
                return Err(Error::Accuracy { achieved: sol.residual });
            }
            Ok((evaluate_solution(kf, &hole, &sol, &sweep.xbar, None)?, sol.condition))
        })
        .collect();
    let mut report = AsymptoticReport {
        epsilons: Vec::new(),
        probe_values: Vec::new(),
        scaled: Vec::new(),
        fit: Vec::new(),
        oracle_a1,
        relative_gap: f64::NAN,
        halving_ratios: Vec::new(),
        conditions: Vec::new(),
        failures: Vec::new(),
    };
    for (&e, out) in eps.iter().zip(outcomes) {
        match out {
            Ok((u, cond)) => {
                report.epsilons.push(e);
                report.probe_values.push(u);
                report.scaled.push(u / e);
                report.conditions.push(cond);
            }
            Err(err) => {
                log::warn!("eps = {e}: {err}");
                report.failures.push((e, err.to_string()));
            }
        }
    }
    if report.epsilons.len() < sweep.fit_degree + 2 {
        return Err(Error::InvalidParams(format!(
            "degree {} fit needs {} successful scales, got {}",
            sweep.fit_degree,
            sweep.fit_degree + 2,
            report.epsilons.len()
        )));
    }
    report.fit = polyfit(&report.epsilons, &report.scaled, sweep.fit_degree)?;
    report.relative_gap = if oracle_a1.norm() > 0.0 {
        (report.fit[0] - oracle_a1).norm() / oracle_a1.norm()
    } else {
        report.fit[0].norm()
    };
    report.halving_ratios = report
        .scaled
        .windows(2)
        .map(|w| (w[0] - oracle_a1).norm() / (w[1] - oracle_a1).norm())
        .collect();
    Ok(report)
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Boundary data `f(t, x)` of the heat problem in physical coordinates.
pub type HeatData<'a> = &'a (dyn Fn(f64, &Point) -> f64 + Sync);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeSweep {
    /// Unperturbed boundary.
    pub base: BoundaryGeometry,
    /// Field moved along; the family is `phi_s = id + s psi`.
    pub direction: FieldBasis,
    /// Uniform symmetric grid `s0 + j h`, `j = -J..=J`; derivative
    /// estimates need `J >= 4`.
    pub s_grid: Vec<f64>,
    /// Probes `(t, x)` in the region outside every perturbed hole.
    pub probes: Vec<(f64, Point)>,
    pub horizon: f64,
    pub steps: usize,
    /// Nodes of each perturbed curve.
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub probe: usize,
    pub order: usize,
    /// Central difference with step `2h`.
    pub coarse: f64,
    /// Central difference with step `h`.
    pub fine: f64,
    /// `fine / coarse`; tends to 1 for a smooth dependence on `s`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSweepReport {
    pub s: Vec<f64>,
    pub probes: Vec<(f64, Point)>,
    /// `values[i][j]`: probe `j` at `s[i]`.
    pub values: Vec<Vec<f64>>,
    pub derivatives: Vec<DerivativeEstimate>,
    /// Largest `|u(t, x + q e_h) - u(t, x)|` over probes, solved parameters and cell directions.
    pub periodicity_error: f64,
    /// Parameters whose perturbation was inadmissible or whose solve failed.
    pub skipped: Vec<(f64, String)>,
}

/// Central differences of orders 1 to 3 at `s0` with step `h` from values at `s0 + j h`.
fn central_differences(u: impl Fn(i32) -> f64, h: f64) -> [f64; 3] {
    [
        (u(1) - u(-1)) / (2.0 * h),
        (u(1) - 2.0 * u(0) + u(-1)) / (h * h),
        (u(2) - 2.0 * u(1) + 2.0 * u(-1) - u(-2)) / (2.0 * h * h * h),
    ]
}

pub fn run_shape_sweep(cell: &UnitCell, sweep: &ShapeSweep, f: HeatData, opts: &SolveOptions) -> Result<ShapeSweepReport> {
    if sweep.s_grid.is_empty() {
        return Err(Error::InvalidParams("empty parameter grid".into()));
    }
    for (t, _) in &sweep.probes {
        if !(*t > 0.0 && *t <= sweep.horizon) {
            return Err(Error::InvalidParams(format!("probe time {t} outside (0, {}]", sweep.horizon)));
        }
    }
    let kf = KernelFamily::heat(cell.clone());
    let dt = sweep.horizon / sweep.steps as f64;
    let outcomes: Vec<Result<(Vec<f64>, f64)>> = sweep
        .s_grid
        .par_iter()
        .map(|&s| {
            let phi = DiffeoPerturbation::new(sweep.base.clone(), vec![sweep.direction.clone()], vec![s])?;
            let g = phi.apply(sweep.nodes, Some(cell))?;
            let data: Vec<Vec<f64>> = (0..=sweep.steps)
                .map(|m| {
                    if m == 0 {
                        vec![0.0; g.len()]
                    } else {
                        g.nodes().iter().map(|x| f(m as f64 * dt, x)).collect()
                    }
                })
                .collect();
            let sol = solve_heat_dirichlet_exterior(cell, &g, sweep.horizon, sweep.steps, &data, opts)?;
            if sol.failed {
                return Err(Error::Accuracy { achieved: sol.residual });
            }
            let mut values = Vec::with_capacity(sweep.probes.len());
            let mut periodicity: f64 = 0.0;
            for (t, x) in &sweep.probes {
                let ev = crate::potentials::double_layer_eval(&kf, &g, &sol.density, x, Some(*t))?;
                if ev.near_boundary {
                    return Err(Error::InvalidParams(format!("probe {x:?} is not clear of the boundary at s = {s}")));
                }
                let u = ev.scalar().re;
                for h in 0..cell.dim() {
                    let mut y = *x;
                    y[h] += cell.diag()[h];
                    let v = evaluate_solution(&kf, &g, &sol, &y, Some(*t))?.re;
                    periodicity = periodicity.max((v - u).abs());
                }
                values.push(u);
            }
            Ok((values, periodicity))
        })
        .collect();
    let mut report = ShapeSweepReport {
        s: Vec::new(),
        probes: sweep.probes.clone(),
        values: Vec::new(),
        derivatives: Vec::new(),
        periodicity_error: 0.0,
        skipped: Vec::new(),
    };
    let mut solved: Vec<Option<Vec<f64>>> = Vec::new();
    for (&s, out) in sweep.s_grid.iter().zip(outcomes) {
        match out {
            Ok((v, per)) => {
                report.s.push(s);
                report.values.push(v.clone());
                report.periodicity_error = report.periodicity_error.max(per);
                solved.push(Some(v));
            }
            Err(e) => {
                log::warn!("s = {s}: {e}");
                report.skipped.push((s, e.to_string()));
                solved.push(None);
            }
        }
    }
    // derivative estimates on a uniform symmetric grid with J >= 4
    let n = sweep.s_grid.len();
    if n % 2 == 1 && n >= 9 {
        let j = (n / 2) as i32;
        let h = (sweep.s_grid[n - 1] - sweep.s_grid[0]) / (n - 1) as f64;
        let uniform = sweep
            .s_grid
            .iter()
            .enumerate()
            .all(|(i, s)| (s - (sweep.s_grid[0] + i as f64 * h)).abs() <= 1e-12 * (1.0 + s.abs()));
        if uniform && h > 0.0 && j >= 4 {
            for probe in 0..sweep.probes.len() {
                let at = |k: i32| solved[(j + k) as usize].as_ref().map(|v| v[probe]);
                if (-4..=4).all(|k| at(k).is_some()) {
                    let fine = central_differences(|k| at(k).unwrap(), h);
                    let coarse = central_differences(|k| at(2 * k).unwrap(), 2.0 * h);
                    for order in 0..3 {
                        report.derivatives.push(DerivativeEstimate {
                            probe,
                            order: order + 1,
                            coarse: coarse[order],
                            fine: fine[order],
                            ratio: fine[order] / coarse[order],
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differences_are_exact_for_cubics() {
        let p = |s: f64| 1.0 + 2.0 * s - s * s + 0.5 * s * s * s;
        let h = 0.1;
        let d = central_differences(|k| p(0.3 + k as f64 * h), h);
        // p' = 2 - 2s + 1.5 s^2, p'' = -2 + 3s, p''' = 3; the first difference carries h^2 p'''/6
        assert!((d[0] - (2.0 - 0.6 + 1.5 * 0.09 + h * h * 0.5)).abs() < 1e-12);
        assert!((d[1] - (-2.0 + 0.9)).abs() < 1e-10);
        assert!((d[2] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn unit_sphere_limit_density_is_minus_one() {
        for radius in [1.0, 0.5] {
            let g = BoundaryGeometry::sphere([0.0; 3], radius, 6).unwrap();
            let lim = limit_density(&g, &vec![Complex64::new(1.0, 0.0); g.len()]).unwrap();
            let Density::Complex(t) = &lim.density else { panic!() };
            assert!(t.iter().all(|v| (v + 1.0 / radius).norm() < 1e-12));
            let expect = -4.0 * std::f64::consts::PI * radius;
            assert!((lim.integral.re - expect).abs() < 1e-12 && lim.integral.im.abs() < 1e-14);
        }
    }
}
