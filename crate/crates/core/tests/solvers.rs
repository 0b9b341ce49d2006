mod common;

use num_complex::Complex64;
use perpot::greens::heat_green;
use perpot::solvers::{
    evaluate_solution, solve_heat_dirichlet_exterior, solve_helmholtz_dirichlet_exterior,
    solve_laplace_dirichlet_exterior, SolveOptions,
};
use perpot::{BoundaryGeometry, CurveShape, Density, HeatRepresentation, KernelFamily, UnitCell, WaveParams};

fn square() -> UnitCell {
    UnitCell::new(&[1.0, 1.0]).unwrap()
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

const PROBES_2D: [[f64; 3]; 5] = [[0.05, 0.1, 0.0], [0.9, 0.5, 0.0], [0.5, 0.95, 0.0], [0.2, 0.7, 0.0], [0.8, 0.15, 0.0]];

#[test]
fn laplace_two_pole_manufactured_solution() {
    let cell = square();
    let kf = KernelFamily::laplace(cell.clone());
    let g = BoundaryGeometry::curve(CurveShape::Circle { radius: 0.25 }, [0.5, 0.5, 0.0], 256).unwrap();
    let (p0, p1) = ([0.55, 0.5, 0.0], [0.45, 0.53, 0.0]);
    // equal and opposite charges cancel the background, so the field is periodic and harmonic outside
    let exact = |x: &[f64; 3]| kf.laplace_green(&sub(x, &p0)).unwrap() - kf.laplace_green(&sub(x, &p1)).unwrap();
    let data: Vec<f64> = g.nodes().iter().map(exact).collect();
    let sol = solve_laplace_dirichlet_exterior(&cell, &g, &data, &SolveOptions::default()).unwrap();
    assert!(!sol.failed, "residual {}", sol.residual);
    for x in PROBES_2D {
        let u = evaluate_solution(&kf, &g, &sol, &x, None).unwrap().re;
        let e = exact(&x);
        assert!((u - e).abs() < 1e-8 * e.abs().max(1e-3), "{x:?}: {u} vs {e}");
    }
}

#[test]
fn laplace_solution_is_periodic_and_harmonic() {
    let cell = square();
    let kf = KernelFamily::laplace(cell.clone());
    let g = BoundaryGeometry::curve(CurveShape::Kite { scale: 0.2 }, [0.5, 0.5, 0.0], 128).unwrap();
    let data: Vec<f64> = g.params().iter().map(|p| (2.0 * p[0]).sin() + 0.3).collect();
    let sol = solve_laplace_dirichlet_exterior(&cell, &g, &data, &SolveOptions::default()).unwrap();
    let u = |x: &[f64; 3]| evaluate_solution(&kf, &g, &sol, x, None).unwrap().re;
    let x = [0.1, 0.2, 0.0];
    let base = u(&x);
    assert!((u(&[1.1, 0.2, 0.0]) - base).abs() < 1e-8 * base.abs());
    assert!((u(&[0.1, -0.8, 0.0]) - base).abs() < 1e-8 * base.abs());
    let lap = common::d2_fd4(&u, &x, 0, 0.0025) + common::d2_fd4(&u, &x, 1, 0.0025);
    assert!(lap.abs() < 1e-6, "{lap}");
}

#[test]
fn solvers_are_linear() {
    let cell = square();
    let g = BoundaryGeometry::curve(CurveShape::Ellipse { a: 0.2, b: 0.12 }, [0.5, 0.5, 0.0], 64).unwrap();
    let a: Vec<f64> = g.params().iter().map(|p| p[0].cos()).collect();
    let b: Vec<f64> = g.params().iter().map(|p| (3.0 * p[0]).sin()).collect();
    let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + 2.0 * y).collect();
    let opts = SolveOptions::default();
    let solve = |d: &[f64]| solve_laplace_dirichlet_exterior(&cell, &g, d, &opts).unwrap();
    let (sa, sb, sab) = (solve(&a), solve(&b), solve(&ab));
    let (Density::Real(ma), Density::Real(mb), Density::Real(mab)) = (&sa.density, &sb.density, &sab.density) else {
        panic!()
    };
    for i in 0..g.len() {
        assert!((mab[i] - ma[i] - 2.0 * mb[i]).abs() < 1e-12);
    }

    let levels = |f: &dyn Fn(f64, f64) -> f64| -> Vec<Vec<f64>> {
        (0..=4).map(|m| g.params().iter().map(|p| f(m as f64 * 0.05, p[0])).collect()).collect()
    };
    let ha = levels(&|t, s| t * s.cos());
    let hb = levels(&|t, _| t * t);
    let hab = levels(&|t, s| t * s.cos() + 2.0 * t * t);
    let hsolve = |d: &[Vec<f64>]| solve_heat_dirichlet_exterior(&cell, &g, 0.2, 4, d, &opts).unwrap().density;
    let (Density::Heat { values: va, .. }, Density::Heat { values: vb, .. }, Density::Heat { values: vab, .. }) =
        (hsolve(&ha), hsolve(&hb), hsolve(&hab))
    else {
        panic!()
    };
    for m in 0..=4 {
        for i in 0..g.len() {
            assert!((vab[m][i] - va[m][i] - 2.0 * vb[m][i]).abs() < 1e-12);
        }
    }
}

fn helmholtz_setup() -> (KernelFamily, BoundaryGeometry) {
    let cell = UnitCell::new(&[3.0, 3.0, 3.0]).unwrap();
    let kf = KernelFamily::helmholtz(cell, WaveParams::real(0.7, [0.3, 0.0, 0.0])).unwrap();
    (kf, BoundaryGeometry::sphere([1.5; 3], 1.0, 16).unwrap())
}

#[test]
fn helmholtz_manufactured_solution() {
    let (kf, g) = helmholtz_setup();
    let p0 = [1.7, 1.4, 1.35];
    let exact = |x: &[f64; 3]| kf.helmholtz_green(&sub(x, &p0)).unwrap();
    let data: Vec<Complex64> = g.nodes().iter().map(exact).collect();
    let sol = solve_helmholtz_dirichlet_exterior(&kf, &g, &data, &SolveOptions::default()).unwrap();
    assert!(!sol.failed);
    let probes = [[0.1, 0.2, 0.3], [2.9, 1.5, 1.5], [1.5, 2.85, 0.2], [0.3, 1.5, 2.8], [2.7, 0.2, 2.7]];
    for x in probes {
        let u = evaluate_solution(&kf, &g, &sol, &x, None).unwrap();
        let e = exact(&x);
        assert!((u - e).norm() < 1e-6 * e.norm(), "{x:?}: {u} vs {e}");
        // quasi-periodicity of the reconstruction
        let shifted = [x[0] + 3.0, x[1], x[2]];
        let us = evaluate_solution(&kf, &g, &sol, &shifted, None).unwrap();
        assert!((us - Complex64::from_polar(1.0, 0.9) * u).norm() < 1e-8 * u.norm());
    }
}

#[test]
fn helmholtz_zero_data_and_resonance() {
    let (kf, g) = helmholtz_setup();
    let sol = solve_helmholtz_dirichlet_exterior(&kf, &g, &vec![Complex64::new(0.0, 0.0); g.len()], &SolveOptions::default()).unwrap();
    let Density::Complex(theta) = &sol.density else { panic!() };
    assert!(theta.iter().all(|v| v.norm() == 0.0));
    let cell = UnitCell::new(&[3.0, 3.0, 3.0]).unwrap();
    if let Ok(res) = KernelFamily::helmholtz(cell, WaveParams::real(2.0 * std::f64::consts::PI / 3.0, [0.0; 3])) {
        let g4 = BoundaryGeometry::sphere([1.5; 3], 1.0, 4).unwrap();
        let data = vec![Complex64::new(1.0, 0.0); g4.len()];
        assert!(solve_helmholtz_dirichlet_exterior(&res, &g4, &data, &SolveOptions::default()).is_err());
    }
}

fn heat_errors(steps: usize) -> (Vec<f64>, Vec<f64>) {
    let cell = square();
    let kf = KernelFamily::heat(cell.clone());
    let g = BoundaryGeometry::curve(CurveShape::Circle { radius: 0.25 }, [0.5, 0.5, 0.0], 64).unwrap();
    let p0 = [0.52, 0.47, 0.0];
    let horizon = 0.25;
    let phi = |t: f64, x: &[f64; 3]| heat_green(&cell, t, &sub(x, &p0), HeatRepresentation::Auto).unwrap();
    let data: Vec<Vec<f64>> = (0..=steps)
        .map(|m| {
            let t = m as f64 * horizon / steps as f64;
            g.nodes().iter().map(|x| if m == 0 { 0.0 } else { phi(t, x) }).collect()
        })
        .collect();
    let sol = solve_heat_dirichlet_exterior(&cell, &g, horizon, steps, &data, &SolveOptions::default()).unwrap();
    assert!(!sol.failed);
    let probes = [[0.05, 0.1, 0.0], [0.9, 0.5, 0.0], [0.5, 0.9, 0.0]];
    let mut errs = Vec::new();
    let mut exact = Vec::new();
    for x in probes {
        let u = evaluate_solution(&kf, &g, &sol, &x, Some(horizon)).unwrap().re;
        let e = phi(horizon, &x);
        errs.push((u - e).abs());
        exact.push(e);
    }
    (errs, exact)
}

#[test]
fn heat_manufactured_solution_first_order_in_time() {
    let (e32, _) = heat_errors(32);
    let (e64, _) = heat_errors(64);
    let (e128, exact) = heat_errors(128);
    for i in 0..3 {
        assert!(e128[i] < 1e-3 * exact[i].abs(), "probe {i}: {} vs {}", e128[i], exact[i]);
        let r1 = e32[i] / e64[i];
        let r2 = e64[i] / e128[i];
        assert!((1.5..2.6).contains(&r1) && (1.5..2.6).contains(&r2), "ratios {r1} {r2}");
    }
}

#[test]
fn heat_solution_is_causal() {
    let cell = square();
    let kf = KernelFamily::heat(cell.clone());
    let g = BoundaryGeometry::curve(CurveShape::Circle { radius: 0.2 }, [0.5, 0.5, 0.0], 32).unwrap();
    let steps = 8;
    let base: Vec<Vec<f64>> = (0..=steps).map(|m| vec![m as f64 * 0.1; g.len()]).collect();
    let mut late = base.clone();
    for lvl in late.iter_mut().skip(6) {
        lvl.iter_mut().for_each(|v| *v += 3.0);
    }
    let opts = SolveOptions::default();
    let a = solve_heat_dirichlet_exterior(&cell, &g, 0.4, steps, &base, &opts).unwrap();
    let b = solve_heat_dirichlet_exterior(&cell, &g, 0.4, steps, &late, &opts).unwrap();
    let x = [0.05, 0.05, 0.0];
    for m in 1..=5 {
        let t = m as f64 * 0.05;
        let ua = evaluate_solution(&kf, &g, &a, &x, Some(t)).unwrap();
        let ub = evaluate_solution(&kf, &g, &b, &x, Some(t)).unwrap();
        assert_eq!(ua, ub);
    }
}
