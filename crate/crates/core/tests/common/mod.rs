#![allow(dead_code)]

use perpot::{Point, UnitCell};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform points in the cell whose distance to the lattice is at least `frac * min period`.
pub fn off_lattice_points(cell: &UnitCell, count: usize, frac: f64, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let mut x = [0.0; 3];
        for (j, q) in cell.diag().iter().enumerate() {
            x[j] = r.random_range(0.0..*q);
        }
        if cell.distance_to_lattice(&x) >= frac * cell.min_period() {
            out.push(x);
        }
    }
    out
}

fn shifted(x: &Point, j: usize, h: f64) -> Point {
    let mut y = *x;
    y[j] += h;
    y
}

/// Fourth-order central second derivative along axis `j`.
pub fn d2_fd4<T, F>(f: &F, x: &Point, j: usize, h: f64) -> T
where
    F: Fn(&Point) -> T,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
{
    let fp2 = f(&shifted(x, j, 2.0 * h));
    let fp1 = f(&shifted(x, j, h));
    let f0 = f(x);
    let fm1 = f(&shifted(x, j, -h));
    let fm2 = f(&shifted(x, j, -2.0 * h));
    (fp1 * 16.0 + fm1 * 16.0 - fp2 - fm2 - f0 * 30.0) * (1.0 / (12.0 * h * h))
}

/// Fourth-order mixed derivative `d_i d_l` (i != l) via Richardson on the 4-point stencil.
pub fn mixed_fd4<T, F>(f: &F, x: &Point, i: usize, l: usize, h: f64) -> T
where
    F: Fn(&Point) -> T,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
{
    let d = |h: f64| {
        let pp = f(&shifted(&shifted(x, i, h), l, h));
        let pm = f(&shifted(&shifted(x, i, h), l, -h));
        let mp = f(&shifted(&shifted(x, i, -h), l, h));
        let mm = f(&shifted(&shifted(x, i, -h), l, -h));
        (pp - pm - mp + mm) * (1.0 / (4.0 * h * h))
    };
    (d(h) * 4.0 - d(2.0 * h)) * (1.0 / 3.0)
}

/// Fourth-order central first derivative along axis `j`.
pub fn d1_fd4<T, F>(f: &F, x: &Point, j: usize, h: f64) -> T
where
    F: Fn(&Point) -> T,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
{
    let fp2 = f(&shifted(x, j, 2.0 * h));
    let fp1 = f(&shifted(x, j, h));
    let fm1 = f(&shifted(x, j, -h));
    let fm2 = f(&shifted(x, j, -2.0 * h));
    (fp1 * 8.0 - fm1 * 8.0 - fp2 + fm2) * (1.0 / (12.0 * h))
}

/// Adaptive Simpson quadrature, independent of the crate's own rules.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Gauss–Legendre nodes/weights on [a, b] by Golub–Welsch-free Newton iteration.
pub fn gauss(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((a + 0.5 * (b - a) * (x + 1.0), 0.5 * (b - a) * w));
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
