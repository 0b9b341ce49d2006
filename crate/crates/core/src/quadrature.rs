//! Gauss–Legendre rules and graded composite panels.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Panel breakpoints on `[0, len]`, geometrically refined toward 0.
pub fn graded_breaks(len: f64, levels: usize, ratio: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut b = len * ratio.powi(levels as i32);
    for _ in 0..levels {
        breaks.push(b);
        b /= ratio;
    }
    breaks.push(len);
    breaks
}

/// Composite Gauss–Legendre over the given breakpoints.
pub fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, breaks: &[f64], mut f: F) -> f64 {
    breaks
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}

/// Adaptive Gauss–Legendre (7 vs 15 points) with interval bisection.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> f64 {
    let lo = GaussLegendre::new(7);
    let hi = GaussLegendre::new(15);
    let mut stack = vec![(a, b, 0usize)];
    let mut total = 0.0;
    while let Some((x0, x1, depth)) = stack.pop() {
        let c = lo.integrate(x0, x1, &mut f);
        let fine = hi.integrate(x0, x1, &mut f);
        if (fine - c).abs() <= tol * (x1 - x0) / (b - a) || depth > 40 {
            total += fine;
        } else {
            let m = 0.5 * (x0 + x1);
            stack.push((x0, m, depth + 1));
            stack.push((m, x1, depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        // degree 15 is integrated exactly
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert_relative_eq!(v, 2f64.powi(16) / 16.0, max_relative = 1e-13);
        let s: f64 = gl.weights.iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn graded_handles_log_singularity() {
        let gl = GaussLegendre::new(16);
        let br = graded_breaks(1.0, 30, 0.3);
        let v = composite(&gl, &br, |x| x.ln());
        assert_relative_eq!(v, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_oscillatory() {
        let v = adaptive(0.0, 10.0, 1e-12, |x| (3.0 * x).sin());
        assert_relative_eq!(v, (1.0 - 30f64.cos()) / 3.0, epsilon = 1e-11);
    }
}
