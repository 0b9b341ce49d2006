//! Nyström discretisation of the boundary operators.
//!
//! Curves: the parameter-space kernel `k(t, s) = G(x(t) - y(s)) |y'(s)|` is split as
//! `A |y'(s)| ln(4 sin^2((t-s)/2)) + b(t) cot((s-t)/2)/2 + smooth`. The log part uses
//! Kress weights, the Cauchy part the spectral periodic Hilbert transform, and
//! the smooth remainder the trapezoidal rule. `b` and the diagonal of the
//! remainder are read off the kernel at `s = t +- delta` with Richardson
//! extrapolation, so no family-specific limits are needed.
//!
//! Spheres: Laplace and Helmholtz split off `cos(kr)/(4 pi r)`, whose
//! integral against band-limited data is exact through the Legendre expansion
//! `1/|x-y| = (1/rho) sum_l P_l(cos gamma)`. Other families integrate in polar
//! coordinates around each node, with the density carried by the band-limited
//! reproducing kernel of the node grid.

use super::eval::check_compatible;
use super::kernel::{block_dim, Blk, LayerKernel, LayerKind};
use super::{BoundaryOperator, OperatorKind, OperatorMatrix};
use crate::geometry::{BoundaryGeometry, GeometryKind, SurfacePoint};
use crate::greens::{KernelFamily, KernelKind};
use crate::lattice::{dot, norm, sub};
use crate::quadrature::GaussLegendre;
use crate::special::{legendre_all, real_harmonics};
use crate::{Error, Point, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

fn layer_kind(op: OperatorKind) -> LayerKind {
    match op {
        OperatorKind::DoubleLayer => LayerKind::Double,
        OperatorKind::SingleNormal => LayerKind::SingleNormal,
        OperatorKind::SingleLayer => LayerKind::Single,
    }
}

/// Assembles `K`, `K*` or the boundary single layer for an elliptic family.
pub fn assemble(kf: &KernelFamily, g: &BoundaryGeometry, op: OperatorKind) -> Result<BoundaryOperator> {
    check_compatible(kf, g)?;
    if kf.kind() == KernelKind::Heat {
        return Err(Error::InvalidParams("heat operators are assembled with assemble_heat".into()));
    }
    if kf.kind() == KernelKind::Helmholtz && !kf.resonant_set().is_empty() {
        return Err(Error::Resonant {
            count: kf.resonant_set().len(),
        });
    }
    let kernel = LayerKernel::elliptic(kf, layer_kind(op));
    let d = block_dim(kf);
    let matrix = match (g.kind(), kf.kind()) {
        (GeometryKind::Curve2d, _) => {
            let a = log_coefficient(kf, op);
            OperatorMatrix::Real(assemble_curve(g, d, a, &|x, y| kernel.eval(&x.x, &x.normal, &y.x, &y.normal))?)
        }
        (GeometryKind::Sphere3d, KernelKind::Laplace) => {
            let m = assemble_sphere_split(kf, g, op)?;
            OperatorMatrix::Real(m.map(|z| z.re))
        }
        (GeometryKind::Sphere3d, KernelKind::Helmholtz) => OperatorMatrix::Complex(assemble_sphere_split(kf, g, op)?),
        (GeometryKind::Sphere3d, _) => OperatorMatrix::Real(assemble_sphere_polar(g, d, &kernel)?.map(|z| z.re)),
    };
    Ok(BoundaryOperator {
        family: kf.kind(),
        operator: op,
        block_dim: d,
        nodes: g.len(),
        matrix,
        fingerprint: g.fingerprint(),
    })
}

/// Causal blocks of the heat operator for `steps` uniform steps on `[0, horizon]`.
pub fn assemble_heat(
    kf: &KernelFamily,
    g: &BoundaryGeometry,
    op: OperatorKind,
    horizon: f64,
    steps: usize,
) -> Result<BoundaryOperator> {
    check_compatible(kf, g)?;
    if kf.kind() != KernelKind::Heat {
        return Err(Error::InvalidParams(format!(
            "assemble_heat called with a {} kernel",
            kf.kind().name()
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) || steps == 0 {
        return Err(Error::InvalidParams(format!("invalid time grid T = {horizon}, M = {steps}")));
    }
    let dt = horizon / steps as f64;
    let blocks = (0..steps)
        .map(|k| {
            let kernel = LayerKernel::heat(kf, layer_kind(op), k as f64 * dt, (k + 1) as f64 * dt)?;
            let a = if k == 0 && op == OperatorKind::SingleLayer {
                // int_0^dt Phi ~ -ln(r^2) / (4 pi)
                diag_coef(-1.0 / (4.0 * PI), 1)
            } else {
                [[0.0; 3]; 3]
            };
            assemble_curve(g, 1, a, &|x, y| kernel.eval(&x.x, &x.normal, &y.x, &y.normal))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryOperator {
        family: KernelKind::Heat,
        operator: op,
        block_dim: 1,
        nodes: g.len(),
        matrix: OperatorMatrix::Causal(blocks),
        fingerprint: g.fingerprint(),
    })
}

fn diag_coef(c: f64, d: usize) -> [[f64; 3]; 3] {
    let mut a = [[0.0; 3]; 3];
    for (i, row) in a.iter_mut().enumerate().take(d) {
        row[i] = c;
    }
    a
}

/// Coefficient of `ln(r^2)` in the planar kernel (nonzero for single layers only).
fn log_coefficient(kf: &KernelFamily, op: OperatorKind) -> [[f64; 3]; 3] {
    if op != OperatorKind::SingleLayer {
        return [[0.0; 3]; 3];
    }
    match kf.kind() {
        KernelKind::Laplace => diag_coef(1.0 / (4.0 * PI), 1),
        // Gamma = delta S - beta dd H with H ~ r^2 (ln r - 1) / (8 pi)
        KernelKind::Lame => {
            let beta = kf.lame_params().expect("Lamé kernel").beta();
            diag_coef((2.0 - beta) / (8.0 * PI), 2)
        }
        _ => [[0.0; 3]; 3],
    }
}

/// Curve assembler over real `d x d` blocks; `a` multiplies `|y'| ln(r^2)`.
fn assemble_curve(
    g: &BoundaryGeometry,
    d: usize,
    a: [[f64; 3]; 3],
    kernel: &(dyn Fn(&SurfacePoint, &SurfacePoint) -> Result<Blk> + Sync),
) -> Result<DMatrix<f64>> {
    let n = g.len();
    let half = n / 2;
    let h = 2.0 * PI / n as f64;
    let kress: Vec<f64> = (0..n)
        .map(|k| {
            let tau = k as f64 * h;
            let s: f64 = (1..half).map(|m| (m as f64 * tau).cos() / m as f64).sum();
            -2.0 * PI / half as f64 * s - PI / (half * half) as f64 * (half as f64 * tau).cos()
        })
        .collect();
    let hilbert: Vec<f64> = (0..n)
        .map(|k| {
            let tau = k as f64 * h;
            h * (1..half).map(|m| (m as f64 * tau).sin()).sum::<f64>()
        })
        .collect();
    let has_log = a.iter().any(|r| r.iter().any(|&v| v != 0.0));
    let pts = g.surface_points();
    let speed = g.speed();
    let param_kernel = |x: &SurfacePoint, t: f64| -> Result<[[f64; 3]; 3]> {
        let y = g.surface_point([t, 0.0]);
        let sp = g.area_element([t, 0.0]);
        let k = kernel(x, &y)?;
        let lg = if has_log {
            (4.0 * (0.5 * (t - x.param[0])).sin().powi(2)).ln()
        } else {
            0.0
        };
        let mut out = [[0.0; 3]; 3];
        for i in 0..d {
            for j in 0..d {
                out[i][j] = (k.0[i][j].re - a[i][j] * lg) * sp;
            }
        }
        Ok(out)
    };
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let x = &pts[i];
            let t = x.param[0];
            // Cauchy coefficient b and regular diagonal c by symmetric probing
            let probe = |delta: f64| -> Result<([[f64; 3]; 3], [[f64; 3]; 3])> {
                let p = param_kernel(x, t + delta)?;
                let m = param_kernel(x, t - delta)?;
                let mut b = [[0.0; 3]; 3];
                let mut c = [[0.0; 3]; 3];
                for r in 0..d {
                    for s in 0..d {
                        b[r][s] = 0.5 * delta * (p[r][s] - m[r][s]);
                        c[r][s] = 0.5 * (p[r][s] + m[r][s]);
                    }
                }
                Ok((b, c))
            };
            let delta = 1e-3;
            let (b1, c1) = probe(delta)?;
            let (b2, c2) = probe(0.5 * delta)?;
            let mut b = [[0.0; 3]; 3];
            let mut c = [[0.0; 3]; 3];
            for r in 0..d {
                for s in 0..d {
                    b[r][s] = (4.0 * b2[r][s] - b1[r][s]) / 3.0;
                    c[r][s] = (4.0 * c2[r][s] - c1[r][s]) / 3.0;
                }
            }
            let mut row = vec![0.0; n * d * d];
            for j in 0..n {
                let k = (j + n - i) % n;
                let y = &pts[j];
                let smooth = if j == i {
                    c
                } else {
                    let full = kernel(x, y)?;
                    let u = y.param[0] - t;
                    let lg = if has_log { (4.0 * (0.5 * u).sin().powi(2)).ln() } else { 0.0 };
                    let cot = 0.5 / (0.5 * u).tan();
                    let mut m = [[0.0; 3]; 3];
                    for r in 0..d {
                        for s in 0..d {
                            m[r][s] = (full.0[r][s].re - a[r][s] * lg) * speed[j] - b[r][s] * cot;
                        }
                    }
                    m
                };
                for r in 0..d {
                    for s in 0..d {
                        row[(r * n + j) * d + s] =
                            h * smooth[r][s] + kress[k] * a[r][s] * speed[j] + b[r][s] * hilbert[k];
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(n * d, n * d);
    for (i, row) in rows.iter().enumerate() {
        for r in 0..d {
            for j in 0..n {
                for s in 0..d {
                    m[(i * d + r, j * d + s)] = row[(r * n + j) * d + s];
                }
            }
        }
    }
    Ok(m)
}

/// `W_ij = (w_j / rho) sum_{l<L} P_l(cos gamma_ij) / (4 pi)`: quadrature of `1/(4 pi |x-y|)`.
pub(crate) fn legendre_w(g: &BoundaryGeometry) -> (Vec<Point>, DMatrix<f64>) {
    let (c, rho) = g.sphere_center_radius().expect("sphere");
    let l = g.order();
    let units: Vec<Point> = g
        .nodes()
        .iter()
        .map(|x| {
            let u = sub(x, &c);
            let r = norm(&u);
            [u[0] / r, u[1] / r, u[2] / r]
        })
        .collect();
    let n = g.len();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let ct = dot(&units[i], &units[j]).clamp(-1.0, 1.0);
            let s: f64 = legendre_all(l - 1, ct).iter().sum();
            w[(i, j)] = g.weights()[j] / rho * s / (4.0 * PI);
        }
    }
    (units, w)
}

/// Laplace and Helmholtz on spheres: free part through `W`, periodic remainder pointwise.
fn assemble_sphere_split(kf: &KernelFamily, g: &BoundaryGeometry, op: OperatorKind) -> Result<DMatrix<Complex64>> {
    let (_, rho) = g.sphere_center_radius().expect("sphere");
    let (_, w) = legendre_w(g);
    let k = kf.wave().map_or(Complex64::new(0.0, 0.0), |wv| wv.k);
    let n = g.len();
    let nodes = g.nodes();
    let normals = g.normals();
    let weights = g.weights();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<Complex64>> {
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                let z = sub(&nodes[i], &nodes[j]);
                let r = norm(&z);
                let (reg, grad): (Complex64, [Complex64; 3]) = match kf.kind() {
                    KernelKind::Laplace => {
                        let (v, gr) = kf.laplace_regular(&z)?;
                        (Complex64::new(v, 0.0), gr.map(|c| Complex64::new(c, 0.0)))
                    }
                    _ => kf.helmholtz_regular(&z)?,
                };
                let kr = k * r;
                let free = match op {
                    OperatorKind::SingleLayer => -kr.cos(),
                    // both normal projections of (x - y) equal +-r^2 / (2 rho)
                    _ => (kr.cos() + kr * kr.sin()) / (2.0 * rho),
                };
                let smooth = match op {
                    OperatorKind::SingleLayer => reg,
                    OperatorKind::DoubleLayer => -(grad[0] * normals[j][0] + grad[1] * normals[j][1] + grad[2] * normals[j][2]),
                    OperatorKind::SingleNormal => grad[0] * normals[i][0] + grad[1] * normals[i][1] + grad[2] * normals[i][2],
                };
                row[j] = w[(i, j)] * free + weights[j] * smooth;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Orthonormal `(e1, e2)` completing the unit vector `n`.
pub(crate) fn frame(n: &Point) -> (Point, Point) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&helper, n);
    let mut e1 = [helper[0] - d * n[0], helper[1] - d * n[1], helper[2] - d * n[2]];
    let l = norm(&e1);
    e1 = e1.map(|v| v / l);
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    (e1, e2)
}

/// Spherical parameters `[colatitude, longitude]` of a unit vector.
pub(crate) fn sphere_param(u: &Point) -> [f64; 2] {
    [u[2].clamp(-1.0, 1.0).acos(), u[1].atan2(u[0])]
}

/// Generic sphere assembly in rotated polar coordinates about each node.
///
/// The density between nodes is the band-limited interpolant
/// `mu(u) = sum_j w_j sum_{lm} Y_lm(u) Y_lm(u_j) mu_j`, so each row first
/// collects harmonic moments of the kernel and then evaluates them at the nodes.
fn assemble_sphere_polar(g: &BoundaryGeometry, d: usize, kernel: &LayerKernel) -> Result<DMatrix<Complex64>> {
    let (c, rho) = g.sphere_center_radius().expect("sphere");
    let l = g.order();
    let nh = l * l;
    let n = g.len();
    let n_alpha = 2 * l;
    let n_beta = 4 * l;
    let gl = GaussLegendre::new(n_alpha);
    let alpha: Vec<(f64, f64)> = gl.on_interval(0.0, PI).collect();
    let units: Vec<Point> = g.nodes().iter().map(|x| sub(x, &c).map(|v| v / rho)).collect();
    let y_nodes: Vec<Vec<f64>> = units.iter().map(|u| real_harmonics(l, u)).collect();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<Complex64>> {
            let u0 = units[i];
            let x = g.nodes()[i];
            let nx = g.normals()[i];
            let (e1, e2) = frame(&u0);
            // moments[(r * d + t) * nh + h]
            let mut moments = vec![Complex64::new(0.0, 0.0); d * d * nh];
            for &(a, wa) in &alpha {
                let (sa, ca) = a.sin_cos();
                for q in 0..n_beta {
                    let b = 2.0 * PI * q as f64 / n_beta as f64;
                    let (sb, cb) = b.sin_cos();
                    let u: Point = std::array::from_fn(|k| ca * u0[k] + sa * (cb * e1[k] + sb * e2[k]));
                    let y: Point = std::array::from_fn(|k| c[k] + rho * u[k]);
                    let wt = wa * 2.0 * PI / n_beta as f64 * rho * rho * sa;
                    let kb = kernel.eval(&x, &nx, &y, &u)?;
                    let yh = real_harmonics(l, &u);
                    for r in 0..d {
                        for t in 0..d {
                            let kw = kb.0[r][t] * wt;
                            let m = &mut moments[(r * d + t) * nh..(r * d + t + 1) * nh];
                            for (mh, yv) in m.iter_mut().zip(&yh) {
                                *mh += kw * yv;
                            }
                        }
                    }
                }
            }
            let mut row = vec![Complex64::new(0.0, 0.0); n * d * d];
            for j in 0..n {
                let wj = g.weights()[j] / (rho * rho);
                for r in 0..d {
                    for t in 0..d {
                        let m = &moments[(r * d + t) * nh..(r * d + t + 1) * nh];
                        let v: Complex64 = m.iter().zip(&y_nodes[j]).map(|(a, b)| a * b).sum();
                        row[(r * n + j) * d + t] = v * wj;
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(n * d, n * d);
    for (i, row) in rows.iter().enumerate() {
        for r in 0..d {
            for j in 0..n {
                for t in 0..d {
                    m[(i * d + r, j * d + t)] = row[(r * n + j) * d + t];
                }
            }
        }
    }
    Ok(m)
}
