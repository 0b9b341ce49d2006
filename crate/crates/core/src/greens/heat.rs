//! Space-periodic heat kernel `Phi_{q,n}(t, x)` and its exact time integrals.

use super::reduce;
use crate::lattice::{add, dot, LatticeSpace, LatticeVec, UnitCell};
use crate::special::TimeMoments;
use crate::{Error, Point, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Exponent at which the Gaussian tails of the heat sums are cut.
pub const HEAT_CUTOFF: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum HeatRepresentation {
    /// Spatial images for `t <= t*`, spectral modes above.
    #[default]
    Auto,
    Spatial,
    Spectral,
}

/// Crossover time `t* = min(diag)^2 / 4`.
pub fn heat_crossover(cell: &UnitCell) -> f64 {
    cell.min_period().powi(2) / 4.0
}

/// Split point for time integrals; images are cheap to cut off below it.
fn integrated_crossover(cell: &UnitCell) -> f64 {
    cell.min_period().powi(2) / 16.0
}

fn half_diag(cell: &UnitCell) -> f64 {
    0.5 * cell.diag().iter().map(|q| q * q).sum::<f64>().sqrt()
}

/// Lattice tables for evaluating `Phi(t, .)` at a fixed `t` many times.
#[derive(Debug, Clone)]
pub struct HeatSum {
    cell: UnitCell,
    t: f64,
    spatial: bool,
    terms: Vec<LatticeVec>,
}

impl HeatSum {
    pub fn new(cell: &UnitCell, t: f64, rep: HeatRepresentation) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!("heat time must be positive, got {t}")));
        }
        let spatial = match rep {
            HeatRepresentation::Auto => t <= heat_crossover(cell),
            HeatRepresentation::Spatial => true,
            HeatRepresentation::Spectral => false,
        };
        let terms = if spatial {
            let radius = (4.0 * t * HEAT_CUTOFF).sqrt();
            cell.enumerate(radius + half_diag(cell), LatticeSpace::Direct)
        } else {
            cell.enumerate((HEAT_CUTOFF / t).sqrt(), LatticeSpace::Reciprocal)
                .into_iter()
                .filter(|z| *z > [0, 0, 0])
                .collect()
        };
        Ok(Self {
            cell: cell.clone(),
            t,
            spatial,
            terms,
        })
    }

    pub fn is_spatial(&self) -> bool {
        self.spatial
    }

    /// `Phi(t, x)` and its spatial gradient.
    pub fn eval(&self, x: &Point) -> (f64, Point) {
        let cell = &self.cell;
        let dim = cell.dim();
        let t = self.t;
        let (xr, _) = reduce(cell, x);
        let mut v = 0.0;
        let mut g = [0.0; 3];
        if self.spatial {
            let pref = (4.0 * PI * t).powf(-(dim as f64) / 2.0);
            let cut = 4.0 * t * HEAT_CUTOFF;
            for z in &self.terms {
                let y = add(&xr, &cell.direct_vector(z));
                let r2 = dot(&y, &y);
                if r2 > cut {
                    continue;
                }
                let e = pref * (-r2 / (4.0 * t)).exp();
                v += e;
                for j in 0..dim {
                    g[j] -= y[j] / (2.0 * t) * e;
                }
            }
        } else {
            let vol = cell.volume();
            v = 1.0 / vol;
            for z in &self.terms {
                let xi = cell.reciprocal_vector(z, &[0.0; 3]);
                let (s, c) = dot(&xi, &xr).sin_cos();
                let e = 2.0 * (-dot(&xi, &xi) * t).exp() / vol;
                v += e * c;
                for j in 0..dim {
                    g[j] -= e * s * xi[j];
                }
            }
        }
        (v, g)
    }
}

fn value_grad(cell: &UnitCell, t: f64, x: &Point, rep: HeatRepresentation) -> Result<(f64, Point)> {
    if t <= 0.0 {
        if t == 0.0 && cell.distance_to_lattice(x) <= 1e-12 * cell.min_period() {
            return Err(Error::SingularPoint {
                distance: cell.distance_to_lattice(x),
            });
        }
        return Ok((0.0, [0.0; 3]));
    }
    Ok(HeatSum::new(cell, t, rep)?.eval(x))
}

/// `Phi_{q,n}(t, x)`; zero for `t <= 0` off the lattice.
pub fn heat_green(cell: &UnitCell, t: f64, x: &Point, rep: HeatRepresentation) -> Result<f64> {
    value_grad(cell, t, x, rep).map(|v| v.0)
}

pub fn heat_green_grad(cell: &UnitCell, t: f64, x: &Point, rep: HeatRepresentation) -> Result<Point> {
    value_grad(cell, t, x, rep).map(|v| v.1)
}

/// `int_{t0}^{t1} Phi(s, x) ds` and its spatial gradient.
pub fn heat_green_time_integrated(cell: &UnitCell, t0: f64, t1: f64, x: &Point) -> Result<(f64, Point)> {
    heat_time_moment(cell, t0, t1, x, 0)
}

/// `int_{t0}^{t1} s^p Phi(s, x) ds` (p = 0 or 1) and its spatial gradient.
///
/// Images are integrated in closed form (incomplete gamma) up to a crossover
/// time, spectral modes in closed form beyond it.
pub fn heat_time_moment(cell: &UnitCell, t0: f64, t1: f64, x: &Point, p: u32) -> Result<(f64, Point)> {
    HeatWindow::new(cell, t0, t1, p)?.eval(x)
}

/// Precomputed lattice tables for `int_{t0}^{t1} s^p Phi(s, .) ds` at many points.
#[derive(Debug, Clone)]
pub struct HeatWindow {
    cell: UnitCell,
    t0: f64,
    p: u32,
    /// Upper end of the spatial part; the spatial part is empty when `s1 <= t0`.
    s1: f64,
    radius: f64,
    images: Vec<Point>,
    constant: f64,
    /// Reciprocal vectors with their time weights, one per `+-xi` pair.
    modes: Vec<(Point, f64)>,
}

impl HeatWindow {
    pub fn new(cell: &UnitCell, t0: f64, t1: f64, p: u32) -> Result<Self> {
        if p > 1 {
            return Err(Error::InvalidParams(format!("time moment order {p} > 1")));
        }
        if !(t0 >= 0.0 && t1 >= t0 && t1.is_finite()) {
            return Err(Error::InvalidParams(format!("invalid time window [{t0}, {t1}]")));
        }
        let tc = integrated_crossover(cell);
        let s1 = t1.min(tc);
        let mut out = Self {
            cell: cell.clone(),
            t0,
            p,
            s1,
            radius: 0.0,
            images: Vec::new(),
            constant: 0.0,
            modes: Vec::new(),
        };
        if t1 == t0 {
            out.s1 = t0;
            return Ok(out);
        }
        if s1 > t0 {
            out.radius = (4.0 * s1 * HEAT_CUTOFF).sqrt();
            out.images = cell
                .enumerate(out.radius + half_diag(cell), LatticeSpace::Direct)
                .iter()
                .map(|z| cell.direct_vector(z))
                .collect();
        }
        let a = t0.max(tc);
        if t1 > a {
            let vol = cell.volume();
            out.constant = match p {
                0 => (t1 - a) / vol,
                _ => 0.5 * (t1 * t1 - a * a) / vol,
            };
            for z in cell.enumerate((HEAT_CUTOFF / a).sqrt(), LatticeSpace::Reciprocal) {
                if z <= [0, 0, 0] {
                    continue;
                }
                let xi = cell.reciprocal_vector(&z, &[0.0; 3]);
                let w = 2.0 * exp_moment(dot(&xi, &xi), a, t1, p) / vol;
                out.modes.push((xi, w));
            }
        }
        Ok(out)
    }

    pub fn eval(&self, x: &Point) -> Result<(f64, Point)> {
        let cell = &self.cell;
        let dim = cell.dim();
        let (t0, s1, p) = (self.t0, self.s1, self.p);
        let tiny = 1e-12 * cell.min_period();
        let (xr, _) = reduce(cell, x);
        let mut v = self.constant;
        let mut g = [0.0; 3];
        if s1 > t0 {
            let p2 = 0.5f64.powi(p as i32);
            for q in &self.images {
                let y = add(&xr, q);
                let r = dot(&y, &y).sqrt();
                if r > self.radius {
                    continue;
                }
                if r <= tiny {
                    if t0 == 0.0 {
                        return Err(Error::SingularPoint { distance: r });
                    }
                    v += self_moment(dim, t0, s1, p);
                    continue;
                }
                let m = TimeMoments::new(dim, r, t0, s1, p == 1);
                v += p2 * m.get(-(p as i32));
                let d = -p2 * m.get(1 - p as i32);
                for j in 0..dim {
                    g[j] += d * y[j];
                }
            }
        }
        for (xi, w) in &self.modes {
            let (s, c) = dot(xi, &xr).sin_cos();
            v += w * c;
            for j in 0..dim {
                g[j] -= w * s * xi[j];
            }
        }
        Ok((v, g))
    }
}

/// `int_a^b s^p e^{-lam s} ds`.
fn exp_moment(lam: f64, a: f64, b: f64, p: u32) -> f64 {
    let ea = (-lam * a).exp();
    let eb = (-lam * b).exp();
    match p {
        0 => (ea - eb) / lam,
        _ => (a / lam + 1.0 / (lam * lam)) * ea - (b / lam + 1.0 / (lam * lam)) * eb,
    }
}

/// `int_a^b s^p (4 pi s)^{-n/2} ds` for the image sitting on `x`, with `a > 0`.
fn self_moment(dim: usize, a: f64, b: f64, p: u32) -> f64 {
    match (dim, p) {
        (2, 0) => (b / a).ln() / (4.0 * PI),
        (2, _) => (b - a) / (4.0 * PI),
        (_, 0) => 2.0 * (a.powf(-0.5) - b.powf(-0.5)) / (4.0 * PI).powf(1.5),
        (_, _) => 2.0 * (b.sqrt() - a.sqrt()) / (4.0 * PI).powf(1.5),
    }
}
