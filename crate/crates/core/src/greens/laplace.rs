//! Periodic Laplace kernel `S_{q,n}`, normalised to zero mean over the cell.

use super::KernelFamily;
use super::KernelKind;
use crate::lattice::{add, norm};
use crate::special::{ein, erf, erfc, exp_int_e1, EULER_GAMMA};
use crate::{Error, Point, Result};
use std::f64::consts::PI;

impl KernelFamily {
    /// `S_{q,n}(x)`.
    pub fn laplace_green(&self, x: &Point) -> Result<f64> {
        self.laplace_value_grad(x).map(|v| v.0)
    }

    /// `grad S_{q,n}(x)`.
    pub fn laplace_green_grad(&self, x: &Point) -> Result<Point> {
        self.laplace_value_grad(x).map(|v| v.1)
    }

    pub fn laplace_value_grad(&self, x: &Point) -> Result<(f64, Point)> {
        self.require_laplace()?;
        self.check_accuracy()?;
        self.guard(x)?;
        Ok(self.laplace_eval(x, false))
    }

    /// `S_{q,n}(x) - S_free(x)` and its gradient, smooth through `x = 0`.
    ///
    /// The free-space part is `-1/(4 pi |x|)` in 3D and `log|x| / (2 pi)` in 2D,
    /// taken at the unreduced `x`.
    pub fn laplace_regular(&self, x: &Point) -> Result<(f64, Point)> {
        self.require_laplace()?;
        Ok(self.laplace_eval(x, true))
    }

    fn require_laplace(&self) -> Result<()> {
        match self.kind() {
            KernelKind::Laplace | KernelKind::Lame => Ok(()),
            k => Err(Error::InvalidParams(format!(
                "Laplace evaluation requested from a {} kernel",
                k.name()
            ))),
        }
    }

    pub(crate) fn laplace_eval(&self, x: &Point, regular: bool) -> (f64, Point) {
        let dim = self.dim();
        let tau = self.tau();
        let vol = self.cell().volume();
        let radius = self.ewald().real_radius;
        let (xr, w) = self.reduce(x);
        let mut v = 0.0;
        let mut g = [0.0; 3];
        for z in &self.images {
            if regular && *z == w {
                continue;
            }
            let y = add(&xr, &self.cell().direct_vector(z));
            let r = norm(&y);
            if r > radius {
                continue;
            }
            let (a0, a1) = image_a0_a1(dim, r, tau);
            v -= a0;
            for j in 0..dim {
                g[j] += a1 * y[j];
            }
        }
        if regular {
            let y = add(&xr, &self.cell().direct_vector(&w));
            let (rv, rg) = self_image_regular(dim, norm(&y), tau);
            v += rv;
            for j in 0..dim {
                g[j] += rg * y[j];
            }
        }
        v += tau / vol;
        let ph = self.phases(&xr);
        for t in &self.spectral {
            let e = ph.phase(&t.z);
            let c = 2.0 * t.c.re / vol;
            v -= c * e.re;
            for j in 0..dim {
                g[j] += c * e.im * t.xi[j];
            }
        }
        (v, g)
    }
}

/// `A_0(r)` and `A_1(r)` over `[0, tau]`: the screened image and `-(1/r) dA_0/dr`.
#[inline]
fn image_a0_a1(dim: usize, r: f64, tau: f64) -> (f64, f64) {
    if dim == 3 {
        let s = r / (2.0 * tau.sqrt());
        let a0 = erfc(s) / (4.0 * PI * r);
        let a1 = (a0 + (-s * s).exp() / (4.0 * PI * (PI * tau).sqrt())) / (r * r);
        (a0, a1)
    } else {
        let u = r * r / (4.0 * tau);
        (
            exp_int_e1(u) / (4.0 * PI),
            (-u).exp() / (2.0 * PI * r * r),
        )
    }
}

/// Value and `(1/r) d/dr` of `-A_0(r) - S_free(r)`, regular at `r = 0`.
fn self_image_regular(dim: usize, r: f64, tau: f64) -> (f64, f64) {
    if dim == 3 {
        let st = (PI * tau).sqrt();
        let s = r / (2.0 * tau.sqrt());
        if s < 1e-3 {
            let s2 = s * s;
            let v = (1.0 - s2 / 3.0 + s2 * s2 / 10.0) / (4.0 * PI * st);
            let d = (-1.0 / (6.0 * tau) + r * r / (40.0 * tau * tau)) / (4.0 * PI * st);
            (v, d)
        } else {
            let e = erf(s);
            let v = e / (4.0 * PI * r);
            let d = ((-s * s).exp() / st - e / r) / (4.0 * PI * r * r);
            (v, d)
        }
    } else {
        let u = r * r / (4.0 * tau);
        let v = -(ein(u) - EULER_GAMMA + (4.0 * tau).ln()) / (4.0 * PI);
        let dein = if u < 1e-12 { 1.0 } else { -(-u).exp_m1() / u };
        (v, -dein / (8.0 * PI * tau))
    }
}
