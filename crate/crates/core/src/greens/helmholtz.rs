//! Quasi-periodic Helmholtz kernel `G^k_{q,eta}` in three dimensions.

use super::{KernelFamily, KernelKind};
use crate::lattice::{add, dot, norm};
use crate::special::{erf_complex, erfc_complex};
use crate::{Error, Point, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type CVec3 = [Complex64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl KernelFamily {
    /// `G^k_{q,eta}(x)`, with the resonant modes omitted.
    pub fn helmholtz_green(&self, x: &Point) -> Result<Complex64> {
        self.helmholtz_value_grad(x).map(|v| v.0)
    }

    pub fn helmholtz_green_grad(&self, x: &Point) -> Result<CVec3> {
        self.helmholtz_value_grad(x).map(|v| v.1)
    }

    pub fn helmholtz_value_grad(&self, x: &Point) -> Result<(Complex64, CVec3)> {
        self.require_helmholtz()?;
        self.check_accuracy()?;
        self.guard(x)?;
        Ok(self.helmholtz_eval(x, false))
    }

    /// `G(x) + cos(k|x|)/(4 pi |x|)` and its gradient, smooth through `x = 0`.
    ///
    /// At `x = 0` the limit is returned. Very close to the origin (but not at
    /// it) the gradient loses digits to cancellation; Nyström pairs never get there.
    pub fn helmholtz_regular(&self, x: &Point) -> Result<(Complex64, CVec3)> {
        self.require_helmholtz()?;
        Ok(self.helmholtz_eval(x, true))
    }

    fn require_helmholtz(&self) -> Result<()> {
        if self.kind() != KernelKind::Helmholtz {
            return Err(Error::InvalidParams(format!(
                "Helmholtz evaluation requested from a {} kernel",
                self.kind().name()
            )));
        }
        Ok(())
    }

    fn helmholtz_eval(&self, x: &Point, regular: bool) -> (Complex64, CVec3) {
        let wave = self.wave().expect("Helmholtz kernel carries wave parameters");
        let k = wave.k;
        let eta = wave.eta;
        let tau = self.tau();
        let vol = self.cell().volume();
        let radius = self.ewald().real_radius;
        let (xr, w) = self.reduce(x);
        let mut v = ZERO;
        let mut g = [ZERO; 3];
        let image_phase = |z: &[i64; 3]| {
            let qz = self.cell().direct_vector(z);
            Complex64::from_polar(1.0, -dot(&eta, &qz))
        };
        for z in &self.images {
            if regular && *z == w {
                continue;
            }
            let y = add(&xr, &self.cell().direct_vector(z));
            let r = norm(&y);
            if r > radius {
                continue;
            }
            let (f, fp) = image_f(k, r, tau);
            let p = image_phase(z);
            v += p * f;
            let d = p * fp / r;
            for j in 0..3 {
                g[j] += d * y[j];
            }
        }
        if regular {
            let y = add(&xr, &self.cell().direct_vector(&w));
            let r = norm(&y);
            let p = image_phase(&w);
            if r < 1e-9 {
                v += p * regular_limit(k, tau);
            } else {
                let (f, fp) = image_f(k, r, tau);
                let (s, c) = (k * r).sin_cos_pair();
                let free = c / (4.0 * PI * r);
                let dfree = -(c + k * r * s) / (4.0 * PI * r * r);
                v += p * (f - free);
                let d = p * (fp - dfree) / r;
                for j in 0..3 {
                    g[j] += d * y[j];
                }
            }
        }
        let eta_phase = Complex64::from_polar(1.0, dot(&eta, &xr));
        let ph = self.phases(&xr);
        for kappa in &self.resonant_xi {
            let e = Complex64::from_polar(1.0, dot(kappa, &xr));
            v -= tau / vol * e;
            for j in 0..3 {
                g[j] -= tau / vol * Complex64::i() * kappa[j] * e;
            }
        }
        for t in &self.spectral {
            let e = eta_phase * ph.phase(&t.z) * t.c / vol;
            v += e;
            let ie = Complex64::i() * e;
            for j in 0..3 {
                g[j] += ie * t.xi[j];
            }
        }
        let shift = Complex64::from_polar(1.0, dot(&eta, &self.cell().direct_vector(&w)));
        let v = -v * shift;
        for gj in g.iter_mut() {
            *gj = -*gj * shift;
        }
        (v, g)
    }
}

trait SinCos {
    fn sin_cos_pair(self) -> (Complex64, Complex64);
}

impl SinCos for Complex64 {
    fn sin_cos_pair(self) -> (Complex64, Complex64) {
        (self.sin(), self.cos())
    }
}

/// Screened image `F(r) = int_0^tau e^{k^2 t} (4 pi t)^{-3/2} e^{-r^2/4t} dt` and `F'(r)`.
fn image_f(k: Complex64, r: f64, tau: f64) -> (Complex64, Complex64) {
    let sq = tau.sqrt();
    let s = r / (2.0 * sq);
    let iksq = Complex64::i() * k * sq;
    let ikr = Complex64::i() * k * r;
    let phi_p = ikr.exp() * erfc_complex(s + iksq);
    let phi_m = (-ikr).exp() * erfc_complex(s - iksq);
    let f = (phi_p + phi_m) / (8.0 * PI * r);
    let gauss = (-s * s + k * k * tau).exp() / (PI * tau).sqrt();
    let fp = (Complex64::i() * k * (phi_p - phi_m) - 2.0 * gauss) / (8.0 * PI * r) - f / r;
    (f, fp)
}

/// `lim_{r -> 0} F(r) - cos(kr)/(4 pi r)`.
fn regular_limit(k: Complex64, tau: f64) -> Complex64 {
    let iksq = Complex64::i() * k * tau.sqrt();
    -(Complex64::i() * k * erf_complex(iksq) + (k * k * tau).exp() / (PI * tau).sqrt()) / (4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{UnitCell, WaveParams};

    #[test]
    fn image_derivative_matches_difference() {
        let k = Complex64::new(1.3, 0.2);
        let (tau, r, h) = (0.05, 0.37, 1e-5);
        let (_, fp) = image_f(k, r, tau);
        let fd = (image_f(k, r + h, tau).0 - image_f(k, r - h, tau).0) / (2.0 * h);
        assert!((fp - fd).norm() < 1e-8 * fp.norm());
    }

    #[test]
    fn zero_wavenumber_reduces_to_laplace_image() {
        let (f, _) = image_f(Complex64::new(0.0, 0.0), 0.4, 0.07);
        let expect = crate::special::erfc(0.4 / (2.0 * 0.07f64.sqrt())) / (4.0 * PI * 0.4);
        assert!((f.re - expect).abs() < 1e-15 && f.im.abs() < 1e-15);
    }

    #[test]
    fn regular_limit_is_continuous() {
        let k = Complex64::new(2.1, 0.0);
        let tau = 0.03;
        let r = 1e-4;
        let (f, _) = image_f(k, r, tau);
        let near = f - (k * r).cos() / (4.0 * PI * r);
        assert!((near - regular_limit(k, tau)).norm() < 1e-8);
    }

    #[test]
    fn helmholtz_regular_matches_difference() {
        let cell = UnitCell::new(&[1.0, 1.0, 1.0]).unwrap();
        let kf = KernelFamily::helmholtz(cell, WaveParams::real(1.0, [0.3, -0.1, 0.2])).unwrap();
        let x = [0.2, 0.1, -0.15];
        let r = norm(&x);
        let (g, _) = kf.helmholtz_value_grad(&x).unwrap();
        let (reg, _) = kf.helmholtz_regular(&x).unwrap();
        assert!((reg - (g + (r).cos() / (4.0 * PI * r))).norm() < 1e-12);
        // eta != 0 breaks evenness, so compare with the first-order expansion
        let (r0, g0) = kf.helmholtz_regular(&[0.0; 3]).unwrap();
        let (r1, _) = kf.helmholtz_regular(&[1e-5, 0.0, 0.0]).unwrap();
        assert!((r0 + g0[0] * 1e-5 - r1).norm() < 1e-9, "{r0} {r1}");
    }
}
