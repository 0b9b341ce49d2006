//! Pointwise layer kernels for the four families.

use crate::greens::{traction, HeatWindow, KernelFamily, KernelKind};
use crate::lattice::{dot, sub};
use crate::{Point, Result};
use num_complex::Complex64;

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Up to 3x3 complex block; scalar families use entry `[0][0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Blk(pub [[Complex64; 3]; 3]);

impl Blk {
    pub const ZERO: Blk = Blk([[CZERO; 3]; 3]);

    pub fn scalar(v: Complex64) -> Self {
        let mut b = Self::ZERO;
        b.0[0][0] = v;
        b
    }

    pub fn real(v: f64) -> Self {
        Self::scalar(Complex64::new(v, 0.0))
    }

    pub fn apply(&self, v: &[Complex64; 3], d: usize) -> [Complex64; 3] {
        let mut out = [CZERO; 3];
        for a in 0..d {
            for b in 0..d {
                out[a] += self.0[a][b] * v[b];
            }
        }
        out
    }
}

/// Which boundary integral the kernel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LayerKind {
    /// Single layer value.
    Single,
    /// Double layer value, with the leading minus of the definitions.
    Double,
    /// Normal derivative (traction for Lamé) of the single layer at the target.
    SingleNormal,
}

/// Kernel of one layer potential; heat kernels carry their time window.
pub(crate) struct LayerKernel<'a> {
    kf: &'a KernelFamily,
    kind: LayerKind,
    heat: Option<HeatWindow>,
}

impl<'a> LayerKernel<'a> {
    pub fn elliptic(kf: &'a KernelFamily, kind: LayerKind) -> Self {
        debug_assert!(kf.kind() != KernelKind::Heat);
        Self { kf, kind, heat: None }
    }

    /// Heat kernel integrated over source-to-target delays in `[a, b]`.
    pub fn heat(kf: &'a KernelFamily, kind: LayerKind, a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            kf,
            kind,
            heat: Some(HeatWindow::new(kf.cell(), a, b, 0)?),
        })
    }

    /// Kernel for target `x` (normal `nx`) and source `y` (normal `ny`).
    pub fn eval(&self, x: &Point, nx: &Point, y: &Point, ny: &Point) -> Result<Blk> {
        let z = sub(x, y);
        let kf = self.kf;
        match kf.kind() {
            KernelKind::Laplace => {
                let (v, g) = kf.laplace_value_grad(&z)?;
                Ok(Blk::real(match self.kind {
                    LayerKind::Single => v,
                    LayerKind::Double => -dot(ny, &g),
                    LayerKind::SingleNormal => dot(nx, &g),
                }))
            }
            KernelKind::Helmholtz => {
                let (v, g) = kf.helmholtz_value_grad(&z)?;
                let dn = |n: &Point| g[0] * n[0] + g[1] * n[1] + g[2] * n[2];
                Ok(Blk::scalar(match self.kind {
                    LayerKind::Single => v,
                    LayerKind::Double => -dn(ny),
                    LayerKind::SingleNormal => dn(nx),
                }))
            }
            KernelKind::Lame => {
                let d = kf.dim();
                let omega = kf.lame_params().expect("Lamé kernel").omega;
                let (gam, jac) = kf.lame_value_jacobian(&z)?;
                let mut out = Blk::ZERO;
                match self.kind {
                    LayerKind::Single => {
                        for a in 0..d {
                            for b in 0..d {
                                out.0[a][b] = Complex64::new(gam[a][b], 0.0);
                            }
                        }
                    }
                    LayerKind::Double | LayerKind::SingleNormal => {
                        let n = if self.kind == LayerKind::Double { ny } else { nx };
                        for l in 0..d {
                            // column l: J^l_{ac} = d_c Gamma_{al}
                            let mut jl = [[0.0; 3]; 3];
                            for a in 0..d {
                                for c in 0..d {
                                    jl[a][c] = jac[a][l][c];
                                }
                            }
                            let t = traction(omega, &jl, d);
                            for a in 0..d {
                                let tn: f64 = (0..d).map(|c| t[a][c] * n[c]).sum();
                                if self.kind == LayerKind::Double {
                                    // D_l = -sum_a mu_a [T(J^l) nu_y]_a
                                    out.0[l][a] = Complex64::new(-tn, 0.0);
                                } else {
                                    out.0[a][l] = Complex64::new(tn, 0.0);
                                }
                            }
                        }
                    }
                }
                Ok(out)
            }
            KernelKind::Heat => {
                let w = self.heat.as_ref().expect("heat kernels carry a time window");
                let (v, g) = w.eval(&z)?;
                Ok(Blk::real(match self.kind {
                    LayerKind::Single => v,
                    LayerKind::Double => -dot(ny, &g),
                    LayerKind::SingleNormal => dot(nx, &g),
                }))
            }
        }
    }
}

pub(crate) fn block_dim(kf: &KernelFamily) -> usize {
    if kf.kind() == KernelKind::Lame {
        kf.dim()
    } else {
        1
    }
}
