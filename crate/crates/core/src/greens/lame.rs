//! Periodic Lamé kernel `Gamma_{jk} = delta_jk S - beta d_j d_k H`,
//! where `H` is the zero-mean `|xi|^{-4}` lattice sum and `beta = omega/(omega+1)`.

use super::{KernelFamily, KernelKind};
use crate::lattice::{add, norm};
use crate::special::TimeMoments;
use crate::{Error, Point, Result};

pub type Mat3 = [[f64; 3]; 3];
/// `jac[a][b][c] = d_c Gamma_ab`.
pub type Tensor3 = [[[f64; 3]; 3]; 3];

impl KernelFamily {
    pub fn lame_green(&self, x: &Point) -> Result<Mat3> {
        self.lame_value_jacobian(x).map(|v| v.0)
    }

    pub fn lame_green_jacobian(&self, x: &Point) -> Result<Tensor3> {
        self.lame_value_jacobian(x).map(|v| v.1)
    }

    pub fn lame_value_jacobian(&self, x: &Point) -> Result<(Mat3, Tensor3)> {
        if self.kind() != KernelKind::Lame {
            return Err(Error::InvalidParams(format!(
                "Lamé evaluation requested from a {} kernel",
                self.kind().name()
            )));
        }
        self.check_accuracy()?;
        self.guard(x)?;
        let beta = self.lame_params().expect("Lamé kernel carries omega").beta();
        let dim = self.dim();
        let (s, ds) = self.laplace_eval(x, false);
        let (h2, h3) = self.biharmonic_derivatives(x);
        let mut gam = [[0.0; 3]; 3];
        let mut jac = [[[0.0; 3]; 3]; 3];
        for a in 0..dim {
            for b in 0..dim {
                gam[a][b] = -beta * h2[a][b];
                for c in 0..dim {
                    jac[a][b][c] = -beta * h3[a][b][c];
                }
            }
            gam[a][a] += s;
            for c in 0..dim {
                jac[a][a][c] += ds[c];
            }
        }
        Ok((gam, jac))
    }

    /// Hessian and third derivatives of `H = (1/|Q|) sum_{xi != 0} e^{i xi x} / |xi|^4`.
    fn biharmonic_derivatives(&self, x: &Point) -> (Mat3, Tensor3) {
        let dim = self.dim();
        let tau = self.tau();
        let vol = self.cell().volume();
        let radius = self.ewald().real_radius;
        let (xr, _) = self.reduce(x);
        let mut h2 = [[0.0; 3]; 3];
        let mut h3 = [[[0.0; 3]; 3]; 3];
        for z in &self.images {
            let y = add(&xr, &self.cell().direct_vector(z));
            let r = norm(&y);
            if r > radius {
                continue;
            }
            // J = A_{-1}/2 with (1/r) dA_m/dr = -A_{m+1}
            let m = TimeMoments::new(dim, r, 0.0, tau, false);
            let f1 = -0.5 * m.get(0);
            let f2 = 0.5 * m.get(1);
            let f3 = -0.5 * m.get(2);
            for i in 0..dim {
                h2[i][i] += f1;
                for j in 0..dim {
                    h2[i][j] += f2 * y[i] * y[j];
                    for k in 0..dim {
                        let mut t = f3 * y[i] * y[j] * y[k];
                        if i == j {
                            t += f2 * y[k];
                        }
                        if i == k {
                            t += f2 * y[j];
                        }
                        if j == k {
                            t += f2 * y[i];
                        }
                        h3[i][j][k] += t;
                    }
                }
            }
        }
        let ph = self.phases(&xr);
        for t in &self.spectral {
            let e = ph.phase(&t.z);
            let c = 2.0 * t.c2 / vol;
            for i in 0..dim {
                for j in 0..dim {
                    let xij = t.xi[i] * t.xi[j];
                    h2[i][j] -= c * xij * e.re;
                    for k in 0..dim {
                        h3[i][j][k] += c * xij * t.xi[k] * e.im;
                    }
                }
            }
        }
        (h2, h3)
    }
}

#[cfg(test)]
mod tests {
    use crate::{KernelFamily, LameParams, UnitCell};

    #[test]
    fn symmetric_and_even() {
        let cell = UnitCell::new(&[1.0, 1.2, 0.9]).unwrap();
        let kf = KernelFamily::lame(cell, LameParams::new(1.5, 3).unwrap()).unwrap();
        let x = [0.31, -0.22, 0.13];
        let g = kf.lame_green(&x).unwrap();
        let gm = kf.lame_green(&[-x[0], -x[1], -x[2]]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert!((g[a][b] - g[b][a]).abs() < 1e-14);
                assert!((g[a][b] - gm[a][b]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn omega_to_zero_is_scalar_laplace() {
        // in 2D the admissible range is omega > 0, so approach the limit
        let cell = UnitCell::new(&[1.0, 2.0]).unwrap();
        let kf = KernelFamily::lame(cell.clone(), LameParams::new(1e-13, 2).unwrap()).unwrap();
        let s = KernelFamily::laplace(cell).laplace_green(&[0.3, 0.4, 0.0]).unwrap();
        let g = kf.lame_green(&[0.3, 0.4, 0.0]).unwrap();
        assert!((g[0][0] - s).abs() < 1e-12 && (g[1][1] - s).abs() < 1e-12);
        assert!(g[0][1].abs() < 1e-12);
    }

    #[test]
    fn jacobian_matches_difference() {
        let cell = UnitCell::new(&[1.0, 1.0]).unwrap();
        let kf = KernelFamily::lame(cell, LameParams::new(0.7, 2).unwrap()).unwrap();
        let x = [0.23, -0.31, 0.0];
        let jac = kf.lame_green_jacobian(&x).unwrap();
        let h = 1e-5;
        for c in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            let gp = kf.lame_green(&xp).unwrap();
            let gm = kf.lame_green(&xm).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    let fd = (gp[a][b] - gm[a][b]) / (2.0 * h);
                    assert!((fd - jac[a][b][c]).abs() < 1e-7, "{a}{b}{c}");
                }
            }
        }
    }
}
