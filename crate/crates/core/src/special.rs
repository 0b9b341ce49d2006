//! Special functions used by the Ewald kernels.
//!
//! The real error functions come from `libm`; everything
//! else (exponential integral, the half-integer incomplete gamma ladder and the
//! complex error function) is implemented here.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const SQRT_PI: f64 = 1.772_453_850_905_516;
const FPMIN: f64 = 1e-300;

/// Real complementary error function.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Real error function.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Exponential integral `E1(x) = int_x^inf e^{-u}/u du` for `x > 0`.
pub fn exp_int_e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // Lentz continued fraction
        let mut b = x + 1.0;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// `Ein(x) = E1(x) + ln x + gamma`, entire and stable near zero.
pub fn ein(x: f64) -> f64 {
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..100 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        exp_int_e1(x) + x.ln() + EULER_GAMMA
    }
}

/// Upper incomplete gamma `Gamma(a, x)` by continued fraction; accurate for `x > 1.5`.
pub fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..2000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln()).exp() * h
}

/// Number of rungs in [`GammaLadder`].
pub const LADDER_LEN: usize = 6;

/// `Gamma(m + n/2 - 1, x)` for `m = -1, 0, ..., 4` in dimension `n` (2 or 3).
///
/// These are exactly the incomplete gamma values that appear when the heat
/// kernel `(2t)^{-m} (4 pi t)^{-n/2} e^{-r^2/4t}` is integrated in time.
#[derive(Debug, Clone, Copy)]
pub struct GammaLadder {
    values: [f64; LADDER_LEN],
}

impl GammaLadder {
    /// `with_negative` controls whether the `m = -1` rung is computed.
    pub fn new(dim: usize, x: f64, with_negative: bool) -> Self {
        let mut values = [0.0; LADDER_LEN];
        if x.is_infinite() {
            return Self { values };
        }
        debug_assert!(x > 0.0);
        let ex = (-x).exp();
        if dim == 3 {
            // s = -1/2, 1/2, 3/2, ...
            let g_half = SQRT_PI * erfc(x.sqrt());
            let g_mhalf = if !with_negative {
                f64::NAN
            } else if x > 1.5 {
                upper_gamma_cf(-0.5, x)
            } else {
                2.0 * (ex / x.sqrt() - g_half)
            };
            values[0] = g_mhalf;
            values[1] = g_half;
            let mut s = 0.5;
            for i in 2..LADDER_LEN {
                values[i] = s * values[i - 1] + x.powf(s) * ex;
                s += 1.0;
            }
        } else {
            // s = -1, 0, 1, 2, ...
            let e1 = exp_int_e1(x);
            values[0] = if !with_negative {
                f64::NAN
            } else if x > 1.5 {
                upper_gamma_cf(-1.0, x)
            } else {
                ex / x - e1
            };
            values[1] = e1;
            values[2] = ex;
            let mut s = 1.0;
            let mut xs = x;
            for i in 3..LADDER_LEN {
                values[i] = s * values[i - 1] + xs * ex;
                s += 1.0;
                xs *= x;
            }
        }
        Self { values }
    }

    /// `Gamma(m + n/2 - 1, x)`; `m` in `-1..=4`.
    #[inline]
    pub fn get(&self, m: i32) -> f64 {
        self.values[(m + 1) as usize]
    }
}

/// Time integral of the image heat kernel with weight `(2t)^{-m}`:
/// `A_m(r) = int_{t0}^{t1} (2t)^{-m} (4 pi t)^{-n/2} exp(-r^2/4t) dt`.
///
/// Radial derivatives follow `(1/r) d/dr A_m = -A_{m+1}`.
#[derive(Debug, Clone, Copy)]
pub struct TimeMoments {
    prefactor: f64,
    two_over_r2: f64,
    upper: GammaLadder,
    lower: Option<GammaLadder>,
}

impl TimeMoments {
    /// `t0 = 0` is allowed. The `m = -1` rung is available only when
    /// `with_negative` is set.
    pub fn new(dim: usize, r: f64, t0: f64, t1: f64, with_negative: bool) -> Self {
        let r2 = r * r;
        let a1 = r2 / (4.0 * t1);
        let prefactor = (PI * r2).powf(-(dim as f64) / 2.0) * r2 / 4.0;
        let lower = if t0 > 0.0 {
            Some(GammaLadder::new(dim, r2 / (4.0 * t0), with_negative))
        } else {
            None
        };
        Self {
            prefactor,
            two_over_r2: 2.0 / r2,
            upper: GammaLadder::new(dim, a1, with_negative),
            lower,
        }
    }

    #[inline]
    pub fn get(&self, m: i32) -> f64 {
        let g = self.upper.get(m) - self.lower.map_or(0.0, |l| l.get(m));
        self.two_over_r2.powi(m) * self.prefactor * g
    }
}

/// Legendre polynomials `P_0..=P_lmax` at `x`.
pub fn legendre_all(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; lmax + 1];
    p[0] = 1.0;
    if lmax >= 1 {
        p[1] = x;
    }
    for l in 2..=lmax {
        let lf = l as f64;
        p[l] = ((2.0 * lf - 1.0) * x * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
    }
    p
}

/// Real orthonormal spherical harmonics of degree `< lmax_excl` at the unit
/// vector `u`, indexed `l^2 + l + m`.
pub fn real_harmonics(lmax_excl: usize, u: &[f64; 3]) -> Vec<f64> {
    let n = lmax_excl;
    let mut out = vec![0.0; n * n];
    if n == 0 {
        return out;
    }
    let ct = u[2].clamp(-1.0, 1.0);
    let st = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let phi = u[1].atan2(u[0]);
    // fully normalised associated Legendre functions, column by column in m
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..n {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st;
        }
        let (sm, cm) = (m as f64 * phi).sin_cos();
        let mut store = |l: usize, p: f64| {
            if m == 0 {
                out[l * l + l] = p;
            } else {
                out[l * l + l + m] = 2f64.sqrt() * p * cm;
                out[l * l + l - m] = 2f64.sqrt() * p * sm;
            }
        };
        store(m, pmm);
        if m + 1 >= n {
            continue;
        }
        let mut p_prev = pmm;
        let mut p = (2.0 * m as f64 + 3.0).sqrt() * ct * pmm;
        store(m + 1, p);
        for l in m + 2..n {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            let next = a * (ct * p - b * p_prev);
            p_prev = p;
            p = next;
            store(l, p);
        }
    }
    out
}

const WEIDEMAN_N: usize = 48;

fn weideman_coeffs() -> &'static [f64; WEIDEMAN_N] {
    static COEFFS: OnceLock<[f64; WEIDEMAN_N]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        // f(k) for k = -M+1..M-1, even in k
        let f = |k: i64| -> f64 {
            let theta = k as f64 * PI / m as f64;
            let t = l * (theta / 2.0).tan();
            (-t * t).exp() * (l * l + t * t)
        };
        let mut a = [0.0; WEIDEMAN_N];
        for (idx, slot) in a.iter_mut().enumerate() {
            let mm = (idx + 1) as f64;
            let mut s = 0.0;
            for k in -(m as i64) + 1..(m as i64) {
                s += f(k) * (PI * k as f64 * mm / m as f64).cos();
            }
            *slot = s / (2 * m) as f64;
        }
        a
    })
}

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)` for `Im z >= 0`
/// (Weideman's rational approximation).
pub fn faddeeva_upper(z: Complex64) -> Complex64 {
    let a = weideman_coeffs();
    let l = (WEIDEMAN_N as f64 / 2f64.sqrt()).sqrt();
    let iz = Complex64::i() * z;
    let denom = Complex64::new(l, 0.0) - iz;
    let zz = (Complex64::new(l, 0.0) + iz) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for c in a.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (denom * denom) + (1.0 / SQRT_PI) / denom
}

/// Complex complementary error function.
pub fn erfc_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(erfc(z.re), 0.0);
    }
    if z.re >= 0.0 {
        (-z * z).exp() * faddeeva_upper(Complex64::i() * z)
    } else {
        Complex64::new(2.0, 0.0) - erfc_complex(-z)
    }
}

/// Complex error function.
pub fn erf_complex(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // Taylor series avoids the cancellation in 1 - erfc(z) near the origin
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        for n in 1..60 {
            term *= -z2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        return sum * (2.0 / SQRT_PI);
    }
    Complex64::new(1.0, 0.0) - erfc_complex(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harmonics_satisfy_addition_theorem() {
        let u = [0.3, -0.5, 0.2f64];
        let v = [-0.7, 0.1, 0.6f64];
        let unit = |a: [f64; 3]| {
            let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
            a.map(|c| c / r)
        };
        let (u, v) = (unit(u), unit(v));
        let l = 9;
        let (yu, yv) = (real_harmonics(l, &u), real_harmonics(l, &v));
        let p = legendre_all(l - 1, u[0] * v[0] + u[1] * v[1] + u[2] * v[2]);
        for deg in 0..l {
            let lhs: f64 = (deg * deg..(deg + 1) * (deg + 1)).map(|i| yu[i] * yv[i]).sum();
            let rhs = (2 * deg + 1) as f64 / (4.0 * PI) * p[deg];
            assert!((lhs - rhs).abs() < 1e-13, "degree {deg}: {lhs} vs {rhs}");
        }
        // pole: only m = 0 survives
        let y = real_harmonics(4, &[0.0, 0.0, 1.0]);
        assert!((y[2] - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-14);
        assert_eq!(y[1], 0.0);
    }

    #[test]
    fn e1_reference_values() {
        // mpmath.e1
        assert_relative_eq!(exp_int_e1(0.1), 1.822_923_958_419_390_6, max_relative = 1e-14);
        assert_relative_eq!(exp_int_e1(1.0), 0.219_383_934_395_520_27, max_relative = 1e-14);
        assert_relative_eq!(exp_int_e1(5.0), 0.001_148_295_591_275_325_8, max_relative = 1e-13);
        assert_relative_eq!(exp_int_e1(30.0), 3.021_552_010_688_812_5e-15, max_relative = 1e-13);
    }

    #[test]
    fn gamma_ladder_matches_reference() {
        // mpmath.gammainc(s, x) (upper)
        let g3 = GammaLadder::new(3, 2.5, true);
        assert_relative_eq!(g3.get(-1), 0.013_976_317_753_307_056, max_relative = 1e-13);
        assert_relative_eq!(g3.get(0), 0.044_926_952_600_007_936, max_relative = 1e-13);
        assert_relative_eq!(g3.get(2), 0.552_846_329_216_620_6, max_relative = 1e-13);
        let g2 = GammaLadder::new(2, 0.3, true);
        assert_relative_eq!(g2.get(-1), 1.563_717_417_263_212_9, max_relative = 1e-13);
        assert_relative_eq!(g2.get(3), 1.992_801_013_633_821, max_relative = 1e-13);
        let far = GammaLadder::new(3, 40.0, true);
        assert_relative_eq!(far.get(-1), 1.619_961_003_984_691_5e-20, max_relative = 1e-12);
    }

    #[test]
    fn complex_erfc_reference_values() {
        // mpmath.erfc / mpmath.erf
        let v = erf_complex(Complex64::new(1.0, 1.0));
        assert_relative_eq!(v.re, 1.316_151_281_697_947_7, max_relative = 1e-13);
        assert_relative_eq!(v.im, 0.190_453_469_237_834_7, max_relative = 1e-13);
        let v = erfc_complex(Complex64::new(3.0, 0.4));
        assert_relative_eq!(v.re, -2.094_748_569_781_028e-5, max_relative = 1e-12);
        assert_relative_eq!(v.im, -1.497_241_111_649_378e-5, max_relative = 1e-12);
        let v = erfc_complex(Complex64::new(0.05, -0.3));
        assert_relative_eq!(v.re, 0.938_328_477_105_619_7, max_relative = 1e-13);
        assert_relative_eq!(v.im, 0.348_024_582_004_021_4, max_relative = 1e-13);
    }

    #[test]
    fn legendre_low_orders() {
        let p = legendre_all(3, 0.3);
        assert_relative_eq!(p[2], 0.5 * (3.0 * 0.09 - 1.0), epsilon = 1e-15);
        assert_relative_eq!(p[3], 0.5 * (5.0 * 0.027 - 0.9), epsilon = 1e-15);
    }
}
