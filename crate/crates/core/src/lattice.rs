//! Periodicity cell, lattice enumeration and the Helmholtz resonant set.

use crate::{Error, Point, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Integer lattice vector; the third entry is zero in two dimensions.
pub type LatticeVec = [i64; 3];

/// Diagonal periodicity cell `Q = prod ]0, q_jj[`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCell {
    diag: [f64; 3],
    dim: usize,
    volume: f64,
}

impl UnitCell {
    pub fn new(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(bad) = diag.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::InvalidCell(format!(
                "period entries must be positive and finite, got {bad}"
            )));
        }
        let mut d = [1.0; 3];
        d[..dim].copy_from_slice(diag);
        Ok(Self {
            diag: d,
            dim,
            volume: diag.iter().product(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diagonal entries `q_11..q_nn`.
    pub fn diag(&self) -> &[f64] {
        &self.diag[..self.dim]
    }

    /// `|Q|_n`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn min_period(&self) -> f64 {
        self.diag().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `|Q|^{1/n}`.
    pub fn length_scale(&self) -> f64 {
        self.volume.powf(1.0 / self.dim as f64)
    }

    pub fn center(&self) -> Point {
        let mut c = [0.0; 3];
        for j in 0..self.dim {
            c[j] = 0.5 * self.diag[j];
        }
        c
    }

    /// `qz`.
    pub fn direct_vector(&self, z: &LatticeVec) -> Point {
        let mut v = [0.0; 3];
        for j in 0..self.dim {
            v[j] = self.diag[j] * z[j] as f64;
        }
        v
    }

    /// `2 pi q^{-1} z + eta`.
    pub fn reciprocal_vector(&self, z: &LatticeVec, eta: &Point) -> Point {
        let mut v = [0.0; 3];
        for j in 0..self.dim {
            v[j] = 2.0 * PI * z[j] as f64 / self.diag[j] + eta[j];
        }
        v
    }

    /// All `z` with `|qz| <= radius` (direct) or `|2 pi q^{-1} z| <= radius`
    /// (reciprocal), ordered by norm and then lexicographically.
    pub fn enumerate(&self, radius: f64, space: LatticeSpace) -> Vec<LatticeVec> {
        let scale: Vec<f64> = self
            .diag()
            .iter()
            .map(|q| match space {
                LatticeSpace::Direct => *q,
                LatticeSpace::Reciprocal => 2.0 * PI / q,
            })
            .collect();
        let bound: Vec<i64> = scale.iter().map(|s| (radius / s).floor() as i64).collect();
        let r2 = radius * radius;
        let mut out: Vec<(f64, LatticeVec)> = Vec::new();
        let b2 = if self.dim == 3 { bound[2] } else { 0 };
        for a in -bound[0]..=bound[0] {
            for b in -bound[1]..=bound[1] {
                for c in -b2..=b2 {
                    let z = [a, b, c];
                    let n2: f64 = (0..self.dim)
                        .map(|j| (scale[j] * z[j] as f64).powi(2))
                        .sum();
                    if n2 <= r2 {
                        out.push((n2, z));
                    }
                }
            }
        }
        out.sort_by(|x, y| match x.0.partial_cmp(&y.0) {
            Some(Ordering::Equal) | None => x.1.cmp(&y.1),
            Some(o) => o,
        });
        out.into_iter().map(|(_, z)| z).collect()
    }

    /// Distance from `x` to the nearest point of `q Z^n`.
    pub fn distance_to_lattice(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for j in 0..self.dim {
            let q = self.diag[j];
            let r = x[j] - q * (x[j] / q).round();
            s += r * r;
        }
        s.sqrt()
    }

    /// Whether `x` lies in the open cell `Q`.
    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim).all(|j| x[j] > 0.0 && x[j] < self.diag[j])
    }

    /// Wavenumber parameters with a resonance check against this cell.
    pub fn resonant_set(&self, wave: &WaveParams, tol: Option<f64>) -> ResonantSet {
        let k2 = wave.k * wave.k;
        let tol = tol.unwrap_or_else(|| 1e-10 * k2.norm().max(1.0));
        if k2.im.abs() > tol {
            return ResonantSet {
                members: Vec::new(),
                nonreal_warning: true,
            };
        }
        let eta_norm = norm(&wave.eta);
        let radius = (k2.re + tol).max(0.0).sqrt() + eta_norm;
        let members = self
            .enumerate(radius + 1e-12, LatticeSpace::Reciprocal)
            .into_iter()
            .filter(|z| {
                let kappa = self.reciprocal_vector(z, &wave.eta);
                (k2 - dot(&kappa, &kappa)).norm() <= tol
            })
            .collect();
        ResonantSet {
            members,
            nonreal_warning: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeSpace {
    Direct,
    Reciprocal,
}

/// Wave number `k` and quasi-periodicity vector `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub k: Complex64,
    pub eta: Point,
}

impl WaveParams {
    pub fn new(k: Complex64, eta: Point) -> Self {
        Self { k, eta }
    }

    pub fn real(k: f64, eta: Point) -> Self {
        Self {
            k: Complex64::new(k, 0.0),
            eta,
        }
    }
}

/// The finite set `Z` of lattice modes where `k^2 = |2 pi q^{-1} z + eta|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonantSet {
    pub members: Vec<LatticeVec>,
    /// Set when `k^2` is not real, so no mode can resonate.
    pub nonreal_warning: bool,
}

impl ResonantSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, z: &LatticeVec) -> bool {
        self.members.contains(z)
    }
}

#[inline]
pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cell_volume() {
        assert_eq!(UnitCell::new(&[1.0, 1.0, 1.0]).unwrap().volume(), 1.0);
        assert_eq!(UnitCell::new(&[1.0, 2.0]).unwrap().volume(), 2.0);
        assert!(matches!(
            UnitCell::new(&[1.0, 0.0, 1.0]),
            Err(Error::InvalidCell(_))
        ));
        assert!(matches!(
            UnitCell::new(&[1.0]),
            Err(Error::UnsupportedDimension(1))
        ));
    }

    #[test]
    fn reciprocal_vectors() {
        let c = UnitCell::new(&[1.0, 2.0]).unwrap();
        let v = c.reciprocal_vector(&[1, 1, 0], &[0.0; 3]);
        assert!((v[0] - 2.0 * PI).abs() < 1e-15 && (v[1] - PI).abs() < 1e-15);
        let v = c.reciprocal_vector(&[0, 0, 0], &[0.3, 0.0, 0.0]);
        assert_eq!(&v[..2], &[0.3, 0.0]);
        let cube = UnitCell::new(&[1.0; 3]).unwrap();
        let v = cube.reciprocal_vector(&[0, 0, 1], &[0.0; 3]);
        assert_eq!(v, [0.0, 0.0, 2.0 * PI]);
    }

    #[test]
    fn enumeration_examples() {
        let cube = UnitCell::new(&[1.0; 3]).unwrap();
        let e = cube.enumerate(1.0, LatticeSpace::Direct);
        assert_eq!(e.len(), 7);
        assert_eq!(e[0], [0, 0, 0]);
        assert_eq!(cube.enumerate(0.5, LatticeSpace::Direct), vec![[0, 0, 0]]);
        let rect = UnitCell::new(&[1.0, 2.0]).unwrap();
        assert_eq!(
            rect.enumerate(1.0, LatticeSpace::Direct),
            vec![[0, 0, 0], [-1, 0, 0], [1, 0, 0]]
        );
    }

    #[test]
    fn resonant_examples() {
        let cube = UnitCell::new(&[1.0; 3]).unwrap();
        let z = cube.resonant_set(&WaveParams::real(2.0 * PI, [0.0; 3]), Some(1e-12));
        assert_eq!(z.len(), 6);
        assert!(z.contains(&[0, 0, 1]) && z.contains(&[-1, 0, 0]));
        assert!(cube
            .resonant_set(&WaveParams::real(1.0, [0.0; 3]), None)
            .is_empty());
        let z = cube.resonant_set(&WaveParams::real(PI, [PI, 0.0, 0.0]), None);
        assert_eq!(z.members, vec![[0, 0, 0], [-1, 0, 0]]);
    }

    #[test]
    fn resonant_brute_force() {
        // brute-force over |z| <= 2 for eta = (pi,0,0), k = pi
        let cube = UnitCell::new(&[1.0; 3]).unwrap();
        let mut brute = Vec::new();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    let kap = [2.0 * PI * a as f64 + PI, 2.0 * PI * b as f64, 2.0 * PI * c as f64];
                    if (PI * PI - dot(&kap, &kap)).abs() <= 1e-10 * PI * PI {
                        brute.push([a, b, c]);
                    }
                }
            }
        }
        let mut got = cube
            .resonant_set(&WaveParams::real(PI, [PI, 0.0, 0.0]), None)
            .members;
        got.sort();
        brute.sort();
        assert_eq!(got, brute);
        assert_eq!(brute, vec![[-1, 0, 0], [0, 0, 0]]);
    }

    #[test]
    fn complex_k_warns() {
        let cube = UnitCell::new(&[1.0; 3]).unwrap();
        let z = cube.resonant_set(&WaveParams::new(Complex64::new(1.0, 0.5), [0.0; 3]), None);
        assert!(z.is_empty() && z.nonreal_warning);
    }

    proptest! {
        #[test]
        fn enumeration_is_symmetric(q1 in 0.5f64..2.0, q2 in 0.5f64..2.0, r in 0.1f64..5.0) {
            let c = UnitCell::new(&[q1, q2]).unwrap();
            for space in [LatticeSpace::Direct, LatticeSpace::Reciprocal] {
                let e = c.enumerate(r * if space == LatticeSpace::Reciprocal { 6.0 } else { 1.0 }, space);
                for z in &e {
                    prop_assert!(e.contains(&[-z[0], -z[1], -z[2]]));
                }
            }
        }

        #[test]
        fn resonance_shift_and_sign(w0 in -2i64..=2, w1 in -2i64..=2, w2 in -2i64..=2, zc in 0usize..7) {
            let cube = UnitCell::new(&[1.0, 1.5, 0.8]).unwrap();
            let eta = [0.4, -0.2, 0.1];
            let candidates = cube.enumerate(8.0, LatticeSpace::Reciprocal);
            let z0 = candidates[zc];
            let kap = cube.reciprocal_vector(&z0, &eta);
            let k = dot(&kap, &kap).sqrt();
            let base = cube.resonant_set(&WaveParams::real(k, eta), None);
            prop_assert!(base.contains(&z0));
            let neg = cube.resonant_set(&WaveParams::real(-k, eta), None);
            prop_assert_eq!(&base.members, &neg.members);
            let w = [w0, w1, w2];
            let shift = cube.reciprocal_vector(&w, &[0.0; 3]);
            let shifted = cube.resonant_set(&WaveParams::real(k, add(&eta, &shift)), None);
            let mut expect: Vec<LatticeVec> = base
                .members
                .iter()
                .map(|z| [z[0] - w0, z[1] - w1, z[2] - w2])
                .collect();
            let mut got = shifted.members.clone();
            expect.sort();
            got.sort();
            prop_assert_eq!(got, expect);
        }
    }
}
