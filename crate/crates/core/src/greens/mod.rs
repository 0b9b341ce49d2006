//! Periodic and quasi-periodic fundamental solutions.
//!
//! Laplace, Helmholtz and Lamé kernels are evaluated by Ewald splitting of the
//! heat-kernel time integral at `tau = a^2 / 4`: a screened image sum in real
//! space plus a Gaussian-filtered spectral sum. The heat kernel itself has a
//! spatial image form and a spectral form.

mod heat;
mod helmholtz;
mod lame;
mod laplace;

pub use heat::{
    heat_crossover, heat_green, heat_green_grad, heat_green_time_integrated, heat_time_moment,
    HeatRepresentation, HeatSum, HeatWindow,
};

use crate::lattice::{dot, norm, LatticeSpace, LatticeVec, ResonantSet, UnitCell, WaveParams};
use crate::{Error, Point, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Exponent at which Gaussian tails are cut (`e^{-46} ~ 1e-20`).
pub const EWALD_CUTOFF: f64 = 46.0;

/// Ewald splitting length and truncation radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwaldParams {
    /// Splitting length `a`; the split time is `a^2 / 4`.
    pub split: f64,
    pub real_radius: f64,
    pub spectral_radius: f64,
    /// Evaluation fails with [`Error::Accuracy`] when the truncation bound exceeds this.
    pub tolerance: f64,
}

impl EwaldParams {
    /// Radii that cut both tails at [`EWALD_CUTOFF`] for the given split.
    pub fn from_split(split: f64, k2_re: f64) -> Self {
        let tau = split * split / 4.0;
        let boost = k2_re.max(0.0);
        Self {
            split,
            real_radius: 2.0 * (tau * (EWALD_CUTOFF + boost * tau)).sqrt(),
            spectral_radius: (EWALD_CUTOFF / tau + boost).sqrt(),
            tolerance: 1e-10,
        }
    }

    pub fn default_for(cell: &UnitCell, kind: KernelKind, wave: Option<&WaveParams>) -> Self {
        let base = cell.length_scale() / PI.sqrt();
        match kind {
            KernelKind::Helmholtz => {
                let k2 = wave.map_or(0.0, |w| (w.k * w.k).re);
                Self::from_split(0.5 * base, k2)
            }
            _ => Self::from_split(base, 0.0),
        }
    }

    pub fn tau(&self) -> f64 {
        self.split * self.split / 4.0
    }
}

/// Lamé constant `omega`, admissible when `omega > 1 - 2/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LameParams {
    pub omega: f64,
}

impl LameParams {
    pub fn new(omega: f64, dim: usize) -> Result<Self> {
        let bound = 1.0 - 2.0 / dim as f64;
        if !(omega.is_finite() && omega > bound) {
            return Err(Error::InvalidParams(format!(
                "omega must exceed 1 - 2/n = {bound}, got {omega}"
            )));
        }
        Ok(Self { omega })
    }

    /// `omega / (omega + 1)`.
    pub fn beta(&self) -> f64 {
        self.omega / (self.omega + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    Laplace,
    Helmholtz,
    Lame,
    Heat,
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Laplace => "laplace",
            KernelKind::Helmholtz => "helmholtz",
            KernelKind::Lame => "lame",
            KernelKind::Heat => "heat",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SpectralTerm {
    pub z: LatticeVec,
    /// `2 pi q^{-1} z + eta`.
    pub xi: Point,
    /// Laplace: `e^{-|xi|^2 tau}/|xi|^2`. Helmholtz: `e^{-(|kappa|^2-k^2) tau}/(|kappa|^2-k^2)`.
    pub c: Complex64,
    /// Lamé biharmonic weight `e^{-|xi|^2 tau}(tau/|xi|^2 + 1/|xi|^4)`.
    pub c2: f64,
}

/// A kernel family bound to a cell, with precomputed lattice tables.
#[derive(Debug, Clone)]
pub struct KernelFamily {
    kind: KernelKind,
    cell: UnitCell,
    wave: Option<WaveParams>,
    lame: Option<LameParams>,
    ewald: EwaldParams,
    resonant: ResonantSet,
    pub(crate) images: Vec<LatticeVec>,
    pub(crate) spectral: Vec<SpectralTerm>,
    pub(crate) resonant_xi: Vec<Point>,
    pub(crate) phase_max: [i64; 3],
    truncation_bound: f64,
}

impl KernelFamily {
    pub fn laplace(cell: UnitCell) -> Self {
        let ewald = EwaldParams::default_for(&cell, KernelKind::Laplace, None);
        Self::build(KernelKind::Laplace, cell, None, None, ewald)
    }

    /// Quasi-periodic Helmholtz kernel; three dimensions only.
    pub fn helmholtz(cell: UnitCell, wave: WaveParams) -> Result<Self> {
        if cell.dim() != 3 {
            return Err(Error::Unsupported(
                "the Helmholtz kernel is implemented for n = 3 only".into(),
            ));
        }
        if !(wave.k.re.is_finite() && wave.k.im.is_finite()) {
            return Err(Error::InvalidParams("wave number must be finite".into()));
        }
        let ewald = EwaldParams::default_for(&cell, KernelKind::Helmholtz, Some(&wave));
        Ok(Self::build(KernelKind::Helmholtz, cell, Some(wave), None, ewald))
    }

    pub fn lame(cell: UnitCell, lame: LameParams) -> Result<Self> {
        LameParams::new(lame.omega, cell.dim())?;
        let ewald = EwaldParams::default_for(&cell, KernelKind::Lame, None);
        Ok(Self::build(KernelKind::Lame, cell, None, Some(lame), ewald))
    }

    pub fn heat(cell: UnitCell) -> Self {
        let ewald = EwaldParams::default_for(&cell, KernelKind::Heat, None);
        Self::build(KernelKind::Heat, cell, None, None, ewald)
    }

    /// Rebuild the lattice tables with explicit Ewald parameters.
    pub fn with_ewald(self, ewald: EwaldParams) -> Result<Self> {
        if !(ewald.split > 0.0 && ewald.real_radius > 0.0 && ewald.spectral_radius > 0.0) {
            return Err(Error::InvalidParams(
                "Ewald split and radii must be positive".into(),
            ));
        }
        Ok(Self::build(self.kind, self.cell, self.wave, self.lame, ewald))
    }

    /// Rebuild with the default split scaled by `factor` and matching radii.
    pub fn with_split_factor(self, factor: f64) -> Result<Self> {
        let base = EwaldParams::default_for(&self.cell, self.kind, self.wave.as_ref());
        let k2 = self.wave.map_or(0.0, |w| (w.k * w.k).re);
        let mut e = EwaldParams::from_split(base.split * factor, k2);
        e.tolerance = self.ewald.tolerance;
        self.with_ewald(e)
    }

    fn build(
        kind: KernelKind,
        cell: UnitCell,
        wave: Option<WaveParams>,
        lame: Option<LameParams>,
        ewald: EwaldParams,
    ) -> Self {
        let half_diag = 0.5 * cell.diag().iter().map(|q| q * q).sum::<f64>().sqrt();
        let tau = ewald.tau();
        let resonant = match &wave {
            Some(w) => cell.resonant_set(w, None),
            None => ResonantSet {
                members: Vec::new(),
                nonreal_warning: false,
            },
        };
        let mut images = Vec::new();
        let mut spectral = Vec::new();
        let mut resonant_xi = Vec::new();
        let mut phase_max = [0i64; 3];
        if kind != KernelKind::Heat {
            images = cell.enumerate(ewald.real_radius + half_diag, LatticeSpace::Direct);
            let eta = wave.map_or([0.0; 3], |w| w.eta);
            let eta_norm = norm(&eta);
            let zs = cell.enumerate(ewald.spectral_radius + eta_norm, LatticeSpace::Reciprocal);
            let k2 = wave.map_or(Complex64::new(0.0, 0.0), |w| w.k * w.k);
            for z in zs {
                let xi = cell.reciprocal_vector(&z, &eta);
                let x2 = dot(&xi, &xi);
                if x2.sqrt() > ewald.spectral_radius {
                    continue;
                }
                match kind {
                    KernelKind::Helmholtz => {
                        if resonant.contains(&z) {
                            resonant_xi.push(xi);
                            continue;
                        }
                        let d = Complex64::new(x2, 0.0) - k2;
                        spectral.push(SpectralTerm {
                            z,
                            xi,
                            c: (-d * tau).exp() / d,
                            c2: 0.0,
                        });
                    }
                    _ => {
                        // half set: the partner -z is folded in by symmetry
                        if z <= [0, 0, 0] {
                            continue;
                        }
                        let g = (-x2 * tau).exp();
                        spectral.push(SpectralTerm {
                            z,
                            xi,
                            c: Complex64::new(g / x2, 0.0),
                            c2: g * (tau / x2 + 1.0 / (x2 * x2)),
                        });
                    }
                }
                for j in 0..cell.dim() {
                    phase_max[j] = phase_max[j].max(z[j].abs());
                }
            }
        }
        let k2_re = wave.map_or(0.0, |w| (w.k * w.k).re);
        let r = ewald.real_radius;
        let rho = ewald.spectral_radius;
        let real_tail = (-(r * r) / (4.0 * tau) + k2_re * tau).exp();
        let spec_tail = (-(rho * rho - k2_re) * tau).exp();
        let truncation_bound = real_tail.max(spec_tail);
        Self {
            kind,
            cell,
            wave,
            lame,
            ewald,
            resonant,
            images,
            spectral,
            resonant_xi,
            phase_max,
            truncation_bound,
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn cell(&self) -> &UnitCell {
        &self.cell
    }

    pub fn dim(&self) -> usize {
        self.cell.dim()
    }

    pub fn wave(&self) -> Option<&WaveParams> {
        self.wave.as_ref()
    }

    pub fn lame_params(&self) -> Option<&LameParams> {
        self.lame.as_ref()
    }

    pub fn ewald(&self) -> &EwaldParams {
        &self.ewald
    }

    pub fn resonant_set(&self) -> &ResonantSet {
        &self.resonant
    }

    /// Rough bound on the relative size of the neglected tails.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    pub(crate) fn tau(&self) -> f64 {
        self.ewald.tau()
    }

    pub(crate) fn check_accuracy(&self) -> Result<()> {
        if self.truncation_bound > self.ewald.tolerance {
            return Err(Error::Accuracy {
                achieved: self.truncation_bound,
            });
        }
        Ok(())
    }

    /// Reduce `x` to the cell centred at the origin: `x = x_red + q w`.
    pub(crate) fn reduce(&self, x: &Point) -> (Point, LatticeVec) {
        reduce(&self.cell, x)
    }

    pub(crate) fn guard(&self, x: &Point) -> Result<()> {
        guard(&self.cell, x)
    }

    pub(crate) fn phases(&self, x: &Point) -> PhaseTable {
        PhaseTable::new(&self.cell, x, self.phase_max)
    }
}

pub(crate) fn reduce(cell: &UnitCell, x: &Point) -> (Point, LatticeVec) {
    let mut xr = [0.0; 3];
    let mut w = [0i64; 3];
    for j in 0..cell.dim() {
        let q = cell.diag()[j];
        let m = (x[j] / q).round();
        w[j] = m as i64;
        xr[j] = x[j] - q * m;
    }
    (xr, w)
}

pub(crate) fn guard(cell: &UnitCell, x: &Point) -> Result<()> {
    let d = cell.distance_to_lattice(x);
    if d <= 1e-12 * cell.min_period() {
        return Err(Error::SingularPoint { distance: d });
    }
    Ok(())
}

/// `e^{i 2 pi m x_j / q_j}` for `|m| <= max_j`, per axis.
pub(crate) struct PhaseTable {
    max: [i64; 3],
    tables: [Vec<Complex64>; 3],
}

impl PhaseTable {
    pub fn new(cell: &UnitCell, x: &Point, max: [i64; 3]) -> Self {
        let mut tables: [Vec<Complex64>; 3] = Default::default();
        for j in 0..3 {
            let m = max[j];
            let q = if j < cell.dim() { cell.diag()[j] } else { 1.0 };
            let xj = if j < cell.dim() { x[j] } else { 0.0 };
            tables[j] = (-m..=m)
                .map(|i| {
                    let (s, c) = (2.0 * PI * i as f64 * xj / q).sin_cos();
                    Complex64::new(c, s)
                })
                .collect();
        }
        Self { max, tables }
    }

    #[inline]
    pub fn phase(&self, z: &LatticeVec) -> Complex64 {
        self.tables[0][(z[0] + self.max[0]) as usize]
            * self.tables[1][(z[1] + self.max[1]) as usize]
            * self.tables[2][(z[2] + self.max[2]) as usize]
    }
}

/// Lamé traction `T(omega, A) = (omega - 1) tr(A) I + A + A^T` on the leading `dim` block.
pub fn traction(omega: f64, a: &[[f64; 3]; 3], dim: usize) -> [[f64; 3]; 3] {
    let tr: f64 = (0..dim).map(|i| a[i][i]).sum();
    let mut t = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            t[i][j] = a[i][j] + a[j][i];
        }
        t[i][i] += (omega - 1.0) * tr;
    }
    t
}
