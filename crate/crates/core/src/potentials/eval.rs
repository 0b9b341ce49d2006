//! Off-boundary evaluation of layer potentials with the boundary quadrature.

use super::kernel::{block_dim, Blk, LayerKernel, LayerKind};
use super::Density;
use crate::geometry::BoundaryGeometry;
use crate::greens::{KernelFamily, KernelKind};
use crate::lattice::sub;
use crate::{Error, Point, Result};
use num_complex::Complex64;

/// Potential value at one point. Scalar families fill `value[0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: [Complex64; 3],
    pub components: usize,
    /// Set when the point is within one mesh width of the boundary, where
    /// the plain quadrature loses accuracy.
    pub near_boundary: bool,
}

impl Evaluation {
    pub fn scalar(&self) -> Complex64 {
        self.value[0]
    }
}

pub fn single_layer_eval(
    kf: &KernelFamily,
    g: &BoundaryGeometry,
    mu: &Density,
    x: &Point,
    t: Option<f64>,
) -> Result<Evaluation> {
    layer_eval(kf, g, mu, LayerKind::Single, x, &[0.0; 3], t)
}

pub fn double_layer_eval(
    kf: &KernelFamily,
    g: &BoundaryGeometry,
    mu: &Density,
    x: &Point,
    t: Option<f64>,
) -> Result<Evaluation> {
    layer_eval(kf, g, mu, LayerKind::Double, x, &[0.0; 3], t)
}

pub(crate) fn check_compatible(kf: &KernelFamily, g: &BoundaryGeometry) -> Result<()> {
    if kf.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: kf.dim(),
            got: g.dim(),
        });
    }
    if kf.kind() == KernelKind::Heat && g.dim() != 2 {
        return Err(Error::Unsupported("heat layer potentials are implemented on planar curves".into()));
    }
    Ok(())
}

fn check_density(kf: &KernelFamily, g: &BoundaryGeometry, mu: &Density) -> Result<()> {
    if mu.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: mu.len(),
        });
    }
    let ok = matches!(
        (kf.kind(), mu),
        (KernelKind::Laplace, Density::Real(_))
            | (KernelKind::Helmholtz, Density::Complex(_) | Density::Real(_))
            | (KernelKind::Heat, Density::Heat { .. })
    ) || matches!((kf.kind(), mu), (KernelKind::Lame, Density::Vector { dim, .. }) if *dim == kf.dim());
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "density type does not fit the {} family",
            kf.kind().name()
        )))
    }
}

/// Source windows `(step, delay_lo, delay_hi)` of a piecewise-constant heat density at time `t`.
pub(crate) fn heat_windows(horizon: f64, steps: usize, t: f64) -> Vec<(usize, f64, f64)> {
    let dt = horizon / steps as f64;
    (1..=steps)
        .filter_map(|m| {
            let t0 = (m - 1) as f64 * dt;
            let t1 = m as f64 * dt;
            (t > t0).then(|| (m, (t - t1).max(0.0), t - t0))
        })
        .collect()
}

pub(crate) fn layer_eval(
    kf: &KernelFamily,
    g: &BoundaryGeometry,
    mu: &Density,
    kind: LayerKind,
    x: &Point,
    nx: &Point,
    t: Option<f64>,
) -> Result<Evaluation> {
    check_compatible(kf, g)?;
    check_density(kf, g, mu)?;
    let d = block_dim(kf);
    let cell = kf.cell();
    let near = g
        .nodes()
        .iter()
        .any(|y| cell.distance_to_lattice(&sub(x, y)) < g.mesh_width());
    if near {
        log::warn!("evaluation point {x:?} is within one mesh width of the boundary");
    }
    let mut value = [Complex64::new(0.0, 0.0); 3];
    let mut accumulate = |k: &LayerKernel, step: usize| -> Result<()> {
        for (i, (y, ny)) in g.nodes().iter().zip(g.normals()).enumerate() {
            let b: Blk = k.eval(x, nx, y, ny)?;
            let v = b.apply(&mu.node(i, step), d);
            for c in 0..d {
                value[c] += g.weights()[i] * v[c];
            }
        }
        Ok(())
    };
    if kf.kind() == KernelKind::Heat {
        let Density::Heat { horizon, .. } = mu else { unreachable!() };
        let t = t.ok_or_else(|| Error::InvalidParams("heat potentials need an evaluation time".into()))?;
        if !(t > 0.0 && t <= *horizon * (1.0 + 1e-12)) {
            return Err(Error::InvalidParams(format!("time {t} outside (0, {horizon}]")));
        }
        for (m, lo, hi) in heat_windows(*horizon, mu.steps(), t) {
            accumulate(&LayerKernel::heat(kf, kind, lo, hi)?, m)?;
        }
    } else {
        accumulate(&LayerKernel::elliptic(kf, kind), 0)?;
    }
    Ok(Evaluation {
        value,
        components: d,
        near_boundary: near,
    })
}
