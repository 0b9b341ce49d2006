//! Exterior Dirichlet solvers on the perforated domain.
//!
//! * Helmholtz: single layer `u = S[theta]`, first-kind equation `S theta = g`.
//! * Laplace: `u = D[mu] + c` with `(-I/2 + K) mu + c = f` and `int mu = 0`.
//! * Heat: `u = D^h[theta]`, `theta/2 + K^h theta = f`, marched step by step.
//!
//! The wave number is assumed to avoid the interior Dirichlet spectrum of the
//! hole; this is not checked, but a collision shows up in the reported
//! condition estimate.

use crate::geometry::{BoundaryGeometry, GeometryKind};
use crate::greens::{KernelFamily, KernelKind};
use crate::linalg::Factored;
use crate::potentials::{assemble, assemble_heat, double_layer_eval, single_layer_eval, OperatorKind, OperatorMatrix};
use crate::special::real_harmonics;
use crate::{Density, Error, Point, Result, UnitCell};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    SingleLayer,
    DoubleLayerConstant,
    HeatDoubleLayer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Largest accepted relative residual of the linear system.
    pub tolerance: f64,
    /// Systems with a larger 1-norm condition estimate are refused.
    pub max_condition: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub density: Density,
    /// Additive constant of the Laplace representation; zero otherwise.
    pub constant: f64,
    /// Relative residual of the linear system (the largest over time steps for heat).
    pub residual: f64,
    /// 1-norm condition estimate of the (diagonal block of the) system matrix.
    pub condition: f64,
    pub representation: Representation,
    /// Set when the residual exceeds the configured tolerance.
    pub failed: bool,
}

fn check_data_len(g: &BoundaryGeometry, len: usize) -> Result<()> {
    if len != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: len,
        });
    }
    Ok(())
}

pub fn solve_helmholtz_dirichlet_exterior(
    kf: &KernelFamily,
    g: &BoundaryGeometry,
    dirichlet: &[Complex64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    if kf.kind() != KernelKind::Helmholtz {
        return Err(Error::InvalidParams("Helmholtz solver needs a Helmholtz kernel".into()));
    }
    if !kf.resonant_set().is_empty() {
        return Err(Error::Resonant {
            count: kf.resonant_set().len(),
        });
    }
    check_data_len(g, dirichlet.len())?;
    let op = assemble(kf, g, OperatorKind::SingleLayer)?;
    let OperatorMatrix::Complex(s) = op.matrix else { unreachable!() };
    let (theta, residual, condition) = solve_first_kind(g, s, dirichlet, opts)?;
    Ok(SolveResult {
        density: Density::Complex(theta),
        constant: 0.0,
        residual,
        condition,
        representation: Representation::SingleLayer,
        failed: residual > opts.tolerance,
    })
}

/// Real spherical harmonics of degree `< L` at the nodes of a sphere, one column each.
pub(crate) fn harmonic_basis(g: &BoundaryGeometry) -> DMatrix<f64> {
    let l = g.order();
    let rows: Vec<Vec<f64>> = g.normals().iter().map(|u| real_harmonics(l, u)).collect();
    DMatrix::from_fn(g.len(), l * l, |i, j| rows[i][j])
}

/// Solves `S theta = g`. On spheres the node grid carries more values than the
/// `L^2` harmonics the quadrature resolves, so the equation is posed for the
/// harmonic coefficients of `theta` and tested against the same harmonics.
pub(crate) fn solve_first_kind(
    g: &BoundaryGeometry,
    s: DMatrix<Complex64>,
    rhs: &[Complex64],
    opts: &SolveOptions,
) -> Result<(Vec<Complex64>, f64, f64)> {
    if g.kind() == GeometryKind::Curve2d {
        let f = Factored::new(s, opts.max_condition)?;
        let (x, r) = f.solve(rhs);
        return Ok((x, r, f.condition()));
    }
    let (_, rho) = g.sphere_center_radius().expect("sphere");
    let y = harmonic_basis(g).map(|v| Complex64::new(v, 0.0));
    let w = DVector::from_iterator(g.len(), g.weights().iter().map(|&v| Complex64::new(v / (rho * rho), 0.0)));
    let project = y.transpose() * DMatrix::from_diagonal(&w);
    let reduced = &project * s * &y;
    let b = &project * DVector::from_column_slice(rhs);
    let f = Factored::new(reduced, opts.max_condition)?;
    let (c, r) = f.solve(b.as_slice());
    let theta = y * DVector::from_vec(c);
    Ok((theta.as_slice().to_vec(), r, f.condition()))
}

pub fn solve_laplace_dirichlet_exterior(
    cell: &UnitCell,
    g: &BoundaryGeometry,
    dirichlet: &[f64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    check_data_len(g, dirichlet.len())?;
    g.check_inside(cell)?;
    let kf = KernelFamily::laplace(cell.clone());
    let op = assemble(&kf, g, OperatorKind::DoubleLayer)?;
    let OperatorMatrix::Real(k) = op.matrix else { unreachable!() };
    let n = g.len();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(&k);
    for i in 0..n {
        a[(i, i)] -= 0.5;
        a[(i, n)] = 1.0;
        a[(n, i)] = g.weights()[i];
    }
    let mut rhs = dirichlet.to_vec();
    rhs.push(0.0);
    let f = Factored::new(a, opts.max_condition)?;
    let (x, residual) = f.solve(&rhs);
    Ok(SolveResult {
        density: Density::Real(x[..n].to_vec()),
        constant: x[n],
        residual,
        condition: f.condition(),
        representation: Representation::DoubleLayerConstant,
        failed: residual > opts.tolerance,
    })
}

/// `dirichlet[m]` holds the boundary data at `t_m = m T / M`, `m = 0..=M`; `dirichlet[0]` must vanish.
pub fn solve_heat_dirichlet_exterior(
    cell: &UnitCell,
    g: &BoundaryGeometry,
    horizon: f64,
    steps: usize,
    dirichlet: &[Vec<f64>],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    if dirichlet.len() != steps + 1 {
        return Err(Error::DimensionMismatch {
            expected: steps + 1,
            got: dirichlet.len(),
        });
    }
    for level in dirichlet {
        check_data_len(g, level.len())?;
    }
    if dirichlet[0].iter().any(|&v| v != 0.0) {
        return Err(Error::InvalidParams("heat boundary data must vanish at t = 0".into()));
    }
    g.check_inside(cell)?;
    let kf = KernelFamily::heat(cell.clone());
    let op = assemble_heat(&kf, g, OperatorKind::DoubleLayer, horizon, steps)?;
    let OperatorMatrix::Causal(blocks) = op.matrix else { unreachable!() };
    let n = g.len();
    let diag = &blocks[0] + DMatrix::identity(n, n) * 0.5;
    let f = Factored::new(diag, opts.max_condition)?;
    let mut theta: Vec<DVector<f64>> = vec![DVector::zeros(n)];
    let mut residual: f64 = 0.0;
    for m in 1..=steps {
        let mut rhs = DVector::from_column_slice(&dirichlet[m]);
        for (j, th) in theta.iter().enumerate().skip(1) {
            rhs -= &blocks[m - j] * th;
        }
        let (x, r) = f.solve(rhs.as_slice());
        residual = residual.max(r);
        theta.push(DVector::from_vec(x));
    }
    let values = theta.into_iter().map(|v| v.as_slice().to_vec()).collect();
    Ok(SolveResult {
        density: Density::heat(horizon, values)?,
        constant: 0.0,
        residual,
        condition: f.condition(),
        representation: Representation::HeatDoubleLayer,
        failed: residual > opts.tolerance,
    })
}

/// Value of the solution at an exterior point (and time `t` for heat).
pub fn evaluate_solution(
    kf: &KernelFamily,
    g: &BoundaryGeometry,
    solution: &SolveResult,
    x: &Point,
    t: Option<f64>,
) -> Result<Complex64> {
    let ev = match solution.representation {
        Representation::SingleLayer => single_layer_eval(kf, g, &solution.density, x, t)?,
        Representation::DoubleLayerConstant | Representation::HeatDoubleLayer => {
            double_layer_eval(kf, g, &solution.density, x, t)?
        }
    };
    Ok(ev.scalar() + solution.constant)
}
