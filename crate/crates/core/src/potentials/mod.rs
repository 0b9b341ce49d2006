//! Periodic layer potentials, their Nyström boundary operators and numerical
//! verification of the jump relations.
//!
//! Sign conventions: the double layer carries a leading minus,
//! `D[mu](x) = -int nu_y . grad G(x - y) mu(y)`, for all four families. "Interior"
//! is the hole side of the boundary, "exterior" the perforated domain.

mod assembly;
mod eval;
mod export;
mod jump;
pub(crate) mod kernel;

pub use assembly::{assemble, assemble_heat};
pub(crate) use assembly::legendre_w;
pub use eval::{double_layer_eval, single_layer_eval, Evaluation};
pub use export::{read_operator, write_operator};
pub use jump::{jump_check, JumpIdentity, JumpOptions, JumpReport, JumpRow, Side};

use crate::greens::KernelKind;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Boundary density. Vector densities store `dim` components per node in
/// three slots. Heat densities are piecewise constant in time on `M` uniform
/// steps of `[0, T]`; `values[m]` holds the value on `(t_{m-1}, t_m]` and
/// `values[0]` is the initial level, which must vanish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Density {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    Vector { dim: usize, values: Vec<[f64; 3]> },
    Heat { horizon: f64, values: Vec<Vec<f64>> },
}

impl Density {
    pub fn heat(horizon: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParams(format!("horizon must be positive, got {horizon}")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidParams("heat density needs at least one time step".into()));
        }
        let n = values[0].len();
        if values.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidParams("heat density levels differ in length".into()));
        }
        if values[0].iter().any(|&v| v != 0.0) {
            return Err(Error::InvalidParams("heat density must vanish at t = 0".into()));
        }
        Ok(Density::Heat { horizon, values })
    }

    /// Number of boundary nodes covered.
    pub fn len(&self) -> usize {
        match self {
            Density::Real(v) => v.len(),
            Density::Complex(v) => v.len(),
            Density::Vector { values, .. } => values.len(),
            Density::Heat { values, .. } => values[0].len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Components per node.
    pub fn components(&self) -> usize {
        match self {
            Density::Vector { dim, .. } => *dim,
            _ => 1,
        }
    }

    /// Time steps `M` (1 for stationary densities).
    pub fn steps(&self) -> usize {
        match self {
            Density::Heat { values, .. } => values.len() - 1,
            _ => 1,
        }
    }

    /// Node value as three complex slots; `step` selects the heat level.
    pub(crate) fn node(&self, i: usize, step: usize) -> [Complex64; 3] {
        let z = Complex64::new(0.0, 0.0);
        match self {
            Density::Real(v) => [Complex64::new(v[i], 0.0), z, z],
            Density::Complex(v) => [v[i], z, z],
            Density::Vector { values, .. } => values[i].map(|c| Complex64::new(c, 0.0)),
            Density::Heat { values, .. } => [Complex64::new(values[step][i], 0.0), z, z],
        }
    }

    /// Flattened stationary values, node-major with `components()` entries per node.
    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        let d = self.components();
        let mut out = Vec::with_capacity(self.len() * d);
        for i in 0..self.len() {
            let v = self.node(i, self.steps());
            out.extend_from_slice(&v[..d]);
        }
        out
    }
}

/// Which boundary operator a matrix discretises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// Boundary value `K` of the double layer (principal part).
    DoubleLayer,
    /// Principal part `K*` of the single layer normal derivative or traction.
    SingleNormal,
    /// Single layer restricted to the boundary.
    SingleLayer,
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::DoubleLayer => "K",
            OperatorKind::SingleNormal => "K*",
            OperatorKind::SingleLayer => "S",
        }
    }
}

/// Dense operator storage. Heat operators are causal and time invariant,
/// so only the Toeplitz blocks `B_k` coupling step `m` to step `m - k` are kept.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
    Causal(Vec<DMatrix<f64>>),
}

#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    pub family: KernelKind,
    pub operator: OperatorKind,
    /// Unknowns per node (the dimension for Lamé, 1 otherwise).
    pub block_dim: usize,
    pub nodes: usize,
    pub matrix: OperatorMatrix,
    pub fingerprint: u64,
}

impl BoundaryOperator {
    /// Time steps covered (1 for stationary operators).
    pub fn steps(&self) -> usize {
        match &self.matrix {
            OperatorMatrix::Causal(b) => b.len(),
            _ => 1,
        }
    }

    /// Block `(i, j)` of the heat operator in step indices `1..=M`; zero above the diagonal.
    pub fn causal_block(&self, i: usize, j: usize) -> Option<DMatrix<f64>> {
        match &self.matrix {
            OperatorMatrix::Causal(b) if i >= 1 && j >= 1 && i <= b.len() && j <= b.len() => Some(if j > i {
                DMatrix::zeros(self.nodes, self.nodes)
            } else {
                b[i - j].clone()
            }),
            _ => None,
        }
    }

    /// Applies the operator; for heat operators at every time level.
    pub fn apply(&self, mu: &Density) -> Result<Density> {
        if mu.len() != self.nodes || mu.components() != self.block_dim {
            return Err(Error::DimensionMismatch {
                expected: self.nodes * self.block_dim,
                got: mu.len() * mu.components(),
            });
        }
        match (&self.matrix, mu) {
            (OperatorMatrix::Real(a), Density::Real(v)) => Ok(Density::Real((a * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec())),
            (OperatorMatrix::Real(a), Density::Vector { dim, values }) => {
                let d = *dim;
                let flat: Vec<f64> = values.iter().flat_map(|v| v[..d].to_vec()).collect();
                let r = a * nalgebra::DVector::from_vec(flat);
                let values = (0..self.nodes)
                    .map(|i| {
                        let mut v = [0.0; 3];
                        v[..d].copy_from_slice(&r.as_slice()[i * d..(i + 1) * d]);
                        v
                    })
                    .collect();
                Ok(Density::Vector { dim: d, values })
            }
            (OperatorMatrix::Complex(a), Density::Complex(v)) => Ok(Density::Complex(
                (a * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec(),
            )),
            (OperatorMatrix::Causal(b), Density::Heat { horizon, values }) => {
                if values.len() - 1 != b.len() {
                    return Err(Error::DimensionMismatch {
                        expected: b.len(),
                        got: values.len() - 1,
                    });
                }
                let m = b.len();
                let cols: Vec<nalgebra::DVector<f64>> =
                    values.iter().map(|v| nalgebra::DVector::from_column_slice(v)).collect();
                let mut out = vec![vec![0.0; self.nodes]; m + 1];
                for (i, row) in out.iter_mut().enumerate().skip(1) {
                    let mut acc = nalgebra::DVector::zeros(self.nodes);
                    for j in 1..=i {
                        acc += &b[i - j] * &cols[j];
                    }
                    row.copy_from_slice(acc.as_slice());
                }
                Density::heat(*horizon, out)
            }
            _ => Err(Error::InvalidParams(format!(
                "density type does not match the {} operator",
                self.family.name()
            ))),
        }
    }
}
