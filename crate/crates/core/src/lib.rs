//! Periodic and quasi-periodic fundamental solutions, layer potentials and
//! boundary integral solvers for the Laplace, Helmholtz, Lamé and heat
//! operators on a lattice of holes `qZ^n + Omega`.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: the periodicity cell, lattice enumeration, resonant modes.
//! * [`greens`]: Ewald-accelerated evaluation of the four periodic kernels.
//! * [`geometry`]: discretised boundaries (curves, spheres) and perturbations.
//! * [`potentials`]: layer potentials, Nyström operators and jump diagnostics.
//! * [`solvers`]: exterior Dirichlet solvers built on those operators.
//! * [`experiments`]: the small-hole asymptotic sweep and the heat shape sweep.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod greens;
pub mod lattice;
pub mod linalg;
pub mod potentials;
pub mod quadrature;
pub mod solvers;
pub mod special;

pub use error::{Error, Result};
pub use geometry::{BoundaryGeometry, CurveShape, DiffeoPerturbation, FieldBasis, HoleSpec, Shape};
pub use greens::{EwaldParams, HeatRepresentation, KernelFamily, KernelKind, LameParams};
pub use lattice::{LatticeSpace, ResonantSet, UnitCell, WaveParams};
pub use num_complex::Complex64;
pub use potentials::{BoundaryOperator, Density};
pub use solvers::SolveResult;

/// Points are stored in three slots; two-dimensional problems leave the last one at zero.
pub type Point = [f64; 3];
