//! Dense LU solves with 1-norm condition numbers, and small least-squares fits.

use crate::{Error, Result};
use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

/// LU factors of a square matrix together with `||A||_1 ||A^{-1}||_1`.
#[derive(Debug, Clone)]
pub struct Factored<T: ComplexField<RealField = f64>> {
    matrix: DMatrix<T>,
    lu: nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

fn norm1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl<T: ComplexField<RealField = f64>> Factored<T> {
    /// Fails when the matrix is singular or its condition number exceeds `max_condition`.
    pub fn new(matrix: DMatrix<T>, max_condition: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let lu = matrix.clone().lu();
        let inv = lu.try_inverse().ok_or(Error::SolveFailed {
            reason: "matrix is singular".into(),
            condition: f64::INFINITY,
        })?;
        let condition = norm1(&matrix) * norm1(&inv);
        if !condition.is_finite() || condition > max_condition {
            return Err(Error::SolveFailed {
                reason: "matrix is numerically singular".into(),
                condition,
            });
        }
        Ok(Self { matrix, lu, condition })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Solution and relative residual `||Ax - b|| / ||b||` (0 for `b = 0`).
    pub fn solve(&self, b: &[T]) -> (Vec<T>, f64) {
        let rhs = DVector::from_column_slice(b);
        let x = self.lu.solve(&rhs).expect("factorisation checked at construction");
        let bn = rhs.norm();
        let r = if bn > 0.0 { (&self.matrix * &x - &rhs).norm() / bn } else { 0.0 };
        (x.as_slice().to_vec(), r)
    }
}

/// Least-squares polynomial `sum_j c_j x^j` of the given degree.
pub fn polyfit(xs: &[f64], ys: &[Complex64], degree: usize) -> Result<Vec<Complex64>> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < degree + 1 {
        return Err(Error::InvalidParams(format!(
            "degree {degree} fit needs at least {} samples, got {}",
            degree + 1,
            xs.len()
        )));
    }
    let v = DMatrix::from_fn(xs.len(), degree + 1, |i, j| Complex64::new(xs[i].powi(j as i32), 0.0));
    let y = DVector::from_column_slice(ys);
    let svd = v.svd(true, true);
    let c = svd.solve(&y, 1e-14).map_err(|e| Error::SolveFailed {
        reason: e.to_string(),
        condition: f64::INFINITY,
    })?;
    Ok(c.as_slice().to_vec())
}
