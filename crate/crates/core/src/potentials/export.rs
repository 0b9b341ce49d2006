//! Binary export of assembled operators.
//!
//! Layout, all little endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `PLPM` |
//! | 4 | format version (1) |
//! | 1 | family: 0 Laplace, 1 Helmholtz, 2 Lamé, 3 heat |
//! | 1 | operator: 0 `K`, 1 `K*`, 2 `S` |
//! | 1 | dtype: 0 `f64`, 1 complex `f64` pairs (re, im) |
//! | 1 | reserved (0) |
//! | 4 | unknowns per node |
//! | 8 | rows `N` (nodes times unknowns per node) |
//! | 8 | time steps `M` (1 for stationary operators) |
//! | 8 | geometry fingerprint |
//!
//! The payload follows as `M` row-major `N x N` matrices. Heat operators store
//! the Toeplitz blocks `B_0 .. B_{M-1}`.

use super::{BoundaryOperator, OperatorKind, OperatorMatrix};
use crate::greens::KernelKind;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"PLPM";
const VERSION: u32 = 1;

fn family_code(k: KernelKind) -> u8 {
    match k {
        KernelKind::Laplace => 0,
        KernelKind::Helmholtz => 1,
        KernelKind::Lame => 2,
        KernelKind::Heat => 3,
    }
}

fn operator_code(o: OperatorKind) -> u8 {
    match o {
        OperatorKind::DoubleLayer => 0,
        OperatorKind::SingleNormal => 1,
        OperatorKind::SingleLayer => 2,
    }
}

pub fn write_operator(op: &BoundaryOperator, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let rows = op.nodes * op.block_dim;
    let dtype = u8::from(matches!(op.matrix, OperatorMatrix::Complex(_)));
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[family_code(op.family), operator_code(op.operator), dtype, 0])?;
    w.write_all(&(op.block_dim as u32).to_le_bytes())?;
    w.write_all(&(rows as u64).to_le_bytes())?;
    w.write_all(&(op.steps() as u64).to_le_bytes())?;
    w.write_all(&op.fingerprint.to_le_bytes())?;
    let mut put_real = |m: &DMatrix<f64>| -> std::io::Result<()> {
        for i in 0..rows {
            for j in 0..rows {
                w.write_all(&m[(i, j)].to_le_bytes())?;
            }
        }
        Ok(())
    };
    match &op.matrix {
        OperatorMatrix::Real(m) => put_real(m)?,
        OperatorMatrix::Causal(blocks) => {
            for b in blocks {
                put_real(b)?;
            }
        }
        OperatorMatrix::Complex(m) => {
            for i in 0..rows {
                for j in 0..rows {
                    w.write_all(&m[(i, j)].re.to_le_bytes())?;
                    w.write_all(&m[(i, j)].im.to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn bad(msg: &str) -> Error {
    Error::Parse(format!("operator file: {msg}"))
}

fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b).map_err(|_| bad("truncated"))?;
    Ok(b)
}

fn take_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(take::<8>(r)?))
}

pub fn read_operator(path: &Path) -> Result<BoundaryOperator> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    if &take::<4>(&mut r)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let [fam, opc, dtype, _] = take::<4>(&mut r)?;
    let family = match fam {
        0 => KernelKind::Laplace,
        1 => KernelKind::Helmholtz,
        2 => KernelKind::Lame,
        3 => KernelKind::Heat,
        _ => return Err(bad("unknown family")),
    };
    let operator = match opc {
        0 => OperatorKind::DoubleLayer,
        1 => OperatorKind::SingleNormal,
        2 => OperatorKind::SingleLayer,
        _ => return Err(bad("unknown operator")),
    };
    let block_dim = u32::from_le_bytes(take(&mut r)?) as usize;
    let rows = u64::from_le_bytes(take(&mut r)?) as usize;
    let steps = u64::from_le_bytes(take(&mut r)?) as usize;
    let fingerprint = u64::from_le_bytes(take(&mut r)?);
    if block_dim == 0 || rows % block_dim != 0 || steps == 0 {
        return Err(bad("inconsistent header"));
    }
    let real_block = |r: &mut BufReader<std::fs::File>| -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(rows, rows);
        for i in 0..rows {
            for j in 0..rows {
                m[(i, j)] = take_f64(r)?;
            }
        }
        Ok(m)
    };
    let matrix = match (dtype, family) {
        (0, KernelKind::Heat) => OperatorMatrix::Causal((0..steps).map(|_| real_block(&mut r)).collect::<Result<_>>()?),
        (0, _) if steps == 1 => OperatorMatrix::Real(real_block(&mut r)?),
        (1, KernelKind::Helmholtz) if steps == 1 => {
            let mut m = DMatrix::from_element(rows, rows, Complex64::new(0.0, 0.0));
            for i in 0..rows {
                for j in 0..rows {
                    let re = take_f64(&mut r)?;
                    m[(i, j)] = Complex64::new(re, take_f64(&mut r)?);
                }
            }
            OperatorMatrix::Complex(m)
        }
        _ => return Err(bad("dtype does not fit the family")),
    };
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(bad("trailing bytes"));
    }
    Ok(BoundaryOperator {
        family,
        operator,
        block_dim,
        nodes: rows / block_dim,
        matrix,
        fingerprint,
    })
}
