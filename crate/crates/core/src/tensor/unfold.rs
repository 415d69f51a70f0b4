//! Matricization, its inverse, and general mode combination. All of these
//! are pure permutations of the entries.

use nalgebra::DMatrix;

use super::{linear_index, strides, DenseTensor, ModePartition, Odometer};
use crate::error::{shape, Error, Result};

/// Per-mode multipliers so that `row = sum_n i_n * row_mult[n]` (0-based).
fn position_multipliers(dims: &[usize], modes: &[usize]) -> Vec<usize> {
    let sub_dims: Vec<usize> = modes.iter().map(|&m| dims[m - 1]).collect();
    let sub_strides = strides(&sub_dims);
    let mut mult = vec![0; dims.len()];
    for (k, &m) in modes.iter().enumerate() {
        mult[m - 1] = sub_strides[k];
    }
    mult
}

/// `X_{S1;S2}`: rows indexed by the modes of `s1`, columns by the modes of
/// `s2`, each combined with the last listed mode varying fastest.
pub fn matricize<T: nalgebra::Scalar>(x: &DenseTensor<T>, p: &ModePartition) -> Result<DMatrix<T>> {
    p.validate_matrix(x.order())?;
    let dims = x.dims();
    let (rows, cols) = p.shape(dims);
    let row_mult = position_multipliers(dims, &p.s1);
    let col_mult = position_multipliers(dims, &p.s2);

    let mut out: Vec<T> = Vec::with_capacity(rows * cols);
    // column-major buffer; every slot is written exactly once below
    out.resize(rows * cols, x.data()[0].clone());
    let mut odo = Odometer::new(dims);
    let mut flat = 0;
    while let Some(idx) = odo.get() {
        let mut r = 0;
        let mut c = 0;
        for (n, &i) in idx.iter().enumerate() {
            r += i * row_mult[n];
            c += i * col_mult[n];
        }
        out[r + c * rows] = x.data()[flat].clone();
        flat += 1;
        odo.advance();
    }
    Ok(DMatrix::from_vec(rows, cols, out))
}

fn check_unfolding_shape<T: nalgebra::Scalar>(
    m: &DMatrix<T>,
    p: &ModePartition,
    dims: &[usize],
) -> Result<()> {
    p.validate_matrix(dims.len())?;
    let expected = p.shape(dims);
    if m.shape() != expected {
        return Err(shape(format!(
            "unfolding is {}x{}, partition {:?}/{:?} of dims {:?} needs {}x{}",
            m.nrows(),
            m.ncols(),
            p.s1,
            p.s2,
            dims,
            expected.0,
            expected.1
        )));
    }
    Ok(())
}

/// Reads `x_{i1..iN}` (1-based) straight from its unfolding.
pub fn element_from_unfolding<T: nalgebra::Scalar>(
    m: &DMatrix<T>,
    p: &ModePartition,
    dims: &[usize],
    idx: &[usize],
) -> Result<T> {
    check_unfolding_shape(m, p, dims)?;
    linear_index(dims, idx)?;
    let sub = |modes: &[usize]| -> Result<usize> {
        let sub_dims: Vec<usize> = modes.iter().map(|&k| dims[k - 1]).collect();
        let sub_idx: Vec<usize> = modes.iter().map(|&k| idx[k - 1]).collect();
        linear_index(&sub_dims, &sub_idx)
    };
    let r = sub(&p.s1)?;
    let c = sub(&p.s2)?;
    Ok(m[(r - 1, c - 1)].clone())
}

/// Inverse of [`matricize`]: rebuilds the tensor of shape `dims`.
pub fn refold<T: nalgebra::Scalar>(
    m: &DMatrix<T>,
    p: &ModePartition,
    dims: &[usize],
) -> Result<DenseTensor<T>> {
    check_unfolding_shape(m, p, dims)?;
    let rows = m.nrows();
    let row_mult = position_multipliers(dims, &p.s1);
    let col_mult = position_multipliers(dims, &p.s2);
    let src = m.as_slice();
    let mut data = Vec::with_capacity(src.len());
    let mut odo = Odometer::new(dims);
    while let Some(idx) = odo.get() {
        let mut r = 0;
        let mut c = 0;
        for (n, &i) in idx.iter().enumerate() {
            r += i * row_mult[n];
            c += i * col_mult[n];
        }
        data.push(src[r + c * rows].clone());
        odo.advance();
    }
    DenseTensor::new(dims.to_vec(), data)
}

/// Combines the modes of each group into a single mode of dimension
/// `prod_{n in group} I_n` (last listed mode fastest). The result has one
/// mode per group, in group order.
pub fn contract_modes<T: Clone>(x: &DenseTensor<T>, groups: &[Vec<usize>]) -> Result<DenseTensor<T>> {
    let order = x.order();
    let mut seen = vec![false; order];
    for g in groups {
        if g.is_empty() {
            return Err(Error::Partition("empty mode group".into()));
        }
        for &m in g {
            if m == 0 || m > order {
                return Err(Error::Partition(format!("mode {m} outside 1..={order}")));
            }
            if seen[m - 1] {
                return Err(Error::Partition(format!("mode {m} appears in two groups")));
            }
            seen[m - 1] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Partition(format!("mode {} not covered by any group", missing + 1)));
    }

    let dims = x.dims();
    let new_dims: Vec<usize> = groups.iter().map(|g| g.iter().map(|&m| dims[m - 1]).product()).collect();
    // destination offset = sum_n i_n * mult[n]
    let new_strides = strides(&new_dims);
    let mut mult = vec![0; order];
    for (k, g) in groups.iter().enumerate() {
        let inner = position_multipliers(dims, g);
        for &m in g {
            mult[m - 1] = inner[m - 1] * new_strides[k];
        }
    }
    let mut out: Vec<Option<T>> = vec![None; x.len()];
    let mut odo = Odometer::new(dims);
    let mut flat = 0;
    while let Some(idx) = odo.get() {
        let dest: usize = idx.iter().zip(&mult).map(|(i, m)| i * m).sum();
        out[dest] = Some(x.data()[flat].clone());
        flat += 1;
        odo.advance();
    }
    let data = out.into_iter().map(|v| v.expect("mode combination is a bijection")).collect();
    DenseTensor::new(new_dims, data)
}
