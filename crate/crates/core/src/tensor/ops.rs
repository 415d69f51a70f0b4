use nalgebra::{DMatrix, DVector};

use super::partition::cyclic_after;
use super::{matricize, DenseTensor, ModePartition, Odometer};
use crate::error::{shape, Error, Result};
use crate::linalg::numerical_rank;
use crate::scalar::Scalar;

pub(crate) fn check_mode(n: usize, order: usize) -> Result<()> {
    if n == 0 || n > order {
        Err(shape(format!("mode {n} outside 1..={order}")))
    } else {
        Ok(())
    }
}

/// Fixes the modes in `fixed` (pairs of 1-based mode and index).
///
/// With one fixed mode `n` the remaining modes come out in cyclic order
/// `n+1, .., N, 1, .., n-1`, so fixing mode 3 of a 3-way tensor yields the
/// `I x J` frontal slice and fixing mode 2 the `K x I` lateral slice. With
/// several fixed modes the remaining ones keep ascending order.
pub fn slice<T: Clone>(x: &DenseTensor<T>, fixed: &[(usize, usize)]) -> Result<DenseTensor<T>> {
    let order = x.order();
    if fixed.is_empty() {
        return Ok(x.clone());
    }
    if fixed.len() >= order {
        return Err(Error::Precondition(format!(
            "slicing fixes {} of {} modes; use DenseTensor::get for a single entry",
            fixed.len(),
            order
        )));
    }
    let mut base = vec![usize::MAX; order];
    for &(m, i) in fixed {
        check_mode(m, order)?;
        if base[m - 1] != usize::MAX {
            return Err(shape(format!("mode {m} fixed twice")));
        }
        if i == 0 || i > x.dim(m) {
            return Err(Error::Bounds { mode: m, index: i, dim: x.dim(m) });
        }
        base[m - 1] = i - 1;
    }
    let free: Vec<usize> = if fixed.len() == 1 {
        cyclic_after(fixed[0].0, order)
    } else {
        (1..=order).filter(|&m| base[m - 1] == usize::MAX).collect()
    };
    let dims: Vec<usize> = free.iter().map(|&m| x.dim(m)).collect();
    let mut full = base;
    DenseTensor::from_fn(&dims, |idx| {
        for (&m, &i) in free.iter().zip(idx) {
            full[m - 1] = i - 1;
        }
        x.get0(&full).clone()
    })
}

/// `Y = X x_n A`: replaces `I_n` by `rows(A)`, so that `Y_n = A X_n`.
pub fn mode_n_product<T: Scalar>(x: &DenseTensor<T>, a: &DMatrix<T>, n: usize) -> Result<DenseTensor<T>> {
    check_mode(n, x.order())?;
    let i_n = x.dim(n);
    if a.ncols() != i_n {
        return Err(shape(format!(
            "mode-{n} product: matrix has {} columns, mode {n} has dimension {i_n}",
            a.ncols()
        )));
    }
    let dims = x.dims();
    let pre: usize = dims[..n - 1].iter().product();
    let post: usize = dims[n..].iter().product();
    let j_n = a.nrows();
    let src = x.data();
    let mut out = vec![T::zero(); pre * j_n * post];
    for p in 0..pre {
        let block_in = &src[p * i_n * post..(p + 1) * i_n * post];
        let block_out = &mut out[p * j_n * post..(p + 1) * j_n * post];
        for j in 0..j_n {
            let row = &mut block_out[j * post..(j + 1) * post];
            for i in 0..i_n {
                let coef = a[(j, i)];
                if coef.is_zero() {
                    continue;
                }
                let fiber = &block_in[i * post..(i + 1) * post];
                for (o, &v) in row.iter_mut().zip(fiber) {
                    *o += coef * v;
                }
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[n - 1] = j_n;
    DenseTensor::new(new_dims, out)
}

/// `X x_n u^T` for a vector `u` of length `I_n`. The result has order `N-1`
/// with modes in cyclic order `n+1, .., N, 1, .., n-1`, hence its
/// vectorization is exactly `u^T X_n`.
pub fn mode_n_vector_product<T: Scalar>(x: &DenseTensor<T>, u: &DVector<T>, n: usize) -> Result<DenseTensor<T>> {
    let order = x.order();
    check_mode(n, order)?;
    if order < 2 {
        return Err(shape("mode-n vector product needs a tensor of order at least 2"));
    }
    if u.len() != x.dim(n) {
        return Err(shape(format!(
            "mode-{n} vector product: vector length {}, mode {n} has dimension {}",
            u.len(),
            x.dim(n)
        )));
    }
    let xn = matricize(x, &ModePartition::mode_n(n, order))?;
    let row = u.transpose() * xn;
    let dims: Vec<usize> = cyclic_after(n, order).iter().map(|&m| x.dim(m)).collect();
    DenseTensor::new(dims, row.iter().copied().collect())
}

/// `sum x_{i1..iN} u1_{i1} .. uN_{iN}`.
pub fn full_contraction<T: Scalar>(x: &DenseTensor<T>, vectors: &[DVector<T>]) -> Result<T> {
    if vectors.len() != x.order() {
        return Err(Error::Arity(format!(
            "{} vectors for an order-{} tensor",
            vectors.len(),
            x.order()
        )));
    }
    for (n, v) in vectors.iter().enumerate() {
        if v.len() != x.dims()[n] {
            return Err(shape(format!(
                "vector {} has length {}, mode {} has dimension {}",
                n + 1,
                v.len(),
                n + 1,
                x.dims()[n]
            )));
        }
    }
    let mut acc = T::zero();
    let mut odo = Odometer::new(x.dims());
    let mut flat = 0;
    while let Some(idx) = odo.get() {
        let mut term = x.data()[flat];
        for (v, &i) in vectors.iter().zip(idx) {
            term *= v[i];
        }
        acc += term;
        flat += 1;
        odo.advance();
    }
    Ok(acc)
}

/// Hadamard product along the first `shared` modes:
/// `c_{r, ia, ib} = a_{r, ia} b_{r, ib}` with dims `shared ++ a-free ++ b-free`.
pub fn hadamard_common_modes<T: Scalar>(
    a: &DenseTensor<T>,
    b: &DenseTensor<T>,
    shared: usize,
) -> Result<DenseTensor<T>> {
    if shared > a.order() || shared > b.order() {
        return Err(shape(format!(
            "{shared} shared modes for tensors of order {} and {}",
            a.order(),
            b.order()
        )));
    }
    if a.dims()[..shared] != b.dims()[..shared] {
        return Err(shape(format!(
            "shared dims differ: {:?} vs {:?}",
            &a.dims()[..shared],
            &b.dims()[..shared]
        )));
    }
    let r: usize = a.dims()[..shared].iter().product();
    let fa: usize = a.dims()[shared..].iter().product();
    let fb: usize = b.dims()[shared..].iter().product();
    let mut out = Vec::with_capacity(r * fa * fb);
    for ri in 0..r {
        for ia in 0..fa {
            let av = a.data()[ri * fa + ia];
            for ib in 0..fb {
                out.push(av * b.data()[ri * fb + ib]);
            }
        }
    }
    let dims: Vec<usize> = a.dims().iter().chain(&b.dims()[shared..]).copied().collect();
    DenseTensor::new(dims, out)
}

/// Numerical rank of the flat mode-`n` unfolding.
pub fn mode_n_rank<T: Scalar>(x: &DenseTensor<T>, n: usize) -> Result<usize> {
    check_mode(n, x.order())?;
    if x.order() == 1 {
        let m = DMatrix::from_column_slice(x.len(), 1, x.data());
        return Ok(numerical_rank(&m));
    }
    Ok(numerical_rank(&matricize(x, &ModePartition::mode_n(n, x.order()))?))
}
