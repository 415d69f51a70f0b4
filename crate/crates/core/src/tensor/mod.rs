//! Dense N-way arrays stored with the last index varying fastest.
//!
//! Mode numbers and multi-indices are 1-based at the public API, matching the
//! usual mathematical notation (`x_{i1,...,iN}`, mode `n` in `1..=N`).
//! Matrices are plain `nalgebra::DMatrix` values and keep nalgebra's 0-based
//! `(row, col)` indexing.

mod ops;
mod partition;
mod unfold;

pub use ops::{
    full_contraction, hadamard_common_modes, mode_n_product, mode_n_rank, mode_n_vector_product,
    slice,
};
pub use partition::ModePartition;
pub use unfold::{contract_modes, element_from_unfolding, matricize, refold};

use nalgebra::DVector;
use num_traits::{One, Zero};

use crate::error::{shape, Error, Result};

/// Row-major strides for `dims` (last mode has stride 1).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for n in (0..dims.len().saturating_sub(1)).rev() {
        s[n] = s[n + 1] * dims[n + 1];
    }
    s
}

/// Iterates 0-based multi-indices in lexicographic order.
pub(crate) struct Odometer {
    dims: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(dims: &[usize]) -> Self {
        Odometer {
            dims: dims.to_vec(),
            current: vec![0; dims.len()],
            done: dims.contains(&0),
        }
    }

    /// Current index, or `None` once exhausted. Call [`Odometer::advance`] to move on.
    pub(crate) fn get(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.current)
        }
    }

    pub(crate) fn advance(&mut self) {
        for n in (0..self.dims.len()).rev() {
            self.current[n] += 1;
            if self.current[n] < self.dims[n] {
                return;
            }
            self.current[n] = 0;
        }
        self.done = true;
    }
}

/// 1-based position of the 1-based multi-index `idx` under last-index-fastest
/// ordering: `i = i_N + sum_{n<N} (i_n - 1) prod_{j>n} I_j`.
pub fn linear_index(dims: &[usize], idx: &[usize]) -> Result<usize> {
    if dims.len() != idx.len() {
        return Err(shape(format!(
            "multi-index of length {} for an order-{} tensor",
            idx.len(),
            dims.len()
        )));
    }
    let mut pos = 0usize;
    for (n, (&d, &i)) in dims.iter().zip(idx).enumerate() {
        if i == 0 || i > d {
            return Err(Error::Bounds { mode: n + 1, index: i, dim: d });
        }
        pos = pos * d + (i - 1);
    }
    Ok(pos + 1)
}

/// Inverse of [`linear_index`].
pub fn multi_index(dims: &[usize], linear: usize) -> Result<Vec<usize>> {
    let total: usize = dims.iter().product();
    if linear == 0 || linear > total {
        return Err(Error::Bounds { mode: 0, index: linear, dim: total });
    }
    let mut rem = linear - 1;
    let mut idx = vec![0; dims.len()];
    for n in (0..dims.len()).rev() {
        idx[n] = rem % dims[n] + 1;
        rem /= dims[n];
    }
    Ok(idx)
}

/// 0-based flat offset of a 0-based multi-index; no bounds checks.
#[inline]
pub(crate) fn offset0(dims: &[usize], idx0: &[usize]) -> usize {
    idx0.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Clone> DenseTensor<T> {
    /// Wraps `data` (in vectorize order) as a tensor of shape `dims`.
    pub fn new(dims: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if dims.is_empty() {
            return Err(shape("a tensor needs at least one mode"));
        }
        if let Some(n) = dims.iter().position(|&d| d == 0) {
            return Err(shape(format!("mode {} has zero dimension", n + 1)));
        }
        let len: usize = dims.iter().product();
        if len != data.len() {
            return Err(shape(format!(
                "dims {:?} need {} entries, got {}",
                dims,
                len,
                data.len()
            )));
        }
        Ok(DenseTensor { dims, data })
    }

    /// Builds a tensor by evaluating `f` at every 1-based multi-index.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(shape(format!("invalid tensor dims {dims:?}")));
        }
        let mut data = Vec::with_capacity(dims.iter().product());
        let mut odo = Odometer::new(dims);
        let mut one_based = vec![0; dims.len()];
        while let Some(idx) = odo.get() {
            for (o, &i) in one_based.iter_mut().zip(idx) {
                *o = i + 1;
            }
            data.push(f(&one_based));
            odo.advance();
        }
        Ok(DenseTensor { dims: dims.to_vec(), data })
    }

    pub fn filled(dims: &[usize], value: T) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims.to_vec(), vec![value; len])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of mode `n` (1-based).
    pub fn dim(&self, n: usize) -> usize {
        self.dims[n - 1]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entries in vectorize order.
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Entry at a 1-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Result<&T> {
        let pos = linear_index(&self.dims, idx)?;
        Ok(&self.data[pos - 1])
    }

    pub fn set(&mut self, idx: &[usize], value: T) -> Result<()> {
        let pos = linear_index(&self.dims, idx)?;
        self.data[pos - 1] = value;
        Ok(())
    }

    pub(crate) fn get0(&self, idx0: &[usize]) -> &T {
        &self.data[offset0(&self.dims, idx0)]
    }

    /// Same entries under new dims with the same number of elements.
    pub fn reshape(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.data)
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> DenseTensor<U> {
        DenseTensor { dims: self.dims.clone(), data: self.data.iter().map(f).collect() }
    }
}

impl<T: nalgebra::Scalar> DenseTensor<T> {
    /// `vec(X)`: the entries in last-index-fastest order.
    pub fn vectorize(&self) -> DVector<T> {
        DVector::from_vec(self.data.clone())
    }
}

/// Free-function form of [`DenseTensor::vectorize`].
pub fn vectorize<T: nalgebra::Scalar>(x: &DenseTensor<T>) -> DVector<T> {
    x.vectorize()
}

/// Identity tensor `I_{order,dim}`: one where all indices agree, zero elsewhere.
pub fn identity_tensor<T: Clone + Zero + One>(order: usize, dim: usize) -> Result<DenseTensor<T>> {
    if order == 0 || dim == 0 {
        return Err(shape(format!("identity tensor needs order and dim >= 1, got ({order}, {dim})")));
    }
    DenseTensor::from_fn(&vec![dim; order], |idx| {
        if idx.iter().all(|&i| i == idx[0]) {
            T::one()
        } else {
            T::zero()
        }
    })
}
