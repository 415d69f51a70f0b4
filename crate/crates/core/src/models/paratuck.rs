use nalgebra::DMatrix;

use super::{tucker_unfold, TuckerModel};
use crate::error::{shape, Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{hadamard_common_modes, DenseTensor, ModePartition, Odometer};

/// PARATUCK-(N1, N):
/// `x = sum_r c_{r_1..r_N1, i_{N1+2}..i_N} prod_n a^(n)_{i_n r_n} φ^(n)_{r_n i_{N1+1}}`.
///
/// `factors[n]` is `I_n x R_n`, `constraints[n]` is `R_n x I_{N1+1}` and
/// `input` has dims `(R_1..R_N1, I_{N1+2}..I_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParatuckModel<T: Scalar> {
    pub factors: Vec<DMatrix<T>>,
    pub constraints: Vec<DMatrix<T>>,
    pub input: DenseTensor<T>,
}

impl<T: Scalar> ParatuckModel<T> {
    pub fn new(factors: Vec<DMatrix<T>>, constraints: Vec<DMatrix<T>>, input: DenseTensor<T>) -> Result<Self> {
        let n1 = factors.len();
        if n1 == 0 {
            return Err(Error::Arity("PARATUCK needs at least one factor".into()));
        }
        if constraints.len() != n1 {
            return Err(shape(format!("{} factors but {} constraint matrices", n1, constraints.len())));
        }
        if input.order() < n1 {
            return Err(shape(format!("input of order {} for {} factors", input.order(), n1)));
        }
        let slots = constraints[0].ncols();
        for (n, (a, phi)) in factors.iter().zip(&constraints).enumerate() {
            let r = input.dims()[n];
            if a.ncols() != r || phi.nrows() != r {
                return Err(shape(format!(
                    "mode {}: factor is {}x{}, constraint is {}x{}, input has R = {}",
                    n + 1,
                    a.nrows(),
                    a.ncols(),
                    phi.nrows(),
                    phi.ncols(),
                    r
                )));
            }
            if phi.ncols() != slots {
                return Err(shape(format!(
                    "constraint {} has {} columns, constraint 1 has {}",
                    n + 1,
                    phi.ncols(),
                    slots
                )));
            }
        }
        Ok(ParatuckModel { factors, constraints, input })
    }

    pub fn n1(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.input.order() + 1
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.input.dims()[..self.n1()].to_vec()
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.factors.iter().map(|a| a.nrows()).collect();
        d.push(self.constraints[0].ncols());
        d.extend_from_slice(&self.input.dims()[self.n1()..]);
        d
    }

    /// Tucker-(N1, N) form with core `paratuck_core(self)`.
    pub fn as_tucker(&self) -> TuckerModel<T> {
        TuckerModel {
            core: paratuck_core(self).expect("validated model"),
            factors: self.factors.clone(),
        }
    }
}

/// Direct evaluation of the scalar form.
pub fn synth_paratuck<T: Scalar>(m: &ParatuckModel<T>) -> Result<DenseTensor<T>> {
    let n1 = m.n1();
    let ranks = m.ranks();
    DenseTensor::from_fn(&m.dims(), |idx| {
        let slot = idx[n1] - 1;
        let mut acc = T::zero();
        let mut odo = Odometer::new(&ranks);
        while let Some(r) = odo.get() {
            let mut term = T::one();
            for n in 0..n1 {
                term *= m.factors[n][(idx[n] - 1, r[n])] * m.constraints[n][(r[n], slot)];
            }
            let mut cidx: Vec<usize> = r.to_vec();
            cidx.extend(idx[n1 + 1..].iter().map(|i| i - 1));
            acc += term * *m.input.get0(&cidx);
            odo.advance();
        }
        acc
    })
}

/// `f_{r_1..r_N1, i} = prod_n φ^(n)_{r_n i}`.
pub fn allocation_tensor<T: Scalar>(m: &ParatuckModel<T>) -> Result<DenseTensor<T>> {
    let mut dims = m.ranks();
    dims.push(m.constraints[0].ncols());
    let n1 = m.n1();
    DenseTensor::from_fn(&dims, |idx| {
        (0..n1).fold(T::one(), |acc, n| acc * m.constraints[n][(idx[n] - 1, idx[n1] - 1)])
    })
}

/// `G = F ⊙ C` over the shared rank modes, dims `(R_1..R_N1, I_{N1+1}, I_{N1+2}..I_N)`.
pub fn paratuck_core<T: Scalar>(m: &ParatuckModel<T>) -> Result<DenseTensor<T>> {
    hadamard_common_modes(&allocation_tensor(m)?, &m.input, m.n1())
}

pub fn paratuck_unfold<T: Scalar>(m: &ParatuckModel<T>, p: &ModePartition) -> Result<DMatrix<T>> {
    tucker_unfold(&m.as_tucker(), p)
}
