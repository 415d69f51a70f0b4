use nalgebra::{DMatrix, DVector};

use super::{khatri_rao_modes, TuckerModel};
use crate::error::{shape, Error, Result};
use crate::kron::khatri_rao;
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, ModePartition};

/// `x = sum_r g_r prod_n a^(n)_{i_n, r}`. Without weights every `g_r = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParafacModel<T: Scalar> {
    pub factors: Vec<DMatrix<T>>,
    pub weights: Option<DVector<T>>,
}

impl<T: Scalar> ParafacModel<T> {
    pub fn new(factors: Vec<DMatrix<T>>, weights: Option<DVector<T>>) -> Result<Self> {
        let r = factors
            .first()
            .ok_or_else(|| Error::Arity("PARAFAC model needs at least one factor".into()))?
            .ncols();
        if let Some(n) = factors.iter().position(|a| a.ncols() != r) {
            return Err(shape(format!(
                "factor {} has {} columns, factor 1 has {}",
                n + 1,
                factors[n].ncols(),
                r
            )));
        }
        if let Some(g) = &weights {
            if g.len() != r {
                return Err(shape(format!("{} weights for {} components", g.len(), r)));
            }
        }
        Ok(ParafacModel { factors, weights })
    }

    pub fn rank(&self) -> usize {
        self.factors[0].ncols()
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|a| a.nrows()).collect()
    }

    pub fn weights_or_ones(&self) -> DVector<T> {
        self.weights.clone().unwrap_or_else(|| DVector::from_element(self.rank(), T::one()))
    }

    /// Weighted form: unit-norm factor columns and `g_r > 0`. For a complex or
    /// negative weight the phase moves into the last factor. Zero columns are
    /// left as they are with `g_r = 0`.
    pub fn normalize(&self) -> Self {
        let g = self.weights_or_ones();
        let mut factors = self.factors.clone();
        let mut weights = DVector::zeros(self.rank());
        for r in 0..self.rank() {
            let mut scale = g[r];
            for a in factors.iter_mut() {
                let norm = a.column(r).norm();
                if T::real_to_f64(norm.clone()) != 0.0 {
                    a.column_mut(r).unscale_mut(norm.clone());
                }
                scale *= T::from_real(norm);
            }
            let modulus = scale.modulus();
            if T::real_to_f64(modulus.clone()) != 0.0 {
                let phase = scale / T::from_real(modulus.clone());
                let mut last = factors.last_mut().unwrap().column_mut(r);
                last *= phase;
            }
            weights[r] = T::from_real(modulus);
        }
        ParafacModel { factors, weights: Some(weights) }
    }

    /// Merges the modes of each group into one mode whose factor is the
    /// Khatri-Rao product of the grouped factors (last listed fastest).
    pub fn merge_modes(&self, groups: &[Vec<usize>]) -> Result<Self> {
        let factors = groups
            .iter()
            .map(|g| khatri_rao_modes(&self.factors, g))
            .collect::<Result<Vec<_>>>()?;
        ParafacModel::new(factors, self.weights.clone())
    }

    /// Tucker form with a superdiagonal core holding the weights.
    pub fn as_tucker(&self) -> TuckerModel<T> {
        let r = self.rank();
        let g = self.weights_or_ones();
        let core = DenseTensor::from_fn(&vec![r; self.order()], |idx| {
            if idx.iter().all(|&i| i == idx[0]) {
                g[idx[0] - 1]
            } else {
                T::zero()
            }
        })
        .expect("nonempty core");
        TuckerModel { core, factors: self.factors.clone() }
    }
}

/// `vec(X) = (A^(1) ⋄ .. ⋄ A^(N)) g`.
pub fn synth_parafac<T: Scalar>(m: &ParafacModel<T>) -> Result<DenseTensor<T>> {
    let kr = khatri_rao(&m.factors)?;
    let v = match &m.weights {
        Some(g) => kr * g,
        None => DVector::from_iterator(kr.nrows(), kr.row_iter().map(|row| row.sum())),
    };
    DenseTensor::new(m.dims(), v.as_slice().to_vec())
}

/// `X_{S1;S2} = (⋄_{S1} A) diag(g) (⋄_{S2} A)^T`.
pub fn parafac_unfold<T: Scalar>(m: &ParafacModel<T>, p: &ModePartition) -> Result<DMatrix<T>> {
    p.validate_matrix(m.order())?;
    let mut left = khatri_rao_modes(&m.factors, &p.s1)?;
    if let Some(g) = &m.weights {
        for (r, mut col) in left.column_iter_mut().enumerate() {
            col *= g[r];
        }
    }
    Ok(left * khatri_rao_modes(&m.factors, &p.s2)?.transpose())
}
