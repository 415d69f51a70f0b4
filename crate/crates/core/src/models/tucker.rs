use nalgebra::DMatrix;

use super::kron_modes;
use crate::error::{shape, Result};
use crate::scalar::Scalar;
use crate::tensor::{matricize, mode_n_product, DenseTensor, ModePartition};

/// `X = G x_1 A^(1) .. x_N1 A^(N1)`. Modes after `active()` carry an implicit
/// identity factor, which gives the Tucker-(N1, N) family; `active() = N` is
/// the plain Tucker model.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerModel<T: Scalar> {
    pub core: DenseTensor<T>,
    pub factors: Vec<DMatrix<T>>,
}

impl<T: Scalar> TuckerModel<T> {
    pub fn new(core: DenseTensor<T>, factors: Vec<DMatrix<T>>) -> Result<Self> {
        if factors.len() > core.order() {
            return Err(shape(format!(
                "{} factors for an order-{} core",
                factors.len(),
                core.order()
            )));
        }
        for (n, a) in factors.iter().enumerate() {
            if a.ncols() != core.dims()[n] {
                return Err(shape(format!(
                    "factor {} has {} columns, core mode {} has dimension {}",
                    n + 1,
                    a.ncols(),
                    n + 1,
                    core.dims()[n]
                )));
            }
        }
        Ok(TuckerModel { core, factors })
    }

    pub fn order(&self) -> usize {
        self.core.order()
    }

    /// Number of modes with an explicit factor.
    pub fn active(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        (1..=self.order())
            .map(|n| match self.factors.get(n - 1) {
                Some(a) => a.nrows(),
                None => self.core.dim(n),
            })
            .collect()
    }

    /// Factor of mode `n` (1-based), identity past `active()`.
    pub fn factor(&self, n: usize) -> DMatrix<T> {
        match self.factors.get(n - 1) {
            Some(a) => a.clone(),
            None => DMatrix::identity(self.core.dim(n), self.core.dim(n)),
        }
    }

    pub fn full_factors(&self) -> Vec<DMatrix<T>> {
        (1..=self.order()).map(|n| self.factor(n)).collect()
    }
}

/// Chained mode-n products of the core with every explicit factor.
pub fn synth_tucker<T: Scalar>(m: &TuckerModel<T>) -> Result<DenseTensor<T>> {
    let mut x = m.core.clone();
    for (n, a) in m.factors.iter().enumerate() {
        x = mode_n_product(&x, a, n + 1)?;
    }
    Ok(x)
}

/// `X_{S1;S2} = (⊗_{S1} A) G_{S1;S2} (⊗_{S2} A)^T`.
pub fn tucker_unfold<T: Scalar>(m: &TuckerModel<T>, p: &ModePartition) -> Result<DMatrix<T>> {
    p.validate_matrix(m.order())?;
    let factors = m.full_factors();
    let left = kron_modes(&factors, &p.s1)?;
    let right = kron_modes(&factors, &p.s2)?;
    Ok(left * matricize(&m.core, p)? * right.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{relative_error, relative_error_slice};
    use crate::random::{random_matrix, random_tensor, seeded_rng};

    fn random_model(seed: u64, core_dims: &[usize], out: &[usize]) -> TuckerModel<f64> {
        let mut rng = seeded_rng(seed);
        let core = random_tensor(core_dims, &mut rng);
        let factors = out.iter().zip(core_dims).map(|(&i, &r)| random_matrix(i, r, &mut rng)).collect();
        TuckerModel::new(core, factors).unwrap()
    }

    #[test]
    fn synthesis_matches_triple_sum() {
        let m = random_model(1, &[3, 2, 2], &[4, 3, 5]);
        let x = synth_tucker(&m).unwrap();
        assert_eq!(x.dims(), &[4, 3, 5]);
        let (a, b, c) = (&m.factors[0], &m.factors[1], &m.factors[2]);
        let oracle = DenseTensor::from_fn(&[4, 3, 5], |i| {
            let mut s = 0.0;
            for r1 in 0..3 {
                for r2 in 0..2 {
                    for r3 in 0..2 {
                        s += m.core.get(&[r1 + 1, r2 + 1, r3 + 1]).unwrap()
                            * a[(i[0] - 1, r1)]
                            * b[(i[1] - 1, r2)]
                            * c[(i[2] - 1, r3)];
                    }
                }
            }
            s
        })
        .unwrap();
        assert!(relative_error_slice(x.data(), oracle.data()) < 1e-12);
    }

    #[test]
    fn identity_factors_give_core() {
        let mut rng = seeded_rng(2);
        let core: DenseTensor<f64> = random_tensor(&[2, 3, 2], &mut rng);
        let m = TuckerModel::new(
            core.clone(),
            vec![DMatrix::identity(2, 2), DMatrix::identity(3, 3), DMatrix::identity(2, 2)],
        )
        .unwrap();
        assert_eq!(synth_tucker(&m).unwrap(), core);
        let p = ModePartition::new(vec![2], vec![3, 1]);
        assert_eq!(tucker_unfold(&m, &p).unwrap(), matricize(&core, &p).unwrap());
    }

    #[test]
    fn unfoldings_match_synthesis() {
        let m = random_model(3, &[2, 3, 2], &[3, 4, 2]);
        let x = synth_tucker(&m).unwrap();
        for p in [
            ModePartition::mode_n(1, 3),
            ModePartition::mode_n(2, 3),
            ModePartition::mode_n(3, 3),
            ModePartition::new(vec![1, 3], vec![2]),
            ModePartition::new(vec![3], vec![2, 1]),
        ] {
            let closed = tucker_unfold(&m, &p).unwrap();
            assert!(relative_error(&closed, &matricize(&x, &p).unwrap()) < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn tucker_2_3_has_identity_third_factor() {
        let mut rng = seeded_rng(4);
        let core: DenseTensor<f64> = random_tensor(&[2, 3, 4], &mut rng);
        let m = TuckerModel::new(core, vec![random_matrix(3, 2, &mut rng), random_matrix(5, 3, &mut rng)]).unwrap();
        assert_eq!(m.dims(), vec![3, 5, 4]);
        assert_eq!(m.factor(3), DMatrix::identity(4, 4));
        let x = synth_tucker(&m).unwrap();
        let p = ModePartition::mode_n(1, 3);
        assert!(relative_error(&tucker_unfold(&m, &p).unwrap(), &matricize(&x, &p).unwrap()) < 1e-12);
    }

    #[test]
    fn rejects_mismatched_factor() {
        let core = DenseTensor::filled(&[2, 2], 1.0).unwrap();
        assert!(TuckerModel::new(core, vec![DMatrix::zeros(3, 3)]).is_err());
    }
}
