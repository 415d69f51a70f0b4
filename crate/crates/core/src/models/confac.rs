use nalgebra::DMatrix;

use super::{khatri_rao_modes, kron_modes, synth_parafac, ParafacModel, TuckerModel};
use crate::error::{shape, Error, Result};
use crate::linalg::{is_full_row_rank, row_diag};
use crate::scalar::Scalar;
use crate::tensor::{identity_tensor, mode_n_product, DenseTensor, ModePartition};

/// PARALIND / CONFAC model `X = I_{N,R} x_n (A^(n) Φ^(n))`.
///
/// Only the first `active()` modes carry a constraint matrix `Φ^(n)`
/// (`R_n x R`); the remaining factors are `I_n x R` and unconstrained, which
/// covers the PARALIND/CONFAC-(N1, N) variants. CONFAC structure is not
/// enforced at construction; see [`validate_confac`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConfacModel<T: Scalar> {
    pub factors: Vec<DMatrix<T>>,
    pub constraints: Vec<DMatrix<T>>,
}

impl<T: Scalar> ConfacModel<T> {
    pub fn new(factors: Vec<DMatrix<T>>, constraints: Vec<DMatrix<T>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Arity("CONFAC model needs at least one factor".into()));
        }
        if constraints.len() > factors.len() {
            return Err(Error::Arity(format!(
                "{} constraint matrices for {} factors",
                constraints.len(),
                factors.len()
            )));
        }
        let r = constraints.first().map(|p| p.ncols()).unwrap_or_else(|| factors[0].ncols());
        for (n, a) in factors.iter().enumerate() {
            let want = constraints.get(n).map(|p| p.nrows()).unwrap_or(r);
            if a.ncols() != want {
                return Err(shape(format!(
                    "factor {} has {} columns, expected {}",
                    n + 1,
                    a.ncols(),
                    want
                )));
            }
            if let Some(p) = constraints.get(n) {
                if p.ncols() != r {
                    return Err(shape(format!(
                        "constraint {} has {} columns, expected {}",
                        n + 1,
                        p.ncols(),
                        r
                    )));
                }
            }
        }
        Ok(ConfacModel { factors, constraints })
    }

    /// Runs [`validate_confac`] after construction.
    pub fn new_checked(factors: Vec<DMatrix<T>>, constraints: Vec<DMatrix<T>>) -> Result<Self> {
        let m = Self::new(factors, constraints)?;
        validate_confac(&m)?;
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn active(&self) -> usize {
        self.constraints.len()
    }

    /// Number of components `R`.
    pub fn rank(&self) -> usize {
        self.constraints.first().map(|p| p.ncols()).unwrap_or_else(|| self.factors[0].ncols())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|a| a.nrows()).collect()
    }

    /// `Φ^(n)` (1-based), `I_R` past `active()`.
    pub fn constraint(&self, n: usize) -> DMatrix<T> {
        match self.constraints.get(n - 1) {
            Some(p) => p.clone(),
            None => DMatrix::identity(self.rank(), self.rank()),
        }
    }

    pub fn full_constraints(&self) -> Vec<DMatrix<T>> {
        (1..=self.order()).map(|n| self.constraint(n)).collect()
    }

    /// `Ā^(n) = A^(n) Φ^(n)`.
    pub fn constrained_factors(&self) -> Vec<DMatrix<T>> {
        self.factors
            .iter()
            .enumerate()
            .map(|(n, a)| match self.constraints.get(n) {
                Some(p) => a * p,
                None => a.clone(),
            })
            .collect()
    }

    pub fn as_parafac(&self) -> ParafacModel<T> {
        ParafacModel { factors: self.constrained_factors(), weights: None }
    }

    /// Interaction tensor `G = I_{N,R} x_n Φ^(n)`.
    pub fn core(&self) -> DenseTensor<T> {
        let mut g = identity_tensor::<T>(self.order(), self.rank()).expect("nonempty model");
        for (n, p) in self.constraints.iter().enumerate() {
            g = mode_n_product(&g, p, n + 1).expect("conforming constraint");
        }
        g
    }

    /// Constrained Tucker view `X = G x_n A^(n)`.
    pub fn as_tucker(&self) -> TuckerModel<T> {
        TuckerModel { core: self.core(), factors: self.factors.clone() }
    }

    /// `Ξ^(n) = Φ^(n)T Φ^(n)`.
    pub fn xi(&self, n: usize) -> DMatrix<T> {
        let p = self.constraint(n);
        p.transpose() * p
    }
}

pub fn synth_confac<T: Scalar>(m: &ConfacModel<T>) -> Result<DenseTensor<T>> {
    synth_parafac(&m.as_parafac())
}

/// `X_{S1;S2} = (⊗_{S1} A)(⋄_{S1} Φ)(⋄_{S2} Φ)^T(⊗_{S2} A)^T`.
pub fn confac_unfold<T: Scalar>(m: &ConfacModel<T>, p: &ModePartition) -> Result<DMatrix<T>> {
    p.validate_matrix(m.order())?;
    let phis = m.full_constraints();
    let left = kron_modes(&m.factors, &p.s1)? * khatri_rao_modes(&phis, &p.s1)?;
    let right = kron_modes(&m.factors, &p.s2)? * khatri_rao_modes(&phis, &p.s2)?;
    Ok(left * right.transpose())
}

/// `Γ^(n1,n2) = Φ^(n1) Φ^(n2)T`; with `n1 = n2` this is `Γ^(n)`.
pub fn interaction_matrices<T: Scalar>(m: &ConfacModel<T>, n1: usize, n2: usize) -> Result<DMatrix<T>> {
    for n in [n1, n2] {
        if n == 0 || n > m.active() {
            return Err(shape(format!("mode {n} has no constraint matrix (active modes 1..={})", m.active())));
        }
    }
    Ok(m.constraint(n1) * m.constraint(n2).transpose())
}

/// CONFAC structure: every constraint column is a canonical vector, every
/// constraint is full row rank, and `sum_{r_n} D_{r_n}(Φ^(n)) = I_R`.
pub fn validate_confac<T: Scalar>(m: &ConfacModel<T>) -> Result<()> {
    let r = m.rank();
    for (n, p) in m.constraints.iter().enumerate() {
        for (c, col) in p.column_iter().enumerate() {
            let ones = col.iter().filter(|v| **v == T::one()).count();
            let zeros = col.iter().filter(|v| v.is_zero()).count();
            if ones != 1 || ones + zeros != col.len() {
                return Err(Error::Precondition(format!(
                    "column {} of constraint {} is not a canonical vector",
                    c + 1,
                    n + 1
                )));
            }
        }
        if !is_full_row_rank(p) {
            return Err(Error::Precondition(format!("constraint {} is not full row rank", n + 1)));
        }
        let mut sum = DMatrix::<T>::zeros(r, r);
        for i in 0..p.nrows() {
            sum += row_diag(p, i);
        }
        if sum != DMatrix::identity(r, r) {
            return Err(Error::Precondition(format!(
                "diagonal allocation sum of constraint {} is not the identity",
                n + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{relative_error, relative_error_slice};
    use crate::models::{synth_tucker, ParafacModel};
    use crate::random::{random_matrix, seeded_rng};
    use crate::tensor::matricize;

    fn m(rows: usize, cols: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, v)
    }

    fn allocation_model(seed: u64) -> ConfacModel<f64> {
        let mut rng = seeded_rng(seed);
        // R = 4 components, R_n = (2, 3, 4)
        let phi1 = m(2, 4, &[1., 1., 0., 0., 0., 0., 1., 1.]);
        let phi2 = m(3, 4, &[1., 0., 0., 1., 0., 1., 0., 0., 0., 0., 1., 0.]);
        let phi3 = DMatrix::identity(4, 4);
        ConfacModel::new(
            vec![random_matrix(3, 2, &mut rng), random_matrix(4, 3, &mut rng), random_matrix(2, 4, &mut rng)],
            vec![phi1, phi2, phi3],
        )
        .unwrap()
    }

    #[test]
    fn identity_constraints_reduce_to_parafac_exactly() {
        let mut rng = seeded_rng(1);
        let factors: Vec<DMatrix<f64>> = (0..3).map(|_| random_matrix(3, 2, &mut rng)).collect();
        let i2 = DMatrix::<f64>::identity(2, 2);
        let c = ConfacModel::new(factors.clone(), vec![i2.clone(), i2.clone(), i2]).unwrap();
        let p = ParafacModel::new(factors, None).unwrap();
        assert_eq!(synth_confac(&c).unwrap(), synth_parafac(&p).unwrap());
    }

    #[test]
    fn repeated_column_allocation() {
        let mut rng = seeded_rng(2);
        let a: DMatrix<f64> = random_matrix(3, 2, &mut rng);
        let phi = m(2, 3, &[1., 1., 0., 0., 0., 1.]);
        let c = ConfacModel::new(vec![a.clone(), random_matrix(2, 3, &mut rng)], vec![phi]).unwrap();
        let abar = &c.constrained_factors()[0];
        assert_eq!(abar.column(0), a.column(0));
        assert_eq!(abar.column(1), a.column(0));
        assert_eq!(abar.column(2), a.column(1));
    }

    #[test]
    fn synthesis_forms_agree() {
        let c = allocation_model(3);
        validate_confac(&c).unwrap();
        let x = synth_confac(&c).unwrap();
        let via_tucker = synth_tucker(&c.as_tucker()).unwrap();
        assert!(relative_error_slice(via_tucker.data(), x.data()) < 1e-12);
        for p in [
            ModePartition::mode_n(1, 3),
            ModePartition::mode_n(2, 3),
            ModePartition::new(vec![1, 3], vec![2]),
            ModePartition::new(vec![3, 2], vec![1]),
        ] {
            let closed = confac_unfold(&c, &p).unwrap();
            assert!(relative_error(&closed, &matricize(&x, &p).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn partial_constraints() {
        let mut rng = seeded_rng(4);
        let phi = m(2, 3, &[1., 0., 1., 0., 1., 0.]);
        let c = ConfacModel::new(
            vec![random_matrix(2, 2, &mut rng), random_matrix(3, 3, &mut rng), random_matrix(4, 3, &mut rng)],
            vec![phi],
        )
        .unwrap();
        assert_eq!(c.active(), 1);
        assert_eq!(c.constraint(3), DMatrix::identity(3, 3));
        let x = synth_confac(&c).unwrap();
        let p = ModePartition::mode_n(2, 3);
        assert!(relative_error(&confac_unfold(&c, &p).unwrap(), &matricize(&x, &p).unwrap()) < 1e-12);
    }

    #[test]
    fn interactions() {
        let mut rng = seeded_rng(5);
        let phi = m(2, 3, &[1., 1., 0., 0., 0., 1.]);
        let c = ConfacModel::new(
            vec![random_matrix(2, 2, &mut rng), random_matrix(2, 3, &mut rng)],
            vec![phi.clone(), DMatrix::identity(3, 3)],
        )
        .unwrap();
        assert_eq!(interaction_matrices(&c, 1, 1).unwrap(), m(2, 2, &[2., 0., 0., 1.]));
        assert_eq!(interaction_matrices(&c, 2, 2).unwrap(), DMatrix::identity(3, 3));
        assert_eq!(interaction_matrices(&c, 1, 2).unwrap(), phi);
        assert!(c.xi(1).diagonal().iter().all(|&v| v == 1.0));
        assert!(interaction_matrices(&c, 1, 3).is_err());
    }

    #[test]
    fn validation_flags_non_confac() {
        let mut rng = seeded_rng(6);
        let a = random_matrix::<f64, _>(2, 2, &mut rng);
        let b = random_matrix::<f64, _>(2, 3, &mut rng);
        let summed = m(2, 3, &[1., 1., 0., 1., 0., 1.]);
        let c = ConfacModel::new(vec![a.clone(), b.clone()], vec![summed, DMatrix::identity(3, 3)]).unwrap();
        assert!(matches!(validate_confac(&c), Err(Error::Precondition(_))));
        let unused = m(2, 3, &[1., 1., 1., 0., 0., 0.]);
        let c = ConfacModel::new(vec![a, b], vec![unused, DMatrix::identity(3, 3)]).unwrap();
        assert!(validate_confac(&c).is_err());
    }
}
