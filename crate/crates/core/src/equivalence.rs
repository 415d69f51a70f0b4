//! Rewriting PARATUCK and Tucker-(2,3) models as constrained PARAFAC models.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kron::{khatri_rao, khatri_rao2, kron2, tensor_extension};
use crate::linalg::{diag, relative_error};
use crate::models::{allocation_tensor, paratuck_core, ParafacModel, ParatuckModel, TuckerModel};
use crate::scalar::Scalar;
use crate::tensor::{identity_tensor, matricize, mode_n_product, DenseTensor, ModePartition};

/// `Ψ^(n) = 1^T_{R_1} ⊗ .. ⊗ I_{R_n} ⊗ .. ⊗ 1^T_{R_N}`, shape `R_n x prod R`.
pub fn psi_constraints<T: Scalar>(ranks: &[usize], n: usize) -> Result<DMatrix<T>> {
    if n == 0 || n > ranks.len() {
        return Err(Error::Arity(format!("mode {n} outside 1..={}", ranks.len())));
    }
    tensor_extension(&DMatrix::identity(ranks[n - 1], ranks[n - 1]), n, ranks)
}

fn check_orders<T: Scalar>(m: &ParatuckModel<T>, n1: usize, n: usize) -> Result<()> {
    if m.n1() != n1 || m.order() != n {
        return Err(Error::Arity(format!(
            "expected a PARATUCK-({n1},{n}) model, got PARATUCK-({},{})",
            m.n1(),
            m.order()
        )));
    }
    Ok(())
}

fn psi_factors<T: Scalar>(m: &ParatuckModel<T>) -> Result<Vec<DMatrix<T>>> {
    let ranks = m.ranks();
    (1..=m.n1()).map(|n| Ok(&m.factors[n - 1] * psi_constraints::<T>(&ranks, n)?)).collect()
}

/// `(⋄_n Φ^(n))^T`, shape `I_{N1+1} x prod R`.
pub fn allocation_matrix<T: Scalar>(m: &ParatuckModel<T>) -> Result<DMatrix<T>> {
    Ok(khatri_rao(&m.constraints)?.transpose())
}

/// PARATUCK-(N1, N1+2) as a rank-`prod R_n` PARAFAC model with factors
/// `A^(n) Ψ^(n)`, `(⋄ Φ^(n))^T` and `C_{I_N x R_1..R_N1}`.
pub fn paratuck_general_to_parafac<T: Scalar>(m: &ParatuckModel<T>) -> Result<ParafacModel<T>> {
    let n1 = m.n1();
    if m.order() != n1 + 2 {
        return Err(Error::Unsupported(format!(
            "PARAFAC rewriting needs N = N1 + 2, got N1 = {n1}, N = {}",
            m.order()
        )));
    }
    let mut factors = psi_factors(m)?;
    factors.push(allocation_matrix(m)?);
    factors.push(matricize(&m.input, &ModePartition::new(vec![n1 + 1], (1..=n1).collect()))?);
    ParafacModel::new(factors, None)
}

pub fn paratuck24_to_parafac4<T: Scalar>(m: &ParatuckModel<T>) -> Result<ParafacModel<T>> {
    check_orders(m, 2, 4)?;
    paratuck_general_to_parafac(m)
}

/// PARATUCK-2 as a PARAFAC-3 model with third factor
/// `(Φ^(1) ⋄ Φ^(2))^T diag(vec(C^T))`.
pub fn paratuck2_to_parafac3<T: Scalar>(m: &ParatuckModel<T>) -> Result<ParafacModel<T>> {
    check_orders(m, 2, 3)?;
    let mut factors = psi_factors(m)?;
    factors.push(allocation_matrix(m)? * diag(&DVector::from_column_slice(m.input.data())));
    ParafacModel::new(factors, None)
}

/// Tucker-(2,3) as a PARAFAC-3 model with factors `A^(1) Ψ^(1)`,
/// `A^(2) Ψ^(2)` and `G_{I3 x R1R2}`.
pub fn tucker23_to_parafac3<T: Scalar>(m: &TuckerModel<T>) -> Result<ParafacModel<T>> {
    if m.order() != 3 || m.active() != 2 {
        return Err(Error::Arity(format!(
            "expected a Tucker-(2,3) model, got {} factors on an order-{} core",
            m.active(),
            m.order()
        )));
    }
    let ranks = &m.core.dims()[..2];
    let factors = vec![
        &m.factors[0] * psi_constraints::<T>(ranks, 1)?,
        &m.factors[1] * psi_constraints::<T>(ranks, 2)?,
        matricize(&m.core, &ModePartition::new(vec![3], vec![1, 2]))?,
    ];
    ParafacModel::new(factors, None)
}

/// Core of the Tucker-(2,3) view of PARATUCK-2 built as
/// `I_{3,R} x_1 Ψ^(1) x_2 Ψ^(2) x_3 F`, dims `(R_1, R_2, I_3)`.
pub fn paratuck2_mode_product_core<T: Scalar>(m: &ParatuckModel<T>) -> Result<DenseTensor<T>> {
    let parafac = paratuck2_to_parafac3(m)?;
    let ranks = m.ranks();
    let r = ranks.iter().product();
    let mut g = identity_tensor(3, r)?;
    g = mode_n_product(&g, &psi_constraints(&ranks, 1)?, 1)?;
    g = mode_n_product(&g, &psi_constraints(&ranks, 2)?, 2)?;
    mode_n_product(&g, &parafac.factors[2], 3)
}

/// `G_{I3 x R1R2}` from the mode-product core and from the Hadamard core.
pub fn paratuck2_core_forms<T: Scalar>(m: &ParatuckModel<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let p = ModePartition::new(vec![3], vec![1, 2]);
    Ok((matricize(&paratuck2_mode_product_core(m)?, &p)?, matricize(&paratuck_core(m)?, &p)?))
}

/// `X_{I1I2 x I3I4} = (A^(1) ⊗ A^(2)) (F ⋄ D)^T` for PARATUCK-(2,4).
pub fn paratuck24_contracted_unfolding<T: Scalar>(m: &ParatuckModel<T>) -> Result<DMatrix<T>> {
    check_orders(m, 2, 4)?;
    let f = allocation_matrix(m)?;
    let d = matricize(&m.input, &ModePartition::new(vec![3], vec![1, 2]))?;
    Ok(kron2(&m.factors[0], &m.factors[1]) * khatri_rao2(&f, &d)?.transpose())
}

/// Builds the third-order extension tensors of a PARATUCK-(2,4) model from
/// their entry definitions and checks their mode-1 unfoldings against
/// `A^(1) Ψ^(1)`, `A^(2) Ψ^(2)`, `(Φ^(1) ⋄ Φ^(2))^T` and `C_{I4 x R1R2}`.
pub fn verify_extension_tensors<T: Scalar>(m: &ParatuckModel<T>) -> bool {
    let ranks = m.ranks();
    match (psi_constraints(&ranks, 1), psi_constraints(&ranks, 2)) {
        (Ok(p1), Ok(p2)) => verify_extension_tensors_with(m, &p1, &p2),
        _ => false,
    }
}

/// As [`verify_extension_tensors`] with caller-supplied `Ψ` matrices.
pub fn verify_extension_tensors_with<T: Scalar>(m: &ParatuckModel<T>, psi1: &DMatrix<T>, psi2: &DMatrix<T>) -> bool {
    if check_orders(m, 2, 4).is_err() {
        return false;
    }
    let (r1, r2) = (m.ranks()[0], m.ranks()[1]);
    let r = r1 * r2;
    if psi1.shape() != (r1, r) || psi2.shape() != (r2, r) {
        return false;
    }
    let dims = m.dims();
    let (a1, a2) = (&m.factors[0], &m.factors[1]);
    let (phi1, phi2) = (&m.constraints[0], &m.constraints[1]);
    let build = |rows: usize, f: &dyn Fn(usize, usize, usize) -> T| {
        DenseTensor::from_fn(&[rows, r1, r2], |i| f(i[0] - 1, i[1] - 1, i[2] - 1))
    };
    let tensors = [
        build(dims[0], &|i, p, _| a1[(i, p)]),
        build(dims[1], &|i, _, q| a2[(i, q)]),
        build(dims[2], &|i, p, q| phi1[(p, i)] * phi2[(q, i)]),
        build(dims[3], &|i, p, q| *m.input.get0(&[p, q, i])),
    ];
    let expected = [
        Ok(a1 * psi1),
        Ok(a2 * psi2),
        allocation_tensor(m).and_then(|f| matricize(&f, &ModePartition::new(vec![3], vec![1, 2]))),
        matricize(&m.input, &ModePartition::new(vec![3], vec![1, 2])),
    ];
    let alloc = khatri_rao2(phi1, phi2).map(|k| k.transpose());
    let unfold = ModePartition::new(vec![1], vec![2, 3]);
    tensors.into_iter().zip(expected).enumerate().all(|(k, (t, e))| match (t, e) {
        (Ok(t), Ok(e)) => {
            let Ok(u) = matricize(&t, &unfold) else { return false };
            let close = relative_error(&u, &e) <= 1e-13;
            if k == 2 {
                close && alloc.as_ref().is_ok_and(|a| relative_error(&u, a) <= 1e-13)
            } else {
                close
            }
        }
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::relative_error_slice;
    use crate::models::{synth_parafac, synth_paratuck, synth_tucker};
    use crate::random::{random_matrix, random_tensor, seeded_rng};

    fn random_model(seed: u64, dims: &[usize], ranks: &[usize], trailing: &[usize]) -> ParatuckModel<f64> {
        let mut rng = seeded_rng(seed);
        let n1 = ranks.len();
        let factors = (0..n1).map(|n| random_matrix(dims[n], ranks[n], &mut rng)).collect();
        let constraints = ranks.iter().map(|&r| random_matrix(r, dims[n1], &mut rng)).collect();
        let cdims: Vec<usize> = ranks.iter().chain(trailing).copied().collect();
        ParatuckModel::new(factors, constraints, random_tensor(&cdims, &mut rng)).unwrap()
    }

    #[test]
    fn psi_examples() {
        let p: DMatrix<f64> = psi_constraints(&[2, 3], 1).unwrap();
        let expected = kron2(&DMatrix::identity(2, 2), &DMatrix::from_element(1, 3, 1.0));
        assert_eq!(p, expected);
        assert_eq!(psi_constraints::<f64>(&[4], 1).unwrap(), DMatrix::identity(4, 4));
        let p2: DMatrix<f64> = psi_constraints(&[2, 2, 2], 2).unwrap();
        for col in 0..8 {
            let r2 = (col / 2) % 2;
            for row in 0..2 {
                assert_eq!(p2[(row, col)], if row == r2 { 1.0 } else { 0.0 });
            }
        }
        assert!(psi_constraints::<f64>(&[2, 2], 3).is_err());
    }

    #[test]
    fn psi_khatri_rao_is_identity() {
        for ranks in [vec![2, 3], vec![3, 1, 2], vec![2, 2, 2, 2]] {
            let psis: Vec<DMatrix<f64>> = (1..=ranks.len()).map(|n| psi_constraints(&ranks, n).unwrap()).collect();
            let r = ranks.iter().product();
            assert_eq!(khatri_rao(&psis).unwrap(), DMatrix::identity(r, r));
        }
    }

    #[test]
    fn paratuck24_equivalence() {
        let m = random_model(1, &[3, 4, 5], &[2, 3], &[2]);
        let p = paratuck24_to_parafac4(&m).unwrap();
        assert_eq!(p.rank(), 6);
        assert_eq!(p.dims(), vec![3, 4, 5, 2]);
        let x = synth_paratuck(&m).unwrap();
        assert!(relative_error_slice(synth_parafac(&p).unwrap().data(), x.data()) < 1e-12);
        let contracted = matricize(&x, &ModePartition::new(vec![1, 2], vec![3, 4])).unwrap();
        assert!(relative_error(&paratuck24_contracted_unfolding(&m).unwrap(), &contracted) < 1e-12);
        assert!(paratuck2_to_parafac3(&m).is_err());
    }

    #[test]
    fn rank_one_paratuck24() {
        let m = random_model(2, &[2, 3, 2], &[1, 1], &[3]);
        let p = paratuck24_to_parafac4(&m).unwrap();
        assert_eq!(p.rank(), 1);
        let x = synth_paratuck(&m).unwrap();
        assert!(relative_error_slice(synth_parafac(&p).unwrap().data(), x.data()) < 1e-12);
    }

    #[test]
    fn paratuck2_equivalence() {
        let m = random_model(3, &[3, 2, 4], &[2, 2], &[]);
        let p = paratuck2_to_parafac3(&m).unwrap();
        let x = synth_paratuck(&m).unwrap();
        assert!(relative_error_slice(synth_parafac(&p).unwrap().data(), x.data()) < 1e-12);
        let (g1, g2) = paratuck2_core_forms(&m).unwrap();
        assert!(relative_error(&g1, &g2) < 1e-12);
        let tucker = TuckerModel::new(paratuck2_mode_product_core(&m).unwrap(), m.factors.clone()).unwrap();
        assert!(relative_error_slice(synth_tucker(&tucker).unwrap().data(), x.data()) < 1e-12);
    }

    #[test]
    fn paratuck2_unit_input() {
        let mut m = random_model(4, &[3, 2, 4], &[2, 3], &[]);
        m.input = DenseTensor::filled(&[2, 3], 1.0).unwrap();
        let p = paratuck2_to_parafac3(&m).unwrap();
        assert!(relative_error(&p.factors[2], &allocation_matrix(&m).unwrap()) < 1e-15);
    }

    #[test]
    fn general_matches_oracle() {
        let m = random_model(5, &[2, 2, 2, 2], &[2, 2, 2], &[2]);
        let p = paratuck_general_to_parafac(&m).unwrap();
        let oracle = DenseTensor::from_fn(&[2, 2, 2, 2, 2], |i| {
            let mut s = 0.0;
            for r1 in 0..2 {
                for r2 in 0..2 {
                    for r3 in 0..2 {
                        let r = [r1, r2, r3];
                        let mut t = *m.input.get0(&[r1, r2, r3, i[4] - 1]);
                        for n in 0..3 {
                            t *= m.factors[n][(i[n] - 1, r[n])] * m.constraints[n][(r[n], i[3] - 1)];
                        }
                        s += t;
                    }
                }
            }
            s
        })
        .unwrap();
        assert!(relative_error_slice(synth_parafac(&p).unwrap().data(), oracle.data()) < 1e-12);
        let n24 = random_model(6, &[2, 3, 2], &[2, 2], &[3]);
        assert_eq!(paratuck_general_to_parafac(&n24).unwrap(), paratuck24_to_parafac4(&n24).unwrap());
        let longer = random_model(7, &[2, 2, 2], &[2, 2], &[2, 2]);
        assert!(matches!(paratuck_general_to_parafac(&longer), Err(Error::Unsupported(_))));
    }

    #[test]
    fn tucker23_rewriting() {
        let mut rng = seeded_rng(8);
        let m = TuckerModel::<f64>::new(random_tensor(&[2, 3, 4], &mut rng), vec![random_matrix(3, 2, &mut rng), random_matrix(2, 3, &mut rng)]).unwrap();
        let p = tucker23_to_parafac3(&m).unwrap();
        assert!(relative_error_slice(synth_parafac(&p).unwrap().data(), synth_tucker(&m).unwrap().data()) < 1e-12);
    }

    #[test]
    fn extension_tensors() {
        assert!(verify_extension_tensors(&random_model(9, &[3, 2, 4], &[2, 3], &[2])));
        let tiny = random_model(10, &[1, 1, 1], &[1, 1], &[1]);
        assert!(verify_extension_tensors(&tiny));
        let m = random_model(11, &[3, 2, 4], &[2, 2], &[2]);
        let mut bad: DMatrix<f64> = psi_constraints(&[2, 2], 1).unwrap();
        bad[(0, 1)] = 0.0;
        bad[(1, 1)] = 1.0;
        assert!(!verify_extension_tensors_with(&m, &bad, &psi_constraints(&[2, 2], 2).unwrap()));
        assert!(!verify_extension_tensors(&random_model(12, &[2, 2, 2], &[2, 2], &[])));
    }
}
