use nalgebra::DMatrix;

use super::{khatri_rao_modes, synth_confac, ConfacModel};
use crate::error::{shape, Error, Result};
use crate::kron::{block_diag, block_kron, BlockMatrix};
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, ModePartition};

/// `X = sum_p X^(p)` with every term a CONFAC model of the same order and
/// output dims.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockConfacModel<T: Scalar> {
    pub blocks: Vec<ConfacModel<T>>,
}

impl<T: Scalar> BlockConfacModel<T> {
    pub fn new(blocks: Vec<ConfacModel<T>>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| Error::Arity("block model needs at least one block".into()))?;
        let dims = first.dims();
        if let Some(p) = blocks.iter().position(|b| b.dims() != dims) {
            return Err(shape(format!(
                "block {} has dims {:?}, block 1 has {:?}",
                p + 1,
                blocks[p].dims(),
                dims
            )));
        }
        Ok(BlockConfacModel { blocks })
    }

    pub fn order(&self) -> usize {
        self.blocks[0].order()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks[0].dims()
    }

    /// `A^(n) = [A^(1,n) .. A^(P,n)]` (1-based `n`).
    pub fn partitioned_factor(&self, n: usize) -> BlockMatrix<T> {
        let parts: Vec<DMatrix<T>> = self.blocks.iter().map(|b| b.factors[n - 1].clone()).collect();
        BlockMatrix::from_blocks(&parts).expect("blocks share output dims")
    }
}

pub fn synth_block_confac<T: Scalar>(m: &BlockConfacModel<T>) -> Result<DenseTensor<T>> {
    let mut sum = synth_confac(&m.blocks[0])?;
    for b in &m.blocks[1..] {
        let x = synth_confac(b)?;
        let mut data = sum.into_data();
        for (s, v) in data.iter_mut().zip(x.data()) {
            *s += *v;
        }
        sum = DenseTensor::new(m.dims(), data)?;
    }
    Ok(sum)
}

/// `X_{S1;S2} = (⊗_b over S1 of A) bdiag(G^(p)_{S1;S2}) (⊗_b over S2 of A)^T`
/// with `G^(p)_{S1;S2} = (⋄_{S1} Φ^(p)) (⋄_{S2} Φ^(p))^T`.
pub fn block_confac_unfold<T: Scalar>(m: &BlockConfacModel<T>, p: &ModePartition) -> Result<DMatrix<T>> {
    p.validate_matrix(m.order())?;
    let side = |modes: &[usize]| -> Result<DMatrix<T>> {
        let parts: Vec<BlockMatrix<T>> = modes.iter().map(|&n| m.partitioned_factor(n)).collect();
        Ok(block_kron(&parts)?.mat)
    };
    let cores = m
        .blocks
        .iter()
        .map(|b| {
            let phis = b.full_constraints();
            Ok(khatri_rao_modes(&phis, &p.s1)? * khatri_rao_modes(&phis, &p.s2)?.transpose())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(side(&p.s1)? * block_diag(&cores) * side(&p.s2)?.transpose())
}

/// Block term decomposition `X = sum_p a_p ∘ (B_p C_p^T)` as a CONFAC-(1,3)
/// model: `A` has one column per block, `Φ^(1)` is block diagonal with rows
/// `1^T_{L_p}`, and the second and third factors are `[B_1 .. B_P]` and
/// `[C_1 .. C_P]`.
pub fn btd_to_confac<T: Scalar>(a: &DMatrix<T>, b_blocks: &[DMatrix<T>], c_blocks: &[DMatrix<T>]) -> Result<ConfacModel<T>> {
    let p = a.ncols();
    if b_blocks.len() != p || c_blocks.len() != p {
        return Err(shape(format!(
            "{} columns in A but {} B blocks and {} C blocks",
            p,
            b_blocks.len(),
            c_blocks.len()
        )));
    }
    for (k, (b, c)) in b_blocks.iter().zip(c_blocks).enumerate() {
        if b.ncols() != c.ncols() {
            return Err(shape(format!("block {}: B has {} columns, C has {}", k + 1, b.ncols(), c.ncols())));
        }
    }
    let widths: Vec<usize> = b_blocks.iter().map(|b| b.ncols()).collect();
    let ones: Vec<DMatrix<T>> = widths.iter().map(|&l| DMatrix::from_element(1, l, T::one())).collect();
    let phi = block_diag(&ones);
    let b = BlockMatrix::from_blocks(b_blocks)?.mat;
    let c = BlockMatrix::from_blocks(c_blocks)?.mat;
    ConfacModel::new(vec![a.clone(), b, c], vec![phi])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{relative_error, relative_error_slice};
    use crate::random::{random_matrix, seeded_rng};
    use crate::tensor::matricize;

    fn random_block(seed: u64, dims: &[usize], ranks: &[usize], r: usize) -> ConfacModel<f64> {
        let mut rng = seeded_rng(seed);
        let factors = dims.iter().zip(ranks).map(|(&i, &k)| random_matrix(i, k, &mut rng)).collect();
        let constraints = ranks.iter().map(|&k| random_matrix(k, r, &mut rng)).collect();
        ConfacModel::new(factors, constraints).unwrap()
    }

    #[test]
    fn single_block_is_confac() {
        let b = random_block(1, &[3, 2, 2], &[2, 2, 1], 3);
        let m = BlockConfacModel::new(vec![b.clone()]).unwrap();
        assert_eq!(synth_block_confac(&m).unwrap(), synth_confac(&b).unwrap());
    }

    #[test]
    fn unfolding_forms_agree() {
        let m = BlockConfacModel::new(vec![
            random_block(2, &[3, 2, 4], &[2, 2, 3], 3),
            random_block(3, &[3, 2, 4], &[1, 2, 2], 2),
        ])
        .unwrap();
        let x = synth_block_confac(&m).unwrap();
        for p in [ModePartition::mode_n(1, 3), ModePartition::new(vec![3, 1], vec![2])] {
            let compact = block_confac_unfold(&m, &p).unwrap();
            let mut summed = DMatrix::<f64>::zeros(compact.nrows(), compact.ncols());
            for b in &m.blocks {
                summed += crate::models::confac_unfold(b, &p).unwrap();
            }
            let direct = matricize(&x, &p).unwrap();
            assert!(relative_error(&compact, &direct) < 1e-12);
            assert!(relative_error(&summed, &direct) < 1e-12);
        }
    }

    #[test]
    fn two_rank_one_blocks() {
        let mut rng = seeded_rng(4);
        let mk = |rng: &mut _| -> ConfacModel<f64> {
            ConfacModel::new(
                vec![random_matrix(2, 1, rng), random_matrix(3, 1, rng), random_matrix(2, 1, rng)],
                vec![],
            )
            .unwrap()
        };
        let (b1, b2) = (mk(&mut rng), mk(&mut rng));
        let m = BlockConfacModel::new(vec![b1.clone(), b2.clone()]).unwrap();
        let x = synth_block_confac(&m).unwrap();
        let oracle = DenseTensor::from_fn(&[2, 3, 2], |i| {
            [&b1, &b2]
                .iter()
                .map(|b| (0..3).map(|n| b.factors[n][(i[n] - 1, 0)]).product::<f64>())
                .sum()
        })
        .unwrap();
        assert!(relative_error_slice(x.data(), oracle.data()) < 1e-12);
        assert!(crate::tensor::mode_n_rank(&x, 1).unwrap() <= 2);
    }

    #[test]
    fn btd_constraint_structure() {
        let mut rng = seeded_rng(5);
        let a: DMatrix<f64> = random_matrix(3, 2, &mut rng);
        let bs = vec![random_matrix(4, 1, &mut rng), random_matrix(4, 2, &mut rng)];
        let cs = vec![random_matrix(3, 1, &mut rng), random_matrix(3, 2, &mut rng)];
        let c = btd_to_confac(&a, &bs, &cs).unwrap();
        assert_eq!(c.constraints[0], DMatrix::from_row_slice(2, 3, &[1., 0., 0., 0., 1., 1.]));
        assert_eq!(c.rank(), 3);
        let x = synth_confac(&c).unwrap();
        let oracle = DenseTensor::from_fn(&[3, 4, 3], |i| {
            (0..2)
                .map(|p| {
                    let bc = &bs[p] * cs[p].transpose();
                    a[(i[0] - 1, p)] * bc[(i[1] - 1, i[2] - 1)]
                })
                .sum()
        })
        .unwrap();
        assert!(relative_error_slice(x.data(), oracle.data()) < 1e-12);
        assert!(btd_to_confac(&a, &bs[..1], &cs).is_err());
    }

    #[test]
    fn btd_single_rank_one_term() {
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 2.0]);
        let b = DMatrix::from_column_slice(2, 1, &[3.0, 1.0]);
        let c = DMatrix::from_column_slice(2, 1, &[1.0, -1.0]);
        let m = btd_to_confac(&a, &[b], &[c]).unwrap();
        let x = synth_confac(&m).unwrap();
        assert_eq!(crate::tensor::mode_n_rank(&x, 1).unwrap(), 1);
        assert_eq!(*x.get(&[2, 1, 2]).unwrap(), -6.0);
    }
}
