use itertools::Itertools;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::scalar::Scalar;

/// Largest column count accepted by the exhaustive subset search.
pub const K_RANK_MAX_COLUMNS: usize = 12;

/// Kruskal rank: the largest `k` such that every set of `k` columns is
/// linearly independent. A matrix with an all-zero column has k-rank 0.
///
/// Full column-rank input returns immediately; otherwise subsets are tested
/// exhaustively, which is refused above [`K_RANK_MAX_COLUMNS`] columns.
pub fn k_rank<T: Scalar>(a: &DMatrix<T>) -> Result<usize> {
    let cols = a.ncols();
    if cols == 0 {
        return Ok(0);
    }
    if a.column_iter().any(|c| c.iter().all(|v| v.is_zero())) {
        return Ok(0);
    }
    let rank = numerical_rank(a);
    if rank == cols {
        return Ok(cols);
    }
    if cols > K_RANK_MAX_COLUMNS {
        return Err(Error::Unsupported(format!(
            "k-rank of a rank-deficient matrix with {cols} columns (limit {K_RANK_MAX_COLUMNS})"
        )));
    }
    for k in 1..=rank {
        let all_independent = (0..cols)
            .combinations(k)
            .all(|subset| numerical_rank(&a.select_columns(subset.iter())) == k);
        if !all_independent {
            return Ok(k - 1);
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, seeded_rng};

    #[test]
    fn basic_cases() {
        assert_eq!(k_rank(&DMatrix::<f64>::identity(3, 3)).unwrap(), 3);
        let mut rng = seeded_rng(1);
        let a: DMatrix<f64> = random_matrix(6, 4, &mut rng);
        assert_eq!(k_rank(&a).unwrap(), 4);
        let mut dup = a.clone();
        dup.set_column(3, &a.column(1));
        assert_eq!(k_rank(&dup).unwrap(), 1);
        let wide: DMatrix<f64> = random_matrix(3, 6, &mut rng);
        assert_eq!(k_rank(&wide).unwrap(), 3);
    }

    #[test]
    fn zero_column_and_proportional() {
        let z = DMatrix::<f64>::from_row_slice(2, 2, &[1., 0., 0., 0.]);
        assert_eq!(k_rank(&z).unwrap(), 0);
        let p = DMatrix::<f64>::from_row_slice(2, 3, &[1., 2., 0., 1., 2., 1.]);
        assert_eq!(k_rank(&p).unwrap(), 1);
    }

    #[test]
    fn dependent_triple() {
        let mut rng = seeded_rng(2);
        let mut a: DMatrix<f64> = random_matrix(5, 4, &mut rng);
        let s = a.column(0) + a.column(1);
        a.set_column(2, &s);
        assert_eq!(numerical_rank(&a), 3);
        assert_eq!(k_rank(&a).unwrap(), 2);
    }

    #[test]
    fn refuses_large_deficient() {
        let a = DMatrix::<f64>::from_element(2, 13, 1.0);
        assert!(k_rank(&a).is_err());
        assert_eq!(k_rank(&DMatrix::<f64>::identity(14, 14)).unwrap(), 14);
    }
}
