use nalgebra::DMatrix;

use crate::error::{shape, Result};
use crate::models::ParafacModel;
use crate::scalar::Scalar;

/// `|<u, v>| / (||u|| ||v||)`, 0 when either column is zero.
fn cosine<T: Scalar>(a: &DMatrix<T>, i: usize, b: &DMatrix<T>, j: usize) -> f64 {
    let (u, v) = (a.column(i), b.column(j));
    let den = T::real_to_f64(u.norm()) * T::real_to_f64(v.norm());
    if den == 0.0 {
        return 0.0;
    }
    u.dotc(&v).abs_f64() / den
}

/// Mean over matched components of the product of per-mode absolute
/// congruences. Components are paired greedily on the largest product, with
/// one permutation shared by all modes. 1 means equal up to permutation and
/// scaling.
pub fn factor_congruence<T: Scalar>(est: &ParafacModel<T>, truth: &ParafacModel<T>) -> Result<f64> {
    if est.dims() != truth.dims() || est.rank() != truth.rank() {
        return Err(shape(format!(
            "estimate has dims {:?} and rank {}, truth has {:?} and {}",
            est.dims(),
            est.rank(),
            truth.dims(),
            truth.rank()
        )));
    }
    let r = est.rank();
    let mut scores = DMatrix::from_element(r, r, 1.0f64);
    for (a, b) in est.factors.iter().zip(&truth.factors) {
        for i in 0..r {
            for j in 0..r {
                scores[(i, j)] *= cosine(a, i, b, j);
            }
        }
    }
    let mut free_rows: Vec<usize> = (0..r).collect();
    let mut free_cols: Vec<usize> = (0..r).collect();
    let mut total = 0.0;
    while !free_rows.is_empty() {
        let (mut bi, mut bj, mut best) = (0, 0, -1.0);
        for (pi, &i) in free_rows.iter().enumerate() {
            for (pj, &j) in free_cols.iter().enumerate() {
                if scores[(i, j)] > best {
                    (bi, bj, best) = (pi, pj, scores[(i, j)]);
                }
            }
        }
        total += best;
        free_rows.swap_remove(bi);
        free_cols.swap_remove(bj);
    }
    Ok(total / r as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, seeded_rng};

    fn random_model(seed: u64) -> ParafacModel<f64> {
        let mut rng = seeded_rng(seed);
        ParafacModel::new((0..3).map(|_| random_matrix(8, 3, &mut rng)).collect(), None).unwrap()
    }

    #[test]
    fn identical_and_gauge_equivalent() {
        let m = random_model(1);
        assert!((factor_congruence(&m, &m).unwrap() - 1.0).abs() < 1e-12);
        let perm = [2, 0, 1];
        let scales = [[2.0, -0.5, 4.0], [0.25, 3.0, -1.0], [2.0, -2.0 / 3.0, -0.25]];
        let factors = m
            .factors
            .iter()
            .zip(&scales)
            .map(|(a, s)| DMatrix::from_fn(8, 3, |i, j| a[(i, perm[j])] * s[j]))
            .collect();
        let g = ParafacModel::new(factors, None).unwrap();
        assert!((factor_congruence(&g, &m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unrelated_models_score_low() {
        let below = (0..50)
            .filter(|&s| factor_congruence(&random_model(100 + s), &random_model(1000 + s)).unwrap() < 0.9)
            .count();
        assert_eq!(below, 50);
    }

    #[test]
    fn shape_mismatch() {
        let mut rng = seeded_rng(2);
        let a = random_model(3);
        let b = ParafacModel::new((0..3).map(|_| random_matrix(8, 2, &mut rng)).collect(), None).unwrap();
        assert!(factor_congruence(&a, &b).is_err());
    }
}
