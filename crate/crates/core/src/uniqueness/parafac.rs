use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{k_rank, UniquenessReport, Verdict};
use crate::error::{shape, Error, Result};
use crate::kron::kron2;
use crate::linalg::{diag, is_full_column_rank, numerical_rank};
use crate::models::ConfacModel;
use crate::random::seeded_rng;
use crate::scalar::Scalar;
use crate::tensor::{matricize, ModePartition};

fn common_rank<T: Scalar>(factors: &[&DMatrix<T>]) -> Result<usize> {
    let r = factors.first().map(|a| a.ncols()).ok_or_else(|| Error::Arity("no factors".into()))?;
    if let Some(n) = factors.iter().position(|a| a.ncols() != r) {
        return Err(shape(format!(
            "factor {} has {} columns, factor 1 has {}",
            n + 1,
            factors[n].ncols(),
            r
        )));
    }
    Ok(r)
}

/// `sum_n k(A^(n)) >= 2R + N - 1`, with the generic variant
/// (`k = min(I_n, R)`) attached as a related report.
pub fn kruskal_check<T: Scalar>(factors: &[DMatrix<T>]) -> Result<UniquenessReport> {
    let refs: Vec<&DMatrix<T>> = factors.iter().collect();
    let r = common_rank(&refs)? as i64;
    let k_ranks = factors.iter().map(k_rank).collect::<Result<Vec<_>>>()?;
    let n = factors.len() as i64;
    let lhs: i64 = k_ranks.iter().map(|&k| k as i64).sum();
    let mut report = UniquenessReport::from_margin("kruskal", lhs - (2 * r + n - 1));
    report.k_ranks = k_ranks;
    report.ranks = factors.iter().map(numerical_rank).collect();
    let dims: Vec<usize> = factors.iter().map(|a| a.nrows()).collect();
    report.related.push(kruskal_generic_check(&dims, r as usize));
    Ok(report)
}

/// Kruskal's condition with every factor assumed generic:
/// `sum_n min(I_n, R) >= 2R + N - 1`.
pub fn kruskal_generic_check(dims: &[usize], r: usize) -> UniquenessReport {
    let k_ranks: Vec<usize> = dims.iter().map(|&i| i.min(r)).collect();
    let lhs: i64 = k_ranks.iter().map(|&k| k as i64).sum();
    let mut report = UniquenessReport::from_margin("kruskal_generic", lhs - (2 * r as i64 + dims.len() as i64 - 1));
    report.k_ranks = k_ranks;
    report
}

/// Third-order PARAFAC with full column-rank `c`: `k_A, k_B >= 2` and
/// `r_A + k_B >= R + 2` or `r_B + k_A >= R + 2`. The stricter
/// `k_A + k_B >= R + 2` is attached as a related report.
pub fn relaxed_third_order_check<T: Scalar>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    c: &DMatrix<T>,
) -> Result<UniquenessReport> {
    let r = common_rank(&[a, b, c])?;
    if !is_full_column_rank(c) {
        return Err(Error::Precondition(format!(
            "third factor has rank {} < R = {r}",
            numerical_rank(c)
        )));
    }
    let (ka, kb) = (k_rank(a)? as i64, k_rank(b)? as i64);
    let (ra, rb) = (numerical_rank(a) as i64, numerical_rank(b) as i64);
    let target = r as i64 + 2;
    let margin = (ka - 2).min(kb - 2).min((ra + kb - target).max(rb + ka - target));
    let mut report = UniquenessReport::from_margin("relaxed_third_order", margin);
    report.k_ranks = vec![ka as usize, kb as usize, r];
    report.ranks = vec![ra as usize, rb as usize, r];
    let mut strict = UniquenessReport::from_margin("kruskal_full_rank_third", ka + kb - target);
    strict.k_ranks = vec![ka as usize, kb as usize];
    report.related.push(strict);
    Ok(report)
}

/// `r(Ā) + k(B) + k(C) >= 2R + 2` for a factor `Ā` with collinear columns.
pub fn unimode_check<T: Scalar>(abar: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>) -> Result<UniquenessReport> {
    let r = common_rank(&[abar, b, c])? as i64;
    if let Some(j) = abar.column_iter().position(|col| col.iter().all(|v| v.is_zero())) {
        return Err(Error::Precondition(format!("column {} of the collinear factor is zero", j + 1)));
    }
    let ra = numerical_rank(abar);
    let (kb, kc) = (k_rank(b)?, k_rank(c)?);
    let mut report = UniquenessReport::from_margin("unimode", (ra + kb + kc) as i64 - (2 * r + 2));
    report.k_ranks = vec![kb, kc];
    report.ranks = vec![ra];
    Ok(report)
}

/// `N_i = rank(Φ^(2) diag(Φ^(1)_{i.}) Φ^(3)T)` for `i = 1..R_1`.
pub fn paralind_ni<T: Scalar>(phi1: &DMatrix<T>, phi2: &DMatrix<T>, phi3: &DMatrix<T>) -> Result<Vec<usize>> {
    common_rank(&[phi1, phi2, phi3])?;
    Ok((0..phi1.nrows())
        .map(|i| {
            let d = DVector::from_iterator(phi1.ncols(), phi1.row(i).iter().copied());
            numerical_rank(&(phi2 * diag(&d) * phi3.transpose()))
        })
        .collect())
}

const SUPPORT_CAP: usize = 3;

/// Sampled test of the PARALIND condition for the first factor of a
/// third-order model: every `d` with at least two nonzeros must give
/// `rank(B Φ^(2) diag(d^T Φ^(1)) (C Φ^(3))^T) > max_i N_i`.
///
/// All supports of size 2..=3 are visited with unit entries, then `trials`
/// random vectors (sparse and dense) are drawn. The verdict is `Fails` with a
/// witness, or `NotFalsified`.
pub fn paralind_condition_probe<T: Scalar>(m: &ConfacModel<T>, trials: usize, seed: u64) -> Result<UniquenessReport> {
    if m.order() != 3 {
        return Err(Error::Arity(format!("probe needs a third-order model, got order {}", m.order())));
    }
    let phis = m.full_constraints();
    let (a, b, c) = (&m.factors[0], &m.factors[1], &m.factors[2]);
    if !is_full_column_rank(a) {
        return Err(Error::Precondition("first factor is not full column rank".into()));
    }
    let g = matricize(&m.core(), &ModePartition::new(vec![2, 3], vec![1]))?;
    if !is_full_column_rank(&(kron2(b, c) * g)) {
        return Err(Error::Precondition("(B ⊗ C) G is not full column rank".into()));
    }
    let ni = paralind_ni(&phis[0], &phis[1], &phis[2])?;
    let bound = ni.iter().copied().max().unwrap_or(0);
    let r1 = phis[0].nrows();
    let left = b * &phis[1];
    let right = (c * &phis[2]).transpose();
    let falsifies = |d: &[f64]| {
        let dt = DVector::from_iterator(r1, d.iter().map(|&v| T::from_re(v)));
        let weights = (dt.transpose() * &phis[0]).transpose();
        numerical_rank(&(&left * diag(&weights) * &right)) <= bound
    };

    let mut report = UniquenessReport::new("paralind", Verdict::NotFalsified);
    report.ranks = ni;
    report.notes.push(format!("bound max N_i = {bound}"));
    if r1 < 2 {
        report.notes.push("R_1 = 1: every d has at most one nonzero".into());
        return Ok(report);
    }
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for size in 2..=SUPPORT_CAP.min(r1) {
        for support in itertools::Itertools::combinations(0..r1, size) {
            let mut d = vec![0.0; r1];
            support.iter().for_each(|&i| d[i] = 1.0);
            candidates.push(d);
        }
    }
    let mut rng = seeded_rng(seed);
    for t in 0..trials {
        let mut d = vec![0.0; r1];
        if t % 2 == 0 {
            let size = rng.random_range(2..=SUPPORT_CAP.min(r1));
            for i in sample(&mut rng, r1, size) {
                d[i] = rng.sample(StandardNormal);
            }
        } else {
            d.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        }
        candidates.push(d);
    }
    let checked = candidates.len();
    if let Some(d) = candidates.into_iter().find(|d| d.iter().filter(|v| **v != 0.0).count() >= 2 && falsifies(d)) {
        report.verdict = Verdict::Fails;
        report.witness = Some(d);
    } else {
        report.notes.push(format!("{checked} vectors checked"));
    }
    Ok(report)
}
