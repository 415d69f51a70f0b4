use nalgebra::DMatrix;

use super::{FitOptions, FitReport, Init, StopReason};
use crate::error::{shape, Error, Result};
use crate::kron::khatri_rao;
use crate::linalg::{frobenius_norm, lstsq};
use crate::models::{ConfacModel, ParafacModel};
use crate::random::{random_matrix, seeded_rng};
use crate::scalar::Scalar;
use crate::tensor::{matricize, DenseTensor, ModePartition};

/// Errors below this many machine epsilons end the iteration.
const FLOOR_EPS: f64 = 64.0;

struct AlsOutput<T: Scalar> {
    factors: Vec<DMatrix<T>>,
    report: FitReport,
}

/// Cyclic Khatri-Rao product of the constrained factors other than `n`
/// (0-based), matching the flat mode-`n` unfolding.
fn others<T: Scalar>(bars: &[DMatrix<T>], n: usize) -> Result<DMatrix<T>> {
    let order = bars.len();
    let picked: Vec<DMatrix<T>> = (1..order).map(|k| bars[(n + k) % order].clone()).collect();
    khatri_rao(&picked)
}

fn constrained<T: Scalar>(a: &DMatrix<T>, phi: &Option<DMatrix<T>>) -> DMatrix<T> {
    match phi {
        Some(p) => a * p,
        None => a.clone(),
    }
}

/// ALS on `X_n = A^(n) Φ^(n) Z_n^T`, `Z_n` the cyclic Khatri-Rao product of
/// the other constrained factors. `ranks[n]` is the column count of `A^(n)`.
fn als_core<T: Scalar>(
    x: &DenseTensor<T>,
    phis: &[Option<DMatrix<T>>],
    ranks: &[usize],
    opts: &FitOptions<T>,
) -> Result<AlsOutput<T>> {
    let order = x.order();
    if order < 3 {
        return Err(Error::Arity(format!("ALS needs order >= 3, got {order}")));
    }
    if opts.max_iters == 0 || opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Precondition("max_iters >= 1 and tol > 0 required".into()));
    }
    let unfoldings = (1..=order)
        .map(|n| matricize(x, &ModePartition::mode_n(n, order)).map(|m| m.transpose()))
        .collect::<Result<Vec<_>>>()?;
    let norm_x = frobenius_norm(&unfoldings[0]).max(f64::MIN_POSITIVE);

    let starts: Vec<Vec<DMatrix<T>>> = match &opts.init {
        Init::Random => {
            let mut rng = seeded_rng(opts.seed);
            (0..opts.restarts.max(1))
                .map(|_| (0..order).map(|n| random_matrix(x.dim(n + 1), ranks[n], &mut rng)).collect())
                .collect()
        }
        Init::Given(f) => {
            if f.len() != order || f.iter().enumerate().any(|(n, a)| a.shape() != (x.dim(n + 1), ranks[n])) {
                return Err(shape("initial factors do not match the tensor dims and ranks"));
            }
            vec![f.clone()]
        }
    };
    let mut best: Option<AlsOutput<T>> = None;
    for (k, init) in starts.into_iter().enumerate() {
        let mut out = sweeps(&unfoldings, norm_x, phis, init, opts)?;
        out.report.start = k;
        if best.as_ref().is_none_or(|b| out.report.final_error() < b.report.final_error()) {
            best = Some(out);
        }
    }
    Ok(best.expect("at least one start"))
}

fn sweeps<T: Scalar>(
    unfoldings: &[DMatrix<T>],
    norm_x: f64,
    phis: &[Option<DMatrix<T>>],
    mut factors: Vec<DMatrix<T>>,
    opts: &FitOptions<T>,
) -> Result<AlsOutput<T>> {
    let order = unfoldings.len();
    let mut bars: Vec<DMatrix<T>> = factors.iter().zip(phis).map(|(a, p)| constrained(a, p)).collect();

    let floor = FLOOR_EPS * T::real_to_f64(T::epsilon());
    let mut history = Vec::new();
    let mut regularized = false;
    let mut stop = StopReason::MaxIters;
    for _ in 0..opts.max_iters {
        let mut residual = 0.0;
        for n in 0..order {
            let z = others(&bars, n)?;
            let w = match &phis[n] {
                Some(p) => &z * p.transpose(),
                None => z.clone(),
            };
            let ls = lstsq(&w, &unfoldings[n])?;
            regularized |= ls.regularized;
            factors[n] = ls.solution.transpose();
            bars[n] = constrained(&factors[n], &phis[n]);
            if n == order - 1 {
                residual = frobenius_norm(&(&unfoldings[n] - z * bars[n].transpose()));
            }
        }
        let err = residual / norm_x;
        let prev = history.last().copied();
        history.push(err);
        if err <= floor {
            stop = StopReason::Stall;
            break;
        }
        if let Some(p) = prev {
            if (p - err).abs() / p.max(1e-15) < opts.tol {
                stop = StopReason::Tolerance;
                break;
            }
        }
    }
    let report = FitReport {
        iterations: history.len(),
        converged: stop != StopReason::MaxIters,
        rel_error_history: history,
        stop_reason: stop,
        regularized,
        start: 0,
    };
    Ok(AlsOutput { factors, report })
}

/// Rank-`r` PARAFAC fit by alternating least squares. All but the last
/// factor come back with unit-norm columns.
pub fn als_parafac<T: Scalar>(x: &DenseTensor<T>, r: usize, opts: &FitOptions<T>) -> Result<(ParafacModel<T>, FitReport)> {
    if r == 0 {
        return Err(Error::Precondition("rank must be at least 1".into()));
    }
    let order = x.order();
    let out = als_core(x, &vec![None; order], &vec![r; order], opts)?;
    let mut factors = out.factors;
    let (head, last) = factors.split_at_mut(order - 1);
    for a in head {
        for j in 0..r {
            let norm = a.column(j).norm();
            if T::real_to_f64(norm.clone()) != 0.0 {
                a.column_mut(j).unscale_mut(norm.clone());
                last[0].column_mut(j).scale_mut(norm);
            }
        }
    }
    Ok((ParafacModel::new(factors, None)?, out.report))
}

/// CONFAC fit with known constraint matrices. Modes past `constraints.len()`
/// are unconstrained with `R` columns.
pub fn als_confac<T: Scalar>(
    x: &DenseTensor<T>,
    constraints: &[DMatrix<T>],
    opts: &FitOptions<T>,
) -> Result<(ConfacModel<T>, FitReport)> {
    let order = x.order();
    let r = constraints
        .first()
        .map(|p| p.ncols())
        .ok_or_else(|| Error::Arity("at least one constraint matrix is required".into()))?;
    if constraints.len() > order {
        return Err(Error::Arity(format!("{} constraints for an order-{order} tensor", constraints.len())));
    }
    let phis: Vec<Option<DMatrix<T>>> = (0..order)
        .map(|n| Some(constraints.get(n).cloned().unwrap_or_else(|| DMatrix::identity(r, r))))
        .collect();
    let ranks: Vec<usize> = phis.iter().map(|p| p.as_ref().unwrap().nrows()).collect();
    let out = als_core(x, &phis, &ranks, opts)?;
    let model = ConfacModel::new(out.factors, constraints.to_vec())?;
    Ok((model, out.report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::factor_congruence;
    use crate::linalg::relative_error_slice;
    use crate::models::{synth_confac, synth_parafac};
    use crate::random::random_tensor;
    use num_complex::Complex64;

    fn random_parafac<T: Scalar>(dims: &[usize], r: usize, seed: u64) -> ParafacModel<T> {
        let mut rng = seeded_rng(seed);
        ParafacModel::new(dims.iter().map(|&i| random_matrix(i, r, &mut rng)).collect(), None).unwrap()
    }

    fn monotone(h: &[f64]) -> bool {
        h.windows(2).all(|w| w[1] <= w[0] + 1e-14)
    }

    #[test]
    fn rank_one_fit() {
        let truth = random_parafac::<f64>(&[4, 3, 5], 1, 1);
        let x = synth_parafac(&truth).unwrap();
        let (m, rep) = als_parafac(&x, 1, &FitOptions { seed: 9, ..Default::default() }).unwrap();
        assert!(rep.final_error() <= 1e-10);
        assert!(rep.iterations <= 50);
        assert!(rep.converged);
        assert!(relative_error_slice(synth_parafac(&m).unwrap().data(), x.data()) < 1e-10);
    }

    #[test]
    fn recovers_generic_rank_three() {
        let truth = random_parafac::<f64>(&[8, 8, 8], 3, 2);
        let x = synth_parafac(&truth).unwrap();
        let (m, rep) = als_parafac(&x, 3, &FitOptions { seed: 3, ..Default::default() }).unwrap();
        assert!(monotone(&rep.rel_error_history));
        assert!(factor_congruence(&m, &truth).unwrap() >= 0.999);
        for a in &m.factors[..2] {
            for c in a.column_iter() {
                assert!((c.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overparameterized_fit() {
        let truth = random_parafac::<f64>(&[4, 4, 4], 2, 4);
        let x = synth_parafac(&truth).unwrap();
        let (_, rep) = als_parafac(&x, 3, &FitOptions { seed: 5, max_iters: 2000, ..Default::default() }).unwrap();
        assert!(rep.final_error() <= 1e-8, "{}", rep.final_error());
    }

    #[test]
    fn complex_fit() {
        let truth = random_parafac::<Complex64>(&[5, 4, 6], 2, 6);
        let x = synth_parafac(&truth).unwrap();
        let (m, rep) = als_parafac(&x, 2, &FitOptions { seed: 7, ..Default::default() }).unwrap();
        assert!(rep.final_error() <= 1e-9);
        assert!(factor_congruence(&m, &truth).unwrap() >= 0.999);
    }

    #[test]
    fn identity_constraints_follow_parafac() {
        let truth = random_parafac::<f64>(&[5, 4, 3], 2, 8);
        let x = synth_parafac(&truth).unwrap();
        let opts = FitOptions { seed: 11, max_iters: 40, ..Default::default() };
        let (_, a) = als_parafac(&x, 2, &opts).unwrap();
        let (_, b) = als_confac(&x, &[DMatrix::identity(2, 2), DMatrix::identity(2, 2), DMatrix::identity(2, 2)], &opts).unwrap();
        assert_eq!(a.rel_error_history, b.rel_error_history);
    }

    #[test]
    fn confac_repeated_columns() {
        let mut rng = seeded_rng(12);
        let phi1 = DMatrix::from_row_slice(2, 3, &[1., 1., 0., 0., 0., 1.]);
        let phi2 = DMatrix::from_row_slice(3, 3, &[1., 0., 0., 0., 1., 0., 0., 0., 1.]);
        let phi3 = DMatrix::from_row_slice(2, 3, &[1., 0., 1., 0., 1., 0.]);
        let truth = ConfacModel::<f64>::new(
            vec![random_matrix(5, 2, &mut rng), random_matrix(4, 3, &mut rng), random_matrix(6, 2, &mut rng)],
            vec![phi1.clone(), phi2.clone(), phi3.clone()],
        )
        .unwrap();
        let x = synth_confac(&truth).unwrap();
        let (m, rep) = als_confac(&x, &[phi1, phi2, phi3], &FitOptions { seed: 13, max_iters: 3000, ..Default::default() }).unwrap();
        assert!(monotone(&rep.rel_error_history));
        assert!(rep.final_error() <= 1e-8, "{}", rep.final_error());
        assert!(relative_error_slice(synth_confac(&m).unwrap().data(), x.data()) <= 1e-8);
    }

    #[test]
    fn restarts_keep_the_best_start() {
        let truth = random_parafac::<f64>(&[6, 5, 4], 3, 15);
        let x = synth_parafac(&truth).unwrap();
        let one = FitOptions { seed: 16, max_iters: 30, ..Default::default() };
        let (m1, r1) = als_parafac(&x, 3, &one).unwrap();
        let (m1b, r1b) = als_parafac(&x, 3, &FitOptions { restarts: 1, ..one.clone() }).unwrap();
        assert_eq!((m1, &r1), (m1b, &r1b));
        let (_, r4) = als_parafac(&x, 3, &FitOptions { restarts: 4, ..one }).unwrap();
        assert!(r4.final_error() <= r1.final_error());
        assert!(r4.start < 4);
        assert!(monotone(&r4.rel_error_history));
    }

    #[test]
    fn rejects_bad_input() {
        let mut rng = seeded_rng(14);
        let x: DenseTensor<f64> = random_tensor(&[3, 3], &mut rng);
        assert!(als_parafac(&x, 2, &FitOptions::default()).is_err());
        let y: DenseTensor<f64> = random_tensor(&[3, 3, 3], &mut rng);
        assert!(als_parafac(&y, 0, &FitOptions::default()).is_err());
        let bad = FitOptions { init: Init::Given(vec![DMatrix::zeros(3, 2)]), ..Default::default() };
        assert!(als_parafac(&y, 2, &bad).is_err());
        assert!(als_confac(&y, &[], &FitOptions::default()).is_err());
    }
}
