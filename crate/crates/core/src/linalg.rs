//! Dense linear-algebra helpers built on nalgebra's SVD.
//!
//! Every rank decision in the crate goes through [`rank_tolerance`]: singular
//! values at or below `max(rows, cols) * eps * sigma_max` count as zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tikhonov floor used when a least-squares system is numerically singular.
pub const TIKHONOV_FLOOR: f64 = 1e-12;

pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().map(|s| T::real_to_f64(s.clone())).collect()
}

/// Zero threshold for singular values of an `rows x cols` matrix.
pub fn rank_tolerance<T: Scalar>(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * T::real_to_f64(T::epsilon()) * sigma_max
}

fn rank_from_values<T: Scalar>(values: &[f64], rows: usize, cols: usize) -> usize {
    let sigma_max = values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let tol = rank_tolerance::<T>(rows, cols, sigma_max);
    values.iter().filter(|&&s| s > tol).count()
}

/// Numerical rank under the crate-wide SVD threshold.
pub fn numerical_rank<T: Scalar>(m: &DMatrix<T>) -> usize {
    rank_from_values::<T>(&singular_values(m), m.nrows(), m.ncols())
}

pub fn is_full_column_rank<T: Scalar>(m: &DMatrix<T>) -> bool {
    numerical_rank(m) == m.ncols()
}

pub fn is_full_row_rank<T: Scalar>(m: &DMatrix<T>) -> bool {
    numerical_rank(m) == m.nrows()
}

/// 2-norm condition number. Infinite for rank-deficient input.
pub fn condition_number<T: Scalar>(m: &DMatrix<T>) -> f64 {
    let values = singular_values(m);
    let max = values.iter().cloned().fold(0.0, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 || values.len() < m.ncols().min(m.nrows()) {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Columns (0-based) that do not raise the rank when scanned left to right.
pub fn dependent_columns<T: Scalar>(m: &DMatrix<T>) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..m.ncols() {
        let mut trial = kept.clone();
        trial.push(j);
        let sub = m.select_columns(trial.iter());
        if numerical_rank(&sub) == trial.len() {
            kept = trial;
        } else {
            dependent.push(j);
        }
    }
    dependent
}

pub fn frobenius_norm<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|v| v.abs_f64().powi(2)).sum::<f64>().sqrt()
}

pub fn slice_norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs_f64().powi(2)).sum::<f64>().sqrt()
}

/// `||a - b||_F / ||b||_F`, falling back to the absolute error when `b = 0`.
pub fn relative_error<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "relative_error on mismatched shapes");
    let diff = (a - b).iter().map(|v| v.abs_f64().powi(2)).sum::<f64>().sqrt();
    let base = frobenius_norm(b);
    if base == 0.0 {
        diff
    } else {
        diff / base
    }
}

/// Same as [`relative_error`] for flat slices.
pub fn relative_error_slice<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    assert_eq!(a.len(), b.len(), "relative_error_slice on mismatched lengths");
    let diff = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs_f64().powi(2))
        .sum::<f64>()
        .sqrt();
    let base = slice_norm(b);
    if base == 0.0 {
        diff
    } else {
        diff / base
    }
}

/// Solution of `min ||a x - b||_F` together with a flag telling whether the
/// Tikhonov floor had to be applied.
#[derive(Debug, Clone)]
pub struct LeastSquares<T: Scalar> {
    pub solution: DMatrix<T>,
    pub regularized: bool,
}

/// SVD least squares. When `a` is numerically column-rank deficient the
/// inverse singular values are replaced by `s / (s^2 + lambda^2)` with
/// `lambda = TIKHONOV_FLOOR * sigma_max`.
pub fn lstsq<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<LeastSquares<T>> {
    if a.nrows() != b.nrows() {
        return Err(Error::Shape(format!(
            "least squares: lhs has {} rows, rhs has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let cols = a.ncols();
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let values: Vec<f64> = svd.singular_values.iter().map(|s| T::real_to_f64(s.clone())).collect();
    let rank = rank_from_values::<T>(&values, a.nrows(), cols);
    let regularized = rank < cols;
    let sigma_max = values.iter().cloned().fold(0.0, f64::max);
    let lambda = TIKHONOV_FLOOR * sigma_max;

    let inv: Vec<f64> = values
        .iter()
        .map(|&s| {
            if regularized {
                if s == 0.0 && lambda == 0.0 {
                    0.0
                } else {
                    s / (s * s + lambda * lambda)
                }
            } else {
                1.0 / s
            }
        })
        .collect();

    // x = V diag(inv) U^H b
    let mut uhb = u.adjoint() * b;
    for (i, &w) in inv.iter().enumerate() {
        let w = T::from_re(w);
        uhb.row_mut(i).iter_mut().for_each(|v| *v *= w);
    }
    let solution = v_t.adjoint() * uhb;
    Ok(LeastSquares { solution, regularized })
}

/// Moore-Penrose pseudo-inverse with the shared rank threshold.
pub fn pseudo_inverse<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let svd = a.clone().svd(true, true);
    let values: Vec<f64> = svd.singular_values.iter().map(|s| T::real_to_f64(s.clone())).collect();
    let sigma_max = values.iter().cloned().fold(0.0, f64::max);
    let tol = rank_tolerance::<T>(rows, cols, sigma_max);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let mut uh = u.adjoint();
    for (i, &s) in values.iter().enumerate() {
        let w = if s > tol { T::from_re(1.0 / s) } else { T::zero() };
        uh.row_mut(i).iter_mut().for_each(|v| *v *= w);
    }
    v_t.adjoint() * uh
}

/// Inverse of a square matrix, refusing ill-conditioned input.
pub fn checked_inverse<T: Scalar>(m: &DMatrix<T>, max_condition: f64) -> Result<DMatrix<T>> {
    if !m.is_square() {
        return Err(Error::Shape(format!("inverse of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let cond = condition_number(m);
    if cond.is_nan() || cond > max_condition {
        return Err(Error::Singular(format!(
            "condition number {cond:.3e} exceeds {max_condition:.1e}"
        )));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("matrix is not invertible".into()))
}

pub fn diag<T: Scalar>(v: &DVector<T>) -> DMatrix<T> {
    DMatrix::from_diagonal(v)
}

/// `D_i(A)`: diagonal matrix built from row `i` (0-based) of `a`.
pub fn row_diag<T: Scalar>(a: &DMatrix<T>, i: usize) -> DMatrix<T> {
    DMatrix::from_fn(a.ncols(), a.ncols(), |r, c| if r == c { a[(i, r)] } else { T::zero() })
}

pub fn ones<T: Scalar>(rows: usize, cols: usize) -> DMatrix<T> {
    DMatrix::from_element(rows, cols, T::one())
}
