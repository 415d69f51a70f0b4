use nalgebra::DMatrix;

use super::{FitReport, StopReason};
use crate::error::{shape, Error, Result};
use crate::kron::{khatri_rao2, kron2};
use crate::linalg::{dependent_columns, is_full_column_rank, lstsq, relative_error};
use crate::scalar::Scalar;
use crate::tensor::{matricize, DenseTensor, ModePartition};

/// Best `A ⊗ B` approximation of `k` in the Frobenius norm, with `A` of shape
/// `shape1` and `B` of shape `shape2`. The block rearrangement
/// `R = vec(A) vec(B)^T` is reduced to its dominant singular pair. `A` comes
/// back with unit Frobenius norm and a nonnegative real leading entry.
pub fn nearest_kron_factor<T: Scalar>(
    k: &DMatrix<T>,
    shape1: (usize, usize),
    shape2: (usize, usize),
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let (m1, n1) = shape1;
    let (m2, n2) = shape2;
    if k.shape() != (m1 * m2, n1 * n2) {
        return Err(shape(format!(
            "{}x{} matrix cannot split into {m1}x{n1} ⊗ {m2}x{n2}",
            k.nrows(),
            k.ncols()
        )));
    }
    // Row (i1, j1) in column-major order of A, column (i2, j2) likewise for B.
    let rearranged = DMatrix::from_fn(m1 * n1, m2 * n2, |p, q| {
        let (i1, j1) = (p % m1, p / m1);
        let (i2, j2) = (q % m2, q / m2);
        k[(i1 * m2 + i2, j1 * n2 + j2)]
    });
    let svd = rearranged.svd(true, true);
    let (best, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, s)| (i, T::real_to_f64(s.clone())))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let u = svd.u.as_ref().unwrap().column(best).into_owned();
    let v = svd.v_t.as_ref().unwrap().row(best).transpose();
    let mut a = DMatrix::from_column_slice(m1, n1, u.as_slice());
    let mut b = DMatrix::from_column_slice(m2, n2, (v * T::from_re(sigma.max(0.0))).as_slice());
    if let Some(lead) = a.iter().copied().find(|x| x.abs_f64() > 0.0) {
        let phase = lead / T::from_re(lead.abs_f64());
        a *= phase.conjugate();
        b *= phase;
    }
    Ok((a, b))
}

/// Known-`Φ`, known-`C` receiver for PARATUCK-(2,4): least squares for
/// `K = A^(1) ⊗ A^(2)` in `X_{I1I2 x I3I4} = K (F ⋄ D)^T`, followed by the
/// nearest Kronecker split.
pub fn paratuck24_kron_ls<T: Scalar>(
    x: &DenseTensor<T>,
    phi1: &DMatrix<T>,
    phi2: &DMatrix<T>,
    c: &DenseTensor<T>,
) -> Result<(DMatrix<T>, DMatrix<T>, FitReport)> {
    if x.order() != 4 || c.order() != 3 {
        return Err(Error::Arity(format!(
            "expected a 4-way tensor and a 3-way input, got orders {} and {}",
            x.order(),
            c.order()
        )));
    }
    let (r1, r2) = (phi1.nrows(), phi2.nrows());
    let d = x.dims();
    if phi1.ncols() != d[2] || phi2.ncols() != d[2] || c.dims() != [r1, r2, d[3]] {
        return Err(shape(format!(
            "Φ shapes {:?}, {:?} and input dims {:?} do not fit tensor dims {:?}",
            phi1.shape(),
            phi2.shape(),
            c.dims(),
            d
        )));
    }
    let f = khatri_rao2(phi1, phi2)?.transpose();
    let dmat = matricize(c, &ModePartition::new(vec![3], vec![1, 2]))?;
    let design = khatri_rao2(&f, &dmat)?;
    if !is_full_column_rank(&design) {
        let columns: Vec<usize> = dependent_columns(&design).into_iter().map(|j| j + 1).collect();
        return Err(Error::Identifiability {
            message: format!("(F ⋄ D) has rank below {}", r1 * r2),
            columns,
        });
    }
    let xm = matricize(x, &ModePartition::new(vec![1, 2], vec![3, 4]))?;
    let ls = lstsq(&design, &xm.transpose())?;
    let k = ls.solution.transpose();
    let (a1, a2) = nearest_kron_factor(&k, (d[0], r1), (d[1], r2))?;
    let err = relative_error(&(kron2(&a1, &a2) * design.transpose()), &xm);
    let report = FitReport {
        iterations: 1,
        rel_error_history: vec![err],
        converged: true,
        stop_reason: StopReason::Tolerance,
        regularized: ls.regularized,
        start: 0,
    };
    Ok((a1, a2, report))
}

/// Unit Frobenius norm and nonnegative real leading entry, the gauge used by
/// [`nearest_kron_factor`].
pub fn kron_gauge<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    let norm = T::from_re(crate::linalg::frobenius_norm(a));
    let mut out = a.map(|v| v / norm);
    if let Some(lead) = out.iter().copied().find(|x| x.abs_f64() > 0.0) {
        out *= (lead / T::from_re(lead.abs_f64())).conjugate();
    }
    out
}
