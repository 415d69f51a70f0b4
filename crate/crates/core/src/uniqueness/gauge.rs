use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{shape, Error, Result};
use crate::linalg::{checked_inverse, relative_error_slice};
use crate::models::{synth_parafac, ParafacModel, TuckerModel};
use crate::random::{random_matrix, random_vector};
use crate::scalar::Scalar;
use crate::tensor::mode_n_product;

/// Condition number above which a gauge matrix counts as singular.
const MAX_GAUGE_CONDITION: f64 = 1e12;

/// Replaces `A^(n)` by `A^(n) T^(n)` and the core by `G x_n (T^(n))^-1`.
pub fn tucker_gauge_transform<T: Scalar>(m: &TuckerModel<T>, t: &[DMatrix<T>]) -> Result<TuckerModel<T>> {
    if t.len() != m.active() {
        return Err(Error::Arity(format!("{} gauge matrices for {} factors", t.len(), m.active())));
    }
    let mut core = m.core.clone();
    let mut factors = Vec::with_capacity(t.len());
    for (n, (a, tn)) in m.factors.iter().zip(t).enumerate() {
        if tn.nrows() != a.ncols() || !tn.is_square() {
            return Err(shape(format!(
                "gauge {} is {}x{}, factor has {} columns",
                n + 1,
                tn.nrows(),
                tn.ncols(),
                a.ncols()
            )));
        }
        let inv = checked_inverse(tn, MAX_GAUGE_CONDITION)?;
        core = mode_n_product(&core, &inv, n + 1)?;
        factors.push(a * tn);
    }
    TuckerModel::new(core, factors)
}

/// Fourth-order PARAFAC model whose first two factors end with the same
/// column twice: `A = [A_1 a a]`, `B = [B_1 b b]`, `C = [C_1 C_2]`,
/// `D = [D_1 D_2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedColumnModel<T: Scalar> {
    pub a1: DMatrix<T>,
    pub a: DVector<T>,
    pub b1: DMatrix<T>,
    pub b: DVector<T>,
    pub c1: DMatrix<T>,
    pub c2: DMatrix<T>,
    pub d1: DMatrix<T>,
    pub d2: DMatrix<T>,
}

/// Block that receives the 2x2 transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationTarget {
    /// `(C_2, D_2)`, the columns paired with the repeated ones.
    Shared,
    /// The first two columns of `(C_1, D_1)`.
    Distinct,
}

impl<T: Scalar> SharedColumnModel<T> {
    /// Random instance of dims `[I, J, K, L]` with `r >= 2` components.
    pub fn random<R: Rng + ?Sized>(dims: [usize; 4], r: usize, rng: &mut R) -> Self {
        assert!(r >= 2, "shared-column model needs R >= 2");
        let [i, j, k, l] = dims;
        SharedColumnModel {
            a1: random_matrix(i, r - 2, rng),
            a: random_vector(i, rng),
            b1: random_matrix(j, r - 2, rng),
            b: random_vector(j, rng),
            c1: random_matrix(k, r - 2, rng),
            c2: random_matrix(k, 2, rng),
            d1: random_matrix(l, r - 2, rng),
            d2: random_matrix(l, 2, rng),
        }
    }

    pub fn to_parafac(&self) -> ParafacModel<T> {
        let repeated = |m: &DMatrix<T>, v: &DVector<T>| {
            let mut out = m.clone().insert_columns(m.ncols(), 2, T::zero());
            out.set_column(m.ncols(), v);
            out.set_column(m.ncols() + 1, v);
            out
        };
        let joined = |x: &DMatrix<T>, y: &DMatrix<T>| {
            let mut out = x.clone().insert_columns(x.ncols(), y.ncols(), T::zero());
            out.columns_mut(x.ncols(), y.ncols()).copy_from(y);
            out
        };
        ParafacModel::new(
            vec![
                repeated(&self.a1, &self.a),
                repeated(&self.b1, &self.b),
                joined(&self.c1, &self.c2),
                joined(&self.d1, &self.d2),
            ],
            None,
        )
        .expect("blocks have conforming shapes")
    }

    /// `(X T, Y T^-T)` applied to the chosen block of `(C, D)`.
    pub fn rotated(&self, t: &DMatrix<T>, target: RotationTarget) -> Result<Self> {
        if t.shape() != (2, 2) {
            return Err(shape(format!("rotation must be 2x2, got {}x{}", t.nrows(), t.ncols())));
        }
        let inv_t = checked_inverse(t, MAX_GAUGE_CONDITION)?.transpose();
        let mut out = self.clone();
        match target {
            RotationTarget::Shared => {
                out.c2 = &self.c2 * t;
                out.d2 = &self.d2 * inv_t;
            }
            RotationTarget::Distinct => {
                if self.c1.ncols() < 2 {
                    return Err(shape("distinct block needs R >= 4".to_string()));
                }
                let c = self.c1.columns(0, 2) * t;
                let d = self.d1.columns(0, 2) * inv_t;
                out.c1.columns_mut(0, 2).copy_from(&c);
                out.d1.columns_mut(0, 2).copy_from(&d);
            }
        }
        Ok(out)
    }
}

/// True when rotating the chosen block by `t` leaves every slice
/// `X_{ij..} = C D_j(B) D_i(A) D^T` unchanged to within `1e-10`.
pub fn rotational_indeterminacy_demo<T: Scalar>(
    m: &SharedColumnModel<T>,
    t: &DMatrix<T>,
    target: RotationTarget,
) -> Result<bool> {
    let x = synth_parafac(&m.to_parafac())?;
    let y = synth_parafac(&m.rotated(t, target)?.to_parafac())?;
    Ok(relative_error_slice(y.data(), x.data()) <= 1e-10)
}
