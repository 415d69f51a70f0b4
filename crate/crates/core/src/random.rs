//! Seeded random instances. Entries are i.i.d. standard normal; complex
//! entries have independent real and imaginary parts of variance 1/2.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Scalar;
use crate::tensor::DenseTensor;

pub type Rng64 = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_scalar<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let re: f64 = rng.sample(StandardNormal);
    if T::IS_COMPLEX {
        let im: f64 = rng.sample(StandardNormal);
        T::from_parts(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
    } else {
        T::from_re(re)
    }
}

/// Filled column by column.
pub fn random_matrix<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| random_scalar(rng))
}

pub fn random_vector<T: Scalar, R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<T> {
    DVector::from_fn(len, |_, _| random_scalar(rng))
}

/// Panics on invalid dims.
pub fn random_tensor<T: Scalar, R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DenseTensor<T> {
    DenseTensor::from_fn(dims, |_| random_scalar(rng)).expect("valid tensor dims")
}

/// Matrix with prescribed singular values `sigma`: `U diag(sigma) V^T` with
/// random orthonormal `U`, `V` (real part only is used for complex fields).
pub fn random_with_singular_values<T: Scalar, R: Rng + ?Sized>(sigma: &[f64], rng: &mut R) -> DMatrix<T> {
    let n = sigma.len();
    let q = |rng: &mut R| random_matrix::<f64, R>(n, n, rng).qr().q();
    let u = q(rng);
    let v = q(rng);
    let s = DMatrix::from_diagonal(&DVector::from_column_slice(sigma));
    let m = u * s * v.transpose();
    m.map(T::from_re)
}
