//! Dense N-way tensor algebra with constrained decompositions.
//!
//! The crate covers dense storage and matricization ([`tensor`]), Kronecker
//! style products ([`kron`]), the Tucker / PARAFAC / CONFAC / PARATUCK model
//! families ([`models`]), rewriting of PARATUCK models as constrained PARAFAC
//! models ([`equivalence`]), uniqueness conditions ([`uniqueness`]) and
//! least-squares estimation ([`estimation`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32`, `f64` and their
//! complex counterparts). The aliases below fix the common `f64` case.

pub mod equivalence;
pub mod error;
pub mod estimation;
pub mod io;
pub mod kron;
pub mod linalg;
pub mod models;
pub mod random;
pub mod scalar;
pub mod tensor;
pub mod uniqueness;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use tensor::{identity_tensor, linear_index, multi_index, vectorize, DenseTensor, ModePartition};

pub use num_complex::Complex64;

pub type Tensor = DenseTensor<f64>;
pub type ComplexTensor = DenseTensor<Complex64>;
pub type Matrix = nalgebra::DMatrix<f64>;
pub type ComplexMatrix = nalgebra::DMatrix<Complex64>;
pub type Vector = nalgebra::DVector<f64>;

pub type Parafac = models::ParafacModel<f64>;
pub type Tucker = models::TuckerModel<f64>;
pub type Confac = models::ConfacModel<f64>;
pub type Paratuck = models::ParatuckModel<f64>;
