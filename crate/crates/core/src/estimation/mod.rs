//! Alternating least squares, Kronecker least squares for PARATUCK-(2,4)
//! receivers and factor matching.

mod als;
mod congruence;
mod kron_ls;

pub use als::{als_confac, als_parafac};
pub use congruence::factor_congruence;
pub use kron_ls::{kron_gauge, nearest_kron_factor, paratuck24_kron_ls};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Init<T: Scalar> {
    /// I.i.d. standard normal entries from the seeded generator.
    Random,
    Given(Vec<DMatrix<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions<T: Scalar> {
    pub max_iters: usize,
    /// Threshold on `|e_t - e_{t-1}| / max(e_{t-1}, 1e-15)`.
    pub tol: f64,
    pub seed: u64,
    pub init: Init<T>,
    /// Random starts drawn in sequence from the seeded generator; the one
    /// with the lowest final error is returned. Ignored for `Init::Given`.
    pub restarts: usize,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        FitOptions { max_iters: 500, tol: 1e-10, seed: 0, init: Init::Random, restarts: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tolerance,
    MaxIters,
    /// The relative error reached the floating-point floor.
    Stall,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub iterations: usize,
    /// `||X - X_hat||_F / ||X||_F` after each sweep.
    pub rel_error_history: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Set when some least-squares system needed the Tikhonov floor.
    pub regularized: bool,
    /// Index of the start that produced the result (0-based).
    pub start: usize,
}

impl FitReport {
    pub fn final_error(&self) -> f64 {
        self.rel_error_history.last().copied().unwrap_or(f64::NAN)
    }
}
