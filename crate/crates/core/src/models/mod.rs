//! Decomposition families: construction, synthesis into a dense tensor and
//! closed-form unfoldings.

mod block;
mod confac;
mod nested;
mod parafac;
mod paratuck;
mod tucker;

pub use block::{block_confac_unfold, btd_to_confac, synth_block_confac, BlockConfacModel};
pub use confac::{confac_unfold, interaction_matrices, synth_confac, validate_confac, ConfacModel};
pub use nested::{synth_nested_tucker, NestedTuckerModel};
pub use parafac::{parafac_unfold, synth_parafac, ParafacModel};
pub use paratuck::{allocation_tensor, paratuck_core, paratuck_unfold, synth_paratuck, ParatuckModel};
pub use tucker::{synth_tucker, tucker_unfold, TuckerModel};

use nalgebra::DMatrix;

use crate::error::Result;
use crate::kron::{khatri_rao, kron};
use crate::scalar::Scalar;

/// `⊗_{n in modes} A^(n)` for 1-based `modes`.
pub(crate) fn kron_modes<T: Scalar>(factors: &[DMatrix<T>], modes: &[usize]) -> Result<DMatrix<T>> {
    let picked: Vec<DMatrix<T>> = modes.iter().map(|&m| factors[m - 1].clone()).collect();
    kron(&picked)
}

/// `⋄_{n in modes} A^(n)` for 1-based `modes`.
pub(crate) fn khatri_rao_modes<T: Scalar>(factors: &[DMatrix<T>], modes: &[usize]) -> Result<DMatrix<T>> {
    let picked: Vec<DMatrix<T>> = modes.iter().map(|&m| factors[m - 1].clone()).collect();
    khatri_rao(&picked)
}
