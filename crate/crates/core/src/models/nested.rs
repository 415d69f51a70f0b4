use nalgebra::DMatrix;

use super::TuckerModel;
use crate::error::{shape, Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{mode_n_product, DenseTensor};

/// `X^(p) = X^(p-1) x_n A^(p,n)` for `p = 1..P`, starting from `X^(0) = G`.
/// `chains[n][p]` holds `A^(p+1, n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedTuckerModel<T: Scalar> {
    pub core: DenseTensor<T>,
    pub chains: Vec<Vec<DMatrix<T>>>,
}

impl<T: Scalar> NestedTuckerModel<T> {
    pub fn new(core: DenseTensor<T>, chains: Vec<Vec<DMatrix<T>>>) -> Result<Self> {
        if chains.len() != core.order() {
            return Err(Error::Arity(format!(
                "{} chains for an order-{} core",
                chains.len(),
                core.order()
            )));
        }
        let depth = chains[0].len();
        for (n, chain) in chains.iter().enumerate() {
            if chain.len() != depth {
                return Err(shape(format!("chain {} has length {}, chain 1 has {}", n + 1, chain.len(), depth)));
            }
            let mut inner = core.dims()[n];
            for (p, a) in chain.iter().enumerate() {
                if a.ncols() != inner {
                    return Err(shape(format!(
                        "A^({},{}) has {} columns, expected {}",
                        p + 1,
                        n + 1,
                        a.ncols(),
                        inner
                    )));
                }
                inner = a.nrows();
            }
        }
        Ok(NestedTuckerModel { core, chains })
    }

    pub fn depth(&self) -> usize {
        self.chains[0].len()
    }

    /// Tucker model with factors `A^(P,n) .. A^(1,n)`.
    pub fn as_tucker(&self) -> TuckerModel<T> {
        let factors = self
            .chains
            .iter()
            .enumerate()
            .map(|(n, chain)| {
                let start = DMatrix::identity(self.core.dims()[n], self.core.dims()[n]);
                chain.iter().fold(start, |acc, a| a * acc)
            })
            .collect();
        TuckerModel { core: self.core.clone(), factors }
    }
}

/// Evaluates the recursion level by level.
pub fn synth_nested_tucker<T: Scalar>(m: &NestedTuckerModel<T>) -> Result<DenseTensor<T>> {
    let mut x = m.core.clone();
    for p in 0..m.depth() {
        for (n, chain) in m.chains.iter().enumerate() {
            x = mode_n_product(&x, &chain[p], n + 1)?;
        }
    }
    Ok(x)
}
