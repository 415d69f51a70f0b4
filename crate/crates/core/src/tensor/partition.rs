use crate::error::{Error, Result};

/// Ordered split of the modes `1..=N` into row modes `s1` and column modes
/// `s2`. Order inside each set fixes which index varies fastest: the last
/// listed mode is the fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePartition {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
}

impl ModePartition {
    pub fn new(s1: Vec<usize>, s2: Vec<usize>) -> Self {
        ModePartition { s1, s2 }
    }

    /// Flat mode-`n` unfolding `X_n`: `s1 = {n}`, `s2 = {n+1, .., N, 1, .., n-1}`.
    pub fn mode_n(n: usize, order: usize) -> Self {
        ModePartition { s1: vec![n], s2: cyclic_after(n, order) }
    }

    /// Tall mode-`n` unfolding, the transpose of [`ModePartition::mode_n`].
    pub fn mode_n_tall(n: usize, order: usize) -> Self {
        ModePartition { s1: cyclic_after(n, order), s2: vec![n] }
    }

    /// All modes in the row set; only valid for vectorization.
    pub fn vectorization(order: usize) -> Self {
        ModePartition { s1: (1..=order).collect(), s2: Vec::new() }
    }

    pub fn transposed(&self) -> Self {
        ModePartition { s1: self.s2.clone(), s2: self.s1.clone() }
    }

    /// Checks disjointness, coverage of `1..=order` and a nonempty row set.
    pub fn validate(&self, order: usize) -> Result<()> {
        if self.s1.is_empty() {
            return Err(Error::Partition("row mode set is empty".into()));
        }
        let mut seen = vec![false; order];
        for &m in self.s1.iter().chain(&self.s2) {
            if m == 0 || m > order {
                return Err(Error::Partition(format!("mode {m} outside 1..={order}")));
            }
            if seen[m - 1] {
                return Err(Error::Partition(format!("mode {m} listed twice")));
            }
            seen[m - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Partition(format!("mode {} missing", missing + 1)));
        }
        Ok(())
    }

    /// Like [`ModePartition::validate`] and additionally requires a nonempty column set.
    pub fn validate_matrix(&self, order: usize) -> Result<()> {
        self.validate(order)?;
        if self.s2.is_empty() {
            return Err(Error::Partition("column mode set is empty".into()));
        }
        Ok(())
    }

    /// `(prod_{n in s1} dims[n], prod_{n in s2} dims[n])`.
    pub fn shape(&self, dims: &[usize]) -> (usize, usize) {
        let rows = self.s1.iter().map(|&m| dims[m - 1]).product();
        let cols = self.s2.iter().map(|&m| dims[m - 1]).product();
        (rows, cols)
    }
}

/// `n+1, .., N, 1, .., n-1`.
pub(crate) fn cyclic_after(n: usize, order: usize) -> Vec<usize> {
    (n + 1..=order).chain(1..n).collect()
}
