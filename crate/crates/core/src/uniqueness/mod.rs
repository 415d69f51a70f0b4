//! Sufficient conditions for essential uniqueness and the indeterminacies
//! that remain when they fail.

mod gauge;
mod krank;
mod parafac;
mod paratuck;

pub use gauge::{rotational_indeterminacy_demo, tucker_gauge_transform, RotationTarget, SharedColumnModel};
pub use krank::{k_rank, K_RANK_MAX_COLUMNS};
pub use parafac::{
    kruskal_check, kruskal_generic_check, paralind_condition_probe, paralind_ni, relaxed_third_order_check,
    unimode_check,
};
pub use paratuck::{paratuck24_uniqueness, paratuck_uniqueness_extrapolated};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// A sampled check found no counterexample.
    NotFalsified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::NotFalsified => "not_falsified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub condition: String,
    pub verdict: Verdict,
    /// `lhs - rhs` of the governing inequality.
    pub margin: Option<i64>,
    pub k_ranks: Vec<usize>,
    pub ranks: Vec<usize>,
    /// Satisfied case of a multi-case theorem (1-based).
    pub case: Option<usize>,
    /// Vector that falsified a sampled condition.
    pub witness: Option<Vec<f64>>,
    /// Set when the condition goes beyond the proven statement.
    pub extrapolated: bool,
    pub notes: Vec<String>,
    pub related: Vec<UniquenessReport>,
}

impl UniquenessReport {
    pub(crate) fn new(condition: impl Into<String>, verdict: Verdict) -> Self {
        UniquenessReport {
            condition: condition.into(),
            verdict,
            margin: None,
            k_ranks: Vec::new(),
            ranks: Vec::new(),
            case: None,
            witness: None,
            extrapolated: false,
            notes: Vec::new(),
            related: Vec::new(),
        }
    }

    pub(crate) fn from_margin(condition: impl Into<String>, margin: i64) -> Self {
        let verdict = if margin >= 0 { Verdict::Holds } else { Verdict::Fails };
        UniquenessReport { margin: Some(margin), ..Self::new(condition, verdict) }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}
