use nalgebra::DMatrix;

use super::{k_rank, UniquenessReport, Verdict};
use crate::error::{Error, Result};
use crate::kron::kron;
use crate::linalg::numerical_rank;
use crate::models::ParatuckModel;
use crate::scalar::Scalar;
use crate::equivalence::allocation_matrix;
use crate::tensor::{matricize, ModePartition};

struct Quantities {
    k: [usize; 3],
    r: [usize; 3],
}

/// Relaxed third-order conditions on the contracted model
/// `(⊗ A^(n), (⋄ Φ^(n))^T, C_{I_{N1+2}..I_N x R})`, one case per factor
/// assumed full column rank.
fn theorem(q: &Quantities, rank: usize, extrapolated: bool) -> UniquenessReport {
    const NAMES: [&str; 3] = ["kron_factors", "allocation", "input_unfolding"];
    let target = rank as i64 + 2;
    let cases: Vec<UniquenessReport> = (0..3)
        .map(|full| {
            let (i, j) = match full {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let name = format!("case {}: {} full column rank", full + 1, NAMES[full]);
            let mut rep = if q.r[full] != rank {
                let mut rep = UniquenessReport::new(name, Verdict::Fails);
                rep.notes.push(format!("{} has rank {} < {rank}", NAMES[full], q.r[full]));
                rep
            } else {
                let (ki, kj) = (q.k[i] as i64, q.k[j] as i64);
                let (ri, rj) = (q.r[i] as i64, q.r[j] as i64);
                let margin = (ki - 2).min(kj - 2).min((ri + kj - target).max(rj + ki - target));
                UniquenessReport::from_margin(name, margin)
            };
            rep.case = Some(full + 1);
            rep.extrapolated = extrapolated;
            rep
        })
        .collect();
    let holding = cases.iter().find(|c| c.holds()).and_then(|c| c.case);
    let margin = cases.iter().filter_map(|c| c.margin).max();
    let condition = if extrapolated { "paratuck_nway_extrapolated" } else { "paratuck24" };
    let mut report = UniquenessReport::new(condition, if holding.is_some() { Verdict::Holds } else { Verdict::Fails });
    report.margin = margin;
    report.case = holding;
    report.k_ranks = q.k.to_vec();
    report.ranks = q.r.to_vec();
    report.extrapolated = extrapolated;
    report.related = cases;
    report
}

fn quantities<T: Scalar>(m: &ParatuckModel<T>) -> Result<(Quantities, usize)> {
    let n1 = m.n1();
    let rank: usize = m.ranks().iter().product();
    let trailing: Vec<usize> = (n1 + 1..=m.input.order()).collect();
    let d = matricize(&m.input, &ModePartition::new(trailing, (1..=n1).collect()))?;
    let f = allocation_matrix(m)?;
    let r_kron: usize = m.factors.iter().map(numerical_rank).product();
    let k_kron = if r_kron == rank {
        rank
    } else {
        k_rank(&kron(&m.factors)?)?
    };
    let mats: [&DMatrix<T>; 2] = [&f, &d];
    let q = Quantities {
        k: [k_kron, k_rank(mats[0])?, k_rank(mats[1])?],
        r: [r_kron, numerical_rank(mats[0]), numerical_rank(mats[1])],
    };
    Ok((q, rank))
}

/// Sufficient conditions for essential uniqueness of PARATUCK-(2,4), one per
/// full column-rank factor of the contracted PARAFAC-3 model. The verdict
/// holds if any case holds; `case` names the first satisfied one.
pub fn paratuck24_uniqueness<T: Scalar>(m: &ParatuckModel<T>) -> Result<UniquenessReport> {
    if m.n1() != 2 || m.order() != 4 {
        return Err(Error::Arity(format!(
            "expected PARATUCK-(2,4), got PARATUCK-({},{})",
            m.n1(),
            m.order()
        )));
    }
    let (q, rank) = quantities(m)?;
    Ok(theorem(&q, rank, false))
}

/// The same three cases for PARATUCK-(N1, N) with `N >= N1 + 2`, using
/// `⊗ A^(n)`, `(⋄ Φ^(n))^T` and `C_{I_{N1+2}..I_N x R}`. The report is
/// flagged `extrapolated`.
pub fn paratuck_uniqueness_extrapolated<T: Scalar>(m: &ParatuckModel<T>) -> Result<UniquenessReport> {
    if m.order() < m.n1() + 2 {
        return Err(Error::Arity(format!(
            "needs N >= N1 + 2, got PARATUCK-({},{})",
            m.n1(),
            m.order()
        )));
    }
    let (q, rank) = quantities(m)?;
    Ok(theorem(&q, rank, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_tensor, seeded_rng};
    use crate::tensor::DenseTensor;

    fn designed(seed: u64) -> ParatuckModel<f64> {
        let mut rng = seeded_rng(seed);
        let (r1, r2) = (2, 2);
        // Every (r1, r2) pair active in exactly one slot.
        let phi1 = DMatrix::from_row_slice(2, 4, &[1., 1., 0., 0., 0., 0., 1., 1.]);
        let phi2 = DMatrix::from_row_slice(2, 4, &[1., 0., 1., 0., 0., 1., 0., 1.]);
        ParatuckModel::new(
            vec![random_matrix(4, r1, &mut rng), random_matrix(3, r2, &mut rng)],
            vec![phi1, phi2],
            random_tensor(&[r1, r2, 5], &mut rng),
        )
        .unwrap()
    }

    #[test]
    fn designed_instance_case_one() {
        let rep = paratuck24_uniqueness(&designed(1)).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.case, Some(1));
        assert!(rep.margin.unwrap() >= 0);
        assert_eq!(rep.k_ranks[0], 4);
        assert!(!rep.extrapolated);
    }

    #[test]
    fn degenerate_instance_fails() {
        let mut m = designed(2);
        m.constraints = vec![DMatrix::from_element(2, 3, 1.0), DMatrix::from_element(2, 3, 1.0)];
        let slab: Vec<f64> = (0..5).map(|i| i as f64 + 1.0).collect();
        m.input = DenseTensor::from_fn(&[2, 2, 5], |i| slab[i[2] - 1]).unwrap();
        let rep = paratuck24_uniqueness(&m).unwrap();
        assert_eq!(rep.k_ranks[1..], [1, 1]);
        assert_eq!(rep.verdict, Verdict::Fails);
        assert!(rep.related.iter().all(|c| !c.holds()));
    }

    #[test]
    fn scalar_case_evaluated() {
        let mut rng = seeded_rng(3);
        let m = ParatuckModel::<f64>::new(
            vec![random_matrix(2, 1, &mut rng), random_matrix(2, 1, &mut rng)],
            vec![random_matrix(1, 2, &mut rng), random_matrix(1, 2, &mut rng)],
            random_tensor(&[1, 1, 2], &mut rng),
        )
        .unwrap();
        let rep = paratuck24_uniqueness(&m).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert_eq!(rep.related[0].margin, Some(-1));
    }

    #[test]
    fn wrong_arity() {
        let mut rng = seeded_rng(4);
        let m = ParatuckModel::<f64>::new(
            vec![random_matrix(2, 2, &mut rng), random_matrix(2, 2, &mut rng)],
            vec![random_matrix(2, 3, &mut rng), random_matrix(2, 3, &mut rng)],
            random_tensor(&[2, 2], &mut rng),
        )
        .unwrap();
        assert!(paratuck24_uniqueness(&m).is_err());
        assert!(paratuck_uniqueness_extrapolated(&m).is_err());
    }

    #[test]
    fn extrapolated_flag() {
        let m = designed(5);
        let a = paratuck24_uniqueness(&m).unwrap();
        let b = paratuck_uniqueness_extrapolated(&m).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert!(b.extrapolated);
        let mut rng = seeded_rng(6);
        let m3 = ParatuckModel::<f64>::new(
            (0..3).map(|_| random_matrix(3, 2, &mut rng)).collect(),
            (0..3).map(|_| random_matrix(2, 9, &mut rng)).collect(),
            random_tensor(&[2, 2, 2, 3, 3], &mut rng),
        )
        .unwrap();
        let rep = paratuck_uniqueness_extrapolated(&m3).unwrap();
        assert!(rep.extrapolated);
        assert!(rep.holds());
    }
}
