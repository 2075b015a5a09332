//! Finest product factorization of pure states.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::tensor::{eigh, eigenvalues, rank_of_values, PureState, Reduce, SubsystemSet};

/// Separability type of a pure state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparabilityLabel {
    FullySeparable,
    /// A nontrivial product structure such as `1|23` or `12|34`.
    Structured(String),
    GenuinelyEntangled,
}

impl fmt::Display for SeparabilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FullySeparable => f.write_str("fully separable"),
            Self::Structured(s) => f.write_str(s),
            Self::GenuinelyEntangled => f.write_str("GE"),
        }
    }
}

/// One tensor factor of a pure state.
#[derive(Clone, Debug)]
pub struct Factor {
    /// Parties of the original state covered by this factor.
    pub parties: SubsystemSet,
    /// Size ≥ 2 and internally non-product.
    pub entangled: bool,
    /// The factor's own pure state, on `parties` in increasing order.
    pub state: PureState,
}

#[derive(Clone, Debug)]
pub struct PartitionStructure {
    /// Ordered by smallest party.
    pub factors: Vec<Factor>,
    pub label: SeparabilityLabel,
}

impl PartitionStructure {
    pub fn entangled_factors(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().filter(|f| f.entangled)
    }

    /// `1|2|3`-style rendering of the factors, whatever the label.
    pub fn pattern(&self) -> String {
        self.factors.iter().map(|f| f.parties.label()).join("|")
    }

    pub fn is_fully_separable(&self) -> bool {
        self.label == SeparabilityLabel::FullySeparable
    }

    pub fn is_genuinely_entangled(&self) -> bool {
        self.label == SeparabilityLabel::GenuinelyEntangled
    }
}

/// All `2^(m−1) − 1` unordered bipartitions of `m` parties, each given by
/// the side containing party 1, ordered by size then lexicographically.
pub fn enumerate_bipartitions(m: usize) -> Result<Vec<SubsystemSet>> {
    if m < 2 {
        return Err(Error::Domain(format!("bipartitions need at least 2 parties, got {m}")));
    }
    Ok(bipartitions_zero_based(m)
        .into_iter()
        .map(SubsystemSet::from_zero_based)
        .collect())
}

pub(crate) fn bipartitions_zero_based(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity((1 << (m - 1)) - 1);
    for size in 1..m {
        for rest in (1..m).combinations(size - 1) {
            let mut side = Vec::with_capacity(size);
            side.push(0);
            side.extend(rest);
            out.push(side);
        }
    }
    out
}

/// `r_i = rank(ρ_i)` for every party.
pub fn local_rank_vector(state: &PureState, tol: f64) -> Result<Vec<usize>> {
    (0..state.parties())
        .map(|p| {
            let r = state.reduce(&SubsystemSet::from_zero_based(vec![p]))?;
            Ok(rank_of_values(&eigenvalues(r.matrix()), tol))
        })
        .collect()
}

/// Splits `state` recursively along rank-one bipartitions until no factor
/// splits further. The result is unique for pure states.
pub fn factorize(state: &PureState, tol: f64) -> Result<PartitionStructure> {
    let all: Vec<usize> = (0..state.parties()).collect();
    let mut factors = Vec::new();
    split_into(state, &all, tol, &mut factors)?;
    factors.sort_by_key(|f| f.parties.zero_based()[0]);
    let m = state.parties();
    let label = if factors.iter().all(|f| f.parties.len() == 1) {
        SeparabilityLabel::FullySeparable
    } else if factors.len() == 1 {
        SeparabilityLabel::GenuinelyEntangled
    } else {
        SeparabilityLabel::Structured(factors.iter().map(|f| f.parties.label()).join("|"))
    };
    debug_assert_eq!(factors.iter().map(|f| f.parties.len()).sum::<usize>(), m);
    Ok(PartitionStructure { factors, label })
}

/// `parties[q]` is the original (0-based) index of local party `q`.
fn split_into(state: &PureState, parties: &[usize], tol: f64, out: &mut Vec<Factor>) -> Result<()> {
    let m = parties.len();
    if m == 1 {
        out.push(Factor {
            parties: SubsystemSet::from_zero_based(parties.to_vec()),
            entangled: false,
            state: state.clone(),
        });
        return Ok(());
    }
    for side in bipartitions_zero_based(m) {
        let a = SubsystemSet::from_zero_based(side.clone());
        let rho_a = state.reduce(&a)?;
        if rank_of_values(&eigenvalues(rho_a.matrix()), tol) != 1 {
            continue;
        }
        let b = a.complement(m).expect("proper side");
        let psi_a = dominant_pure(state, &a, tol)?;
        let psi_b = dominant_pure(state, &b, tol)?;
        let pa: Vec<usize> = a.zero_based().iter().map(|&q| parties[q]).collect();
        let pb: Vec<usize> = b.zero_based().iter().map(|&q| parties[q]).collect();
        split_into(&psi_a, &pa, tol, out)?;
        split_into(&psi_b, &pb, tol, out)?;
        return Ok(());
    }
    out.push(Factor {
        parties: SubsystemSet::from_zero_based(parties.to_vec()),
        entangled: true,
        state: state.clone(),
    });
    Ok(())
}

/// Dominant eigenvector of a reduction that must be pure.
fn dominant_pure(state: &PureState, keep: &SubsystemSet, tol: f64) -> Result<PureState> {
    let rho = state.reduce(keep)?;
    let spec = eigh(rho.matrix());
    let dim = spec.values.len() as f64;
    if spec.values[0] < 1.0 - tol * dim.max(1.0) - 1e-12 {
        return Err(Error::Internal(format!(
            "reduction to {keep} is not pure (largest eigenvalue {})",
            spec.values[0]
        )));
    }
    PureState::normalized(rho.profile().clone(), spec.vector(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz_state, random_pure, random_product, w_state};
    use crate::tensor::{DimensionProfile, DEFAULT_RANK_TOL};

    fn zero3() -> PureState {
        PureState::basis(DimensionProfile::qubits(3).unwrap(), &[0, 0, 0]).unwrap()
    }

    #[test]
    fn product_state_is_fully_separable() {
        let f = factorize(&zero3(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.label, SeparabilityLabel::FullySeparable);
        assert_eq!(f.pattern(), "1|2|3");
        assert!(f.factors.iter().all(|x| !x.entangled));
    }

    #[test]
    fn zero_times_bell() {
        let zero = PureState::basis(DimensionProfile::qubits(1).unwrap(), &[0]).unwrap();
        let psi = zero.tensor(&ghz_state(2, 2).unwrap());
        let f = factorize(&psi, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.label, SeparabilityLabel::Structured("1|23".into()));
        assert!(!f.factors[0].entangled && f.factors[1].entangled);
        assert_eq!(f.factors[1].state.profile().dims(), &[2, 2]);
    }

    #[test]
    fn w3_is_genuinely_entangled() {
        let f = factorize(&w_state(3).unwrap(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.label, SeparabilityLabel::GenuinelyEntangled);
        assert_eq!(f.factors.len(), 1);
    }

    #[test]
    fn interleaved_pairs_are_found() {
        // pair on parties {1,3} and pair on {2,4}
        let p2 = DimensionProfile::qubits(2).unwrap();
        let a = random_pure(&p2, 11);
        let b = random_pure(&p2, 12);
        let psi = a.tensor(&b).permuted(&[0, 2, 1, 3]);
        let f = factorize(&psi, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.label, SeparabilityLabel::Structured("13|24".into()));
        assert!(f.factors[0].state.overlap(&a) > 1.0 - 1e-10);
        assert!(f.factors[1].state.overlap(&b) > 1.0 - 1e-10);
    }

    #[test]
    fn local_ranks() {
        assert_eq!(local_rank_vector(&w_state(3).unwrap(), 1e-8).unwrap(), vec![2, 2, 2]);
        assert_eq!(local_rank_vector(&ghz_state(3, 2).unwrap(), 1e-8).unwrap(), vec![2, 2, 2]);
        assert_eq!(local_rank_vector(&zero3(), 1e-8).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn bipartition_enumeration() {
        assert!(enumerate_bipartitions(1).is_err());
        let two = enumerate_bipartitions(2).unwrap();
        assert_eq!(two, vec![SubsystemSet::new(&[1]).unwrap()]);
        let three: Vec<Vec<usize>> = enumerate_bipartitions(3)
            .unwrap()
            .iter()
            .map(|s| s.one_based())
            .collect();
        assert_eq!(three, vec![vec![1], vec![1, 2], vec![1, 3]]);
        assert_eq!(enumerate_bipartitions(4).unwrap().len(), 7);
        assert_eq!(enumerate_bipartitions(6).unwrap().len(), 31);
    }

    #[test]
    fn random_products_split_fully() {
        let p = DimensionProfile::new(vec![2, 3, 2, 2]).unwrap();
        for seed in 0..10 {
            let f = factorize(&random_product(&p, seed), DEFAULT_RANK_TOL).unwrap();
            assert!(f.is_fully_separable());
        }
    }
}
