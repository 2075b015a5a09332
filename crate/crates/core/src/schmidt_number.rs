//! Multipartite Schmidt number.
//!
//! Pure states are classified by their finest factorization:
//!
//! | structure | value |
//! |-----------|-------|
//! | fully separable | 1 |
//! | one entangled factor `F` | value of `ψ_F` |
//! | several entangled factors | sum of the factor values |
//! | genuinely entangled, 2 parties | Schmidt rank |
//! | genuinely entangled, `m ≥ 3` | `max_i (r_i + R(ρ_ī))` |
//!
//! where `r_i = rank(ρ_i)` and `R(ρ_ī)` is the convex-roof value of the
//! `(m−1)`-party reduction. Mixed states use the convex roof
//! `R(ρ) = inf_{ensembles} max_j R(ψ_j)`, which is bracketed by an interval:
//! certified lower bounds (PPT, range arguments) and upper bounds realized by
//! explicit ensembles.

use std::fmt;

use crate::bipartite::{ppt_test, schmidt_rank};
use crate::ensemble::{self, EnsembleCandidate};
use crate::error::{Error, Result};
use crate::partition::{bipartitions_zero_based, factorize, local_rank_vector};
use crate::range;
use crate::states::condition_number;
use crate::tensor::{eigh, rank_of_values, CMatrix, DensityMatrix, PureState, Reduce, SubsystemSet};
use crate::Settings;

/// One term `r_i + R(ρ_ī)` of the genuinely-entangled rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeTerm {
    /// 1-based party `i`.
    pub party: usize,
    pub local_rank: usize,
    pub reduction_lo: usize,
    pub reduction_hi: usize,
}

impl GeTerm {
    pub fn lo(&self) -> usize {
        self.local_rank + self.reduction_lo
    }

    pub fn hi(&self) -> usize {
        self.local_rank.saturating_add(self.reduction_hi)
    }
}

/// Schmidt number as an interval `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct SchmidtNumberResult {
    pub lo: usize,
    pub hi: usize,
    /// `lo == hi`.
    pub exact: bool,
    /// Ensemble realizing `hi` (mixed inputs only).
    pub witness: Option<EnsembleCandidate>,
    /// Terms of the genuinely-entangled rule when it fired at the top level.
    pub terms: Vec<GeTerm>,
    /// Which rules fired, outermost first.
    pub trace: Vec<String>,
}

impl SchmidtNumberResult {
    fn exact_value(value: usize, trace: Vec<String>) -> Self {
        Self {
            lo: value,
            hi: value,
            exact: true,
            witness: None,
            terms: Vec::new(),
            trace,
        }
    }

    /// The value when it is known exactly.
    pub fn value(&self) -> Option<usize> {
        self.exact.then_some(self.lo)
    }

    /// Parties (1-based) whose term attains the maximum at both ends of the
    /// interval; all of them when the bounds disagree about the maximizer.
    pub fn maximizers(&self) -> Vec<usize> {
        let both: Vec<usize> = self
            .terms
            .iter()
            .filter(|t| t.hi() == self.hi && t.lo() == self.lo)
            .map(|t| t.party)
            .collect();
        if !both.is_empty() {
            return both;
        }
        self.terms
            .iter()
            .filter(|t| t.hi() == self.hi)
            .map(|t| t.party)
            .collect()
    }
}

impl fmt::Display for SchmidtNumberResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Whether an evaluation needs the upper end. Lower-only evaluation never
/// runs ensemble searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    Lower,
    Full,
}

/// Schmidt number of a pure state.
pub fn pure_schmidt_number(state: &PureState, settings: &Settings) -> Result<SchmidtNumberResult> {
    pure_bounds(state, settings, Mode::Full)
}

/// Convex-roof Schmidt number of a density matrix.
pub fn mixed_schmidt_number(rho: &DensityMatrix, settings: &Settings) -> Result<SchmidtNumberResult> {
    mixed_bounds(rho, settings, Mode::Full)
}

/// Compares the Schmidt number of `ψ` with that of `(A_1 ⊗ … ⊗ A_m)ψ`.
///
/// Each operator must have condition number at most `1e10`.
pub fn slocc_rank_check(state: &PureState, local_invertibles: &[CMatrix], settings: &Settings) -> Result<bool> {
    for (p, op) in local_invertibles.iter().enumerate() {
        let cond = condition_number(op);
        if !(cond <= 1e10) {
            return Err(Error::Domain(format!(
                "operator on party {} is not invertible (condition number {cond:e})",
                p + 1
            )));
        }
    }
    let moved = state.apply_local(local_invertibles)?;
    let before = pure_schmidt_number(state, settings)?;
    let after = pure_schmidt_number(&moved, settings)?;
    Ok(before.lo == after.lo && before.hi == after.hi)
}

pub(crate) fn pure_bounds(state: &PureState, settings: &Settings, mode: Mode) -> Result<SchmidtNumberResult> {
    let structure = factorize(state, settings.rank_tol)?;
    if structure.is_fully_separable() {
        return Ok(SchmidtNumberResult::exact_value(1, vec!["fully separable".into()]));
    }
    if structure.is_genuinely_entangled() {
        return ge_bounds(state, settings, mode);
    }
    let entangled: Vec<_> = structure.entangled_factors().collect();
    let pattern = structure.pattern();
    if entangled.len() == 1 {
        let factor = entangled[0];
        let mut sub = ge_bounds(&factor.state, settings, mode)?;
        sub.trace.insert(
            0,
            format!("{pattern}: value of entangled factor {}", factor.parties.label()),
        );
        sub.terms.clear();
        return Ok(sub);
    }
    let mut trace = vec![format!("{pattern}: sum over {} entangled factors", entangled.len())];
    if state.parties() >= 5 {
        trace.push("sum rule for several entangled factors is inferred beyond four parties".into());
    }
    let (mut lo, mut hi) = (0usize, 0usize);
    for factor in entangled {
        let sub = ge_bounds(&factor.state, settings, mode)?;
        lo += sub.lo;
        hi = hi.saturating_add(sub.hi);
        trace.push(format!("factor {}: {}", factor.parties.label(), sub));
    }
    Ok(SchmidtNumberResult {
        lo,
        hi,
        exact: lo == hi,
        witness: None,
        terms: Vec::new(),
        trace,
    })
}

/// Value of a state already known to be genuinely entangled.
fn ge_bounds(state: &PureState, settings: &Settings, mode: Mode) -> Result<SchmidtNumberResult> {
    let m = state.parties();
    if m == 2 {
        let rank = schmidt_rank(state, &SubsystemSet::from_zero_based(vec![0]), settings.rank_tol)?;
        return Ok(SchmidtNumberResult::exact_value(
            rank,
            vec![format!("bipartite Schmidt rank {rank}")],
        ));
    }
    let ranks = local_rank_vector(state, settings.rank_tol)?;
    let mut terms = Vec::with_capacity(m);
    for (i, &r) in ranks.iter().enumerate() {
        let rest = SubsystemSet::from_zero_based((0..m).filter(|&q| q != i).collect());
        let rho = state.reduce(&rest)?;
        let sub = mixed_bounds(&rho, settings, mode)?;
        terms.push(GeTerm {
            party: i + 1,
            local_rank: r,
            reduction_lo: sub.lo,
            reduction_hi: sub.hi,
        });
    }
    let lo = terms.iter().map(GeTerm::lo).max().expect("m >= 3");
    let hi = terms.iter().map(GeTerm::hi).max().expect("m >= 3");
    let mut out = SchmidtNumberResult {
        lo,
        hi,
        exact: lo == hi,
        witness: None,
        terms,
        trace: Vec::new(),
    };
    let detail: Vec<String> = out
        .terms
        .iter()
        .map(|t| {
            if t.reduction_lo == t.reduction_hi {
                format!("r{}={} + R={}", t.party, t.local_rank, t.reduction_lo)
            } else if mode == Mode::Lower {
                format!("r{}={} + R>={}", t.party, t.local_rank, t.reduction_lo)
            } else {
                format!(
                    "r{}={} + R in [{}, {}]",
                    t.party, t.local_rank, t.reduction_lo, t.reduction_hi
                )
            }
        })
        .collect();
    let maxi: Vec<String> = out.maximizers().iter().map(|p| p.to_string()).collect();
    out.trace.push(format!(
        "genuinely entangled: max_i(r_i + R(rho_ibar)) over {}; maximized by party {}",
        detail.join(", "),
        maxi.join(",")
    ));
    Ok(out)
}

pub(crate) fn mixed_bounds(rho: &DensityMatrix, settings: &Settings, mode: Mode) -> Result<SchmidtNumberResult> {
    let m = rho.parties();
    let spec = eigh(rho.matrix());
    let rank = rank_of_values(&spec.values, settings.rank_tol);
    if rank == 1 {
        let psi = PureState::normalized(rho.profile().clone(), spec.vector(0))?;
        let mut out = pure_bounds(&psi, settings, mode)?;
        out.terms.clear();
        out.trace.insert(0, "rank-one input: pure-state rule".into());
        out.witness = Some(EnsembleCandidate::singleton(psi));
        return Ok(out);
    }
    let mut trace = Vec::new();
    if m == 1 {
        trace.push("single party: every ensemble element is a product".into());
        let mut out = SchmidtNumberResult::exact_value(1, trace);
        if mode == Mode::Full {
            out.witness = Some(ensemble::eigen_ensemble(rho, &spec, rank)?);
        }
        return Ok(out);
    }

    // lower end
    let mut ppt_lo = 1usize;
    let mut ppt_decisive = false;
    for side in bipartitions_zero_based(m) {
        let cut = SubsystemSet::from_zero_based(side);
        let v = ppt_test(rho, &cut)?;
        if v.entangled {
            ppt_lo = 2;
            trace.push(format!(
                "PPT violated across {}|rest (min eigenvalue {:.3e}): lo >= 2",
                cut.label(),
                v.min_eigenvalue
            ));
            break;
        }
        if m == 2 && v.exact {
            ppt_decisive = true;
        }
    }
    if ppt_lo == 1 {
        trace.push(if ppt_decisive {
            "PPT across the only cut and PPT is decisive here: separable".into()
        } else {
            "no PPT violation across any bipartition".into()
        });
    }
    let line = if rank == 2 {
        range::RangeLine::analyze(rho, &spec, settings.rank_tol)?
    } else {
        None
    };
    let mut lo = ppt_lo;
    let mut range_lo = None;
    if let Some(line) = line.as_ref().filter(|_| !ppt_decisive) {
        if let Some(bound) = line.lower_bound(settings)? {
            trace.push(format!(
                "rank-two range with {} non-genuinely-entangled ray(s): lo >= {bound}",
                line.exceptional().len()
            ));
            range_lo = Some(bound);
            lo = lo.max(bound);
        }
    }
    if mode == Mode::Lower {
        return Ok(SchmidtNumberResult {
            lo,
            hi: usize::MAX,
            exact: false,
            witness: None,
            terms: Vec::new(),
            trace,
        });
    }

    // upper end
    let mut hi = usize::MAX;
    let mut witness = None;
    if m == 2 {
        let dims = rho.profile().dims();
        hi = dims[0].min(dims[1]);
        trace.push(format!("bipartite bound min(N1, N2) = {hi}"));
    }
    if lo < hi {
        if let Some(cone) = line.as_ref().and_then(|l| l.cone()) {
            let value = ensemble::ensemble_value(cone, settings)?;
            if value < hi {
                hi = value;
                witness = Some(cone.clone());
                trace.push(format!("mixture of the range's product-type rays: hi <= {value}"));
            }
        }
    }
    if lo < hi {
        let eig = ensemble::eigen_ensemble(rho, &spec, rank)?;
        let value = ensemble::ensemble_value(&eig, settings)?;
        if value < hi {
            hi = value;
            witness = Some(eig);
            trace.push(format!("eigen-ensemble: hi <= {value}"));
        }
    }
    if lo < hi {
        let mut found = false;
        for target in lo..hi {
            if let Some(c) = ensemble::gradient_search(rho, &spec, rank, target, settings)? {
                trace.push(format!("ensemble search found all elements <= {target}"));
                hi = target;
                witness = Some(c);
                found = true;
                break;
            }
        }
        if !found {
            trace.push(format!("ensemble search below {hi} exhausted its budget"));
        }
    }
    if hi < lo {
        // only the sampled part of the range bound can overshoot
        trace.push(format!(
            "range bound {} contradicted by an explicit ensemble; falling back to lo = {ppt_lo}",
            range_lo.unwrap_or(lo)
        ));
        lo = ppt_lo.min(hi);
    }
    Ok(SchmidtNumberResult {
        lo,
        hi,
        exact: lo == hi,
        witness,
        terms: Vec::new(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz_state, random_local_unitary, random_pure, w_state};
    use crate::tensor::DimensionProfile;

    fn settings() -> Settings {
        Settings::default()
    }

    fn zero(m: usize) -> PureState {
        PureState::basis(DimensionProfile::qubits(m).unwrap(), &vec![0; m]).unwrap()
    }

    #[test]
    fn w3_is_four() {
        let r = pure_schmidt_number(&w_state(3).unwrap(), &settings()).unwrap();
        assert_eq!(r.value(), Some(4), "{:?}", r.trace);
        assert_eq!(r.maximizers(), vec![1, 2, 3]);
    }

    #[test]
    fn ghz3_is_three() {
        let r = pure_schmidt_number(&ghz_state(3, 2).unwrap(), &settings()).unwrap();
        assert_eq!(r.value(), Some(3), "{:?}", r.trace);
    }

    #[test]
    fn zero_times_bell_is_two() {
        let psi = zero(1).tensor(&ghz_state(2, 2).unwrap());
        let r = pure_schmidt_number(&psi, &settings()).unwrap();
        assert_eq!(r.value(), Some(2));
    }

    #[test]
    fn product_is_one() {
        assert_eq!(pure_schmidt_number(&zero(4), &settings()).unwrap().value(), Some(1));
    }

    #[test]
    fn two_pairs_add() {
        let p = DimensionProfile::new(vec![2, 3]).unwrap();
        let a = random_pure(&p, 1);
        let b = ghz_state(2, 2).unwrap();
        let r = pure_schmidt_number(&a.tensor(&b), &settings()).unwrap();
        assert_eq!(r.value(), Some(4));
    }

    #[test]
    fn w4_is_six() {
        let r = pure_schmidt_number(&w_state(4).unwrap(), &settings()).unwrap();
        assert_eq!(r.value(), Some(6), "{:?}", r.trace);
    }

    #[test]
    fn generalized_ghz_is_d_plus_one() {
        let r = pure_schmidt_number(&ghz_state(3, 3).unwrap(), &settings()).unwrap();
        assert_eq!(r.value(), Some(4), "{:?}", r.trace);
    }

    #[test]
    fn pure_projector_matches_pure_value() {
        for psi in [w_state(3).unwrap(), ghz_state(3, 2).unwrap(), zero(3)] {
            let rho = DensityMatrix::from_pure(&psi);
            let a = mixed_schmidt_number(&rho, &settings()).unwrap();
            let b = pure_schmidt_number(&psi, &settings()).unwrap();
            assert_eq!((a.lo, a.hi), (b.lo, b.hi));
        }
    }

    #[test]
    fn ghz_pair_reduction_is_separable() {
        let rho = ghz_state(3, 2).unwrap().reduce(&SubsystemSet::new(&[2, 3]).unwrap()).unwrap();
        let r = mixed_schmidt_number(&rho, &settings()).unwrap();
        assert_eq!((r.lo, r.hi), (1, 1));
        let w = r.witness.unwrap();
        assert!(w.reconstruction_error(&rho) < 1e-7);
    }

    #[test]
    fn w_pair_reduction_is_two() {
        let rho = w_state(3).unwrap().reduce(&SubsystemSet::new(&[2, 3]).unwrap()).unwrap();
        let r = mixed_schmidt_number(&rho, &settings()).unwrap();
        assert_eq!((r.lo, r.hi), (2, 2));
    }

    #[test]
    fn classical_mixture_of_product_states() {
        let rho = DensityMatrix::mixture(&[
            (0.5, zero(3)),
            (0.5, PureState::basis(DimensionProfile::qubits(3).unwrap(), &[1, 1, 1]).unwrap()),
        ])
        .unwrap();
        let r = mixed_schmidt_number(&rho, &settings()).unwrap();
        assert_eq!((r.lo, r.hi), (1, 1));
    }

    #[test]
    fn slocc_check_rejects_singular_operator() {
        let ops = vec![
            CMatrix::identity(2, 2),
            CMatrix::zeros(2, 2),
            CMatrix::identity(2, 2),
        ];
        assert!(slocc_rank_check(&w_state(3).unwrap(), &ops, &settings()).is_err());
    }

    #[test]
    fn local_unitaries_preserve_value() {
        let p = DimensionProfile::qubits(3).unwrap();
        let w = w_state(3).unwrap();
        let g = ghz_state(3, 2).unwrap();
        for seed in 0..3 {
            let u = random_local_unitary(&p, seed);
            assert!(slocc_rank_check(&w, &u, &settings()).unwrap());
            assert!(slocc_rank_check(&g, &u, &settings()).unwrap());
        }
    }
}
