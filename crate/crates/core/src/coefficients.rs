//! Multipartite Schmidt coefficients and the generalized entanglement of
//! formation `E(ψ) = −Σ η² log₂ η²`.
//!
//! For a genuinely entangled three-party state the coefficient set is
//! `σ(ρ̃_t) ∪ δ` where `ρ̃_t = ρ_t^{1/2}/√2` for a party `t` attaining the
//! Schmidt-number maximum and `δ` are the Schmidt coefficients, divided by
//! `√2`, of a maximum-entropy element of `ρ_t̄` whose rank equals `R(ρ_t̄)`.
//! Four parties use the same shape one level up, with the element's own
//! generalized entropy as the score.

use crate::bipartite::{schmidt_decompose, shannon_bits};
use crate::ensemble::{eigen_ensemble, ensemble_from_isometry, root_factor, EnsembleCandidate};
use crate::error::{Error, Result};
use crate::optim::{bfgs, nelder_mead};
use crate::partition::factorize;
use crate::range::RangeLine;
use crate::schmidt_number::{pure_schmidt_number, SchmidtNumberResult};
use crate::states::{gaussian_vector, haar_isometry, seeded_rng};
use crate::tensor::{
    eigenvalues, eigh, rank_of_values, CVector, DensityMatrix, PureState, Reduce,
    SubsystemSet, C64,
};
use crate::{mixed_schmidt_number, Settings};

/// Scores closer than this count as tied.
const TIE_TOL: f64 = 1e-7;
/// Cap on restarts of the element search.
const ELEMENT_RESTARTS: usize = 6;

/// One candidate party of a genuinely-entangled construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// 1-based.
    pub party: usize,
    pub score: f64,
    pub values: Vec<f64>,
}

/// How a coefficient set was obtained.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Provenance {
    pub rule: String,
    /// Selected party (1-based) for genuinely entangled constructions.
    pub party: Option<usize>,
    /// Every party whose score ties the maximum.
    pub ties: Vec<usize>,
    pub branches: Vec<Branch>,
    /// All Schmidt numbers used were exact and every element search met its
    /// rank constraint.
    pub exact: bool,
    pub notes: Vec<String>,
}

/// Multiset of Schmidt coefficients, descending.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl CoefficientSet {
    fn new(mut values: Vec<f64>, provenance: Provenance) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values, provenance }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ η²`, which is 1 for every construction.
    pub fn square_sum(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// `−Σ η² log₂ η²`.
pub fn generalized_eof(coeffs: &CoefficientSet) -> f64 {
    entropy_of(&coeffs.values)
}

fn entropy_of(values: &[f64]) -> f64 {
    shannon_bits(values.iter().map(|v| v * v))
}

/// An ensemble element together with its coefficient data.
#[derive(Clone, Debug)]
pub struct EnsembleElement {
    pub state: PureState,
    /// Schmidt rank for two parties, Schmidt number otherwise.
    pub rank: usize,
    pub coefficients: Vec<f64>,
    /// Entanglement entropy for two parties, generalized EoF otherwise.
    pub entropy: f64,
    /// The rank is certified rather than an upper bound.
    pub exact: bool,
}

fn describe(state: &PureState, settings: &Settings) -> Result<EnsembleElement> {
    match state.parties() {
        1 => Ok(EnsembleElement {
            state: state.clone(),
            rank: 1,
            coefficients: vec![1.0],
            entropy: 0.0,
            exact: true,
        }),
        2 => {
            let d = schmidt_decompose(state, &SubsystemSet::from_zero_based(vec![0]), settings.rank_tol)?;
            // drop the truncated tail from the normalization
            let norm = d.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
            let coefficients: Vec<f64> = d.coefficients.iter().map(|c| c / norm).collect();
            let entropy = entropy_of(&coefficients);
            Ok(EnsembleElement {
                state: state.clone(),
                rank: d.rank,
                coefficients,
                entropy,
                exact: true,
            })
        }
        _ => {
            let c = pure_schmidt_coefficients(state, settings)?;
            let entropy = generalized_eof(&c);
            Ok(EnsembleElement {
                state: state.clone(),
                rank: c.len(),
                exact: c.provenance.exact,
                coefficients: c.values,
                entropy,
            })
        }
    }
}

/// Schmidt coefficients of a pure state.
///
/// Supports every state with at most four parties, and states of any size
/// that are not genuinely entangled (through their factors, as long as each
/// entangled factor has at most four parties).
pub fn pure_schmidt_coefficients(state: &PureState, settings: &Settings) -> Result<CoefficientSet> {
    let structure = factorize(state, settings.rank_tol)?;
    if structure.is_fully_separable() {
        return Ok(CoefficientSet::new(
            vec![1.0],
            Provenance {
                rule: "fully separable".into(),
                exact: true,
                ..Provenance::default()
            },
        ));
    }
    if structure.is_genuinely_entangled() {
        return ge_coefficients(state, settings);
    }
    let entangled: Vec<_> = structure.entangled_factors().collect();
    let pattern = structure.pattern();
    if entangled.len() == 1 {
        let mut c = ge_coefficients(&entangled[0].state, settings)?;
        c.provenance.notes.insert(
            0,
            format!("{pattern}: coefficients of factor {}", entangled[0].parties.label()),
        );
        if let Some(p) = c.provenance.party {
            // report the party in the original numbering
            let original = entangled[0].parties.one_based()[p - 1];
            c.provenance.party = Some(original);
        }
        return Ok(c);
    }
    let f = entangled.len();
    let scale = 1.0 / (f as f64).sqrt();
    let mut values = Vec::new();
    let mut exact = true;
    let mut notes = vec![format!("{pattern}: union over {f} entangled factors scaled by 1/sqrt({f})")];
    if state.parties() >= 5 {
        notes.push("union rule for several entangled factors is inferred beyond four parties".into());
    }
    for factor in entangled {
        let c = ge_coefficients(&factor.state, settings)?;
        exact &= c.provenance.exact;
        values.extend(c.values.iter().map(|v| v * scale));
    }
    Ok(CoefficientSet::new(
        values,
        Provenance {
            rule: "union of factors".into(),
            exact,
            notes,
            ..Provenance::default()
        },
    ))
}

/// Nonzero eigenvalues of `ρ̃_i = ρ_i^{1/2}/√2` for a single party.
fn scaled_local_spectrum(state: &PureState, party: usize, tol: f64) -> Result<Vec<f64>> {
    let rho = state.reduce(&SubsystemSet::from_zero_based(vec![party]))?;
    let vals = eigenvalues(rho.matrix());
    let r = rank_of_values(&vals, tol);
    Ok(vals[..r].iter().map(|l| (l.max(0.0) / 2.0).sqrt()).collect())
}

fn ge_coefficients(state: &PureState, settings: &Settings) -> Result<CoefficientSet> {
    let m = state.parties();
    match m {
        2 => {
            let d = schmidt_decompose(state, &SubsystemSet::from_zero_based(vec![0]), settings.rank_tol)?;
            Ok(CoefficientSet::new(
                d.coefficients,
                Provenance {
                    rule: "bipartite Schmidt decomposition".into(),
                    exact: true,
                    ..Provenance::default()
                },
            ))
        }
        3 | 4 => branch_coefficients(state, settings),
        _ => Err(Error::Unsupported(format!(
            "Schmidt coefficients of a genuinely entangled {m}-party state"
        ))),
    }
}

/// Shared shape of the three- and four-party constructions.
fn branch_coefficients(state: &PureState, settings: &Settings) -> Result<CoefficientSet> {
    let m = state.parties();
    let sn: SchmidtNumberResult = pure_schmidt_number(state, settings)?;
    let mut exact = sn.exact;
    let mut notes = Vec::new();
    if !sn.exact {
        notes.push(format!("Schmidt number only bracketed: {sn}"));
    }
    if m == 4 {
        notes.push("element score is the maximum over its own three-party branches".into());
    }
    let mut branches = Vec::new();
    for party in sn.maximizers() {
        let term = sn.terms.iter().find(|t| t.party == party).expect("maximizer has a term");
        let i = party - 1;
        let sigma = scaled_local_spectrum(state, i, settings.rank_tol)?;
        let target = term.reduction_hi;
        if term.reduction_lo != term.reduction_hi {
            exact = false;
        }
        let (tail, element_entropy) = if target == 1 {
            (vec![std::f64::consts::FRAC_1_SQRT_2], 0.0)
        } else {
            let rest = SubsystemSet::from_zero_based((0..m).filter(|&q| q != i).collect());
            let rho = state.reduce(&rest)?;
            let el = max_entropy_ensemble_element(&rho, target, settings)?;
            exact &= el.exact;
            let tail: Vec<f64> = el
                .coefficients
                .iter()
                .map(|g| g * std::f64::consts::FRAC_1_SQRT_2)
                .collect();
            (tail, el.entropy)
        };
        let score = if m == 3 {
            entropy_of(&sigma) + entropy_of(&tail)
        } else {
            entropy_of(&sigma) + element_entropy
        };
        let mut values = sigma;
        values.extend(tail);
        branches.push(Branch { party, score, values });
    }
    let best = branches.iter().map(|b| b.score).fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = branches
        .iter()
        .filter(|b| b.score >= best - TIE_TOL)
        .map(|b| b.party)
        .collect();
    let chosen = branches
        .iter()
        .find(|b| b.score >= best - TIE_TOL)
        .expect("at least one branch")
        .clone();
    Ok(CoefficientSet::new(
        chosen.values.clone(),
        Provenance {
            rule: format!("{m}-party genuinely entangled branch"),
            party: Some(chosen.party),
            ties,
            branches,
            exact,
            notes,
        },
    ))
}

fn vector_of(x: &[f64]) -> CVector {
    let k = x.len() / 2;
    CVector::from_fn(k, |a, _| C64::new(x[2 * a], x[2 * a + 1]))
}

fn reals_of(u: &CVector) -> Vec<f64> {
    u.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Maximum-entropy pure state `φ ∝ ρ^{1/2}|u⟩` in the ensembles of `rho`
/// whose rank equals `rank_target`.
///
/// For two parties the rank is the Schmidt rank and the entropy is the
/// entanglement entropy; for more parties they are the Schmidt number and
/// the generalized EoF. Starting points are the eigenvectors, the elements
/// of the Schmidt-number witness, and seeded random directions; elements of
/// the wrong rank are discarded.
pub fn max_entropy_ensemble_element(
    rho: &DensityMatrix,
    rank_target: usize,
    settings: &Settings,
) -> Result<EnsembleElement> {
    let spec = eigh(rho.matrix());
    let k = rank_of_values(&spec.values, settings.rank_tol);
    let profile = rho.profile().clone();
    if k == 1 {
        let psi = PureState::normalized(profile, spec.vector(0))?;
        let el = describe(&psi, settings)?;
        if el.rank != rank_target {
            return Err(Error::Domain(format!(
                "pure input has rank {} but rank {rank_target} was requested",
                el.rank
            )));
        }
        return Ok(el);
    }
    let root = root_factor(&spec, k);
    let element = |u: &CVector| -> Result<PureState> { PureState::normalized(profile.clone(), &root * u) };
    let coords = |psi: &PureState| -> CVector {
        CVector::from_fn(k, |a, _| {
            spec.vector(a).dotc(psi.amplitudes()) / C64::new(spec.values[a].sqrt(), 0.0)
        })
    };

    let mut starts: Vec<CVector> = (0..k)
        .map(|a| {
            let mut u = CVector::zeros(k);
            u[a] = C64::new(1.0, 0.0);
            u
        })
        .collect();
    if let Some(w) = mixed_schmidt_number(rho, settings)?.witness {
        starts.extend(w.states.iter().map(coords));
    }
    let randoms = settings.budget.restarts.min(ELEMENT_RESTARTS);
    let mut rng = seeded_rng(settings.budget.seed, 2000);
    for _ in 0..randoms {
        starts.push(gaussian_vector(k, &mut rng));
    }

    let two_party = rho.parties() == 2;
    let mut best: Option<EnsembleElement> = None;
    let consider = |el: EnsembleElement, best: &mut Option<EnsembleElement>| {
        if el.rank == rank_target && best.as_ref().is_none_or(|b| el.entropy > b.entropy + 1e-12) {
            *best = Some(el);
        }
    };
    for u in &starts {
        let psi = element(u)?;
        consider(describe(&psi, settings)?, &mut best);
        if two_party {
            // smooth ascent on the full entropy, filtered afterwards
            let left = SubsystemSet::from_zero_based(vec![0]);
            let f = |x: &[f64]| -> f64 {
                let v = &root * vector_of(x);
                let n = v.norm();
                if n < 1e-300 {
                    return 0.0;
                }
                match PureState::normalized(profile.clone(), v)
                    .and_then(|p| schmidt_decompose(&p, &left, 0.0))
                {
                    Ok(d) => -entropy_of(&d.coefficients),
                    Err(_) => 0.0,
                }
            };
            let min = bfgs(f, &reals_of(u), settings.budget.iterations.min(200), 1e-10);
            let psi = element(&vector_of(&min.x))?;
            consider(describe(&psi, settings)?, &mut best);
        }
    }
    // local improvement under the hard rank constraint
    if let Some(start) = best.clone() {
        let x0 = reals_of(&coords(&start.state));
        let f = |x: &[f64]| -> f64 {
            match element(&vector_of(x)).and_then(|p| describe(&p, settings)) {
                Ok(el) if el.rank == rank_target => -el.entropy,
                _ => 1e3,
            }
        };
        let evals = if two_party { 400 } else { 120 };
        let min = nelder_mead(f, &x0, 0.1, evals, 1e-12);
        if min.f < -start.entropy - 1e-12 {
            let psi = element(&vector_of(&min.x))?;
            consider(describe(&psi, settings)?, &mut best);
        }
    }
    best.ok_or_else(|| {
        Error::Domain(format!(
            "no ensemble element of rank {rank_target} found within the search budget"
        ))
    })
}

/// Generalized EoF of a density matrix as an interval.
#[derive(Clone, Debug)]
pub struct EofInterval {
    pub lo: f64,
    pub hi: f64,
    /// `true` only for pure inputs, where the value is exact.
    pub exact: bool,
    /// Ensemble attaining `hi`.
    pub witness: Option<EnsembleCandidate>,
    pub notes: Vec<String>,
}

/// Convex roof `inf Σ p_j E(ψ_j)`, bracketed by `0` below and the best
/// searched ensemble above.
pub fn mixed_generalized_eof(rho: &DensityMatrix, settings: &Settings) -> Result<EofInterval> {
    let spec = eigh(rho.matrix());
    let k = rank_of_values(&spec.values, settings.rank_tol);
    if k == 1 {
        let psi = PureState::normalized(rho.profile().clone(), spec.vector(0))?;
        let e = generalized_eof(&pure_schmidt_coefficients(&psi, settings)?);
        return Ok(EofInterval {
            lo: e,
            hi: e,
            exact: true,
            witness: Some(EnsembleCandidate::singleton(psi)),
            notes: vec!["pure input".into()],
        });
    }
    let mut candidates: Vec<(String, EnsembleCandidate)> = vec![("eigen-ensemble".into(), eigen_ensemble(rho, &spec, k)?)];
    if k == 2 {
        if let Some(line) = RangeLine::analyze(rho, &spec, settings.rank_tol)? {
            if let Some(c) = line.cone() {
                candidates.push(("product-type rays of the range".into(), c.clone()));
            }
        }
    }
    if let Some(w) = mixed_schmidt_number(rho, settings)?.witness {
        candidates.push(("Schmidt-number witness".into(), w));
    }
    let root = root_factor(&spec, k);
    for r in 0..settings.budget.restarts.min(16) {
        let n = k + r % (k * k - k + 1);
        let mut rng = seeded_rng(settings.budget.seed, 3000 + r as u64);
        let u = haar_isometry(n, k, &mut rng);
        candidates.push((format!("random isometry {r}"), ensemble_from_isometry(rho.profile(), &root, &u)?));
    }
    let mut best: Option<(f64, String, EnsembleCandidate)> = None;
    let mut skipped = 0usize;
    for (name, c) in candidates {
        let mut total = 0.0;
        let mut ok = true;
        for (p, s) in c.weights.iter().zip(&c.states) {
            match pure_schmidt_coefficients(s, settings) {
                Ok(cs) => total += p * generalized_eof(&cs),
                Err(Error::Unsupported(_)) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !ok {
            skipped += 1;
            continue;
        }
        if best.as_ref().is_none_or(|(b, _, _)| total < *b - 1e-12) {
            best = Some((total, name, c));
        }
    }
    let Some((hi, name, witness)) = best else {
        return Err(Error::Unsupported(
            "no candidate ensemble has coefficients defined for every element".into(),
        ));
    };
    let mut notes = vec![format!("upper bound from {name}")];
    if skipped > 0 {
        notes.push(format!("{skipped} candidate ensemble(s) skipped"));
    }
    Ok(EofInterval {
        lo: 0.0,
        hi: hi.max(0.0),
        exact: hi <= 1e-12,
        witness: Some(witness),
        notes,
    })
}
