//! Pure-state ensembles `ρ = Σ_j p_j |ψ_j⟩⟨ψ_j|` and the search for
//! ensembles whose elements all have small Schmidt number.
//!
//! Every ensemble of a rank-`k` matrix with `n` elements has the form
//! `√p_j |ψ_j⟩ = M u_j` with `M = V √Λ` and `u_j` the rows of an `n × k`
//! isometry `U`. The search runs Riemannian gradient descent over `U` on a
//! smooth surrogate that vanishes exactly when every element has low
//! Schmidt rank across the relevant cuts, then verifies the result with the
//! exact pure-state rule.

use crate::error::{Error, Result};
use crate::partition::bipartitions_zero_based;
use crate::range::RangeLine;
use crate::schmidt_number::{pure_bounds, Mode};
use crate::states::{haar_isometry, seeded_rng};
use crate::tensor::{
    eigh, rank_of_values, CMatrix, CVector, DensityMatrix, DimensionProfile, PureState, Spectrum,
    Split, SubsystemSet, C64,
};
use crate::Settings;

/// Elements lighter than this are dropped from a search result.
const MIN_WEIGHT: f64 = 1e-10;
/// Largest reconstruction error accepted for a witness.
pub(crate) const RECONSTRUCTION_TOL: f64 = 1e-7;

/// A finite pure-state decomposition of a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleCandidate {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl EnsembleCandidate {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Self {
        debug_assert_eq!(weights.len(), states.len());
        Self { weights, states }
    }

    pub fn singleton(state: PureState) -> Self {
        Self::new(vec![1.0], vec![state])
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `Σ_j p_j |ψ_j⟩⟨ψ_j|`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.states[0].amplitudes().len();
        let mut out = CMatrix::zeros(n, n);
        for (p, s) in self.weights.iter().zip(&self.states) {
            let a = s.amplitudes();
            out += a * a.adjoint() * C64::new(*p, 0.0);
        }
        out
    }

    /// Largest entry of `|Σ_j p_j ψ_jψ_j† − ρ|`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        (self.reconstruct() - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Ensemble of the `rank` leading eigenvectors.
pub(crate) fn eigen_ensemble(rho: &DensityMatrix, spec: &Spectrum, rank: usize) -> Result<EnsembleCandidate> {
    let total: f64 = spec.values[..rank].iter().sum();
    let states = (0..rank)
        .map(|i| PureState::normalized(rho.profile().clone(), spec.vector(i)))
        .collect::<Result<Vec<_>>>()?;
    let weights = spec.values[..rank].iter().map(|l| l / total).collect();
    Ok(EnsembleCandidate::new(weights, states))
}

/// `M = V √Λ` over the leading `rank` eigenpairs.
pub(crate) fn root_factor(spec: &Spectrum, rank: usize) -> CMatrix {
    let n = spec.vectors.nrows();
    CMatrix::from_fn(n, rank, |r, c| spec.vectors[(r, c)] * spec.values[c].max(0.0).sqrt())
}

/// Elements `M u_j` for the rows of `u`, light ones dropped.
pub(crate) fn ensemble_from_isometry(
    profile: &DimensionProfile,
    root: &CMatrix,
    u: &CMatrix,
) -> Result<EnsembleCandidate> {
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for j in 0..u.nrows() {
        let v = root * u.row(j).transpose();
        let p = v.norm_squared();
        if p < MIN_WEIGHT {
            continue;
        }
        weights.push(p);
        states.push(PureState::normalized(profile.clone(), v)?);
    }
    let total: f64 = weights.iter().sum();
    if states.is_empty() || total <= 0.0 {
        return Err(Error::Internal("isometry produced an empty ensemble".into()));
    }
    weights.iter_mut().for_each(|p| *p /= total);
    Ok(EnsembleCandidate::new(weights, states))
}

/// `max_j R(ψ_j)` using the upper end of each element's value.
pub(crate) fn ensemble_value(c: &EnsembleCandidate, settings: &Settings) -> Result<usize> {
    let mut worst = 0;
    for s in &c.states {
        worst = worst.max(pure_bounds(s, settings, Mode::Full)?.hi);
    }
    Ok(worst)
}

/// Every element has Schmidt number at most `target`.
fn ensemble_within(c: &EnsembleCandidate, target: usize, settings: &Settings) -> Result<bool> {
    for s in &c.states {
        if pure_bounds(s, settings, Mode::Full)?.hi > target {
            return Ok(false);
        }
    }
    Ok(true)
}

fn accept(c: &EnsembleCandidate, rho: &DensityMatrix, target: usize, settings: &Settings) -> Result<bool> {
    Ok(c.reconstruction_error(rho) <= RECONSTRUCTION_TOL && ensemble_within(c, target, settings)?)
}

/// Searches for an ensemble of `rho` whose elements all have Schmidt number
/// at most `target_r`.
///
/// Tries, in order, the mixture of product-type rays of a rank-two range,
/// the eigen-ensemble, and seeded gradient restarts. Any returned ensemble
/// reconstructs `rho` within `1e-7` and has been checked element by element.
/// `Ok(None)` means the budget ran out, not that no such ensemble exists.
pub fn ensemble_search(
    rho: &DensityMatrix,
    target_r: usize,
    settings: &Settings,
) -> Result<Option<EnsembleCandidate>> {
    if target_r == 0 {
        return Err(Error::Domain("target Schmidt number must be at least 1".into()));
    }
    let spec = eigh(rho.matrix());
    let rank = rank_of_values(&spec.values, settings.rank_tol);
    if rank == 2 {
        if let Some(line) = RangeLine::analyze(rho, &spec, settings.rank_tol)? {
            if let Some(cone) = line.cone() {
                if accept(cone, rho, target_r, settings)? {
                    return Ok(Some(cone.clone()));
                }
            }
        }
    }
    let eig = eigen_ensemble(rho, &spec, rank)?;
    if accept(&eig, rho, target_r, settings)? {
        return Ok(Some(eig));
    }
    if rank == 1 {
        return Ok(None);
    }
    gradient_search(rho, &spec, rank, target_r, settings)
}

/// Per-cut tail `‖C‖² − (top-s eigenvalues of C C†)` and how cuts combine.
struct Surrogate {
    splits: Vec<Split>,
    keep: usize,
    take_min: bool,
}

impl Surrogate {
    fn new(profile: &DimensionProfile, target: usize) -> Self {
        let m = profile.parties();
        let single = |p: usize| Split::new(profile, &SubsystemSet::from_zero_based(vec![p]));
        if target == 1 {
            Self {
                splits: (0..m).map(single).collect(),
                keep: 1,
                take_min: false,
            }
        } else if m == 2 {
            Self {
                splits: vec![single(0)],
                keep: target,
                take_min: false,
            }
        } else {
            Self {
                splits: bipartitions_zero_based(m)
                    .into_iter()
                    .map(|side| Split::new(profile, &SubsystemSet::from_zero_based(side)))
                    .collect(),
                keep: 1,
                take_min: true,
            }
        }
    }

    /// Value and Wirtinger gradient `∂h/∂ψ̄`.
    fn eval(&self, psi: &CVector) -> (f64, CVector) {
        let mut total = 0.0;
        let mut grad = CVector::zeros(psi.len());
        let mut best: Option<(f64, CVector)> = None;
        for split in &self.splits {
            let c = split.matrix(psi);
            let gram = &c * c.adjoint();
            let spec = eigh(&gram);
            let trace: f64 = spec.values.iter().sum();
            let keep = self.keep.min(spec.values.len());
            let top: f64 = spec.values[..keep].iter().sum();
            let tail = (trace - top).max(0.0);
            let mut proj_c = CMatrix::zeros(c.nrows(), c.ncols());
            for l in 0..keep {
                let v = spec.vectors.column(l);
                proj_c += &v * (v.adjoint() * &c);
            }
            let g = split.vector(&(&c - proj_c));
            if self.take_min {
                if best.as_ref().is_none_or(|(t, _)| tail < *t) {
                    best = Some((tail, g));
                }
            } else {
                total += tail;
                grad += g;
            }
        }
        match best {
            Some(b) => b,
            None => (total, grad),
        }
    }
}

fn objective(s: &Surrogate, root: &CMatrix, u: &CMatrix, with_grad: bool) -> (f64, CMatrix) {
    let n = u.nrows();
    let k = u.ncols();
    let mut f = 0.0;
    let mut e = CMatrix::zeros(if with_grad { n } else { 0 }, k);
    for j in 0..n {
        let psi = root * u.row(j).transpose();
        let (h, g) = s.eval(&psi);
        f += h;
        if with_grad {
            let row = root.adjoint() * g;
            for a in 0..k {
                e[(j, a)] = row[a];
            }
        }
    }
    (f, e)
}

fn polar(a: &CMatrix) -> CMatrix {
    let svd = a.clone().svd(true, true);
    svd.u.expect("U") * svd.v_t.expect("V^T")
}

/// Gradient restarts for a fixed target; see the module docs.
pub(crate) fn gradient_search(
    rho: &DensityMatrix,
    spec: &Spectrum,
    rank: usize,
    target: usize,
    settings: &Settings,
) -> Result<Option<EnsembleCandidate>> {
    let k = rank;
    let root = root_factor(spec, k);
    let surrogate = Surrogate::new(rho.profile(), target);
    let span = k * k - k + 1;
    for restart in 0..settings.budget.restarts {
        let n = k + restart % span;
        let mut u = if restart == 0 {
            CMatrix::identity(n, k)
        } else {
            let mut rng = seeded_rng(settings.budget.seed, 1000 + restart as u64);
            haar_isometry(n, k, &mut rng)
        };
        let (mut f, mut e) = objective(&surrogate, &root, &u, true);
        let mut step = 1.0;
        let mut last_check = f;
        for it in 0..settings.budget.iterations {
            if f < 1e-14 {
                break;
            }
            let herm = {
                let x = u.adjoint() * &e;
                (&x + x.adjoint()) * C64::new(0.5, 0.0)
            };
            let xi = &e - &u * herm;
            let norm2 = xi.norm_squared();
            if norm2 < 1e-30 {
                break;
            }
            let mut accepted = false;
            for _ in 0..40 {
                let trial = polar(&(&u - &xi * C64::new(step, 0.0)));
                let (ft, _) = objective(&surrogate, &root, &trial, false);
                if ft <= f - 1e-4 * step * norm2 {
                    u = trial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step = (step * 2.0).min(1e3);
            let next = objective(&surrogate, &root, &u, true);
            f = next.0;
            e = next.1;
            // stagnating at a positive value
            if it % 50 == 49 {
                if f > 0.999 * last_check && f > 1e-10 {
                    break;
                }
                last_check = f;
            }
        }
        if f > 1e-10 {
            continue;
        }
        let candidate = ensemble_from_isometry(rho.profile(), &root, &u)?;
        if accept(&candidate, rho, target, settings)? {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_product, w_state};
    use crate::tensor::Reduce;

    #[test]
    fn eigen_ensemble_reconstructs() {
        let rho = w_state(3).unwrap().reduce(&SubsystemSet::new(&[1, 2]).unwrap()).unwrap();
        let spec = eigh(rho.matrix());
        let e = eigen_ensemble(&rho, &spec, 2).unwrap();
        assert!(e.reconstruction_error(&rho) < 1e-12);
        assert!((e.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isometry_rows_reconstruct() {
        let rho = w_state(3).unwrap().reduce(&SubsystemSet::new(&[1, 2]).unwrap()).unwrap();
        let spec = eigh(rho.matrix());
        let root = root_factor(&spec, 2);
        let mut rng = seeded_rng(7, 0);
        let u = haar_isometry(4, 2, &mut rng);
        let c = ensemble_from_isometry(rho.profile(), &root, &u).unwrap();
        assert!(c.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn separable_mixture_is_recovered() {
        let p = DimensionProfile::qubits(3).unwrap();
        for seed in 0..5 {
            let rho = DensityMatrix::mixture(&[
                (0.4, random_product(&p, 2 * seed)),
                (0.6, random_product(&p, 2 * seed + 1)),
            ])
            .unwrap();
            let found = ensemble_search(&rho, 1, &Settings::default()).unwrap().expect("separable");
            assert!(found.reconstruction_error(&rho) < 1e-7);
        }
    }

    #[test]
    fn zero_target_is_rejected() {
        let rho = DensityMatrix::from_pure(&w_state(3).unwrap());
        assert!(ensemble_search(&rho, 0, &Settings::default()).is_err());
    }
}
