//! Bipartite Schmidt decomposition, entanglement entropy and the PPT test.

use crate::error::{Error, Result};
use crate::schmidt_number::{self, SchmidtNumberResult};
use crate::tensor::{
    eigenvalues, partial_transpose, rank_of_values, CMatrix, CVector, DensityMatrix, PureState,
    Split, SubsystemSet, C64,
};
use crate::Settings;

/// `|ψ⟩ = Σ_k λ_k |e_k⟩|f_k⟩` across the cut `left | rest`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending, strictly positive; only the `rank` retained values.
    pub coefficients: Vec<f64>,
    /// Columns `|e_k⟩` on the `left` parties.
    pub left_vectors: CMatrix,
    /// Columns `|f_k⟩` on the remaining parties.
    pub right_vectors: CMatrix,
    pub rank: usize,
    pub left: SubsystemSet,
}

impl SchmidtDecomposition {
    /// `Σ_k λ_k |e_k⟩ ⊗ |f_k⟩`, mapped back to the state's party order.
    pub fn reconstruct(&self, state: &PureState) -> CVector {
        let split = Split::new(state.profile(), &self.left);
        let mut c = CMatrix::zeros(split.keep_dim, split.rest_dim);
        for (k, &l) in self.coefficients.iter().enumerate() {
            let e = self.left_vectors.column(k);
            let f = self.right_vectors.column(k);
            c += e * f.transpose() * C64::new(l, 0.0);
        }
        split.vector(&c)
    }
}

/// Singular value decomposition of the coefficient matrix across
/// `left | rest`.
///
/// A coefficient `λ_k` is retained when `λ_k² > tol · λ_1²`, which is the
/// same cutoff [`numerical_rank`](crate::numerical_rank) applies to the
/// reduced state. Each `|e_k⟩` is phased so that its first nonzero component
/// is real and positive.
pub fn schmidt_decompose(state: &PureState, left: &SubsystemSet, tol: f64) -> Result<SchmidtDecomposition> {
    let m = state.parties();
    state.profile().check_set(left)?;
    if left.len() >= m {
        return Err(Error::Domain(format!(
            "bipartition side {left} must be a proper subset of {m} parties"
        )));
    }
    let split = Split::new(state.profile(), left);
    let c = split.matrix(state.amplitudes());
    let svd = c.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let max = svd.singular_values[order[0]];
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| {
            let s = svd.singular_values[i];
            max > 0.0 && s * s > tol * max * max
        })
        .collect();
    let rank = kept.len();
    let mut left_vectors = CMatrix::zeros(split.keep_dim, rank);
    let mut right_vectors = CMatrix::zeros(split.rest_dim, rank);
    let mut coefficients = Vec::with_capacity(rank);
    for (k, &i) in kept.iter().enumerate() {
        let mut e = u.column(i).into_owned();
        let mut f = v_t.row(i).transpose();
        if let Some(z) = e.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = z / z.norm();
            e *= phase.conj();
            f *= phase;
        }
        left_vectors.set_column(k, &e);
        right_vectors.set_column(k, &f);
        coefficients.push(svd.singular_values[i]);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
        rank,
        left: left.clone(),
    })
}

/// `−Σ p log₂ p` over the strictly positive entries.
pub(crate) fn shannon_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// `−Σ_k λ_k² log₂ λ_k²` in bits.
pub fn entanglement_entropy(decomp: &SchmidtDecomposition) -> f64 {
    shannon_bits(decomp.coefficients.iter().map(|l| l * l))
}

/// Eigenvalue threshold below which a partial transpose counts as negative.
pub const PPT_TOL: f64 = 1e-9;

/// Outcome of the partial-transpose test across one cut.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptVerdict {
    /// The partial transpose has an eigenvalue below `-PPT_TOL`.
    pub entangled: bool,
    /// `true` when the verdict decides separability: shapes `1⊗n`, `2⊗2`,
    /// `2⊗3`, or a pure input. Otherwise only `entangled == true` is
    /// conclusive.
    pub exact: bool,
    pub min_eigenvalue: f64,
}

/// Partial-transpose test of `rho` across `cut | rest`.
pub fn ppt_test(rho: &DensityMatrix, cut: &SubsystemSet) -> Result<PptVerdict> {
    let m = rho.parties();
    rho.profile().check_set(cut)?;
    let rest = cut.complement(m).ok_or_else(|| {
        Error::Domain(format!("cut {cut} leaves no parties on the other side"))
    })?;
    let da = rho.profile().dim_of(cut);
    let db = rho.profile().dim_of(&rest);
    let pt = partial_transpose(rho.profile(), rho.matrix(), cut);
    let min = eigenvalues(&pt).last().copied().unwrap_or(0.0);
    let small = da.min(db);
    let large = da.max(db);
    let pure = rank_of_values(&eigenvalues(rho.matrix()), 1e-10) == 1;
    let exact = small == 1 || (small == 2 && large <= 3) || pure;
    Ok(PptVerdict {
        entangled: min < -PPT_TOL,
        exact,
        min_eigenvalue: min,
    })
}

/// `true` iff the partial transpose across `cut` has a negative eigenvalue.
///
/// Decides separability for `2⊗2` and `2⊗3` shapes; elsewhere a `false`
/// answer is inconclusive (see [`ppt_test`]).
pub fn ppt_entangled(rho: &DensityMatrix, cut: &SubsystemSet) -> Result<bool> {
    Ok(ppt_test(rho, cut)?.entangled)
}

/// Convex-roof Schmidt number of a two-party density matrix as an interval.
///
/// The lower end comes from the PPT test (and, for rank-two states, from the
/// product vectors in the range); the upper end is the smallest `r` for which
/// an ensemble with every element of Schmidt rank `≤ r` is found, falling back
/// to `min(N_1, N_2)`.
pub fn mixed_bipartite_schmidt_number(
    rho: &DensityMatrix,
    settings: &Settings,
) -> Result<SchmidtNumberResult> {
    if rho.parties() != 2 {
        return Err(Error::Domain(format!(
            "expected a two-party state, got {} parties",
            rho.parties()
        )));
    }
    schmidt_number::mixed_schmidt_number(rho, settings)
}

pub(crate) fn schmidt_rank(state: &PureState, left: &SubsystemSet, tol: f64) -> Result<usize> {
    Ok(schmidt_decompose(state, left, tol)?.rank)
}
