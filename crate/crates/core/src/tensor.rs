//! Dense multipartite states and operators.
//!
//! Amplitudes are stored row-major over the multi-index `(i_1, ..., i_m)` with
//! party 1 varying slowest. Party indices are 1-based in every public
//! constructor and accessor ([`SubsystemSet::new`], labels, reports) and
//! 0-based internally.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Norm tolerance for [`PureState`].
pub const NORM_TOL: f64 = 1e-10;
/// Hermiticity, trace and positivity tolerance for [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-10;
/// Default relative cutoff used by [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Local dimensions `N_1, ..., N_m` of an `m`-party system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimensionProfile {
    dims: Vec<usize>,
}

impl DimensionProfile {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidProfile("at least one party is required".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidProfile(format!(
                "party {} has dimension 0",
                pos + 1
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidProfile("total dimension overflows".into()))?;
        if total > MAX_TOTAL_DIM {
            return Err(Error::InvalidProfile(format!(
                "total dimension {total} exceeds the dense limit {MAX_TOTAL_DIM}"
            )));
        }
        Ok(Self { dims })
    }

    /// `m` qubits.
    pub fn qubits(m: usize) -> Result<Self> {
        Self::new(vec![2; m])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Profile of the parties in `set`, in increasing party order.
    pub fn restrict(&self, set: &SubsystemSet) -> DimensionProfile {
        DimensionProfile {
            dims: set.zero_based().iter().map(|&p| self.dims[p]).collect(),
        }
    }

    /// Product of the local dimensions of `set`.
    pub fn dim_of(&self, set: &SubsystemSet) -> usize {
        set.zero_based().iter().map(|&p| self.dims[p]).product()
    }

    pub(crate) fn check_set(&self, set: &SubsystemSet) -> Result<()> {
        match set.zero_based().last() {
            Some(&last) if last >= self.parties() => Err(Error::PartyOutOfRange {
                index: last + 1,
                parties: self.parties(),
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DimensionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Desk-scale cap on `∏ N_i`.
pub const MAX_TOTAL_DIM: usize = 1 << 12;

/// A nonempty set of parties. Constructed from 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsystemSet {
    // 0-based, strictly increasing
    indices: Vec<usize>,
}

impl SubsystemSet {
    /// Builds a set from strictly increasing 1-based party indices.
    pub fn new(one_based: &[usize]) -> Result<Self> {
        if one_based.is_empty() {
            return Err(Error::Domain("a subsystem set must be nonempty".into()));
        }
        if one_based.contains(&0) {
            return Err(Error::Domain("party indices are 1-based".into()));
        }
        if one_based.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "party indices must be strictly increasing, got {one_based:?}"
            )));
        }
        Ok(Self {
            indices: one_based.iter().map(|i| i - 1).collect(),
        })
    }

    /// Every party of an `m`-party system.
    pub fn all(m: usize) -> Self {
        Self {
            indices: (0..m).collect(),
        }
    }

    pub(crate) fn from_zero_based(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        debug_assert!(!indices.is_empty());
        Self { indices }
    }

    pub fn single(party: usize) -> Result<Self> {
        Self::new(&[party])
    }

    pub fn zero_based(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `true` if the 1-based `party` belongs to the set.
    pub fn contains(&self, party: usize) -> bool {
        party >= 1 && self.indices.binary_search(&(party - 1)).is_ok()
    }

    /// The remaining parties of an `m`-party system, or `None` when the set
    /// already covers all of them.
    pub fn complement(&self, m: usize) -> Option<SubsystemSet> {
        let rest: Vec<usize> = (0..m).filter(|p| self.indices.binary_search(p).is_err()).collect();
        if rest.is_empty() {
            None
        } else {
            Some(Self { indices: rest })
        }
    }

    /// Compact label such as `123`, or `1.10.11` once indices need two digits.
    pub fn label(&self) -> String {
        let one = self.one_based();
        if one.iter().all(|&i| i < 10) {
            one.iter().map(|i| i.to_string()).collect()
        } else {
            one.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
        }
    }
}

impl fmt::Display for SubsystemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Index bookkeeping for viewing the full space as `keep ⊗ rest`.
///
/// `full[k * rest_dim + t]` is the flat index whose `keep` digits read `k`
/// and whose remaining digits read `t`, both row-major in party order.
pub(crate) struct Split {
    pub keep_dim: usize,
    pub rest_dim: usize,
    pub full: Vec<usize>,
}

impl Split {
    pub fn new(profile: &DimensionProfile, keep: &SubsystemSet) -> Self {
        let dims = profile.dims();
        let m = dims.len();
        let mut in_keep = vec![false; m];
        for &p in keep.zero_based() {
            in_keep[p] = true;
        }
        let keep_dim: usize = (0..m).filter(|&p| in_keep[p]).map(|p| dims[p]).product();
        let total = profile.total();
        let rest_dim = total / keep_dim;
        let mut full = vec![0usize; total];
        let mut digits = vec![0usize; m];
        for flat in 0..total {
            let mut rem = flat;
            for p in (0..m).rev() {
                digits[p] = rem % dims[p];
                rem /= dims[p];
            }
            let (mut k, mut t) = (0usize, 0usize);
            for p in 0..m {
                if in_keep[p] {
                    k = k * dims[p] + digits[p];
                } else {
                    t = t * dims[p] + digits[p];
                }
            }
            full[k * rest_dim + t] = flat;
        }
        Self {
            keep_dim,
            rest_dim,
            full,
        }
    }

    #[inline]
    pub fn at(&self, k: usize, t: usize) -> usize {
        self.full[k * self.rest_dim + t]
    }

    /// Coefficient matrix `C[k, t] = ψ[full(k, t)]`.
    pub fn matrix(&self, amps: &CVector) -> CMatrix {
        CMatrix::from_fn(self.keep_dim, self.rest_dim, |k, t| amps[self.at(k, t)])
    }

    /// Inverse of [`Split::matrix`].
    pub fn vector(&self, mat: &CMatrix) -> CVector {
        let mut out = CVector::zeros(self.keep_dim * self.rest_dim);
        for k in 0..self.keep_dim {
            for t in 0..self.rest_dim {
                out[self.at(k, t)] = mat[(k, t)];
            }
        }
        out
    }
}

/// A normalized pure state on a [`DimensionProfile`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    profile: DimensionProfile,
    amplitudes: CVector,
}

impl PureState {
    /// Wraps amplitudes whose Euclidean norm is 1 within [`NORM_TOL`].
    pub fn new(profile: DimensionProfile, amplitudes: CVector) -> Result<Self> {
        check_len(&profile, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            profile,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` first. Fails only on a zero vector.
    pub fn normalized(profile: DimensionProfile, amplitudes: CVector) -> Result<Self> {
        check_len(&profile, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            profile,
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    /// Computational basis state; `digits` holds one level per party.
    pub fn basis(profile: DimensionProfile, digits: &[usize]) -> Result<Self> {
        if digits.len() != profile.parties() {
            return Err(Error::Domain(format!(
                "{} digits given for {} parties",
                digits.len(),
                profile.parties()
            )));
        }
        let mut flat = 0usize;
        for (p, (&d, &n)) in digits.iter().zip(profile.dims()).enumerate() {
            if d >= n {
                return Err(Error::Domain(format!(
                    "level {d} out of range for party {} of dimension {n}",
                    p + 1
                )));
            }
            flat = flat * n + d;
        }
        let mut amps = CVector::zeros(profile.total());
        amps[flat] = C64::new(1.0, 0.0);
        Ok(Self {
            profile,
            amplitudes: amps,
        })
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    pub fn parties(&self) -> usize {
        self.profile.parties()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|self⟩ ⊗ |other⟩`, with `other`'s parties appended after this one's.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.profile.dims().to_vec();
        dims.extend_from_slice(other.profile.dims());
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        PureState {
            profile: DimensionProfile { dims },
            amplitudes: amps,
        }
    }

    /// `(A_1 ⊗ ... ⊗ A_m)|ψ⟩` without renormalization.
    pub fn apply_local_raw(&self, ops: &[CMatrix]) -> Result<CVector> {
        if ops.len() != self.parties() {
            return Err(Error::Domain(format!(
                "{} local operators for {} parties",
                ops.len(),
                self.parties()
            )));
        }
        let mut amps = self.amplitudes.clone();
        for (p, op) in ops.iter().enumerate() {
            let n = self.profile.dims()[p];
            if op.nrows() != n || op.ncols() != n {
                return Err(Error::Domain(format!(
                    "operator on party {} must be {n}x{n}",
                    p + 1
                )));
            }
            let split = Split::new(&self.profile, &SubsystemSet::from_zero_based(vec![p]));
            let mat = op * split.matrix(&amps);
            amps = split.vector(&mat);
        }
        Ok(amps)
    }

    /// `(A_1 ⊗ ... ⊗ A_m)|ψ⟩`, renormalized.
    pub fn apply_local(&self, ops: &[CMatrix]) -> Result<PureState> {
        let amps = self.apply_local_raw(ops)?;
        PureState::normalized(self.profile.clone(), amps)
    }

    /// Reorders the parties: new party `q` is old party `order[q - 1]`, all
    /// 1-based.
    pub fn permute_parties(&self, order: &[usize]) -> Result<PureState> {
        let m = self.parties();
        let mut seen = vec![false; m];
        for &p in order {
            if p == 0 || p > m || seen[p - 1] {
                return Err(Error::Domain(format!("{order:?} is not a permutation of 1..={m}")));
            }
            seen[p - 1] = true;
        }
        if order.len() != m {
            return Err(Error::Domain(format!("{order:?} is not a permutation of 1..={m}")));
        }
        let zero: Vec<usize> = order.iter().map(|p| p - 1).collect();
        Ok(self.permuted(&zero))
    }

    /// 0-based form of [`PureState::permute_parties`].
    pub(crate) fn permuted(&self, order: &[usize]) -> PureState {
        let dims: Vec<usize> = order.iter().map(|&p| self.profile.dims[p]).collect();
        let profile = DimensionProfile { dims };
        let m = order.len();
        let total = profile.total();
        let mut amps = CVector::zeros(total);
        let old_dims = self.profile.dims();
        let mut digits = vec![0usize; m];
        for flat in 0..total {
            let mut rem = flat;
            for q in (0..m).rev() {
                digits[q] = rem % profile.dims[q];
                rem /= profile.dims[q];
            }
            let mut old_digits = vec![0usize; m];
            for q in 0..m {
                old_digits[order[q]] = digits[q];
            }
            let old = old_digits
                .iter()
                .zip(old_dims)
                .fold(0usize, |acc, (&d, &n)| acc * n + d);
            amps[flat] = self.amplitudes[old];
        }
        PureState {
            profile,
            amplitudes: amps,
        }
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm()
    }
}

fn check_len(profile: &DimensionProfile, len: usize) -> Result<()> {
    if len != profile.total() {
        return Err(Error::InvalidProfile(format!(
            "{len} amplitudes for total dimension {} ({profile})",
            profile.total()
        )));
    }
    Ok(())
}

/// A Hermitian, positive semidefinite, trace-one operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    profile: DimensionProfile,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity within [`DENSITY_TOL`].
    pub fn new(profile: DimensionProfile, matrix: CMatrix) -> Result<Self> {
        let n = profile.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidProfile(format!(
                "{}x{} matrix for total dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > DENSITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let matrix = hermitize(&matrix);
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::BadTrace(tr));
        }
        let min = eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { profile, matrix })
    }

    /// Builds from a matrix known to be a density operator up to rounding.
    pub(crate) fn from_parts(profile: DimensionProfile, matrix: CMatrix) -> Self {
        Self {
            profile,
            matrix: hermitize(&matrix),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &PureState) -> Self {
        let a = state.amplitudes();
        Self::from_parts(state.profile().clone(), a * a.adjoint())
    }

    /// `Σ p_j |ψ_j⟩⟨ψ_j|`. Weights must be nonnegative and sum to 1.
    pub fn mixture(items: &[(f64, PureState)]) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let profile = first.1.profile().clone();
        let n = profile.total();
        let mut mat = CMatrix::zeros(n, n);
        let mut total = 0.0;
        for (p, psi) in items {
            if psi.profile() != &profile {
                return Err(Error::Domain("mixture components differ in profile".into()));
            }
            if *p < 0.0 {
                return Err(Error::Domain(format!("negative mixture weight {p}")));
            }
            total += p;
            let a = psi.amplitudes();
            mat += a * a.adjoint() * C64::new(*p, 0.0);
        }
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::BadTrace(total));
        }
        Self::new(profile, mat)
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    pub fn parties(&self) -> usize {
        self.profile.parties()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Partial trace over everything outside `keep`.
pub trait Reduce {
    fn reduce(&self, keep: &SubsystemSet) -> Result<DensityMatrix>;
}

impl Reduce for PureState {
    fn reduce(&self, keep: &SubsystemSet) -> Result<DensityMatrix> {
        self.profile.check_set(keep)?;
        let split = Split::new(&self.profile, keep);
        let c = split.matrix(&self.amplitudes);
        Ok(DensityMatrix::from_parts(
            self.profile.restrict(keep),
            &c * c.adjoint(),
        ))
    }
}

impl Reduce for DensityMatrix {
    fn reduce(&self, keep: &SubsystemSet) -> Result<DensityMatrix> {
        self.profile.check_set(keep)?;
        let split = Split::new(&self.profile, keep);
        let (kd, td) = (split.keep_dim, split.rest_dim);
        let out = CMatrix::from_fn(kd, kd, |a, b| {
            (0..td)
                .map(|t| self.matrix[(split.at(a, t), split.at(b, t))])
                .sum()
        });
        Ok(DensityMatrix::from_parts(self.profile.restrict(keep), out))
    }
}

/// Reduced state on `keep` (partial trace over its complement).
pub fn reduce<S: Reduce + ?Sized>(state: &S, keep: &SubsystemSet) -> Result<DensityMatrix> {
    state.reduce(keep)
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// (columns of `vectors`).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (i, &l) in self.values.iter().enumerate() {
            let v = self.vectors.column(i);
            out += v * v.adjoint() * C64::new(l, 0.0);
        }
        out
    }
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let dev = hermitian_deviation(m);
    if dev > DENSITY_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Unchecked eigendecomposition of a Hermitian matrix, descending.
pub(crate) fn eigh(m: &CMatrix) -> Spectrum {
    let n = m.nrows();
    if n == 0 {
        return Spectrum {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum { values, vectors }
}

pub(crate) fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let mut vals: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Descending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.
pub fn spectrum(mat: &CMatrix) -> Result<Spectrum> {
    check_hermitian(mat)?;
    Ok(eigh(mat))
}

/// Number of eigenvalues above `tol × λ_max`.
pub fn numerical_rank(mat: &CMatrix, tol: f64) -> Result<usize> {
    check_hermitian(mat)?;
    Ok(rank_of_values(&eigenvalues(mat), tol))
}

pub(crate) fn rank_of_values(desc: &[f64], tol: f64) -> usize {
    match desc.first() {
        Some(&max) if max > 0.0 => desc.iter().filter(|&&l| l > tol * max).count(),
        _ => 0,
    }
}

/// `(1/√2) ρ^{1/2}`.
pub fn scaled_root(rho: &DensityMatrix) -> Result<CMatrix> {
    let spec = eigh(rho.matrix());
    if let Some(&min) = spec.values.last() {
        if min < -DENSITY_TOL {
            return Err(Error::NotPositive(min));
        }
    }
    let roots: Vec<f64> = spec
        .values
        .iter()
        .map(|&l| (l.max(0.0) / 2.0).sqrt())
        .collect();
    Ok(Spectrum {
        values: roots,
        vectors: spec.vectors,
    }
    .reconstruct())
}

/// Partial transpose of `mat` on the parties in `over`.
pub(crate) fn partial_transpose(
    profile: &DimensionProfile,
    mat: &CMatrix,
    over: &SubsystemSet,
) -> CMatrix {
    let split = Split::new(profile, over);
    let n = profile.total();
    let mut out = CMatrix::zeros(n, n);
    for ak in 0..split.keep_dim {
        for at in 0..split.rest_dim {
            let a = split.at(ak, at);
            for bk in 0..split.keep_dim {
                for bt in 0..split.rest_dim {
                    let b = split.at(bk, bt);
                    out[(split.at(bk, at), split.at(ak, bt))] = mat[(a, b)];
                }
            }
        }
    }
    out
}
