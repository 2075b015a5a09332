//! State families and seeded random generators.
//!
//! Basis levels are 0-based: `|GHZ_m^(d)⟩` sums `|i⟩^{⊗m}` for `i = 0..d`.
//!
//! Random generators draw from a ChaCha8 stream keyed by `(seed, stream)`,
//! so every sample is reproducible across platforms.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tensor::{CMatrix, CVector, DimensionProfile, PureState, C64};

/// `(|0…01⟩ + |0…10⟩ + … + |10…0⟩)/√m`.
pub fn w_state(m: usize) -> Result<PureState> {
    if m < 2 {
        return Err(Error::Domain(format!("W state needs at least 2 parties, got {m}")));
    }
    let profile = DimensionProfile::qubits(m)?;
    let mut amps = CVector::zeros(profile.total());
    let a = C64::new(1.0 / (m as f64).sqrt(), 0.0);
    for k in 0..m {
        amps[1 << k] = a;
    }
    PureState::new(profile, amps)
}

/// `(1/√d) Σ_i |i⟩^{⊗m}` on `m` parties of dimension `d`.
pub fn ghz_state(m: usize, d: usize) -> Result<PureState> {
    if m < 2 || d < 2 {
        return Err(Error::Domain(format!(
            "GHZ state needs m >= 2 and d >= 2, got m={m}, d={d}"
        )));
    }
    let profile = DimensionProfile::new(vec![d; m])?;
    let mut amps = CVector::zeros(profile.total());
    let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for level in 0..d {
        let flat = (0..m).fold(0usize, |acc, _| acc * d + level);
        amps[flat] = a;
    }
    PureState::new(profile, amps)
}

/// Parameters of the five-term three-qubit canonical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcinParameters {
    lambdas: [f64; 5],
    theta: f64,
}

impl AcinParameters {
    pub fn new(lambdas: [f64; 5], theta: f64) -> Result<Self> {
        if lambdas.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::Domain("canonical-form weights must be nonnegative".into()));
        }
        let norm2: f64 = lambdas.iter().map(|l| l * l).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm2.sqrt()));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta {theta} outside [0, π]")));
        }
        Ok(Self { lambdas, theta })
    }

    pub fn lambdas(&self) -> [f64; 5] {
        self.lambdas
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// `λ₀|000⟩ + λ₁e^{iθ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩`.
pub fn acin_state(params: &AcinParameters) -> Result<PureState> {
    let [l0, l1, l2, l3, l4] = params.lambdas;
    let mut amps = CVector::zeros(8);
    amps[0b000] = C64::new(l0, 0.0);
    amps[0b100] = C64::from_polar(l1, params.theta);
    amps[0b101] = C64::new(l2, 0.0);
    amps[0b110] = C64::new(l3, 0.0);
    amps[0b111] = C64::new(l4, 0.0);
    PureState::new(DimensionProfile::qubits(3)?, amps)
}

/// Seeded generator for stream `stream` of `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| gaussian_c64(rng))
}

pub(crate) fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Haar-distributed `n × n` unitary (QR of a Ginibre matrix with the phases
/// of `R`'s diagonal folded back into `Q`).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    haar_isometry(n, n, rng)
}

/// First `cols` columns of a Haar unitary on `C^rows`.
pub(crate) fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Haar-random global pure state.
pub fn random_pure(profile: &DimensionProfile, seed: u64) -> PureState {
    let mut rng = seeded_rng(seed, 0);
    let v = gaussian_vector(profile.total(), &mut rng);
    PureState::normalized(profile.clone(), v).expect("Gaussian vector is nonzero")
}

/// Product of Haar-random local pure states.
pub fn random_product(profile: &DimensionProfile, seed: u64) -> PureState {
    let mut rng = seeded_rng(seed, 1);
    let mut amps = CVector::from_element(1, C64::new(1.0, 0.0));
    for &n in profile.dims() {
        let v = gaussian_vector(n, &mut rng);
        let v = &v / C64::new(v.norm(), 0.0);
        amps = amps.kronecker(&v);
    }
    PureState::new(profile.clone(), amps).expect("product of unit vectors is normalized")
}

/// One Haar-random unitary per party.
pub fn random_local_unitary(profile: &DimensionProfile, seed: u64) -> Vec<CMatrix> {
    let mut rng = seeded_rng(seed, 2);
    profile
        .dims()
        .iter()
        .map(|&n| haar_unitary(n, &mut rng))
        .collect()
}

/// One Ginibre-random invertible operator per party, resampled until its
/// condition number is below `1e4`.
pub fn random_local_invertible(profile: &DimensionProfile, seed: u64) -> Vec<CMatrix> {
    let mut rng = seeded_rng(seed, 3);
    profile
        .dims()
        .iter()
        .map(|&n| loop {
            let g = ginibre(n, n, &mut rng);
            if condition_number(&g) < 1e4 {
                break g;
            }
        })
        .collect()
}

pub(crate) fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0f64, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{reduce, SubsystemSet};
    use approx::assert_abs_diff_eq;

    #[test]
    fn w3_amplitudes() {
        let w = w_state(3).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for (i, z) in w.amplitudes().iter().enumerate() {
            let expected = if [0b001, 0b010, 0b100].contains(&i) { a } else { 0.0 };
            assert_abs_diff_eq!(z.re, expected, epsilon = 1e-15);
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn w_small_and_large() {
        let w2 = w_state(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(w2.amplitudes()[1].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(w2.amplitudes()[2].re, h, epsilon = 1e-15);
        let w4 = w_state(4).unwrap();
        let nonzero: Vec<f64> = w4
            .amplitudes()
            .iter()
            .filter(|z| z.norm() > 0.0)
            .map(|z| z.re)
            .collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|&x| (x - 0.5).abs() < 1e-15));
        assert!(w_state(1).is_err());
    }

    #[test]
    fn ghz_examples() {
        let g = ghz_state(3, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(g.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(g.amplitudes()[7].re, h, epsilon = 1e-15);
        let bell = ghz_state(2, 2).unwrap();
        assert_abs_diff_eq!(bell.amplitudes()[3].re, h, epsilon = 1e-15);
        let g33 = ghz_state(3, 3).unwrap();
        let nonzero: Vec<usize> = (0..27).filter(|&i| g33.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nonzero, vec![0, 13, 26]);
        assert!(ghz_state(1, 2).is_err());
        assert!(ghz_state(3, 1).is_err());
    }

    #[test]
    fn ghz_reductions_are_flat_diagonal() {
        for (m, d) in [(3, 2), (3, 3), (4, 2)] {
            let g = ghz_state(m, d).unwrap();
            let r = reduce(&g, &SubsystemSet::single(2).unwrap()).unwrap();
            for i in 0..d {
                for j in 0..d {
                    let expected = if i == j { 1.0 / d as f64 } else { 0.0 };
                    assert_abs_diff_eq!(r.matrix()[(i, j)].re, expected, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn acin_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = acin_state(&AcinParameters::new([h, 0.0, 0.0, 0.0, h], 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(ghz.overlap(&ghz_state(3, 2).unwrap()), 1.0, epsilon = 1e-14);

        let zero = acin_state(&AcinParameters::new([1.0, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(zero.amplitudes()[0].re, 1.0);

        let t = 1.0 / 3f64.sqrt();
        let s = acin_state(&AcinParameters::new([0.0, t, t, t, 0.0], 0.0).unwrap()).unwrap();
        let r1 = reduce(&s, &SubsystemSet::single(1).unwrap()).unwrap();
        assert_eq!(crate::numerical_rank(r1.matrix(), 1e-8).unwrap(), 1);
    }

    #[test]
    fn acin_validation() {
        assert!(AcinParameters::new([1.0, 1.0, 0.0, 0.0, 0.0], 0.0).is_err());
        assert!(AcinParameters::new([1.0, 0.0, 0.0, 0.0, 0.0], 4.0).is_err());
        assert!(AcinParameters::new([-1.0, 0.0, 0.0, 0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn generators_are_deterministic_and_normalized() {
        let p = DimensionProfile::new(vec![2, 3, 2]).unwrap();
        assert_eq!(random_pure(&p, 7), random_pure(&p, 7));
        assert_ne!(random_pure(&p, 7), random_pure(&p, 8));
        assert_abs_diff_eq!(random_product(&p, 3).amplitudes().norm(), 1.0, epsilon = 1e-12);
        for u in random_local_unitary(&p, 5) {
            let n = u.nrows();
            let err = (u.adjoint() * &u - CMatrix::identity(n, n)).norm();
            assert!(err < 1e-12);
        }
        for a in random_local_invertible(&p, 5) {
            assert!(condition_number(&a) < 1e4);
        }
    }
}
