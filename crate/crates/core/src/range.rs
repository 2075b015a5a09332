//! Rank-two density matrices: the pure states of the range form a line
//! `α|b₁⟩ + β|b₂⟩`, and the product-type (non genuinely entangled) rays on
//! that line are the common roots of quadratic minors.

use crate::ensemble::EnsembleCandidate;
use crate::error::Result;
use crate::partition::bipartitions_zero_based;
use crate::schmidt_number::{pure_bounds, Mode};
use crate::tensor::{CMatrix, CVector, DensityMatrix, PureState, Spectrum, Split, SubsystemSet, C64};
use crate::Settings;

/// Number of points sampled on the range's Bloch sphere.
const SAMPLES: usize = 24;
/// `σ₂/σ₁` below which a point of the line counts as rank one across a cut.
const RANK_ONE_RATIO: f64 = 1e-6;

pub(crate) struct RangeLine {
    profile_rays: Vec<PureState>,
    basis: [CVector; 2],
    cone: Option<EnsembleCandidate>,
    state: PureState,
}

impl RangeLine {
    /// `None` when the line is degenerate, i.e. some cut is rank one along
    /// the whole line.
    pub fn analyze(rho: &DensityMatrix, spec: &Spectrum, _tol: f64) -> Result<Option<Self>> {
        let profile = rho.profile();
        let b1 = spec.vector(0);
        let b2 = spec.vector(1);
        let mut rays: Vec<CVector> = Vec::new();
        for side in bipartitions_zero_based(profile.parties()) {
            let split = Split::new(profile, &SubsystemSet::from_zero_based(side));
            let x = split.matrix(&b1);
            let y = split.matrix(&b2);
            let Some(points) = rank_one_points(&x, &y) else {
                return Ok(None);
            };
            for (a, b) in points {
                let v = &b1 * a + &b2 * b;
                let v = &v / C64::new(v.norm(), 0.0);
                if !rays.iter().any(|r| r.dotc(&v).norm() > 1.0 - 1e-8) {
                    rays.push(v);
                }
            }
        }
        let profile_rays = rays
            .into_iter()
            .map(|v| PureState::normalized(profile.clone(), v))
            .collect::<Result<Vec<_>>>()?;
        let lambdas = [spec.values[0], spec.values[1]];
        let mut cone = None;
        'pairs: for i in 0..profile_rays.len() {
            for j in i + 1..profile_rays.len() {
                if let Some(c) = cone_pair(&profile_rays[i], &profile_rays[j], &b1, &b2, lambdas) {
                    if c.reconstruction_error(rho) < 1e-7 {
                        cone = Some(c);
                        break 'pairs;
                    }
                }
            }
        }
        let state = PureState::normalized(profile.clone(), b1.clone())?;
        Ok(Some(Self {
            profile_rays,
            basis: [b1, b2],
            cone,
            state,
        }))
    }

    /// Product-type rays on the line.
    pub fn exceptional(&self) -> &[PureState] {
        &self.profile_rays
    }

    /// Two-element ensemble of product-type rays realizing `ρ`, if any.
    pub fn cone(&self) -> Option<&EnsembleCandidate> {
        self.cone.as_ref()
    }

    /// Lower bound on the convex roof over ensembles confined to the line.
    ///
    /// Every ensemble element lies on the line. Unless `ρ` is a mixture of
    /// product-type rays, some element is genuinely entangled, so the bound
    /// is the least value over the genuinely entangled part of the line
    /// (sampled on a Fibonacci lattice), and otherwise additionally the
    /// values at the product-type rays.
    pub fn lower_bound(&self, settings: &Settings) -> Result<Option<usize>> {
        let mut ge_min = usize::MAX;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        for i in 0..SAMPLES {
            let z = 1.0 - (2 * i + 1) as f64 / SAMPLES as f64;
            let theta = z.acos();
            let phi = i as f64 * golden;
            let v = &self.basis[0] * C64::new((theta / 2.0).cos(), 0.0)
                + &self.basis[1] * (C64::from_polar(1.0, phi) * (theta / 2.0).sin());
            let psi = PureState::normalized(self.state.profile().clone(), v)?;
            if self.profile_rays.iter().any(|r| r.overlap(&psi) > 1.0 - 1e-9) {
                continue;
            }
            ge_min = ge_min.min(pure_bounds(&psi, settings, Mode::Lower)?.lo);
        }
        if ge_min == usize::MAX {
            return Ok(None);
        }
        if self.cone.is_some() || self.profile_rays.len() >= 3 {
            for ray in &self.profile_rays {
                ge_min = ge_min.min(pure_bounds(ray, settings, Mode::Lower)?.lo);
            }
        }
        Ok(Some(ge_min))
    }
}

/// Points `(α, β)` where `αX + βY` has rank one, or `None` when every point
/// does.
fn rank_one_points(x: &CMatrix, y: &CMatrix) -> Option<Vec<(C64, C64)>> {
    let (rows, cols) = x.shape();
    // det of the 2×2 minor as a t² + b t + c with t = α/β
    let mut best = [C64::new(0.0, 0.0); 3];
    let mut best_norm = 0.0f64;
    for r1 in 0..rows {
        for r2 in r1 + 1..rows {
            for c1 in 0..cols {
                for c2 in c1 + 1..cols {
                    let (x11, x12, x21, x22) = (x[(r1, c1)], x[(r1, c2)], x[(r2, c1)], x[(r2, c2)]);
                    let (y11, y12, y21, y22) = (y[(r1, c1)], y[(r1, c2)], y[(r2, c1)], y[(r2, c2)]);
                    let q = [
                        x11 * x22 - x12 * x21,
                        x11 * y22 + y11 * x22 - x12 * y21 - y12 * x21,
                        y11 * y22 - y12 * y21,
                    ];
                    let n = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if n > best_norm {
                        best_norm = n;
                        best = q;
                    }
                }
            }
        }
    }
    if best_norm < 1e-12 {
        return None;
    }
    let [a, b, c] = best;
    let eps = 1e-12 * best_norm;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut candidates = Vec::new();
    if a.norm() <= eps {
        candidates.push((one, zero));
        if b.norm() > eps {
            candidates.push((-c / b, one));
        }
    } else {
        let disc = b * b - a * c * 4.0;
        if disc.norm() <= 1e-10 * b.norm_sqr().max(a.norm() * c.norm()) {
            candidates.push((-b / (a * 2.0), one));
        } else {
            let s = disc.sqrt();
            // stable pair of roots
            let q = if (b.conj() * s).re >= 0.0 { (b + s) * -0.5 } else { (b - s) * -0.5 };
            candidates.push((q / a, one));
            if q.norm() > eps {
                candidates.push((c / q, one));
            } else {
                candidates.push((zero, one));
            }
        }
    }
    Some(
        candidates
            .into_iter()
            .filter(|&(al, be)| {
                let m = x * al + y * be;
                let sv = m.singular_values();
                let mut v: Vec<f64> = sv.iter().copied().collect();
                v.sort_by(|p, q| q.total_cmp(p));
                v[0] > 0.0 && v.get(1).copied().unwrap_or(0.0) <= RANK_ONE_RATIO * v[0]
            })
            .collect(),
    )
}

/// `ρ = p|e₁⟩⟨e₁| + q|e₂⟩⟨e₂|` on the range, when the coefficients work out.
fn cone_pair(
    e1: &PureState,
    e2: &PureState,
    b1: &CVector,
    b2: &CVector,
    lambdas: [f64; 2],
) -> Option<EnsembleCandidate> {
    let u = CMatrix::from_fn(2, 2, |r, c| {
        let e = if c == 0 { e1 } else { e2 };
        let b = if r == 0 { b1 } else { b2 };
        b.dotc(e.amplitudes())
    });
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    if det.norm() < 1e-8 {
        return None;
    }
    let inv = u.try_inverse()?;
    let lam = CMatrix::from_diagonal(&CVector::from_vec(vec![
        C64::new(lambdas[0], 0.0),
        C64::new(lambdas[1], 0.0),
    ]));
    let c = &inv * lam * inv.adjoint();
    let (p, q) = (c[(0, 0)].re, c[(1, 1)].re);
    if c[(0, 1)].norm() > 1e-6 * (p + q) || p <= 0.0 || q <= 0.0 {
        return None;
    }
    let total = p + q;
    Some(EnsembleCandidate::new(
        vec![p / total, q / total],
        vec![e1.clone(), e2.clone()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz_state, w_state};
    use crate::tensor::{eigh, DimensionProfile, Reduce};

    fn line(rho: &DensityMatrix) -> Option<RangeLine> {
        RangeLine::analyze(rho, &eigh(rho.matrix()), 1e-8).unwrap()
    }

    #[test]
    fn ghz_reduction_rays_are_the_two_products() {
        let rho = ghz_state(4, 2).unwrap().reduce(&SubsystemSet::new(&[2, 3, 4]).unwrap()).unwrap();
        let l = line(&rho).unwrap();
        assert_eq!(l.exceptional().len(), 2);
        let cone = l.cone().expect("mixture of |000> and |111>");
        assert!(cone.reconstruction_error(&rho) < 1e-10);
    }

    #[test]
    fn w_reduction_has_a_single_product_ray() {
        let rho = w_state(4).unwrap().reduce(&SubsystemSet::new(&[2, 3, 4]).unwrap()).unwrap();
        let l = line(&rho).unwrap();
        assert_eq!(l.exceptional().len(), 1);
        let zero = PureState::basis(DimensionProfile::qubits(3).unwrap(), &[0, 0, 0]).unwrap();
        assert!(l.exceptional()[0].overlap(&zero) > 1.0 - 1e-10);
        assert!(l.cone().is_none());
        assert_eq!(l.lower_bound(&Settings::default()).unwrap(), Some(4));
    }

    #[test]
    fn two_qubit_w_reduction_double_root() {
        let rho = w_state(3).unwrap().reduce(&SubsystemSet::new(&[2, 3]).unwrap()).unwrap();
        let l = line(&rho).unwrap();
        assert_eq!(l.exceptional().len(), 1);
        assert_eq!(l.lower_bound(&Settings::default()).unwrap(), Some(2));
    }

    #[test]
    fn degenerate_line_is_reported() {
        // |0⟩ ⊗ span{|0⟩,|1⟩}: the first cut is rank one everywhere
        let p = DimensionProfile::qubits(2).unwrap();
        let rho = DensityMatrix::mixture(&[
            (0.5, PureState::basis(p.clone(), &[0, 0]).unwrap()),
            (0.5, PureState::basis(p, &[0, 1]).unwrap()),
        ])
        .unwrap();
        assert!(line(&rho).is_none());
    }
}
