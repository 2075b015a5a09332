//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! Expected values are either literal published values or computed here by
//! oracles that do not go through the crate's own rules (plain SVD ranks,
//! one-line entropy formulas).

use std::cell::RefCell;
use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use multischmidt::states::{
    ghz_state, random_local_invertible, random_local_unitary, random_product, random_pure,
    seeded_rng, w_state,
};
use multischmidt::{
    factorize, generalized_eof, local_rank_vector, mixed_schmidt_number, pure_schmidt_coefficients,
    pure_schmidt_number, CoefficientSet, DensityMatrix, DimensionProfile, PureState,
    SchmidtNumberResult, Settings, CMatrix, CVector, C64,
};
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

thread_local! {
    /// Every coefficient set produced by the suite, with the matching
    /// Schmidt number, for the normalization criterion.
    static PRODUCED: RefCell<Vec<(String, CoefficientSet, SchmidtNumberResult)>> = const { RefCell::new(Vec::new()) };
}

fn settings() -> Settings {
    Settings::default()
}

fn coefficients(name: &str, psi: &PureState) -> Result<CoefficientSet, String> {
    let c = pure_schmidt_coefficients(psi, &settings()).map_err(|e| format!("{name}: {e}"))?;
    let r = pure_schmidt_number(psi, &settings()).map_err(|e| format!("{name}: {e}"))?;
    PRODUCED.with(|p| p.borrow_mut().push((name.to_string(), c.clone(), r)));
    Ok(c)
}

fn exact_value(name: &str, psi: &PureState, expected: usize) -> Outcome {
    let r = pure_schmidt_number(psi, &settings()).map_err(|e| format!("{name}: {e}"))?;
    if r.exact && r.lo == expected {
        Ok(format!("{name}: R = {}", r.lo))
    } else {
        Err(format!("{name}: expected {expected} exact, got {r} (exact = {})", r.exact))
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:.0?}"))
    }
}

fn same_multiset(got: &[f64], want: &[f64], tol: f64) -> bool {
    let mut want = want.to_vec();
    want.sort_by(|a, b| b.total_cmp(a));
    got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).abs() <= tol)
}

fn entropy_oracle(values: &[f64]) -> f64 {
    values.iter().map(|e| e * e).filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

fn c1() -> Outcome {
    let t = Instant::now();
    let out = exact_value("W_3", &w_state(3).unwrap(), 4)?;
    within(t.elapsed(), Duration::from_secs(1))?;
    Ok(out)
}

fn c2() -> Outcome {
    let t = Instant::now();
    let out = exact_value("GHZ_3", &ghz_state(3, 2).unwrap(), 3)?;
    within(t.elapsed(), Duration::from_secs(1))?;
    Ok(out)
}

fn c3() -> Outcome {
    let mut parts = Vec::new();
    for m in [4, 5] {
        let t = Instant::now();
        parts.push(exact_value(&format!("W_{m}"), &w_state(m).unwrap(), 2 * (m - 1))?);
        within(t.elapsed(), Duration::from_secs(60))?;
    }
    Ok(parts.join(", "))
}

fn c4() -> Outcome {
    let mut parts = Vec::new();
    for m in [4, 5] {
        let t = Instant::now();
        parts.push(exact_value(&format!("GHZ_{m}"), &ghz_state(m, 2).unwrap(), 3)?);
        within(t.elapsed(), Duration::from_secs(60))?;
    }
    Ok(parts.join(", "))
}

fn c5() -> Outcome {
    let t = Instant::now();
    let out = exact_value("GHZ_3^(3)", &ghz_state(3, 3).unwrap(), 4)?;
    within(t.elapsed(), Duration::from_secs(10))?;
    Ok(out)
}

fn c6() -> Outcome {
    let t = Instant::now();
    let w = coefficients("W_3", &w_state(3).unwrap())?;
    let want_w = [1.0 / 3f64.sqrt(), 1.0 / 6f64.sqrt(), 0.5, 0.5];
    if !same_multiset(&w.values, &want_w, 1e-6) {
        return Err(format!("W_3 coefficients {:?}", w.values));
    }
    let g = coefficients("GHZ_3", &ghz_state(3, 2).unwrap())?;
    let want_g = [0.5, 0.5, FRAC_1_SQRT_2];
    if !same_multiset(&g.values, &want_g, 1e-6) {
        return Err(format!("GHZ_3 coefficients {:?}", g.values));
    }
    within(t.elapsed(), Duration::from_secs(30))?;
    Ok("W_3 and GHZ_3 coefficient multisets match".into())
}

fn c7() -> Outcome {
    let want_w = entropy_oracle(&[1.0 / 3f64.sqrt(), 1.0 / 6f64.sqrt(), 0.5, 0.5]);
    let want_g = entropy_oracle(&[0.5, 0.5, FRAC_1_SQRT_2]);
    let g = generalized_eof(&coefficients("GHZ_3", &ghz_state(3, 2).unwrap())?);
    let w = generalized_eof(&coefficients("W_3", &w_state(3).unwrap())?);
    if (g - 1.5).abs() > 1e-9 || (want_g - 1.5).abs() > 1e-12 {
        return Err(format!("GHZ_3 EoF {g}"));
    }
    if (w - want_w).abs() > 1e-6 {
        return Err(format!("W_3 EoF {w}, oracle {want_w}"));
    }
    Ok(format!("GHZ_3 {g:.9}, W_3 {w:.6} (oracle {want_w:.6})"))
}

fn c8() -> Outcome {
    let tol = settings().rank_tol;
    let w = w_state(3).unwrap();
    let g = ghz_state(3, 2).unwrap();
    let rw = local_rank_vector(&w, tol).map_err(|e| e.to_string())?;
    let rg = local_rank_vector(&g, tol).map_err(|e| e.to_string())?;
    if rw != vec![2, 2, 2] || rg != vec![2, 2, 2] {
        return Err(format!("rank vectors {rw:?} and {rg:?}"));
    }
    let a = pure_schmidt_number(&w, &settings()).map_err(|e| e.to_string())?;
    let b = pure_schmidt_number(&g, &settings()).map_err(|e| e.to_string())?;
    if a.value() == b.value() {
        return Err(format!("R values coincide: {a} and {b}"));
    }
    Ok(format!("both (2,2,2); R = {a} vs {b}"))
}

/// SVD rank and singular values of the `d1 × d2` coefficient matrix.
fn svd_oracle(amps: &CVector, d1: usize, d2: usize, tol: f64) -> (usize, Vec<f64>) {
    let c = CMatrix::from_fn(d1, d2, |i, j| amps[i * d2 + j]);
    let mut sv: Vec<f64> = c.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let kept: Vec<f64> = sv.iter().copied().filter(|s| s * s > tol * sv[0] * sv[0]).collect();
    (kept.len(), kept)
}

fn c9() -> Outcome {
    let shapes = [(2usize, 2usize), (2, 3), (3, 3)];
    let tol = settings().rank_tol;
    for idx in 0..1000u64 {
        let (d1, d2) = shapes[idx as usize % 3];
        let r = 1 + (idx as usize / 3) % d1.min(d2);
        // product of random d1×r and r×d2 factors has rank r
        let mut rng = seeded_rng(idx, 77);
        let mut g = |rows: usize, cols: usize| {
            CMatrix::from_fn(rows, cols, |_, _| {
                C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
            })
        };
        let m = g(d1, r) * g(r, d2);
        let amps = CVector::from_fn(d1 * d2, |k, _| m[(k / d2, k % d2)]);
        let psi = PureState::normalized(DimensionProfile::new(vec![d1, d2]).unwrap(), amps).unwrap();
        let (rank, values) = svd_oracle(psi.amplitudes(), d1, d2, tol);
        let res = pure_schmidt_number(&psi, &settings()).map_err(|e| e.to_string())?;
        if !(res.exact && res.lo == rank && rank == r) {
            return Err(format!("state {idx} ({d1}x{d2}): R = {res}, SVD rank {rank}, built rank {r}"));
        }
        let c = coefficients(&format!("bipartite {idx}"), &psi)?;
        if !same_multiset(&c.values, &values, 1e-8) {
            return Err(format!("state {idx}: coefficients {:?} vs SVD {values:?}", c.values));
        }
    }
    Ok("1000 states agree with SVD rank and values".into())
}

fn c10() -> Outcome {
    let p = DimensionProfile::qubits(3).unwrap();
    for seed in 0..200u64 {
        let psi = random_pure(&p, seed);
        let r = pure_schmidt_number(&psi, &settings()).map_err(|e| e.to_string())?;
        let label = factorize(&psi, settings().rank_tol).map_err(|e| e.to_string())?.label;
        let u = psi.apply_local(&random_local_unitary(&p, seed + 10_000)).map_err(|e| e.to_string())?;
        let ru = pure_schmidt_number(&u, &settings()).map_err(|e| e.to_string())?;
        let lu = factorize(&u, settings().rank_tol).map_err(|e| e.to_string())?.label;
        let a = psi.apply_local(&random_local_invertible(&p, seed + 20_000)).map_err(|e| e.to_string())?;
        let ra = pure_schmidt_number(&a, &settings()).map_err(|e| e.to_string())?;
        if (r.lo, r.hi) != (ru.lo, ru.hi) || label != lu {
            return Err(format!("seed {seed}: local unitary changed {r}/{label} to {ru}/{lu}"));
        }
        if (r.lo, r.hi) != (ra.lo, ra.hi) {
            return Err(format!("seed {seed}: invertible locals changed {r} to {ra}"));
        }
        if seed < 10 {
            coefficients(&format!("random 3-qubit {seed}"), &psi)?;
        }
    }
    Ok("200 states invariant under local unitaries and invertible locals".into())
}

fn c11() -> Outcome {
    for (m, offset) in [(3usize, 0u64), (4, 100)] {
        let p = DimensionProfile::qubits(m).unwrap();
        for seed in 0..100u64 {
            let psi = random_product(&p, offset + seed);
            let r = pure_schmidt_number(&psi, &settings()).map_err(|e| e.to_string())?;
            let c = coefficients(&format!("product {m}-{seed}"), &psi)?;
            if r.value() != Some(1) || c.values.len() != 1 || (c.values[0] - 1.0).abs() > 1e-12 {
                return Err(format!("product state {m}-{seed}: R = {r}, coefficients {:?}", c.values));
            }
        }
    }
    let p = DimensionProfile::qubits(3).unwrap();
    let mut found = 0;
    let mut wrong = Vec::new();
    for case in 0..50u64 {
        let mut rng = seeded_rng(case, 55);
        let w: f64 = rng.random_range(0.2..0.8);
        let rho = DensityMatrix::mixture(&[
            (w, random_product(&p, 500 + 2 * case)),
            (1.0 - w, random_product(&p, 501 + 2 * case)),
        ])
        .unwrap();
        let r = mixed_schmidt_number(&rho, &settings()).map_err(|e| e.to_string())?;
        if r.hi == 1 {
            found += 1;
        } else if r.exact {
            wrong.push(case);
        }
    }
    if !wrong.is_empty() {
        return Err(format!("separable mixtures reported exact R > 1: {wrong:?}"));
    }
    if found * 100 < 95 * 50 {
        return Err(format!("separable ensemble found for {found}/50 mixtures"));
    }
    Ok(format!("400 products give R = 1 and {{1}}; {found}/50 separable mixtures certified"))
}

fn c12() -> Outcome {
    for (name, psi) in [
        ("W_4", w_state(4).unwrap()),
        ("GHZ_4", ghz_state(4, 2).unwrap()),
        ("GHZ_3^(3)", ghz_state(3, 3).unwrap()),
    ] {
        coefficients(name, &psi)?;
    }
    let produced = PRODUCED.with(|p| p.borrow().clone());
    let mut checked_card = 0;
    for (name, c, r) in &produced {
        let sum: f64 = c.values.iter().map(|v| v * v).sum();
        if (sum - 1.0).abs() > 1e-7 {
            return Err(format!("{name}: sum of squares {sum}"));
        }
        if r.exact && c.provenance.exact {
            checked_card += 1;
            if c.values.len() != r.lo {
                return Err(format!("{name}: {} coefficients but R = {}", c.values.len(), r.lo));
            }
        }
    }
    Ok(format!(
        "{} coefficient sets normalized; cardinality = R on {checked_card} exact ones",
        produced.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("R(W_3) = 4", c1),
        ("R(GHZ_3) = 3", c2),
        ("R(W_m) = 2(m-1), m = 4, 5", c3),
        ("R(GHZ_m) = 3, m = 4, 5", c4),
        ("R(GHZ_3^(3)) = 4", c5),
        ("Schmidt coefficients of W_3 and GHZ_3", c6),
        ("generalized EoF of GHZ_3 and W_3", c7),
        ("equal local-rank vectors, different R", c8),
        ("bipartite oracle equivalence", c9),
        ("local unitary and SLOCC invariance", c10),
        ("separability detection", c11),
        ("normalization and cardinality", c12),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = t.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {title}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
