//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

use std::time::Instant;

use lu_orbits::equivalence::lu_equivalent;
use lu_orbits::invariants::{
    derived_seed, enumerate_strata, fiber_structure, multiplicity_vector, sampled_representative,
    FiberFactor, MultiplicityVector, OrbitInvariants,
};
use lu_orbits::linalg::{frobenius, CMatrix, C64};
use lu_orbits::moment::reduced_matrix;
use lu_orbits::oracle::{counterexample_demo, oracle_check, OracleReport};
use lu_orbits::slice::{canonicalize, slice_matrix};
use lu_orbits::states::{AlgebraElement, LocalUnitary, ParticleCase, QuantumState};
use rayon::prelude::*;

const RANK_TOL: f64 = 1e-9;
const CLUSTER_TOL: f64 = 1e-8;
const SPECTRUM_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn oracle_for(case: ParticleCase, mv: &MultiplicityVector, seed: u64) -> lu_orbits::Result<OracleReport> {
    let s = sampled_representative(case, mv, seed)?;
    oracle_check(&s, RANK_TOL, CLUSTER_TOL)
}

/// Smallest gap between consecutive distinct occupied levels.
fn level_gap(p: &[f64], mv: &MultiplicityVector) -> f64 {
    let mut levels = Vec::new();
    let mut start = 0;
    for size in mv.occupied() {
        levels.push(p[start]);
        start += size;
    }
    levels.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min)
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut jobs = Vec::new();
    for case in ParticleCase::ALL {
        for n in 2..=6 {
            for (i, inv) in enumerate_strata(case, n).unwrap().into_iter().enumerate() {
                jobs.push((case, n, i as u64, inv));
            }
        }
    }
    let results: Vec<(bool, f64, String)> = jobs
        .par_iter()
        .map(|(case, n, i, inv)| {
            let seed = derived_seed(1000 * *n as u64, *i);
            let s = sampled_representative(*case, &inv.multiplicity, seed).unwrap();
            let gap = level_gap(&reduced_matrix(&s).probabilities(), &inv.multiplicity);
            match oracle_check(&s, RANK_TOL, CLUSTER_TOL) {
                Ok(r) => (r.agree, gap, format!("{case} N={n} d={}: {r:?}", inv.multiplicity)),
                Err(e) => (false, gap, format!("{case} N={n} d={}: {e}", inv.multiplicity)),
            }
        })
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let failures: Vec<&String> = results.iter().filter(|r| !r.0).map(|r| &r.2).collect();
    let min_gap = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let pass = failures.is_empty() && min_gap >= 0.05 - 1e-12 && elapsed < 60.0;
    let mut detail = format!(
        "{} strata (N <= 6, all cases), {} disagreements, min level gap {min_gap:.3}, {elapsed:.1} s",
        results.len(),
        failures.len()
    );
    for f in failures.iter().take(5) {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(pass, detail)
}

fn generic_fibers() -> Outcome {
    let mut ok = true;
    let mut seen = Vec::new();
    for n in 2..=6usize {
        let mv = MultiplicityVector {
            d: vec![1; n],
            degenerate: false,
        };
        let inv = OrbitInvariants::for_stratum(ParticleCase::Boson, mv.clone()).unwrap();
        let r = oracle_for(ParticleCase::Boson, &mv, n as u64).unwrap();
        ok &= inv.fiber_dim == n - 1 && r.degeneracy_numeric == n - 1 && r.agree;
        seen.push(format!("B{n}:{}", r.degeneracy_numeric));
    }
    for half in 1..=3usize {
        let mv = MultiplicityVector {
            d: vec![2; half],
            degenerate: false,
        };
        let inv = OrbitInvariants::for_stratum(ParticleCase::Fermion, mv.clone()).unwrap();
        let r = oracle_for(ParticleCase::Fermion, &mv, half as u64).unwrap();
        ok &= inv.fiber_dim == half - 1 && r.degeneracy_numeric == half - 1 && r.agree;
        seen.push(format!("F{}:{}", 2 * half, r.degeneracy_numeric));
    }
    outcome(ok, format!("oracle fiber dims {}", seen.join(" ")))
}

fn highest_weight_state(case: ParticleCase, n: usize) -> QuantumState {
    let mut c = CMatrix::zeros(n, n);
    match case {
        ParticleCase::Fermion => {
            c[(0, 1)] = C64::new(1.0, 0.0);
            c[(1, 0)] = C64::new(-1.0, 0.0);
        }
        _ => c[(0, 0)] = C64::new(1.0, 0.0),
    }
    QuantumState::validate(&c, case, 1e-12).unwrap()
}

fn unique_symplectic_orbits() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for case in ParticleCase::ALL {
        for n in 2..=6 {
            let hw = highest_weight_state(case, n);
            let cf = canonicalize(&hw).unwrap();
            let hw_mv = multiplicity_vector(&cf.probabilities(), case, CLUSTER_TOL).unwrap();
            let zero_d: Vec<MultiplicityVector> = enumerate_strata(case, n)
                .unwrap()
                .into_iter()
                .filter(|s| s.degeneracy_d == 0)
                .map(|s| s.multiplicity)
                .collect();
            let r = oracle_check(&hw, RANK_TOL, CLUSTER_TOL).unwrap();
            if zero_d != vec![hw_mv.clone()] || r.degeneracy_numeric != 0 || !r.agree {
                ok = false;
                notes.push(format!("{case} N={n}: D=0 strata {zero_d:?}, highest weight {hw_mv}"));
            }
        }
    }
    // odd N fermions: the zero block is a block of its own, so a generic
    // state with n pairs has k = n + 1 blocks and torus dimension k - 2
    for (n, expected) in [(3usize, 0usize), (5, 1)] {
        let mut d = vec![2; n / 2];
        d.push(1);
        let mv = MultiplicityVector { d, degenerate: true };
        let inv = OrbitInvariants::for_stratum(ParticleCase::Fermion, mv.clone()).unwrap();
        let r = oracle_for(ParticleCase::Fermion, &mv, n as u64).unwrap();
        let good = inv.degeneracy_d == expected && r.degeneracy_numeric == expected && r.agree;
        ok &= good;
        notes.push(format!(
            "fermion N={n} generic {mv}: k={} D={} (oracle {})",
            mv.k(),
            inv.degeneracy_d,
            r.degeneracy_numeric
        ));
    }
    outcome(ok, format!("D = 0 only on the highest-weight stratum for N <= 6; {}", notes.join("; ")))
}

fn slice_uniqueness() -> Outcome {
    let mut ok = true;
    let mut worst_lambda: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut errors = 0;
    for case in ParticleCase::ALL {
        let strata: Vec<Vec<OrbitInvariants>> =
            (2..=6).map(|n| enumerate_strata(case, n).unwrap()).collect();
        for trial in 0..1000u64 {
            let n = 2 + (trial % 5) as usize;
            // every fourth trial starts from a stratum representative with degenerate levels
            let s = if trial % 4 == 3 {
                let rows = &strata[n - 2];
                let inv = &rows[(trial / 4) as usize % rows.len()];
                sampled_representative(case, &inv.multiplicity, derived_seed(trial, 0))
            } else {
                QuantumState::random(case, n, derived_seed(trial, 1))
            }
            .unwrap();
            let g1 = LocalUnitary::random(case, n, derived_seed(trial, 2)).unwrap();
            let g2 = LocalUnitary::random(case, n, derived_seed(trial, 3)).unwrap();
            match (canonicalize(&s.act(&g1).unwrap()), canonicalize(&s.act(&g2).unwrap())) {
                (Ok(a), Ok(b)) => {
                    let diff = a
                        .lambdas()
                        .iter()
                        .zip(b.lambdas())
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    worst_lambda = worst_lambda.max(diff);
                    worst_residual = worst_residual.max(a.residual()).max(b.residual());
                }
                _ => errors += 1,
            }
        }
    }
    ok &= errors == 0 && worst_lambda <= 1e-8 && worst_residual <= 1e-9;
    outcome(
        ok,
        format!(
            "3000 trials, max lambda difference {worst_lambda:.2e}, max residual {worst_residual:.2e}, {errors} errors"
        ),
    )
}

/// Move a state to a different orbit: shift weight `delta` (relative to the
/// total) from the largest slice value to the smallest one.
fn perturbed(s: &QuantumState, delta: f64) -> QuantumState {
    let cf = canonicalize(s).unwrap();
    let mut w: Vec<f64> = cf.lambdas().iter().map(|l| l * l).collect();
    let total: f64 = w.iter().sum();
    let last = w.len() - 1;
    let shift = delta.min(0.5 * (w[0] - w[last]) / total) * total;
    w[0] -= shift;
    w[last] += shift;
    let lambdas: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let c = slice_matrix(s.case(), s.n(), &lambdas);
    QuantumState::validate(&c, s.case(), 1e-12).unwrap()
}

fn separation() -> Outcome {
    let mut accepted = 0;
    let mut rejected = 0;
    let mut errors = 0;
    let mut too_close = 0;
    let mut worst_residual: f64 = 0.0;
    let mut min_distance = f64::INFINITY;
    for case in ParticleCase::ALL {
        for i in 0..200u64 {
            let n = 2 + (i % 4) as usize;
            let a = QuantumState::random(case, n, derived_seed(i, 10)).unwrap();
            let g = LocalUnitary::random(case, n, derived_seed(i, 11)).unwrap();
            match lu_equivalent(&a, &a.act(&g).unwrap(), SPECTRUM_TOL) {
                Ok(v) if v.equivalent => {
                    if let Some(r) = v.witness_residual {
                        worst_residual = worst_residual.max(r);
                        accepted += 1;
                    } else {
                        errors += 1;
                    }
                }
                Ok(_) => {}
                Err(_) => errors += 1,
            }

            // fermion spectra with a single pair are all equal, so use N = 4, 5
            let m = if case == ParticleCase::Fermion { 4 + (i % 2) as usize } else { n };
            let base = QuantumState::random(case, m, derived_seed(i, 12)).unwrap();
            let delta = 10f64.powf(-1.0 - 4.0 * i as f64 / 200.0);
            let h = LocalUnitary::random(case, m, derived_seed(i, 13)).unwrap();
            let b = perturbed(&base, delta).act(&h).unwrap();
            match lu_equivalent(&base, &b, SPECTRUM_TOL) {
                Ok(v) => {
                    min_distance = min_distance.min(v.spectral_distance);
                    if v.spectral_distance < 10.0 * SPECTRUM_TOL {
                        too_close += 1;
                    } else if !v.equivalent {
                        rejected += 1;
                    }
                }
                Err(_) => errors += 1,
            }
        }
    }
    let ok = accepted == 600 && rejected == 600 && too_close == 0 && errors == 0 && worst_residual <= 1e-7;
    outcome(
        ok,
        format!(
            "{accepted}/600 equivalent pairs accepted (max witness residual {worst_residual:.2e}), \
             {rejected}/600 distinct pairs rejected (min distance {min_distance:.2e}, {too_close} closer than 10 tol), \
             {errors} errors"
        ),
    )
}

fn counterexample() -> Outcome {
    let r = counterexample_demo();
    let gap = r.tangle_x1 - r.tangle_x2;
    let ok = r.max_spectral_difference <= 1e-12 && (gap - 8.0 / 9.0).abs() <= 1e-10;
    outcome(
        ok,
        format!(
            "max spectral difference {:.2e}, tangle difference {gap:.12} (8/9 = {:.12})",
            r.max_spectral_difference,
            8.0 / 9.0
        ),
    )
}

fn fiber_formula_pin() -> Outcome {
    let boson_full = MultiplicityVector {
        d: vec![2],
        degenerate: false,
    };
    let fermion_generic = MultiplicityVector {
        d: vec![2, 2],
        degenerate: false,
    };
    let bf = fiber_structure(&boson_full, ParticleCase::Boson).unwrap();
    let ff = fiber_structure(&fermion_generic, ParticleCase::Fermion).unwrap();
    let so2 = bf.iter().find(|f| matches!(f, FiberFactor::SymSO(2))).map(|f| f.dim());
    let usp2 = ff.iter().find(|f| matches!(f, FiberFactor::SymUSp(2))).map(|f| f.dim());

    // s2 = (e1 e1 + e2 e2)/sqrt 2 sits alone in its stratum
    let s2 = QuantumState::validate(&CMatrix::identity(2, 2), ParticleCase::Boson, 1e-12).unwrap();
    let r_s2 = oracle_check(&s2, RANK_TOL, CLUSTER_TOL).unwrap();
    let r_f4 = oracle_for(ParticleCase::Fermion, &fermion_generic, 4).unwrap();

    // interchanged formulas would give dim S_2 = 0 and dim A_2 = 2
    let swapped_s2 = 0;
    let swapped_f4 = 1 + 2 * 2;
    let ok = so2 == Some(2)
        && usp2 == Some(0)
        && r_s2.degeneracy_numeric == 2
        && r_f4.degeneracy_numeric == 1
        && r_s2.agree
        && r_f4.agree;
    outcome(
        ok,
        format!(
            "dim SU2/SO2 = {so2:?}, dim SU2/USp2 = {usp2:?}; oracle D(s2) = {} (interchanged formulas: {swapped_s2}), \
             oracle D(generic N=4 fermion) = {} (interchanged: {swapped_f4})",
            r_s2.degeneracy_numeric, r_f4.degeneracy_numeric
        ),
    )
}

fn finite_difference() -> Outcome {
    let t = 1e-5;
    let mut worst: f64 = 0.0;
    for case in ParticleCase::ALL {
        for i in 0..100u64 {
            let n = 2 + (i % 5) as usize;
            let s = QuantumState::random(case, n, derived_seed(i, 20)).unwrap();
            let xi = AlgebraElement::random(case, n, derived_seed(i, 21)).unwrap();
            let plus = s.act(&xi.exp(t).unwrap()).unwrap();
            let minus = s.act(&xi.exp(-t).unwrap()).unwrap();
            let fd = (plus.coeffs() - minus.coeffs()).unscale(2.0 * t);
            let exact = s.algebra_act(&xi).unwrap();
            worst = worst.max(frobenius(&(fd - exact)));
        }
    }
    outcome(worst <= 1e-6, format!("300 pairs, max deviation {worst:.2e} at t = 1e-5"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("oracle-formula agreement", oracle_agreement),
        ("generic fibers", generic_fibers),
        ("unique symplectic orbits", unique_symplectic_orbits),
        ("slice uniqueness", slice_uniqueness),
        ("spectral separation", separation),
        ("three-qubit counterexample", counterexample),
        ("symmetric space dimensions", fiber_formula_pin),
        ("finite-difference derivative", finite_difference),
    ];
    println!("\nacceptance suite");
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = check();
        if !r.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name} [{:.1} s]: {}",
            if r.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            r.detail
        );
    }
    println!("{} of {} criteria passed\n", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
