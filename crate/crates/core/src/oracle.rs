//! Independent numerical check of orbit dimensions and symplectic
//! degeneracies.
//!
//! The orbit dimension is the real rank of the fundamental vector fields at
//! the state, projected orthogonally to the state's complex line. The
//! symplectic rank is the rank of the Fubini-Study form evaluated on all
//! pairs of basis fields through `ω(ξ̂₁, ξ̂₂) = −i⟨v, [ξ₁, ξ₂]v⟩ / 2⟨v, v⟩`.
//! Isotropy directions fall in the kernel of both, so no tangent basis needs
//! to be extracted.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::invariants::orbit_invariants;
use crate::linalg::{inner, real_singular_values, realify, CMatrix, C64, I};
use crate::moment::reduced_matrix;
use crate::slice::canonicalize;
use crate::states::{AlgebraElement, ParticleCase, QuantumState};

/// Default relative rank threshold.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Singular values within this factor of the threshold make a rank ambiguous.
pub const AMBIGUITY_FACTOR: f64 = 10.0;

/// Real basis of `su(N)` (two copies for distinguishable particles):
/// `i(E_kk − E_{k+1,k+1})`, `E_kl − E_lk` and `i(E_kl + E_lk)` for `k < l`.
pub fn algebra_basis(case: ParticleCase, n: usize) -> Vec<AlgebraElement> {
    let single = su_basis(n);
    match case {
        ParticleCase::Distinguishable => {
            let zero = CMatrix::zeros(n, n);
            let left = single
                .iter()
                .map(|x| AlgebraElement::from_parts(case, x.clone(), Some(zero.clone())));
            let right = single
                .iter()
                .map(|x| AlgebraElement::from_parts(case, zero.clone(), Some(x.clone())));
            left.chain(right).collect()
        }
        _ => single
            .into_iter()
            .map(|x| AlgebraElement::from_parts(case, x, None))
            .collect(),
    }
}

fn su_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for k in 0..n - 1 {
        let mut m = CMatrix::zeros(n, n);
        m[(k, k)] = I;
        m[(k + 1, k + 1)] = -I;
        basis.push(m);
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut real = CMatrix::zeros(n, n);
            real[(k, l)] = C64::new(1.0, 0.0);
            real[(l, k)] = C64::new(-1.0, 0.0);
            basis.push(real);
            let mut imag = CMatrix::zeros(n, n);
            imag[(k, l)] = I;
            imag[(l, k)] = I;
            basis.push(imag);
        }
    }
    basis
}

/// A thresholded numerical rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEstimate {
    pub rank: usize,
    pub threshold: f64,
    /// Some singular value lies within [`AMBIGUITY_FACTOR`] of the threshold.
    pub ambiguous: bool,
    pub singular_values: Vec<f64>,
}

/// Rank with singular values below `rank_tol · max(σ_max, 1)` treated as
/// zero. The floor of 1 is the natural scale for unit-norm states and the
/// unit-entry algebra basis; it keeps an exactly vanishing matrix from being
/// measured against its own rounding noise.
pub fn numerical_rank(m: &DMatrix<f64>, rank_tol: f64) -> RankEstimate {
    let singular_values = real_singular_values(m);
    let top = singular_values.first().copied().unwrap_or(0.0).max(1.0);
    let threshold = rank_tol * top;
    let rank = singular_values.iter().filter(|s| **s > threshold).count();
    let ambiguous = singular_values
        .iter()
        .any(|s| *s > threshold / AMBIGUITY_FACTOR && *s < threshold * AMBIGUITY_FACTOR);
    RankEstimate {
        rank,
        threshold,
        ambiguous,
        singular_values,
    }
}

/// Fundamental vector fields `ξ_a·C − ⟨C, ξ_a·C⟩ C` over the algebra basis.
pub fn tangent_vectors(state: &QuantumState) -> Vec<CMatrix> {
    let c = state.coeffs();
    algebra_basis(state.case(), state.n())
        .par_iter()
        .map(|xi| {
            let x = xi.apply(c);
            let along = inner(c, &x);
            x - c * along
        })
        .collect()
}

pub fn orbit_dimension_numeric(state: &QuantumState, rank_tol: f64) -> RankEstimate {
    let columns: Vec<_> = tangent_vectors(state).iter().map(realify).collect();
    numerical_rank(&DMatrix::from_columns(&columns), rank_tol)
}

/// The real antisymmetric matrix `Ω_ab = ω(ξ̂_a, ξ̂_b)` over the algebra basis.
pub fn symplectic_matrix(state: &QuantumState) -> DMatrix<f64> {
    let c = state.coeffs();
    let basis = algebra_basis(state.case(), state.n());
    let images: Vec<CMatrix> = basis.par_iter().map(|xi| xi.apply(c)).collect();
    let norm2 = inner(c, c).re;
    let m = basis.len();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (0..m)
                .map(|b| {
                    if a == b {
                        return 0.0;
                    }
                    // [ξ_a, ξ_b]·C in the represented action
                    let bracket = basis[a].apply(&images[b]) - basis[b].apply(&images[a]);
                    let value = -I * inner(c, &bracket) / (2.0 * norm2);
                    value.re
                })
                .collect()
        })
        .collect();
    let mut omega = DMatrix::from_fn(m, m, |a, b| rows[a][b]);
    // exact antisymmetry
    omega = (&omega - omega.transpose()) * 0.5;
    omega
}

pub fn symplectic_rank_numeric(state: &QuantumState, rank_tol: f64) -> RankEstimate {
    numerical_rank(&symplectic_matrix(state), rank_tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub orbit_dim_numeric: usize,
    pub symplectic_rank_numeric: usize,
    pub degeneracy_numeric: usize,
    pub formula_orbit_dim: usize,
    pub formula_degeneracy: usize,
    pub agree: bool,
    pub rank_tolerance_used: f64,
    pub diagnostics: Vec<String>,
}

/// Compare the numerical orbit dimension and degeneracy with the values
/// predicted from the state's stratum.
pub fn oracle_check(state: &QuantumState, rank_tol: f64, cluster_tol: f64) -> Result<OracleReport> {
    let cf = canonicalize(state)?;
    let formula = orbit_invariants(&cf, cluster_tol)?;
    let orbit = orbit_dimension_numeric(state, rank_tol);
    let symp = symplectic_rank_numeric(state, rank_tol);
    let mut diagnostics = Vec::new();
    if orbit.ambiguous {
        diagnostics.push(format!(
            "orbit rank ambiguous near threshold {:.3e}",
            orbit.threshold
        ));
    }
    if symp.ambiguous {
        diagnostics.push(format!(
            "symplectic rank ambiguous near threshold {:.3e}",
            symp.threshold
        ));
    }
    if !symp.rank.is_multiple_of(2) {
        diagnostics.push(format!("odd symplectic rank {}", symp.rank));
    }
    if symp.rank > orbit.rank {
        diagnostics.push(format!(
            "symplectic rank {} exceeds orbit dimension {}",
            symp.rank, orbit.rank
        ));
    }
    let degeneracy_numeric = orbit.rank.saturating_sub(symp.rank);
    let agree = diagnostics.is_empty()
        && orbit.rank == formula.orbit_dim
        && degeneracy_numeric == formula.degeneracy_d;
    Ok(OracleReport {
        orbit_dim_numeric: orbit.rank,
        symplectic_rank_numeric: symp.rank,
        degeneracy_numeric,
        formula_orbit_dim: formula.orbit_dim,
        formula_degeneracy: formula.degeneracy_d,
        agree,
        rank_tolerance_used: rank_tol,
        diagnostics,
    })
}

/// A three-qubit pure state, amplitudes indexed by `4i + 2j + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeQubitState {
    amps: [C64; 8],
}

impl ThreeQubitState {
    /// Normalizes the amplitudes. Returns `None` for the zero vector.
    pub fn new(amps: [C64; 8]) -> Option<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        Some(ThreeQubitState {
            amps: amps.map(|a| a / norm),
        })
    }

    pub fn amp(&self, i: usize, j: usize, k: usize) -> C64 {
        self.amps[4 * i + 2 * j + k]
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amps
    }

    /// Reduced density matrix of one qubit (`site` in 0..3).
    pub fn reduced(&self, site: usize) -> CMatrix {
        let mut rho = CMatrix::zeros(2, 2);
        for idx in 0..8 {
            for jdx in 0..8 {
                let bits = |x: usize, s: usize| (x >> (2 - s)) & 1;
                let others_equal = (0..3)
                    .filter(|&s| s != site)
                    .all(|s| bits(idx, s) == bits(jdx, s));
                if others_equal {
                    rho[(bits(idx, site), bits(jdx, site))] += self.amps[idx] * self.amps[jdx].conj();
                }
            }
        }
        rho
    }

    /// Descending spectrum of one single-qubit reduced matrix.
    pub fn site_spectrum(&self, site: usize) -> [f64; 2] {
        let s = crate::linalg::hermitian_spectrum(&self.reduced(site));
        [s[0], s[1]]
    }
}

/// Three-tangle `4 |Det a|` with `Det` the Cayley hyperdeterminant.
pub fn three_tangle(state: &ThreeQubitState) -> f64 {
    let a = |i, j, k| state.amp(i, j, k);
    let det = a(0, 0, 0).powi(2) * a(1, 1, 1).powi(2)
        + a(0, 0, 1).powi(2) * a(1, 1, 0).powi(2)
        + a(0, 1, 0).powi(2) * a(1, 0, 1).powi(2)
        + a(1, 0, 0).powi(2) * a(0, 1, 1).powi(2)
        - 2.0
            * (a(0, 0, 0) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 1)
                + a(0, 0, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 1)
                + a(0, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 1)
                + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 0)
                + a(0, 0, 1) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 0)
                + a(0, 1, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 0, 1))
        + 4.0
            * (a(0, 0, 0) * a(0, 1, 1) * a(1, 0, 1) * a(1, 1, 0)
                + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0) * a(1, 1, 1));
    4.0 * det.norm()
}

/// `√(2/3)|000⟩ + √(1/3)|111⟩`.
pub fn ghz_type_state() -> ThreeQubitState {
    let mut amps = [C64::new(0.0, 0.0); 8];
    amps[0] = C64::new((2.0f64 / 3.0).sqrt(), 0.0);
    amps[7] = C64::new((1.0f64 / 3.0).sqrt(), 0.0);
    ThreeQubitState::new(amps).expect("nonzero")
}

/// `(|100⟩ + |010⟩ + |001⟩)/√3`.
pub fn w_state() -> ThreeQubitState {
    let mut amps = [C64::new(0.0, 0.0); 8];
    for idx in [4, 2, 1] {
        amps[idx] = C64::new(1.0, 0.0);
    }
    ThreeQubitState::new(amps).expect("nonzero")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub spectra_x1: [[f64; 2]; 3],
    pub spectra_x2: [[f64; 2]; 3],
    pub max_spectral_difference: f64,
    pub moment_images_equal: bool,
    pub tangle_x1: f64,
    pub tangle_x2: f64,
    pub orbits_distinct: bool,
    pub conclusion: String,
}

impl CounterexampleReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("three-qubit states with equal single-site spectra\n");
        out.push_str("  x1 = sqrt(2/3)|000> + sqrt(1/3)|111>\n");
        out.push_str("  x2 = (|100> + |010> + |001>)/sqrt(3)\n\n");
        out.push_str(&format!("  site   {:<34}{}\n", "spectrum(x1)", "spectrum(x2)"));
        for site in 0..3 {
            out.push_str(&format!(
                "  {}      ({:.12}, {:.12})  ({:.12}, {:.12})\n",
                site + 1,
                self.spectra_x1[site][0],
                self.spectra_x1[site][1],
                self.spectra_x2[site][0],
                self.spectra_x2[site][1]
            ));
        }
        out.push_str(&format!(
            "\n  max spectral difference  {:.3e}\n  three-tangle(x1)         {:.12}\n  three-tangle(x2)         {:.12}\n\n{}\n",
            self.max_spectral_difference, self.tangle_x1, self.tangle_x2, self.conclusion
        ));
        out
    }
}

/// Two three-qubit states with identical moment images in distinct orbits.
pub fn counterexample_demo() -> CounterexampleReport {
    let x1 = ghz_type_state();
    let x2 = w_state();
    let spectra_x1 = [0, 1, 2].map(|s| x1.site_spectrum(s));
    let spectra_x2 = [0, 1, 2].map(|s| x2.site_spectrum(s));
    let max_spectral_difference = spectra_x1
        .iter()
        .flatten()
        .zip(spectra_x2.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let tangle_x1 = three_tangle(&x1);
    let tangle_x2 = three_tangle(&x2);
    let moment_images_equal = max_spectral_difference <= 1e-12;
    let orbits_distinct = (tangle_x1 - tangle_x2).abs() > 1e-6;
    let conclusion = if moment_images_equal && orbits_distinct {
        "equal moment images, distinct orbits (the three-tangle is a local unitary invariant): \
         single-site spectra do not decide local unitary equivalence for three parties"
            .to_string()
    } else {
        "unexpected: the counterexample did not reproduce".to_string()
    };
    CounterexampleReport {
        spectra_x1,
        spectra_x2,
        max_spectral_difference,
        moment_images_equal,
        tangle_x1,
        tangle_x2,
        orbits_distinct,
        conclusion,
    }
}

/// Moment spectrum of a bipartite state, for reporting alongside the oracle.
pub fn probabilities(state: &QuantumState) -> Vec<f64> {
    reduced_matrix(state).probabilities()
}
