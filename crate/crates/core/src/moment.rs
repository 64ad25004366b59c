//! Moment-map images as one-particle reduced matrices and their translated
//! probability spectra.
//!
//! The moment map is reported as the traceless Hermitian matrix `ρ − I/N`
//! rather than the anti-Hermitian functional; every decision made from it
//! is spectral, so the constant rescaling never matters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_spectrum, inner, CMatrix};
use crate::states::{ParticleCase, QuantumState};

/// Default tolerance on the ∞-distance of translated spectra.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentImage {
    case: ParticleCase,
    rho_left: CMatrix,
    rho_right: Option<CMatrix>,
    q_spectrum: Vec<f64>,
}

impl MomentImage {
    pub fn case(&self) -> ParticleCase {
        self.case
    }

    pub fn n(&self) -> usize {
        self.q_spectrum.len()
    }

    /// `C C† / Tr(C†C)`.
    pub fn rho_left(&self) -> &CMatrix {
        &self.rho_left
    }

    /// `Cᵗ C̄ / Tr(C†C)`, distinguishable particles only.
    pub fn rho_right(&self) -> Option<&CMatrix> {
        self.rho_right.as_ref()
    }

    /// Translated probabilities `p − 1/N`, descending.
    pub fn q_spectrum(&self) -> &[f64] {
        &self.q_spectrum
    }

    /// Occupation probabilities `p`, descending.
    pub fn probabilities(&self) -> Vec<f64> {
        let shift = 1.0 / self.n() as f64;
        self.q_spectrum.iter().map(|q| q + shift).collect()
    }

    /// The traceless Hermitian matrix `ρ − I/N`.
    pub fn moment_matrix(&self) -> CMatrix {
        let n = self.n();
        &self.rho_left - CMatrix::identity(n, n).scale(1.0 / n as f64)
    }

    pub fn point(&self) -> PolytopePoint {
        PolytopePoint {
            q: self.q_spectrum.clone(),
            case: self.case,
        }
    }
}

/// A point of the translated probability polytope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopePoint {
    pub q: Vec<f64>,
    pub case: ParticleCase,
}

impl PolytopePoint {
    pub fn is_member(&self, tol: f64) -> bool {
        polytope_membership(&self.q, self.case, tol)
    }
}

pub fn reduced_matrix(state: &QuantumState) -> MomentImage {
    let c = state.coeffs();
    let norm2 = inner(c, c).re;
    let rho_left = (c * c.adjoint()).unscale(norm2);
    let rho_right = (state.case() == ParticleCase::Distinguishable)
        .then(|| (c.transpose() * c.conjugate()).unscale(norm2));
    let n = state.n();
    let shift = 1.0 / n as f64;
    let q_spectrum = hermitian_spectrum(&rho_left)
        .into_iter()
        .map(|p| p - shift)
        .collect();
    MomentImage {
        case: state.case(),
        rho_left,
        rho_right,
        q_spectrum,
    }
}

/// `‖q(a) − q(b)‖_∞` between sorted translated spectra.
pub fn spectral_distance(a: &MomentImage, b: &MomentImage) -> Result<f64> {
    if a.case != b.case {
        return Err(Error::CaseMismatch {
            expected: a.case,
            found: b.case,
        });
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(a.q_spectrum
        .iter()
        .zip(&b.q_spectrum)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

pub fn moment_equal(a: &MomentImage, b: &MomentImage, tol: f64) -> Result<bool> {
    Ok(spectral_distance(a, b)? <= tol)
}

/// Whether `q + 1/N` is a probability vector. Fermion spectra must in
/// addition pair up after sorting, with one trailing zero when `N` is odd.
pub fn polytope_membership(q: &[f64], case: ParticleCase, tol: f64) -> bool {
    let n = q.len();
    if n == 0 {
        return false;
    }
    let shift = 1.0 / n as f64;
    let p: Vec<f64> = q.iter().map(|x| x + shift).collect();
    if p.iter().any(|x| !x.is_finite() || *x < -tol) {
        return false;
    }
    if (p.iter().sum::<f64>() - 1.0).abs() > tol {
        return false;
    }
    if case != ParticleCase::Fermion {
        return true;
    }
    let mut sorted = p;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let paired = sorted
        .chunks(2)
        .all(|pair| pair.len() == 1 || (pair[0] - pair[1]).abs() <= tol);
    let tail_ok = n.is_multiple_of(2) || sorted[n - 1].abs() <= tol;
    paired && tail_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::states::{random_local_unitary, random_state};

    fn diag_state(case: ParticleCase, d: &[f64]) -> QuantumState {
        let n = d.len();
        let m = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) });
        QuantumState::validate(&m, case, 1e-9).unwrap()
    }

    fn wedge(lambdas: &[f64], n: usize) -> QuantumState {
        let mut m = CMatrix::zeros(n, n);
        for (j, l) in lambdas.iter().enumerate() {
            m[(2 * j, 2 * j + 1)] = C64::new(*l, 0.0);
            m[(2 * j + 1, 2 * j)] = C64::new(-*l, 0.0);
        }
        QuantumState::validate(&m, ParticleCase::Fermion, 1e-9).unwrap()
    }

    #[test]
    fn diagonal_boson_spectrum() {
        let s = diag_state(ParticleCase::Boson, &[0.7f64.sqrt(), 0.3f64.sqrt()]);
        let q = reduced_matrix(&s).q_spectrum().to_vec();
        assert!((q[0] - 0.2).abs() < 1e-12 && (q[1] + 0.2).abs() < 1e-12);
    }

    #[test]
    fn full_wedge_is_maximally_mixed() {
        let img = reduced_matrix(&wedge(&[1.0, 1.0], 4));
        assert!(img.probabilities().iter().all(|p| (p - 0.25).abs() < 1e-12));
        assert!(img.q_spectrum().iter().all(|q| q.abs() < 1e-12));
    }

    #[test]
    fn bell_state_is_maximally_mixed_on_both_sides() {
        let s = diag_state(ParticleCase::Distinguishable, &[1.0, 1.0]);
        let img = reduced_matrix(&s);
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert!(crate::linalg::frobenius(&(img.rho_left() - &half)) < 1e-12);
        assert!(crate::linalg::frobenius(&(img.rho_right().unwrap() - &half)) < 1e-12);
    }

    #[test]
    fn distinct_spectra_are_not_equal() {
        let a = reduced_matrix(&diag_state(ParticleCase::Boson, &[0.7f64.sqrt(), 0.3f64.sqrt()]));
        let b = reduced_matrix(&diag_state(ParticleCase::Boson, &[0.6f64.sqrt(), 0.4f64.sqrt()]));
        assert!(!moment_equal(&a, &b, 1e-9).unwrap());
        assert!(moment_equal(&a, &a, 0.0).unwrap());
        assert!((spectral_distance(&a, &b).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn comparing_different_cases_fails() {
        let a = reduced_matrix(&random_state(ParticleCase::Boson, 3, 1).unwrap());
        let b = reduced_matrix(&random_state(ParticleCase::Distinguishable, 3, 1).unwrap());
        assert!(matches!(moment_equal(&a, &b, 1e-9), Err(Error::CaseMismatch { .. })));
        let c = reduced_matrix(&random_state(ParticleCase::Boson, 4, 1).unwrap());
        assert!(matches!(moment_equal(&a, &c, 1e-9), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn polytope_examples() {
        for case in ParticleCase::ALL {
            assert!(polytope_membership(&[0.0; 4], case, 1e-12));
        }
        assert!(!polytope_membership(&[0.6, -0.6], ParticleCase::Boson, 1e-12));
        assert!(polytope_membership(&[0.2, 0.2, -0.2, -0.2], ParticleCase::Fermion, 1e-12));
        assert!(!polytope_membership(&[0.3, 0.1, -0.1, -0.3], ParticleCase::Fermion, 1e-12));
        // odd N needs the trailing zero probability
        let third = 1.0 / 3.0;
        assert!(polytope_membership(&[0.5 - third, 0.5 - third, -third], ParticleCase::Fermion, 1e-12));
        assert!(!polytope_membership(&[0.0, 0.0, 0.0], ParticleCase::Fermion, 1e-12));
    }

    #[test]
    fn left_and_right_spectra_agree() {
        for case in ParticleCase::ALL {
            for seed in 0..20 {
                let s = random_state(case, 2 + (seed as usize % 5), seed).unwrap();
                let img = reduced_matrix(&s);
                let c = s.coeffs();
                let right = hermitian_spectrum(&(c.adjoint() * c));
                let left: Vec<f64> = img.probabilities();
                for (l, r) in left.iter().zip(&right) {
                    assert!((l - r).abs() < 1e-10);
                }
                assert!(img.q_spectrum().iter().sum::<f64>().abs() < 1e-12);
                assert!(img.point().is_member(1e-10), "{case} seed {seed}");
            }
        }
    }

    #[test]
    fn spectrum_is_invariant_under_local_unitaries() {
        for case in ParticleCase::ALL {
            for seed in 0..20 {
                let n = 2 + (seed as usize % 5);
                let s = random_state(case, n, seed).unwrap();
                let g = random_local_unitary(case, n, 1000 + seed).unwrap();
                let a = reduced_matrix(&s);
                let b = reduced_matrix(&s.act(&g).unwrap());
                assert!(spectral_distance(&a, &b).unwrap() < 1e-10);
            }
        }
    }
}
