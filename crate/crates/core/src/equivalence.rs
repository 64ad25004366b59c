//! Local unitary equivalence of bipartite states.
//!
//! For two bosons, two fermions and two distinguishable particles the moment
//! map separates orbits, so comparing sorted reduced spectra decides
//! equivalence. A witness is then assembled from the two canonical forms.

use crate::error::{Error, Result};
use crate::invariants::{orbit_invariants, DEFAULT_CLUSTER_TOL};
use crate::linalg::{frobenius, inner, C64};
use crate::moment::{reduced_matrix, spectral_distance};
use crate::slice::canonicalize;
use crate::states::{LocalUnitary, QuantumState};

/// Largest accepted `‖g·a − e^{iφ} b‖_F` for a returned witness.
pub const WITNESS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub spectral_distance: f64,
    pub witness: Option<LocalUnitary>,
    pub witness_residual: Option<f64>,
    /// Phase `e^{iφ}` with `g·a ≈ e^{iφ} b`.
    pub witness_phase: Option<C64>,
    pub warnings: Vec<String>,
}

fn check_pair(a: &QuantumState, b: &QuantumState) -> Result<()> {
    if a.case() != b.case() {
        return Err(Error::CaseMismatch {
            expected: a.case(),
            found: b.case(),
        });
    }
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

/// `min_φ ‖x − e^{iφ} y‖_F` and the minimizing phase.
fn phase_aligned_residual(x: &crate::linalg::CMatrix, y: &crate::linalg::CMatrix) -> (f64, C64) {
    let overlap = inner(y, x);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (frobenius(&(x - y * phase)), phase)
}

/// Decide whether `b` lies in the local unitary orbit of `a` (up to phase).
pub fn lu_equivalent(a: &QuantumState, b: &QuantumState, tol: f64) -> Result<EquivalenceVerdict> {
    check_pair(a, b)?;
    let distance = spectral_distance(&reduced_matrix(a), &reduced_matrix(b))?;
    let mut verdict = EquivalenceVerdict {
        equivalent: distance <= tol,
        spectral_distance: distance,
        witness: None,
        witness_residual: None,
        witness_phase: None,
        warnings: Vec::new(),
    };
    if !verdict.equivalent {
        return Ok(verdict);
    }
    let (ca, cb) = match (canonicalize(a), canonicalize(b)) {
        (Ok(ca), Ok(cb)) => (ca, cb),
        (Err(e), _) | (_, Err(e)) => {
            verdict.warnings.push(format!("no witness: {e}"));
            return Ok(verdict);
        }
    };
    // a = φ_a W_a·Λ and b = φ_b W_b·Λ, so W_b W_a⁻¹ carries a to b up to phase
    let g = cb.witness().compose(&ca.witness().inverse())?;
    let moved = a.act(&g)?;
    let (residual, phase) = phase_aligned_residual(moved.coeffs(), b.coeffs());
    if residual <= WITNESS_TOL {
        verdict.witness = Some(g);
        verdict.witness_residual = Some(residual);
        verdict.witness_phase = Some(phase);
    } else {
        verdict.warnings.push(format!(
            "witness residual {residual:.3e} exceeds {WITNESS_TOL:.0e}; spectra agree within tolerance but the slice points differ"
        ));
    }
    Ok(verdict)
}

/// Same orbit type: equal multiplicity vector and degeneracy flag.
pub fn same_stratum(a: &QuantumState, b: &QuantumState) -> Result<bool> {
    same_stratum_with(a, b, DEFAULT_CLUSTER_TOL)
}

pub fn same_stratum_with(a: &QuantumState, b: &QuantumState, cluster_tol: f64) -> Result<bool> {
    check_pair(a, b)?;
    let ia = orbit_invariants(&canonicalize(a)?, cluster_tol)?;
    let ib = orbit_invariants(&canonicalize(b)?, cluster_tol)?;
    Ok(ia.multiplicity == ib.multiplicity)
}
