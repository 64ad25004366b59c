//! State files and JSON reports.
//!
//! State files keep full `f64` precision so that save/load is exact. Report
//! numbers are rounded to 15 significant digits.

use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::equivalence::EquivalenceVerdict;
use crate::error::{Error, Result};
use crate::invariants::OrbitInvariants;
use crate::linalg::{CMatrix, C64};
use crate::moment::MomentImage;
use crate::oracle::{CounterexampleReport, OracleReport};
use crate::slice::CanonicalForm;
use crate::states::{LocalUnitary, ParticleCase, QuantumState};

/// Round to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn rounded(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| round15(*x)).collect()
}

fn complex_json(z: C64, round: bool) -> Value {
    if round {
        json!([round15(z.re), round15(z.im)])
    } else {
        json!([z.re, z.im])
    }
}

fn matrix_value(m: &CMatrix, round: bool) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| complex_json(m[(i, j)], round))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Row-major `[[[re, im], …], …]` at 15 significant digits.
pub fn matrix_json(m: &CMatrix) -> Value {
    matrix_value(m, true)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    case: String,
    n: usize,
    matrix: Vec<Vec<Vec<f64>>>,
}

/// Parse a `[[[re, im], …], …]` array into an `n × n` matrix.
fn parse_matrix(rows: &[Vec<Vec<f64>>], n: usize) -> Result<CMatrix> {
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, entry) in row.iter().enumerate() {
            let [re, im] = entry.as_slice() else {
                return Err(Error::Parse(format!("entry ({i},{j}) is not a [re, im] pair")));
            };
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("entry ({i},{j}) is not finite")));
            }
            m[(i, j)] = C64::new(*re, *im);
        }
    }
    Ok(m)
}

/// Parse and validate a state file body. Syntax problems are
/// [`Error::Parse`]; symmetry and dimension problems come from validation.
pub fn parse_state(text: &str, tol: f64) -> Result<QuantumState> {
    let raw: RawState = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let case: ParticleCase = raw.case.parse()?;
    let m = parse_matrix(&raw.matrix, raw.n)?;
    QuantumState::validate(&m, case, tol)
}

pub fn read_state_file(path: &Path, tol: f64) -> Result<QuantumState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_state(&text, tol)
}

/// State file contents; numbers are written exactly.
pub fn state_json(state: &QuantumState) -> Value {
    json!({
        "case": state.case(),
        "n": state.n(),
        "matrix": matrix_value(state.coeffs(), false),
    })
}

pub fn moment_json(m: &MomentImage) -> Value {
    json!({
        "q": rounded(m.q_spectrum()),
        "p": rounded(&m.probabilities()),
        "case": m.case(),
    })
}

pub fn canonical_json(cf: &CanonicalForm) -> Value {
    json!({
        "lambdas": rounded(cf.lambdas()),
        "residual": round15(cf.residual()),
        "global_phase": complex_json(cf.global_phase(), true),
        "witness_u": matrix_json(cf.witness_u()),
        "witness_v": cf.witness_v().map(matrix_json),
    })
}

pub fn stratum_json(inv: &OrbitInvariants) -> Value {
    let fiber: Vec<Value> = inv
        .fiber_factors
        .iter()
        .map(|f| json!({"kind": f.kind(), "m": f.m(), "dim": f.dim()}))
        .collect();
    json!({
        "d": inv.multiplicity.d,
        "degenerate": inv.multiplicity.degenerate,
        "flag_dim": inv.flag_dim_real,
        "fiber": fiber,
        "fiber_dim": inv.fiber_dim,
        "orbit_dim": inv.orbit_dim,
        "degeneracy": inv.degeneracy_d,
    })
}

pub fn witness_json(g: &LocalUnitary) -> Value {
    json!({
        "u": matrix_json(g.u()),
        "v": g.v().map(matrix_json),
    })
}

pub fn verdict_json(v: &EquivalenceVerdict) -> Value {
    let witness = v.witness.as_ref().map(|g| {
        let mut w = witness_json(g);
        if let Some(phase) = v.witness_phase {
            w["phase"] = complex_json(phase, true);
        }
        w
    });
    json!({
        "equivalent": v.equivalent,
        "spectral_distance": round15(v.spectral_distance),
        "witness": witness,
        "witness_residual": v.witness_residual.map(round15),
        "warnings": v.warnings,
    })
}

pub fn oracle_json(r: &OracleReport) -> Value {
    json!({
        "orbit_dim_numeric": r.orbit_dim_numeric,
        "symplectic_rank_numeric": r.symplectic_rank_numeric,
        "degeneracy_numeric": r.degeneracy_numeric,
        "formula_orbit_dim": r.formula_orbit_dim,
        "formula_degeneracy": r.formula_degeneracy,
        "agree": r.agree,
        "rank_tolerance_used": r.rank_tolerance_used,
        "diagnostics": r.diagnostics,
    })
}

pub fn counterexample_json(r: &CounterexampleReport) -> Value {
    let spectra = |s: &[[f64; 2]; 3]| -> Vec<Vec<f64>> { s.iter().map(|x| rounded(x)).collect() };
    json!({
        "spectra_x1": spectra(&r.spectra_x1),
        "spectra_x2": spectra(&r.spectra_x2),
        "max_spectral_difference": round15(r.max_spectral_difference),
        "moment_images_equal": r.moment_images_equal,
        "tangle_x1": round15(r.tangle_x1),
        "tangle_x2": round15(r.tangle_x2),
        "orbits_distinct": r.orbits_distinct,
        "conclusion": r.conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_state;

    fn state_text(case: &str, n: usize, rows: &str) -> String {
        format!(r#"{{"case": "{case}", "n": {n}, "matrix": {rows}}}"#)
    }

    #[test]
    fn round_trip_is_exact() {
        for case in ParticleCase::ALL {
            let s = random_state(case, 4, 3).unwrap();
            let text = serde_json::to_string(&state_json(&s)).unwrap();
            let back = parse_state(&text, 1e-12).unwrap();
            assert_eq!(back.coeffs(), s.coeffs());
        }
    }

    #[test]
    fn parses_a_bell_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = state_text("dist", 2, &format!("[[[{h},0],[0,0]],[[0,0],[{h},0]]]"));
        let s = parse_state(&text, 1e-8).unwrap();
        assert_eq!(s.case(), ParticleCase::Distinguishable);
        assert!((s.coeffs()[(1, 1)].re - h).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_files() {
        let bad = [
            "not json".to_string(),
            state_text("boson", 2, "[[[1,0],[0,0]],[[0,0]]]"),
            state_text("boson", 3, "[[[1,0],[0,0]],[[0,0],[1,0]]]"),
            state_text("boson", 2, "[[[1,0],[0,0]],[[0,0],[1]]]"),
            state_text("boson", 2, "[[[1,0],[0,0]],[[0,0],[1e400,0]]]"),
            state_text("boson", 2, "[[[1,0],[0,0]],[[0,0],[NaN,0]]]"),
            state_text("anyon", 2, "[[[1,0],[0,0]],[[0,0],[1,0]]]"),
        ];
        for text in &bad {
            assert!(matches!(parse_state(text, 1e-8), Err(Error::Parse(_))), "{text}");
        }
    }

    #[test]
    fn symmetry_errors_are_validation_errors() {
        let text = state_text("boson", 2, "[[[1,0],[1,0]],[[0,0],[1,0]]]");
        assert!(matches!(parse_state(&text, 1e-8), Err(Error::SymmetryViolation { .. })));
        let zero = state_text("dist", 2, "[[[0,0],[0,0]],[[0,0],[0,0]]]");
        assert!(matches!(parse_state(&zero, 1e-8), Err(Error::ZeroState)));
    }

    #[test]
    fn round15_keeps_fifteen_digits() {
        assert_eq!(round15(0.123_456_789_012_345_68), 0.123456789012346);
        assert_eq!(round15(round15(std::f64::consts::PI)), round15(std::f64::consts::PI));
        assert_eq!(round15(0.0), 0.0);
    }
}
