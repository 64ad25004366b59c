//! Two-particle pure states as coefficient matrices, and the local unitary
//! group and algebra acting on them.
//!
//! A state `v = Σ C_ij e_i ⊗ e_j` is stored as its full `N×N` coefficient
//! matrix `C`. Bosons carry symmetric `C`, fermions antisymmetric `C`, and
//! distinguishable particles an arbitrary `C`. `SU(N)` acts by congruence
//! `U C Uᵗ` on the first two; `SU(N) × SU(N)` acts by `U C Vᵗ` on the last.

use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, to_special_unitary, transpose_defect, unitarity_defect, CMatrix, C64};

/// Tolerance on `‖u†u − I‖` and `|det u − 1|` for local unitaries.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on the Hermitian part (and trace) of an algebra element.
pub const ALGEBRA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParticleCase {
    #[serde(rename = "boson")]
    Boson,
    #[serde(rename = "fermion")]
    Fermion,
    #[serde(rename = "dist")]
    Distinguishable,
}

impl ParticleCase {
    pub const ALL: [ParticleCase; 3] = [
        ParticleCase::Boson,
        ParticleCase::Fermion,
        ParticleCase::Distinguishable,
    ];

    /// Sign `s` in the constraint `C = s·Cᵗ`, if any.
    pub fn transpose_sign(self) -> Option<f64> {
        match self {
            ParticleCase::Boson => Some(1.0),
            ParticleCase::Fermion => Some(-1.0),
            ParticleCase::Distinguishable => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ParticleCase::Boson => "boson",
            ParticleCase::Fermion => "fermion",
            ParticleCase::Distinguishable => "dist",
        }
    }
}

impl fmt::Display for ParticleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ParticleCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boson" | "bosons" | "b" => Ok(ParticleCase::Boson),
            "fermion" | "fermions" | "f" => Ok(ParticleCase::Fermion),
            "dist" | "distinguishable" | "d" => Ok(ParticleCase::Distinguishable),
            other => Err(Error::Parse(format!("unknown particle case '{other}'"))),
        }
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

/// A normalized two-particle pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    case: ParticleCase,
    coeffs: CMatrix,
}

impl QuantumState {
    /// Validate a raw coefficient matrix: repair (anti)symmetry defects up to
    /// `tol` (relative to `‖raw‖_F`) and scale to unit Frobenius norm.
    pub fn validate(raw: &CMatrix, case: ParticleCase, tol: f64) -> Result<Self> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::NonSquareInput {
                rows: raw.nrows(),
                cols: raw.ncols(),
            });
        }
        check_dimension(raw.nrows())?;
        let norm = frobenius(raw);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        let projected = match case.transpose_sign() {
            Some(sign) => {
                let defect = transpose_defect(raw, sign) / norm;
                if defect > tol {
                    return Err(Error::SymmetryViolation { case, defect, tol });
                }
                (raw + raw.transpose().scale(sign)).scale(0.5)
            }
            None => raw.clone(),
        };
        let pnorm = frobenius(&projected);
        if pnorm == 0.0 {
            return Err(Error::ZeroState);
        }
        // already-normalized input is kept bit for bit so save/load is exact
        let coeffs = if (pnorm - 1.0).abs() <= 8.0 * f64::EPSILON {
            projected
        } else {
            projected.unscale(pnorm)
        };
        Ok(QuantumState { case, coeffs })
    }

    /// Gaussian random state of the given symmetry class, reproducible per seed.
    pub fn random(case: ParticleCase, n: usize, seed: u64) -> Result<Self> {
        check_dimension(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gaussian_matrix(n, &mut rng);
        QuantumState::validate(&project(&g, case), case, f64::INFINITY)
    }

    pub fn case(&self) -> ParticleCase {
        self.case
    }

    /// One-particle dimension `N`.
    pub fn n(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CMatrix {
        self.coeffs
    }

    /// Group action `U C Uᵗ` (diagonal cases) or `U C Vᵗ` (distinguishable).
    pub fn act(&self, g: &LocalUnitary) -> Result<QuantumState> {
        self.check_compatible(g.case, g.n())?;
        let right = g.v.as_ref().unwrap_or(&g.u);
        let mut coeffs = &g.u * &self.coeffs * right.transpose();
        if let Some(sign) = self.case.transpose_sign() {
            coeffs = (&coeffs + coeffs.transpose().scale(sign)).scale(0.5);
        }
        Ok(QuantumState {
            case: self.case,
            coeffs,
        })
    }

    /// Linearized action `ξC + Cξᵗ` (or `ξ₁C + Cξ₂ᵗ`). The result is a tangent
    /// vector, not a state, so it is returned as a bare matrix.
    pub fn algebra_act(&self, xi: &AlgebraElement) -> Result<CMatrix> {
        self.check_compatible(xi.case, xi.n())?;
        Ok(xi.apply(&self.coeffs))
    }

    fn check_compatible(&self, case: ParticleCase, n: usize) -> Result<()> {
        if case != self.case {
            return Err(Error::CaseMismatch {
                expected: self.case,
                found: case,
            });
        }
        if n != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Free-function form of [`QuantumState::validate`].
pub fn validate(raw: &CMatrix, case: ParticleCase, tol: f64) -> Result<QuantumState> {
    QuantumState::validate(raw, case, tol)
}

pub fn apply_group_action(state: &QuantumState, g: &LocalUnitary) -> Result<QuantumState> {
    state.act(g)
}

pub fn apply_algebra_action(state: &QuantumState, xi: &AlgebraElement) -> Result<CMatrix> {
    state.algebra_act(xi)
}

pub fn random_state(case: ParticleCase, n: usize, seed: u64) -> Result<QuantumState> {
    QuantumState::random(case, n, seed)
}

pub fn random_local_unitary(case: ParticleCase, n: usize, seed: u64) -> Result<LocalUnitary> {
    LocalUnitary::random(case, n, seed)
}

/// An element of `K = SU(N)` or `K_D = SU(N) × SU(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    case: ParticleCase,
    u: CMatrix,
    v: Option<CMatrix>,
}

impl LocalUnitary {
    /// `v` must be given exactly when `case` is distinguishable.
    pub fn new(case: ParticleCase, u: CMatrix, v: Option<CMatrix>) -> Result<Self> {
        check_special_unitary(&u)?;
        match (&v, case) {
            (Some(v), ParticleCase::Distinguishable) => {
                if v.nrows() != u.nrows() {
                    return Err(Error::DimensionMismatch {
                        expected: u.nrows(),
                        found: v.nrows(),
                    });
                }
                check_special_unitary(v)?;
            }
            (None, ParticleCase::Distinguishable) => {
                return Err(Error::InvalidStratum(
                    "distinguishable local unitary needs a second factor".into(),
                ))
            }
            (Some(_), _) => {
                return Err(Error::CaseMismatch {
                    expected: ParticleCase::Distinguishable,
                    found: case,
                })
            }
            (None, _) => {}
        }
        check_dimension(u.nrows())?;
        Ok(LocalUnitary { case, u, v })
    }

    pub fn identity(case: ParticleCase, n: usize) -> Self {
        let id = CMatrix::identity(n, n);
        let v = (case == ParticleCase::Distinguishable).then(|| id.clone());
        LocalUnitary { case, u: id, v }
    }

    /// Haar-random element: QR of a complex Gaussian matrix with the phases of
    /// `R`'s diagonal moved into `Q`, then rescaled to unit determinant.
    pub fn random(case: ParticleCase, n: usize, seed: u64) -> Result<Self> {
        check_dimension(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_su(n, &mut rng);
        let v = (case == ParticleCase::Distinguishable).then(|| haar_su(n, &mut rng));
        LocalUnitary::new(case, u, v)
    }

    pub fn case(&self) -> ParticleCase {
        self.case
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn v(&self) -> Option<&CMatrix> {
        self.v.as_ref()
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &LocalUnitary) -> Result<LocalUnitary> {
        if self.case != other.case {
            return Err(Error::CaseMismatch {
                expected: self.case,
                found: other.case,
            });
        }
        let u = &self.u * &other.u;
        let v = match (&self.v, &other.v) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        Ok(LocalUnitary {
            case: self.case,
            u,
            v,
        })
    }

    pub fn inverse(&self) -> LocalUnitary {
        LocalUnitary {
            case: self.case,
            u: self.u.adjoint(),
            v: self.v.as_ref().map(|v| v.adjoint()),
        }
    }
}

fn check_special_unitary(u: &CMatrix) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::NonSquareInput {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let unitarity = unitarity_defect(u);
    let det = (u.determinant() - C64::new(1.0, 0.0)).norm();
    if unitarity > UNITARY_TOL || det > UNITARY_TOL || !unitarity.is_finite() {
        return Err(Error::NotSpecialUnitary { unitarity, det });
    }
    Ok(())
}

/// An element of `su(N)` (or `su(N) ⊕ su(N)` for distinguishable particles).
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    case: ParticleCase,
    xi: CMatrix,
    xi2: Option<CMatrix>,
}

impl AlgebraElement {
    pub fn new(case: ParticleCase, xi: CMatrix, xi2: Option<CMatrix>) -> Result<Self> {
        check_su_element(&xi)?;
        match (&xi2, case) {
            (Some(x), ParticleCase::Distinguishable) => {
                if x.nrows() != xi.nrows() {
                    return Err(Error::DimensionMismatch {
                        expected: xi.nrows(),
                        found: x.nrows(),
                    });
                }
                check_su_element(x)?
            }
            (None, ParticleCase::Distinguishable) => {
                return Err(Error::InvalidStratum(
                    "distinguishable algebra element needs a second component".into(),
                ))
            }
            (Some(_), _) => {
                return Err(Error::CaseMismatch {
                    expected: ParticleCase::Distinguishable,
                    found: case,
                })
            }
            (None, _) => {}
        }
        Ok(AlgebraElement { case, xi, xi2 })
    }

    /// Constructor for basis elements that are anti-Hermitian and traceless
    /// by construction.
    pub(crate) fn from_parts(case: ParticleCase, xi: CMatrix, xi2: Option<CMatrix>) -> Self {
        AlgebraElement { case, xi, xi2 }
    }

    pub fn zero(case: ParticleCase, n: usize) -> Self {
        let z = CMatrix::zeros(n, n);
        let z2 = (case == ParticleCase::Distinguishable).then(|| z.clone());
        AlgebraElement { case, xi: z, xi2: z2 }
    }

    /// Random element with Gaussian entries, reproducible per seed.
    pub fn random(case: ParticleCase, n: usize, seed: u64) -> Result<Self> {
        check_dimension(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = random_su(n, &mut rng);
        let xi2 = (case == ParticleCase::Distinguishable).then(|| random_su(n, &mut rng));
        Ok(AlgebraElement { case, xi, xi2 })
    }

    pub fn case(&self) -> ParticleCase {
        self.case
    }

    pub fn n(&self) -> usize {
        self.xi.nrows()
    }

    pub fn first(&self) -> &CMatrix {
        &self.xi
    }

    pub fn second(&self) -> Option<&CMatrix> {
        self.xi2.as_ref()
    }

    /// `ξC + Cξᵗ` or `ξ₁C + Cξ₂ᵗ` on an arbitrary coefficient matrix.
    pub fn apply(&self, c: &CMatrix) -> CMatrix {
        let right = self.xi2.as_ref().unwrap_or(&self.xi);
        &self.xi * c + c * right.transpose()
    }

    /// `exp(t·ξ)` as a local unitary.
    pub fn exp(&self, t: f64) -> Result<LocalUnitary> {
        let u = self.xi.scale(t).exp();
        let v = self.xi2.as_ref().map(|x| x.scale(t).exp());
        LocalUnitary::new(self.case, u, v)
    }
}

fn check_su_element(xi: &CMatrix) -> Result<()> {
    if xi.nrows() != xi.ncols() {
        return Err(Error::NonSquareInput {
            rows: xi.nrows(),
            cols: xi.ncols(),
        });
    }
    let herm = frobenius(&(xi + xi.adjoint()).scale(0.5));
    if herm > ALGEBRA_TOL {
        return Err(Error::NotAntiHermitian(herm));
    }
    let tr = xi.trace().norm();
    if tr > ALGEBRA_TOL {
        return Err(Error::NotTraceless(tr));
    }
    Ok(())
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

fn project(g: &CMatrix, case: ParticleCase) -> CMatrix {
    match case.transpose_sign() {
        Some(sign) => (g + g.transpose().scale(sign)).scale(0.5),
        None => g.clone(),
    }
}

fn haar_su(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let z = gaussian_matrix(n, rng);
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    to_special_unitary(&q).0
}

fn random_su(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = gaussian_matrix(n, rng);
    let anti = (&g - g.adjoint()).scale(0.5);
    let shift = anti.trace() / n as f64;
    anti - CMatrix::identity(n, n) * shift
}
