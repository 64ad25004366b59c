//! Canonical representatives on the slice of nonnegative, descending
//! diagonal forms.
//!
//! Bosons use the Takagi factorization `C = U Λ Uᵗ`, fermions the Youla form
//! `C = U (⊕ λ_j J₂ ⊕ 0) Uᵗ`, and distinguishable particles the singular
//! value decomposition written as `C = U Λ Vᵗ`. Both congruence forms are
//! computed by deflation: the top eigenvector of `A A†` on the current
//! complement yields one Takagi vector (or one Youla pair), the matrix is
//! compressed onto the orthogonal complement, and the step repeats until
//! the remainder is numerically zero.

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, hermitian_eigh, nearest_unitary, orthonormal_complement, to_special_unitary,
    transpose_defect, unitarity_defect, CMatrix, CVector, C64, I,
};
use crate::states::{LocalUnitary, ParticleCase, QuantumState};

/// Relative threshold below which canonical `λ` entries are set to zero.
pub const ZERO_SNAP: f64 = 1e-12;
/// Tolerance on the (anti)symmetry precondition of the congruence forms.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Maximal relative reconstruction residual accepted from a decomposition.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Slice representative of a state together with the witnesses that carry
/// it back to the original coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    case: ParticleCase,
    lambdas: Vec<f64>,
    witness_u: CMatrix,
    witness_v: Option<CMatrix>,
    global_phase: C64,
    residual: f64,
}

impl CanonicalForm {
    pub fn case(&self) -> ParticleCase {
        self.case
    }

    pub fn n(&self) -> usize {
        self.witness_u.nrows()
    }

    /// Descending, nonnegative. Length `N` (bosons, distinguishable) or `⌊N/2⌋`.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn witness_u(&self) -> &CMatrix {
        &self.witness_u
    }

    pub fn witness_v(&self) -> Option<&CMatrix> {
        self.witness_v.as_ref()
    }

    /// Phase `φ` with `C = φ · U Λ Uᵗ` (resp. `φ · U Λ Vᵗ`).
    pub fn global_phase(&self) -> C64 {
        self.global_phase
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// The witnesses as a group element mapping the slice point to the state
    /// (up to the global phase).
    pub fn witness(&self) -> LocalUnitary {
        LocalUnitary::new(self.case, self.witness_u.clone(), self.witness_v.clone())
            .expect("canonical witnesses are special unitary")
    }

    /// The slice point `Λ` (or `⊕ λ_j J₂ ⊕ 0`) as a coefficient matrix.
    pub fn slice_matrix(&self) -> CMatrix {
        slice_matrix(self.case, self.n(), &self.lambdas)
    }

    /// Occupation probabilities of the slice point, descending and summing to 1.
    pub fn probabilities(&self) -> Vec<f64> {
        probabilities_from_lambdas(self.case, self.n(), &self.lambdas)
    }

    /// `φ · U Λ Uᵗ` (or `φ · U Λ Vᵗ`).
    pub fn reconstruct(&self) -> CMatrix {
        let right = self.witness_v.as_ref().unwrap_or(&self.witness_u);
        (&self.witness_u * self.slice_matrix() * right.transpose()) * self.global_phase
    }
}

/// Coefficient matrix of the slice point with the given `λ`s.
pub fn slice_matrix(case: ParticleCase, n: usize, lambdas: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    match case {
        ParticleCase::Fermion => {
            for (j, l) in lambdas.iter().enumerate() {
                m[(2 * j, 2 * j + 1)] = C64::new(*l, 0.0);
                m[(2 * j + 1, 2 * j)] = C64::new(-*l, 0.0);
            }
        }
        _ => {
            for (j, l) in lambdas.iter().enumerate() {
                m[(j, j)] = C64::new(*l, 0.0);
            }
        }
    }
    m
}

/// Occupation probabilities from slice coordinates: `λ²` normalized, with
/// each fermion `λ²` doubled and a trailing zero for odd `N`.
pub fn probabilities_from_lambdas(case: ParticleCase, n: usize, lambdas: &[f64]) -> Vec<f64> {
    let mut p: Vec<f64> = match case {
        ParticleCase::Fermion => lambdas.iter().flat_map(|l| [l * l, l * l]).collect(),
        _ => lambdas.iter().map(|l| l * l).collect(),
    };
    p.resize(n, 0.0);
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

/// Autonne-Takagi factorization `c = U diag(λ) Uᵗ` of a complex symmetric
/// matrix, `λ` descending.
pub fn takagi(c: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    check_square(c)?;
    let scale = frobenius(c).max(1.0);
    let defect = transpose_defect(c, 1.0);
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::SymmetryViolation {
            case: ParticleCase::Boson,
            defect,
            tol: SYMMETRY_TOL,
        });
    }
    let (cols, lambdas) = deflate(c, 1, |a, v, sigma| {
        // A v̄ = σ w and A w̄ = σ v, so v + w (or i(v − w)) is a Takagi vector
        let w = (a * v.conjugate()).unscale(sigma);
        let plus = v + &w;
        let minus = (v - &w) * I;
        let x = if plus.norm() >= minus.norm() { plus } else { minus };
        let nx = x.norm();
        vec![x.unscale(nx)]
    });
    finish(c, cols, lambdas, ParticleCase::Boson)
}

/// Youla normal form `c = U (⊕ λ_j J₂ ⊕ 0) Uᵗ` of a complex antisymmetric
/// matrix, `J₂ = [[0, 1], [−1, 0]]`, `λ` descending.
pub fn youla_antisymmetric(c: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    check_square(c)?;
    let scale = frobenius(c).max(1.0);
    let defect = transpose_defect(c, -1.0);
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::SymmetryViolation {
            case: ParticleCase::Fermion,
            defect,
            tol: SYMMETRY_TOL,
        });
    }
    let (cols, lambdas) = deflate(c, 2, |a, v, sigma| {
        // A ū₁ = −λ u₂ and A ū₂ = λ u₁
        let u2 = -(a * v.conjugate()).unscale(sigma);
        let n2 = u2.norm();
        vec![v.clone(), u2.unscale(n2)]
    });
    finish(c, cols, lambdas, ParticleCase::Fermion)
}

/// Singular value decomposition in the form `c = U diag(λ) Vᵗ`, matching the
/// action `(U, V)·C = U C Vᵗ`.
///
/// Computed by the same deflation as the congruence forms: for the top
/// eigenvector `u` of `A A†` the partner is `v = Aᵗ ū / σ`, and both sides
/// are compressed onto their complements.
pub fn svd_congruence(c: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    check_square(c)?;
    if frobenius(c) == 0.0 {
        return Err(Error::ZeroState);
    }
    let n = c.nrows();
    let mut left = CMatrix::identity(n, n);
    let mut right = CMatrix::identity(n, n);
    let mut a = c.clone();
    let mut us: Vec<CVector> = Vec::with_capacity(n);
    let mut vs: Vec<CVector> = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    let mut threshold = None;
    while a.nrows() > 0 {
        let (values, vectors) = hermitian_eigh(&(&a * a.adjoint()));
        let sigma = values[0].max(0.0).sqrt();
        let cut = *threshold.get_or_insert(ZERO_SNAP * sigma);
        if sigma <= cut || sigma == 0.0 {
            break;
        }
        let u: CVector = vectors.column(0).into_owned();
        let v = a.transpose() * u.conjugate();
        let v = v.unscale(v.norm());
        us.push(&left * &u);
        vs.push(&right * &v);
        lambdas.push(sigma);
        let qu = orthonormal_complement(&CMatrix::from_columns(&[u]));
        let qv = orthonormal_complement(&CMatrix::from_columns(&[v]));
        a = qu.adjoint() * &a * qv.conjugate();
        left = &left * qu;
        right = &right * qv;
    }
    us.extend(left.column_iter().map(|c| c.into_owned()));
    vs.extend(right.column_iter().map(|c| c.into_owned()));
    let mut u = CMatrix::from_columns(&us);
    let mut v = CMatrix::from_columns(&vs);
    lambdas.resize(n, 0.0);
    let mut lv = lambdas.clone();
    sort_descending(&mut u, &mut lambdas, 1);
    sort_descending(&mut v, &mut lv, 1);
    snap(&mut lambdas);
    if unitarity_defect(&u) > 1e-12 {
        u = nearest_unitary(&u);
    }
    if unitarity_defect(&v) > 1e-12 {
        v = nearest_unitary(&v);
    }
    let residual = frobenius(&(c - &u * slice_matrix(ParticleCase::Distinguishable, n, &lambdas) * v.transpose()));
    if residual > RESIDUAL_TOL * frobenius(c).max(1.0) {
        return Err(Error::ConvergenceFailure { residual });
    }
    Ok((u, lambdas, v))
}

/// Reduce a state to its unique slice representative.
pub fn canonicalize(state: &QuantumState) -> Result<CanonicalForm> {
    let c = state.coeffs();
    let n = state.n();
    let case = state.case();
    let (u, lambdas, v) = match case {
        ParticleCase::Boson => {
            let (u, l) = takagi(c)?;
            (u, l, None)
        }
        ParticleCase::Fermion => {
            let (u, l) = youla_antisymmetric(c)?;
            (u, l, None)
        }
        ParticleCase::Distinguishable => {
            let (u, l, v) = svd_congruence(c)?;
            (u, l, Some(v))
        }
    };
    // move U (and V) into SU(N); the removed determinant phases resurface as
    // a global phase on the state
    let (witness_u, theta_u) = to_special_unitary(&u);
    let (witness_v, phase_angle) = match v {
        Some(v) => {
            let (sv, theta_v) = to_special_unitary(&v);
            (Some(sv), (theta_u + theta_v) / n as f64)
        }
        None => (None, 2.0 * theta_u / n as f64),
    };
    let mut cf = CanonicalForm {
        case,
        lambdas,
        witness_u,
        witness_v,
        global_phase: C64::from_polar(1.0, phase_angle),
        residual: 0.0,
    };
    cf.residual = frobenius(&(c - cf.reconstruct()));
    if cf.residual > RESIDUAL_TOL * frobenius(c).max(1.0) {
        return Err(Error::ConvergenceFailure {
            residual: cf.residual,
        });
    }
    Ok(cf)
}

fn check_square(c: &CMatrix) -> Result<()> {
    if c.nrows() != c.ncols() {
        return Err(Error::NonSquareInput {
            rows: c.nrows(),
            cols: c.ncols(),
        });
    }
    Ok(())
}

/// Shared deflation loop. `step` receives the current compressed matrix, a
/// unit top eigenvector of `A A†` and its singular value, and returns the
/// `block` orthonormal columns (in compressed coordinates) it spans.
fn deflate<F>(c: &CMatrix, block: usize, step: F) -> (CMatrix, Vec<f64>)
where
    F: Fn(&CMatrix, &CVector, f64) -> Vec<CVector>,
{
    let n = c.nrows();
    let mut basis = CMatrix::identity(n, n);
    let mut a = c.clone();
    let mut found: Vec<CVector> = Vec::with_capacity(n);
    let mut lambdas = Vec::new();
    let mut threshold = None;
    while a.nrows() >= block {
        let (values, vectors) = hermitian_eigh(&(&a * a.adjoint()));
        let sigma = values[0].max(0.0).sqrt();
        let cut = *threshold.get_or_insert(ZERO_SNAP * sigma);
        if sigma <= cut || sigma == 0.0 {
            break;
        }
        let top: CVector = vectors.column(0).into_owned();
        let local = step(&a, &top, sigma);
        let local_basis = CMatrix::from_columns(&local);
        found.extend(local.iter().map(|x| &basis * x));
        lambdas.push(sigma);
        let complement = orthonormal_complement(&local_basis);
        a = complement.adjoint() * &a * complement.conjugate();
        basis = &basis * complement;
    }
    let mut columns: Vec<CVector> = found;
    columns.extend(basis.column_iter().map(|c| c.into_owned()));
    (CMatrix::from_columns(&columns), lambdas)
}

fn finish(
    c: &CMatrix,
    mut u: CMatrix,
    mut lambdas: Vec<f64>,
    case: ParticleCase,
) -> Result<(CMatrix, Vec<f64>)> {
    let n = c.nrows();
    let full = match case {
        ParticleCase::Fermion => n / 2,
        _ => n,
    };
    lambdas.resize(full, 0.0);
    sort_descending(&mut u, &mut lambdas, if case == ParticleCase::Fermion { 2 } else { 1 });
    snap(&mut lambdas);
    let tol = RESIDUAL_TOL * frobenius(c).max(1.0);
    let residual_of = |u: &CMatrix| frobenius(&(c - u * slice_matrix(case, n, &lambdas) * u.transpose()));
    if unitarity_defect(&u) > 1e-12 {
        u = nearest_unitary(&u);
    }
    let residual = residual_of(&u);
    if residual > tol {
        return Err(Error::ConvergenceFailure { residual });
    }
    Ok((u, lambdas))
}

/// Deflation yields nonincreasing values up to rounding; enforce the order
/// exactly, moving column blocks along with their values.
fn sort_descending(u: &mut CMatrix, lambdas: &mut [f64], block: usize) {
    let k = lambdas.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| lambdas[b].total_cmp(&lambdas[a]));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return;
    }
    let old = u.clone();
    let sorted: Vec<f64> = order.iter().map(|&i| lambdas[i]).collect();
    for (dst, &src) in order.iter().enumerate() {
        for b in 0..block {
            u.set_column(block * dst + b, &old.column(block * src + b));
        }
    }
    lambdas.copy_from_slice(&sorted);
}

fn snap(lambdas: &mut [f64]) {
    let max = lambdas.iter().copied().fold(0.0, f64::max);
    for l in lambdas.iter_mut() {
        if *l <= ZERO_SNAP * max {
            *l = 0.0;
        }
    }
}
