//! Small dense complex linear-algebra helpers shared by the decompositions
//! and the oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `‖u†u − I‖_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    frobenius(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. Ties keep the solver's order.
pub fn hermitian_eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    // symmetrize to kill rounding noise in the anti-Hermitian part
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_spectrum(h: &CMatrix) -> Vec<f64> {
    let sym = (h + h.adjoint()).scale(0.5);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Orthonormal basis (as columns) of the orthogonal complement of the span
/// of the orthonormal columns of `basis`.
pub fn orthonormal_complement(basis: &CMatrix) -> CMatrix {
    let n = basis.nrows();
    let k = basis.ncols();
    if k == 0 {
        return CMatrix::identity(n, n);
    }
    let projector = CMatrix::identity(n, n) - basis * basis.adjoint();
    let (_, vectors) = hermitian_eigh(&projector);
    vectors.columns(0, n - k).into_owned()
}

/// Replace a nearly unitary `u` by its polar factor `u (u†u)^{-1/2}`.
pub fn nearest_unitary(u: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigh(&(u.adjoint() * u));
    let inv_sqrt = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|x| C64::new(1.0 / x.max(f64::MIN_POSITIVE).sqrt(), 0.0)),
    ));
    u * (&vectors * inv_sqrt * vectors.adjoint())
}

/// Principal `n`-th root of `1/det(u)` times `u`, returning the rescaled
/// matrix (in SU(n) when `u` is unitary) and the removed phase angle.
pub fn to_special_unitary(u: &CMatrix) -> (CMatrix, f64) {
    let n = u.nrows() as f64;
    let theta = u.determinant().arg();
    (u * C64::from_polar(1.0, -theta / n), theta)
}

/// Stack real and imaginary parts of a complex matrix into a real vector
/// (column-major, all real parts first).
pub fn realify(m: &CMatrix) -> DVector<f64> {
    let len = m.len();
    DVector::from_fn(2 * len, |i, _| {
        if i < len {
            m.as_slice()[i].re
        } else {
            m.as_slice()[i - len].im
        }
    })
}

/// Singular values of a real matrix, descending. (nalgebra's real SVD is
/// accurate; its complex SVD is not used anywhere in this crate.)
pub fn real_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub(crate) fn transpose_defect(m: &CMatrix, sign: f64) -> f64 {
    frobenius(&(m - m.transpose().scale(sign)))
}
