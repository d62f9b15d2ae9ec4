//! Dense complex linear algebra used throughout the crate.

mod cholesky;
mod eigen;
mod lu;
mod matrix;
mod quadrature;
mod svd;

pub use cholesky::cholesky;
pub use eigen::{eig, Eigen};
pub use lu::{det, inverse, solve, Lu};
pub use matrix::ComplexMatrix;
pub use quadrature::{circle_quadrature, try_circle_quadrature};
pub use svd::{svd, Svd};

use crate::error::{Error, Result};

/// Default structural tolerance, relative to the matrix norm.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default number of nodes for [`circle_quadrature`].
pub const DEFAULT_QUADRATURE_NODES: usize = 4096;

/// `true` iff `M` is Hermitian within `tol·(1+‖M‖)` and the smallest
/// eigenvalue of its Hermitian part exceeds `tol·‖M‖`.
pub fn is_hermitian_pd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(hermitian_pd_defect(m, tol)?.is_none())
}

/// Like [`is_hermitian_pd`] but explains the failure.
pub fn hermitian_pd_defect(m: &ComplexMatrix, tol: f64) -> Result<Option<alloc::string::String>> {
    if !m.is_square() {
        return Err(Error::invalid(alloc::format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let norm = m.norm();
    let asym = m.distance(&m.adjoint());
    if asym > tol * (1.0 + norm) {
        return Ok(Some(alloc::format!("‖M − M*‖ = {asym:e} (not Hermitian)")));
    }
    let n = m.rows();
    let shifted = &m.hermitian_part() - &ComplexMatrix::identity(n).scale_real(tol * norm);
    if n == 0 || cholesky(&shifted).is_ok() {
        return Ok(None);
    }
    let lmin = min_hermitian_eigenvalue(m);
    Ok(Some(alloc::format!("smallest eigenvalue {lmin:e} ≤ {:e}", tol * norm)))
}

/// Smallest eigenvalue of `(M + M*)/2`.
pub fn min_hermitian_eigenvalue(m: &ComplexMatrix) -> f64 {
    match eig(&m.hermitian_part()) {
        Ok(e) => e.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
        Err(_) => f64::NAN,
    }
}

/// Number of singular values above `tol·σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    svd(m).rank(tol)
}

/// Orthonormal basis (as columns) of the right kernel of `M`, using the
/// same threshold as [`numerical_rank`].
pub fn kernel_basis(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let s = svd(m);
    let r = s.rank(tol);
    let n = m.cols();
    s.v.block(0, r, n, n - r)
}

/// 2-norm condition number `σ_max/σ_min` (infinite for singular input).
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = svd(m);
    match (s.s.first(), s.s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}
