use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Lower-triangular `L` with `L·L* = M` for Hermitian positive-definite `M`.
/// Only the lower triangle of `M` is read.
pub fn cholesky(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::invalid("Cholesky needs a square matrix"));
    }
    let n = m.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::not_pd("matrix", alloc::format!("Cholesky pivot {j} is {d:e}")));
        }
        let djj = libm::sqrt(d);
        l[(j, j)] = crate::c64(djj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}
