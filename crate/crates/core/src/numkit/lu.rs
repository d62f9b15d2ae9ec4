use alloc::vec::Vec;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P·M = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid(alloc::format!(
                "LU needs a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        let scale = m.max_abs();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * scale * n as f64 || best == 0.0 {
                singular = true;
                if best == 0.0 {
                    continue;
                }
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu {
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(self.sign, 0.0);
        for i in 0..self.lu.rows() {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// `(log|det|, phase)` so that `det = exp(log|det|)·phase`; avoids
    /// overflow for large matrices.
    pub fn log_det(&self) -> (f64, Complex64) {
        let mut log = 0.0;
        let mut phase = Complex64::new(self.sign, 0.0);
        for i in 0..self.lu.rows() {
            let p = self.lu[(i, i)];
            let r = p.norm();
            log += libm::log(r);
            if r > 0.0 {
                phase *= p / r;
            }
        }
        (log, phase)
    }

    /// Solves `M·X = B`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::invalid(alloc::format!(
                "right-hand side has {} rows, expected {n}",
                b.rows()
            )));
        }
        if self.singular {
            return Err(Error::numerical("matrix is singular to working precision"));
        }
        let m = b.cols();
        let mut x = ComplexMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        if !x.is_finite() {
            return Err(Error::numerical("non-finite solution in LU solve"));
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.solve(&ComplexMatrix::identity(self.lu.rows()))
    }
}

/// Determinant via pivoted LU.
pub fn det(m: &ComplexMatrix) -> Result<Complex64> {
    Ok(Lu::new(m)?.det())
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Lu::new(m)?.inverse()
}

/// Solves `M·X = B`.
pub fn solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    Lu::new(m)?.solve(b)
}
