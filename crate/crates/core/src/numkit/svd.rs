use alloc::vec::Vec;

use num_complex::Complex64;

use super::ComplexMatrix;

/// Thin singular value decomposition `M = U·diag(s)·V*` with `s` sorted in
/// decreasing order. `V` is square; columns of `U` belonging to zero
/// singular values are left at zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Count of singular values above `tol·σ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let smax = self.s.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.s.iter().filter(|&&x| x > tol * smax).count()
    }
}

/// One-sided Jacobi SVD.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let rows = m.rows();
    let n = m.cols();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let eps = f64::EPSILON;

    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..rows {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    alpha += ap.norm_sqr();
                    beta += aq.norm_sqr();
                    gamma += ap.conj() * aq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                // Rotate column q's phase so the inner product becomes real.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..rows {
                    let ap = a[(i, p)];
                    let bq = a[(i, q)] * phase;
                    a[(i, p)] = ap * c - bq * s;
                    a[(i, q)] = ap * s + bq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase;
                    v[(i, p)] = vp * c - vq * s;
                    v[(i, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| libm::sqrt((0..rows).map(|i| a[(i, j)].norm_sqr()).sum::<f64>()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(core::cmp::Ordering::Equal));

    let mut u = ComplexMatrix::zeros(rows, n);
    let mut vs = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sj = norms[j];
        s.push(sj);
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
        if sj > 0.0 {
            for i in 0..rows {
                u[(i, k)] = a[(i, j)] / sj;
            }
        }
    }
    Svd { u, s, v: vs }
}
