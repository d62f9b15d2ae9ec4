use alloc::vec::Vec;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::c64;
use crate::error::{Error, Result};

/// Eigenvalues and unit-norm right eigenvectors (as columns) of a general
/// complex square matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

/// Complex Schur decomposition by Hessenberg reduction and single-shift QR,
/// followed by back-substitution for the eigenvectors.
pub fn eig(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::invalid("eigen-decomposition needs a square matrix"));
    }
    if !m.is_finite() {
        return Err(Error::numerical("eigen-decomposition of a non-finite matrix"));
    }
    let n = m.rows();
    let (mut t, mut z) = hessenberg(m);
    schur(&mut t, &mut z)?;
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let vectors = triangular_eigenvectors(&t, &z);
    Ok(Eigen { values, vectors })
}

fn hessenberg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let ph = if x0.norm() == 0.0 { c64(1.0, 0.0) } else { x0 / x0.norm() };
        x[0] += ph * xnorm;
        let vnorm = libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>());
        for z in x.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vv*) H
        for j in 0..n {
            let mut s = c64(0.0, 0.0);
            for (i, vi) in x.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + i, j)];
            }
            s *= 2.0;
            for (i, vi) in x.iter().enumerate() {
                h[(k + 1 + i, j)] -= vi * s;
            }
        }
        // H ← H (I − 2vv*), Q ← Q (I − 2vv*)
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = c64(0.0, 0.0);
                for (j, vj) in x.iter().enumerate() {
                    s += mat[(i, k + 1 + j)] * vj;
                }
                s *= 2.0;
                for (j, vj) in x.iter().enumerate() {
                    mat[(i, k + 1 + j)] -= s * vj.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = c64(0.0, 0.0);
        }
    }
    (h, q)
}

/// `(c, s, r)` with `G = [[c, s], [−s̄, c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, c64(0.0, 0.0), a);
    }
    if an == 0.0 {
        return (0.0, c64(1.0, 0.0), b);
    }
    let r = libm::hypot(an, bn);
    let ph = a / an;
    (an / r, ph * b.conj() / r, ph * r)
}

fn rotate_rows(h: &mut ComplexMatrix, i: usize, c: f64, s: Complex64, cols: core::ops::Range<usize>) {
    for j in cols {
        let x = h[(i, j)];
        let y = h[(i + 1, j)];
        h[(i, j)] = x * c + s * y;
        h[(i + 1, j)] = -s.conj() * x + y * c;
    }
}

fn rotate_cols(h: &mut ComplexMatrix, j: usize, c: f64, s: Complex64, rows: core::ops::Range<usize>) {
    for i in rows {
        let x = h[(i, j)];
        let y = h[(i, j + 1)];
        h[(i, j)] = x * c + s.conj() * y;
        h[(i, j + 1)] = -s * x + y * c;
    }
}

fn schur(t: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<()> {
    let n = t.rows();
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let max_iter = 60 * n;
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut iu = n - 1;
    loop {
        while iu > 0 {
            let sub = t[(iu, iu - 1)].norm();
            let diag = t[(iu - 1, iu - 1)].norm() + t[(iu, iu)].norm();
            if sub <= eps * diag || sub < f64::MIN_POSITIVE {
                t[(iu, iu - 1)] = c64(0.0, 0.0);
                iu -= 1;
                iter = 0;
            } else {
                break;
            }
        }
        if iu == 0 {
            break;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::numerical("QR iteration did not converge"));
        }
        let mut il = iu - 1;
        while il > 0 {
            let sub = t[(il, il - 1)].norm();
            let diag = t[(il - 1, il - 1)].norm() + t[(il, il)].norm();
            if sub <= eps * diag {
                t[(il, il - 1)] = c64(0.0, 0.0);
                break;
            }
            il -= 1;
        }

        let shift = if iter.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            let mut sh = c64(t[(iu, iu - 1)].re.abs(), 0.0);
            if iu >= 2 {
                sh += c64(t[(iu - 1, iu - 2)].re.abs(), 0.0);
            }
            sh + t[(iu, iu)]
        } else {
            wilkinson(t, iu)
        };

        let (c, s, _) = givens(t[(il, il)] - shift, t[(il + 1, il)]);
        rotate_rows(t, il, c, s, il..n);
        rotate_cols(t, il, c, s, 0..(il + 3).min(iu + 1));
        rotate_cols(z, il, c, s, 0..n);
        for i in il + 1..iu {
            let (c, s, r) = givens(t[(i, i - 1)], t[(i + 1, i - 1)]);
            t[(i, i - 1)] = r;
            t[(i + 1, i - 1)] = c64(0.0, 0.0);
            rotate_rows(t, i, c, s, i..n);
            rotate_cols(t, i, c, s, 0..(i + 3).min(iu + 1));
            rotate_cols(z, i, c, s, 0..n);
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson(t: &ComplexMatrix, iu: usize) -> Complex64 {
    let a = t[(iu - 1, iu - 1)];
    let b = t[(iu - 1, iu)];
    let c = t[(iu, iu - 1)];
    let d = t[(iu, iu)];
    let tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn triangular_eigenvectors(t: &ComplexMatrix, z: &ComplexMatrix) -> ComplexMatrix {
    let n = t.rows();
    let norm = t.max_abs().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * norm;
    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = c64(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = c64(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < small {
                den = c64(small, 0.0);
            }
            y[(i, k)] = -s / den;
            // Rescale to avoid overflow on nearly repeated eigenvalues.
            let big = y[(i, k)].norm();
            if big > 1e100 {
                for r in i..=k {
                    y[(r, k)] /= big;
                }
            }
        }
    }
    let mut v = z * &y;
    for k in 0..n {
        let nrm = libm::sqrt((0..n).map(|i| v[(i, k)].norm_sqr()).sum::<f64>());
        if nrm > 0.0 {
            for i in 0..n {
                v[(i, k)] /= nrm;
            }
        }
    }
    v
}
