//! Brute-force references: fixed-point iteration, quadrature, dense
//! determinants and DFT products. None of them goes through the zeros of
//! the symbol.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::c64;
use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, Lu};
use crate::symbol::{self, OrderOneSymbol};
use crate::weights::GaussianWeight;
use crate::{invariant, process, szego, Side};

pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleValue {
    Matrix(ComplexMatrix),
    Scalar(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub value: OracleValue,
    /// Iterations used, or grid size.
    pub iterations: usize,
    pub residual: f64,
    pub tolerance: f64,
    /// Set when the residual did not reach the tolerance.
    pub failed: bool,
}

impl OracleReport {
    pub fn matrix(&self) -> Option<&ComplexMatrix> {
        match &self.value {
            OracleValue::Matrix(m) => Some(m),
            OracleValue::Scalar(_) => None,
        }
    }
}

/// Iterates the Schur-complement map from `A_LL` (right) or `A_RR` (left)
/// until successive iterates differ by at most `tol`.
pub fn riccati_fixed_point(w: &GaussianWeight, side: Side, tol: f64, max_iter: usize) -> Result<OracleReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let step = |b: &ComplexMatrix| -> Result<ComplexMatrix> {
        Ok(match side {
            Side::Right => {
                let lu = Lu::new(&(w.a_rr() + b))?;
                w.a_ll() - &(w.a_lr() * &lu.solve(w.a_rl())?)
            }
            Side::Left => {
                let lu = Lu::new(&(b + w.a_ll()))?;
                w.a_rr() - &(w.a_rl() * &lu.solve(w.a_lr())?)
            }
        })
    };
    let mut b = match side {
        Side::Right => w.a_ll().clone(),
        Side::Left => w.a_rr().clone(),
    };
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let next = step(&b)?.hermitian_part();
        delta = next.distance(&b);
        b = next;
        iterations += 1;
        if delta <= tol {
            break;
        }
    }
    let name = match side {
        Side::Right => "riccati_fixed_point(right)",
        Side::Left => "riccati_fixed_point(left)",
    };
    Ok(OracleReport {
        name: name.into(),
        value: OracleValue::Matrix(b),
        iterations,
        residual: delta,
        tolerance: tol,
        failed: !(delta <= tol),
    })
}

/// `(1/N)Σ Φ(e^{iθ_j})⁻¹ e^{−ikθ_j}` with dense inversion.
pub fn quadrature_fourier(w: &GaussianWeight, k: i64, n: usize) -> Result<ComplexMatrix> {
    if (n as u64) < 4 * k.unsigned_abs() + 16 {
        return Err(Error::invalid(alloc::format!("grid of {n} nodes is too small for k = {k}")));
    }
    let sym = OrderOneSymbol::from_weight(w);
    numkit::try_circle_quadrature(
        |t| {
            let inv = numkit::inverse(&sym.eval(Complex64::from_polar(1.0, t)))?;
            Ok(inv.scale(Complex64::from_polar(1.0, -(k as f64) * t)))
        },
        n,
    )
}

/// Determinant by pivoted LU.
pub fn dense_det(m: &ComplexMatrix) -> Result<Complex64> {
    numkit::det(m)
}

/// `log(α^P (2π)^{dP} Π_k det Φ(ω_P^k)⁻¹)`.
pub fn log_dft_partition(w: &GaussianWeight, p: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::invalid("dft_partition needs P >= 2"));
    }
    let sym = OrderOneSymbol::from_weight(w);
    let mut log = p as f64 * (libm::log(w.alpha()) + w.d() as f64 * libm::log(2.0 * PI));
    for k in 0..p {
        let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64);
        let det = numkit::det(&sym.eval(z))?;
        log -= libm::log(det.norm());
    }
    Ok(log)
}

pub fn dft_partition(w: &GaussianWeight, p: usize) -> Result<f64> {
    Ok(libm::exp(log_dft_partition(w, p)?))
}

/// Seeded random weight `A = GG* + 0.1‖GG*‖·I`, `α = 1`.
pub fn random_weight(d: usize, seed: u64) -> Result<GaussianWeight> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = 2 * d;
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        c64(re, im)
    });
    let gg = &g * &g.adjoint();
    let shift = 0.1 * gg.norm();
    GaussianWeight::new(1.0, &gg + &ComplexMatrix::identity(n).scale_real(shift))
}

/// One line of a cross-check run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub discrepancy: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.discrepancy <= self.tolerance
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Compares every spectral result for `w` with its oracle. Errors from the
/// spectral path itself are returned as `Err`.
pub fn cross_check(w: &GaussianWeight, tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |name: String, discrepancy: f64| {
        out.push(Check {
            name,
            discrepancy,
            tolerance: tol,
        })
    };
    let s = symbol::compute_spectrum(w)?;
    let ib = invariant::invariant_boundaries(w, &s)?;

    for (side, b, label) in [(Side::Right, &ib.b_r, "B_R"), (Side::Left, &ib.b_l, "B_L")] {
        let rep = riccati_fixed_point(w, side, 1e-13, DEFAULT_MAX_ITER)?;
        let gap = if rep.failed {
            f64::INFINITY
        } else {
            rep.matrix().map_or(f64::INFINITY, |m| m.distance(b))
        };
        push(alloc::format!("{label} vs fixed-point iteration"), gap);
        push(
            alloc::format!("{label} invariance residual"),
            invariant::verify_invariance(w, b, side)?,
        );
    }

    let mut worst: f64 = 0.0;
    for k in -10i64..=10 {
        let q = quadrature_fourier(w, k, 4096)?;
        worst = worst.max(symbol::c(&s, k).distance(&q));
    }
    push("C_k vs quadrature, |k| <= 10".into(), worst);

    let c0 = symbol::c(&s, 0);
    let sum_b = &ib.b_l + &ib.b_r;
    push(
        "B_L + B_R = C_0^-1".into(),
        (&sum_b * &c0).distance(&ComplexMatrix::identity(w.d())),
    );

    let integral = invariant::integral_free_energy(w, 4096)?;
    push("free energy eigen vs integral".into(), (ib.free_energy - integral).abs());

    let (bl, br) = ib.boundary_weights()?;
    let p = 8;
    let law = process::assemble_chain(w, &bl, &br, p)?;
    let cov = process::covariance_toeplitz(&s, p).dense();
    push("Σ^(8) (closed form) vs Q^-1".into(), cov.distance(&law.sigma));

    let z = crate::weights::log_partition_dense(w, &bl, &br, p)?;
    push("log Z_8 dense vs P log Λ".into(), rel(z, p as f64 * ib.free_energy));

    // The corner corrections need an invertible A_LR.
    if w.full_rank() {
        let trig = szego::TrigPolySymbol::from_order_one(&OrderOneSymbol::from_weight(w))?;
        let mut worst: f64 = 0.0;
        for p in 1..=6 {
            let ct = szego::corrected_toeplitz(&trig, p)?;
            let dense = dense_det(&ct.matrix.dense())?;
            worst = worst.max(rel(ct.det(), dense.re));
        }
        push("corrected Toeplitz det vs dense det, P <= 6".into(), worst);
    }

    let dft = log_dft_partition(w, 64)?;
    let per = process::log_periodic_partition(w, 64)?;
    push("log Z_64^per modes vs oracle".into(), rel(dft, per));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou() -> GaussianWeight {
        GaussianWeight::new(1.0, ComplexMatrix::from_real_rows(&[&[1.25, -1.0], &[-1.0, 1.25]])).unwrap()
    }

    #[test]
    fn riccati_on_ou() {
        let r = riccati_fixed_point(&ou(), Side::Right, 1e-12, DEFAULT_MAX_ITER).unwrap();
        assert!(!r.failed);
        assert!((r.matrix().unwrap()[(0, 0)].re - 0.75).abs() < 1e-11);
        let r1 = riccati_fixed_point(&ou(), Side::Right, 1e-12, 1).unwrap();
        assert!((r1.matrix().unwrap()[(0, 0)].re - 0.85).abs() < 1e-15);
        let r3 = riccati_fixed_point(&ou(), Side::Right, 1e-12, 3).unwrap();
        assert!(r3.failed);
    }

    #[test]
    fn quadrature_on_ou() {
        let q0 = quadrature_fourier(&ou(), 0, 4096).unwrap();
        assert!((q0[(0, 0)].re - 2.0 / 3.0).abs() < 1e-12);
        let qm1 = quadrature_fourier(&ou(), -1, 4096).unwrap();
        assert!((qm1[(0, 0)].re - 1.0 / 3.0).abs() < 1e-12);
        assert!(quadrature_fourier(&ou(), 10, 40).is_err());
    }

    #[test]
    fn dense_det_examples() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        assert!((dense_det(&m).unwrap().re - 3.0).abs() < 1e-15);
        assert!((dense_det(&ComplexMatrix::identity(4)).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dft_on_ou() {
        let z = dft_partition(&ou(), 2).unwrap();
        assert!((z - 16.0 * PI * PI / 9.0).abs() < 1e-12);
    }

    #[test]
    fn random_weights_are_reproducible() {
        let a = random_weight(3, 7).unwrap();
        let b = random_weight(3, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.full_rank());
    }

    #[test]
    fn cross_check_ou() {
        let checks = cross_check(&ou(), 1e-8).unwrap();
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
    }
}
