//! Eigen boundary conditions: the fixed points of the Schur-complement maps
//! built from the zeros of the symbol, and the eigenvalue `Λ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::c64;
use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, Lu, DEFAULT_QUADRATURE_NODES, DEFAULT_TOL};
use crate::symbol::{completed_basis, OrderOneSymbol, SymbolSpectrum};
use crate::weights::{self, BoundaryWeight, GaussianWeight};
use crate::Side;

/// Relative agreement required between the routes to `Λ`.
pub const LAMBDA_TOL: f64 = 1e-8;
/// Basis condition numbers above this are reported.
pub const BASIS_COND_WARN: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct InvariantBoundaries {
    /// Acts as `w` on `u_w` for inside zeros, zero on `ker A_RL`.
    pub w_lt1: ComplexMatrix,
    /// Acts as `1/w` on `u_w` for outside zeros, zero on `ker A_LR`.
    pub w_gt1_inv: ComplexMatrix,
    pub b_l: ComplexMatrix,
    pub b_r: ComplexMatrix,
    /// Eigenvalue of the transfer operator, including the scale `α`.
    pub lambda: f64,
    /// `log Λ`.
    pub free_energy: f64,
    /// Larger condition number of the two zero-indexed bases.
    pub basis_condition: f64,
}

impl InvariantBoundaries {
    /// `true` when a zero-indexed basis is poorly conditioned.
    pub fn ill_conditioned(&self) -> bool {
        self.basis_condition > BASIS_COND_WARN
    }

    /// `(B_L, B_R)` as boundary weights normalized to pair to one.
    pub fn boundary_weights(&self) -> Result<(BoundaryWeight, BoundaryWeight)> {
        let l = BoundaryWeight::new(1.0, self.b_l.clone())?;
        let r = BoundaryWeight::new(1.0, self.b_r.clone())?;
        weights::normalize_pair(&l, &r)
    }
}

/// `(W_<1, W_>1⁻¹, basis condition)` from the spectrum alone.
pub(crate) fn semigroup_generators(s: &SymbolSpectrum) -> Result<(ComplexMatrix, ComplexMatrix, f64)> {
    let d = s.d;
    let build = |zeros: &[crate::symbol::Zero], ker: &ComplexMatrix, inv: bool| -> Result<(ComplexMatrix, f64)> {
        let v = completed_basis(zeros, ker);
        let mut diag = alloc::vec![c64(0.0, 0.0); d];
        for (i, z) in zeros.iter().enumerate() {
            diag[i] = if inv { z.w.inv() } else { z.w };
        }
        let lu = Lu::new(&v)?;
        if lu.is_singular() {
            return Err(Error::assumption("zero-indexed basis is singular"));
        }
        // V D V⁻¹ = (V⁻* (V D)*)* ; solve with V on the right through adjoints.
        let vd = &v * &ComplexMatrix::from_diag(&diag);
        let lu_adj = Lu::new(&v.adjoint())?;
        let w = lu_adj.solve(&vd.adjoint())?.adjoint();
        Ok((w, numkit::condition_number(&v)))
    };
    let (w_lt1, c1) = build(&s.zeros_inside, &s.ker_rl, false)?;
    let (w_gt1_inv, c2) = build(&s.zeros_outside, &s.ker_lr, true)?;
    Ok((w_lt1, w_gt1_inv, c1.max(c2)))
}

/// Corner corrections `(G_L, G_R) = (Ψ_{−1} W_>1⁻¹, Ψ_1 W_<1)` of an order-one symbol.
pub(crate) fn corner_corrections(sym: &OrderOneSymbol, s: &SymbolSpectrum) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let (w_lt1, w_gt1_inv, _) = semigroup_generators(s)?;
    let g_l = &sym.psi_m1 * &w_gt1_inv;
    let g_r = &sym.psi1 * &w_lt1;
    Ok((g_l, g_r, w_lt1, w_gt1_inv))
}

fn two_pi_pow(d: usize) -> f64 {
    libm::pow(2.0 * PI, d as f64)
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn invariant_boundaries(w: &GaussianWeight, s: &SymbolSpectrum) -> Result<InvariantBoundaries> {
    if s.d != w.d() {
        return Err(Error::invalid("spectrum and weight have different dimensions"));
    }
    let (w_lt1, w_gt1_inv, basis_condition) = semigroup_generators(s)?;
    let b_r = w.a_ll() + &(w.a_lr() * &w_lt1);
    let b_l = w.a_rr() + &(w.a_rl() * &w_gt1_inv);
    for (name, b) in [("B_R", &b_r), ("B_L", &b_l)] {
        if let Some(why) = numkit::hermitian_pd_defect(b, DEFAULT_TOL)? {
            return Err(Error::not_pd(name, why));
        }
    }
    let b_r = b_r.hermitian_part();
    let b_l = b_l.hermitian_part();

    let d = w.d();
    let scale = w.alpha() * two_pi_pow(d);
    let det_r = numkit::det(&(w.a_rr() + &b_r))?.re;
    let det_l = numkit::det(&(&b_l + w.a_ll()))?.re;
    if !(det_r > 0.0) || !(det_l > 0.0) {
        return Err(Error::numerical("non-positive determinant in Λ"));
    }
    let lambda = scale / det_r;
    Error::check("Λ (left vs right boundary)", rel_gap(lambda, scale / det_l), LAMBDA_TOL)?;
    if s.k == 0 {
        let prod: Complex64 = s.zeros_inside.iter().map(|z| z.w).product();
        let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        let alt = prod * sign * scale / numkit::det(w.a_rl())?;
        let gap = (alt - c64(lambda, 0.0)).norm() / lambda;
        Error::check("Λ (zero product vs determinant)", gap, LAMBDA_TOL)?;
    }
    Ok(InvariantBoundaries {
        w_lt1,
        w_gt1_inv,
        b_l,
        b_r,
        lambda,
        free_energy: libm::log(lambda),
        basis_condition,
    })
}

/// Distance of `B` from its image under one more edge, on the given side.
pub fn verify_invariance(w: &GaussianWeight, b: &ComplexMatrix, side: Side) -> Result<f64> {
    if b.rows() != w.d() || b.cols() != w.d() {
        return Err(Error::invalid("boundary matrix has the wrong size"));
    }
    let image = match side {
        Side::Right => {
            let lu = Lu::new(&(w.a_rr() + b))?;
            w.a_ll() - &(w.a_lr() * &lu.solve(w.a_rl())?)
        }
        Side::Left => {
            let lu = Lu::new(&(b + w.a_ll()))?;
            w.a_rr() - &(w.a_rl() * &lu.solve(w.a_lr())?)
        }
    };
    Ok(b.distance(&image))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeEnergyMethod {
    Eigen,
    Integral,
    /// Periodic chain of the given length.
    Dft(usize),
}

pub fn free_energy(w: &GaussianWeight, s: &SymbolSpectrum, method: FreeEnergyMethod) -> Result<f64> {
    match method {
        FreeEnergyMethod::Eigen => Ok(invariant_boundaries(w, s)?.free_energy),
        FreeEnergyMethod::Integral => integral_free_energy(w, DEFAULT_QUADRATURE_NODES),
        FreeEnergyMethod::Dft(p) => {
            if p < 2 {
                return Err(Error::invalid("dft free energy needs P >= 2"));
            }
            Ok(crate::process::log_periodic_partition(w, p)? / p as f64)
        }
    }
}

/// `log(α(2π)^d) − (1/2π)∫ log det Φ(e^{iθ}) dθ` by the trapezoidal rule.
pub fn integral_free_energy(w: &GaussianWeight, nodes: usize) -> Result<f64> {
    let sym = OrderOneSymbol::from_weight(w);
    let q = numkit::try_circle_quadrature(
        |t| {
            let lu = Lu::new(&sym.eval(Complex64::from_polar(1.0, t)))?;
            Ok(ComplexMatrix::scalar(c64(lu.log_det().0, 0.0)))
        },
        nodes,
    )?;
    Ok(libm::log(w.alpha() * two_pi_pow(w.d())) - q[(0, 0)].re)
}

/// Solution of the homogeneous recursion decaying to the right
/// (`x_k = W_<1^k x_0`) or to the left (`x_{−k} = W_>1⁻ᵏ x_0`), `k = 0..=K`.
pub fn dirichlet_solve(ib: &InvariantBoundaries, x0: &[Complex64], k_max: usize, side: Side) -> Result<Vec<Vec<Complex64>>> {
    let gen = match side {
        Side::Right => &ib.w_lt1,
        Side::Left => &ib.w_gt1_inv,
    };
    if x0.len() != gen.rows() {
        return Err(Error::invalid("x0 has the wrong length"));
    }
    if k_max == 0 {
        return Err(Error::invalid("dirichlet_solve needs K >= 1"));
    }
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(x0.to_vec());
    for k in 0..k_max {
        let next = gen.mul_vec(&out[k]);
        out.push(next);
    }
    Ok(out)
}
