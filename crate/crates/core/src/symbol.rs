//! The symbol `Φ(z) = A_LL + A_RR + A_LR z + A_RL z⁻¹`: zeros, kernel
//! vectors, residues and the Fourier coefficients of `Φ⁻¹`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::c64;
use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, Lu, DEFAULT_TOL};
use crate::weights::GaussianWeight;

/// Zeros closer than this (relative) are one multiple zero.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Band `||w| − 1| ≤ CIRCLE_TOL` in which zeros are refused.
pub const CIRCLE_TOL: f64 = 1e-8;
/// Allowed `|w·conj(w′) − 1|` for paired zeros.
pub const PAIRING_TOL: f64 = 1e-8;
/// Kernel residual bound `‖Φ(w)u_w‖` (relative to `max(1, ‖Φ(w)‖)`).
pub const KERNEL_TOL: f64 = 1e-8;
/// Pencil eigenvalues below this modulus count as zero, above its inverse
/// as infinite.
pub const DEFLATE_TOL: f64 = 1e-8;

/// Order-one matrix Laurent polynomial `Ψ_0 + Ψ_1 z + Ψ_{−1} z⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderOneSymbol {
    pub psi0: ComplexMatrix,
    pub psi1: ComplexMatrix,
    pub psi_m1: ComplexMatrix,
}

impl OrderOneSymbol {
    pub fn new(psi0: ComplexMatrix, psi1: ComplexMatrix, psi_m1: ComplexMatrix) -> Result<Self> {
        let d = psi0.rows();
        for (name, m) in [("Ψ_0", &psi0), ("Ψ_1", &psi1), ("Ψ_-1", &psi_m1)] {
            if m.rows() != d || m.cols() != d {
                return Err(Error::invalid(alloc::format!("{name} is not {d}x{d}")));
            }
            if !m.is_finite() {
                return Err(Error::invalid(alloc::format!("{name} has non-finite entries")));
            }
        }
        Ok(OrderOneSymbol { psi0, psi1, psi_m1 })
    }

    pub fn from_weight(w: &GaussianWeight) -> Self {
        OrderOneSymbol {
            psi0: w.a_ll() + w.a_rr(),
            psi1: w.a_lr().clone(),
            psi_m1: w.a_rl().clone(),
        }
    }

    pub fn d(&self) -> usize {
        self.psi0.rows()
    }

    pub fn eval(&self, z: Complex64) -> ComplexMatrix {
        let zi = z.inv();
        &(&self.psi0 + &self.psi1.scale(z)) + &self.psi_m1.scale(zi)
    }

    /// `Ψ_1 − Ψ_{−1} z⁻²`.
    pub fn derivative(&self, z: Complex64) -> ComplexMatrix {
        let zi = z.inv();
        &self.psi1 - &self.psi_m1.scale(zi * zi)
    }
}

/// A simple zero `w` of the symbol and a unit vector spanning `ker Φ(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Zero {
    pub w: Complex64,
    pub u: Vec<Complex64>,
    /// `α_w = 1/⟨u_{1/w̄}, Φ′(w) u_w⟩`.
    pub alpha: Complex64,
    /// `P_w = u_w u_{1/w̄}*`.
    pub projector: ComplexMatrix,
}

impl Zero {
    /// `α_w·P_w`, the residue of `Φ⁻¹` at `w`.
    pub fn residue(&self) -> ComplexMatrix {
        self.projector.scale(self.alpha)
    }
}

/// Spectral data of the symbol. `zeros_outside[i]` is the partner
/// `1/conj(w)` of `zeros_inside[i]`.
#[derive(Debug, Clone)]
pub struct SymbolSpectrum {
    pub symbol: OrderOneSymbol,
    pub d: usize,
    /// Rank deficiency of `A_LR`.
    pub k: usize,
    pub zeros_inside: Vec<Zero>,
    pub zeros_outside: Vec<Zero>,
    /// Orthonormal columns spanning `ker A_LR` (`d × k`).
    pub ker_lr: ComplexMatrix,
    /// Orthonormal columns spanning `ker A_RL` (`d × k`).
    pub ker_rl: ComplexMatrix,
    /// Leading coefficient of `det(zΦ(z))` as a polynomial of degree `2d − k`.
    pub p_top: Complex64,
    /// `lim_{z→∞} Φ(z)⁻¹` (zero when `k = 0`).
    pub psi_const: ComplexMatrix,
    /// `lim_{z→0} Φ(z)⁻¹` (zero when `k = 0`).
    pub limit_at_zero: ComplexMatrix,
}

impl SymbolSpectrum {
    pub fn zeros(&self) -> impl Iterator<Item = &Zero> {
        self.zeros_inside.iter().chain(self.zeros_outside.iter())
    }

    /// Index pairs `(inside, outside)` with `w_out = 1/conj(w_in)`.
    pub fn pairing(&self) -> Vec<(usize, usize)> {
        (0..self.zeros_inside.len()).map(|i| (i, i)).collect()
    }

    /// `max(max_inside |w|, 1/min_outside |w|)`.
    pub fn decay_rate(&self) -> f64 {
        let a = self.zeros_inside.iter().map(|z| z.w.norm()).fold(0.0, f64::max);
        let b = self
            .zeros_outside
            .iter()
            .map(|z| 1.0 / z.w.norm())
            .fold(0.0, f64::max);
        a.max(b)
    }
}

/// `Φ_A(z)`.
pub fn eval_phi(w: &GaussianWeight, z: Complex64) -> Result<ComplexMatrix> {
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid("Φ is evaluated at a nonzero finite point only"));
    }
    Ok(OrderOneSymbol::from_weight(w).eval(z))
}

/// Weight with the direction of the edge reversed.
pub fn flip(w: &GaussianWeight) -> GaussianWeight {
    GaussianWeight::from_blocks(w.alpha(), w.a_rr(), w.a_rl(), w.a_lr(), w.a_ll())
        .expect("a permutation similarity preserves positive definiteness")
}

pub fn compute_spectrum(w: &GaussianWeight) -> Result<SymbolSpectrum> {
    spectrum_of(&OrderOneSymbol::from_weight(w))
}

fn unit_shift() -> Complex64 {
    Complex64::from_polar(1.0, 0.7)
}

/// Smallest singular triplet `(σ, left, right)` of a square matrix.
fn smallest_singular(m: &ComplexMatrix) -> (f64, Vec<Complex64>, Vec<Complex64>) {
    let s = numkit::svd(m);
    let n = m.cols();
    let right = s.v.col(n - 1);
    let sigma = s.s[n - 1];
    // Left vector from M v = σ u; if σ vanishes use the kernel of M*.
    let left = if sigma > 0.0 {
        s.u.col(n - 1)
    } else {
        numkit::svd(&m.adjoint()).v.col(n - 1)
    };
    (sigma, left, right)
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize_phase(u: &mut [Complex64]) {
    let n = libm::sqrt(u.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if n > 0.0 {
        for z in u.iter_mut() {
            *z /= n;
        }
    }
    if let Some(first) = u.iter().copied().find(|z| z.norm() > 1e-10) {
        let ph = first.conj() / first.norm();
        for z in u.iter_mut() {
            *z *= ph;
        }
    }
}

/// Newton steps on `y*Φ(w)u` with `u, y` the current singular vectors.
fn polish(sym: &OrderOneSymbol, mut w: Complex64) -> (Complex64, f64) {
    let (mut sigma, mut y, mut u) = smallest_singular(&sym.eval(w));
    for _ in 0..8 {
        let f = inner(&y, &sym.eval(w).mul_vec(&u));
        let df = inner(&y, &sym.derivative(w).mul_vec(&u));
        if df.norm() == 0.0 {
            break;
        }
        let cand = w - f / df;
        if !(cand.re.is_finite() && cand.im.is_finite()) || cand.norm() == 0.0 {
            break;
        }
        let (s2, y2, u2) = smallest_singular(&sym.eval(cand));
        if s2 >= sigma {
            break;
        }
        let moved = (cand - w).norm();
        w = cand;
        sigma = s2;
        y = y2;
        u = u2;
        if moved <= 4.0 * f64::EPSILON * w.norm() {
            break;
        }
    }
    (w, sigma)
}

/// Eigenvalues of the pencil `λℬ − 𝒜` for `Ψ_1 z² + Ψ_0 z + Ψ_{−1}`, via
/// shift-invert at a point of the unit circle.
fn pencil_eigenvalues(sym: &OrderOneSymbol) -> Result<Vec<Complex64>> {
    let d = sym.d();
    let mut a = ComplexMatrix::zeros(2 * d, 2 * d);
    a.set_block(0, d, &ComplexMatrix::identity(d));
    a.set_block(d, 0, &-&sym.psi_m1);
    a.set_block(d, d, &-&sym.psi0);
    let mut b = ComplexMatrix::identity(2 * d);
    b.set_block(d, d, &sym.psi1);
    let sigma = unit_shift();
    let lu = Lu::new(&(&a - &b.scale(sigma)))?;
    if lu.is_singular() {
        return Err(Error::numerical("shifted companion pencil is singular"));
    }
    let m = lu.solve(&b)?;
    let e = numkit::eig(&m)?;
    Ok(e
        .values
        .iter()
        .map(|&mu| {
            if mu.norm() < 1e-300 {
                c64(f64::INFINITY, 0.0)
            } else {
                sigma + mu.inv()
            }
        })
        .collect())
}

/// Spectral data of an order-one symbol that is Hermitian positive definite
/// on the unit circle.
pub fn spectrum_of(sym: &OrderOneSymbol) -> Result<SymbolSpectrum> {
    let d = sym.d();
    let k = d - numkit::numerical_rank(&sym.psi1, DEFAULT_TOL);
    let k_rl = d - numkit::numerical_rank(&sym.psi_m1, DEFAULT_TOL);
    if k != k_rl {
        return Err(Error::assumption(alloc::format!(
            "rank deficiencies of A_LR ({k}) and A_RL ({k_rl}) differ"
        )));
    }

    let lambdas = pencil_eigenvalues(sym)?;
    let n_zero = lambdas.iter().filter(|l| l.norm() <= DEFLATE_TOL).count();
    let n_inf = lambdas.iter().filter(|l| !(l.norm() < 1.0 / DEFLATE_TOL)).count();
    if n_zero != k || n_inf != k {
        return Err(Error::assumption(alloc::format!(
            "expected {k} eigenvalues at 0 and at ∞, found {n_zero} and {n_inf}"
        )));
    }
    let finite: Vec<Complex64> = lambdas
        .into_iter()
        .filter(|l| l.norm() > DEFLATE_TOL && l.norm() < 1.0 / DEFLATE_TOL)
        .collect();

    for (i, a) in finite.iter().enumerate() {
        for b in &finite[i + 1..] {
            if (a - b).norm() <= CLUSTER_TOL * a.norm().max(b.norm()) {
                return Err(Error::assumption(alloc::format!(
                    "zero {a} has multiplicity greater than one"
                )));
            }
        }
    }

    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for &l in &finite {
        let (w, _) = polish(sym, l);
        if (w.norm() - 1.0).abs() <= CIRCLE_TOL {
            return Err(Error::assumption(alloc::format!("zero {w} lies on the unit circle")));
        }
        let phi = sym.eval(w);
        let (_, _, mut u) = smallest_singular(&phi);
        normalize_phase(&mut u);
        let res = libm::sqrt(phi.mul_vec(&u).iter().map(|z| z.norm_sqr()).sum::<f64>());
        if res > KERNEL_TOL * phi.norm().max(1.0) {
            return Err(Error::numerical(alloc::format!(
                "kernel residual {res:e} at zero {w}"
            )));
        }
        if w.norm() < 1.0 {
            inside.push((w, u));
        } else {
            outside.push((w, u));
        }
    }
    if inside.len() != d - k || outside.len() != d - k {
        return Err(Error::assumption(alloc::format!(
            "{} zeros inside and {} outside the unit circle, expected {} each",
            inside.len(),
            outside.len(),
            d - k
        )));
    }
    inside.sort_by(|a, b| a.0.norm().partial_cmp(&b.0.norm()).unwrap_or(core::cmp::Ordering::Equal));

    // Align outside zeros with their inside partners.
    let mut used = alloc::vec![false; outside.len()];
    let mut aligned = Vec::with_capacity(outside.len());
    for (w, _) in &inside {
        let mut best = None;
        let mut best_gap = f64::INFINITY;
        for (j, (wo, _)) in outside.iter().enumerate() {
            if used[j] {
                continue;
            }
            let gap = (w * wo.conj() - 1.0).norm();
            if gap < best_gap {
                best_gap = gap;
                best = Some(j);
            }
        }
        match best {
            Some(j) if best_gap <= PAIRING_TOL => {
                used[j] = true;
                aligned.push(outside[j].clone());
            }
            _ => {
                return Err(Error::numerical(alloc::format!(
                    "zero {w} has no partner 1/conj(w) (gap {best_gap:e})"
                )))
            }
        }
    }

    let mut zeros_inside = Vec::with_capacity(inside.len());
    let mut zeros_outside = Vec::with_capacity(inside.len());
    for ((wi, ui), (wo, uo)) in inside.iter().zip(&aligned) {
        zeros_inside.push(make_zero(sym, *wi, ui, uo)?);
        zeros_outside.push(make_zero(sym, *wo, uo, ui)?);
    }

    let ker_lr = numkit::kernel_basis(&sym.psi1, DEFAULT_TOL);
    let ker_rl = numkit::kernel_basis(&sym.psi_m1, DEFAULT_TOL);
    check_completed_basis(&zeros_inside, &ker_rl, "inside")?;
    check_completed_basis(&zeros_outside, &ker_lr, "outside")?;

    let (psi_const, limit_at_zero) = if k == 0 {
        (ComplexMatrix::zeros(d, d), ComplexMatrix::zeros(d, d))
    } else {
        (
            degenerate_limit(&sym.psi0, &ker_lr, &ker_rl)?,
            degenerate_limit(&sym.psi0, &ker_rl, &ker_lr)?,
        )
    };

    let one = c64(1.0, 0.0);
    let mut denom = one;
    for z in zeros_inside.iter().chain(&zeros_outside) {
        denom *= one - z.w;
    }
    let p_top = numkit::det(&sym.eval(one))? / denom;

    Ok(SymbolSpectrum {
        symbol: sym.clone(),
        d,
        k,
        zeros_inside,
        zeros_outside,
        ker_lr,
        ker_rl,
        p_top,
        psi_const,
        limit_at_zero,
    })
}

fn make_zero(sym: &OrderOneSymbol, w: Complex64, u: &[Complex64], partner: &[Complex64]) -> Result<Zero> {
    let dphi = sym.derivative(w);
    let den = inner(partner, &dphi.mul_vec(u));
    if den.norm() <= CLUSTER_TOL * dphi.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::assumption(alloc::format!(
            "zero {w} is not simple (⟨u', Φ'(w)u⟩ = {den})"
        )));
    }
    let projector = &ComplexMatrix::column(u) * &ComplexMatrix::column(partner).adjoint();
    Ok(Zero {
        w,
        u: u.to_vec(),
        alpha: den.inv(),
        projector,
    })
}

/// `[u_w …, kernel columns]`, which must be a basis of `ℂ^d`.
pub(crate) fn completed_basis(zeros: &[Zero], ker: &ComplexMatrix) -> ComplexMatrix {
    let d = ker.rows();
    let mut v = ComplexMatrix::zeros(d, d);
    for (j, z) in zeros.iter().enumerate() {
        v.set_col(j, &z.u);
    }
    v.set_block(0, zeros.len(), ker);
    v
}

fn check_completed_basis(zeros: &[Zero], ker: &ComplexMatrix, which: &str) -> Result<()> {
    let v = completed_basis(zeros, ker);
    let cond = numkit::condition_number(&v);
    if cond > 1e12 {
        return Err(Error::assumption(alloc::format!(
            "kernel vectors of the {which} zeros do not span (cond {cond:e})"
        )));
    }
    Ok(())
}

/// `V (U* Ψ_0 V)⁻¹ U*`: the limit of `Φ⁻¹` at the end where the leading
/// coefficient has right kernel `V` and left kernel `U`.
fn degenerate_limit(psi0: &ComplexMatrix, v: &ComplexMatrix, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let core = &(&u.adjoint() * psi0) * v;
    let lu = Lu::new(&core)?;
    if lu.is_singular() {
        return Err(Error::assumption("U*(A_LL + A_RR)V is singular"));
    }
    Ok(v * &lu.solve(&u.adjoint())?)
}

/// `Φ(z)⁻¹` from the partial-fraction expansion.
pub fn inverse_phi(s: &SymbolSpectrum, z: Complex64) -> Result<ComplexMatrix> {
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid("z must be nonzero and finite"));
    }
    let mut acc = s.psi_const.clone();
    for zero in s.zeros() {
        let gap = z - zero.w;
        if gap.norm() <= 1e-8 {
            return Err(Error::invalid(alloc::format!("z = {z} is at the zero {}", zero.w)));
        }
        acc = &acc + &zero.projector.scale(zero.alpha / gap);
    }
    Ok(acc)
}

/// Fourier coefficient of `Φ⁻¹` on the circle together with its index.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficient {
    pub index: i64,
    pub value: ComplexMatrix,
}

/// `C_k = (1/2π)∫ Φ(e^{iθ})⁻¹ e^{−ikθ} dθ` in closed form.
pub fn fourier_coefficient(s: &SymbolSpectrum, k: i64) -> FourierCoefficient {
    let d = s.d;
    let value = if k > 0 {
        s.zeros_outside.iter().fold(ComplexMatrix::zeros(d, d), |acc, z| {
            &acc - &z.projector.scale(z.alpha / z.w.powi(k as i32 + 1))
        })
    } else {
        let m = -k;
        s.zeros_inside.iter().fold(
            if m == 0 { s.limit_at_zero.clone() } else { ComplexMatrix::zeros(d, d) },
            |acc, z| &acc + &z.projector.scale(z.alpha * z.w.powi(m as i32 - 1)),
        )
    };
    FourierCoefficient { index: k, value }
}

/// Shorthand for `fourier_coefficient(s, k).value`.
pub fn c(s: &SymbolSpectrum, k: i64) -> ComplexMatrix {
    fourier_coefficient(s, k).value
}
