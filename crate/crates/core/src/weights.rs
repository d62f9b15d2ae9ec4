//! Gaussian weights on edges and boundary weights on chain ends, with the
//! gluing product and the actions of edges on boundaries.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, Lu, DEFAULT_TOL};

/// Condition number of `A_RR + Ã_LL` beyond which gluing is refused.
pub const GLUE_COND_LIMIT: f64 = 1e12;

/// Relative agreement required between the two partition-function paths.
pub const PARTITION_TOL: f64 = 1e-8;

/// `α·exp(−½ (x,y)* A (x,y))` on `ℂ^d × ℂ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianWeight {
    alpha: f64,
    a: ComplexMatrix,
    d: usize,
    a_ll: ComplexMatrix,
    a_lr: ComplexMatrix,
    a_rl: ComplexMatrix,
    a_rr: ComplexMatrix,
    deficiency: usize,
}

impl GaussianWeight {
    /// Validates `alpha > 0` and that `A` is `2d × 2d` Hermitian positive
    /// definite.
    pub fn new(alpha: f64, a: ComplexMatrix) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(alloc::format!("alpha must be positive, got {alpha}")));
        }
        if !a.is_square() || !a.rows().is_multiple_of(2) || a.rows() == 0 {
            return Err(Error::invalid(alloc::format!(
                "coupling must be 2d x 2d, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::invalid("coupling has non-finite entries"));
        }
        if let Some(why) = numkit::hermitian_pd_defect(&a, DEFAULT_TOL)? {
            return Err(Error::not_pd("coupling A", why));
        }
        let a = a.hermitian_part();
        let d = a.rows() / 2;
        let a_ll = a.block(0, 0, d, d);
        let a_lr = a.block(0, d, d, d);
        let a_rl = a.block(d, 0, d, d);
        let a_rr = a.block(d, d, d, d);
        let deficiency = d - numkit::numerical_rank(&a_lr, DEFAULT_TOL);
        Ok(GaussianWeight {
            alpha,
            a,
            d,
            a_ll,
            a_lr,
            a_rl,
            a_rr,
            deficiency,
        })
    }

    pub fn from_blocks(
        alpha: f64,
        a_ll: &ComplexMatrix,
        a_lr: &ComplexMatrix,
        a_rl: &ComplexMatrix,
        a_rr: &ComplexMatrix,
    ) -> Result<Self> {
        let d = a_ll.rows();
        for (name, m) in [("A_LL", a_ll), ("A_LR", a_lr), ("A_RL", a_rl), ("A_RR", a_rr)] {
            if m.rows() != d || m.cols() != d {
                return Err(Error::invalid(alloc::format!("block {name} is not {d}x{d}")));
            }
        }
        let mut a = ComplexMatrix::zeros(2 * d, 2 * d);
        a.set_block(0, 0, a_ll);
        a.set_block(0, d, a_lr);
        a.set_block(d, 0, a_rl);
        a.set_block(d, d, a_rr);
        Self::new(alpha, a)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a_ll(&self) -> &ComplexMatrix {
        &self.a_ll
    }

    pub fn a_lr(&self) -> &ComplexMatrix {
        &self.a_lr
    }

    pub fn a_rl(&self) -> &ComplexMatrix {
        &self.a_rl
    }

    pub fn a_rr(&self) -> &ComplexMatrix {
        &self.a_rr
    }

    /// `d − rank(A_LR)`.
    pub fn deficiency(&self) -> usize {
        self.deficiency
    }

    pub fn full_rank(&self) -> bool {
        self.deficiency == 0
    }

    /// Same coupling, new scale.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(alloc::format!("alpha must be positive, got {alpha}")));
        }
        Ok(GaussianWeight { alpha, ..self.clone() })
    }
}

/// Validated constructor, same as [`GaussianWeight::new`].
pub fn make_gaussian_weight(alpha: f64, a: ComplexMatrix) -> Result<GaussianWeight> {
    GaussianWeight::new(alpha, a)
}

/// `β·exp(−½ x* B x)` on `ℂ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryWeight {
    beta: f64,
    b: ComplexMatrix,
}

impl BoundaryWeight {
    pub fn new(beta: f64, b: ComplexMatrix) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid(alloc::format!("beta must be positive, got {beta}")));
        }
        if !b.is_finite() {
            return Err(Error::invalid("boundary matrix has non-finite entries"));
        }
        if let Some(why) = numkit::hermitian_pd_defect(&b, DEFAULT_TOL)? {
            return Err(Error::not_pd("boundary matrix B", why));
        }
        Ok(BoundaryWeight {
            beta,
            b: b.hermitian_part(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn d(&self) -> usize {
        self.b.rows()
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        BoundaryWeight::new(beta, self.b.clone())
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(alloc::format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

fn two_pi_pow(d: usize) -> f64 {
    libm::pow(2.0 * PI, d as f64)
}

/// Positive determinant of a Hermitian PD matrix.
fn pd_det(m: &ComplexMatrix, what: &str) -> Result<(Lu, f64)> {
    let lu = Lu::new(m)?;
    let det = lu.det().re;
    if !(det > 0.0) || lu.is_singular() {
        return Err(Error::not_pd(what, alloc::format!("determinant {det:e}")));
    }
    Ok((lu, det))
}

fn log_pd_det(m: &ComplexMatrix, what: &str) -> Result<(Lu, f64)> {
    let lu = Lu::new(m)?;
    let (log, phase) = lu.log_det();
    if lu.is_singular() || phase.re <= 0.0 {
        return Err(Error::not_pd(what, "non-positive determinant"));
    }
    Ok((lu, log))
}

/// The associative product of two Gaussian weights (integrating out the
/// shared middle site).
pub fn glue(w1: &GaussianWeight, w2: &GaussianWeight) -> Result<GaussianWeight> {
    same_dim(w1.d, w2.d)?;
    let d = w1.d;
    let mid = w1.a_rr() + w2.a_ll();
    let cond = numkit::condition_number(&mid);
    if cond > GLUE_COND_LIMIT {
        return Err(Error::numerical(alloc::format!(
            "A_RR + Ã_LL is ill-conditioned (cond {cond:e})"
        )));
    }
    let (lu, det_mid) = pd_det(&mid, "A_RR + Ã_LL")?;
    let k_arl = lu.solve(w1.a_rl())?;
    let k_alr2 = lu.solve(w2.a_lr())?;
    let ll = w1.a_ll() - &(w1.a_lr() * &k_arl);
    let lr = -&(w1.a_lr() * &k_alr2);
    let rl = -&(w2.a_rl() * &k_arl);
    let rr = w2.a_rr() - &(w2.a_rl() * &k_alr2);
    let alpha = two_pi_pow(d) * w1.alpha * w2.alpha / det_mid;
    GaussianWeight::from_blocks(alpha, &ll, &lr, &rl, &rr)
}

/// `n`-fold glue of `w` with itself.
pub fn schur_power(w: &GaussianWeight, n: usize) -> Result<GaussianWeight> {
    if n == 0 {
        return Err(Error::invalid("schur_power needs n >= 1"));
    }
    let mut acc = w.clone();
    for _ in 1..n {
        acc = glue(&acc, w)?;
    }
    Ok(acc)
}

/// `(log factor, S_L(B, A))` with the factor excluding `β`.
fn act_left_parts(b: &ComplexMatrix, w: &GaussianWeight) -> Result<(f64, ComplexMatrix)> {
    let shifted = b + w.a_ll();
    let (lu, logdet) = log_pd_det(&shifted, "B + A_LL")?;
    let m = w.a_rr() - &(w.a_rl() * &lu.solve(w.a_lr())?);
    let log_scale = libm::log(two_pi_pow(w.d)) + libm::log(w.alpha) - logdet;
    Ok((log_scale, m))
}

fn act_right_parts(w: &GaussianWeight, b: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let shifted = w.a_rr() + b;
    let (lu, logdet) = log_pd_det(&shifted, "A_RR + B")?;
    let m = w.a_ll() - &(w.a_lr() * &lu.solve(w.a_rl())?);
    let log_scale = libm::log(two_pi_pow(w.d)) + libm::log(w.alpha) - logdet;
    Ok((log_scale, m))
}

/// Integrates a left boundary against an edge, producing the boundary seen
/// at the right end of the edge.
pub fn act_left(b: &BoundaryWeight, w: &GaussianWeight) -> Result<BoundaryWeight> {
    same_dim(b.d(), w.d)?;
    let (log_scale, m) = act_left_parts(&b.b, w)?;
    BoundaryWeight::new(b.beta * libm::exp(log_scale), m)
}

/// Mirror of [`act_left`]: a right boundary pulled back through an edge.
pub fn act_right(w: &GaussianWeight, b: &BoundaryWeight) -> Result<BoundaryWeight> {
    same_dim(b.d(), w.d)?;
    let (log_scale, m) = act_right_parts(w, &b.b)?;
    BoundaryWeight::new(b.beta * libm::exp(log_scale), m)
}

/// `(2π)^d·β·β̃·det(B + B̃)⁻¹`.
pub fn pair(bl: &BoundaryWeight, br: &BoundaryWeight) -> Result<f64> {
    same_dim(bl.d(), br.d())?;
    let (_, det) = pd_det(&(&bl.b + &br.b), "B + B̃")?;
    Ok(two_pi_pow(bl.d()) * bl.beta * br.beta / det)
}

/// Rescales both boundaries to `β = √(det(B_L + B_R)/(2π)^d)` so that
/// their pairing is one.
pub fn normalize_pair(bl: &BoundaryWeight, br: &BoundaryWeight) -> Result<(BoundaryWeight, BoundaryWeight)> {
    same_dim(bl.d(), br.d())?;
    let (_, det) = pd_det(&(&bl.b + &br.b), "B_L + B_R")?;
    let beta = libm::sqrt(det / two_pi_pow(bl.d()));
    Ok((bl.with_beta(beta)?, br.with_beta(beta)?))
}

/// `log Z_P` by pushing the left boundary through `P` edges and pairing.
pub fn log_partition_algebraic(
    w: &GaussianWeight,
    bl: &BoundaryWeight,
    br: &BoundaryWeight,
    p: usize,
) -> Result<f64> {
    same_dim(bl.d(), w.d)?;
    same_dim(br.d(), w.d)?;
    let mut log = libm::log(bl.beta);
    let mut b = bl.b.clone();
    for _ in 0..p {
        let (ls, m) = act_left_parts(&b, w)?;
        log += ls;
        b = m.hermitian_part();
    }
    let (_, logdet) = log_pd_det(&(&b + &br.b), "B + B_R")?;
    Ok(log + libm::log(two_pi_pow(w.d)) + libm::log(br.beta) - logdet)
}

/// `log Z_P` from the determinant of the full chain precision matrix.
pub fn log_partition_dense(
    w: &GaussianWeight,
    bl: &BoundaryWeight,
    br: &BoundaryWeight,
    p: usize,
) -> Result<f64> {
    let q = crate::process::chain_precision(w, bl.matrix(), br.matrix(), p)?;
    let (_, logdet) = log_pd_det(&q, "chain precision Q")?;
    let d = w.d as f64;
    Ok(d * (p + 1) as f64 * libm::log(2.0 * PI) - logdet
        + libm::log(bl.beta)
        + libm::log(br.beta)
        + p as f64 * libm::log(w.alpha))
}

/// `log Z_P`, computed both ways; errors if they disagree.
pub fn log_partition_function(
    w: &GaussianWeight,
    bl: &BoundaryWeight,
    br: &BoundaryWeight,
    p: usize,
) -> Result<f64> {
    if p == 0 {
        return Err(Error::invalid("partition function needs P >= 1"));
    }
    let alg = log_partition_algebraic(w, bl, br, p)?;
    let dense = log_partition_dense(w, bl, br, p)?;
    // |log a − log b| bounds the relative gap to first order.
    let gap = libm::expm1((alg - dense).abs());
    Error::check("partition function (algebraic vs dense)", gap, PARTITION_TOL)?;
    Ok(alg)
}

/// `Z_P` of a chain with `P` edges and the given boundaries.
pub fn partition_function(
    w: &GaussianWeight,
    bl: &BoundaryWeight,
    br: &BoundaryWeight,
    p: usize,
) -> Result<f64> {
    Ok(libm::exp(log_partition_function(w, bl, br, p)?))
}
