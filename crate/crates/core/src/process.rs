//! Finite chains: precision and covariance matrices, sampling, conditional
//! laws and periodic chains.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::c64;
use crate::error::{Error, Result};
use crate::invariant::InvariantBoundaries;
use crate::numkit::{self, ComplexMatrix, Lu, DEFAULT_TOL};
use crate::symbol::{self, OrderOneSymbol, SymbolSpectrum};
use crate::szego::BlockToeplitz;
use crate::weights::{BoundaryWeight, GaussianWeight};

/// Tolerance for `Σ·Q = I` and the DFT block-diagonalization.
pub const LAW_TOL: f64 = 1e-8;

/// Block-tridiagonal precision matrix of a chain with `P` edges (`P + 1`
/// sites).
pub fn chain_precision(w: &GaussianWeight, b_l: &ComplexMatrix, b_r: &ComplexMatrix, p: usize) -> Result<ComplexMatrix> {
    if p == 0 {
        return Err(Error::invalid("a chain needs P >= 1"));
    }
    let d = w.d();
    if b_l.rows() != d || b_r.rows() != d {
        return Err(Error::invalid("boundary matrices have the wrong size"));
    }
    let n = p + 1;
    let mut q = ComplexMatrix::zeros(n * d, n * d);
    for e in 0..p {
        q.add_block(e * d, e * d, w.a_ll());
        q.add_block(e * d, (e + 1) * d, w.a_lr());
        q.add_block((e + 1) * d, e * d, w.a_rl());
        q.add_block((e + 1) * d, (e + 1) * d, w.a_rr());
    }
    q.add_block(0, 0, b_l);
    q.add_block(p * d, p * d, b_r);
    Ok(q)
}

#[derive(Debug, Clone)]
pub struct ChainLaw {
    pub p: usize,
    pub d: usize,
    pub q: ComplexMatrix,
    pub sigma: ComplexMatrix,
    pub b_l: BoundaryWeight,
    pub b_r: BoundaryWeight,
}

impl ChainLaw {
    /// Covariance block between sites `i` and `j`.
    pub fn sigma_block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.sigma.block(i * self.d, j * self.d, self.d, self.d)
    }

    /// `true` when every block diagonal of `Σ` is constant within `tol`.
    pub fn is_toeplitz(&self, tol: f64) -> bool {
        let n = self.p + 1;
        for i in 1..n {
            for j in 1..n {
                if self.sigma_block(i, j).distance(&self.sigma_block(i - 1, j - 1)) > tol {
                    return false;
                }
            }
        }
        true
    }
}

pub fn assemble_chain(w: &GaussianWeight, b_l: &BoundaryWeight, b_r: &BoundaryWeight, p: usize) -> Result<ChainLaw> {
    let q = chain_precision(w, b_l.matrix(), b_r.matrix(), p)?;
    if let Some(why) = numkit::hermitian_pd_defect(&q, DEFAULT_TOL)? {
        return Err(Error::not_pd("chain precision Q", why));
    }
    let sigma = numkit::inverse(&q)?.hermitian_part();
    let n = q.rows();
    let gap = (&sigma * &q).distance(&ComplexMatrix::identity(n)) / libm::sqrt(n as f64);
    Error::check("Σ·Q = I", gap, LAW_TOL)?;
    Ok(ChainLaw {
        p,
        d: w.d(),
        q,
        sigma,
        b_l: b_l.clone(),
        b_r: b_r.clone(),
    })
}

/// `Σ^(P) = (C_{l−k})` for `k, l = 0..=P`, from the closed-form coefficients.
pub fn covariance_toeplitz(s: &SymbolSpectrum, p: usize) -> BlockToeplitz {
    let pi = p as i64;
    let blocks = (-pi..=pi).map(|j| symbol::c(s, j)).collect();
    BlockToeplitz::new(s.d, p, blocks).expect("blocks are square and consistent")
}

/// `n` draws with covariance `Σ`, deterministic in `seed`.
pub fn sample(law: &ChainLaw, n: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    if n == 0 {
        return Err(Error::invalid("sample needs n >= 1"));
    }
    let l = numkit::cholesky(&law.sigma)?;
    let dim = law.sigma.rows();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let half = core::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n);
    let mut z = alloc::vec![c64(0.0, 0.0); dim];
    for _ in 0..n {
        for zi in z.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *zi = c64(re * half, im * half);
        }
        let x: Vec<Complex64> = (0..dim)
            .map(|i| (0..=i).map(|j| l[(i, j)] * z[j]).sum())
            .collect();
        out.push(x);
    }
    Ok(out)
}

/// Conditional law of the chain given `X_l`.
#[derive(Debug, Clone)]
pub struct ConditionalLaw {
    /// `E[X_{l+k}|X_l] = forward[i]·X_l` for `k = k1, k2`.
    pub forward: [ComplexMatrix; 2],
    /// `E[X_{l−k}|X_l] = backward[i]·X_l` for `k = k1, k2`.
    pub backward: [ComplexMatrix; 2],
    /// `Cov(X_{l+k1}, X_{l+k2} | X_l)`.
    pub covariance: ComplexMatrix,
}

pub fn conditional_law(ib: &InvariantBoundaries, s: &SymbolSpectrum, k1: usize, k2: usize) -> Result<ConditionalLaw> {
    if k1 > k2 {
        return Err(Error::invalid("conditional_law needs k1 <= k2"));
    }
    let pw = |m: &ComplexMatrix, k: usize| m.pow(k as u32);
    let c0 = symbol::c(s, 0);
    let covariance = &(&pw(&ib.w_gt1_inv, k2 - k1) - &(&pw(&ib.w_lt1, k1) * &pw(&ib.w_gt1_inv, k2))) * &c0;
    Ok(ConditionalLaw {
        forward: [pw(&ib.w_lt1, k1), pw(&ib.w_lt1, k2)],
        backward: [pw(&ib.w_gt1_inv, k1), pw(&ib.w_gt1_inv, k2)],
        covariance,
    })
}

#[derive(Debug, Clone)]
pub struct PeriodicChainLaw {
    pub p: usize,
    pub q_per: ComplexMatrix,
    /// `Φ(ω_P^k)` for `k = 0..P`.
    pub modes: Vec<ComplexMatrix>,
    pub log_z_per: f64,
}

impl PeriodicChainLaw {
    pub fn z_per(&self) -> f64 {
        libm::exp(self.log_z_per)
    }
}

fn dft_modes(w: &GaussianWeight, p: usize) -> Vec<ComplexMatrix> {
    let sym = OrderOneSymbol::from_weight(w);
    (0..p)
        .map(|k| sym.eval(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64)))
        .collect()
}

fn log_z_from_modes(w: &GaussianWeight, modes: &[ComplexMatrix]) -> Result<f64> {
    let p = modes.len() as f64;
    let mut log = p * (libm::log(w.alpha()) + w.d() as f64 * libm::log(2.0 * PI));
    for m in modes {
        let lu = Lu::new(m)?;
        if lu.is_singular() {
            return Err(Error::numerical("singular DFT mode"));
        }
        log -= lu.log_det().0;
    }
    Ok(log)
}

/// `log Z_P^per` from the DFT modes, without assembling `Q_per`.
pub fn log_periodic_partition(w: &GaussianWeight, p: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::invalid("a periodic chain needs P >= 2"));
    }
    log_z_from_modes(w, &dft_modes(w, p))
}

/// Block-circulant precision of a ring of `P` sites.
pub fn periodic_precision(w: &GaussianWeight, p: usize) -> Result<ComplexMatrix> {
    if p < 2 {
        return Err(Error::invalid("a periodic chain needs P >= 2"));
    }
    let d = w.d();
    let mut q = ComplexMatrix::zeros(p * d, p * d);
    let s = w.a_ll() + w.a_rr();
    for j in 0..p {
        let nx = (j + 1) % p;
        q.add_block(j * d, j * d, &s);
        q.add_block(j * d, nx * d, w.a_lr());
        q.add_block(nx * d, j * d, w.a_rl());
    }
    Ok(q)
}

pub fn periodic_chain(w: &GaussianWeight, p: usize) -> Result<PeriodicChainLaw> {
    let q_per = periodic_precision(w, p)?;
    let modes = dft_modes(w, p);
    let d = w.d();
    // F* Q F with F_{jk} = ω^{jk}/√P ⊗ I must be block diagonal.
    let n = p * d;
    let scale = 1.0 / libm::sqrt(p as f64);
    let f = ComplexMatrix::from_fn(n, n, |r, c| {
        if r % d != c % d {
            return c64(0.0, 0.0);
        }
        let (j, k) = (r / d, c / d);
        Complex64::from_polar(scale, 2.0 * PI * ((j * k) % p) as f64 / p as f64)
    });
    let mut expect = ComplexMatrix::zeros(n, n);
    for (k, m) in modes.iter().enumerate() {
        expect.set_block(k * d, k * d, m);
    }
    let diag = &(&f.adjoint() * &q_per) * &f;
    let gap = diag.distance(&expect) / q_per.norm().max(1.0);
    Error::check("DFT block-diagonalization of Q_per", gap, LAW_TOL)?;
    let log_z_per = log_z_from_modes(w, &modes)?;
    Ok(PeriodicChainLaw {
        p,
        q_per,
        modes,
        log_z_per,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::invariant_boundaries;
    use crate::symbol::compute_spectrum;

    fn ou() -> GaussianWeight {
        GaussianWeight::new(1.0, ComplexMatrix::from_real_rows(&[&[1.25, -1.0], &[-1.0, 1.25]])).unwrap()
    }

    fn eigen_pair(w: &GaussianWeight) -> (BoundaryWeight, BoundaryWeight) {
        let s = compute_spectrum(w).unwrap();
        invariant_boundaries(w, &s).unwrap().boundary_weights().unwrap()
    }

    #[test]
    fn ou_chain_p1() {
        let w = ou();
        let (l, r) = eigen_pair(&w);
        let law = assemble_chain(&w, &l, &r, 1).unwrap();
        let q = ComplexMatrix::from_real_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        let s = ComplexMatrix::from_real_rows(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]]);
        assert!(law.q.distance(&q) < 1e-12);
        assert!(law.sigma.distance(&s) < 1e-12);
    }

    #[test]
    fn ou_chain_p2_and_toeplitz_flag() {
        let w = ou();
        let (l, r) = eigen_pair(&w);
        let law = assemble_chain(&w, &l, &r, 2).unwrap();
        assert!(law.is_toeplitz(1e-10));
        assert!((law.sigma[(0, 2)].re - 1.0 / 6.0).abs() < 1e-12);
        let two = BoundaryWeight::new(1.0, ComplexMatrix::from_real_rows(&[&[2.0]])).unwrap();
        let skew = assemble_chain(&w, &two, &r, 2).unwrap();
        assert!(!skew.is_toeplitz(1e-6));
    }

    #[test]
    fn covariance_toeplitz_ou() {
        let s = compute_spectrum(&ou()).unwrap();
        let t = covariance_toeplitz(&s, 1).dense();
        let e = ComplexMatrix::from_real_rows(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]]);
        assert!(t.distance(&e) < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = ou();
        let (l, r) = eigen_pair(&w);
        let law = assemble_chain(&w, &l, &r, 3).unwrap();
        assert_eq!(sample(&law, 5, 42).unwrap(), sample(&law, 5, 42).unwrap());
        assert_ne!(sample(&law, 5, 42).unwrap(), sample(&law, 5, 43).unwrap());
    }

    #[test]
    fn ou_conditional() {
        let w = ou();
        let s = compute_spectrum(&w).unwrap();
        let ib = invariant_boundaries(&w, &s).unwrap();
        let c = conditional_law(&ib, &s, 1, 1).unwrap();
        assert!((c.forward[0][(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((c.covariance[(0, 0)].re - 0.5).abs() < 1e-12);
        let z = conditional_law(&ib, &s, 0, 0).unwrap();
        assert!(z.covariance.norm() < 1e-15);
    }

    #[test]
    fn ou_periodic_p2() {
        let law = periodic_chain(&ou(), 2).unwrap();
        assert!((law.modes[0][(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((law.modes[1][(0, 0)].re - 4.5).abs() < 1e-15);
        let expect = 16.0 * PI * PI / 9.0;
        assert!((law.z_per() - expect).abs() / expect < 1e-12);
        let dense = numkit::det(&law.q_per).unwrap().re;
        assert!((dense - 0.5 * 4.5).abs() < 1e-12);
    }
}
