//! Block-Toeplitz truncations of matrix trigonometric polynomials with
//! corner corrections that make the determinant exactly geometric.
//!
//! Block `(k, l)` of a truncation is `Ψ_{l−k}`, so `Ψ_1` sits above the
//! diagonal, as in the chain precision matrix.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::c64;
use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, Lu, DEFAULT_QUADRATURE_NODES, DEFAULT_TOL};
use crate::symbol::{self, OrderOneSymbol};

/// Grid used to check positivity of a symbol on the circle.
pub const POSITIVITY_GRID: usize = 512;
/// Agreement between the spectral and quadrature values of `g`.
pub const G_TOL: f64 = 1e-8;

/// `Ψ(θ) = Σ_{|k| ≤ N} Ψ_k e^{ikθ}` with `Ψ_{−k} = Ψ_k*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolySymbol {
    d: usize,
    coeffs: Vec<ComplexMatrix>,
}

impl TrigPolySymbol {
    /// `coeffs = [Ψ_0, Ψ_1, …, Ψ_N]`. `Ψ_0` must be Hermitian and the
    /// symbol positive definite on a grid of the circle.
    pub fn new(d: usize, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a symbol needs at least Ψ_0"));
        }
        for (k, m) in coeffs.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::invalid(alloc::format!("Ψ_{k} is not {d}x{d}")));
            }
            if !m.is_finite() {
                return Err(Error::invalid(alloc::format!("Ψ_{k} has non-finite entries")));
            }
        }
        let s = TrigPolySymbol { d, coeffs };
        for j in 0..POSITIVITY_GRID {
            let theta = 2.0 * PI * j as f64 / POSITIVITY_GRID as f64;
            if let Some(why) = numkit::hermitian_pd_defect(&s.eval(theta), DEFAULT_TOL)? {
                return Err(Error::not_pd(alloc::format!("Ψ(θ = {theta:.4})"), why));
            }
        }
        Ok(s)
    }

    pub fn from_order_one(sym: &OrderOneSymbol) -> Result<Self> {
        let gap = sym.psi_m1.distance(&sym.psi1.adjoint());
        if gap > DEFAULT_TOL * (1.0 + sym.psi1.norm()) {
            return Err(Error::invalid("Ψ_-1 must equal Ψ_1*"));
        }
        Self::new(sym.d(), alloc::vec![sym.psi0.clone(), sym.psi1.clone()])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    /// `Ψ_k` for any integer `k` (zero beyond the order).
    pub fn coefficient(&self, k: i64) -> ComplexMatrix {
        let a = k.unsigned_abs() as usize;
        if a >= self.coeffs.len() {
            ComplexMatrix::zeros(self.d, self.d)
        } else if k >= 0 {
            self.coeffs[a].clone()
        } else {
            self.coeffs[a].adjoint()
        }
    }

    pub fn eval(&self, theta: f64) -> ComplexMatrix {
        let n = self.order() as i64;
        let mut acc = ComplexMatrix::zeros(self.d, self.d);
        for k in -n..=n {
            acc = &acc + &self.coefficient(k).scale(Complex64::from_polar(1.0, k as f64 * theta));
        }
        acc
    }

    pub fn to_order_one(&self) -> Result<OrderOneSymbol> {
        if self.order() != 1 {
            return Err(Error::invalid(alloc::format!(
                "expected an order-1 symbol, got order {}",
                self.order()
            )));
        }
        OrderOneSymbol::new(self.coefficient(0), self.coefficient(1), self.coefficient(-1))
    }

    /// Truncation `T_P = (Ψ_{l−k})_{k,l = 0..=P}` without corrections.
    pub fn toeplitz(&self, p: usize) -> BlockToeplitz {
        let pi = p as i64;
        BlockToeplitz::new(self.d, p, (-pi..=pi).map(|j| self.coefficient(j)).collect())
            .expect("consistent block sizes")
    }
}

/// Block-Toeplitz matrix with `P + 1` block rows, block `(k, l)` equal to
/// `X_{l−k}`, plus optional corrections on the two corner blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockToeplitz {
    d: usize,
    p: usize,
    /// `X_{−P}, …, X_P`.
    blocks: Vec<ComplexMatrix>,
    pub g_l: Option<ComplexMatrix>,
    pub g_r: Option<ComplexMatrix>,
}

impl BlockToeplitz {
    pub fn new(d: usize, p: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != 2 * p + 1 {
            return Err(Error::invalid(alloc::format!(
                "{} blocks given, expected {}",
                blocks.len(),
                2 * p + 1
            )));
        }
        if blocks.iter().any(|b| b.rows() != d || b.cols() != d) {
            return Err(Error::invalid(alloc::format!("blocks must be {d}x{d}")));
        }
        Ok(BlockToeplitz {
            d,
            p,
            blocks,
            g_l: None,
            g_r: None,
        })
    }

    pub fn with_corners(mut self, g_l: ComplexMatrix, g_r: ComplexMatrix) -> Self {
        self.g_l = Some(g_l);
        self.g_r = Some(g_r);
        self
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `X_j` for `|j| ≤ P`.
    pub fn block(&self, j: i64) -> &ComplexMatrix {
        &self.blocks[(j + self.p as i64) as usize]
    }

    pub fn dense(&self) -> ComplexMatrix {
        let n = self.p + 1;
        let d = self.d;
        let mut m = ComplexMatrix::zeros(n * d, n * d);
        for k in 0..n {
            for l in 0..n {
                m.set_block(k * d, l * d, self.block(l as i64 - k as i64));
            }
        }
        if let Some(g) = &self.g_l {
            m.add_block(0, 0, g);
        }
        if let Some(g) = &self.g_r {
            m.add_block(self.p * d, self.p * d, g);
        }
        m
    }

    pub fn det(&self) -> Result<Complex64> {
        numkit::det(&self.dense())
    }
}

/// Pivot blocks of block Gaussian elimination, top to bottom.
pub fn schur_pivots(m: &ComplexMatrix, d: usize) -> Result<Vec<ComplexMatrix>> {
    if !m.is_square() || d == 0 || !m.rows().is_multiple_of(d) {
        return Err(Error::invalid("matrix is not made of square d x d blocks"));
    }
    let n = m.rows() / d;
    let mut work = m.clone();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let piv = work.block(k * d, k * d, d, d);
        let rest = (n - k - 1) * d;
        if rest > 0 {
            let lu = Lu::new(&piv)?;
            let row = work.block(k * d, (k + 1) * d, d, rest);
            let col = work.block((k + 1) * d, k * d, rest, d);
            let update = &col * &lu.solve(&row)?;
            let tail = &work.block((k + 1) * d, (k + 1) * d, rest, rest) - &update;
            work.set_block((k + 1) * d, (k + 1) * d, &tail);
        }
        pivots.push(piv);
    }
    Ok(pivots)
}

/// A boundary-corrected truncation with `det = g^P·κ`.
#[derive(Debug, Clone)]
pub struct CorrectedToeplitz {
    pub matrix: BlockToeplitz,
    /// `det(Ψ_0 + G_L)`, the geometric mean of `det Ψ` on the circle.
    pub g: f64,
    /// `det(G_L + G_R + Ψ_0)`.
    pub kappa: f64,
    /// `exp((1/2π)∫ log det Ψ)` by quadrature.
    pub g_quadrature: f64,
}

impl CorrectedToeplitz {
    /// `log(g^P κ)`.
    pub fn log_det(&self) -> f64 {
        self.matrix.p as f64 * libm::log(self.g) + libm::log(self.kappa)
    }

    pub fn det(&self) -> f64 {
        libm::exp(self.log_det())
    }
}

/// `exp((1/2π)∫ log det Ψ(θ) dθ)`.
pub fn geometric_mean_det(sym: &TrigPolySymbol, nodes: usize) -> Result<f64> {
    let q = numkit::try_circle_quadrature(
        |t| {
            let lu = Lu::new(&sym.eval(t))?;
            Ok(ComplexMatrix::scalar(c64(lu.log_det().0, 0.0)))
        },
        nodes,
    )?;
    Ok(libm::exp(q[(0, 0)].re))
}

pub fn corrected_toeplitz(sym: &TrigPolySymbol, p: usize) -> Result<CorrectedToeplitz> {
    let one = sym.to_order_one()?;
    if numkit::numerical_rank(&one.psi1, DEFAULT_TOL) != sym.d() {
        return Err(Error::assumption("Ψ_1 is not full rank"));
    }
    let spec = symbol::spectrum_of(&one)?;
    let (g_l, g_r, _, _) = crate::invariant::corner_corrections(&one, &spec)?;
    let g = numkit::det(&(&one.psi0 + &g_l))?;
    let kappa = numkit::det(&(&(&g_l + &g_r) + &one.psi0))?;
    if !(g.re > 0.0) || !(kappa.re > 0.0) {
        return Err(Error::numerical("corner corrections give a non-positive determinant"));
    }
    let g_quadrature = geometric_mean_det(sym, DEFAULT_QUADRATURE_NODES)?;
    let gap = (g.re - g_quadrature).abs() / g.re;
    Error::check("g (corner pivot vs quadrature)", gap, G_TOL)?;
    Ok(CorrectedToeplitz {
        matrix: sym.toeplitz(p).with_corners(g_l, g_r),
        g: g.re,
        kappa: kappa.re,
        g_quadrature,
    })
}

/// Groups `N` consecutive sites of an order-`N` symbol into one, giving an
/// order-one symbol in dimension `N·d`.
pub fn block_reduce(sym: &TrigPolySymbol) -> Result<TrigPolySymbol> {
    let n = sym.order();
    if n < 2 {
        return Err(Error::invalid("blocking needs a symbol of order N >= 2"));
    }
    let d = sym.d();
    let mut t0 = ComplexMatrix::zeros(n * d, n * d);
    let mut t1 = ComplexMatrix::zeros(n * d, n * d);
    for k in 0..n {
        for l in 0..n {
            let off = l as i64 - k as i64;
            t0.set_block(k * d, l * d, &sym.coefficient(off));
            t1.set_block(k * d, l * d, &sym.coefficient(n as i64 + off));
        }
    }
    if numkit::numerical_rank(&t1, DEFAULT_TOL) != n * d {
        return Err(Error::assumption("blocked Ψ̃_1 is not invertible"));
    }
    TrigPolySymbol::new(n * d, alloc::vec![t0, t1])
}

/// Determinant of the uncorrected truncation `T_P(Ψ)`.
pub fn plain_toeplitz_det(sym: &TrigPolySymbol, p: usize) -> Result<f64> {
    Ok(sym.toeplitz(p).det()?.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    pub p: usize,
    pub plain: f64,
    pub corrected: f64,
    pub ratio: f64,
}

/// Plain against corrected determinants for `P = 1..=Pmax`.
pub fn asymptotic_report(sym: &TrigPolySymbol, p_max: usize) -> Result<Vec<AsymptoticRow>> {
    if p_max < 4 {
        return Err(Error::invalid("asymptotic_report needs Pmax >= 4"));
    }
    let mut rows = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let ct = corrected_toeplitz(sym, p)?;
        let plain = plain_toeplitz_det(sym, p)?;
        let corrected = ct.det();
        rows.push(AsymptoticRow {
            p,
            plain,
            corrected,
            ratio: plain / corrected,
        });
    }
    // Differences must shrink past P = 8 until they reach rounding level.
    let diffs: Vec<f64> = rows.windows(2).map(|w| (w[1].ratio - w[0].ratio).abs()).collect();
    for (i, pair) in diffs.windows(2).enumerate() {
        let p = i + 2;
        let floor = 1e-12 * rows[i + 1].ratio.abs();
        if p > 8 && pair[1] > pair[0] && pair[1] > floor {
            return Err(Error::Inconsistency {
                what: alloc::format!("plain/corrected ratio does not settle at P = {}", p + 1),
                discrepancy: pair[1],
                tolerance: pair[0],
            });
        }
    }
    Ok(rows)
}
