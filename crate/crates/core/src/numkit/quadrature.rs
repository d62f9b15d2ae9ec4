use core::f64::consts::PI;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Trapezoidal rule on the circle: `(1/N)·Σ f(2πj/N)`.
pub fn circle_quadrature(mut f: impl FnMut(f64) -> ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    try_circle_quadrature(|t| Ok(f(t)), n)
}

/// [`circle_quadrature`] for fallible integrands.
pub fn try_circle_quadrature(
    mut f: impl FnMut(f64) -> Result<ComplexMatrix>,
    n: usize,
) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::invalid("circle quadrature needs at least 2 nodes"));
    }
    let mut acc: Option<ComplexMatrix> = None;
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let v = f(theta)?;
        if !v.is_finite() {
            return Err(Error::numerical(alloc::format!(
                "integrand is not finite at θ = {theta}"
            )));
        }
        acc = Some(match acc {
            None => v,
            Some(a) => {
                if (a.rows(), a.cols()) != (v.rows(), v.cols()) {
                    return Err(Error::invalid("integrand changed shape"));
                }
                &a + &v
            }
        });
    }
    Ok(acc.expect("n >= 2").scale_real(1.0 / n as f64))
}
