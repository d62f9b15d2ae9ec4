//! Reference weights used by `verify`.

use eigenbc_core::{oracles, ComplexMatrix, GaussianWeight, Result};

/// `d = 1`, `A = [[5/4, −1], [−1, 5/4]]`.
pub fn ou() -> GaussianWeight {
    GaussianWeight::new(1.0, ComplexMatrix::from_real_rows(&[&[1.25, -1.0], &[-1.0, 1.25]]))
        .expect("fixture is positive definite")
}

/// `d = 2`, `A = [[I, C], [C*, I]]` with `C = diag(4/5, 0)`.
pub fn rd() -> GaussianWeight {
    GaussianWeight::new(
        1.0,
        ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.8, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.8, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
    )
    .expect("fixture is positive definite")
}

/// Random weight number `i` of a run starting at `seed`; `d` cycles through 1..=4.
pub fn random(seed: u64, i: usize) -> Result<GaussianWeight> {
    oracles::random_weight(1 + i % 4, seed + i as u64)
}
