#![allow(dead_code)]

use eigenbc_core::{oracles, ComplexMatrix, GaussianWeight};

pub fn ou() -> GaussianWeight {
    GaussianWeight::new(1.0, ComplexMatrix::from_real_rows(&[&[1.25, -1.0], &[-1.0, 1.25]])).unwrap()
}

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
    .unwrap()
}

/// Seeded random full-rank weights, `d` cycling through 1..=4.
pub fn random_weights(n: u64) -> Vec<GaussianWeight> {
    (0..n)
        .map(|seed| oracles::random_weight(1 + (seed % 4) as usize, 1000 + seed).unwrap())
        .collect()
}

pub fn scalar(x: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[x]])
}

pub fn pt_config(cases: u32) -> proptest::prelude::ProptestConfig {
    proptest::prelude::ProptestConfig {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
