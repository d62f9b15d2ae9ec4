mod common;

use common::{ou, random_weights, rd};
use eigenbc_core::invariant::invariant_boundaries;
use eigenbc_core::numkit::{self, ComplexMatrix};
use eigenbc_core::process::{
    assemble_chain, chain_precision, conditional_law, covariance_toeplitz, periodic_chain, periodic_precision, sample,
};
use eigenbc_core::symbol::{self, compute_spectrum};
use eigenbc_core::weights::{act_right, BoundaryWeight};
use eigenbc_core::{oracles, GaussianWeight};

fn eigen_law(w: &GaussianWeight, p: usize) -> eigenbc_core::process::ChainLaw {
    let ib = invariant_boundaries(w, &compute_spectrum(w).unwrap()).unwrap();
    let (l, r) = ib.boundary_weights().unwrap();
    assemble_chain(w, &l, &r, p).unwrap()
}

#[test]
fn covariance_inverts_eigen_precision() {
    let mut ws = vec![ou(), rd()];
    ws.extend(random_weights(8));
    for w in &ws {
        let s = compute_spectrum(w).unwrap();
        let ib = invariant_boundaries(w, &s).unwrap();
        for p in [1usize, 2, 7, 16, 64] {
            let sigma = covariance_toeplitz(&s, p).dense();
            let q = chain_precision(w, &ib.b_l, &ib.b_r, p).unwrap();
            let n = q.rows();
            let gap = (&sigma * &q).distance(&ComplexMatrix::identity(n)) / (n as f64).sqrt();
            assert!(gap <= 1e-8, "d={} P={p}: {gap:e}", w.d());
            assert!(sigma.distance(&sigma.adjoint()) <= 1e-12);
        }
    }
}

#[test]
fn markov_product_identity() {
    let mut ws = vec![ou()];
    ws.extend(random_weights(8));
    for w in &ws {
        let s = compute_spectrum(w).unwrap();
        let c0_inv = numkit::inverse(&symbol::c(&s, 0)).unwrap();
        for k in 0..=10i64 {
            for l in 0..=(10 - k) {
                for sign in [1i64, -1] {
                    let (a, b) = (sign * k, sign * l);
                    let lhs = symbol::c(&s, a + b);
                    let rhs = &(&symbol::c(&s, a) * &c0_inv) * &symbol::c(&s, b);
                    assert!(lhs.distance(&rhs) <= 1e-8, "k={a} l={b}");
                }
            }
        }
    }
}

#[test]
fn three_point_conditional_independence() {
    let mut ws = vec![ou(), rd()];
    ws.extend(random_weights(6));
    for w in &ws {
        let s = compute_spectrum(w).unwrap();
        let c0_inv = numkit::inverse(&symbol::c(&s, 0)).unwrap();
        for k in 0..6i64 {
            for m in k + 1..8 {
                for l in m + 1..10 {
                    let lhs = symbol::c(&s, l - k);
                    let rhs = &(&symbol::c(&s, m - k) * &c0_inv) * &symbol::c(&s, l - m);
                    assert!(lhs.distance(&rhs) <= 1e-8);
                }
            }
        }
    }
}

#[test]
fn marginalizing_last_site() {
    for (i, w) in random_weights(6).iter().enumerate() {
        let d = w.d();
        let bl = BoundaryWeight::new(1.0, oracles::random_weight(d, 300 + i as u64).unwrap().a_ll().clone()).unwrap();
        let br = BoundaryWeight::new(1.0, oracles::random_weight(d, 400 + i as u64).unwrap().a_rr().clone()).unwrap();
        for p in 2..6 {
            let q = chain_precision(w, bl.matrix(), br.matrix(), p).unwrap();
            let n = p * d;
            let top = q.block(0, 0, n, n);
            let off = q.block(0, n, n, d);
            let last = q.block(n, n, d, d);
            let marg = &top - &(&off * &numkit::solve(&last, &off.adjoint()).unwrap());
            let pulled = act_right(w, &br).unwrap();
            let expect = chain_precision(w, bl.matrix(), pulled.matrix(), p - 1).unwrap();
            assert!(marg.distance(&expect) <= 1e-10 * expect.norm());
        }
    }
}

#[test]
fn periodic_marginals_approach_stationary_law() {
    let w = ou();
    let s = compute_spectrum(&w).unwrap();
    let q = periodic_precision(&w, 64).unwrap();
    let sigma = numkit::inverse(&q).unwrap();
    let mid = 31;
    for k in 0..3 {
        for l in 0..3 {
            let got = sigma[(mid + k, mid + l)];
            let expect = symbol::c(&s, l as i64 - k as i64)[(0, 0)];
            assert!((got - expect).norm() < 1e-6);
        }
    }
}

#[test]
fn periodic_normalization_and_modes() {
    for w in random_weights(6) {
        for p in [2usize, 3, 8] {
            let law = periodic_chain(&w, p).unwrap();
            let det = numkit::det(&law.q_per).unwrap();
            let modes: eigenbc_core::Complex64 = law.modes.iter().map(|m| numkit::det(m).unwrap()).product();
            assert!((det - modes).norm() <= 1e-10 * det.norm());
            let dense = p as f64 * (w.alpha().ln() + w.d() as f64 * (2.0 * std::f64::consts::PI).ln()) - det.norm().ln();
            assert!((dense - law.log_z_per).abs() <= 1e-10);
            let oracle = oracles::log_dft_partition(&w, p).unwrap();
            assert!((oracle - law.log_z_per).abs() <= 1e-10);
        }
    }
}

#[test]
fn eigen_covariance_is_toeplitz() {
    for w in [ou(), rd()] {
        let law = eigen_law(&w, 6);
        assert!(law.is_toeplitz(1e-10));
        let s = compute_spectrum(&w).unwrap();
        assert!(covariance_toeplitz(&s, 6).dense().distance(&law.sigma) <= 1e-10);
    }
}

#[test]
fn conditional_covariance_matches_gaussian_conditioning() {
    let mut ws = vec![ou()];
    ws.extend(random_weights(6));
    for w in &ws {
        let s = compute_spectrum(w).unwrap();
        let ib = invariant_boundaries(w, &s).unwrap();
        let c0_inv = numkit::inverse(&symbol::c(&s, 0)).unwrap();
        for k1 in 0..4usize {
            for k2 in k1..6usize {
                let law = conditional_law(&ib, &s, k1, k2).unwrap();
                let direct = &symbol::c(&s, k2 as i64 - k1 as i64)
                    - &(&(&symbol::c(&s, -(k1 as i64)) * &c0_inv) * &symbol::c(&s, k2 as i64));
                assert!(law.covariance.distance(&direct) <= 1e-8);
                let fwd = &symbol::c(&s, -(k2 as i64)) * &c0_inv;
                assert!(law.forward[1].distance(&fwd) <= 1e-8);
                let bwd = &symbol::c(&s, k2 as i64) * &c0_inv;
                assert!(law.backward[1].distance(&bwd) <= 1e-8);
            }
        }
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn sampled_moments_match_covariance() {
    let law = eigen_law(&ou(), 4);
    let draws = sample(&law, 20_000, 3).unwrap();
    for site in 0..5 {
        let v: Vec<f64> = draws.iter().map(|x| x[site].norm_sqr()).collect();
        let (m, se) = mean_and_se(&v);
        assert!((m - 2.0 / 3.0).abs() <= 3.0 * se, "site {site}: {m} ± {se}");
    }
    for site in 0..4 {
        let v: Vec<f64> = draws.iter().map(|x| (x[site] * x[site + 1].conj()).re).collect();
        let (m, se) = mean_and_se(&v);
        assert!((m - 1.0 / 3.0).abs() <= 3.0 * se, "lag 1 at {site}: {m} ± {se}");
    }
}
