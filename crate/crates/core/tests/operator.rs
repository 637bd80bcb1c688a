mod common;

use common::{max_abs, max_abs_diff, random_vec, rng};
use fracsg::{FracOperator, FractionalOrder, GridSpec};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;

fn op(alpha: f64, a: f64, b: f64, m: usize) -> FracOperator {
    FracOperator::new(FractionalOrder::new(alpha).unwrap(), GridSpec::new(a, b, m).unwrap()).unwrap()
}

fn inner(h: f64, x: &[f64], y: &[f64]) -> f64 {
    h * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
}

/// Plain double loop over the kernel, independent of both library paths.
fn loop_apply(o: &FracOperator, u: &[f64]) -> Vec<f64> {
    let c = o.kernel().coeffs();
    (0..u.len())
        .map(|j| o.scale() * u.iter().enumerate().map(|(k, &uk)| c[j.abs_diff(k)] * uk).sum::<f64>())
        .collect()
}

#[test]
fn zero_maps_to_zero() {
    let o = op(1.7, -1.0, 1.0, 20);
    let z = vec![0.0; o.len()];
    assert!(o.apply_dense(&z).unwrap().iter().all(|&x| x == 0.0));
    assert!(o.apply_fft(&z).unwrap().iter().all(|&x| x == 0.0));
    assert_eq!(o.energy_seminorm_sq(&z).unwrap(), 0.0);
}

#[test]
fn classical_unit_columns() {
    let o = op(2.0, 0.0, 9.0, 9);
    assert_eq!(o.grid().h(), 1.0);
    for j in 0..o.len() {
        let mut e = vec![0.0; o.len()];
        e[j] = 1.0;
        let col = o.apply_dense(&e).unwrap();
        for (i, &v) in col.iter().enumerate() {
            let expected = match i.abs_diff(j) {
                0 => 2.0,
                1 => -1.0,
                _ => 0.0,
            };
            assert_eq!(v, expected);
        }
    }
    let mut e1 = vec![0.0; o.len()];
    e1[0] = 1.0;
    assert_eq!(o.energy_seminorm_sq(&e1).unwrap(), 2.0);
}

#[test]
fn ones_vector_small_grid() {
    let o = op(2.0, 0.0, 1.0, 8);
    let u = vec![1.0; o.len()];
    let d = o.apply_dense(&u).unwrap();
    let f = o.apply_fft(&u).unwrap();
    assert!(max_abs_diff(&d, &f) <= 1e-12 * max_abs(&d));
}

#[test]
fn dense_and_fft_match_loop_oracle() {
    let mut r = rng(11);
    for &(alpha, m) in &[(1.7, 32usize), (1.3, 7), (2.0, 50)] {
        let o = op(alpha, -3.0, 5.0, m);
        let u = random_vec(&mut r, o.len());
        let reference = loop_apply(&o, &u);
        let scale = max_abs(&reference);
        assert!(max_abs_diff(&o.apply_dense(&u).unwrap(), &reference) <= 1e-13 * scale);
        assert!(max_abs_diff(&o.apply_fft(&u).unwrap(), &reference) <= 1e-12 * scale);
    }
}

#[test]
fn fft_matches_dense_across_sizes() {
    let mut r = rng(5);
    for &m in &[7usize, 64, 1023, 4096] {
        for &alpha in &[1.3, 1.5, 1.75, 2.0] {
            let o = op(alpha, -20.0, 20.0, m);
            assert!(o.embedding_len() >= 2 * (m - 1));
            assert!(o.embedding_len().is_power_of_two());
            let mut ws = o.workspace();
            let mut out = vec![0.0; o.len()];
            for _ in 0..20 {
                let u = random_vec(&mut r, o.len());
                let d = o.apply_dense(&u).unwrap();
                o.apply_fft_into(&u, &mut out, &mut ws).unwrap();
                let rel = max_abs_diff(&d, &out) / max_abs(&d);
                assert!(rel <= 1e-12, "M={m} alpha={alpha}: {rel:e}");
            }
        }
    }
}

#[test]
fn length_mismatch_rejected() {
    let o = op(1.5, 0.0, 1.0, 10);
    assert!(o.apply_dense(&[1.0; 3]).is_err());
    assert!(o.apply_fft(&[1.0; 10]).is_err());
    assert!(o.energy_seminorm_sq(&[]).is_err());
}

#[test]
fn eigenvalues_in_open_interval() {
    for &alpha in &[1.1, 1.5, 1.9, 2.0] {
        for m in 2..=64 {
            let o = op(alpha, 0.0, 1.0, m);
            let c = o.toeplitz_matrix();
            assert_eq!(c, c.transpose());
            let c0 = o.kernel().coeffs()[0];
            let eig = SymmetricEigen::new(c).eigenvalues;
            let (lo, hi) = (eig.min(), eig.max());
            assert!(lo > 0.0 && hi < 2.0 * c0, "alpha={alpha} M={m}: [{lo}, {hi}]");
        }
    }
}

#[test]
fn seminorm_matches_cholesky_factor() {
    let mut r = rng(3);
    for &alpha in &[1.2, 1.6, 2.0] {
        let o = op(alpha, -2.0, 2.0, 16);
        let c = o.toeplitz_matrix();
        let l = c.clone().cholesky().expect("C must be SPD").l();
        let h = o.grid().h();
        for _ in 0..5 {
            let u = random_vec(&mut r, o.len());
            let lt_u = l.transpose() * DVector::from_column_slice(&u);
            let oracle = h.powf(1.0 - alpha) * lt_u.norm_squared();
            let got = o.energy_seminorm_sq(&u).unwrap();
            assert!((got - oracle).abs() <= 1e-12 * oracle, "{got} vs {oracle}");
        }
    }
}

#[test]
fn toeplitz_matrix_layout() {
    let o = op(1.4, 0.0, 1.0, 6);
    let c: DMatrix<f64> = o.toeplitz_matrix();
    let k = o.kernel().coeffs();
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(c[(i, j)], k[i.abs_diff(j)]);
        }
    }
}

#[test]
fn grid_nodes_and_refinement() {
    let g = GridSpec::new(-20.0, 20.0, 200).unwrap();
    assert_eq!(g.interior_len(), 199);
    assert!((g.h() - 0.2).abs() < 1e-15);
    let f = g.refined();
    assert_eq!(f.subintervals(), 400);
    for j in 0..=200 {
        assert_eq!(g.node(j), f.node(2 * j));
    }
    assert!(GridSpec::new(1.0, 1.0, 4).is_err());
    assert!(GridSpec::new(0.0, 1.0, 1).is_err());
    assert!(GridSpec::with_spacing(0.0, 1.0, 0.3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symmetric_in_discrete_inner_product(
        alpha in 1.01f64..=2.0,
        m in 3usize..80,
        seed in any::<u64>(),
    ) {
        let o = op(alpha, -5.0, 5.0, m);
        let mut r = rng(seed);
        let u = random_vec(&mut r, o.len());
        let v = random_vec(&mut r, o.len());
        let h = o.grid().h();
        let lhs = inner(h, &o.apply_fft(&u).unwrap(), &v);
        let rhs = inner(h, &u, &o.apply_fft(&v).unwrap());
        let scale = inner(h, &o.apply_fft(&u).unwrap(), &u).abs() + inner(h, &o.apply_fft(&v).unwrap(), &v).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn seminorm_positive_definite(alpha in 1.01f64..=2.0, m in 2usize..64, seed in any::<u64>()) {
        let o = op(alpha, 0.0, 3.0, m);
        let u = random_vec(&mut rng(seed), o.len());
        prop_assume!(max_abs(&u) > 0.0);
        prop_assert!(o.energy_seminorm_sq(&u).unwrap() > 0.0);
    }

    /// `h (Δ (U⁰+U¹)/2, (U¹−U⁰)/τ) = (‖ΛU¹‖² − ‖ΛU⁰‖²) / (2τ)`.
    #[test]
    fn energy_difference_identity(
        alpha in 1.01f64..=2.0,
        m in 3usize..128,
        tau in 1e-3f64..1.0,
        seed in any::<u64>(),
    ) {
        let o = op(alpha, -10.0, 10.0, m);
        let mut r = rng(seed);
        let u0 = random_vec(&mut r, o.len());
        let u1 = random_vec(&mut r, o.len());
        let mid: Vec<f64> = u0.iter().zip(&u1).map(|(a, b)| 0.5 * (a + b)).collect();
        let diff: Vec<f64> = u0.iter().zip(&u1).map(|(a, b)| (b - a) / tau).collect();
        let lhs = inner(o.grid().h(), &o.apply_fft(&mid).unwrap(), &diff);
        let n0 = o.energy_seminorm_sq(&u0).unwrap();
        let n1 = o.energy_seminorm_sq(&u1).unwrap();
        let rhs = (n1 - n0) / (2.0 * tau);
        let scale = (n0 + n1) / (2.0 * tau);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale, "{lhs} vs {rhs}");
    }
}
