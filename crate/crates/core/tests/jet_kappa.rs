//! Invariant Taylor coefficients against a brute-force kernel on the full
//! tensor power.

#[path = "support/tensor_power.rs"]
mod tensor_power;

use std::time::Instant;

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use symred_core::error::Error;
use symred_core::kinematic::{binomial, jet_kappa};
use symred_core::linalg::Matrix;
use tensor_power::brute_force;

fn mat(rows: &[&[i64]]) -> Matrix<Q> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect())
}

fn so3() -> Vec<Matrix<Q>> {
    vec![
        mat(&[&[0, 0, 0], &[0, 0, -1], &[0, 1, 0]]),
        mat(&[&[0, 0, 1], &[0, 0, 0], &[-1, 0, 0]]),
        mat(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 0]]),
    ]
}

#[test]
fn rotations_of_space_at_the_origin() {
    let start = Instant::now();
    let dims: Vec<usize> = (0..=5).map(|k| jet_kappa(&so3(), &[], 3, k, 2000).unwrap().dim).collect();
    assert_eq!(dims, vec![1, 0, 1, 0, 1, 0]);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    for k in 0..=5 {
        assert_eq!(dims[k], brute_force(&so3(), &[], 3, k), "k = {k}");
    }
}

#[test]
fn rotations_of_the_plane() {
    let x = vec![mat(&[&[0, -1], &[1, 0]])];
    let dims: Vec<usize> = (0..=3).map(|k| jet_kappa(&x, &[], 2, k, 2000).unwrap().dim).collect();
    assert_eq!(dims, vec![1, 0, 1, 0]);
    for k in 0..=5 {
        assert_eq!(jet_kappa(&x, &[], 2, k, 2000).unwrap().dim, brute_force(&x, &[], 2, k), "k = {k}");
    }
}

#[test]
fn reflections() {
    let s = vec![mat(&[&[-1, 0], &[0, 1]])];
    for k in 0..=4 {
        assert_eq!(jet_kappa(&[], &s, 2, k, 2000).unwrap().dim, brute_force(&[], &s, 2, k), "k = {k}");
    }
    let antipodal = vec![mat(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]])];
    for k in 0..=3 {
        let expected = if k % 2 == 0 { binomial(k + 2, k) } else { 0 };
        assert_eq!(jet_kappa(&[], &antipodal, 3, k, 2000).unwrap().dim, expected);
    }
}

#[test]
fn trivial_group_keeps_every_coefficient() {
    for n in 1..=4 {
        for k in 0..=4 {
            assert_eq!(jet_kappa(&[], &[], n, k, 2000).unwrap().dim, binomial(n + k - 1, k));
        }
    }
}

#[test]
fn invariant_quadratic_is_the_radius() {
    let jk = jet_kappa(&so3(), &[], 3, 2, 2000).unwrap();
    assert_eq!(jk.basis.len(), 1);
    // Monomials in lex-descending order: x², xy, xz, y², yz, z².
    let one = Q::one();
    let zero = Q::zero();
    let b = &jk.basis[0];
    let scale = b[0].clone();
    let normalized: Vec<Q> = b.iter().map(|c| c / &scale).collect();
    assert_eq!(normalized, vec![one.clone(), zero.clone(), zero.clone(), one.clone(), zero, one]);
}

#[test]
fn cap_is_enforced() {
    let err = jet_kappa(&so3(), &[], 3, 60, 100).unwrap_err();
    assert!(matches!(err, Error::DimensionCap { dim: 1891, cap: 100 }));
}
