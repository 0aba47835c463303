#![allow(dead_code)]

use distill_core::qstate::{DensityMatrix, Role, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn clients() -> Vec<Role> {
    vec![Role::C1, Role::C2]
}

pub fn random_pure<R: Rng>(rng: &mut R) -> DensityMatrix {
    let amps: Vec<C64> = (0..4)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityMatrix::from_pure(clients(), &amps).unwrap()
}

/// `A A† / tr` for a Gaussian `A`: full rank with probability one.
pub fn random_mixed<R: Rng>(rng: &mut R) -> DensityMatrix {
    let a = DMatrix::from_fn(4, 4, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    DensityMatrix::new(clients(), &a * a.adjoint())
        .unwrap()
        .normalized()
        .unwrap()
}

/// Brute force over every length-`k` signature sequence: first balance at `k`,
/// and length-`(k−1)` prefixes without a balance, each halved for the mirror.
pub fn enumerate_counts(k: usize) -> (u128, u128) {
    let first_balance = |bits: u32, len: usize| -> Option<usize> {
        let mut imbalance = 0i32;
        (0..len).find_map(|n| {
            imbalance += if bits >> n & 1 == 1 { 1 } else { -1 };
            (imbalance == 0).then_some(n + 1)
        })
    };
    let ns = (0..1u32 << k)
        .filter(|&b| first_balance(b, k) == Some(k))
        .count() as u128;
    let nf = (0..1u32 << (k - 1))
        .filter(|&b| first_balance(b, k - 1).is_none())
        .count() as u128;
    (ns / 2, nf / 2)
}
