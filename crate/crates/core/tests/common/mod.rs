#![allow(dead_code)]

use opmod_core::linalg::CMat;
use opmod_core::{AdjointableOp, Complex64, RegularOp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn bounded(r: &RegularOp) -> AdjointableOp {
    r.to_bounded().expect("finite-rank operators are bounded")
}

/// `‖a − b‖` in operator norm, through bounded representatives.
pub fn op_gap(a: &RegularOp, b: &RegularOp) -> f64 {
    bounded(a).distance(&bounded(b))
}

pub fn mat_gap(a: &CMat, b: &CMat) -> f64 {
    opmod_core::linalg::spectral_norm(&(a - b))
}
