//! Shared fixtures for the integration suites: seeded sampling helpers and
//! independent numerical oracles (implemented from definitions, not by
//! calling the code under test).
//!
//! Each integration target compiles its own copy, so helpers a given suite
//! does not call are expected.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on the unit sphere.
pub fn rand_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Rotation vector with magnitude uniform in `(lo, hi)`.
pub fn rand_tau(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec3 {
    rand_unit(rng) * rng.random_range(lo..hi)
}

/// Skew matrix built directly from the definition (oracle-side `hat`).
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// Truncated Taylor series of the matrix exponential — an oracle for the
/// Rodrigues closed form. At order 20 the remainder for ‖τ‖ ≤ π is below
/// `π²¹/21! ≈ 2e-10`; at order 30 it is far below rounding.
pub fn exp_taylor(tau: &Vec3, order: usize) -> Mat3 {
    let a = skew(tau);
    let mut term = Mat3::identity();
    let mut sum = Mat3::identity();
    for k in 1..=order {
        term = term * a / (k as f64);
        sum += term;
    }
    sum
}

/// Chord-sum length of the normalized-lerp path from `x` to `y` on the
/// sphere: a discretized great-circle oracle for `dist_s2`. Converges from
/// below at O(1/n²).
pub fn arc_length_chords(x: &Vec3, y: &Vec3, n: usize) -> f64 {
    let mut total = 0.0;
    let mut prev = *x;
    for k in 1..=n {
        let t = k as f64 / n as f64;
        let p = (x * (1.0 - t) + y * t).normalize();
        total += (p - prev).norm();
        prev = p;
    }
    total
}
