//! Random fields for the integration tests, built straight from a seeded
//! generator rather than through the library's own data generator.
#![allow(dead_code)]

use micropolar::spectral::{leray_project, GridSpec, SpectralField, VectorField};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real, dealiased, mean-free scalar with a Gaussian envelope.
pub fn random_scalar(g: GridSpec, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = (g.n as f64 / 6.0).max(1.0) * g.k_unit();
    let mut f = SpectralField::from_fn(g, |idx, _| {
        let env = (-g.k_sq(idx) / (2.0 * width * width)).exp();
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im) * env
    });
    f.symmetrize();
    f.apply_dealias();
    f.coeffs_mut()[0] = Complex64::default();
    f
}

pub fn random_vector(g: GridSpec, seed: u64) -> VectorField {
    let s = seed.wrapping_mul(3);
    VectorField::new(random_scalar(g, s), random_scalar(g, s + 1), random_scalar(g, s + 2)).unwrap()
}

pub fn random_solenoidal(g: GridSpec, seed: u64) -> VectorField {
    leray_project(&random_vector(g, seed))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`.
pub fn rel_diff(a: &VectorField, b: &VectorField) -> f64 {
    let mut d = a.clone();
    d -= b;
    let s = a.norm_sq().max(b.norm_sq()).sqrt();
    if s == 0.0 {
        d.norm_sq().sqrt()
    } else {
        d.norm_sq().sqrt() / s
    }
}

pub fn rel_diff_scalar(a: &SpectralField, b: &SpectralField) -> f64 {
    let d: f64 = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let s = a.norm_sq().max(b.norm_sq()).sqrt();
    if s == 0.0 {
        d.sqrt()
    } else {
        d.sqrt() / s
    }
}
