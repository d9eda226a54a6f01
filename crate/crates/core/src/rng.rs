//! Seeded sampling.
//!
//! Every random object in the crate is drawn from a ChaCha8 stream created by
//! [`seeded`]. Uniforms are rand's 53-bit `f64` samples on `[0, 1)`; normals
//! come from Box–Muller so that one call yields one complex normal.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{hermitian_eig, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two independent standard normals.
pub fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 - U keeps the log argument in (0, 1].
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Complex normal with independent standard normal real and imaginary parts.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let (re, im) = normal_pair(rng);
    Complex64::new(re, im)
}

/// Square Ginibre matrix.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| complex_normal(rng))
}

/// Uniform point on the probability simplex (flat Dirichlet).
pub fn dirichlet_uniform<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// `(G + G^H) / (2 sqrt(dim))`; eigenvalues concentrate in `[-2, 2]`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let h = g.hermitian_part();
    h.scale(1.0 / (dim as f64).sqrt())
}

/// `exp(i H)` for a random Hermitian `H`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(dim, rng).scale(std::f64::consts::PI);
    let spec = hermitian_eig(&h).expect("random Hermitian matrix");
    let v = spec.vectors.as_ref().expect("eigenvectors requested");
    let phases: Vec<Complex64> = spec
        .values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l))
        .collect();
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        (0..dim).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()
    })
}
