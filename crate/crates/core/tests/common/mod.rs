#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use semshap::{kernelize, safe_beta, CorrelationMatrix, KernelKind, KernelMatrix};

pub const TOL: f64 = 1e-10;

pub fn random_correlation(rng: &mut ChaCha8Rng, n: usize) -> CorrelationMatrix {
    let mut c = CorrelationMatrix::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            c.set(i, j, rng.random::<f64>());
        }
    }
    c
}

/// Kernel at a random requested beta, repaired by `safe_beta`.
pub fn random_kernel(rng: &mut ChaCha8Rng, n: usize) -> KernelMatrix {
    let c = random_correlation(rng, n);
    let requested = rng.random_range(0.05..=1.0);
    let beta = safe_beta(&c, requested, KernelKind::Gaussian, TOL).unwrap();
    kernelize(&c, beta, KernelKind::Gaussian, TOL).unwrap()
}
