//! Input generators shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semshap::{kernelize, CorrelationMatrix, KernelKind, KernelMatrix};

/// Uniform random symmetric correlation matrix with unit diagonal.
pub fn random_correlation(n: usize, seed: u64) -> CorrelationMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = CorrelationMatrix::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            c.set(i, j, rng.random::<f64>());
        }
    }
    c
}

/// Kernel at the always-safe `beta = 1 / (n + 1)`.
pub fn random_kernel(n: usize, seed: u64) -> KernelMatrix {
    let c = random_correlation(n, seed);
    kernelize(&c, 1.0 / (n as f64 + 1.0), KernelKind::Gaussian, 1e-10).expect("beta within (0, 1]")
}
