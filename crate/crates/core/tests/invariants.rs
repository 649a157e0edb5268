//! Randomized invariants of the kernel, entropy and Shapley layers.

mod common;

use common::{random_correlation, random_kernel, TOL};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semshap::entropy::raw_differential_entropy;
use semshap::{
    build_cache, exact_shapley, full_entropy, kernelize, mc_shapley, safe_beta, subset_entropy,
    CorrelationMatrix, KernelKind, KernelMatrix, LN_2PI_E,
};

const G: KernelKind = KernelKind::Gaussian;

#[test]
fn fallback_beta_is_diagonally_dominant_and_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.random_range(2..=12);
        let c = random_correlation(&mut rng, n);
        let k = kernelize(&c, 1.0 / (n as f64 + 1.0), G, TOL).unwrap();
        assert!(k.psd_certified(), "min eig {}", k.min_eigenvalue());
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| k.get(i, j)).sum();
            assert!(off < 1.0, "row {i}: {off}");
        }
    }
}

#[test]
fn kernelize_output_exactly_symmetric_with_bounded_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let c = random_correlation(&mut rng, n);
        let beta = rng.random_range(0.01..=1.0);
        let k = kernelize(&c, beta, G, TOL).unwrap();
        for i in 0..n {
            assert_eq!(k.get(i, i), 1.0);
            for j in 0..n {
                assert_eq!(k.get(i, j).to_bits(), k.get(j, i).to_bits());
                if i != j {
                    assert!(k.get(i, j) > 0.0 && k.get(i, j) <= beta);
                }
            }
        }
    }
}

/// Bipartite pattern: answers agree fully across the two groups and not at
/// all within a group. Indefinite at beta = 0.5 once n is large enough.
fn bipartite(n: usize) -> CorrelationMatrix {
    let mut c = CorrelationMatrix::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            c.set(i, j, if (i < n / 2) != (j < n / 2) { 1.0 } else { 0.0 });
        }
    }
    c
}

#[test]
fn safe_beta_repairs_adversarial_matrices() {
    let c = bipartite(12);
    let k = kernelize(&c, 0.5, G, TOL).unwrap();
    assert!(
        !k.psd_certified(),
        "expected an indefinite kernel, min eig {}",
        k.min_eigenvalue()
    );
    let beta = safe_beta(&c, 0.5, G, TOL).unwrap();
    assert!(beta < 0.5);
    assert!(kernelize(&c, beta, G, TOL).unwrap().psd_certified());

    // Eigen-fuzzing: perturb the bipartite pattern and keep every case
    // where the requested beta fails.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut failures = 0;
    for _ in 0..300 {
        let n = rng.random_range(8..=12);
        let mut c = bipartite(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (c.get(i, j) + rng.random_range(-0.2..0.2f64)).clamp(0.0, 1.0);
                c.set(i, j, v);
            }
        }
        let requested = rng.random_range(0.3..=1.0);
        if kernelize(&c, requested, G, TOL).unwrap().psd_certified() {
            continue;
        }
        failures += 1;
        let beta = safe_beta(&c, requested, G, TOL).unwrap();
        assert!(beta < requested && beta >= 1.0 / (n as f64 + 1.0));
        let k = kernelize(&c, beta, G, TOL).unwrap();
        assert!(k.psd_certified() && k.min_eigenvalue() > TOL);
    }
    assert!(
        failures > 20,
        "fuzzing produced only {failures} adversarial cases"
    );
}

proptest! {
    #[test]
    fn kernel_entry_strictly_increasing_in_correlation(
        a in 0.0f64..=1.0, b in 0.0f64..=1.0, beta in 0.01f64..=1.0,
    ) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let k = |v: f64| {
            let c = CorrelationMatrix::from_rows(&[vec![1.0, v], vec![v, 1.0]]).unwrap();
            kernelize(&c, beta, G, TOL).unwrap().get(0, 1)
        };
        prop_assert!(k(lo) < k(hi));
    }

    #[test]
    fn kernel_is_identity_plus_scaled_unit_beta_matrix(seed in any::<u64>(), beta in 0.01f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=8);
        let c = random_correlation(&mut rng, n);
        let r = kernelize(&c, 1.0, G, TOL).unwrap();
        let k = kernelize(&c, beta, G, TOL).unwrap();
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                prop_assert!((k.get(i, j) - (id + beta * (r.get(i, j) - id))).abs() < 1e-15);
            }
        }
    }
}

fn bits(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

#[test]
fn entropy_is_submodular_and_conditioning_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let n = rng.random_range(2..=7);
        let k = random_kernel(&mut rng, n);
        let cache = build_cache(&k, 12).unwrap();
        let full = (1usize << n) - 1;
        for t in 0..=full {
            // Every S subset of T, via submask enumeration.
            let mut s = t;
            loop {
                for i in (0..n).filter(|&i| t & (1 << i) == 0) {
                    let gain_s = cache.get(s | 1 << i) - cache.get(s);
                    let gain_t = cache.get(t | 1 << i) - cache.get(t);
                    assert!(gain_s >= gain_t - 1e-9, "S={s:#b} T={t:#b} i={i}");
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
            for i in (0..n).filter(|&i| t & (1 << i) == 0) {
                assert!(cache.get(t | 1 << i) - cache.get(t) <= 0.5 * LN_2PI_E + 1e-12);
            }
        }
    }
}

#[test]
fn entropy_is_permutation_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let n = rng.random_range(2..=7);
        let k = random_kernel(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        // Relabeled matrix: new index a holds old index perm[a].
        let kp = k.principal(&perm);
        for mask in 0..(1usize << n) {
            let new_idx = bits(mask, n);
            let old_idx: Vec<usize> = new_idx.iter().map(|&a| perm[a]).collect();
            let a = subset_entropy(&kp, &new_idx).unwrap();
            let b = subset_entropy(&k, &old_idx).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn entropy_adds_over_independent_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let (p, q) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let n = p + q;
        let a = random_kernel(&mut rng, p);
        let b = random_kernel(&mut rng, q);
        let mut rows = a.rows();
        for row in &mut rows {
            row.resize(n, 0.0);
        }
        for row in b.rows() {
            let mut padded = vec![0.0; p];
            padded.extend(row);
            rows.push(padded);
        }
        let k = KernelMatrix::from_rows(&rows, TOL).unwrap();
        let s: Vec<usize> = (0..p).filter(|_| rng.random()).collect();
        let t: Vec<usize> = (p..n).filter(|_| rng.random()).collect();
        let union: Vec<usize> = s.iter().chain(&t).copied().collect();
        let lhs = subset_entropy(&k, &union).unwrap();
        let rhs = subset_entropy(&k, &s).unwrap() + subset_entropy(&k, &t).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn efficiency_on_random_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let k = random_kernel(&mut rng, n);
        let r = exact_shapley(&k, 12).unwrap();
        assert!((r.total - full_entropy(&k).unwrap()).abs() <= 1e-9);
        assert_eq!(r.total, r.per_element.iter().sum::<f64>());
    }
}

#[test]
fn symmetric_players_get_equal_shares() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..50 {
        let n = rng.random_range(3..=7);
        let mut c = random_correlation(&mut rng, n);
        // Make answers 0 and 1 interchangeable.
        for m in 2..n {
            c.set(1, m, c.get(0, m));
        }
        let k = kernelize(&c, safe_beta(&c, 0.5, G, TOL).unwrap(), G, TOL).unwrap();
        let r = exact_shapley(&k, 12).unwrap();
        assert!((r.per_element[0] - r.per_element[1]).abs() < 1e-9);
    }
}

#[test]
fn monte_carlo_tracks_exact_n4() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let k = random_kernel(&mut rng, 4);
    let exact = exact_shapley(&k, 12).unwrap();
    let mc = mc_shapley(&k, 50_000, 5).unwrap();
    let se = mc.mc_stderr.as_ref().unwrap();
    for (i, ((m, e), s)) in mc
        .per_element
        .iter()
        .zip(&exact.per_element)
        .zip(se)
        .enumerate()
    {
        assert!((m - e).abs() <= 3.0 * s, "element {i}: {m} vs {e} (se {s})");
    }
}

#[test]
fn table_matrices_full_entropy() {
    let table = |off: f64| {
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 1.0, off],
            vec![1.0, 1.0, off],
            vec![off, off, 1.0],
        ])
        .unwrap();
        kernelize(&c, 0.5, G, TOL).unwrap()
    };
    // Independent oracle: eigenvalue product of the kernel matrix.
    let oracle = |k: &KernelMatrix| {
        let eig = table_eigenvalues(k);
        0.5 * (3.0 * LN_2PI_E + eig.iter().map(|v| v.ln()).sum::<f64>())
    };
    let t1 = table(0.5);
    let t2 = table(0.0);
    let h1 = full_entropy(&t1).unwrap();
    let h2 = full_entropy(&t2).unwrap();
    assert!((h1 - oracle(&t1)).abs() < 1e-12);
    assert!((h2 - oracle(&t2)).abs() < 1e-12);
    assert!((h1 - 3.962_692_037_974_548).abs() < 1e-9);
    assert!((h2 - 4.047_563_327_774_124).abs() < 1e-9);
    let r1 = exact_shapley(&t1, 12).unwrap();
    assert!((r1.per_element[0] - r1.per_element[1]).abs() < 1e-12);
    assert!(r1.per_element[0] < r1.per_element[2]);
}

/// Eigenvalues of a 3x3 matrix with `k[0][1]` shared by the first two rows:
/// the antisymmetric vector gives `1 - a`, the rest solve a 2x2 block.
fn table_eigenvalues(k: &KernelMatrix) -> [f64; 3] {
    let a = k.get(0, 1);
    let b = k.get(0, 2);
    // Symmetric subspace basis (1,1,0)/sqrt2, (0,0,1): [[1 + a, sqrt2 b], [sqrt2 b, 1]].
    let (p, q, r) = (1.0 + a, std::f64::consts::SQRT_2 * b, 1.0);
    let mean = 0.5 * (p + r);
    let disc = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    [1.0 - a, mean - disc, mean + disc]
}

#[test]
fn raw_entropy_breaks_where_kernelized_shapley_does_not() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..50 {
        let n = rng.random_range(3..=8);
        let mut c = random_correlation(&mut rng, n);
        // Answer 1 duplicates answer 0.
        for m in 2..n {
            c.set(1, m, c.get(0, m));
        }
        c.set(0, 1, 1.0);
        assert!(!raw_differential_entropy(&c).is_finite());
        let k = kernelize(&c, safe_beta(&c, 0.5, G, TOL).unwrap(), G, TOL).unwrap();
        assert!(exact_shapley(&k, 12).unwrap().total.is_finite());
    }
}
