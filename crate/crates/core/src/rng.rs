//! Seeded randomness.
//!
//! Every random draw in the toolkit comes from `ChaCha8Rng::seed_from_u64`,
//! whose output stream is fixed by the `rand_chacha` crate on every
//! platform. Monte-Carlo trials derive one sub-seed per trial index with
//! [`trial_seed`], so a reported worst seed replays its trial exactly no
//! matter how the trials were split across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::linalg::{c, inner, vec_norm, CMatrix, C64};

pub type ToolRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ToolRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `base + index·φ`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::new(n, n, gaussian_vector(n * n, rng)).expect("n > 0")
}

/// Haar-random unitary: Gram–Schmidt on a Ginibre matrix. The implied `R`
/// factor has a positive diagonal, which is what makes the result Haar.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    loop {
        let g = ginibre(n, rng);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j);
            for _ in 0..2 {
                for q in &cols {
                    let proj = inner(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= proj * qi;
                    }
                }
            }
            let nv = vec_norm(&v);
            if nv < 1e-10 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
        if ok {
            return CMatrix::from_columns(&cols);
        }
    }
}

/// Invertible operator drawn from the Ginibre ensemble, redrawn until its
/// condition number is at most `max_condition`.
pub fn random_invertible<R: Rng + ?Sized>(n: usize, max_condition: f64, rng: &mut R) -> CMatrix {
    loop {
        let g = ginibre(n, rng);
        match g.condition_number() {
            Ok(k) if k <= max_condition => return g,
            _ => continue,
        }
    }
}

/// Evaluates `f(0..n)` on a pool of `workers` threads (0 picks the rayon
/// default) and returns the results in index order.
pub fn parallel_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let run = || (0..n).into_par_iter().map(&f).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// Uniform draw from the half-open interval `(0, hi]`.
pub fn uniform_open_closed<R: Rng + ?Sized>(hi: f64, rng: &mut R) -> f64 {
    hi * (1.0 - rng.random::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(11);
        for n in 1..=4 {
            let u = haar_unitary(n, &mut rng);
            assert!((&u * &u.adjoint()).approx_eq(&CMatrix::identity(n), 1e-13));
        }
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| trial_seed(7, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(trial_seed(7, 0), trial_seed(8, 0));
    }

    #[test]
    fn stream_is_frozen() {
        // Pins the generator contract: a change of PRNG or distribution
        // sampling would change these bits.
        let mut rng = rng_from_seed(42);
        let z = complex_gaussian(&mut rng);
        assert_eq!(z.re.to_bits(), 4602282164425616919);
        assert_eq!(z.im.to_bits(), 4608686939075772812);
        assert_eq!(trial_seed(42, 7), 14769051326987775908);
    }

    #[test]
    fn parallel_map_is_ordered_for_any_worker_count() {
        let f = |i: usize| complex_gaussian(&mut rng_from_seed(trial_seed(5, i as u64)));
        let one = parallel_map(64, 1, f);
        assert_eq!(one, parallel_map(64, 4, f));
        assert_eq!(one, parallel_map(64, 0, f));
    }

    #[test]
    fn random_invertible_respects_condition_cap() {
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let g = random_invertible(2, 20.0, &mut rng);
            assert!(g.condition_number().unwrap() <= 20.0);
        }
    }
}
