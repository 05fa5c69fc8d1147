//! Thread-parallel drivers whose results do not depend on the thread count.

use hadamard_core::abp::Abp;
use hadamard_core::lblab::{corr_f_vs, random_product_poly, CorrReport};
use hadamard_core::pit::{PitVerdict, RandomizedSetup};
use hadamard_core::poly::CPoly;
use hadamard_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Randomized zero test with trials spread over the current rayon pool.
///
/// Trial `t` draws from its own stream, and the verdict reports the lowest
/// successful trial, so the output equals the sequential
/// [`hadamard_core::pit::pit_randomized`].
pub fn pit_randomized_par(p: &Abp, trials: u32, seed: u64) -> Result<PitVerdict> {
    if trials == 0 {
        return hadamard_core::pit::pit_randomized(p, trials, seed);
    }
    let setup = RandomizedSetup::new(p)?;
    let first = (0..trials)
        .into_par_iter()
        .map(|t| setup.trial(seed, t))
        .find_first(|r| !matches!(r, Ok(None)));
    match first {
        Some(Err(e)) => Err(e),
        Some(Ok(hit)) => Ok(setup.verdict(trials, hit)),
        None => Ok(setup.verdict(trials, None)),
    }
}

/// Correlation of `big_f` with `count` random product polynomials. Sample
/// `i` is drawn from stream `i` of `seed`.
pub fn corr_battery(big_f: &CPoly, count: usize, terms: usize, seed: u64) -> Result<Vec<CorrReport>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let g = random_product_poly(big_f.n_vars(), terms, &mut rng).materialize()?;
            corr_f_vs(big_f, &g)
        })
        .collect()
}
