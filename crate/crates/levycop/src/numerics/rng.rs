use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Independent, reproducible stream `index` of the generator family keyed by
/// `seed`. Streams never overlap, so parallel workers can each take one and
/// the concatenated output is independent of scheduling.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point on the open standard simplex {s > 0, sum s_i = 1},
/// via normalized exponentials.
pub fn simplex_sample(d: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::argument("simplex_sample requires d >= 2"));
    }
    let mut e: Vec<f64> = (0..d)
        .map(|_| {
            let u: f64 = rng.gen::<f64>();
            -(-u).ln_1p()
        })
        .collect();
    let sum: f64 = e.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        // Probability zero; resample rather than return a degenerate point.
        return simplex_sample(d, rng);
    }
    for x in &mut e {
        *x /= sum;
    }
    Ok(e)
}
