use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Latin hypercube design: in every coordinate the `count` points occupy
/// distinct equal-width strata, jittered uniformly inside their stratum, with
/// an independent stratum permutation per coordinate.
pub fn latin_hypercube(count: usize, bounds: &[(f64, f64)], seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::domain("Latin hypercube needs at least one point"));
    }
    if bounds.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::domain("Latin hypercube bounds must be finite with lo <= hi"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![Vec::with_capacity(bounds.len()); count];
    let mut strata: Vec<usize> = (0..count).collect();
    for &(lo, hi) in bounds {
        strata.shuffle(&mut rng);
        for (point, &s) in points.iter_mut().zip(&strata) {
            let u = (s as f64 + rng.random::<f64>()) / count as f64;
            point.push((lo + u * (hi - lo)).min(hi));
        }
    }
    Ok(points)
}
