//! Monte Carlo estimates of hash collision rates and pivot partition quality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tlsh::{derive_seed, TemporalPivotHasher, WeightedMinHasher};

/// Two weighted sets whose weighted Jaccard is exactly `jw`.
pub fn pair_with_jaccard(jw: f64, scale: f64) -> Result<(Vec<(usize, f64)>, Vec<(usize, f64)>)> {
    if !(jw > 0.0 && jw <= 1.0) {
        return Err(Error::invalid(format!("target Jaccard must lie in (0, 1], got {jw}")));
    }
    // {0: 1, 1: x} vs {0: 1, 2: x} has Jaccard 1 / (1 + 2x)
    let x = (1.0 / jw - 1.0) / 2.0;
    let mut a = vec![(0, scale)];
    let mut b = vec![(0, scale)];
    if x > 0.0 {
        a.push((1, x * scale));
        b.push((2, x * scale));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionCell {
    pub jw: f64,
    pub delta: usize,
    pub t_len: usize,
    pub rows: usize,
    pub pivots: usize,
    pub bands: usize,
    pub trials: usize,
    pub observed: f64,
    pub expected: f64,
}

impl CollisionCell {
    /// Binomial standard deviation of the observed rate under the expected law.
    pub fn sigma(&self) -> f64 {
        (self.expected * (1.0 - self.expected) / self.trials as f64).sqrt()
    }

    pub fn within_sigmas(&self, z: f64) -> bool {
        (self.observed - self.expected).abs() <= z * self.sigma() + 1e-12
    }
}

/// Single-band signature collision law `J^r (1 - delta/T)^k`, OR-ed over `b` bands.
pub fn expected_collision(jw: f64, delta: usize, t_len: usize, rows: usize, pivots: usize, bands: usize) -> f64 {
    let p = jw.powi(rows as i32) * (1.0 - delta as f64 / t_len as f64).powi(pivots as i32);
    1.0 - (1.0 - p).powi(bands as i32)
}

/// Empirical probability that two neighborhoods with Jaccard `jw`, observed
/// `delta` apart, share a signature in at least one of `bands` bands. Every
/// trial draws fresh hash functions.
#[allow(clippy::too_many_arguments)]
pub fn collision_rate(
    jw: f64,
    delta: usize,
    t_len: usize,
    rows: usize,
    pivots: usize,
    bands: usize,
    trials: usize,
    seed: u64,
) -> Result<CollisionCell> {
    if delta > t_len || t_len == 0 || trials == 0 {
        return Err(Error::invalid("need 0 <= delta <= T, T > 0 and trials > 0"));
    }
    let (a, b) = pair_with_jaccard(jw, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for trial in 0..trials as u64 {
        let t0 = rng.random_range(0..=(t_len - delta)) as f64;
        let mut any = false;
        for band in 0..bands as u64 {
            let wmh = WeightedMinHasher::new(rows, derive_seed(seed, &[trial, band]));
            let ph = TemporalPivotHasher::new(pivots, t_len, &mut rng);
            if ph.hash(t0) == ph.hash(t0 + delta as f64) && wmh.hash(&a) == wmh.hash(&b) {
                any = true;
            }
        }
        hits += any as usize;
    }
    Ok(CollisionCell {
        jw,
        delta,
        t_len,
        rows,
        pivots,
        bands,
        trials,
        observed: hits as f64 / trials as f64,
        expected: expected_collision(jw, delta, t_len, rows, pivots, bands),
    })
}

/// The 4 x 4 x 3 grid of `(J, delta/T, (r, k))` cells used for calibration.
pub fn calibration_grid(t_len: usize, trials: usize, seed: u64) -> Result<Vec<CollisionCell>> {
    let mut out = Vec::new();
    for (i, jw) in [0.2, 0.4, 0.6, 0.8].into_iter().enumerate() {
        for (j, frac) in [0.0, 0.05, 0.1, 0.2].into_iter().enumerate() {
            for (m, (r, k)) in [(1, 2), (2, 5), (3, 10)].into_iter().enumerate() {
                let delta = (frac * t_len as f64).round() as usize;
                let s = derive_seed(seed, &[i as u64, j as u64, m as u64]);
                out.push(collision_rate(jw, delta, t_len, r, k, 1, trials, s)?);
            }
        }
    }
    Ok(out)
}

/// Number of integer placements `a` in `[1, T - delta - 1]` for which two
/// consecutive pivots tightly bracket `[a, a + delta]`: one in `[a - 1, a]`
/// and the next in `[a + delta, a + delta + 1]`.
pub fn perfect_placements(pivots: &[f64], t_len: usize, delta: usize) -> usize {
    if t_len < delta + 2 {
        return 0;
    }
    let (lo_a, hi_a) = (1.0, (t_len - delta - 1) as f64);
    let d = delta as f64;
    pivots
        .windows(2)
        .map(|w| {
            let lo = w[0].max(w[1] - d - 1.0).max(lo_a).ceil();
            let hi = (w[0] + 1.0).min(w[1] - d).min(hi_a).floor();
            if hi >= lo {
                (hi - lo) as usize + 1
            } else {
                0
            }
        })
        .sum()
}

/// Probability that a `k`-pivot draw perfectly partitions a period of
/// duration `delta`, averaged over all placements of the period.
pub fn perfect_partition_probability(t_len: usize, delta: usize, k: usize, draws: usize, seed: u64) -> Result<f64> {
    if t_len < delta + 2 || draws == 0 {
        return Err(Error::invalid("need T >= delta + 2 and draws > 0"));
    }
    let placements = (t_len - delta - 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..draws {
        let ph = TemporalPivotHasher::new(k, t_len, &mut rng);
        total += perfect_placements(ph.pivots(), t_len, delta) as f64 / placements;
    }
    Ok(total / draws as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tlsh::weighted_jaccard;

    #[test]
    fn constructed_pairs_hit_target() {
        for jw in [0.1, 0.4, 0.75, 1.0] {
            let (a, b) = pair_with_jaccard(jw, 3.0).unwrap();
            assert!((weighted_jaccard(&a, &b).unwrap() - jw).abs() < 1e-12);
        }
        assert!(pair_with_jaccard(0.0, 1.0).is_err());
    }

    #[test]
    fn placements_by_hand() {
        // pivots 9.5 and 20.2 bracket [10, 20] tightly; T = 30
        assert_eq!(perfect_placements(&[3.0, 9.5, 20.2, 28.0], 30, 10), 1);
        assert_eq!(perfect_placements(&[3.0, 9.5, 21.7], 30, 10), 0);
        assert_eq!(perfect_placements(&[10.0, 20.0], 30, 10), 1);
    }

    #[test]
    fn identical_times_always_collide_in_time() {
        let c = collision_rate(1.0, 0, 50, 2, 7, 1, 500, 1).unwrap();
        assert_eq!(c.observed, 1.0);
        assert_eq!(c.expected, 1.0);
    }
}
