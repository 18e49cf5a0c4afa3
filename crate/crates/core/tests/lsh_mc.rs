use tempocom::calibrate::{collision_rate, expected_collision, pair_with_jaccard};
use tempocom::tlsh::{optimal_pivots, TemporalPivotHasher, WeightedMinHasher};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn banded_collisions_follow_or_law() {
    for (jw, delta, rows, pivots, bands) in [(0.5, 10, 2, 5, 4), (0.7, 0, 3, 10, 3), (0.3, 20, 1, 2, 5)] {
        let c = collision_rate(jw, delta, 100, rows, pivots, bands, 20_000, 7).unwrap();
        assert!(c.within_sigmas(4.0), "{c:?}");
        assert!((c.expected - expected_collision(jw, delta, 100, rows, pivots, bands)).abs() < 1e-12);
    }
}

#[test]
fn collision_rate_decreases_with_distance() {
    let rates: Vec<f64> = [0, 5, 10, 20, 40]
        .into_iter()
        .map(|d| collision_rate(0.6, d, 100, 2, 5, 1, 20_000, 3).unwrap().observed)
        .collect();
    assert!(rates.windows(2).all(|w| w[0] > w[1]), "{rates:?}");
}

#[test]
fn minhash_collision_is_scale_free() {
    // scaling both sets by the same factor leaves the collision probability at J^r
    let jw = 0.6;
    let trials = 20_000;
    for scale in [1e-3, 1.0, 1e3] {
        let (a, b) = pair_with_jaccard(jw, scale).unwrap();
        let hits = (0..trials)
            .filter(|&i| {
                let h = WeightedMinHasher::new(2, 11u64.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ i as u64);
                h.hash(&a) == h.hash(&b)
            })
            .count();
        let p = jw * jw;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let rate = hits as f64 / trials as f64;
        assert!((rate - p).abs() <= 4.0 * sigma, "scale {scale}: {rate} vs {p}");
    }
}

#[test]
fn pivot_collision_matches_gap_law() {
    // two timestamps delta apart share a pivot cell with probability (1 - delta/T)^k
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (t_len, delta, k) = (200usize, 15usize, optimal_pivots(15, 200).unwrap());
    let trials = 20_000;
    let mut hits = 0;
    for i in 0..trials {
        let ph = TemporalPivotHasher::new(k, t_len, &mut rng);
        let t0 = (i % (t_len - delta)) as f64;
        hits += (ph.hash(t0) == ph.hash(t0 + delta as f64)) as usize;
    }
    let p = (1.0 - delta as f64 / t_len as f64).powi(k as i32);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let rate = hits as f64 / trials as f64;
    assert!((rate - p).abs() <= 4.0 * sigma, "{rate} vs {p}");
}
