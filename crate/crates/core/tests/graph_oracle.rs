mod common;

use common::*;
use proptest::prelude::*;
use tempocom::oracle::{best_in_interval, connected_subsets};
use tempocom::{conductance, eta, Interval, NormalizationConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aggregate_matches_dense_sum(seed in any::<u64>(), n in 2usize..9, t_len in 1usize..7, p in 0.1f64..0.9) {
        let g = random_temporal(&mut rng(seed), n, t_len, p);
        for iv in Interval::all(t_len) {
            let ag = g.aggregate(iv).unwrap();
            for u in 0..n {
                for v in 0..n {
                    let want: f64 = (iv.start..=iv.end).map(|t| g.weight(u, v, t)).sum();
                    prop_assert!((ag.weight(u, v) - want).abs() <= 1e-12 * want.max(1.0));
                }
            }
        }
    }

    #[test]
    fn conductance_matches_dense_formula(seed in any::<u64>(), n in 3usize..9, t_len in 1usize..6,
                                         mask in 1u32..255, alpha in 0.0f64..1.0) {
        let g = connected_temporal(&mut rng(seed), n, t_len, 0.3);
        let full = (1u32 << n) - 1;
        let mask = mask & full;
        prop_assume!(mask != 0 && mask != full);
        let nodes: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let cfg = NormalizationConfig::new(alpha).unwrap();
        for iv in Interval::all(t_len) {
            let a = dense_adjacency(&g.aggregate(iv).unwrap());
            let inside = |i: usize| mask >> i & 1 == 1;
            let (mut cut, mut vin, mut vout) = (0.0, 0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    if inside(i) { vin += a[(i, j)] } else { vout += a[(i, j)] }
                    if inside(i) && !inside(j) { cut += a[(i, j)] }
                }
            }
            let want = eta(iv, &cfg) * cut / vin.min(vout);
            let got = conductance(&g, &nodes, iv, &cfg).unwrap();
            prop_assert!((got - want).abs() <= 1e-12 * want.max(1e-300), "{got} vs {want}");
        }
    }

    #[test]
    fn connected_subsets_match_naive_filter(seed in any::<u64>(), n in 1usize..11, p in 0.05f64..0.7) {
        let ag = random_temporal(&mut rng(seed), n, 1, p).aggregate(Interval::single(0)).unwrap();
        let naive: Vec<u32> = (1u32..(1 << n))
            .filter(|&m| ag.induces_connected(&(0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
            .collect();
        prop_assert_eq!(connected_subsets(&ag).unwrap(), naive);
    }

    #[test]
    fn interval_optimum_matches_naive(seed in any::<u64>(), n in 2usize..9, p in 0.2f64..0.9, alpha in 0.0f64..1.0) {
        let ag = random_connected_static(&mut rng(seed), n, p);
        let cfg = NormalizationConfig::new(alpha).unwrap();
        let want = brute_min_conductance(&ag, alpha);
        let got = best_in_interval(&ag, &cfg).unwrap().unwrap();
        prop_assert!((got.phi - want).abs() <= 1e-12 * want.max(1e-300));
    }
}

#[test]
fn eta_values() {
    let cfg = NormalizationConfig::new(0.5).unwrap();
    assert_eq!(eta(Interval::single(3), &cfg), 1.0);
    assert_eq!(eta(Interval::new(0, 1).unwrap(), &cfg), 1.0);
    assert!((eta(Interval::new(2, 6).unwrap(), &cfg) - 0.5).abs() < 1e-15);
}
