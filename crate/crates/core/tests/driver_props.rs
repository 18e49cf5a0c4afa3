mod common;

use common::*;
use proptest::prelude::*;
use tempocom::driver::{detect, RunConfig};
use tempocom::oracle::{best_in_interval, brute_force_best};
use tempocom::pruning::{build_groups, precompute, prune_all, PruneStatus};
use tempocom::spectral::DEFAULT_TOLERANCE;
use tempocom::synth::{generate, SynthConfig};
use tempocom::{conductance, NormalizationConfig};

fn medium(seed: u64) -> tempocom::TemporalGraph {
    let cfg = SynthConfig { n: 60, m: 4, t_len: 30, planted_nodes: 12, planted_span: 5, seed, ..SynthConfig::default() };
    generate(&cfg).unwrap().0
}

#[test]
fn state_invariants() {
    for seed in 0..4 {
        let g = medium(seed);
        let cfg = RunConfig { seed, ..RunConfig::default() };
        let norm = cfg.validate().unwrap();
        let st = detect(&g, &cfg).unwrap();
        assert!(st.incumbent_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*st.incumbent_history.last().unwrap(), st.phi_star);
        assert_eq!(st.best().unwrap().phi, st.phi_star);
        assert!(st.communities.windows(2).all(|w| w[0].rank_cmp(&w[1]).is_lt()));
        for c in &st.communities {
            let exact = conductance(&g, &c.nodes, c.interval, &norm).unwrap();
            assert!((c.phi - exact).abs() <= 1e-12 * exact);
            let ag = g.aggregate(c.interval).unwrap();
            assert!(ag.induces_connected(&ag.mask(&c.nodes).unwrap()));
        }
        let bt = precompute(&g, cfg.scale_base, cfg.eig_tol).unwrap();
        for s in &st.skipped {
            assert!(s.bound > s.phi_star && s.phi_star >= st.phi_star);
            let again = bt.composite_bound(s.interval, &norm).unwrap() / 2.0;
            assert!((again - s.bound).abs() <= 1e-12 * again.max(1.0));
        }
        assert_eq!(st.verdicts.len(), g.timeline_len() * (g.timeline_len() + 1) / 2);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let g = medium(11);
    let one = detect(&g, &RunConfig { threads: 1, seed: 3, ..RunConfig::default() }).unwrap();
    let many = detect(&g, &RunConfig { threads: 4, seed: 3, ..RunConfig::default() }).unwrap();
    assert_eq!(one.communities, many.communities);
    assert_eq!(one.verdicts, many.verdicts);
    assert_eq!(one.incumbent_history, many.incumbent_history);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pruned_intervals_hold_nothing_better(seed in any::<u64>(), n in 3usize..9, t_len in 1usize..7,
                                            p in 0.2f64..0.8, alpha in 0.0f64..1.0, groups in any::<bool>()) {
        let g = random_temporal(&mut rng(seed), n, t_len, p);
        let norm = NormalizationConfig::new(alpha).unwrap();
        let Ok(bf) = brute_force_best(&g, &norm) else { return Ok(()) };
        let bt = precompute(&g, 2, DEFAULT_TOLERANCE).unwrap();
        let grp = build_groups(t_len, 2, 0.5).unwrap();
        let verdicts = prune_all(&bt, &grp, bf.phi, &norm, groups).unwrap();
        for v in verdicts.iter().filter(|v| v.status.is_pruned()) {
            prop_assert_ne!(v.interval, bf.interval);
            if let Some(c) = best_in_interval(&g.aggregate(v.interval).unwrap(), &norm).unwrap() {
                prop_assert!(c.phi >= bf.phi, "{} pruned but holds {}", v.interval, c.phi);
            }
        }
        prop_assert!(verdicts.iter().all(|v| v.status != PruneStatus::Probed));
    }
}
