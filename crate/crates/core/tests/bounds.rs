mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use tempocom::pruning::{build_groups, precompute};
use tempocom::spectral::{lambda2, DEFAULT_TOLERANCE};
use tempocom::{Interval, NormalizationConfig};

fn check_chain(seed: u64, n: usize, t_len: usize, p: f64, alpha: f64) -> Result<(), TestCaseError> {
    let g = random_temporal(&mut rng(seed), n, t_len, p);
    let bt = precompute(&g, 2, DEFAULT_TOLERANCE).unwrap();
    let cfg = NormalizationConfig::new(alpha).unwrap();
    for iv in Interval::all(t_len) {
        let exact = lambda2(&g.aggregate(iv).unwrap(), DEFAULT_TOLERANCE).unwrap().lambda2;
        let comp = bt.composite_lambda_bound(iv).unwrap();
        prop_assert!(comp <= exact + 1e-9, "{iv}: composite {comp} > exact {exact}");
    }
    for grp in build_groups(t_len, 2, 0.5).unwrap() {
        let gb = bt.group_bound(&grp, &cfg).unwrap();
        for iv in grp.members() {
            let cb = bt.composite_bound(iv, &cfg).unwrap();
            prop_assert!(gb <= cb + 1e-9, "{grp:?} vs {iv}: {gb} > {cb}");
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dominance_chain(seed in any::<u64>(), n in 2usize..12, t_len in 1usize..9,
                       p in 0.1f64..0.9, alpha in 0.0f64..1.5) {
        check_chain(seed, n, t_len, p, alpha)?;
    }
}

#[test]
fn dominance_chain_longer_timelines() {
    let mut r = rng(3);
    for _ in 0..10 {
        let t_len = r.random_range(9..=16);
        check_chain(r.random(), 8, t_len, 0.4, 0.5).unwrap();
    }
}

#[test]
fn group_counts_stay_near_log_linear() {
    for t_len in [8usize, 100, 512, 1000] {
        let groups = build_groups(t_len, 2, 0.5).unwrap();
        let log = (t_len as f64).log2().ceil() as usize;
        assert!(groups.len() <= 2 * t_len * log, "T={t_len}: {}", groups.len());
    }
}

#[test]
fn precompute_solves_fewer_than_two_t() {
    let g = random_temporal(&mut rng(9), 6, 37, 0.5);
    let bt = precompute(&g, 2, DEFAULT_TOLERANCE).unwrap();
    assert!(bt.blocks().len() < 2 * 37);
}
