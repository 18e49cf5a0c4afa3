#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempocom::{AggregatedGraph, Interval, TemporalGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random temporal graph with edge density `p` per timestamp.
pub fn random_temporal(rng: &mut ChaCha8Rng, n: usize, t_len: usize, p: f64) -> TemporalGraph {
    let mut b = TemporalGraph::builder(t_len).with_numbered_nodes(n);
    for t in 0..t_len {
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    b.add_indexed(u, v, t, rng.random_range(0.1..5.0)).unwrap();
                }
            }
        }
    }
    b.build()
}

/// Random graph that is connected at every timestamp (spanning path plus extras).
pub fn connected_temporal(rng: &mut ChaCha8Rng, n: usize, t_len: usize, p: f64) -> TemporalGraph {
    let mut b = TemporalGraph::builder(t_len).with_numbered_nodes(n);
    for t in 0..t_len {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        for w in order.windows(2) {
            b.add_indexed(w[0], w[1], t, rng.random_range(0.1..5.0)).unwrap();
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    b.add_indexed(u, v, t, rng.random_range(0.1..5.0)).unwrap();
                }
            }
        }
    }
    b.build()
}

pub fn random_connected_static(rng: &mut ChaCha8Rng, n: usize, p: f64) -> AggregatedGraph {
    let g = connected_temporal(rng, n, 1, p);
    g.aggregate(Interval::single(0)).unwrap()
}

pub fn dense_adjacency(ag: &AggregatedGraph) -> DMatrix<f64> {
    let n = ag.node_count();
    let mut a = DMatrix::zeros(n, n);
    for u in 0..n {
        for (v, w) in ag.neighbors(u) {
            a[(u, v)] = w;
        }
    }
    a
}

/// Second-smallest eigenvalue of the normalized Laplacian by full dense
/// decomposition, restricted to positive-volume nodes.
pub fn dense_lambda2(ag: &AggregatedGraph) -> f64 {
    let support = ag.support();
    let m = support.len();
    if m < 2 {
        return 0.0;
    }
    let a = dense_adjacency(ag);
    let mut l = DMatrix::zeros(m, m);
    for (i, &u) in support.iter().enumerate() {
        for (j, &v) in support.iter().enumerate() {
            let du = ag.volume(u);
            let dv = ag.volume(v);
            let lij = if i == j { du - a[(u, v)] } else { -a[(u, v)] };
            l[(i, j)] = lij / (du * dv).sqrt();
        }
    }
    let mut ev: Vec<f64> = l.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[1].max(0.0)
}

/// Minimum conductance over all connected proper subsets, by naive enumeration.
pub fn brute_min_conductance(ag: &AggregatedGraph, alpha: f64) -> f64 {
    let n = ag.node_count();
    let cfg = tempocom::NormalizationConfig::new(alpha).unwrap();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) - 1 {
        let members: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if !ag.induces_connected(&members) {
            continue;
        }
        let nodes: Vec<usize> = (0..n).filter(|&i| members[i]).collect();
        best = best.min(ag.conductance(&nodes, &cfg).unwrap());
    }
    best
}

/// Desk-scale planted instance: 12 nodes, 8 timestamps, 4 planted nodes over 3 steps.
pub fn small_planted(seed: u64) -> (TemporalGraph, tempocom::TemporalCommunity) {
    let cfg = tempocom::synth::SynthConfig {
        n: 12,
        m: 3,
        t_len: 8,
        planted_nodes: 4,
        planted_span: 3,
        seed,
        ..Default::default()
    };
    tempocom::synth::generate(&cfg).unwrap()
}
