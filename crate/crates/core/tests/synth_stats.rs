use tempocom::synth::{barabasi_albert, generate, SynthConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn cell_means_match_configuration() {
    let cfg = SynthConfig { n: 300, m: 3, t_len: 120, planted_nodes: 30, seed: 9, ..SynthConfig::default() };
    let (g, planted) = generate(&cfg).unwrap();
    let member: Vec<bool> = (0..cfg.n).map(|u| planted.nodes.contains(&u)).collect();
    let (mut bg, mut bg_n, mut pl, mut pl_n) = (0.0, 0usize, 0.0, 0usize);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for (t, w) in g.edge_series(e) {
            if member[u] && member[v] && planted.interval.contains(t) {
                pl += w;
                pl_n += 1;
            } else {
                bg += w;
                bg_n += 1;
            }
        }
    }
    assert!(bg_n >= 100_000);
    // every cell is present since zero draws are redrawn
    assert_eq!(bg_n + pl_n, g.edge_count() * cfg.t_len);
    let (bg, pl) = (bg / bg_n as f64, pl / pl_n as f64);
    assert!((bg - cfg.mu).abs() <= 0.02 * cfg.mu, "background mean {bg}");
    let strong = cfg.mu * cfg.contrast;
    assert!((pl - strong).abs() <= 0.05 * strong, "planted mean {pl}");
}

#[test]
fn degree_tail_is_heavy() {
    for seed in 0..5 {
        let n = 600;
        let m = 3;
        let edges = barabasi_albert(n, m, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut deg = vec![0usize; n];
        for (u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        assert!(*deg.iter().max().unwrap() >= 5 * m);
        assert!(deg.iter().all(|&d| d >= m));
    }
}

#[test]
fn null_contrast_leaves_no_trace() {
    let cfg = SynthConfig { n: 200, m: 4, t_len: 50, planted_nodes: 20, contrast: 1.0, seed: 2, ..SynthConfig::default() };
    let (g, planted) = generate(&cfg).unwrap();
    let (mut inside, mut n_in, mut outside, mut n_out) = (0.0, 0, 0.0, 0);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let internal = planted.nodes.contains(&u) && planted.nodes.contains(&v);
        for (t, w) in g.edge_series(e) {
            if internal && planted.interval.contains(t) {
                inside += w;
                n_in += 1;
            } else {
                outside += w;
                n_out += 1;
            }
        }
    }
    let (a, b) = (inside / n_in as f64, outside / n_out as f64);
    assert!((a - b).abs() < 0.1 * b, "{a} vs {b}");
}
