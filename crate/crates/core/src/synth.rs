//! Synthetic temporal graphs with one planted low-conductance community.
//!
//! The topology is a preferential-attachment graph repeated at every
//! timestamp. Each `(edge, t)` cell gets an independent Poisson weight; inside
//! the planted node set and interval the mean is multiplied by the contrast.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{conductance, Interval, NormalizationConfig, TemporalCommunity, TemporalGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    /// Edges added per arriving node.
    pub m: usize,
    pub t_len: usize,
    /// Mean background weight.
    pub mu: f64,
    pub planted_nodes: usize,
    /// Planted interval span `t' - t`.
    pub planted_span: usize,
    /// Planted start; drawn uniformly when `None`.
    pub planted_start: Option<usize>,
    pub contrast: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 1000,
            m: 10,
            t_len: 1000,
            mu: 5.0,
            planted_nodes: 20,
            planted_span: 10,
            planted_start: None,
            contrast: 8.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n < self.m + 2 {
            return Err(Error::invalid(format!("need m >= 1 and n >= m + 2, got n = {}, m = {}", self.n, self.m)));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::invalid("mean weight must be positive"));
        }
        if !(self.contrast.is_finite() && self.contrast >= 1.0) {
            return Err(Error::invalid("contrast must be at least 1"));
        }
        if self.planted_nodes < 2 || self.planted_nodes >= self.n {
            return Err(Error::invalid("planted node count must lie in [2, n)"));
        }
        if self.planted_span >= self.t_len {
            return Err(Error::invalid("planted interval does not fit in the timeline"));
        }
        if let Some(s) = self.planted_start {
            if s + self.planted_span >= self.t_len {
                return Err(Error::invalid("planted interval does not fit in the timeline"));
            }
        }
        Ok(())
    }
}

/// Preferential attachment: a clique on `m + 1` nodes, then each new node links
/// to `m` distinct existing nodes chosen proportionally to degree.
pub fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    for u in 0..=m.min(n.saturating_sub(1)) {
        for v in 0..u {
            edges.push((v, u));
            ends.push(u);
            ends.push(v);
        }
    }
    for u in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let v = *ends.choose(rng).expect("seed clique is nonempty");
            if !targets.contains(&v) {
                targets.push(v);
            }
        }
        targets.sort_unstable();
        for v in targets {
            edges.push((v, u));
            ends.push(u);
            ends.push(v);
        }
    }
    edges
}

/// Expected-weight conductance of a node set with `e_in` internal and `e_out`
/// boundary edges when internal weights are boosted by `contrast`.
fn expected_phi(e_in: usize, e_out: usize, total: usize, contrast: f64) -> f64 {
    let rest = (total - e_in - e_out) as f64;
    let inside = 2.0 * contrast * e_in as f64 + e_out as f64;
    let outside = 2.0 * rest + e_out as f64;
    e_out as f64 / inside.min(outside)
}

fn is_connected(adj: &[Vec<usize>], inside: &[bool], start: usize, size: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 0;
    while let Some(u) = stack.pop() {
        count += 1;
        for &v in &adj[u] {
            if inside[v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    count == size
}

/// Grows a connected set from a random node, each step adding the frontier
/// node that most lowers the boundary (ties broken at random), then improves
/// it by single-node swaps that keep the set connected and lower its expected
/// conductance under the given contrast.
fn grow_planted<R: Rng>(
    n: usize,
    edges: &[(usize, usize)],
    size: usize,
    contrast: f64,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let deg = |v: usize| adj[v].len();
    let mut inside = vec![false; n];
    let mut links = vec![0usize; n];
    let start = rng.random_range(0..n);
    inside[start] = true;
    for &v in &adj[start] {
        links[v] += 1;
    }
    let (mut e_in, mut e_out) = (0usize, deg(start));
    let mut count = 1;
    while count < size {
        let frontier: Vec<usize> = (0..n).filter(|&v| !inside[v] && links[v] > 0).collect();
        let score = |v: usize| 2 * links[v] as i64 - deg(v) as i64;
        let top = frontier.iter().map(|&v| score(v)).max()?;
        let best: Vec<usize> = frontier.into_iter().filter(|&v| score(v) == top).collect();
        let pick = *best.choose(rng)?;
        inside[pick] = true;
        e_in += links[pick];
        e_out = e_out + deg(pick) - 2 * links[pick];
        for &v in &adj[pick] {
            links[v] += 1;
        }
        count += 1;
    }

    let total = edges.len();
    let mut phi = expected_phi(e_in, e_out, total, contrast);
    for _ in 0..4 * n {
        let mut moves: Vec<(f64, usize, usize, usize, usize)> = Vec::new();
        for u in (0..n).filter(|&u| inside[u]) {
            let in_u = links[u];
            for v in (0..n).filter(|&v| !inside[v] && links[v] > 0) {
                let in_v = links[v] - adj[u].contains(&v) as usize;
                if in_v == 0 {
                    continue;
                }
                let ei = e_in - in_u + in_v;
                let eo = e_out + 2 * in_u - deg(u) + deg(v) - 2 * in_v;
                let f = expected_phi(ei, eo, total, contrast);
                if f < phi - 1e-12 {
                    moves.push((f, u, v, ei, eo));
                }
            }
        }
        moves.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut applied = false;
        for (f, u, v, ei, eo) in moves {
            inside[u] = false;
            inside[v] = true;
            if is_connected(&adj, &inside, v, size) {
                for &x in &adj[u] {
                    links[x] -= 1;
                }
                for &x in &adj[v] {
                    links[x] += 1;
                }
                (phi, e_in, e_out) = (f, ei, eo);
                applied = true;
                break;
            }
            inside[u] = true;
            inside[v] = false;
        }
        if !applied {
            break;
        }
    }
    Some((0..n).filter(|&v| inside[v]).collect())
}

fn positive_poisson<R: Rng>(dist: &Poisson<f64>, rng: &mut R) -> f64 {
    loop {
        let x = dist.sample(rng);
        if x > 0.0 {
            return x;
        }
    }
}

/// Generates the graph and the planted community. The community's `phi` is
/// computed without temporal normalization.
pub fn generate(cfg: &SynthConfig) -> Result<(TemporalGraph, TemporalCommunity)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    const RETRIES: usize = 8;
    let mut attempt = 0;
    let (edges, planted) = loop {
        let edges = barabasi_albert(cfg.n, cfg.m, &mut rng);
        if let Some(p) = grow_planted(cfg.n, &edges, cfg.planted_nodes, cfg.contrast, &mut rng) {
            break (edges, p);
        }
        attempt += 1;
        if attempt == RETRIES {
            return Err(Error::Generation(format!("no connected planted set after {RETRIES} attempts")));
        }
    };
    let start = match cfg.planted_start {
        Some(s) => s,
        None => rng.random_range(0..cfg.t_len - cfg.planted_span),
    };
    let iv = Interval::new(start, start + cfg.planted_span)?;

    let base = Poisson::new(cfg.mu).map_err(|e| Error::Generation(e.to_string()))?;
    let strong = Poisson::new(cfg.mu * cfg.contrast).map_err(|e| Error::Generation(e.to_string()))?;
    let mut member = vec![false; cfg.n];
    for &u in &planted {
        member[u] = true;
    }
    let mut b = TemporalGraph::builder(cfg.t_len).with_numbered_nodes(cfg.n);
    for &(u, v) in &edges {
        let internal = member[u] && member[v];
        for t in 0..cfg.t_len {
            let dist = if internal && iv.contains(t) { &strong } else { &base };
            b.add_indexed(u, v, t, positive_poisson(dist, &mut rng))?;
        }
    }
    let g = b.build();
    let phi = conductance(&g, &planted, iv, &NormalizationConfig::unnormalized())?;
    Ok((g, TemporalCommunity::new(planted, iv, phi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig { n: 60, m: 3, t_len: 20, planted_nodes: 8, planted_span: 5, seed: 3, ..SynthConfig::default() }
    }

    #[test]
    fn ba_edge_count_and_simplicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = barabasi_albert(50, 3, &mut rng);
        assert_eq!(e.len(), 6 + 46 * 3);
        let mut s = e.clone();
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), e.len());
        assert!(e.iter().all(|&(u, v)| u < v));
    }

    #[test]
    fn deterministic_given_seed() {
        let (g1, c1) = generate(&small()).unwrap();
        let (g2, c2) = generate(&small()).unwrap();
        assert_eq!(c1, c2);
        for t in 0..g1.timeline_len() {
            assert!(g1.snapshot(t).eq(g2.snapshot(t)));
        }
    }

    #[test]
    fn planted_set_is_connected_and_in_range() {
        let (g, c) = generate(&small()).unwrap();
        assert_eq!(c.nodes.len(), 8);
        assert_eq!(c.interval.span(), 5);
        let ag = g.aggregate(c.interval).unwrap();
        assert!(ag.induces_connected(&ag.mask(&c.nodes).unwrap()));
        assert!(c.phi.is_finite() && c.phi > 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(generate(&SynthConfig { contrast: 0.5, ..small() }).is_err());
        assert!(generate(&SynthConfig { planted_nodes: 60, ..small() }).is_err());
        assert!(generate(&SynthConfig { planted_start: Some(15), ..small() }).is_err());
    }
}
