//! Expansion of seed sets into communities: random walk with restart ranks
//! the nodes and a sweep over ranking prefixes picks the lowest conductance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    conductance_ratio, eta, AggregatedGraph, DisjointSets, Interval, NormalizationConfig, TemporalCommunity,
    TemporalGraph,
};
use crate::tlsh::Bucket;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    /// Probability of jumping back to the seeds at each step.
    pub restart: f64,
    /// L1 change between iterates at which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams { restart: 0.15, tol: 1e-9, max_iter: 10_000 }
    }
}

impl WalkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.restart > 0.0 && self.restart < 1.0) {
            return Err(Error::invalid(format!("restart must lie in (0, 1), got {}", self.restart)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) || self.max_iter == 0 {
            return Err(Error::invalid("walk tolerance and iteration cap must be positive"));
        }
        Ok(())
    }
}

/// Stationary distribution of the walk `x = c s + (1 - c) A D^-1 x` with
/// uniform restart mass on `seeds`. Zero-volume nodes keep their mass.
pub fn rwr_scores(ag: &AggregatedGraph, seeds: &[usize], params: &WalkParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = ag.node_count();
    if seeds.is_empty() {
        return Err(Error::invalid("random walk needs at least one seed"));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::invalid(format!("seed {bad} out of range")));
    }
    let mut restart = vec![0.0; n];
    let mass = 1.0 / seeds.len() as f64;
    for &s in seeds {
        restart[s] += mass;
    }
    let c = params.restart;
    let mut x = restart.clone();
    let mut next = vec![0.0; n];
    for _ in 0..params.max_iter {
        for (y, r) in next.iter_mut().zip(&restart) {
            *y = c * r;
        }
        for u in 0..n {
            if x[u] == 0.0 {
                continue;
            }
            let vol = ag.volume(u);
            if vol <= 0.0 {
                next[u] += (1.0 - c) * x[u];
                continue;
            }
            let share = (1.0 - c) * x[u] / vol;
            for (v, w) in ag.neighbors(u) {
                next[v] += share * w;
            }
        }
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if change < params.tol {
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
            return Ok(x);
        }
    }
    Err(Error::WalkNotConverged { iterations: params.max_iter })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub community: TemporalCommunity,
    /// Length of the chosen prefix.
    pub sweep_index: usize,
    pub walk: Option<WalkParams>,
}

/// Lowest-conductance connected prefix of `ranking`. Prefixes range over
/// lengths `1..=min(|ranking|, n - 1)`; disconnected prefixes and prefixes
/// with an empty side are skipped.
pub fn sweep(ag: &AggregatedGraph, ranking: &[usize], cfg: &NormalizationConfig) -> Result<SweepResult> {
    let n = ag.node_count();
    if ranking.is_empty() {
        return Err(Error::invalid("sweep needs a nonempty ranking"));
    }
    let mut member = vec![false; n];
    for &u in ranking {
        if u >= n || member[u] {
            return Err(Error::invalid(format!("ranking repeats or exceeds node {u}")));
        }
        member[u] = true;
    }
    member.iter_mut().for_each(|m| *m = false);

    let total = ag.total_volume();
    let scale = eta(ag.interval(), cfg);
    let mut ds = DisjointSets::new(n);
    let mut parts = 0usize;
    let (mut cut, mut vol_in) = (0.0, 0.0);
    let mut best: Option<(f64, usize)> = None;
    for (i, &v) in ranking.iter().take(n.saturating_sub(1)).enumerate() {
        let mut inner = 0.0;
        parts += 1;
        for (x, w) in ag.neighbors(v) {
            if member[x] {
                inner += w;
                if ds.union(v, x) {
                    parts -= 1;
                }
            }
        }
        member[v] = true;
        cut += ag.volume(v) - 2.0 * inner;
        vol_in += ag.volume(v);
        if parts != 1 {
            continue;
        }
        let phi = conductance_ratio(cut.max(0.0), vol_in, total - vol_in, scale);
        if phi.is_finite() && best.is_none_or(|(b, _)| phi < b) {
            best = Some((phi, i + 1));
        }
    }
    let (_, len) = best.ok_or(Error::NoConnectedPrefix)?;
    let mut nodes = ranking[..len].to_vec();
    let mut mask = ag.mask(&nodes)?;
    if let Some(other) = smaller_side(ag, &mask) {
        mask = other;
        nodes = (0..n).filter(|&u| mask[u]).collect();
    }
    let phi = ag.conductance_mask(&mask, cfg);
    Ok(SweepResult { community: TemporalCommunity::new(nodes, ag.interval(), phi), sweep_index: len, walk: None })
}

/// The positive-volume complement of `mask` when it has fewer nodes and
/// induces a connected subgraph. Both sides have the same conductance.
fn smaller_side(ag: &AggregatedGraph, mask: &[bool]) -> Option<Vec<bool>> {
    let other: Vec<bool> = (0..mask.len()).map(|u| !mask[u] && ag.volume(u) > 0.0).collect();
    let count = |m: &[bool]| m.iter().filter(|&&b| b).count();
    (count(&other) < count(mask) && ag.induces_connected(&other)).then_some(other)
}

/// Seeds first, by `(multiplicity desc, score desc, index)`; then every other
/// node with positive score by `(score / volume desc, index)`.
pub fn rank_nodes(ag: &AggregatedGraph, multiplicities: &[(usize, usize)], scores: &[f64]) -> Vec<usize> {
    let mut seeds: Vec<(usize, usize)> = multiplicities.to_vec();
    seeds.sort_by(|a, b| b.1.cmp(&a.1).then(scores[b.0].total_cmp(&scores[a.0])).then(a.0.cmp(&b.0)));
    let mut is_seed = vec![false; ag.node_count()];
    for &(u, _) in &seeds {
        is_seed[u] = true;
    }
    let mut rest: Vec<(usize, f64)> = (0..ag.node_count())
        .filter(|&u| !is_seed[u] && scores[u] > 0.0 && ag.volume(u) > 0.0)
        .map(|u| (u, scores[u] / ag.volume(u)))
        .collect();
    rest.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    seeds.into_iter().map(|(u, _)| u).chain(rest.into_iter().map(|(u, _)| u)).collect()
}

/// Walk from the seeds in `multiplicities` and sweep the resulting ranking.
pub fn refine_seeds(
    ag: &AggregatedGraph,
    multiplicities: &[(usize, usize)],
    cfg: &NormalizationConfig,
    walk: &WalkParams,
) -> Result<SweepResult> {
    let seeds: Vec<usize> = multiplicities.iter().map(|&(u, _)| u).collect();
    let scores = rwr_scores(ag, &seeds, walk)?;
    let ranking = rank_nodes(ag, multiplicities, &scores);
    let mut res = sweep(ag, &ranking, cfg)?;
    res.walk = Some(*walk);
    Ok(res)
}

/// Refines a bucket over its timestamp span.
pub fn refine_bucket(
    g: &TemporalGraph,
    bucket: &Bucket,
    cfg: &NormalizationConfig,
    walk: &WalkParams,
) -> Result<SweepResult> {
    if bucket.entries.is_empty() {
        return Err(Error::invalid("cannot refine an empty bucket"));
    }
    let ag = g.aggregate(bucket.span())?;
    refine_seeds(&ag, &bucket.multiplicities(), cfg, walk)
}

/// Lowest-conductance interval for a fixed node set, among intervals over
/// which the set induces a connected subgraph. `None` if there is none.
pub fn fit_interval(
    g: &TemporalGraph,
    nodes: &[usize],
    cfg: &NormalizationConfig,
) -> Result<Option<TemporalCommunity>> {
    let n = g.node_count();
    let t_len = g.timeline_len();
    let mut member = vec![false; n];
    for &u in nodes {
        if u >= n || member[u] {
            return Err(Error::invalid(format!("node list repeats or exceeds node {u}")));
        }
        member[u] = true;
    }
    // prefix sums of cut, inside volume and outside volume over time
    let mut pre = vec![[0.0f64; 3]; t_len + 1];
    for t in 0..t_len {
        let mut acc = [0.0; 3];
        for (e, w) in g.snapshot(t) {
            let (u, v) = g.edges()[e];
            match (member[u], member[v]) {
                (true, true) => acc[1] += 2.0 * w,
                (false, false) => acc[2] += 2.0 * w,
                _ => {
                    acc[0] += w;
                    acc[1] += w;
                    acc[2] += w;
                }
            }
        }
        pre[t + 1] = [pre[t][0] + acc[0], pre[t][1] + acc[1], pre[t][2] + acc[2]];
    }
    let mut cands: Vec<(f64, Interval)> = Interval::all(t_len)
        .filter_map(|iv| {
            let d = |k: usize| pre[iv.end + 1][k] - pre[iv.start][k];
            let phi = conductance_ratio(d(0).max(0.0), d(1), d(2), eta(iv, cfg));
            phi.is_finite().then_some((phi, iv))
        })
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let internal: Vec<usize> = (0..g.edge_count())
        .filter(|&e| {
            let (u, v) = g.edges()[e];
            member[u] && member[v]
        })
        .collect();
    for (_, iv) in cands {
        let mut ds = DisjointSets::new(n);
        let mut parts = nodes.len();
        for &e in &internal {
            let (u, v) = g.edges()[e];
            if g.edge_aggregate(e, iv) > 0.0 && ds.union(u, v) {
                parts -= 1;
            }
        }
        if parts == 1 {
            let ag = g.aggregate(iv)?;
            let phi = ag.conductance(nodes, cfg)?;
            return Ok(Some(TemporalCommunity::new(nodes.to_vec(), iv, phi)));
        }
    }
    Ok(None)
}

/// Alternates interval fitting and a fresh sweep seeded with the whole node
/// set until neither improves `c` (at most `rounds` times).
pub fn polish(
    g: &TemporalGraph,
    c: TemporalCommunity,
    cfg: &NormalizationConfig,
    walk: &WalkParams,
    rounds: usize,
) -> Result<TemporalCommunity> {
    let mut best = c;
    for _ in 0..rounds {
        let mut improved = false;
        if let Some(f) = fit_interval(g, &best.nodes, cfg)? {
            if f.rank_cmp(&best).is_lt() {
                best = f;
                improved = true;
            }
        }
        let ag = g.aggregate(best.interval)?;
        let seeds: Vec<(usize, usize)> = best.nodes.iter().map(|&u| (u, 1)).collect();
        match refine_seeds(&ag, &seeds, cfg, walk) {
            Ok(r) if r.community.rank_cmp(&best).is_lt() => {
                best = r.community;
                improved = true;
            }
            Ok(_) | Err(Error::NoConnectedPrefix) => {}
            Err(e) => return Err(e),
        }
        if !improved {
            break;
        }
    }
    let ag = g.aggregate(best.interval)?;
    if let Some(other) = smaller_side(&ag, &ag.mask(&best.nodes)?) {
        let nodes: Vec<usize> = (0..other.len()).filter(|&u| other[u]).collect();
        let phi = ag.conductance_mask(&other, cfg);
        best = TemporalCommunity::new(nodes, best.interval, phi);
    }
    Ok(best)
}
