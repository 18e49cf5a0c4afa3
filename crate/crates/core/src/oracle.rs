//! Exhaustive baselines for small instances: the global optimum by
//! enumeration of connected subsets, and sweeps from every seed in every
//! interval.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{eta, AggregatedGraph, Interval, NormalizationConfig, TemporalCommunity, TemporalGraph};
use crate::refine::{refine_seeds, WalkParams};

pub const MAX_BRUTE_NODES: usize = 16;
pub const MAX_BRUTE_TIMESTAMPS: usize = 12;
/// Upper limit on `intervals * nodes` random walks for the sweep baseline.
pub const MAX_EXH_WALKS: usize = 2_000_000;

struct Dense {
    n: usize,
    adj: Vec<f64>,
    nbr: Vec<u32>,
    vol: Vec<f64>,
}

impl Dense {
    fn new(ag: &AggregatedGraph) -> Self {
        let n = ag.node_count();
        let mut adj = vec![0.0; n * n];
        let mut nbr = vec![0u32; n];
        for u in 0..n {
            for (v, w) in ag.neighbors(u) {
                adj[u * n + v] = w;
                nbr[u] |= 1 << v;
            }
        }
        Dense { n, adj, nbr, vol: ag.volumes().to_vec() }
    }

    fn weight_to(&self, w: usize, set: u32) -> f64 {
        let mut s = 0.0;
        let mut bits = set;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            s += self.adj[w * self.n + x];
            bits &= bits - 1;
        }
        s
    }
}

/// Visits every connected node set exactly once (grow-from-smallest-node
/// enumeration), passing its mask, cut and volume.
fn for_each_connected(d: &Dense, mut visit: impl FnMut(u32, f64, f64)) {
    fn extend(
        d: &Dense,
        root: usize,
        sub: u32,
        ext: u32,
        closed: u32,
        cut: f64,
        vol: f64,
        visit: &mut impl FnMut(u32, f64, f64),
    ) {
        visit(sub, cut, vol);
        let mut ext = ext;
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let above = !((1u32 << (root + 1)) - 1);
            // neighbors of w not yet in the subset or its closed neighborhood
            let fresh = d.nbr[w] & !closed & above;
            let inner = d.weight_to(w, sub);
            extend(
                d,
                root,
                sub | 1 << w,
                ext | fresh,
                closed | fresh,
                cut + d.vol[w] - 2.0 * inner,
                vol + d.vol[w],
                visit,
            );
        }
    }
    for root in 0..d.n {
        let above = !((1u32 << (root + 1)) - 1) & ((1u64 << d.n) - 1) as u32;
        let ext = d.nbr[root] & above;
        let closed = (1u32 << root) | d.nbr[root];
        extend(d, root, 1 << root, ext, closed, d.vol[root], d.vol[root], &mut visit);
    }
}

/// Masks of all connected node sets of `ag` (including the full set when connected).
pub fn connected_subsets(ag: &AggregatedGraph) -> Result<Vec<u32>> {
    if ag.node_count() > MAX_BRUTE_NODES {
        return Err(Error::TooLarge(format!("{} nodes exceed {}", ag.node_count(), MAX_BRUTE_NODES)));
    }
    let d = Dense::new(ag);
    let mut out = Vec::new();
    for_each_connected(&d, |m, _, _| out.push(m));
    out.sort_unstable();
    Ok(out)
}

fn mask_nodes(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Best connected proper subset of one aggregated graph, or `None` when no
/// subset has finite conductance.
pub fn best_in_interval(ag: &AggregatedGraph, cfg: &NormalizationConfig) -> Result<Option<TemporalCommunity>> {
    let n = ag.node_count();
    if n > MAX_BRUTE_NODES {
        return Err(Error::TooLarge(format!("{n} nodes exceed {MAX_BRUTE_NODES}")));
    }
    let d = Dense::new(ag);
    let full = ((1u64 << n) - 1) as u32;
    let total: f64 = d.vol.iter().sum();
    let scale = eta(ag.interval(), cfg);
    let mut cands: Vec<(f64, u32)> = Vec::new();
    let mut best_phi = f64::INFINITY;
    for_each_connected(&d, |mask, cut, vol| {
        if mask == full {
            return;
        }
        let denom = vol.min(total - vol);
        if denom <= 0.0 {
            return;
        }
        let phi = scale * cut.max(0.0) / denom;
        // keep near-ties; the exact comparison happens after recomputation
        if phi <= best_phi * (1.0 + 1e-9) {
            best_phi = best_phi.min(phi);
            cands.push((phi, mask));
        }
    });
    let mut best: Option<TemporalCommunity> = None;
    for (phi, mask) in cands {
        if phi > best_phi * (1.0 + 1e-9) {
            continue;
        }
        let nodes = mask_nodes(mask);
        let exact = ag.conductance(&nodes, cfg)?;
        let c = TemporalCommunity::new(nodes, ag.interval(), exact);
        if best.as_ref().is_none_or(|b| c.rank_cmp(b).is_lt()) {
            best = Some(c);
        }
    }
    Ok(best)
}

/// Global lowest-conductance temporal community by exhaustive enumeration.
/// Ties break by `(phi, |C|, nodes, start, end)`.
pub fn brute_force_best(g: &TemporalGraph, cfg: &NormalizationConfig) -> Result<TemporalCommunity> {
    let n = g.node_count();
    let t_len = g.timeline_len();
    if n > MAX_BRUTE_NODES || t_len > MAX_BRUTE_TIMESTAMPS {
        return Err(Error::TooLarge(format!(
            "brute force supports n <= {MAX_BRUTE_NODES} and T <= {MAX_BRUTE_TIMESTAMPS}, got n = {n}, T = {t_len}"
        )));
    }
    if n < 2 {
        return Err(Error::invalid("need at least two nodes"));
    }
    let per: Vec<Option<TemporalCommunity>> = Interval::all(t_len)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|iv| best_in_interval(&g.aggregate(iv)?, cfg))
        .collect::<Result<_>>()?;
    per.into_iter()
        .flatten()
        .min_by(|a, b| a.rank_cmp(b))
        .ok_or_else(|| Error::invalid("no community with finite conductance"))
}

/// Sweep from every node with positive volume in every interval; best result.
pub fn exh_baseline(g: &TemporalGraph, cfg: &NormalizationConfig, walk: &WalkParams) -> Result<TemporalCommunity> {
    let work = Interval::count(g.timeline_len()).saturating_mul(g.node_count());
    if work > MAX_EXH_WALKS {
        return Err(Error::TooLarge(format!("{work} walks exceed the limit of {MAX_EXH_WALKS}")));
    }
    let per: Vec<Option<TemporalCommunity>> = Interval::all(g.timeline_len())
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|iv| {
            let ag = g.aggregate(iv)?;
            let mut best: Option<TemporalCommunity> = None;
            for u in ag.support() {
                match refine_seeds(&ag, &[(u, 1)], cfg, walk) {
                    Ok(r) => {
                        if best.as_ref().is_none_or(|b| r.community.rank_cmp(b).is_lt()) {
                            best = Some(r.community);
                        }
                    }
                    Err(Error::NoConnectedPrefix) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    per.into_iter()
        .flatten()
        .min_by(|a, b| a.rank_cmp(b))
        .ok_or_else(|| Error::invalid("no community with finite conductance"))
}
