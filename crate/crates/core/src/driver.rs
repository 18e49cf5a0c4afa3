//! End-to-end search: precompute bounds, estimate an incumbent, prune
//! intervals, hash the surviving regions and refine buckets in fill-factor
//! order while the incumbent tightens.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AggregatedGraph, Interval, NormalizationConfig, TemporalCommunity, TemporalGraph};
use crate::pruning::{build_groups, precompute, prune_all, prunes, BoundsTable, PruneStatus, PruneVerdict};
use crate::refine::{polish, refine_seeds, WalkParams};
use crate::spectral::DEFAULT_TOLERANCE;
use crate::tlsh::{derive_seed, hash_all, unpruned_coverage, Bucket, HashConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub scale_base: usize,
    pub beta: f64,
    pub rows: usize,
    pub bands: usize,
    pub topk: usize,
    pub probes: usize,
    pub seed: u64,
    /// Worker threads; 0 uses one per core.
    pub threads: usize,
    pub walk: WalkParams,
    pub eig_tol: f64,
    pub bucket_capacity: usize,
    /// Test groups before member intervals.
    pub use_groups: bool,
    /// Buckets refined per incumbent snapshot.
    pub batch: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 0.2,
            scale_base: 2,
            beta: 0.5,
            rows: 3,
            bands: 4,
            topk: 10,
            probes: 5,
            seed: 0,
            threads: 0,
            walk: WalkParams::default(),
            eig_tol: DEFAULT_TOLERANCE,
            bucket_capacity: 4096,
            use_groups: true,
            batch: 64,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<NormalizationConfig> {
        let norm = NormalizationConfig::new(self.alpha)?;
        if self.scale_base < 2 {
            return Err(Error::invalid("scale base must be at least 2"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invalid("beta must lie in (0, 1)"));
        }
        if self.rows == 0 || self.bands == 0 || self.topk == 0 || self.batch == 0 {
            return Err(Error::invalid("rows, bands, topk and batch must be positive"));
        }
        if !(self.eig_tol > 0.0 && self.eig_tol.is_finite()) {
            return Err(Error::invalid("eigensolver tolerance must be positive"));
        }
        self.walk.validate()?;
        Ok(norm)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub precompute: f64,
    pub estimate: f64,
    pub prune: f64,
    pub hash: f64,
    pub refine: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkippedBucket {
    pub interval: Interval,
    /// Conductance-scale composite bound of the interval.
    pub bound: f64,
    /// Incumbent at the time of the decision.
    pub phi_star: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub eigensolves: usize,
    pub groups: usize,
    pub intervals: usize,
    pub pruned: usize,
    pub buckets: usize,
    pub refined: usize,
    pub cached: usize,
    pub skipped: usize,
    pub estimate_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionState {
    pub phi_star: f64,
    /// Best communities, ascending by `phi` with deterministic tie-break.
    pub communities: Vec<TemporalCommunity>,
    pub verdicts: Vec<PruneVerdict>,
    pub config: RunConfig,
    /// Incumbent value after the estimate and after every improvement.
    pub incumbent_history: Vec<f64>,
    pub skipped: Vec<SkippedBucket>,
    pub stats: RunStats,
    pub timings: PhaseTimings,
}

impl DetectionState {
    pub fn best(&self) -> Option<&TemporalCommunity> {
        self.communities.first()
    }

    pub fn pruned_fraction(&self) -> f64 {
        crate::pruning::pruned_fraction(&self.verdicts)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub phi_star: f64,
    pub community: TemporalCommunity,
    pub probes: Vec<Interval>,
}

/// Keeps the best `k` distinct communities.
#[derive(Debug, Clone)]
struct TopK {
    k: usize,
    items: Vec<TemporalCommunity>,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK { k, items: Vec::new() }
    }

    fn offer(&mut self, c: TemporalCommunity) {
        if self.items.iter().any(|x| x.same_community(&c)) {
            return;
        }
        let pos = self.items.partition_point(|x| x.rank_cmp(&c).is_lt());
        if pos < self.k {
            self.items.insert(pos, c);
            self.items.truncate(self.k);
        }
    }
}

/// Aggregated graphs keyed by interval, shared across refinements.
#[derive(Default)]
struct AggCache {
    map: HashMap<Interval, Arc<AggregatedGraph>>,
}

impl AggCache {
    const LIMIT: usize = 4096;

    fn ensure(&mut self, g: &TemporalGraph, ivs: &[Interval]) -> Result<()> {
        let mut missing: Vec<Interval> = ivs.iter().copied().filter(|iv| !self.map.contains_key(iv)).collect();
        missing.sort_unstable();
        missing.dedup();
        if self.map.len() + missing.len() > Self::LIMIT {
            self.map.clear();
            missing = ivs.to_vec();
            missing.sort_unstable();
            missing.dedup();
        }
        let built: Vec<(Interval, AggregatedGraph)> =
            missing.into_par_iter().map(|iv| Ok((iv, g.aggregate(iv)?))).collect::<Result<_>>()?;
        for (iv, ag) in built {
            self.map.insert(iv, Arc::new(ag));
        }
        Ok(())
    }

    fn get(&self, iv: Interval) -> Arc<AggregatedGraph> {
        Arc::clone(&self.map[&iv])
    }
}

const POLISH_ROUNDS: usize = 4;

type RefineKey = (Interval, Vec<(usize, usize)>);

/// Refines `buckets` in order, in batches that share one incumbent snapshot.
/// Buckets whose span is excluded by the composite bound are skipped.
#[allow(clippy::too_many_arguments)]
fn refine_buckets(
    g: &TemporalGraph,
    bt: &BoundsTable,
    buckets: &[Bucket],
    norm: &NormalizationConfig,
    cfg: &RunConfig,
    phi_star: &mut f64,
    top: &mut TopK,
    history: &mut Vec<f64>,
    skipped: &mut Vec<SkippedBucket>,
    probed: &mut Vec<Interval>,
    stats: &mut RunStats,
) -> Result<()> {
    let mut cache = AggCache::default();
    let mut done: HashMap<RefineKey, Option<TemporalCommunity>> = HashMap::new();
    for batch in buckets.chunks(cfg.batch) {
        let snapshot = *phi_star;
        let mut work: Vec<(usize, RefineKey)> = Vec::new();
        for (i, b) in batch.iter().enumerate() {
            let span = b.span();
            let bound = bt.composite_bound(span, norm)? / 2.0;
            if prunes(bound, snapshot) {
                skipped.push(SkippedBucket { interval: span, bound, phi_star: snapshot });
                continue;
            }
            work.push((i, (span, b.multiplicities())));
        }
        let fresh: Vec<RefineKey> = {
            let mut f: Vec<RefineKey> = work.iter().map(|(_, k)| k.clone()).filter(|k| !done.contains_key(k)).collect();
            f.sort();
            f.dedup();
            f
        };
        stats.cached += work.len() - fresh.len();
        let spans: Vec<Interval> = fresh.iter().map(|k| k.0).collect();
        cache.ensure(g, &spans)?;
        let results: Vec<Option<TemporalCommunity>> = fresh
            .par_iter()
            .map(|(span, mult)| match refine_seeds(&cache.get(*span), mult, norm, &cfg.walk) {
                Ok(r) => Ok(Some(polish(g, r.community, norm, &cfg.walk, POLISH_ROUNDS)?)),
                Err(Error::NoConnectedPrefix) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        stats.refined += fresh.len();
        for (k, r) in fresh.into_iter().zip(results) {
            probed.push(k.0);
            done.insert(k, r);
        }
        for (_, key) in &work {
            if let Some(c) = done[key].clone() {
                if c.phi < *phi_star {
                    *phi_star = c.phi;
                    history.push(c.phi);
                }
                top.offer(c);
            }
        }
    }
    Ok(())
}

/// Best sweep from a single seed on the aggregate of the whole timeline.
fn singleton_fallback(g: &TemporalGraph, norm: &NormalizationConfig, walk: &WalkParams) -> Result<TemporalCommunity> {
    let ag = g.aggregate(Interval { start: 0, end: g.timeline_len() - 1 })?;
    let found: Vec<Option<TemporalCommunity>> = ag
        .support()
        .into_par_iter()
        .map(|u| match refine_seeds(&ag, &[(u, 1)], norm, walk) {
            Ok(r) => Ok(Some(r.community)),
            Err(Error::NoConnectedPrefix) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    found
        .into_iter()
        .flatten()
        .min_by(|a, b| a.rank_cmp(b))
        .ok_or_else(|| Error::invalid("graph has no edges; no community exists"))
}

/// Initial incumbent from the precomputed blocks with the smallest spectral
/// bound: light hashing on each and refinement of its top bucket.
pub fn estimate_initial(g: &TemporalGraph, bt: &BoundsTable, cfg: &RunConfig) -> Result<Estimate> {
    let norm = cfg.validate()?;
    let mut cands: Vec<(f64, Interval)> = bt
        .blocks()
        .iter()
        .filter_map(|b| b.eig.map(|e| (norm.eta(b.interval) * e.lambda2 / 2.0, b.interval)))
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let probes: Vec<Interval> = cands.into_iter().take(cfg.probes).map(|c| c.1).collect();

    let found: Vec<Option<TemporalCommunity>> = probes
        .par_iter()
        .enumerate()
        .map(|(i, &iv)| {
            let mut coverage = vec![false; g.timeline_len()];
            coverage[iv.start..=iv.end].iter_mut().for_each(|c| *c = true);
            let hc = HashConfig {
                rows: 2,
                bands: 2,
                seed: derive_seed(cfg.seed, &[0xe5, i as u64]),
                capacity: cfg.bucket_capacity,
                scales: Some(vec![(iv.len() / 2).max(1)]),
            };
            let buckets = hash_all(g, &coverage, &hc)?;
            let Some(top) = buckets.first() else { return Ok(None) };
            let ag = g.aggregate(top.span())?;
            match refine_seeds(&ag, &top.multiplicities(), &norm, &cfg.walk) {
                Ok(r) => Ok(Some(polish(g, r.community, &norm, &cfg.walk, POLISH_ROUNDS)?)),
                Err(Error::NoConnectedPrefix) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let best = found.into_iter().flatten().min_by(|a, b| a.rank_cmp(b));
    let community = match best {
        Some(c) => c,
        None => singleton_fallback(g, &norm, &cfg.walk)?,
    };
    Ok(Estimate { phi_star: community.phi, community, probes })
}

/// Runs the whole search on a pool of `cfg.threads` workers.
pub fn detect(g: &TemporalGraph, cfg: &RunConfig) -> Result<DetectionState> {
    cfg.validate()?;
    if g.node_count() < 2 {
        return Err(Error::invalid("need at least two nodes"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| detect_inner(g, cfg))
}

fn detect_inner(g: &TemporalGraph, cfg: &RunConfig) -> Result<DetectionState> {
    let norm = cfg.validate()?;
    let started = Instant::now();
    let mut timings = PhaseTimings::default();
    let mut stats = RunStats::default();

    let clock = Instant::now();
    let bt = precompute(g, cfg.scale_base, cfg.eig_tol)?;
    timings.precompute = clock.elapsed().as_secs_f64();
    stats.eigensolves = bt.blocks().len();

    let clock = Instant::now();
    let est = estimate_initial(g, &bt, cfg)?;
    timings.estimate = clock.elapsed().as_secs_f64();
    let mut phi_star = est.phi_star;
    stats.estimate_phi = phi_star;
    let mut history = vec![phi_star];
    let mut top = TopK::new(cfg.topk);
    top.offer(est.community.clone());

    let clock = Instant::now();
    let groups = build_groups(g.timeline_len(), cfg.scale_base, cfg.beta)?;
    let mut verdicts = prune_all(&bt, &groups, phi_star, &norm, cfg.use_groups)?;
    timings.prune = clock.elapsed().as_secs_f64();
    stats.groups = groups.len();
    stats.intervals = verdicts.len();
    stats.pruned = verdicts.iter().filter(|v| v.status.is_pruned()).count();

    let clock = Instant::now();
    let coverage = unpruned_coverage(g.timeline_len(), &verdicts);
    let hc = HashConfig {
        rows: cfg.rows,
        bands: cfg.bands,
        seed: cfg.seed,
        capacity: cfg.bucket_capacity,
        scales: None,
    };
    let buckets = hash_all(g, &coverage, &hc)?;
    timings.hash = clock.elapsed().as_secs_f64();
    stats.buckets = buckets.len();

    let clock = Instant::now();
    let mut skipped = Vec::new();
    let mut probed = Vec::new();
    refine_buckets(
        g,
        &bt,
        &buckets,
        &norm,
        cfg,
        &mut phi_star,
        &mut top,
        &mut history,
        &mut skipped,
        &mut probed,
        &mut stats,
    )?;
    timings.refine = clock.elapsed().as_secs_f64();
    stats.skipped = skipped.len();

    probed.sort_unstable();
    probed.dedup();
    for v in verdicts.iter_mut() {
        if v.status == PruneStatus::Unpruned && probed.binary_search(&v.interval).is_ok() {
            v.status = PruneStatus::Probed;
        }
    }
    timings.total = started.elapsed().as_secs_f64();
    Ok(DetectionState {
        phi_star,
        communities: top.items,
        verdicts,
        config: cfg.clone(),
        incumbent_history: history,
        skipped,
        stats,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques(t_len: usize) -> TemporalGraph {
        let mut b = TemporalGraph::builder(t_len).with_numbered_nodes(8);
        for t in 0..t_len {
            for (base, w) in [(0, 3.0), (4, 3.0)] {
                for u in base..base + 4 {
                    for v in u + 1..base + 4 {
                        b.add_indexed(u, v, t, w).unwrap();
                    }
                }
            }
            b.add_indexed(3, 4, t, 0.5).unwrap();
        }
        b.build()
    }

    #[test]
    fn finds_a_clique() {
        let g = two_cliques(6);
        let cfg = RunConfig { threads: 2, ..RunConfig::default() };
        let st = detect(&g, &cfg).unwrap();
        let best = st.best().unwrap();
        assert!(best.nodes == vec![0, 1, 2, 3] || best.nodes == vec![4, 5, 6, 7]);
        assert_eq!(st.phi_star, best.phi);
        assert!(st.incumbent_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(st.verdicts.len(), Interval::count(6));
    }

    #[test]
    fn topk_dedups_and_orders() {
        let mut t = TopK::new(2);
        let c = |p: f64, s: usize| TemporalCommunity::new(vec![s], Interval::single(0), p);
        t.offer(c(0.5, 1));
        t.offer(c(0.5, 1));
        t.offer(c(0.2, 2));
        t.offer(c(0.9, 3));
        t.offer(c(0.1, 4));
        let phis: Vec<f64> = t.items.iter().map(|x| x.phi).collect();
        assert_eq!(phis, vec![0.1, 0.2]);
    }

    #[test]
    fn zero_probes_use_fallback() {
        let g = two_cliques(3);
        let cfg = RunConfig { probes: 0, ..RunConfig::default() };
        let bt = precompute(&g, 2, 1e-8).unwrap();
        let est = estimate_initial(&g, &bt, &cfg).unwrap();
        assert!(est.probes.is_empty());
        assert!(est.phi_star.is_finite());
        assert_eq!(est.community.interval, Interval::new(0, 2).unwrap());
    }
}
