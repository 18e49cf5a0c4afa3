//! Locality-sensitive hashing of weighted temporal neighborhoods.
//!
//! A signature combines `r` consistent weighted samples of the neighborhood
//! `N_u^t = {v: w(u,v,t)} + {u: vol(u,t)}` with one pivot hash of `t`. Entries
//! whose signatures agree in some band land in a common bucket.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Interval, TemporalGraph};
use crate::pruning::PruneVerdict;

/// Weighted set as `(key, weight)` pairs with distinct keys.
pub type WeightedSet = [(usize, f64)];

/// `sum min / sum max` over the union of keys.
pub fn weighted_jaccard(a: &WeightedSet, b: &WeightedSet) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::invalid("weighted Jaccard of two empty sets"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by_key(|&(k, _)| k);
    b.sort_by_key(|&(k, _)| k);
    let (mut i, mut j) = (0, 0);
    let (mut lo, mut hi) = (0.0, 0.0);
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map_or(usize::MAX, |e| e.0);
        let kb = b.get(j).map_or(usize::MAX, |e| e.0);
        match ka.cmp(&kb) {
            Ordering::Less => {
                hi += a[i].1;
                i += 1;
            }
            Ordering::Greater => {
                hi += b[j].1;
                j += 1;
            }
            Ordering::Equal => {
                lo += a[i].1.min(b[j].1);
                hi += a[i].1.max(b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    Ok(if hi > 0.0 { lo / hi } else { 0.0 })
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives an independent seed from a parent seed and a list of tags.
pub(crate) fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Uniform in `(0, 1)`.
fn unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `r` independent consistent weighted samplers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMinHasher {
    seeds: Vec<u64>,
}

impl WeightedMinHasher {
    pub fn new(r: usize, seed: u64) -> Self {
        WeightedMinHasher { seeds: (0..r as u64).map(|i| derive_seed(seed, &[0x6d68, i])).collect() }
    }

    pub fn rows(&self) -> usize {
        self.seeds.len()
    }

    /// One sample per function, packed as `key << 32 | level`.
    pub fn hash(&self, set: &WeightedSet) -> Vec<u64> {
        self.seeds.iter().map(|&s| icws(s, set)).collect()
    }
}

/// Improved consistent weighted sampling of `set` under function seed `seed`.
fn icws(seed: u64, set: &WeightedSet) -> u64 {
    let mut best = f64::INFINITY;
    let mut out = u64::MAX;
    for &(key, w) in set {
        if w <= 0.0 {
            continue;
        }
        let mut state = splitmix64(seed ^ splitmix64(key as u64));
        let mut draw = || {
            state = splitmix64(state);
            unit(state)
        };
        let r = -(draw() * draw()).ln();
        let c = -(draw() * draw()).ln();
        let beta = draw();
        let level = (w.ln() / r + beta).floor();
        let y = (r * (level - beta)).exp();
        let a = c / (y * r.exp());
        if a < best {
            best = a;
            out = (key as u64) << 32 | (level as i64 as i32 as u32) as u64;
        }
    }
    out
}

/// `k` sorted pivots drawn uniformly from `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalPivotHasher {
    pivots: Vec<f64>,
}

impl TemporalPivotHasher {
    pub fn new<R: Rng>(k: usize, t_len: usize, rng: &mut R) -> Self {
        let mut pivots: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * t_len as f64).collect();
        pivots.sort_by(f64::total_cmp);
        TemporalPivotHasher { pivots }
    }

    pub fn from_pivots(mut pivots: Vec<f64>) -> Self {
        pivots.sort_by(f64::total_cmp);
        TemporalPivotHasher { pivots }
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    /// 1-based index of the first pivot at or after `t`; `k + 1` if none.
    pub fn hash(&self, t: f64) -> usize {
        self.pivots.partition_point(|&p| p < t) + 1
    }
}

/// Pivot count maximizing the chance that a period of duration `delta` is
/// bracketed by two consecutive pivots: `max(2, floor(2T / delta))`.
pub fn optimal_pivots(delta: usize, t_len: usize) -> Result<usize> {
    if delta == 0 || delta > t_len {
        return Err(Error::invalid(format!("period {delta} outside [1, {t_len}]")));
    }
    Ok((2 * t_len / delta).max(2))
}

/// Geometric scale ladder `1, 2, 4, ...` up to `T / 2` (at least `{1}`).
pub fn scale_ladder(t_len: usize) -> Vec<usize> {
    let mut out = vec![1];
    while out.last().unwrap() * 2 <= t_len / 2 {
        out.push(out.last().unwrap() * 2);
    }
    out
}

/// Joint signature within one band.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompositeSignature {
    pub band: u32,
    pub minhash: Vec<u64>,
    pub pivot: u32,
}

impl CompositeSignature {
    /// Bits needed by [`pack`](Self::pack) for `k` pivots and `n` nodes.
    pub fn packed_bits(k: usize, n: usize, r: usize) -> u32 {
        let states = (k as f64 + 1.0).log2() + r as f64 * (n as f64).log2();
        states.ceil().max(0.0) as u32
    }

    /// Mixed-radix encoding of the pivot index and the sampled keys. The
    /// quantized levels are dropped; they only split buckets further.
    pub fn pack(&self, k: usize, n: usize) -> Option<u128> {
        let mut acc = (self.pivot as u128).checked_sub(1)?;
        if acc > k as u128 {
            return None;
        }
        for &h in &self.minhash {
            let key = (h >> 32) as u128;
            if key >= n as u128 {
                return None;
            }
            acc = acc.checked_mul(n as u128)?.checked_add(key)?;
        }
        Some(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BucketKey {
    pub scale: usize,
    pub signature: CompositeSignature,
    /// Index of the piece after a capacity split, 0 otherwise.
    pub part: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub key: BucketKey,
    /// `(node, timestamp)` entries sorted by node then timestamp.
    pub entries: Vec<(usize, usize)>,
}

impl Bucket {
    pub fn new(key: BucketKey, mut entries: Vec<(usize, usize)>) -> Self {
        entries.sort_unstable();
        entries.dedup();
        Bucket { key, entries }
    }

    /// `[min t, max t]` over the entries.
    pub fn span(&self) -> Interval {
        let lo = self.entries.iter().map(|e| e.1).min().unwrap_or(0);
        let hi = self.entries.iter().map(|e| e.1).max().unwrap_or(0);
        Interval { start: lo, end: hi }
    }

    pub fn distinct_nodes(&self) -> usize {
        let mut c = 0;
        for (i, e) in self.entries.iter().enumerate() {
            if i == 0 || self.entries[i - 1].0 != e.0 {
                c += 1;
            }
        }
        c
    }

    pub fn distinct_timestamps(&self) -> usize {
        let mut ts: Vec<usize> = self.entries.iter().map(|e| e.1).collect();
        ts.sort_unstable();
        ts.dedup();
        ts.len()
    }

    /// `|entries| / (|nodes| * |timestamps|)`, in `(0, 1]`.
    pub fn fill_factor(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.entries.len() as f64 / (self.distinct_nodes() * self.distinct_timestamps()) as f64
    }

    /// `(node, occurrences)` sorted by node.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &(u, _) in &self.entries {
            match out.last_mut() {
                Some((v, c)) if *v == u => *c += 1,
                _ => out.push((u, 1)),
            }
        }
        out
    }
}

/// Processing order: fill factor descending, size descending, key ascending.
pub fn bucket_order(a: &Bucket, b: &Bucket) -> Ordering {
    b.fill_factor()
        .total_cmp(&a.fill_factor())
        .then(b.entries.len().cmp(&a.entries.len()))
        .then_with(|| a.key.cmp(&b.key))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashConfig {
    pub rows: usize,
    pub bands: usize,
    pub seed: u64,
    /// Buckets above this many entries are split at the timestamp median.
    pub capacity: usize,
    /// Scale ladder; `None` uses [`scale_ladder`].
    pub scales: Option<Vec<usize>>,
}

impl Default for HashConfig {
    fn default() -> Self {
        HashConfig { rows: 3, bands: 4, seed: 0, capacity: 4096, scales: None }
    }
}

impl HashConfig {
    fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.bands == 0 {
            return Err(Error::invalid("rows and bands must be positive"));
        }
        if self.capacity < 2 {
            return Err(Error::invalid("bucket capacity must be at least 2"));
        }
        Ok(())
    }
}

/// Timestamps within distance `s` of some interval marked eligible by `covered`.
fn eligible_timestamps(covered: &[bool], s: usize) -> Vec<usize> {
    let t_len = covered.len();
    let mut last: Option<usize> = None;
    let mut near = vec![false; t_len];
    for t in 0..t_len {
        if covered[t] {
            last = Some(t);
        }
        if last.is_some_and(|l| t - l <= s) {
            near[t] = true;
        }
    }
    last = None;
    for t in (0..t_len).rev() {
        if covered[t] {
            last = Some(t);
        }
        if last.is_some_and(|l| l - t <= s) {
            near[t] = true;
        }
    }
    (0..t_len).filter(|&t| near[t]).collect()
}

/// Timestamps covered by some interval that is not pruned.
pub fn unpruned_coverage(t_len: usize, verdicts: &[PruneVerdict]) -> Vec<bool> {
    let mut diff = vec![0i64; t_len + 1];
    for v in verdicts.iter().filter(|v| !v.status.is_pruned()) {
        diff[v.interval.start] += 1;
        diff[v.interval.end + 1] -= 1;
    }
    let mut acc = 0;
    (0..t_len)
        .map(|t| {
            acc += diff[t];
            acc > 0
        })
        .collect()
}

/// Neighborhoods `N_u^t` of every node with positive volume at `t`.
fn snapshot_neighborhoods(g: &TemporalGraph, t: usize) -> Vec<Vec<(usize, f64)>> {
    let n = g.node_count();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (e, w) in g.snapshot(t) {
        let (u, v) = g.edges()[e];
        rows[u].push((v, w));
        rows[v].push((u, w));
    }
    for (u, row) in rows.iter_mut().enumerate() {
        if row.is_empty() {
            continue;
        }
        let vol: f64 = row.iter().map(|e| e.1).sum();
        row.push((u, vol));
        row.sort_by_key(|e| e.0);
    }
    rows
}

/// Hashes every eligible `(u, t)` at every scale and returns the buckets with
/// at least two distinct nodes, in processing order.
pub fn hash_all(g: &TemporalGraph, coverage: &[bool], cfg: &HashConfig) -> Result<Vec<Bucket>> {
    cfg.validate()?;
    let t_len = g.timeline_len();
    if coverage.len() != t_len {
        return Err(Error::invalid("coverage length differs from the timeline"));
    }
    let scales = cfg.scales.clone().unwrap_or_else(|| scale_ladder(t_len));
    if scales.iter().any(|&s| s == 0) {
        return Err(Error::invalid("scales must be positive"));
    }
    let eligible: Vec<Vec<usize>> = scales.iter().map(|&s| eligible_timestamps(coverage, s)).collect();
    let mut needed = vec![false; t_len];
    for ts in &eligible {
        for &t in ts {
            needed[t] = true;
        }
    }
    if !needed.iter().any(|&b| b) {
        return Ok(Vec::new());
    }

    let hashers: Vec<WeightedMinHasher> =
        (0..cfg.bands as u64).map(|b| WeightedMinHasher::new(cfg.rows, derive_seed(cfg.seed, &[1, b]))).collect();

    // minhashes[t][u] = per-band sample vectors, shared by all scales
    let minhashes: Vec<Vec<Option<Vec<Vec<u64>>>>> = (0..t_len)
        .into_par_iter()
        .map(|t| {
            if !needed[t] {
                return Vec::new();
            }
            snapshot_neighborhoods(g, t)
                .into_iter()
                .map(|nb| (!nb.is_empty()).then(|| hashers.iter().map(|h| h.hash(&nb)).collect()))
                .collect()
        })
        .collect();

    let mut table: BTreeMap<BucketKey, Vec<(usize, usize)>> = BTreeMap::new();
    for (si, &s) in scales.iter().enumerate() {
        let k = optimal_pivots((2 * s).min(t_len), t_len)?;
        for band in 0..cfg.bands {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[2, s as u64, band as u64]));
            let ph = TemporalPivotHasher::new(k, t_len, &mut rng);
            for &t in &eligible[si] {
                let pivot = ph.hash(t as f64) as u32;
                for (u, mh) in minhashes[t].iter().enumerate() {
                    let Some(mh) = mh else { continue };
                    let signature = CompositeSignature { band: band as u32, minhash: mh[band].clone(), pivot };
                    table.entry(BucketKey { scale: s, signature, part: 0 }).or_default().push((u, t));
                }
            }
        }
    }

    let mut buckets = Vec::new();
    for (key, entries) in table {
        for b in split_to_capacity(Bucket::new(key, entries), cfg.capacity) {
            if b.distinct_nodes() >= 2 {
                buckets.push(b);
            }
        }
    }
    buckets.sort_by(bucket_order);
    Ok(buckets)
}

/// Splits at the timestamp median until every piece holds at most `cap` entries.
pub fn split_to_capacity(bucket: Bucket, cap: usize) -> Vec<Bucket> {
    let mut done = Vec::new();
    let mut todo = vec![bucket];
    while let Some(b) = todo.pop() {
        if b.entries.len() <= cap {
            done.push(b);
            continue;
        }
        let mut by_time = b.entries.clone();
        by_time.sort_unstable_by_key(|&(u, t)| (t, u));
        let mid = by_time.len() / 2;
        let (lo, hi) = by_time.split_at(mid);
        // heap numbering keeps piece ids unique
        let base = b.key.part.max(1) * 2;
        let mk = |part: u32, e: &[(usize, usize)]| {
            Bucket::new(BucketKey { part, ..b.key.clone() }, e.to_vec())
        };
        todo.push(mk(base + 1, hi));
        todo.push(mk(base, lo));
    }
    done.sort_by(|a, b| a.key.cmp(&b.key));
    done
}
