//! Multi-scale eigenvalue precomputation, composite and group lower bounds, and
//! interval pruning against an incumbent conductance.
//!
//! The table stores `lambda2` for aligned blocks of length `l^i`. Any interval
//! decomposes greedily into such blocks; the composite bound combines the block
//! eigenvalues weighted by the smallest per-node volume share of each block.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{eta, Interval, NormalizationConfig, TemporalGraph};
use crate::spectral::{lambda2, EigResult};

/// Absolute slack added to the incumbent before a bound may prune.
pub const PRUNE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub interval: Interval,
    pub level: usize,
    /// `None` when the eigensolver failed on this block.
    pub eig: Option<EigResult>,
}

impl Block {
    /// Eigenvalue used in bounds: the Ritz value minus its residual, floored at 0.
    pub fn certified_lambda2(&self) -> Option<f64> {
        self.eig.map(|e| (e.lambda2 - e.residual).max(0.0))
    }
}

#[derive(Debug, Clone)]
pub struct BoundsTable {
    t_len: usize,
    n: usize,
    scale_base: usize,
    /// Block length of every level.
    lengths: Vec<usize>,
    /// `slots[level][j]` is the block id of the `j`-th aligned block of `level`.
    slots: Vec<Vec<usize>>,
    blocks: Vec<Block>,
    /// `node_prefix[t * n + u]` is the volume of `u` over `[0, t)`.
    node_prefix: Vec<f64>,
}

/// Builds the table: one eigensolve per distinct aligned block.
pub fn precompute(g: &TemporalGraph, scale_base: usize, tol: f64) -> Result<BoundsTable> {
    if scale_base < 2 {
        return Err(Error::invalid(format!("scale base must be at least 2, got {scale_base}")));
    }
    if g.node_count() < 2 {
        return Err(Error::invalid("bounds need at least two nodes"));
    }
    let t_len = g.timeline_len();
    let n = g.node_count();

    let mut lengths = vec![1usize];
    while *lengths.last().unwrap() < t_len {
        lengths.push(lengths.last().unwrap().saturating_mul(scale_base));
    }

    let mut intervals: Vec<(Interval, usize)> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    let mut slots = Vec::with_capacity(lengths.len());
    for (level, &len) in lengths.iter().enumerate() {
        let mut row = Vec::new();
        let mut start = 0;
        while start < t_len {
            let iv = Interval { start, end: (start + len - 1).min(t_len - 1) };
            let id = *seen.entry(iv).or_insert_with(|| {
                intervals.push((iv, level));
                intervals.len() - 1
            });
            row.push(id);
            start += len;
        }
        slots.push(row);
    }

    let blocks = intervals
        .par_iter()
        .map(|&(iv, level)| {
            let ag = g.aggregate(iv)?;
            let eig = match lambda2(&ag, tol) {
                Ok(e) => Some(e),
                Err(Error::EigenNotConverged { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(Block { interval: iv, level, eig })
        })
        .collect::<Result<Vec<_>>>()?;

    let vols = g.snapshot_volumes();
    let mut node_prefix = vec![0.0; n * (t_len + 1)];
    for t in 0..t_len {
        let (done, rest) = node_prefix.split_at_mut((t + 1) * n);
        let prev = &done[t * n..];
        for ((next, p), v) in rest[..n].iter_mut().zip(prev).zip(&vols[t * n..(t + 1) * n]) {
            *next = p + v;
        }
    }

    Ok(BoundsTable { t_len, n, scale_base, lengths, slots, blocks, node_prefix })
}

impl BoundsTable {
    pub fn timeline_len(&self) -> usize {
        self.t_len
    }

    pub fn scale_base(&self) -> usize {
        self.scale_base
    }

    /// Distinct precomputed blocks, ordered by level then start.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn level_count(&self) -> usize {
        self.lengths.len()
    }

    /// Volume of node `u` over `iv`.
    pub fn volume(&self, u: usize, iv: Interval) -> f64 {
        self.node_prefix[(iv.end + 1) * self.n + u] - self.node_prefix[iv.start * self.n + u]
    }

    fn prefix_row(&self, t: usize) -> &[f64] {
        &self.node_prefix[t * self.n..(t + 1) * self.n]
    }

    /// Block id at `level` starting at aligned position `pos`.
    fn slot(&self, level: usize, pos: usize) -> usize {
        self.slots[level][pos / self.lengths[level]]
    }

    /// Greedy decomposition of `iv` into aligned blocks, largest first.
    pub fn decompose(&self, iv: Interval) -> Vec<Interval> {
        self.decompose_ids(iv).into_iter().map(|id| self.blocks[id].interval).collect()
    }

    fn decompose_ids(&self, iv: Interval) -> Vec<usize> {
        let mut out = Vec::new();
        let mut pos = iv.start;
        while pos <= iv.end {
            let mut level = 0;
            for l in (0..self.lengths.len()).rev() {
                let len = self.lengths[l];
                if pos.is_multiple_of(len) && (pos + len - 1).min(self.t_len - 1) <= iv.end {
                    level = l;
                    break;
                }
            }
            let id = self.slot(level, pos);
            out.push(id);
            pos = self.blocks[id].interval.end + 1;
        }
        out
    }

    /// Replaces blocks without an eigenvalue by their children, recursively.
    /// Unusable single-timestamp blocks are dropped (they contribute zero).
    fn usable(&self, ids: Vec<usize>) -> Vec<usize> {
        let mut out = Vec::with_capacity(ids.len());
        let mut stack: Vec<usize> = ids.into_iter().rev().collect();
        while let Some(id) = stack.pop() {
            let b = &self.blocks[id];
            if b.eig.is_some() {
                out.push(id);
                continue;
            }
            if b.level == 0 {
                continue;
            }
            let child = b.level - 1;
            let step = self.lengths[child];
            let mut pos = b.interval.start;
            let mut kids = Vec::new();
            while pos <= b.interval.end {
                kids.push(self.slot(child, pos));
                pos += step;
            }
            stack.extend(kids.into_iter().rev());
        }
        out
    }

    /// `sum_b min_u vol(u, b) / vol(u, denom) * lambda2(b)` over `ids`, taking
    /// the minimum over nodes with positive volume in `denom`.
    fn weighted_sum(&self, ids: &[usize], denom: Interval) -> f64 {
        let (lo, hi) = (self.prefix_row(denom.start), self.prefix_row(denom.end + 1));
        // reciprocal denominators, zero for nodes without volume in `denom`
        let inv: Vec<f64> = hi.iter().zip(lo).map(|(h, l)| if h - l > 0.0 { 1.0 / (h - l) } else { 0.0 }).collect();
        if inv.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        let mut sum = 0.0;
        for &id in ids {
            let b = &self.blocks[id];
            let lam = b.certified_lambda2().unwrap_or(0.0);
            if lam <= 0.0 {
                continue;
            }
            let (blo, bhi) = (self.prefix_row(b.interval.start), self.prefix_row(b.interval.end + 1));
            let mut share = f64::INFINITY;
            for ((h, l), &r) in bhi.iter().zip(blo).zip(&inv) {
                if r > 0.0 {
                    share = share.min((h - l) * r);
                }
            }
            sum += share * lam;
        }
        sum
    }

    fn check(&self, iv: Interval) -> Result<()> {
        if iv.end >= self.t_len {
            return Err(Error::invalid(format!("interval {iv} exceeds timeline of length {}", self.t_len)));
        }
        Ok(())
    }

    /// Composite lower bound on the `lambda2` of the interval's aggregated graph.
    pub fn composite_lambda_bound(&self, iv: Interval) -> Result<f64> {
        self.check(iv)?;
        let ids = self.usable(self.decompose_ids(iv));
        Ok(self.weighted_sum(&ids, iv))
    }

    /// `eta(iv)` times [`composite_lambda_bound`](Self::composite_lambda_bound).
    pub fn composite_bound(&self, iv: Interval, cfg: &NormalizationConfig) -> Result<f64> {
        Ok(eta(iv, cfg) * self.composite_lambda_bound(iv)?)
    }

    /// Lower bound on the composite bound of every member of `grp`.
    pub fn group_bound(&self, grp: &PruningGroup, cfg: &NormalizationConfig) -> Result<f64> {
        let whole = Interval::new(grp.start, grp.group_end)?;
        let prefix = Interval::new(grp.start, grp.prefix_end)?;
        self.check(whole)?;
        if !whole.contains_interval(&prefix) {
            return Err(Error::invalid(format!("group prefix {prefix} outside {whole}")));
        }
        let ids = self.usable(self.decompose_ids(prefix));
        Ok(eta(whole, cfg) * self.weighted_sum(&ids, whole))
    }
}

impl BoundsTable {
    /// Splits a multi-member group at a block boundary of the greedy
    /// decomposition of its longest member, as close to the middle of its
    /// member range as possible. `None` when no boundary falls inside the
    /// member range.
    pub fn split_group(&self, grp: &PruningGroup) -> Option<(PruningGroup, PruningGroup)> {
        if grp.member_count() < 2 {
            return None;
        }
        let whole = Interval { start: grp.start, end: grp.group_end };
        let mid = (grp.prefix_end + 1 + grp.group_end) / 2;
        let q = self
            .decompose_ids(whole)
            .into_iter()
            .map(|id| self.blocks[id].interval.end + 1)
            .filter(|&q| q > grp.prefix_end && q <= grp.group_end)
            .min_by_key(|&q| (q.abs_diff(mid), q))?;
        Some((
            PruningGroup { start: grp.start, prefix_end: grp.prefix_end, group_end: q - 1 },
            PruningGroup { start: grp.start, prefix_end: q, group_end: grp.group_end },
        ))
    }
}

/// Intervals `[start, t*]` for every `t*` in `[prefix_end, group_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PruningGroup {
    pub start: usize,
    pub prefix_end: usize,
    pub group_end: usize,
}

impl PruningGroup {
    pub fn members(&self) -> impl Iterator<Item = Interval> + '_ {
        (self.prefix_end..=self.group_end).map(move |e| Interval { start: self.start, end: e })
    }

    pub fn member_count(&self) -> usize {
        self.group_end - self.prefix_end + 1
    }
}

/// Covers every interval of a length-`t_len` timeline by exactly one group.
///
/// For each start the ladder descends from the last timestamp. The prefix end
/// of each group is a block boundary of the greedy decomposition of the group,
/// chosen as the earliest one keeping the span ratio at least `beta`; the next
/// group ends just before it.
pub fn build_groups(t_len: usize, scale_base: usize, beta: f64) -> Result<Vec<PruningGroup>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid(format!("beta must lie in (0, 1), got {beta}")));
    }
    if scale_base < 2 {
        return Err(Error::invalid(format!("scale base must be at least 2, got {scale_base}")));
    }
    let mut lengths = vec![1usize];
    while *lengths.last().unwrap() < t_len {
        lengths.push(lengths.last().unwrap().saturating_mul(scale_base));
    }
    let mut groups = Vec::new();
    for t in 0..t_len {
        let mut hi = t_len - 1;
        loop {
            if hi == t {
                groups.push(PruningGroup { start: t, prefix_end: t, group_end: t });
                break;
            }
            let need = beta * (hi - t) as f64;
            let mut pos = t;
            let prefix_end = loop {
                let len = lengths
                    .iter()
                    .rev()
                    .copied()
                    .find(|&len| pos % len == 0 && (pos + len - 1).min(t_len - 1) <= hi)
                    .unwrap_or(1);
                let end = (pos + len - 1).min(t_len - 1);
                if (end - t) as f64 >= need {
                    break end;
                }
                pos = end + 1;
            };
            groups.push(PruningGroup { start: t, prefix_end, group_end: hi });
            if prefix_end == t {
                break;
            }
            hi = prefix_end - 1;
        }
    }
    Ok(groups)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneStatus {
    GroupPruned,
    CompositePruned,
    Unpruned,
    Probed,
}

impl PruneStatus {
    pub fn is_pruned(self) -> bool {
        matches!(self, PruneStatus::GroupPruned | PruneStatus::CompositePruned)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PruneStatus::GroupPruned => "group-pruned",
            PruneStatus::CompositePruned => "composite-pruned",
            PruneStatus::Unpruned => "unpruned",
            PruneStatus::Probed => "probed",
        }
    }
}

impl fmt::Display for PruneStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome for one interval. `bound` is on the conductance scale, i.e. the
/// normalized composite (or group) bound divided by two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneVerdict {
    pub interval: Interval,
    pub status: PruneStatus,
    pub bound: f64,
}

/// Whether a conductance-scale bound excludes the interval given incumbent `phi_star`.
pub fn prunes(bound: f64, phi_star: f64) -> bool {
    phi_star > 0.0 && bound > phi_star + PRUNE_SLACK
}

/// Verdicts for every interval, sorted by `(start, end)`. With `use_groups`
/// each group is tested first and only surviving groups are expanded.
pub fn prune_all(
    bt: &BoundsTable,
    groups: &[PruningGroup],
    phi_star: f64,
    cfg: &NormalizationConfig,
    use_groups: bool,
) -> Result<Vec<PruneVerdict>> {
    if phi_star.is_nan() || phi_star.is_infinite() {
        return Err(Error::invalid(format!("incumbent conductance must be finite, got {phi_star}")));
    }
    let per_group = groups
        .par_iter()
        .map(|grp| {
            let mut out = Vec::with_capacity(grp.member_count());
            if use_groups && phi_star > 0.0 {
                judge_group(bt, *grp, phi_star, cfg, &mut out)?;
            } else {
                judge_members(bt, grp, phi_star, cfg, &mut out)?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<PruneVerdict>>>>()?;
    let mut out: Vec<PruneVerdict> = per_group.into_iter().flatten().collect();
    out.sort_by_key(|v| v.interval);
    Ok(out)
}

fn judge_members(
    bt: &BoundsTable,
    grp: &PruningGroup,
    phi_star: f64,
    cfg: &NormalizationConfig,
    out: &mut Vec<PruneVerdict>,
) -> Result<()> {
    for iv in grp.members() {
        let b = bt.composite_bound(iv, cfg)? / 2.0;
        let status = if prunes(b, phi_star) { PruneStatus::CompositePruned } else { PruneStatus::Unpruned };
        out.push(PruneVerdict { interval: iv, status, bound: b });
    }
    Ok(())
}

/// Tests the group bound; on failure splits the group and recurses, down to
/// single intervals whose group bound is their composite bound.
fn judge_group(
    bt: &BoundsTable,
    grp: PruningGroup,
    phi_star: f64,
    cfg: &NormalizationConfig,
    out: &mut Vec<PruneVerdict>,
) -> Result<()> {
    let gb = bt.group_bound(&grp, cfg)? / 2.0;
    let single = grp.member_count() == 1;
    if prunes(gb, phi_star) {
        let status = if single { PruneStatus::CompositePruned } else { PruneStatus::GroupPruned };
        out.extend(grp.members().map(|iv| PruneVerdict { interval: iv, status, bound: gb }));
        return Ok(());
    }
    match bt.split_group(&grp) {
        Some((a, b)) => {
            judge_group(bt, a, phi_star, cfg, out)?;
            judge_group(bt, b, phi_star, cfg, out)
        }
        None if single => {
            out.push(PruneVerdict { interval: grp.members().next().unwrap(), status: PruneStatus::Unpruned, bound: gb });
            Ok(())
        }
        None => judge_members(bt, &grp, phi_star, cfg, out),
    }
}

/// Fraction of verdicts that are pruned.
pub fn pruned_fraction(verdicts: &[PruneVerdict]) -> f64 {
    if verdicts.is_empty() {
        return 0.0;
    }
    verdicts.iter().filter(|v| v.status.is_pruned()).count() as f64 / verdicts.len() as f64
}

/// Writes verdicts as CSV `start,length,status,bound`.
pub fn write_heatmap<W: std::io::Write>(verdicts: &[PruneVerdict], mut out: W) -> std::io::Result<()> {
    writeln!(out, "start,length,status,bound")?;
    for v in verdicts {
        writeln!(out, "{},{},{},{}", v.interval.start, v.interval.len(), v.status, v.bound)?;
    }
    Ok(())
}
