//! Temporal graph storage, interval aggregation and the temporal conductance
//! objective.
//!
//! A [`TemporalGraph`] holds an undirected edge set and, for every edge, a
//! sparse series of positive weights over the timeline `0..T`. Everything
//! downstream works on an [`AggregatedGraph`]: the weighted graph whose edge
//! weights are the sums of the per-timestamp weights over an [`Interval`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed range of timestamps `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return Err(Error::invalid(format!("interval start {start} exceeds end {end}")));
        }
        Ok(Interval { start, end })
    }

    /// Builds an interval and checks that it lies inside a timeline of length `t_len`.
    pub fn within(start: usize, end: usize, t_len: usize) -> Result<Self> {
        let iv = Interval::new(start, end)?;
        if end >= t_len {
            return Err(Error::invalid(format!("interval {iv} exceeds timeline of length {t_len}")));
        }
        Ok(iv)
    }

    pub fn single(t: usize) -> Self {
        Interval { start: t, end: t }
    }

    /// Number of timestamps covered, `end - start + 1`.
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    /// Elapsed time `end - start`; zero for single-timestamp intervals.
    pub fn span(&self) -> usize {
        self.end - self.start
    }

    pub fn contains(&self, t: usize) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let s = self.start.max(other.start);
        let e = self.end.min(other.end);
        (s <= e).then_some(Interval { start: s, end: e })
    }

    /// Jaccard overlap of the two timestamp sets.
    pub fn overlap(&self, other: &Interval) -> f64 {
        let inter = self.intersection(other).map_or(0, |iv| iv.len());
        let union = self.len() + other.len() - inter;
        inter as f64 / union as f64
    }

    /// All intervals of a timeline of length `t_len`, ordered by start then end.
    pub fn all(t_len: usize) -> impl Iterator<Item = Interval> {
        (0..t_len).flat_map(move |s| (s..t_len).map(move |e| Interval { start: s, end: e }))
    }

    /// Number of intervals in a timeline of length `t_len`.
    pub fn count(t_len: usize) -> usize {
        t_len * (t_len + 1) / 2
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// Power-law temporal normalization `eta = max(1, t'-t)^(-alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConfig {
    pub alpha: f64,
}

impl NormalizationConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be finite and non-negative, got {alpha}")));
        }
        Ok(NormalizationConfig { alpha })
    }

    pub fn unnormalized() -> Self {
        NormalizationConfig { alpha: 0.0 }
    }

    pub fn eta(&self, iv: Interval) -> f64 {
        eta(iv, self)
    }
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig::unnormalized()
    }
}

/// The normalization factor of an interval. Single-timestamp intervals use a
/// span of one so the factor stays finite.
pub fn eta(iv: Interval, cfg: &NormalizationConfig) -> f64 {
    if cfg.alpha == 0.0 {
        return 1.0;
    }
    (iv.span().max(1) as f64).powf(-cfg.alpha)
}

/// Undirected edge-weighted temporal graph. Immutable once built.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    labels: Vec<String>,
    t_len: usize,
    edges: Vec<(usize, usize)>,
    // per-edge weight series, CSR over `edges`, sorted by time
    series_offsets: Vec<usize>,
    series_times: Vec<usize>,
    series_weights: Vec<f64>,
    // time-major view: for each timestamp, (edge, weight)
    time_offsets: Vec<usize>,
    time_edges: Vec<usize>,
    time_weights: Vec<f64>,
    incident: Vec<Vec<(usize, usize)>>,
}

impl TemporalGraph {
    pub fn builder(t_len: usize) -> GraphBuilder {
        GraphBuilder::new(t_len)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Timeline length `T`; timestamps are `0..T`.
    pub fn timeline_len(&self) -> usize {
        self.t_len
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Topological neighbors of `u` as `(neighbor, edge index)`.
    pub fn incident(&self, u: usize) -> &[(usize, usize)] {
        &self.incident[u]
    }

    /// Non-zero `(timestamp, weight)` entries of edge `e`.
    pub fn edge_series(&self, e: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.series_offsets[e]..self.series_offsets[e + 1];
        self.series_times[r.clone()].iter().copied().zip(self.series_weights[r].iter().copied())
    }

    /// Non-zero `(edge index, weight)` entries at timestamp `t`.
    pub fn snapshot(&self, t: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.time_offsets[t]..self.time_offsets[t + 1];
        self.time_edges[r.clone()].iter().copied().zip(self.time_weights[r].iter().copied())
    }

    /// Weight `w(u, v, t)`, zero when absent.
    pub fn weight(&self, u: usize, v: usize, t: usize) -> f64 {
        let Some(&(_, e)) = self.incident[u].iter().find(|&&(x, _)| x == v) else {
            return 0.0;
        };
        let r = self.series_offsets[e]..self.series_offsets[e + 1];
        let times = &self.series_times[r.clone()];
        match times.binary_search(&t) {
            Ok(i) => self.series_weights[r.start + i],
            Err(_) => 0.0,
        }
    }

    /// Aggregate weight of edge `e` over `iv`, summed in timestamp order.
    pub fn edge_aggregate(&self, e: usize, iv: Interval) -> f64 {
        let r = self.series_offsets[e]..self.series_offsets[e + 1];
        let times = &self.series_times[r.clone()];
        let lo = times.partition_point(|&t| t < iv.start);
        let hi = times.partition_point(|&t| t <= iv.end);
        self.series_weights[r.start + lo..r.start + hi].iter().sum()
    }

    /// Per-node volumes at every timestamp, laid out as `vols[t * n + u]`.
    pub fn snapshot_volumes(&self) -> Vec<f64> {
        let n = self.node_count();
        let mut vols = vec![0.0; n * self.t_len];
        for t in 0..self.t_len {
            for (e, w) in self.snapshot(t) {
                let (u, v) = self.edges[e];
                vols[t * n + u] += w;
                vols[t * n + v] += w;
            }
        }
        vols
    }

    pub fn check_interval(&self, iv: Interval) -> Result<()> {
        if iv.end >= self.t_len {
            return Err(Error::invalid(format!(
                "interval {iv} exceeds timeline of length {}",
                self.t_len
            )));
        }
        Ok(())
    }

    /// Aggregated graph over `iv`. Edges with zero aggregate weight are omitted.
    pub fn aggregate(&self, iv: Interval) -> Result<AggregatedGraph> {
        self.check_interval(iv)?;
        let n = self.node_count();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let w = self.edge_aggregate(e, iv);
            if w > 0.0 {
                rows[u].push((v, w));
                rows[v].push((u, w));
            }
        }
        Ok(AggregatedGraph::from_rows(iv, rows))
    }
}

/// Incremental constructor for [`TemporalGraph`]. Duplicate `(u, v, t)`
/// records are merged by summing their weights.
#[derive(Debug)]
pub struct GraphBuilder {
    t_len: usize,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    cells: HashMap<(usize, usize), HashMap<usize, f64>>,
}

impl GraphBuilder {
    pub fn new(t_len: usize) -> Self {
        GraphBuilder { t_len, labels: Vec::new(), index: HashMap::new(), cells: HashMap::new() }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Interns a node label and returns its dense index.
    pub fn node(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        i
    }

    /// Adds nodes labelled `"0"`, `"1"`, ... until there are `n` nodes.
    pub fn with_numbered_nodes(mut self, n: usize) -> Self {
        for i in self.labels.len()..n {
            let mut label = i.to_string();
            while self.index.contains_key(&label) {
                label.insert(0, '_');
            }
            self.node(&label);
        }
        self
    }

    pub fn add(&mut self, u: &str, v: &str, t: usize, w: f64) -> Result<()> {
        let ui = self.node(u);
        let vi = self.node(v);
        self.add_indexed(ui, vi, t, w)
    }

    pub fn add_indexed(&mut self, u: usize, v: usize, t: usize, w: f64) -> Result<()> {
        if u == v {
            return Err(Error::invalid(format!("self-loop on node {}", self.labels[u])));
        }
        if u >= self.labels.len() || v >= self.labels.len() {
            return Err(Error::invalid(format!("node index out of range ({u}, {v})")));
        }
        if t >= self.t_len {
            return Err(Error::invalid(format!("timestamp {t} outside timeline of length {}", self.t_len)));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::invalid(format!("weight must be positive and finite, got {w}")));
        }
        let key = if u < v { (u, v) } else { (v, u) };
        *self.cells.entry(key).or_default().entry(t).or_insert(0.0) += w;
        Ok(())
    }

    pub fn build(self) -> TemporalGraph {
        let n = self.labels.len();
        let t_len = self.t_len;
        let mut cells: Vec<((usize, usize), Vec<(usize, f64)>)> = self
            .cells
            .into_iter()
            .map(|(k, m)| {
                let mut s: Vec<(usize, f64)> = m.into_iter().collect();
                s.sort_by_key(|&(t, _)| t);
                (k, s)
            })
            .collect();
        cells.sort_by_key(|&(k, _)| k);

        let mut edges = Vec::with_capacity(cells.len());
        let mut series_offsets = vec![0];
        let mut series_times = Vec::new();
        let mut series_weights = Vec::new();
        let mut per_time: Vec<Vec<(usize, f64)>> = vec![Vec::new(); t_len];
        let mut incident = vec![Vec::new(); n];
        for (e, ((u, v), series)) in cells.into_iter().enumerate() {
            edges.push((u, v));
            incident[u].push((v, e));
            incident[v].push((u, e));
            for (t, w) in series {
                series_times.push(t);
                series_weights.push(w);
                per_time[t].push((e, w));
            }
            series_offsets.push(series_times.len());
        }
        for list in &mut incident {
            list.sort_unstable();
        }
        let mut time_offsets = vec![0];
        let mut time_edges = Vec::with_capacity(series_times.len());
        let mut time_weights = Vec::with_capacity(series_times.len());
        for snap in per_time {
            for (e, w) in snap {
                time_edges.push(e);
                time_weights.push(w);
            }
            time_offsets.push(time_edges.len());
        }
        TemporalGraph {
            labels: self.labels,
            t_len,
            edges,
            series_offsets,
            series_times,
            series_weights,
            time_offsets,
            time_edges,
            time_weights,
            incident,
        }
    }
}

/// Weighted graph of interval-aggregated weights with cached node volumes.
#[derive(Debug, Clone)]
pub struct AggregatedGraph {
    interval: Interval,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    volumes: Vec<f64>,
}

impl AggregatedGraph {
    /// Builds from symmetric adjacency rows. Rows are sorted by neighbor.
    pub fn from_rows(interval: Interval, mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        let mut volumes = Vec::with_capacity(rows.len());
        for row in &mut rows {
            row.sort_by_key(|&(v, _)| v);
            let mut vol = 0.0;
            for &(v, w) in row.iter() {
                neighbors.push(v);
                weights.push(w);
                vol += w;
            }
            volumes.push(vol);
            offsets.push(neighbors.len());
        }
        AggregatedGraph { interval, offsets, neighbors, weights, volumes }
    }

    /// Builds from an undirected weighted edge list; repeated pairs are summed.
    pub fn from_edges(interval: Interval, n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
        for &(u, v, w) in edges {
            if u == v || u >= n || v >= n || !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("bad edge ({u}, {v}, {w})")));
            }
            *cells.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let mut rows = vec![Vec::new(); n];
        let mut keys: Vec<_> = cells.into_iter().collect();
        keys.sort_by_key(|&(k, _)| k);
        for ((u, v), w) in keys {
            rows[u].push((v, w));
            rows[v].push((u, w));
        }
        Ok(AggregatedGraph::from_rows(interval, rows))
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn node_count(&self) -> usize {
        self.volumes.len()
    }

    /// Number of undirected edges with positive aggregate weight.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn volume(&self, u: usize) -> f64 {
        self.volumes[u]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.neighbors[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let r = self.offsets[u]..self.offsets[u + 1];
        match self.neighbors[r.clone()].binary_search(&v) {
            Ok(i) => self.weights[r.start + i],
            Err(_) => 0.0,
        }
    }

    /// Nodes with positive volume.
    pub fn support(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&u| self.volumes[u] > 0.0).collect()
    }

    /// Connected-component label for every node; isolated nodes get their own.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.node_count();
        let mut ds = DisjointSets::new(n);
        for u in 0..n {
            for (v, _) in self.neighbors(u) {
                ds.union(u, v);
            }
        }
        ds.labels()
    }

    /// Whether `members` (a membership mask) induces a connected subgraph.
    pub fn induces_connected(&self, members: &[bool]) -> bool {
        let Some(first) = members.iter().position(|&b| b) else {
            return false;
        };
        let mut seen = vec![false; members.len()];
        let mut stack = vec![first];
        seen[first] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for (v, _) in self.neighbors(u) {
                if members[v] && !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        reached == members.iter().filter(|&&b| b).count()
    }

    /// Membership mask of a node list, validating it as a nonempty proper subset.
    pub fn mask(&self, nodes: &[usize]) -> Result<Vec<bool>> {
        let n = self.node_count();
        let mut mask = vec![false; n];
        for &u in nodes {
            if u >= n {
                return Err(Error::invalid(format!("node {u} out of range")));
            }
            if mask[u] {
                return Err(Error::invalid(format!("node {u} listed twice")));
            }
            mask[u] = true;
        }
        if nodes.is_empty() || nodes.len() == n {
            return Err(Error::invalid("community must be a nonempty proper subset of the nodes"));
        }
        Ok(mask)
    }

    /// Total weight crossing between the mask and its complement.
    pub fn cut(&self, mask: &[bool]) -> f64 {
        let mut cut = 0.0;
        for u in (0..self.node_count()).filter(|&u| mask[u]) {
            for (v, w) in self.neighbors(u) {
                if !mask[v] {
                    cut += w;
                }
            }
        }
        cut
    }

    /// Volumes of the mask and of its complement.
    pub fn side_volumes(&self, mask: &[bool]) -> (f64, f64) {
        let mut inside = 0.0;
        let mut outside = 0.0;
        for (u, &vol) in self.volumes.iter().enumerate() {
            if mask[u] {
                inside += vol;
            } else {
                outside += vol;
            }
        }
        (inside, outside)
    }

    /// Temporal conductance of `nodes` on this aggregated graph. A zero
    /// smaller-side volume yields `f64::INFINITY`.
    pub fn conductance(&self, nodes: &[usize], cfg: &NormalizationConfig) -> Result<f64> {
        let mask = self.mask(nodes)?;
        Ok(self.conductance_mask(&mask, cfg))
    }

    pub(crate) fn conductance_mask(&self, mask: &[bool], cfg: &NormalizationConfig) -> f64 {
        let cut = self.cut(mask);
        let (inside, outside) = self.side_volumes(mask);
        conductance_ratio(cut, inside, outside, eta(self.interval, cfg))
    }
}

pub(crate) fn conductance_ratio(cut: f64, vol_in: f64, vol_out: f64, eta: f64) -> f64 {
    let denom = vol_in.min(vol_out);
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        eta * cut / denom
    }
}

/// Temporal conductance of node set `c` over `iv`.
pub fn conductance(
    g: &TemporalGraph,
    c: &[usize],
    iv: Interval,
    cfg: &NormalizationConfig,
) -> Result<f64> {
    let ag = g.aggregate(iv)?;
    ag.conductance(c, cfg)
}

/// A node set, its activity interval and its temporal conductance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalCommunity {
    pub nodes: Vec<usize>,
    pub interval: Interval,
    pub phi: f64,
}

impl TemporalCommunity {
    pub fn new(mut nodes: Vec<usize>, interval: Interval, phi: f64) -> Self {
        nodes.sort_unstable();
        TemporalCommunity { nodes, interval, phi }
    }

    /// Total order used for ranking: `(phi, |C|, nodes, start, end)`.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.phi
            .total_cmp(&other.phi)
            .then(self.nodes.len().cmp(&other.nodes.len()))
            .then_with(|| self.nodes.cmp(&other.nodes))
            .then(self.interval.start.cmp(&other.interval.start))
            .then(self.interval.end.cmp(&other.interval.end))
    }

    pub fn same_community(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.interval == other.interval
    }

    /// Jaccard similarity of the node sets.
    pub fn node_jaccard(&self, other: &[usize]) -> f64 {
        let a: std::collections::BTreeSet<_> = self.nodes.iter().collect();
        let b: std::collections::BTreeSet<_> = other.iter().collect();
        let inter = a.intersection(&b).count();
        let union = a.union(&b).count();
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    /// Dense component labels in order of first appearance.
    pub fn labels(&mut self) -> (usize, Vec<usize>) {
        let n = self.parent.len();
        let mut map = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut next = 0;
        for u in 0..n {
            let r = self.find(u);
            if map[r] == usize::MAX {
                map[r] = next;
                next += 1;
            }
            out[u] = map[r];
        }
        (next, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle4() -> TemporalGraph {
        let mut b = TemporalGraph::builder(1);
        for (u, v) in [("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")] {
            b.add(u, v, 0, 1.0).unwrap();
        }
        b.build()
    }

    #[test]
    fn eta_conventions() {
        let a0 = NormalizationConfig::new(0.0).unwrap();
        let a1 = NormalizationConfig::new(1.0).unwrap();
        assert_eq!(eta(Interval::new(0, 7).unwrap(), &a0), 1.0);
        assert_eq!(eta(Interval::new(2, 4).unwrap(), &a1), 0.5);
        assert_eq!(eta(Interval::new(3, 3).unwrap(), &a1), 1.0);
        assert!(NormalizationConfig::new(-0.1).is_err());
    }

    #[test]
    fn duplicate_records_merge() {
        let mut b = TemporalGraph::builder(1);
        b.add("a", "b", 0, 2.0).unwrap();
        b.add("b", "a", 0, 3.0).unwrap();
        let g = b.build();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1, 0), 5.0);
    }

    #[test]
    fn builder_rejects_invalid_records() {
        let mut b = TemporalGraph::builder(2);
        assert!(b.add("a", "a", 0, 1.0).is_err());
        assert!(b.add("a", "b", 2, 1.0).is_err());
        assert!(b.add("a", "b", 0, 0.0).is_err());
        assert!(b.add("a", "b", 0, -1.0).is_err());
    }

    #[test]
    fn aggregation_sums_interval() {
        let mut b = TemporalGraph::builder(4);
        b.add("u", "v", 1, 2.0).unwrap();
        b.add("u", "v", 2, 3.0).unwrap();
        b.add("u", "v", 3, 7.0).unwrap();
        let g = b.build();
        let ag = g.aggregate(Interval::new(1, 2).unwrap()).unwrap();
        assert_eq!(ag.weight(0, 1), 5.0);
        assert_eq!(ag.volumes(), &[5.0, 5.0]);
        let snap = g.aggregate(Interval::single(3)).unwrap();
        assert_eq!(snap.weight(1, 0), 7.0);
        let empty = g.aggregate(Interval::single(0)).unwrap();
        assert_eq!(empty.edge_count(), 0);
        assert!(g.aggregate(Interval::new(2, 4).unwrap()).is_err());
    }

    #[test]
    fn four_cycle_conductance() {
        let g = cycle4();
        let c = [g.node_index("1").unwrap(), g.node_index("2").unwrap()];
        let phi = conductance(&g, &c, Interval::single(0), &NormalizationConfig::default()).unwrap();
        assert_eq!(phi, 0.5);
    }

    #[test]
    fn conductance_argument_errors() {
        let g = cycle4();
        let cfg = NormalizationConfig::default();
        let iv = Interval::single(0);
        assert!(conductance(&g, &[], iv, &cfg).is_err());
        assert!(conductance(&g, &[0, 1, 2, 3], iv, &cfg).is_err());
        assert!(conductance(&g, &[0, 0], iv, &cfg).is_err());
    }

    #[test]
    fn zero_volume_side_is_infinite() {
        let mut b = TemporalGraph::builder(1).with_numbered_nodes(3);
        b.add_indexed(0, 1, 0, 1.0).unwrap();
        let g = b.build();
        let phi = conductance(&g, &[2], Interval::single(0), &NormalizationConfig::default()).unwrap();
        assert!(phi.is_infinite());
    }

    #[test]
    fn interval_overlap() {
        let a = Interval::new(0, 9).unwrap();
        let b = Interval::new(5, 14).unwrap();
        assert!((a.overlap(&b) - 5.0 / 15.0).abs() < 1e-15);
        assert_eq!(a.overlap(&a), 1.0);
        assert_eq!(Interval::all(4).count(), Interval::count(4));
    }
}
