//! Temporal edge-list text format.
//!
//! ```text
//! # comment
//! tgraph <n_nodes> <T>
//! <u> <v> <t> <w>
//! ```
//!
//! Node tokens are opaque strings. Repeated `(u, v, t)` records are summed.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{TemporalCommunity, TemporalGraph};

pub fn load(path: impl AsRef<Path>) -> Result<TemporalGraph> {
    let file = fs::File::open(path)?;
    parse(BufReader::new(file))
}

pub fn parse_str(text: &str) -> Result<TemporalGraph> {
    parse(text.as_bytes())
}

pub fn parse<R: Read>(reader: R) -> Result<TemporalGraph> {
    let reader = BufReader::new(reader);
    let mut header: Option<(usize, usize)> = None;
    let mut builder = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let perr = |message: String| Error::Parse { line: lineno, message };
        match header {
            None => {
                if fields.len() != 3 || fields[0] != "tgraph" {
                    return Err(perr("expected header `tgraph <n_nodes> <T>`".into()));
                }
                let n: usize = fields[1].parse().map_err(|_| perr(format!("bad node count `{}`", fields[1])))?;
                let t: usize = fields[2].parse().map_err(|_| perr(format!("bad timeline length `{}`", fields[2])))?;
                if t == 0 {
                    return Err(perr("timeline length must be positive".into()));
                }
                header = Some((n, t));
                builder = Some(TemporalGraph::builder(t));
            }
            Some((n, t_len)) => {
                if fields.len() != 4 {
                    return Err(perr(format!("expected `<u> <v> <t> <w>`, found {} fields", fields.len())));
                }
                let t: usize = fields[2].parse().map_err(|_| perr(format!("bad timestamp `{}`", fields[2])))?;
                let w: f64 = fields[3].parse().map_err(|_| perr(format!("bad weight `{}`", fields[3])))?;
                if t >= t_len {
                    return Err(perr(format!("timestamp {t} not below declared T={t_len}")));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(perr(format!("weight must be positive, got {w}")));
                }
                if fields[0] == fields[1] {
                    return Err(perr(format!("self-loop on `{}`", fields[0])));
                }
                let b = builder.as_mut().expect("builder exists after header");
                b.add(fields[0], fields[1], t, w).map_err(|e| perr(e.to_string()))?;
                if b.node_count() > n {
                    return Err(perr(format!("more than the declared {n} distinct nodes")));
                }
            }
        }
    }
    let (n, _) = header.ok_or(Error::Parse { line: 0, message: "missing `tgraph` header".into() })?;
    Ok(builder.expect("header seen").with_numbered_nodes(n).build())
}

/// Writes `g` in the edge-list format, one record per non-zero `(edge, t)`.
pub fn write<W: Write>(g: &TemporalGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "tgraph {} {}", g.node_count(), g.timeline_len())?;
    let mut line = String::new();
    for t in 0..g.timeline_len() {
        for (e, w) in g.snapshot(t) {
            let (u, v) = g.edges()[e];
            line.clear();
            let _ = writeln!(line, "{} {} {} {}", g.label(u), g.label(v), t, w);
            out.write_all(line.as_bytes())?;
        }
    }
    out.flush()
}

pub fn save(g: &TemporalGraph, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    write(g, io::BufWriter::new(file))?;
    Ok(())
}

/// Community with external node labels, as written to `communities.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityRecord {
    pub nodes: Vec<String>,
    pub t: usize,
    pub t_end: usize,
    pub phi: f64,
}

impl CommunityRecord {
    pub fn from_community(g: &TemporalGraph, c: &TemporalCommunity) -> Self {
        CommunityRecord {
            nodes: c.nodes.iter().map(|&u| g.label(u).to_string()).collect(),
            t: c.interval.start,
            t_end: c.interval.end,
            phi: c.phi,
        }
    }
}

/// Writes one JSON record per line, in the given order.
pub fn write_communities<W: Write>(g: &TemporalGraph, communities: &[TemporalCommunity], mut out: W) -> Result<()> {
    for c in communities {
        serde_json::to_writer(&mut out, &CommunityRecord::from_community(g, c))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Ground-truth sidecar written next to generated graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub nodes: Vec<String>,
    pub t: usize,
    pub t_end: usize,
}
