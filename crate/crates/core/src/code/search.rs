//! Depth-first search over all `(k, n)` codes on a network.
//!
//! Edges are assigned in topological order and each table is enumerated as
//! a mixed-radix counter with its first entry most significant, so the
//! first code found is the same on every run. With pruning enabled, a
//! branch is cut as soon as some cut set whose edges are all assigned maps
//! two inputs that must be told apart to the same words.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::cut::enumerate_cuts;
use crate::equivalence::{ec_partition, Assignment};
use crate::error::{Error, Result};
use crate::function::{checked_space, decode_mixed_radix, TargetFunction};
use crate::graph::Network;
use crate::sets::{EdgeSet, SourceSet};
use crate::Limits;

use super::{check_function, column_indices, expected_outputs, matrix_count, Decoder, LocalFunction, NetworkCode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub timeout: Option<Duration>,
    pub max_candidates: Option<u64>,
    pub prune: bool,
    /// Refuse searches whose raw candidate count exceeds `2^max_space_log2`.
    pub max_space_log2: f64,
    pub limits: Limits,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            timeout: None,
            max_candidates: None,
            prune: true,
            max_space_log2: 40.0,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Deadline,
    CandidateLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(NetworkCode),
    /// No code exists at this `(k, n)`.
    Exhausted,
    Stopped(StopReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    /// Partial assignments visited.
    pub nodes: u64,
    /// Complete codes tested against the sink.
    pub candidates: u64,
}

fn domain_sizes(net: &Network, k: usize, n: usize) -> Vec<usize> {
    let q = net.alphabet_size();
    (0..net.edge_count())
        .map(|e| {
            let tail = net.edge(e).tail;
            if net.source_position(tail).is_some() {
                q.saturating_pow(k as u32)
            } else {
                q.saturating_pow(n as u32)
                    .saturating_pow(net.in_edges(tail).len() as u32)
            }
        })
        .collect()
}

/// `log2` of the number of codes at `(k, n)` before pruning.
pub fn search_space_log2(net: &Network, k: usize, n: usize) -> f64 {
    let bits_per_entry = n as f64 * (net.alphabet_size() as f64).log2();
    domain_sizes(net, k, n).iter().map(|&d| d as f64 * bits_per_entry).sum()
}

/// Samples `(matrix, group, class)` for one cut: inputs with the same group
/// agree outside the separated sources, and differing classes must reach
/// the cut with differing words.
struct CutCheck {
    edges: Vec<usize>,
    samples: Vec<(usize, u32, u64)>,
}

fn build_checks(
    net: &Network,
    f: &TargetFunction,
    k: usize,
    words_per: usize,
    matrices: usize,
    position: &[usize],
    limits: &Limits,
) -> Result<Vec<Vec<CutCheck>>> {
    let q = net.alphabet_size();
    let s = net.source_count();
    let mut checks: Vec<Vec<CutCheck>> = (0..net.edge_count()).map(|_| Vec::new()).collect();
    let mut kept: HashMap<(SourceSet, SourceSet), Vec<EdgeSet>> = HashMap::new();
    let col_space = q.pow(k as u32);

    for ctx in enumerate_cuts(net, None, limits)? {
        let (i, j) = (ctx.separated, ctx.residual);
        // A cut containing a checked cut with the same I and J adds nothing.
        let family = kept.entry((i, j)).or_default();
        if family.iter().any(|c| c.is_subset(ctx.cut)) {
            continue;
        }
        family.push(ctx.cut);
        let edges: Vec<usize> = ctx.cut.iter().collect();
        if (words_per as u64).checked_pow(edges.len() as u32).is_none() {
            continue;
        }

        let j_count = q.pow(j.len() as u32);
        let partitions = (0..j_count)
            .map(|idx| ec_partition(f, i, j, &Assignment::from_index(j, q, idx), limits))
            .collect::<Result<Vec<_>>>()?;
        let max_classes = partitions.iter().map(|p| p.class_count()).max().unwrap_or(1) as u64;
        if max_classes.checked_pow(k as u32).is_none() {
            continue;
        }
        let i_members = i.to_vec();
        let j_members = j.to_vec();
        let reach = i.union(j);

        let mut samples = Vec::new();
        for m in 0..matrices {
            let cols = decode_mixed_radix(m, col_space, s);
            if (0..s).any(|src| !reach.contains(src) && cols[src] != 0) {
                continue;
            }
            let columns: Vec<Vec<u32>> = cols.iter().map(|&c| decode_mixed_radix(c as usize, q, k)).collect();
            let mut group = 0u32;
            let mut class = 0u64;
            for t in 0..k {
                let row: Vec<usize> = columns.iter().map(|c| c[t] as usize).collect();
                let a_j = j_members.iter().fold(0usize, |acc, &src| acc * q + row[src]);
                let b = i_members.iter().fold(0usize, |acc, &src| acc * q + row[src]);
                group = group * j_count as u32 + a_j as u32;
                class = class * max_classes + partitions[a_j].class_of(b) as u64;
            }
            samples.push((m, group, class));
        }
        // Skip cuts that constrain nothing: one class per group.
        let mut seen: HashMap<u32, u64> = HashMap::new();
        let informative = samples.iter().any(|&(_, g, c)| *seen.entry(g).or_insert(c) != c);
        if !informative {
            continue;
        }
        let last = *edges.iter().max_by_key(|&&e| position[e]).expect("cuts are nonempty");
        checks[last].push(CutCheck { edges, samples });
    }
    Ok(checks)
}

struct Searcher {
    order: Vec<usize>,
    inputs: Vec<Vec<usize>>,
    source_pos: Vec<Option<usize>>,
    dom: Vec<usize>,
    words_per: usize,
    matrices: usize,
    cols: Vec<Vec<usize>>,
    expected: Vec<u32>,
    checks: Vec<Vec<CutCheck>>,
    sink_inputs: Vec<usize>,
    tables: Vec<Vec<u32>>,
    words: Vec<Vec<u32>>,
    scratch: Vec<(u32, u64, u64)>,
    decoder: Vec<u32>,
    deadline: Option<Instant>,
    max_candidates: Option<u64>,
    nodes: u64,
    candidates: u64,
    stop: Option<StopReason>,
}

const UNSET: u32 = u32::MAX;

impl Searcher {
    fn passes(&mut self, e: usize) -> bool {
        let w = self.words_per as u64;
        for check in &self.checks[e] {
            self.scratch.clear();
            for &(m, group, class) in &check.samples {
                let gc = check
                    .edges
                    .iter()
                    .fold(0u64, |acc, &c| acc * w + self.words[c][m] as u64);
                self.scratch.push((group, gc, class));
            }
            self.scratch.sort_unstable();
            if self
                .scratch
                .windows(2)
                .any(|p| p[0].0 == p[1].0 && p[0].1 == p[1].1 && p[0].2 != p[1].2)
            {
                return false;
            }
        }
        true
    }

    fn decodable(&mut self) -> bool {
        let w = self.words_per;
        let mut ok = true;
        let mut touched = Vec::with_capacity(self.matrices);
        for m in 0..self.matrices {
            let idx = self
                .sink_inputs
                .iter()
                .fold(0usize, |acc, &c| acc * w + self.words[c][m] as usize);
            let want = self.expected[m];
            if self.decoder[idx] == UNSET {
                self.decoder[idx] = want;
                touched.push(idx);
            } else if self.decoder[idx] != want {
                ok = false;
                break;
            }
        }
        if !ok {
            for idx in touched {
                self.decoder[idx] = UNSET;
            }
        }
        ok
    }

    fn should_stop(&mut self) -> bool {
        if self.stop.is_some() {
            return true;
        }
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.stop = Some(StopReason::Deadline);
                }
            }
        }
        self.stop.is_some()
    }

    /// Returns true once a code is found.
    fn dfs(&mut self, pos: usize, prune: bool) -> bool {
        let e = self.order[pos];
        let index: Vec<usize> = match self.source_pos[e] {
            Some(src) => self.cols.iter().map(|c| c[src]).collect(),
            None => (0..self.matrices)
                .map(|m| {
                    self.inputs[e]
                        .iter()
                        .fold(0usize, |acc, &i| acc * self.words_per + self.words[i][m] as usize)
                })
                .collect(),
        };
        let last = pos + 1 == self.order.len();
        let top = (self.words_per - 1) as u32;
        self.tables[e] = vec![0; self.dom[e]];
        loop {
            self.nodes += 1;
            if self.should_stop() {
                return false;
            }
            let table = &self.tables[e];
            self.words[e] = index.iter().map(|&i| table[i]).collect();
            if !prune || self.passes(e) {
                if last {
                    self.candidates += 1;
                    if self.decodable() {
                        return true;
                    }
                    if self.max_candidates.is_some_and(|cap| self.candidates >= cap) {
                        self.stop = Some(StopReason::CandidateLimit);
                        return false;
                    }
                } else if self.dfs(pos + 1, prune) {
                    return true;
                } else if self.stop.is_some() {
                    return false;
                }
            }
            // Advance the table as a counter, last entry least significant.
            let table = &mut self.tables[e];
            let Some(i) = (0..table.len()).rev().find(|&i| table[i] < top) else {
                return false;
            };
            table[i] += 1;
            for x in table[i + 1..].iter_mut() {
                *x = 0;
            }
        }
    }
}

/// Searches for a `(k, n)` code computing `f`. The first code in canonical
/// order is returned together with a decoder on the sink's in-edges.
pub fn search_code(
    net: &Network,
    f: &TargetFunction,
    k: usize,
    n: usize,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    check_function(net, f)?;
    if k == 0 || n == 0 {
        return Err(Error::ShapeMismatch("k and n must be at least 1".into()));
    }
    let space = search_space_log2(net, k, n);
    if space > opts.max_space_log2 {
        return Err(Error::LimitExceeded {
            limit: "search space (log2 of candidate count)",
            required: space.ceil() as u128,
            allowed: opts.max_space_log2.floor() as u128,
        });
    }
    let limits = &opts.limits;
    let q = net.alphabet_size();
    let s = net.source_count();
    let words_per = checked_space(q, n, u32::MAX as usize, "message alphabet A^n")?;
    let matrices = matrix_count(q, k, s, limits)?;
    let sink_inputs = net.in_edges(net.sink()).to_vec();
    let decoder_size = checked_space(words_per, sink_inputs.len(), limits.max_table, "decoder table size")?;
    let order = net.edge_order()?;
    let mut position = vec![0; net.edge_count()];
    for (p, &e) in order.iter().enumerate() {
        position[e] = p;
    }
    let checks = if opts.prune {
        build_checks(net, f, k, words_per, matrices, &position, limits)?
    } else {
        (0..net.edge_count()).map(|_| Vec::new()).collect()
    };

    let mut searcher = Searcher {
        inputs: (0..net.edge_count())
            .map(|e| net.in_edges(net.edge(e).tail).to_vec())
            .collect(),
        source_pos: (0..net.edge_count())
            .map(|e| net.source_position(net.edge(e).tail))
            .collect(),
        dom: domain_sizes(net, k, n),
        words_per,
        matrices,
        cols: column_indices(q, k, s, matrices),
        expected: expected_outputs(f, k, matrices)?,
        checks,
        sink_inputs,
        tables: vec![Vec::new(); net.edge_count()],
        words: vec![Vec::new(); net.edge_count()],
        scratch: Vec::new(),
        decoder: vec![UNSET; decoder_size],
        deadline: opts.timeout.map(|t| Instant::now() + t),
        max_candidates: opts.max_candidates,
        nodes: 0,
        candidates: 0,
        stop: None,
        order,
    };

    let found = if searcher.order.is_empty() {
        false
    } else {
        searcher.dfs(0, opts.prune)
    };
    let outcome = if found {
        SearchOutcome::Found(assemble(net, f, k, n, &searcher))
    } else if let Some(reason) = searcher.stop {
        SearchOutcome::Stopped(reason)
    } else {
        SearchOutcome::Exhausted
    };
    Ok(SearchResult {
        outcome,
        nodes: searcher.nodes,
        candidates: searcher.candidates,
    })
}

fn assemble(net: &Network, f: &TargetFunction, k: usize, n: usize, searcher: &Searcher) -> NetworkCode {
    let local = (0..net.edge_count())
        .map(|e| {
            let table = searcher.tables[e].clone();
            match searcher.source_pos[e] {
                Some(_) => LocalFunction::Source { table },
                None => LocalFunction::Relay {
                    inputs: searcher.inputs[e].clone(),
                    table,
                },
            }
        })
        .collect();
    let o = f.output_size();
    let decoder = Decoder {
        inputs: searcher.sink_inputs.clone(),
        table: searcher
            .decoder
            .iter()
            .map(|&v| decode_mixed_radix(if v == UNSET { 0 } else { v as usize }, o, k))
            .collect(),
    };
    NetworkCode {
        k,
        n,
        q: net.alphabet_size(),
        local,
        decoder: Some(decoder),
    }
}
