//! Separated and reaching source sets, cut enumeration, strong partitions
//! and the min-cut value of a linear target function.

use crate::error::{Error, Result};
use crate::field::rank_over_prime_field;
use crate::function::LinearSpec;
use crate::graph::Network;
use crate::sets::{EdgeSet, SourceSet};
use crate::Limits;

/// A cut set together with its source sets `I`, `K` and `J = K \ I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutContext {
    pub cut: EdgeSet,
    /// `I_C`: sources with no path to the sink once the cut is deleted.
    pub separated: SourceSet,
    /// `K_C`: sources with a path to the tail of some cut edge.
    pub reaching: SourceSet,
    /// `J_C = K_C \ I_C`.
    pub residual: SourceSet,
}

impl CutContext {
    /// `None` when `cut` separates no source.
    pub fn new(net: &Network, cut: EdgeSet) -> Option<Self> {
        let separated = separated_sources(net, cut);
        if separated.is_empty() {
            return None;
        }
        let reaching = reaching_sources(net, cut);
        Some(CutContext {
            cut,
            separated,
            reaching,
            residual: reaching.difference(separated),
        })
    }

    pub fn is_global(&self, net: &Network) -> bool {
        self.separated == net.all_sources()
    }
}

pub fn separated_sources(net: &Network, cut: EdgeSet) -> SourceSet {
    let alive = net.reaching_sink_without(cut);
    (0..net.source_count())
        .filter(|&pos| !alive[net.source_node(pos)])
        .collect()
}

pub fn reaching_sources(net: &Network, cut: EdgeSet) -> SourceSet {
    cut.iter().fold(SourceSet::EMPTY, |acc, e| {
        acc.union(net.sources_reaching(net.edge(e).tail))
    })
}

/// Edge indices sorted by id.
fn edges_by_id(net: &Network) -> Vec<usize> {
    let mut order: Vec<usize> = (0..net.edge_count()).collect();
    order.sort_by(|&a, &b| net.edge_id(a).cmp(net.edge_id(b)));
    order
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All cut sets with at most `max_size` edges, ordered by size and then by
/// the sorted tuple of edge ids.
pub fn enumerate_cuts(net: &Network, max_size: Option<usize>, limits: &Limits) -> Result<Vec<CutContext>> {
    let m = net.edge_count();
    let max_size = max_size.unwrap_or(m).min(m);
    let subsets: u128 = (0..=max_size).map(|j| binomial(m, j)).sum();
    let allowed = 1u128 << limits.max_cut_edges.min(64);
    if subsets > allowed {
        return Err(Error::LimitExceeded {
            limit: "cut enumeration subsets",
            required: subsets,
            allowed,
        });
    }
    let sorted = edges_by_id(net);
    let mut cuts = Vec::new();
    for size in 1..=max_size {
        // Combinations of positions in `sorted`, in lexicographic order.
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let set: EdgeSet = pick.iter().map(|&p| sorted[p]).collect();
            if let Some(ctx) = CutContext::new(net, set) {
                cuts.push(ctx);
            }
            let Some(i) = (0..size).rev().find(|&i| pick[i] < m - size + i) else {
                break;
            };
            pick[i] += 1;
            for j in i + 1..size {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    Ok(cuts)
}

/// A partition of a cut into blocks whose separated sets are nonempty and
/// pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongPartition {
    pub blocks: Vec<EdgeSet>,
    /// `I_{C_l}` for each block.
    pub block_sources: Vec<SourceSet>,
    /// `L = I_C` minus the union of the block sets.
    pub residual: SourceSet,
}

impl StrongPartition {
    pub fn trivial(ctx: &CutContext) -> Self {
        StrongPartition {
            blocks: vec![ctx.cut],
            block_sources: vec![ctx.separated],
            residual: SourceSet::EMPTY,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn block_ids(&self, net: &Network) -> Vec<Vec<String>> {
        self.blocks.iter().map(|&b| net.edge_ids(b)).collect()
    }
}

/// Every strong partition of the cut. Blocks are ordered by their smallest
/// edge id and partitions by comparing their block id lists.
pub fn enumerate_strong_partitions(net: &Network, ctx: &CutContext, limits: &Limits) -> Result<Vec<StrongPartition>> {
    let mut edges: Vec<usize> = ctx.cut.iter().collect();
    edges.sort_by(|&a, &b| net.edge_id(a).cmp(net.edge_id(b)));
    let max_blocks = limits.max_blocks.unwrap_or(usize::MAX).min(ctx.separated.len()).max(1);

    let mut search = PartitionSearch {
        net,
        edges: &edges,
        max_blocks,
        steps: 0,
        max_steps: limits.max_partition_steps,
        blocks: Vec::new(),
        found: Vec::new(),
    };
    search.extend(0)?;

    let mut found = search.found;
    let separated = ctx.separated;
    let mut partitions: Vec<(Vec<Vec<String>>, StrongPartition)> = found
        .drain(..)
        .map(|blocks| {
            let block_sources: Vec<SourceSet> = blocks.iter().map(|&b| separated_sources(net, b)).collect();
            let covered = block_sources.iter().fold(SourceSet::EMPTY, |acc, &s| acc.union(s));
            let sp = StrongPartition {
                blocks,
                block_sources,
                residual: separated.difference(covered),
            };
            (sp.block_ids(net), sp)
        })
        .collect();
    partitions.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(partitions.into_iter().map(|(_, sp)| sp).collect())
}

struct PartitionSearch<'a> {
    net: &'a Network,
    edges: &'a [usize],
    max_blocks: usize,
    steps: usize,
    max_steps: usize,
    blocks: Vec<EdgeSet>,
    found: Vec<Vec<EdgeSet>>,
}

impl PartitionSearch<'_> {
    fn pairwise_disjoint(&self) -> bool {
        let sets: Vec<SourceSet> = self.blocks.iter().map(|&b| separated_sources(self.net, b)).collect();
        sets.iter()
            .enumerate()
            .all(|(i, a)| sets[i + 1..].iter().all(|b| a.is_disjoint(*b)))
    }

    fn extend(&mut self, next: usize) -> Result<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Error::LimitExceeded {
                limit: "strong partition search steps",
                required: self.steps as u128,
                allowed: self.max_steps as u128,
            });
        }
        // Separated sets only grow as edges join a block, so an overlap
        // can never be repaired.
        if !self.pairwise_disjoint() {
            return Ok(());
        }
        if next == self.edges.len() {
            let all_nonempty = self.blocks.iter().all(|&b| !separated_sources(self.net, b).is_empty());
            if all_nonempty {
                self.found.push(self.blocks.clone());
            }
            return Ok(());
        }
        let e = self.edges[next];
        for i in 0..self.blocks.len() {
            self.blocks[i].insert(e);
            self.extend(next + 1)?;
            self.blocks[i] = self.blocks[i].difference(EdgeSet::singleton(e));
        }
        if self.blocks.len() < self.max_blocks {
            self.blocks.push(EdgeSet::singleton(e));
            self.extend(next + 1)?;
            self.blocks.pop();
        }
        Ok(())
    }
}

/// `|C| / rank` attained by the minimizing cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMinCut {
    pub cut: EdgeSet,
    pub size: usize,
    pub rank: usize,
}

impl LinearMinCut {
    pub fn value(&self) -> f64 {
        self.size as f64 / self.rank as f64
    }
}

/// `min_C |C| / rank([T_i : i in I_C])`. Cuts of rank 0 are skipped; ties
/// go to the first cut in enumeration order.
pub fn min_cut_linear(net: &Network, spec: &LinearSpec, limits: &Limits) -> Result<LinearMinCut> {
    spec.validate()?;
    if spec.columns() != net.source_count() {
        return Err(Error::ShapeMismatch(format!(
            "linear map has {} columns but the network has {} sources",
            spec.columns(),
            net.source_count()
        )));
    }
    let mut best: Option<LinearMinCut> = None;
    for ctx in enumerate_cuts(net, None, limits)? {
        let cols: Vec<Vec<u32>> = ctx.separated.iter().map(|i| spec.column(i)).collect();
        let rank = rank_over_prime_field(&cols, spec.q)?;
        if rank == 0 {
            continue;
        }
        let size = ctx.cut.len();
        let better = match &best {
            None => true,
            Some(b) => size * b.rank < b.size * rank,
        };
        if better {
            best = Some(LinearMinCut {
                cut: ctx.cut,
                size,
                rank,
            });
        }
    }
    best.ok_or(Error::NoConstrainingCut)
}
