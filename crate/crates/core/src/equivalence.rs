//! Scalar equivalence structures over source assignments: `(I, a_J)`
//! classes, block-level classes for a strong partition, the class array
//! `M(a_L, a_J)` and the counts derived from it.
//!
//! Assignments over a source set are indexed mixed-radix with the smallest
//! source position most significant, matching the function table layout.

use std::collections::HashMap;

use serde::Serialize;

use crate::cut::{enumerate_strong_partitions, CutContext, StrongPartition};
use crate::error::{Error, Result};
use crate::function::{decode_mixed_radix, encode_mixed_radix, TargetFunction};
use crate::graph::Network;
use crate::sets::SourceSet;
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub over: SourceSet,
    /// One symbol per member of `over`, in ascending source order.
    pub values: Vec<u32>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment {
            over: SourceSet::EMPTY,
            values: Vec::new(),
        }
    }

    pub fn new(over: SourceSet, values: Vec<u32>) -> Result<Self> {
        if values.len() != over.len() {
            return Err(Error::MalformedContext(format!(
                "assignment over {} sources has {} values",
                over.len(),
                values.len()
            )));
        }
        Ok(Assignment { over, values })
    }

    pub fn from_index(over: SourceSet, q: usize, index: usize) -> Self {
        Assignment {
            over,
            values: decode_mixed_radix(index, q, over.len()),
        }
    }

    pub fn index(&self, q: usize) -> usize {
        encode_mixed_radix(&self.values, q)
    }
}

/// `q^|set|`, refusing spaces above `limit`.
fn space_size(q: usize, set: SourceSet, limit: usize, what: &'static str) -> Result<usize> {
    crate::function::checked_space(q, set.len(), limit, what)
}

/// For each assignment over `sub`, its contribution to the mixed-radix index
/// of an assignment over the superset `sup`.
pub(crate) fn embedding(sub: SourceSet, sup: SourceSet, q: usize) -> Vec<usize> {
    debug_assert!(sub.is_subset(sup));
    let weights: Vec<usize> = sub
        .iter()
        .map(|i| {
            let below = sup.iter().filter(|&j| j > i).count();
            q.pow(below as u32)
        })
        .collect();
    let size = q.pow(sub.len() as u32);
    (0..size)
        .map(|idx| {
            decode_mixed_radix(idx, q, sub.len())
                .iter()
                .zip(&weights)
                .map(|(&d, &w)| d as usize * w)
                .sum()
        })
        .collect()
}

fn contribution(a: &Assignment, sup: SourceSet, q: usize) -> usize {
    a.over
        .iter()
        .zip(&a.values)
        .map(|(i, &v)| {
            let below = sup.iter().filter(|&j| j > i).count();
            v as usize * q.pow(below as u32)
        })
        .sum()
}

/// A partition of `A^over` into classes. Class ids follow the order of
/// each class's smallest member index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalencePartition {
    pub over: SourceSet,
    pub q: usize,
    class_of: Vec<u32>,
    classes: Vec<Vec<usize>>,
}

impl EquivalencePartition {
    /// Groups indices `0..keys.len()` by equal key.
    fn from_keys<K: Eq + std::hash::Hash>(over: SourceSet, q: usize, keys: impl IntoIterator<Item = K>) -> Self {
        let mut ids: HashMap<K, u32> = HashMap::new();
        let mut class_of = Vec::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (idx, key) in keys.into_iter().enumerate() {
            let next = classes.len() as u32;
            let id = *ids.entry(key).or_insert(next);
            if id == next {
                classes.push(Vec::new());
            }
            classes[id as usize].push(idx);
            class_of.push(id);
        }
        EquivalencePartition {
            over,
            q,
            class_of,
            classes,
        }
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn ground_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_of(&self, index: usize) -> u32 {
        self.class_of[index]
    }

    /// Member indices of a class, ascending.
    pub fn members(&self, class: u32) -> &[usize] {
        &self.classes[class as usize]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn member_assignments(&self, class: u32) -> Vec<Assignment> {
        self.members(class)
            .iter()
            .map(|&m| Assignment::from_index(self.over, self.q, m))
            .collect()
    }
}

fn check_function_sets(f: &TargetFunction, sets: &[SourceSet]) -> Result<()> {
    let all = SourceSet::full(f.arity());
    if sets.iter().any(|s| !s.is_subset(all)) {
        return Err(Error::MalformedContext(format!(
            "source index beyond the function arity {}",
            f.arity()
        )));
    }
    Ok(())
}

/// `(I, a_J)`-equivalence: `b ~ b'` iff `f(b, a_J, d) = f(b', a_J, d)` for
/// every assignment `d` to the remaining sources.
pub fn ec_partition(
    f: &TargetFunction,
    i: SourceSet,
    j: SourceSet,
    a_j: &Assignment,
    limits: &Limits,
) -> Result<EquivalencePartition> {
    check_function_sets(f, &[i, j])?;
    if !i.is_disjoint(j) {
        return Err(Error::Overlap(format!("I = {i:?} and J = {j:?}")));
    }
    if a_j.over != j {
        return Err(Error::MalformedContext("a_J is not an assignment over J".into()));
    }
    let q = f.q();
    let all = SourceSet::full(f.arity());
    let rest = all.difference(i.union(j));
    space_size(q, i, limits.max_assignment_space, "equivalence ground set size")?;
    let emb_i = embedding(i, all, q);
    let emb_d = embedding(rest, all, q);
    let base = contribution(a_j, all, q);
    let table = f.table();
    let signatures = emb_i
        .iter()
        .map(|&bi| emb_d.iter().map(|&d| table[base + bi + d]).collect::<Vec<u32>>());
    Ok(EquivalencePartition::from_keys(i, q, signatures))
}

/// Index sets of a strong-partition context: ambient `I`, blocks `I_l`,
/// residual `L = I \ U I_l`, and the fixed set `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionContext {
    pub ambient: SourceSet,
    pub blocks: Vec<SourceSet>,
    pub residual: SourceSet,
    pub fixed: SourceSet,
}

impl PartitionContext {
    pub fn new(ambient: SourceSet, blocks: Vec<SourceSet>, fixed: SourceSet) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::MalformedContext("no blocks".into()));
        }
        let mut covered = SourceSet::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::MalformedContext("empty block".into()));
            }
            if !b.is_subset(ambient) {
                return Err(Error::MalformedContext(format!("block {b:?} outside I = {ambient:?}")));
            }
            if !b.is_disjoint(covered) {
                return Err(Error::MalformedContext(format!("block {b:?} overlaps another block")));
            }
            covered = covered.union(*b);
        }
        if !ambient.is_disjoint(fixed) {
            return Err(Error::Overlap(format!("I = {ambient:?} and J = {fixed:?}")));
        }
        Ok(PartitionContext {
            ambient,
            blocks,
            residual: ambient.difference(covered),
            fixed,
        })
    }

    pub fn from_cut(ctx: &CutContext, sp: &StrongPartition) -> Result<Self> {
        Self::new(ctx.separated, sp.block_sources.clone(), ctx.residual)
    }

    /// The single-block context `{I}` over `I`.
    pub fn trivial(ambient: SourceSet, fixed: SourceSet) -> Result<Self> {
        Self::new(ambient, vec![ambient], fixed)
    }

    fn other_blocks(&self, l: usize) -> SourceSet {
        self.ambient.difference(self.blocks[l]).difference(self.residual)
    }
}

fn check_context_assignments(
    f: &TargetFunction,
    pctx: &PartitionContext,
    a_l: &Assignment,
    a_j: &Assignment,
) -> Result<()> {
    check_function_sets(f, &[pctx.ambient, pctx.fixed])?;
    if a_l.over != pctx.residual {
        return Err(Error::MalformedContext("a_L is not an assignment over L".into()));
    }
    if a_j.over != pctx.fixed {
        return Err(Error::MalformedContext("a_J is not an assignment over J".into()));
    }
    Ok(())
}

/// Block classes given the ambient partition for the same `a_J`.
fn pec_with_ambient(
    pctx: &PartitionContext,
    l: usize,
    a_l: &Assignment,
    ambient: &EquivalencePartition,
) -> EquivalencePartition {
    let q = ambient.q;
    let i = pctx.ambient;
    let emb_b = embedding(pctx.blocks[l], i, q);
    let emb_c = embedding(pctx.other_blocks(l), i, q);
    let base = contribution(a_l, i, q);
    let signatures = emb_b.iter().map(|&b| {
        emb_c
            .iter()
            .map(|&c| ambient.class_of(base + b + c))
            .collect::<Vec<u32>>()
    });
    EquivalencePartition::from_keys(pctx.blocks[l], q, signatures)
}

/// `(I_l, a_L, a_J)`-equivalence on `A^{I_l}`: `b ~ b'` iff for every
/// assignment `c` to the other blocks, `(b, a_L, c)` and `(b', a_L, c)` are
/// `(I, a_J)`-equivalent.
pub fn pec_partition(
    f: &TargetFunction,
    pctx: &PartitionContext,
    l: usize,
    a_l: &Assignment,
    a_j: &Assignment,
    limits: &Limits,
) -> Result<EquivalencePartition> {
    check_context_assignments(f, pctx, a_l, a_j)?;
    if l >= pctx.blocks.len() {
        return Err(Error::MalformedContext(format!("block index {l} out of range")));
    }
    let ambient = ec_partition(f, pctx.ambient, pctx.fixed, a_j, limits)?;
    Ok(pec_with_ambient(pctx, l, a_l, &ambient))
}

/// The ambient class containing every combination of the chosen block
/// classes with `a_L`. Every member is checked; disagreement is reported
/// as a consistency failure.
pub fn h_map(
    pctx: &PartitionContext,
    block_partitions: &[EquivalencePartition],
    chosen: &[u32],
    a_l: &Assignment,
    ambient: &EquivalencePartition,
) -> Result<u32> {
    if block_partitions.len() != pctx.blocks.len() || chosen.len() != pctx.blocks.len() {
        return Err(Error::MalformedContext("one class per block is required".into()));
    }
    let q = ambient.q;
    let base = contribution(a_l, pctx.ambient, q);
    let embeddings: Vec<Vec<usize>> = pctx.blocks.iter().map(|&b| embedding(b, pctx.ambient, q)).collect();
    let members: Vec<&[usize]> = block_partitions
        .iter()
        .zip(chosen)
        .map(|(p, &c)| p.members(c))
        .collect();

    let mut cursor = vec![0usize; members.len()];
    let mut result = None;
    loop {
        let idx = base
            + cursor
                .iter()
                .enumerate()
                .map(|(l, &pos)| embeddings[l][members[l][pos]])
                .sum::<usize>();
        let class = ambient.class_of(idx);
        match result {
            None => result = Some(class),
            Some(r) if r != class => {
                return Err(Error::Consistency(format!(
                    "block classes {chosen:?} with a_L = {:?} span ambient classes {r} and {class}",
                    a_l.values
                )))
            }
            _ => {}
        }
        let Some(l) = (0..cursor.len()).rev().find(|&l| cursor[l] + 1 < members[l].len()) else {
            break;
        };
        cursor[l] += 1;
        for c in cursor[l + 1..].iter_mut() {
            *c = 0;
        }
    }
    Ok(result.expect("classes are nonempty"))
}

/// `M(a_L, a_J)`: entry at `(i_1, .., i_m)` is the ambient class id of the
/// `i_l`-th block classes. Stored row-major, first block most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassArray {
    pub dims: Vec<usize>,
    pub entries: Vec<u32>,
    pub a_l: Assignment,
    pub a_j: Assignment,
}

impl ClassArray {
    pub fn get(&self, at: &[usize]) -> u32 {
        let idx = at.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i);
        self.entries[idx]
    }
}

fn class_array_with(
    pctx: &PartitionContext,
    block_partitions: &[EquivalencePartition],
    a_l: &Assignment,
    a_j: &Assignment,
    ambient: &EquivalencePartition,
) -> Result<ClassArray> {
    let dims: Vec<usize> = block_partitions.iter().map(|p| p.class_count()).collect();
    let total: usize = dims.iter().product();
    let mut entries = Vec::with_capacity(total);
    let mut chosen = vec![0u32; dims.len()];
    for _ in 0..total {
        entries.push(h_map(pctx, block_partitions, &chosen, a_l, ambient)?);
        for l in (0..dims.len()).rev() {
            chosen[l] += 1;
            if (chosen[l] as usize) < dims[l] {
                break;
            }
            chosen[l] = 0;
        }
    }
    Ok(ClassArray {
        dims,
        entries,
        a_l: a_l.clone(),
        a_j: a_j.clone(),
    })
}

pub fn build_class_array(
    f: &TargetFunction,
    pctx: &PartitionContext,
    a_l: &Assignment,
    a_j: &Assignment,
    limits: &Limits,
) -> Result<ClassArray> {
    check_context_assignments(f, pctx, a_l, a_j)?;
    let ambient = ec_partition(f, pctx.ambient, pctx.fixed, a_j, limits)?;
    let blocks: Vec<EquivalencePartition> = (0..pctx.blocks.len())
        .map(|l| pec_with_ambient(pctx, l, a_l, &ambient))
        .collect();
    class_array_with(pctx, &blocks, a_l, a_j, &ambient)
}

/// Number of entries of the array equal to `class`.
pub fn count_n(arr: &ClassArray, class: u32) -> usize {
    arr.entries.iter().filter(|&&c| c == class).count()
}

/// `n_C(P_C)` with its maximizing `a_J` and the per-class counts `N(Cl)`
/// at that `a_J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionCount {
    pub value: usize,
    pub a_j_star: Assignment,
    pub per_class: Vec<usize>,
}

/// `n_C(P_C)` for a context, maximizing over `a_J` with ties to the
/// smallest index.
pub fn partition_count(f: &TargetFunction, pctx: &PartitionContext, limits: &Limits) -> Result<PartitionCount> {
    check_function_sets(f, &[pctx.ambient, pctx.fixed])?;
    let q = f.q();
    space_size(
        q,
        pctx.fixed.union(pctx.residual),
        limits.max_assignment_space,
        "a_J x a_L assignment space",
    )?;
    let j_size = q.pow(pctx.fixed.len() as u32);
    let l_size = q.pow(pctx.residual.len() as u32);
    let mut best: Option<PartitionCount> = None;
    for j_idx in 0..j_size {
        let a_j = Assignment::from_index(pctx.fixed, q, j_idx);
        let ambient = ec_partition(f, pctx.ambient, pctx.fixed, &a_j, limits)?;
        let mut per_class = vec![0usize; ambient.class_count()];
        for l_idx in 0..l_size {
            let a_l = Assignment::from_index(pctx.residual, q, l_idx);
            let blocks: Vec<EquivalencePartition> = (0..pctx.blocks.len())
                .map(|l| pec_with_ambient(pctx, l, &a_l, &ambient))
                .collect();
            let arr = class_array_with(pctx, &blocks, &a_l, &a_j, &ambient)?;
            let mut counts = vec![0usize; ambient.class_count()];
            for &c in &arr.entries {
                counts[c as usize] += 1;
            }
            for (n, c) in per_class.iter_mut().zip(counts) {
                *n = (*n).max(c);
            }
        }
        let value = per_class.iter().sum();
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(PartitionCount {
                value,
                a_j_star: a_j,
                per_class,
            });
        }
    }
    Ok(best.expect("A^J is nonempty"))
}

pub fn n_c_of_partition(
    f: &TargetFunction,
    ctx: &CutContext,
    sp: &StrongPartition,
    limits: &Limits,
) -> Result<PartitionCount> {
    partition_count(f, &PartitionContext::from_cut(ctx, sp)?, limits)
}

/// `n_{C,f}` with the first maximizing strong partition in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutCount {
    pub value: usize,
    pub partition: StrongPartition,
    pub count: PartitionCount,
    /// Count for the trivial partition, which is `w_{C,f}`.
    pub trivial_value: usize,
    pub partitions_considered: usize,
}

pub fn n_c_f(f: &TargetFunction, net: &Network, ctx: &CutContext, limits: &Limits) -> Result<CutCount> {
    let partitions = enumerate_strong_partitions(net, ctx, limits)?;
    let mut best: Option<(PartitionCount, StrongPartition)> = None;
    let mut trivial_value = None;
    for sp in &partitions {
        let count = n_c_of_partition(f, ctx, sp, limits)?;
        if sp.is_trivial() {
            trivial_value = Some(count.value);
        }
        if best.as_ref().is_none_or(|(b, _)| count.value > b.value) {
            best = Some((count, sp.clone()));
        }
    }
    let (count, partition) = best.expect("the trivial partition is always strong");
    Ok(CutCount {
        value: count.value,
        partition,
        count,
        trivial_value: trivial_value.expect("trivial partition enumerated"),
        partitions_considered: partitions.len(),
    })
}

/// `w_{C,f}`: the largest number of `(I, a_J)` classes over `a_J`.
pub fn w_c_f(f: &TargetFunction, ctx: &CutContext, limits: &Limits) -> Result<usize> {
    let q = f.q();
    let j_size = space_size(q, ctx.residual, limits.max_assignment_space, "a_J assignment space")?;
    let mut best = 0;
    for j_idx in 0..j_size {
        let a_j = Assignment::from_index(ctx.residual, q, j_idx);
        best = best.max(ec_partition(f, ctx.separated, ctx.residual, &a_j, limits)?.class_count());
    }
    Ok(best)
}

/// JSON-friendly view of one `(context, a_L, a_J)` tuple. Sources are
/// 1-based; class ids are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDump {
    #[serde(rename = "I")]
    pub ambient: Vec<usize>,
    #[serde(rename = "J")]
    pub fixed: Vec<usize>,
    #[serde(rename = "L")]
    pub residual: Vec<usize>,
    #[serde(rename = "a_J")]
    pub a_j: Vec<u32>,
    #[serde(rename = "a_L")]
    pub a_l: Vec<u32>,
    pub ambient_classes: Vec<Vec<Vec<u32>>>,
    pub blocks: Vec<BlockDump>,
    pub array_dims: Vec<usize>,
    pub array: Vec<u32>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDump {
    pub sources: Vec<usize>,
    pub classes: Vec<Vec<Vec<u32>>>,
}

fn one_based(set: SourceSet) -> Vec<usize> {
    set.iter().map(|i| i + 1).collect()
}

fn class_values(p: &EquivalencePartition) -> Vec<Vec<Vec<u32>>> {
    (0..p.class_count() as u32)
        .map(|c| p.member_assignments(c).into_iter().map(|a| a.values).collect())
        .collect()
}

pub fn diagnostic_dump(
    f: &TargetFunction,
    pctx: &PartitionContext,
    a_l: &Assignment,
    a_j: &Assignment,
    limits: &Limits,
) -> Result<ClassDump> {
    check_context_assignments(f, pctx, a_l, a_j)?;
    let ambient = ec_partition(f, pctx.ambient, pctx.fixed, a_j, limits)?;
    let blocks: Vec<EquivalencePartition> = (0..pctx.blocks.len())
        .map(|l| pec_with_ambient(pctx, l, a_l, &ambient))
        .collect();
    let arr = class_array_with(pctx, &blocks, a_l, a_j, &ambient)?;
    let counts = (0..ambient.class_count() as u32).map(|c| count_n(&arr, c)).collect();
    Ok(ClassDump {
        ambient: one_based(pctx.ambient),
        fixed: one_based(pctx.fixed),
        residual: one_based(pctx.residual),
        a_j: a_j.values.clone(),
        a_l: a_l.values.clone(),
        ambient_classes: class_values(&ambient),
        blocks: blocks
            .iter()
            .map(|p| BlockDump {
                sources: one_based(p.over),
                classes: class_values(p),
            })
            .collect(),
        array_dims: arr.dims,
        array: arr.entries,
        counts,
    })
}
