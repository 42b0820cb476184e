#![allow(dead_code)]

use std::collections::HashMap;

use netcap::code::{LocalFunction, NetworkCode};
use netcap::function::parse_function;
use netcap::graph::parse_network;
use netcap::{EdgeSet, Network, SourceSet, TargetFunction};
use rand::Rng;

pub fn data_path(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn network(name: &str) -> Network {
    parse_network(&read(name)).unwrap()
}

pub fn function(name: &str) -> TargetFunction {
    parse_function(&read(name), 1 << 20).unwrap()
}

pub fn edges(net: &Network, ids: &[&str]) -> EdgeSet {
    net.edge_set(ids.iter().copied()).unwrap()
}

pub fn edge_indices(net: &Network, ids: &[&str]) -> Vec<usize> {
    ids.iter().map(|id| net.edge_by_id(id).unwrap()).collect()
}

pub fn build(q: usize, nodes: &[&str], sources: &[&str], edges: &[(&str, &str, &str)]) -> Network {
    Network::new(
        q,
        nodes.iter().copied(),
        sources.iter().copied(),
        "rho",
        edges
            .iter()
            .map(|&(i, t, h)| (i.to_string(), t.to_string(), h.to_string())),
    )
    .unwrap()
}

pub fn digits(mut index: usize, radix: usize, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for d in out.iter_mut().rev() {
        *d = (index % radix) as u32;
        index /= radix;
    }
    out
}

pub fn undigits(d: &[u32], radix: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * radix + x as usize)
}

/// Nodes reachable from `start` along edges not in `removed`.
fn forward(net: &Network, start: usize, removed: EdgeSet) -> Vec<bool> {
    let mut seen = vec![false; net.node_count()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for (e, edge) in net.edges().iter().enumerate() {
            if edge.tail == v && !removed.contains(e) && !seen[edge.head] {
                seen[edge.head] = true;
                stack.push(edge.head);
            }
        }
    }
    seen
}

pub fn oracle_separated(net: &Network, cut: EdgeSet) -> SourceSet {
    (0..net.source_count())
        .filter(|&i| !forward(net, net.source_node(i), cut)[net.sink()])
        .collect()
}

pub fn oracle_reaching(net: &Network, cut: EdgeSet) -> SourceSet {
    (0..net.source_count())
        .filter(|&i| {
            let seen = forward(net, net.source_node(i), EdgeSet::EMPTY);
            cut.iter().any(|e| seen[net.edge(e).tail])
        })
        .collect()
}

/// All cut sets with their `I`, as bitmask over edge indices.
pub fn oracle_cuts(net: &Network) -> Vec<(EdgeSet, SourceSet)> {
    (1u64..1 << net.edge_count())
        .map(EdgeSet::from_bits)
        .map(|c| (c, oracle_separated(net, c)))
        .filter(|(_, i)| !i.is_empty())
        .collect()
}

/// Full assignment index with `sub` taking `vals` (or zeros elsewhere).
fn place(s: usize, parts: &[(SourceSet, &[u32])]) -> Vec<u32> {
    let mut x = vec![0; s];
    for (set, vals) in parts {
        for (pos, v) in set.iter().zip(vals.iter()) {
            x[pos] = *v;
        }
    }
    x
}

fn assignments(set: SourceSet, q: usize) -> Vec<Vec<u32>> {
    (0..q.pow(set.len() as u32)).map(|i| digits(i, q, set.len())).collect()
}

/// Class id of every `b` in `A^I` under `(I, a_J)`-equivalence, by
/// comparing value signatures over all completions.
fn ambient_classes(f: &TargetFunction, i: SourceSet, j: SourceSet, a_j: &[u32]) -> Vec<usize> {
    let s = f.arity();
    let rest = SourceSet::full(s).difference(i.union(j));
    let sigs: Vec<Vec<u32>> = assignments(i, f.q())
        .iter()
        .map(|b| {
            assignments(rest, f.q())
                .iter()
                .map(|d| f.eval(&place(s, &[(i, b), (j, a_j), (rest, d)])))
                .collect()
        })
        .collect();
    let mut ids: HashMap<&Vec<u32>, usize> = HashMap::new();
    sigs.iter()
        .map(|sig| {
            let next = ids.len();
            *ids.entry(sig).or_insert(next)
        })
        .collect()
}

pub fn oracle_w(f: &TargetFunction, i: SourceSet, j: SourceSet) -> usize {
    assignments(j, f.q())
        .iter()
        .map(|a_j| {
            let mut c = ambient_classes(f, i, j, a_j);
            c.sort_unstable();
            c.dedup();
            c.len()
        })
        .max()
        .unwrap()
}

/// `n_C(P_C)` straight from the definitions.
pub fn oracle_partition_count(f: &TargetFunction, i: SourceSet, j: SourceSet, blocks: &[SourceSet]) -> usize {
    let q = f.q();
    let l_set = blocks.iter().fold(i, |acc, b| acc.difference(*b));
    let index_in_i = |parts: &[(SourceSet, &[u32])]| -> usize {
        let full = place(f.arity(), parts);
        let sub: Vec<u32> = i.iter().map(|p| full[p]).collect();
        undigits(&sub, q)
    };
    let mut best = 0;
    for a_j in assignments(j, q) {
        let amb = ambient_classes(f, i, j, &a_j);
        let n_classes = amb.iter().max().unwrap() + 1;
        let mut n = vec![0usize; n_classes];
        for a_l in assignments(l_set, q) {
            // block classes: b ~ b' iff every completion by other blocks
            // lands in the same ambient class
            let mut reps: Vec<Vec<Vec<u32>>> = Vec::new();
            for (l, &bl) in blocks.iter().enumerate() {
                let others: Vec<SourceSet> = blocks
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != l)
                    .map(|(_, &b)| b)
                    .collect();
                let other_set = others.iter().fold(SourceSet::EMPTY, |a, b| a.union(*b));
                let mut seen: HashMap<Vec<usize>, Vec<u32>> = HashMap::new();
                let mut order = Vec::new();
                for b in assignments(bl, q) {
                    let sig: Vec<usize> = assignments(other_set, q)
                        .iter()
                        .map(|c| amb[index_in_i(&[(bl, &b), (l_set, &a_l), (other_set, c)])])
                        .collect();
                    if !seen.contains_key(&sig) {
                        seen.insert(sig.clone(), b.clone());
                        order.push(b);
                    }
                }
                reps.push(order);
            }
            let mut counts = vec![0usize; n_classes];
            let dims: Vec<usize> = reps.iter().map(Vec::len).collect();
            let total: usize = dims.iter().product();
            for t in 0..total {
                let mut rem = t;
                let mut parts: Vec<(SourceSet, &[u32])> = vec![(l_set, &a_l)];
                let mut chosen = vec![0; dims.len()];
                for l in (0..dims.len()).rev() {
                    chosen[l] = rem % dims[l];
                    rem /= dims[l];
                }
                for (l, &c) in chosen.iter().enumerate() {
                    parts.push((blocks[l], &reps[l][c]));
                }
                counts[amb[index_in_i(&parts)]] += 1;
            }
            for (a, b) in n.iter_mut().zip(counts) {
                *a = (*a).max(b);
            }
        }
        best = best.max(n.iter().sum());
    }
    best
}

/// Every set partition of `items` (as lists of blocks).
pub fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&last, rest)) = items.split_last() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for b in 0..p.len() {
            let mut q = p.clone();
            q[b].push(last);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![last]);
        out.push(q);
    }
    out
}

/// Strong partitions of a cut, as lists of block edge sets.
pub fn oracle_strong_partitions(net: &Network, cut: EdgeSet) -> Vec<Vec<EdgeSet>> {
    let items: Vec<usize> = cut.iter().collect();
    set_partitions(&items)
        .into_iter()
        .map(|p| {
            p.into_iter()
                .map(|b| b.into_iter().collect::<EdgeSet>())
                .collect::<Vec<_>>()
        })
        .filter(|blocks: &Vec<EdgeSet>| {
            let sets: Vec<SourceSet> = blocks.iter().map(|&b| oracle_separated(net, b)).collect();
            sets.iter().all(|s| !s.is_empty())
                && (0..sets.len()).all(|a| (a + 1..sets.len()).all(|b| sets[a].is_disjoint(sets[b])))
        })
        .collect()
}

pub fn oracle_n_c_f(net: &Network, f: &TargetFunction, cut: EdgeSet) -> usize {
    let i = oracle_separated(net, cut);
    let j = oracle_reaching(net, cut).difference(i);
    oracle_strong_partitions(net, cut)
        .iter()
        .map(|blocks| {
            let sets: Vec<SourceSet> = blocks.iter().map(|&b| oracle_separated(net, b)).collect();
            oracle_partition_count(f, i, j, &sets)
        })
        .max()
        .unwrap()
}

/// `(footprint, huang, improved)` by plain floating-point minimization.
pub fn oracle_bounds(net: &Network, f: &TargetFunction) -> (f64, f64, f64) {
    let q = net.alphabet_size() as f64;
    let ratio = |c: usize, n: usize| {
        if n <= 1 {
            f64::INFINITY
        } else {
            c as f64 / (n as f64).log(q)
        }
    };
    let image = {
        let mut t = f.table().to_vec();
        t.sort_unstable();
        t.dedup();
        t.len()
    };
    let (mut fp, mut hu, mut im) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for (cut, i) in oracle_cuts(net) {
        let j = oracle_reaching(net, cut).difference(i);
        if i == net.all_sources() {
            fp = fp.min(ratio(cut.len(), image));
        }
        hu = hu.min(ratio(cut.len(), oracle_w(f, i, j)));
        im = im.min(ratio(cut.len(), oracle_n_c_f(net, f, cut)));
    }
    (fp, hu, im)
}

/// Words on every edge for the source matrix with index `m`.
pub fn oracle_eval(code: &NetworkCode, net: &Network, m: usize) -> Vec<u32> {
    let q = code.q;
    let cols = digits(m, q.pow(code.k as u32), net.source_count());
    let order = net.edge_order().unwrap();
    let words = q.pow(code.n as u32);
    let mut w = vec![u32::MAX; net.edge_count()];
    for e in order {
        w[e] = match &code.local[e] {
            LocalFunction::Source { table } => {
                let src = net.source_position(net.edge(e).tail).unwrap();
                table[cols[src] as usize]
            }
            LocalFunction::Relay { inputs, table } => {
                let ins: Vec<u32> = inputs.iter().map(|&i| w[i]).collect();
                assert!(ins.iter().all(|&x| x != u32::MAX));
                table[undigits(&ins, words)]
            }
        };
    }
    w
}

/// Row-wise target values for matrix `m`, as an index over `O^k`.
pub fn oracle_target(f: &TargetFunction, k: usize, s: usize, m: usize) -> usize {
    let q = f.q();
    let cols = digits(m, q.pow(k as u32), s);
    let cols: Vec<Vec<u32>> = cols.iter().map(|&c| digits(c as usize, q, k)).collect();
    let rows: Vec<u32> = (0..k)
        .map(|t| f.eval(&cols.iter().map(|c| c[t]).collect::<Vec<_>>()))
        .collect();
    undigits(&rows, f.output_size())
}

/// Whether some decoder on the sink's in-edges computes `f`.
pub fn oracle_code_computes(code: &NetworkCode, net: &Network, f: &TargetFunction) -> bool {
    let s = net.source_count();
    let total = code.q.pow((code.k * s) as u32);
    let sink_in = net.in_edges(net.sink());
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    for m in 0..total {
        let w = oracle_eval(code, net, m);
        let key: Vec<u32> = sink_in.iter().map(|&e| w[e]).collect();
        let want = oracle_target(f, code.k, s, m);
        if *seen.entry(key).or_insert(want) != want {
            return false;
        }
    }
    true
}

/// Whether any `(k, n)` code computes `f`, trying every table assignment.
pub fn oracle_code_exists(net: &Network, f: &TargetFunction, k: usize, n: usize) -> bool {
    let q = net.alphabet_size();
    let words = q.pow(n as u32);
    let domains: Vec<usize> = (0..net.edge_count())
        .map(|e| {
            let tail = net.edge(e).tail;
            if net.source_position(tail).is_some() {
                q.pow(k as u32)
            } else {
                words.pow(net.in_edges(tail).len() as u32)
            }
        })
        .collect();
    let per_edge: Vec<usize> = domains.iter().map(|&d| words.pow(d as u32)).collect();
    let total: usize = per_edge.iter().product();
    for t in 0..total {
        let mut rem = t;
        let local = (0..net.edge_count())
            .map(|e| {
                let choice = rem % per_edge[e];
                rem /= per_edge[e];
                let table = digits(choice, words, domains[e]);
                let tail = net.edge(e).tail;
                if net.source_position(tail).is_some() {
                    LocalFunction::Source { table }
                } else {
                    LocalFunction::Relay {
                        inputs: net.in_edges(tail).to_vec(),
                        table,
                    }
                }
            })
            .collect();
        let code = NetworkCode {
            k,
            n,
            q,
            local,
            decoder: None,
        };
        if oracle_code_computes(&code, net, f) {
            return true;
        }
    }
    false
}

/// A random valid DAG with sources `s1..`, relays `v1..` and sink `rho`.
pub fn random_network<R: Rng>(
    rng: &mut R,
    q: usize,
    max_sources: usize,
    max_relays: usize,
    max_edges: usize,
) -> Network {
    let s = rng.gen_range(1..=max_sources);
    let m = rng.gen_range(0..=max_relays);
    let mut nodes: Vec<String> = (1..=s).map(|i| format!("s{i}")).collect();
    nodes.extend((1..=m).map(|i| format!("v{i}")));
    nodes.push("rho".into());
    let sink = nodes.len() - 1;
    let mut list: Vec<(usize, usize)> = Vec::new();
    for t in 0..sink {
        let lo = s.max(t + 1);
        list.push((t, rng.gen_range(lo..=sink)));
    }
    let budget = rng.gen_range(list.len()..=max_edges.max(list.len()));
    while list.len() < budget {
        let t = rng.gen_range(0..sink);
        let lo = s.max(t + 1);
        list.push((t, rng.gen_range(lo..=sink)));
    }
    let edges = list
        .iter()
        .enumerate()
        .map(|(i, &(t, h))| (format!("e{}", i + 1), nodes[t].clone(), nodes[h].clone()));
    Network::new(q, nodes.clone(), nodes[..s].to_vec(), "rho", edges).unwrap()
}

pub fn random_function<R: Rng>(rng: &mut R, s: usize, q: usize) -> TargetFunction {
    let o = rng.gen_range(1..=4usize);
    let table = (0..q.pow(s as u32)).map(|_| rng.gen_range(0..o as u32)).collect();
    TargetFunction::from_table(s, q, o, table).unwrap()
}

/// A code with uniformly random local tables.
pub fn random_code<R: Rng>(rng: &mut R, net: &Network, k: usize, n: usize) -> NetworkCode {
    let q = net.alphabet_size();
    let words = q.pow(n as u32) as u32;
    let local = (0..net.edge_count())
        .map(|e| {
            let tail = net.edge(e).tail;
            if net.source_position(tail).is_some() {
                let table = (0..q.pow(k as u32)).map(|_| rng.gen_range(0..words)).collect();
                LocalFunction::Source { table }
            } else {
                let inputs = net.in_edges(tail).to_vec();
                let size = (words as usize).pow(inputs.len() as u32);
                let table = (0..size).map(|_| rng.gen_range(0..words)).collect();
                LocalFunction::Relay { inputs, table }
            }
        })
        .collect();
    NetworkCode {
        k,
        n,
        q,
        local,
        decoder: None,
    }
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
