//! Structural properties every correct `(2n, n)` code for the maximum on
//! the two-source network N1 must have.
//!
//! N1 has sources `a`, `b`, a relay `v` and the sink. Edge roles:
//! `g1: a -> sink`, `g2: a -> v`, `g3: b -> v`, `g4: b -> sink`,
//! `g5: v -> sink`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::Limits;

use super::{GlobalTable, LocalFunction, NetworkCode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    /// Edge indices playing the roles `g1..g5`.
    pub roles: [usize; 5],
    /// `(g1, g2)` and `(g3, g4)` are bijections `A^{2n} -> A^n x A^n`.
    pub pairs_bijective: [bool; 2],
    /// `g1..g5` are onto `A^n`.
    pub surjective: [bool; 5],
    /// Every fiber of `g1..g4` has `q^n` elements.
    pub equipartition: [bool; 4],
    pub violations: Vec<String>,
}

impl StructureReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

fn unsupported() -> Error {
    Error::Unsupported("network does not have the two-source N1 shape".into())
}

fn find_roles(net: &Network) -> Result<[usize; 5]> {
    if net.source_count() != 2 || net.edge_count() != 5 {
        return Err(unsupported());
    }
    let (a, b, sink) = (net.source_node(0), net.source_node(1), net.sink());
    let into_sink = net.in_edges(sink);
    if into_sink.len() != 3 {
        return Err(unsupported());
    }
    let direct = |src: usize| net.out_edges(src).iter().copied().find(|&e| net.edge(e).head == sink);
    let g1 = direct(a).ok_or_else(unsupported)?;
    let g4 = direct(b).ok_or_else(unsupported)?;
    let g5 = into_sink
        .iter()
        .copied()
        .find(|&e| e != g1 && e != g4)
        .ok_or_else(unsupported)?;
    let v = net.edge(g5).tail;
    let via = |src: usize| net.out_edges(src).iter().copied().find(|&e| net.edge(e).head == v);
    let g2 = via(a).ok_or_else(unsupported)?;
    let g3 = via(b).ok_or_else(unsupported)?;
    if net.out_edges(a).len() != 2 || net.out_edges(b).len() != 2 || net.in_edges(v).len() != 2 {
        return Err(unsupported());
    }
    Ok([g1, g2, g3, g4, g5])
}

/// Checks the bijectivity, surjectivity and equipartition properties. The
/// code's correctness is not checked here.
pub fn check_rate2_structure(code: &NetworkCode, net: &Network, limits: &Limits) -> Result<StructureReport> {
    let roles = find_roles(net)?;
    if code.k != 2 * code.n {
        return Err(Error::Unsupported(format!(
            "structure checks need k = 2n, got k = {}, n = {}",
            code.k, code.n
        )));
    }
    code.check_shape(net)?;
    let words = code.word_count();
    let source_table = |e: usize| match &code.local[e] {
        LocalFunction::Source { table } => Ok(table.as_slice()),
        LocalFunction::Relay { .. } => Err(unsupported()),
    };
    let tables = [
        source_table(roles[0])?,
        source_table(roles[1])?,
        source_table(roles[2])?,
        source_table(roles[3])?,
    ];
    let global = GlobalTable::compute(code, net, limits)?;
    let mut violations = Vec::new();

    let mut pairs_bijective = [false; 2];
    for (p, (x, y)) in [(0, 1), (2, 3)].into_iter().enumerate() {
        let images: HashSet<(u32, u32)> = tables[x].iter().copied().zip(tables[y].iter().copied()).collect();
        pairs_bijective[p] = images.len() == tables[x].len();
        if !pairs_bijective[p] {
            violations.push(format!("(g{}, g{}) is not a bijection", x + 1, y + 1));
        }
    }

    let mut surjective = [false; 5];
    let mut equipartition = [false; 4];
    for i in 0..4 {
        let mut fiber = vec![0usize; words];
        for &w in tables[i] {
            fiber[w as usize] += 1;
        }
        surjective[i] = fiber.iter().all(|&c| c > 0);
        equipartition[i] = fiber.iter().all(|&c| c == words);
        if !surjective[i] {
            violations.push(format!("g{} is not surjective", i + 1));
        }
        if !equipartition[i] {
            violations.push(format!("fibers of g{} do not all have q^n elements", i + 1));
        }
    }
    let carried: HashSet<u32> = global.words[roles[4]].iter().copied().collect();
    surjective[4] = carried.len() == words;
    if !surjective[4] {
        violations.push("g5 is not surjective".to_string());
    }

    Ok(StructureReport {
        roles,
        pairs_bijective,
        surjective,
        equipartition,
        violations,
    })
}
