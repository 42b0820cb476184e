//! `(k, n)` network codes: `k` source symbols per source are delivered over
//! `n` uses of each edge.
//!
//! Messages are `n`-symbol words stored as their mixed-radix index over
//! `A^n`, first symbol most significant. A source matrix `x_S` in
//! `A^{k x s}` is indexed by the column indices of its sources, first
//! source most significant, each column indexed over `A^k` with its first
//! row most significant. The target function is applied row by row and
//! the `k` outputs are indexed over `O^k` the same way.

mod search;
mod structure;
mod verify;

pub use search::{search_code, search_space_log2, SearchOptions, SearchOutcome, SearchResult, StopReason};
pub use structure::{check_rate2_structure, StructureReport};
pub use verify::{
    induce_function, synthesize_decoder, verify_code, Counterexample, Synthesis, SynthesizedDecoder, Verdict,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{checked_space, decode_mixed_radix, encode_mixed_radix, TargetFunction};
use crate::graph::Network;
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalFunction {
    /// Table over `A^k`, indexed by the tail source's column.
    Source { table: Vec<u32> },
    /// Table over `(A^n)^inputs`, first input most significant.
    Relay { inputs: Vec<usize>, table: Vec<u32> },
}

impl LocalFunction {
    pub fn table(&self) -> &[u32] {
        match self {
            LocalFunction::Source { table } | LocalFunction::Relay { table, .. } => table,
        }
    }
}

/// Map from the sink's incoming words to `k` output symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoder {
    pub inputs: Vec<usize>,
    pub table: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkCode {
    pub k: usize,
    pub n: usize,
    pub q: usize,
    /// Indexed by edge index.
    pub local: Vec<LocalFunction>,
    pub decoder: Option<Decoder>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    k: usize,
    n: usize,
    edges: BTreeMap<String, EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decoder: Option<DecoderEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inputs: Option<Vec<String>>,
    table: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecoderEntry {
    inputs: Vec<String>,
    table: Vec<Vec<u32>>,
}

fn shape(msg: impl Into<String>) -> Error {
    Error::ShapeMismatch(msg.into())
}

/// Whether `given` lists exactly the members of `expected`, each once.
fn is_permutation(given: &[usize], expected: &[usize]) -> bool {
    let mut a = given.to_vec();
    let mut b = expected.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

impl NetworkCode {
    pub fn word_count(&self) -> usize {
        self.q.pow(self.n as u32)
    }

    pub fn word_symbols(&self, word: u32) -> Vec<u32> {
        decode_mixed_radix(word as usize, self.q, self.n)
    }

    /// Checks every table against the network: one local function per
    /// edge, relay inputs equal to the tail's in-edges, table sizes and
    /// symbol ranges.
    pub fn check_shape(&self, net: &Network) -> Result<()> {
        if self.k == 0 || self.n == 0 {
            return Err(shape("k and n must be at least 1"));
        }
        if self.q != net.alphabet_size() {
            return Err(shape("code alphabet differs from the network alphabet"));
        }
        if self.local.len() != net.edge_count() {
            return Err(shape("one local function per edge is required"));
        }
        let words = self.word_count();
        for (e, local) in self.local.iter().enumerate() {
            let id = net.edge_id(e);
            let tail = net.edge(e).tail;
            let expected_len = match local {
                LocalFunction::Source { .. } => {
                    if net.source_position(tail).is_none() {
                        return Err(shape(format!("edge {id} does not leave a source and needs inputs")));
                    }
                    self.q.pow(self.k as u32)
                }
                LocalFunction::Relay { inputs, .. } => {
                    if net.source_position(tail).is_some() {
                        return Err(shape(format!("edge {id} leaves a source and takes no inputs")));
                    }
                    if !is_permutation(inputs, net.in_edges(tail)) {
                        return Err(shape(format!("inputs of edge {id} must be the in-edges of its tail")));
                    }
                    words.pow(inputs.len() as u32)
                }
            };
            let table = local.table();
            if table.len() != expected_len {
                return Err(shape(format!(
                    "edge {id} table has {} entries, expected {expected_len}",
                    table.len()
                )));
            }
            if table.iter().any(|&w| w as usize >= words) {
                return Err(shape(format!("edge {id} table has a word outside A^n")));
            }
        }
        if let Some(dec) = &self.decoder {
            if !is_permutation(&dec.inputs, net.in_edges(net.sink())) {
                return Err(shape("decoder inputs must be the in-edges of the sink"));
            }
            let expected_len = words.pow(dec.inputs.len() as u32);
            if dec.table.len() != expected_len {
                return Err(shape(format!(
                    "decoder table has {} entries, expected {expected_len}",
                    dec.table.len()
                )));
            }
            if dec.table.iter().any(|out| out.len() != self.k) {
                return Err(shape("decoder entries must have k symbols"));
            }
        }
        Ok(())
    }

    fn resolve_word(&self, id: &str, symbols: &[u32]) -> Result<u32> {
        if symbols.len() != self.n {
            return Err(shape(format!(
                "edge {id} entry has {} symbols, expected n = {}",
                symbols.len(),
                self.n
            )));
        }
        if symbols.iter().any(|&x| x as usize >= self.q) {
            return Err(shape(format!("edge {id} entry has a symbol outside the alphabet")));
        }
        Ok(encode_mixed_radix(symbols, self.q) as u32)
    }

    pub fn to_json(&self, net: &Network) -> String {
        let edges = self
            .local
            .iter()
            .enumerate()
            .map(|(e, local)| {
                let table = local.table().iter().map(|&w| self.word_symbols(w)).collect();
                let inputs = match local {
                    LocalFunction::Source { .. } => None,
                    LocalFunction::Relay { inputs, .. } => {
                        Some(inputs.iter().map(|&i| net.edge_id(i).to_string()).collect())
                    }
                };
                (net.edge_id(e).to_string(), EdgeEntry { inputs, table })
            })
            .collect();
        let decoder = self.decoder.as_ref().map(|d| DecoderEntry {
            inputs: d.inputs.iter().map(|&i| net.edge_id(i).to_string()).collect(),
            table: d.table.clone(),
        });
        let file = CodeFile {
            k: self.k,
            n: self.n,
            edges,
            decoder,
        };
        serde_json::to_string(&file).expect("code serialization")
    }
}

/// Parses a code file against a network and checks its shape.
pub fn parse_code(text: &str, net: &Network) -> Result<NetworkCode> {
    let file: CodeFile = serde_json::from_str(text).map_err(Error::from_json)?;
    for id in file.edges.keys() {
        net.edge_by_id(id)?;
    }
    let mut code = NetworkCode {
        k: file.k,
        n: file.n,
        q: net.alphabet_size(),
        local: Vec::with_capacity(net.edge_count()),
        decoder: None,
    };
    let mut local = Vec::with_capacity(net.edge_count());
    for e in 0..net.edge_count() {
        let id = net.edge_id(e);
        let entry = file
            .edges
            .get(id)
            .ok_or_else(|| shape(format!("no local function for edge {id}")))?;
        let table = entry
            .table
            .iter()
            .map(|w| code.resolve_word(id, w))
            .collect::<Result<Vec<u32>>>()?;
        local.push(match &entry.inputs {
            None => LocalFunction::Source { table },
            Some(names) => LocalFunction::Relay {
                inputs: names.iter().map(|n| net.edge_by_id(n)).collect::<Result<_>>()?,
                table,
            },
        });
    }
    code.local = local;
    code.decoder = file
        .decoder
        .map(|d| -> Result<Decoder> {
            Ok(Decoder {
                inputs: d.inputs.iter().map(|n| net.edge_by_id(n)).collect::<Result<_>>()?,
                table: d.table,
            })
        })
        .transpose()?;
    code.check_shape(net)?;
    Ok(code)
}

/// `x_S` as one column of `k` symbols per source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceMatrix {
    pub columns: Vec<Vec<u32>>,
}

impl SourceMatrix {
    pub fn from_index(index: usize, q: usize, k: usize, s: usize) -> Self {
        let col_space = q.pow(k as u32);
        let columns = decode_mixed_radix(index, col_space, s)
            .into_iter()
            .map(|c| decode_mixed_radix(c as usize, q, k))
            .collect();
        SourceMatrix { columns }
    }

    pub fn index(&self, q: usize) -> usize {
        let k = self.columns.first().map_or(0, Vec::len);
        let col_space = q.pow(k as u32);
        self.columns
            .iter()
            .fold(0, |acc, c| acc * col_space + encode_mixed_radix(c, q))
    }

    pub fn row(&self, t: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c[t]).collect()
    }
}

/// Number of source matrices, refusing spaces above the table limit.
pub(crate) fn matrix_count(q: usize, k: usize, s: usize, limits: &Limits) -> Result<usize> {
    checked_space(q, k * s, limits.max_table, "source matrix count")
}

/// Column index over `A^k` of every source, for each matrix index.
pub(crate) fn column_indices(q: usize, k: usize, s: usize, count: usize) -> Vec<Vec<usize>> {
    let col_space = q.pow(k as u32);
    (0..count)
        .map(|m| {
            decode_mixed_radix(m, col_space, s)
                .into_iter()
                .map(|c| c as usize)
                .collect()
        })
        .collect()
}

/// Index over `O^k` of the row-wise target value of every matrix.
pub(crate) fn expected_outputs(f: &TargetFunction, k: usize, count: usize) -> Result<Vec<u32>> {
    let q = f.q();
    let o = f.output_size();
    checked_space(o, k, u32::MAX as usize, "output alphabet O^k")?;
    Ok((0..count)
        .map(|m| {
            let x = SourceMatrix::from_index(m, q, k, f.arity());
            (0..k).fold(0u32, |acc, t| acc * o as u32 + f.eval(&x.row(t)))
        })
        .collect())
}

pub(crate) fn check_function(net: &Network, f: &TargetFunction) -> Result<()> {
    if f.arity() != net.source_count() || f.q() != net.alphabet_size() {
        return Err(shape(format!(
            "function over {} sources with alphabet {} does not match the network ({} sources, alphabet {})",
            f.arity(),
            f.q(),
            net.source_count(),
            net.alphabet_size()
        )));
    }
    Ok(())
}

/// Global encoding of every edge over every source matrix.
#[derive(Debug, Clone)]
pub struct GlobalTable {
    /// `words[e][m]`.
    pub words: Vec<Vec<u32>>,
    pub matrices: usize,
}

impl GlobalTable {
    pub fn compute(code: &NetworkCode, net: &Network, limits: &Limits) -> Result<Self> {
        code.check_shape(net)?;
        let s = net.source_count();
        let count = matrix_count(code.q, code.k, s, limits)?;
        let cols = column_indices(code.q, code.k, s, count);
        let words_per = code.word_count();
        let mut words: Vec<Vec<u32>> = vec![Vec::new(); net.edge_count()];
        for e in net.edge_order()? {
            let row = match &code.local[e] {
                LocalFunction::Source { table } => {
                    let pos = net.source_position(net.edge(e).tail).expect("source edge");
                    cols.iter().map(|c| table[c[pos]]).collect()
                }
                LocalFunction::Relay { inputs, table } => (0..count)
                    .map(|m| {
                        let idx = inputs
                            .iter()
                            .fold(0usize, |acc, &i| acc * words_per + words[i][m] as usize);
                        table[idx]
                    })
                    .collect(),
            };
            words[e] = row;
        }
        Ok(GlobalTable { words, matrices: count })
    }

    /// Combined index of the words on `edges` for matrix `m`, first edge
    /// most significant.
    pub fn cut_index(&self, edges: &[usize], m: usize, words_per: usize) -> usize {
        edges
            .iter()
            .fold(0, |acc, &e| acc * words_per + self.words[e][m] as usize)
    }
}

/// Messages on every edge for one source matrix, as symbol words.
pub fn eval_global(code: &NetworkCode, net: &Network, x: &SourceMatrix) -> Result<BTreeMap<String, Vec<u32>>> {
    code.check_shape(net)?;
    if x.columns.len() != net.source_count() || x.columns.iter().any(|c| c.len() != code.k) {
        return Err(shape("source matrix must have k symbols for each source"));
    }
    if x.columns.iter().flatten().any(|&v| v as usize >= code.q) {
        return Err(shape("source matrix symbol outside the alphabet"));
    }
    let words_per = code.word_count();
    let mut words = vec![0u32; net.edge_count()];
    for e in net.edge_order()? {
        words[e] = match &code.local[e] {
            LocalFunction::Source { table } => {
                let pos = net.source_position(net.edge(e).tail).expect("source edge");
                table[encode_mixed_radix(&x.columns[pos], code.q)]
            }
            LocalFunction::Relay { inputs, table } => {
                let idx = inputs
                    .iter()
                    .fold(0usize, |acc, &i| acc * words_per + words[i] as usize);
                table[idx]
            }
        };
    }
    Ok((0..net.edge_count())
        .map(|e| (net.edge_id(e).to_string(), code.word_symbols(words[e])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_indexing() {
        // two sources, k = 2, q = 2: columns (1,0) and (0,1)
        let x = SourceMatrix {
            columns: vec![vec![1, 0], vec![0, 1]],
        };
        assert_eq!(x.index(2), 2 * 4 + 1);
        assert_eq!(SourceMatrix::from_index(9, 2, 2, 2), x);
        assert_eq!(x.row(0), vec![1, 0]);
        assert_eq!(x.row(1), vec![0, 1]);
        assert_eq!(column_indices(2, 2, 2, 16)[9], vec![2, 1]);
    }

    #[test]
    fn permutation_check() {
        assert!(is_permutation(&[2, 1], &[1, 2]));
        assert!(!is_permutation(&[1, 1], &[1, 2]));
        assert!(!is_permutation(&[1], &[1, 2]));
    }
}
