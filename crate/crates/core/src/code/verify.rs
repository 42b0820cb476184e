//! Decoder synthesis over global cuts, exhaustive verification and the
//! function induced on a global cut.

use std::collections::HashSet;

use crate::cut::separated_sources;
use crate::error::{Error, Result};
use crate::function::{checked_space, decode_mixed_radix, TargetFunction};
use crate::graph::Network;
use crate::sets::EdgeSet;
use crate::Limits;

use super::{check_function, expected_outputs, GlobalTable, NetworkCode, SourceMatrix};

/// Decoder read off a global cut. Unreached tuples decode to output 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesizedDecoder {
    pub inputs: Vec<usize>,
    /// Output index over `O^k` for each tuple of cut words.
    pub table: Vec<u32>,
    pub reached: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Synthesis {
    Decoder(SynthesizedDecoder),
    /// Two matrices with equal cut words but different target values.
    Collision {
        first: usize,
        second: usize,
    },
}

fn check_cut_order(net: &Network, cut_order: &[usize]) -> Result<EdgeSet> {
    let set: EdgeSet = cut_order.iter().copied().collect();
    if set.len() != cut_order.len() {
        return Err(Error::ShapeMismatch("cut lists an edge twice".into()));
    }
    if separated_sources(net, set) != net.all_sources() {
        return Err(Error::NotGlobalCut(net.edge_ids(set).join(",")));
    }
    Ok(set)
}

pub(crate) fn synthesize_from(
    table: &GlobalTable,
    expected: &[u32],
    cut_order: &[usize],
    words_per: usize,
    limits: &Limits,
) -> Result<Synthesis> {
    let size = checked_space(words_per, cut_order.len(), limits.max_table, "decoder table size")?;
    let mut out: Vec<Option<(u32, usize)>> = vec![None; size];
    for (m, &want) in expected.iter().enumerate() {
        let idx = table.cut_index(cut_order, m, words_per);
        match out[idx] {
            None => out[idx] = Some((want, m)),
            Some((v, first)) if v != want => return Ok(Synthesis::Collision { first, second: m }),
            _ => {}
        }
    }
    Ok(Synthesis::Decoder(SynthesizedDecoder {
        inputs: cut_order.to_vec(),
        reached: out.iter().map(Option::is_some).collect(),
        table: out.iter().map(|o| o.map_or(0, |(v, _)| v)).collect(),
    }))
}

/// Builds the map from the words on a global cut, read in `cut_order`, to
/// the target value, or reports a collision.
pub fn synthesize_decoder(
    code: &NetworkCode,
    net: &Network,
    f: &TargetFunction,
    cut_order: &[usize],
    limits: &Limits,
) -> Result<Synthesis> {
    check_function(net, f)?;
    check_cut_order(net, cut_order)?;
    let table = GlobalTable::compute(code, net, limits)?;
    let expected = expected_outputs(f, code.k, table.matrices)?;
    synthesize_from(&table, &expected, cut_order, code.word_count(), limits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    /// The supplied decoder outputs the wrong value.
    Mismatch {
        input: SourceMatrix,
        expected: Vec<u32>,
        decoded: Vec<u32>,
    },
    /// No decoder exists: two inputs reach the sink identically but need
    /// different outputs.
    Collision {
        first: SourceMatrix,
        second: SourceMatrix,
        first_value: Vec<u32>,
        second_value: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Fail(Counterexample),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

/// Checks the code on every source matrix, with the supplied decoder or,
/// when there is none, a decoder synthesized on the sink's in-edges.
pub fn verify_code(code: &NetworkCode, net: &Network, f: &TargetFunction, limits: &Limits) -> Result<Verdict> {
    check_function(net, f)?;
    let table = GlobalTable::compute(code, net, limits)?;
    let expected = expected_outputs(f, code.k, table.matrices)?;
    let (q, k, s) = (code.q, code.k, net.source_count());
    let o = f.output_size();
    let words_per = code.word_count();
    let outputs = |v: u32| decode_mixed_radix(v as usize, o, k);
    let matrix = |m: usize| SourceMatrix::from_index(m, q, k, s);

    match &code.decoder {
        Some(dec) => {
            if dec.table.iter().flatten().any(|&v| v as usize >= o) {
                return Err(Error::ShapeMismatch(
                    "decoder output outside the output alphabet".into(),
                ));
            }
            for (m, &want) in expected.iter().enumerate() {
                let decoded = &dec.table[table.cut_index(&dec.inputs, m, words_per)];
                let want = outputs(want);
                if *decoded != want {
                    return Ok(Verdict::Fail(Counterexample::Mismatch {
                        input: matrix(m),
                        expected: want,
                        decoded: decoded.clone(),
                    }));
                }
            }
            Ok(Verdict::Ok)
        }
        None => {
            let inputs = net.in_edges(net.sink()).to_vec();
            match synthesize_from(&table, &expected, &inputs, words_per, limits)? {
                Synthesis::Decoder(_) => Ok(Verdict::Ok),
                Synthesis::Collision { first, second } => Ok(Verdict::Fail(Counterexample::Collision {
                    first: matrix(first),
                    second: matrix(second),
                    first_value: outputs(expected[first]),
                    second_value: outputs(expected[second]),
                })),
            }
        }
    }
}

/// The function the cut decoder defines on the words crossing a global
/// cut: arity `|C|`, alphabet `q^n`, output alphabet `|O|^k`. Every cut
/// edge must carry every word, so that the function is total.
pub fn induce_function(
    code: &NetworkCode,
    net: &Network,
    f: &TargetFunction,
    cut_order: &[usize],
    limits: &Limits,
) -> Result<TargetFunction> {
    check_function(net, f)?;
    check_cut_order(net, cut_order)?;
    let table = GlobalTable::compute(code, net, limits)?;
    let expected = expected_outputs(f, code.k, table.matrices)?;
    let words_per = code.word_count();
    let dec = match synthesize_from(&table, &expected, cut_order, words_per, limits)? {
        Synthesis::Decoder(d) => d,
        Synthesis::Collision { .. } => return Err(Error::IllDefinedDecoder),
    };
    for &e in cut_order {
        let carried: HashSet<u32> = table.words[e].iter().copied().collect();
        if carried.len() != words_per {
            return Err(Error::NotSurjective(net.edge_id(e).to_string()));
        }
    }
    let output_size = checked_space(f.output_size(), code.k, u32::MAX as usize, "output alphabet O^k")?;
    TargetFunction::from_table(cut_order.len(), words_per, output_size, dec.table)
}
