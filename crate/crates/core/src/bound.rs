//! The three cut-set upper bounds and the per-cut report behind them.
//!
//! Every bound has the form `min_C |C| / log_q n_C` for some count `n_C`.
//! Ratios are compared exactly: `c1 / log n1 < c2 / log n2` iff
//! `n2^c1 < n1^c2`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::cut::{enumerate_cuts, CutContext, StrongPartition};
use crate::equivalence::{n_c_f, Assignment};
use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::graph::Network;
use crate::sets::EdgeSet;
use crate::Limits;

/// `edges / log_q count`, infinite when `count = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub edges: usize,
    pub count: u128,
    pub q: usize,
}

impl Ratio {
    pub fn new(edges: usize, count: u128, q: usize) -> Self {
        debug_assert!(count >= 1 && q >= 2);
        Ratio { edges, count, q }
    }

    pub fn is_infinite(&self) -> bool {
        self.count <= 1
    }

    /// `e` with `count = q^e`, if there is one.
    fn exact_exponent(&self) -> Option<u32> {
        let mut power = 1u128;
        let mut e = 0;
        while power < self.count {
            power = power.checked_mul(self.q as u128)?;
            e += 1;
        }
        (power == self.count).then_some(e)
    }

    pub fn value(&self) -> f64 {
        if self.is_infinite() {
            return f64::INFINITY;
        }
        match self.exact_exponent() {
            Some(e) => self.edges as f64 / e as f64,
            None => self.edges as f64 * (self.q as f64).ln() / (self.count as f64).ln(),
        }
    }

    /// Exact comparison. Ratios over different `q` are compared in floating
    /// point.
    pub fn cmp_exact(&self, other: &Ratio) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
        if self.q != other.q {
            return self.value().total_cmp(&other.value());
        }
        // c1 / log n1 vs c2 / log n2  <=>  n2^c1 vs n1^c2
        let lhs = BigUint::from(other.count).pow(self.edges as u32);
        let rhs = BigUint::from(self.count).pow(other.edges as u32);
        lhs.cmp(&rhs)
    }
}

/// Significant-digit formatting shared by the text and JSON outputs.
pub fn format_value(v: f64) -> String {
    if v.is_infinite() {
        return "inf".to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let digits = 12i32;
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_value(self.value()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Footprint,
    Huang,
    Improved,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Footprint => "footprint",
            BoundKind::Huang => "huang",
            BoundKind::Improved => "improved",
        }
    }
}

/// Per-cut quantities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutRow {
    pub ctx: CutContext,
    pub is_global: bool,
    /// `|f(A^s)|`, present on global cuts.
    pub image: Option<usize>,
    pub w: Option<usize>,
    pub n: Option<usize>,
    pub partition: Option<StrongPartition>,
    pub a_j_star: Option<Assignment>,
    pub per_class: Option<Vec<usize>>,
    pub strong_partitions: Option<usize>,
}

impl CutRow {
    pub fn size(&self) -> usize {
        self.ctx.cut.len()
    }

    pub fn ratio(&self, kind: BoundKind, q: usize) -> Option<Ratio> {
        let count = match kind {
            BoundKind::Footprint => self.image?,
            BoundKind::Huang => self.w?,
            BoundKind::Improved => self.n?,
        };
        Some(Ratio::new(self.size(), count as u128, q))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// `None` when no cut qualifies; the bound is then infinite.
    pub witness: Option<Ratio>,
    pub argmin: Option<EdgeSet>,
    pub partition: Option<StrongPartition>,
    pub a_j_star: Option<Assignment>,
    pub per_class: Option<Vec<usize>>,
}

impl BoundReport {
    pub fn value(&self) -> f64 {
        self.witness.map_or(f64::INFINITY, |r| r.value())
    }

    pub fn is_infinite(&self) -> bool {
        self.witness.is_none_or(|r| r.is_infinite())
    }
}

/// Which quantities to compute per cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundRequest {
    pub footprint: bool,
    pub huang: bool,
    pub improved: bool,
}

impl BoundRequest {
    pub const ALL: BoundRequest = BoundRequest {
        footprint: true,
        huang: true,
        improved: true,
    };

    pub fn only(kind: BoundKind) -> Self {
        BoundRequest {
            footprint: kind == BoundKind::Footprint,
            huang: kind == BoundKind::Huang,
            improved: kind == BoundKind::Improved,
        }
    }

    fn includes(&self, kind: BoundKind) -> bool {
        match kind {
            BoundKind::Footprint => self.footprint,
            BoundKind::Huang => self.huang,
            BoundKind::Improved => self.improved,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundOptions {
    pub limits: Limits,
    pub max_cut_size: Option<usize>,
}

fn check_shapes(net: &Network, f: &TargetFunction) -> Result<()> {
    if f.arity() != net.source_count() {
        return Err(Error::ShapeMismatch(format!(
            "function arity {} but the network has {} sources",
            f.arity(),
            net.source_count()
        )));
    }
    if f.q() != net.alphabet_size() {
        return Err(Error::ShapeMismatch(format!(
            "function alphabet {} but the network alphabet is {}",
            f.q(),
            net.alphabet_size()
        )));
    }
    Ok(())
}

pub fn cut_rows(net: &Network, f: &TargetFunction, request: BoundRequest, opts: &BoundOptions) -> Result<Vec<CutRow>> {
    check_shapes(net, f)?;
    let image = f.image_size();
    let cuts = enumerate_cuts(net, opts.max_cut_size, &opts.limits)?;
    let mut rows = Vec::with_capacity(cuts.len());
    for ctx in cuts {
        let is_global = ctx.is_global(net);
        let mut row = CutRow {
            ctx,
            is_global,
            image: (is_global && request.footprint).then_some(image),
            w: None,
            n: None,
            partition: None,
            a_j_star: None,
            per_class: None,
            strong_partitions: None,
        };
        if request.improved {
            let count = n_c_f(f, net, &ctx, &opts.limits)?;
            row.w = request.huang.then_some(count.trivial_value);
            row.n = Some(count.value);
            row.strong_partitions = Some(count.partitions_considered);
            row.a_j_star = Some(count.count.a_j_star);
            row.per_class = Some(count.count.per_class);
            row.partition = Some(count.partition);
        } else if request.huang {
            row.w = Some(crate::equivalence::w_c_f(f, &ctx, &opts.limits)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn minimize(rows: &[CutRow], kind: BoundKind, q: usize) -> BoundReport {
    let mut best: Option<(Ratio, &CutRow)> = None;
    for row in rows {
        let Some(r) = row.ratio(kind, q) else { continue };
        if best.as_ref().is_none_or(|(b, _)| r.cmp_exact(b) == Ordering::Less) {
            best = Some((r, row));
        }
    }
    let improved = kind == BoundKind::Improved;
    match best {
        Some((r, row)) if !r.is_infinite() => BoundReport {
            kind,
            witness: Some(r),
            argmin: Some(row.ctx.cut),
            partition: if improved { row.partition.clone() } else { None },
            a_j_star: if improved { row.a_j_star.clone() } else { None },
            per_class: if improved { row.per_class.clone() } else { None },
        },
        _ => BoundReport {
            kind,
            witness: None,
            argmin: None,
            partition: None,
            a_j_star: None,
            per_class: None,
        },
    }
}

/// `min` over global cuts of `|C| / log_q |f(A^s)|`.
pub fn bound_footprint(net: &Network, f: &TargetFunction, opts: &BoundOptions) -> Result<BoundReport> {
    let rows = cut_rows(net, f, BoundRequest::only(BoundKind::Footprint), opts)?;
    Ok(minimize(&rows, BoundKind::Footprint, net.alphabet_size()))
}

/// `min` over all cuts of `|C| / log_q w_{C,f}`.
pub fn bound_huang(net: &Network, f: &TargetFunction, opts: &BoundOptions) -> Result<BoundReport> {
    let rows = cut_rows(net, f, BoundRequest::only(BoundKind::Huang), opts)?;
    Ok(minimize(&rows, BoundKind::Huang, net.alphabet_size()))
}

/// `min` over all cuts of `|C| / log_q n_{C,f}`.
pub fn bound_improved(net: &Network, f: &TargetFunction, opts: &BoundOptions) -> Result<BoundReport> {
    let rows = cut_rows(net, f, BoundRequest::only(BoundKind::Improved), opts)?;
    Ok(minimize(&rows, BoundKind::Improved, net.alphabet_size()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullReport {
    pub q: usize,
    pub footprint: Option<BoundReport>,
    pub huang: Option<BoundReport>,
    pub improved: Option<BoundReport>,
    pub rows: Vec<CutRow>,
}

impl FullReport {
    /// `improved <= huang <= footprint` among the bounds present.
    pub fn ordering_holds(&self) -> bool {
        let present: Vec<&BoundReport> = [&self.improved, &self.huang, &self.footprint]
            .into_iter()
            .flatten()
            .collect();
        present.windows(2).all(|w| match (w[0].witness, w[1].witness) {
            (_, None) => true,
            (None, Some(b)) => b.is_infinite(),
            (Some(a), Some(b)) => a.cmp_exact(&b) != Ordering::Greater,
        })
    }

    pub fn get(&self, kind: BoundKind) -> Option<&BoundReport> {
        match kind {
            BoundKind::Footprint => self.footprint.as_ref(),
            BoundKind::Huang => self.huang.as_ref(),
            BoundKind::Improved => self.improved.as_ref(),
        }
    }
}

pub fn report(net: &Network, f: &TargetFunction, request: BoundRequest, opts: &BoundOptions) -> Result<FullReport> {
    let rows = cut_rows(net, f, request, opts)?;
    let q = net.alphabet_size();
    let pick = |kind| request.includes(kind).then(|| minimize(&rows, kind, q));
    Ok(FullReport {
        q,
        footprint: pick(BoundKind::Footprint),
        huang: pick(BoundKind::Huang),
        improved: pick(BoundKind::Improved),
        rows,
    })
}

pub fn full_report(net: &Network, f: &TargetFunction, opts: &BoundOptions) -> Result<FullReport> {
    report(net, f, BoundRequest::ALL, opts)
}

/// Serializable view of a [`FullReport`]; edge and source names resolved
/// against the network.
pub struct ReportJson<'a> {
    pub report: &'a FullReport,
    pub net: &'a Network,
}

struct ValueJson(f64);

impl Serialize for ValueJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(serde::Serialize)]
struct WitnessJson {
    edges: usize,
    n: u128,
    q: usize,
}

#[derive(serde::Serialize)]
struct BoundJson {
    value: ValueJson,
    display: String,
    argmin: Vec<String>,
    witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<Vec<String>>>,
    #[serde(rename = "aJ_star", skip_serializing_if = "Option::is_none")]
    a_j_star: Option<Vec<(String, u32)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_class: Option<Vec<usize>>,
}

#[derive(serde::Serialize)]
struct RowJson {
    cut: Vec<String>,
    size: usize,
    #[serde(rename = "I")]
    separated: Vec<String>,
    #[serde(rename = "J")]
    residual: Vec<String>,
    is_global: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    image: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<Vec<String>>>,
    #[serde(rename = "aJ_star", skip_serializing_if = "Option::is_none")]
    a_j_star: Option<Vec<(String, u32)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    footprint_ratio: Option<ValueJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    huang_ratio: Option<ValueJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    improved_ratio: Option<ValueJson>,
}

fn named_assignment(net: &Network, a: &Assignment) -> Vec<(String, u32)> {
    net.source_ids(a.over)
        .into_iter()
        .zip(a.values.iter().copied())
        .collect()
}

impl ReportJson<'_> {
    fn bound(&self, b: &BoundReport) -> BoundJson {
        let net = self.net;
        BoundJson {
            value: ValueJson(b.value()),
            display: format_value(b.value()),
            argmin: b.argmin.map(|c| net.edge_ids(c)).unwrap_or_default(),
            witness: b.witness.map(|r| WitnessJson {
                edges: r.edges,
                n: r.count,
                q: r.q,
            }),
            partition: b.partition.as_ref().map(|p| p.block_ids(net)),
            a_j_star: b.a_j_star.as_ref().map(|a| named_assignment(net, a)),
            per_class: b.per_class.clone(),
        }
    }

    fn row(&self, row: &CutRow) -> RowJson {
        let net = self.net;
        let q = self.report.q;
        let ratio = |kind| row.ratio(kind, q).map(|r| ValueJson(r.value()));
        RowJson {
            cut: net.edge_ids(row.ctx.cut),
            size: row.size(),
            separated: net.source_ids(row.ctx.separated),
            residual: net.source_ids(row.ctx.residual),
            is_global: row.is_global,
            image: row.image,
            w: row.w,
            n: row.n,
            partition: row.partition.as_ref().map(|p| p.block_ids(net)),
            a_j_star: row.a_j_star.as_ref().map(|a| named_assignment(net, a)),
            footprint_ratio: ratio(BoundKind::Footprint),
            huang_ratio: ratio(BoundKind::Huang),
            improved_ratio: ratio(BoundKind::Improved),
        }
    }
}

impl Serialize for ReportJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = self.report;
        let mut st = s.serialize_struct("Report", 5)?;
        for (name, b) in [
            ("footprint", &r.footprint),
            ("huang", &r.huang),
            ("improved", &r.improved),
        ] {
            if let Some(b) = b {
                st.serialize_field(name, &self.bound(b))?;
            }
        }
        st.serialize_field("ordering_holds", &r.ordering_holds())?;
        let rows: Vec<RowJson> = r.rows.iter().map(|row| self.row(row)).collect();
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert_eq!(Ratio::new(2, 4, 2).value(), 1.0);
        assert_eq!(Ratio::new(2, 8, 2).value(), 2.0 / 3.0);
        assert!(Ratio::new(3, 1, 2).value().is_infinite());
        let v = Ratio::new(2, 6, 2).value();
        assert!((v - 2.0 / (1.0 + 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn exact_comparison() {
        // 2 / log 6 < 1 / log 2 = 1
        assert_eq!(Ratio::new(2, 6, 2).cmp_exact(&Ratio::new(1, 2, 2)), Ordering::Less);
        // 2 / log 4 = 1 / log 2
        assert_eq!(Ratio::new(2, 4, 2).cmp_exact(&Ratio::new(1, 2, 2)), Ordering::Equal);
        assert_eq!(Ratio::new(1, 1, 2).cmp_exact(&Ratio::new(9, 2, 2)), Ordering::Greater);
        assert_eq!(Ratio::new(1, 1, 2).cmp_exact(&Ratio::new(5, 1, 2)), Ordering::Equal);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_value(2.0 / (1.0 + 3f64.log2())), "0.773705614469");
        assert_eq!(format_value(2.0), "2");
        assert_eq!(format_value(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_value(f64::INFINITY), "inf");
        assert_eq!(format_value(1234.5), "1234.5");
    }
}
