//! Command-line front end.
//!
//! Exit codes:
//! - `validate`: 0 valid, 1 violations, 2 unreadable input.
//! - `bounds`, `cuts`, `induce`: 0 success, 1 limit or analysis error, 2 unreadable input.
//! - `verify`: 0 ok, 1 counterexample, 2 unreadable input or shape mismatch.
//! - `search`: 0 found, 3 exhausted, 4 timeout, 1 space limit, 2 unreadable input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bound::{format_value, report, BoundKind, BoundOptions, BoundRequest, ReportJson};
use crate::code::{
    induce_function, parse_code, search_code, verify_code, Counterexample, SearchOptions, SearchOutcome, SourceMatrix,
    StopReason, Verdict,
};
use crate::cut::{enumerate_cuts, enumerate_strong_partitions};
use crate::error::Error;
use crate::function::{parse_function, TargetFunction};
use crate::graph::{parse_network, validate_network, Network};
use crate::Limits;

#[derive(Debug, Parser)]
#[command(
    name = "netcap",
    version,
    about = "Cut-set bounds and code tools for network function computation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Emit a single JSON document instead of text.
    #[arg(long)]
    pub json: bool,
    /// Maximum number of entries in any dense table.
    #[arg(long, value_name = "ENTRIES", default_value_t = 1 << 20)]
    pub limit_table: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundChoice {
    All,
    Footprint,
    Huang,
    Improved,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural rules of a network file.
    Validate {
        network: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the cut-set upper bounds.
    Bounds {
        network: PathBuf,
        function: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        bound: BoundChoice,
        /// Only consider cuts with at most this many edges.
        #[arg(long)]
        max_cut_size: Option<usize>,
        /// log2 of the largest assignment space enumerated per cut.
        #[arg(long, value_name = "BITS", default_value_t = 16)]
        limit_space: u32,
        #[command(flatten)]
        common: Common,
    },
    /// List every cut set with its source sets.
    Cuts {
        network: PathBuf,
        #[arg(long)]
        max_cut_size: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a code on every source matrix.
    Verify {
        network: PathBuf,
        function: PathBuf,
        code: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustively search for a (k, n) code.
    Search {
        network: PathBuf,
        function: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        timeout_seconds: Option<f64>,
        /// Stop after testing this many complete codes.
        #[arg(long)]
        max_candidates: Option<u64>,
        /// Disable cut-based pruning.
        #[arg(long)]
        no_prune: bool,
        /// log2 of the largest raw search space accepted.
        #[arg(long, value_name = "BITS", default_value_t = 40)]
        limit_space: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the function a code induces on a global cut.
    Induce {
        network: PathBuf,
        function: PathBuf,
        code: PathBuf,
        /// Comma-separated cut edges, in argument order.
        #[arg(long, value_delimiter = ',', required = true)]
        cut: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(err: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: err.to_string(),
        }
    }

    fn analysis(err: Error) -> Self {
        let code = match err {
            Error::Syntax { .. }
            | Error::DuplicateId { .. }
            | Error::UnknownNode(_)
            | Error::UnknownEdge(_)
            | Error::ShapeMismatch(_)
            | Error::InvalidFunction(_)
            | Error::NonPrime(_)
            | Error::ZeroColumn(_)
            | Error::RankDeficient { .. }
            | Error::Unsupported(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> std::result::Result<Network, Failure> {
    let net = parse_network(&read(path)?).map_err(Failure::input)?;
    let report = validate_network(&net);
    if let Some(v) = report.violations.first() {
        return Err(Failure::input(format!("invalid network: {v}")));
    }
    Ok(net)
}

fn load_function(path: &Path, limit_table: usize) -> std::result::Result<TargetFunction, Failure> {
    parse_function(&read(path)?, limit_table).map_err(Failure::analysis)
}

fn limits(common: &Common) -> Limits {
    Limits {
        max_table: common.limit_table,
        ..Limits::default()
    }
}

fn emit(out: &mut dyn Write, value: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"));
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
/// Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Validate { network, common } => cmd_validate(&network, &common, out),
        Command::Bounds {
            network,
            function,
            bound,
            max_cut_size,
            limit_space,
            common,
        } => cmd_bounds(&network, &function, bound, max_cut_size, limit_space, &common, out),
        Command::Cuts {
            network,
            max_cut_size,
            common,
        } => cmd_cuts(&network, max_cut_size, &common, out),
        Command::Verify {
            network,
            function,
            code,
            common,
        } => cmd_verify(&network, &function, &code, &common, out),
        Command::Search {
            network,
            function,
            k,
            n,
            timeout_seconds,
            max_candidates,
            no_prune,
            limit_space,
            common,
        } => {
            let opts = SearchOptions {
                timeout: timeout_seconds.map(Duration::from_secs_f64),
                max_candidates,
                prune: !no_prune,
                max_space_log2: limit_space as f64,
                limits: limits(&common),
            };
            cmd_search(&network, &function, k, n, &opts, &common, out)
        }
        Command::Induce {
            network,
            function,
            code,
            cut,
            common,
        } => cmd_induce(&network, &function, &code, &cut, &common, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_validate(path: &Path, common: &Common, out: &mut dyn Write) -> Outcome {
    let net = parse_network(&read(path)?).map_err(Failure::input)?;
    let report = validate_network(&net);
    let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    if common.json {
        emit(out, &json!({"valid": report.is_valid(), "violations": lines}));
    } else if lines.is_empty() {
        let _ = writeln!(out, "ok");
    } else {
        for line in &lines {
            let _ = writeln!(out, "{line}");
        }
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn cmd_bounds(
    net_path: &Path,
    fn_path: &Path,
    bound: BoundChoice,
    max_cut_size: Option<usize>,
    limit_space: u32,
    common: &Common,
    out: &mut dyn Write,
) -> Outcome {
    let net = load_network(net_path)?;
    let f = load_function(fn_path, common.limit_table)?;
    let request = match bound {
        BoundChoice::All => BoundRequest::ALL,
        BoundChoice::Footprint => BoundRequest::only(BoundKind::Footprint),
        BoundChoice::Huang => BoundRequest::only(BoundKind::Huang),
        BoundChoice::Improved => BoundRequest::only(BoundKind::Improved),
    };
    let opts = BoundOptions {
        limits: Limits {
            max_assignment_space: 1usize.checked_shl(limit_space).unwrap_or(usize::MAX),
            ..limits(common)
        },
        max_cut_size,
    };
    let rep = report(&net, &f, request, &opts).map_err(Failure::analysis)?;
    if common.json {
        let value = serde_json::to_value(ReportJson {
            report: &rep,
            net: &net,
        })
        .expect("json");
        emit(out, &value);
        return Ok(0);
    }
    let _ = writeln!(out, "{:<10} {:>16}  {:<16} witness", "bound", "value", "argmin");
    for kind in [BoundKind::Footprint, BoundKind::Huang, BoundKind::Improved] {
        let Some(b) = rep.get(kind) else { continue };
        let argmin = b
            .argmin
            .map(|c| net.edge_ids(c).join(","))
            .unwrap_or_else(|| "-".into());
        let mut witness = b
            .witness
            .map(|r| format!("|C|={} n={} q={}", r.edges, r.count, r.q))
            .unwrap_or_else(|| "-".into());
        if let Some(p) = &b.partition {
            let blocks: Vec<String> = p.block_ids(&net).iter().map(|b| b.join(",")).collect();
            witness.push_str(&format!(" partition={{{}}}", blocks.join("}{")));
        }
        let _ = writeln!(
            out,
            "{:<10} {:>16}  {:<16} {witness}",
            kind.name(),
            format_value(b.value()),
            argmin
        );
    }
    if rep.footprint.is_some() && rep.huang.is_some() && rep.improved.is_some() {
        let _ = writeln!(
            out,
            "ordering improved <= huang <= footprint: {}",
            if rep.ordering_holds() { "holds" } else { "VIOLATED" }
        );
    }
    Ok(0)
}

fn cmd_cuts(path: &Path, max_cut_size: Option<usize>, common: &Common, out: &mut dyn Write) -> Outcome {
    let net = load_network(path)?;
    let lim = limits(common);
    let cuts = enumerate_cuts(&net, max_cut_size, &lim).map_err(Failure::analysis)?;
    let mut records = Vec::new();
    for ctx in &cuts {
        let partitions = enumerate_strong_partitions(&net, ctx, &lim).map_err(Failure::analysis)?;
        records.push(json!({
            "cut": net.edge_ids(ctx.cut),
            "I": net.source_ids(ctx.separated),
            "J": net.source_ids(ctx.residual),
            "K": net.source_ids(ctx.reaching),
            "is_global": ctx.is_global(&net),
            "strong_partition_count": partitions.len(),
        }));
    }
    if common.json {
        emit(out, &Value::Array(records));
        return Ok(0);
    }
    for r in &records {
        let list = |key: &str| {
            r[key]
                .as_array()
                .map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(","))
                .unwrap_or_default()
        };
        let _ = writeln!(
            out,
            "cut={{{}}} I={{{}}} J={{{}}} K={{{}}} global={} strong_partitions={}",
            list("cut"),
            list("I"),
            list("J"),
            list("K"),
            r["is_global"],
            r["strong_partition_count"]
        );
    }
    Ok(0)
}

fn matrix_json(net: &Network, x: &SourceMatrix) -> Value {
    let map: serde_json::Map<String, Value> = x
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| (net.node_id(net.source_node(i)).to_string(), json!(c)))
        .collect();
    Value::Object(map)
}

fn counterexample_json(net: &Network, c: &Counterexample) -> Value {
    match c {
        Counterexample::Mismatch {
            input,
            expected,
            decoded,
        } => json!({
            "kind": "mismatch",
            "input": matrix_json(net, input),
            "expected": expected,
            "decoded": decoded,
        }),
        Counterexample::Collision {
            first,
            second,
            first_value,
            second_value,
        } => json!({
            "kind": "collision",
            "first": matrix_json(net, first),
            "second": matrix_json(net, second),
            "first_value": first_value,
            "second_value": second_value,
        }),
    }
}

fn cmd_verify(net_path: &Path, fn_path: &Path, code_path: &Path, common: &Common, out: &mut dyn Write) -> Outcome {
    let net = load_network(net_path)?;
    let f = load_function(fn_path, common.limit_table)?;
    let code = parse_code(&read(code_path)?, &net).map_err(Failure::input)?;
    let verdict = verify_code(&code, &net, &f, &limits(common)).map_err(Failure::analysis)?;
    match verdict {
        Verdict::Ok => {
            if common.json {
                emit(out, &json!({"ok": true}));
            } else {
                let _ = writeln!(out, "ok");
            }
            Ok(0)
        }
        Verdict::Fail(c) => {
            let value = counterexample_json(&net, &c);
            if common.json {
                emit(out, &json!({"ok": false, "counterexample": value}));
            } else {
                let _ = writeln!(out, "counterexample: {}", serde_json::to_string(&value).expect("json"));
            }
            Ok(1)
        }
    }
}

fn cmd_search(
    net_path: &Path,
    fn_path: &Path,
    k: usize,
    n: usize,
    opts: &SearchOptions,
    common: &Common,
    out: &mut dyn Write,
) -> Outcome {
    let net = load_network(net_path)?;
    let f = load_function(fn_path, common.limit_table)?;
    let result = search_code(&net, &f, k, n, opts).map_err(Failure::analysis)?;
    let (label, exit, code) = match &result.outcome {
        SearchOutcome::Found(c) => ("found", 0, Some(c)),
        SearchOutcome::Exhausted => ("exhausted", 3, None),
        SearchOutcome::Stopped(StopReason::Deadline | StopReason::CandidateLimit) => ("timeout", 4, None),
    };
    if common.json {
        let code_value = code.map(|c| serde_json::from_str::<Value>(&c.to_json(&net)).expect("json"));
        emit(
            out,
            &json!({
                "outcome": label,
                "code": code_value,
                "nodes": result.nodes,
                "candidates": result.candidates,
            }),
        );
    } else if let Some(c) = code {
        let _ = writeln!(out, "{}", c.to_json(&net));
    } else {
        let _ = writeln!(out, "{label}");
    }
    Ok(exit)
}

fn cmd_induce(
    net_path: &Path,
    fn_path: &Path,
    code_path: &Path,
    cut: &[String],
    common: &Common,
    out: &mut dyn Write,
) -> Outcome {
    let net = load_network(net_path)?;
    let f = load_function(fn_path, common.limit_table)?;
    let code = parse_code(&read(code_path)?, &net).map_err(Failure::input)?;
    let order = cut
        .iter()
        .map(|id| net.edge_by_id(id.trim()))
        .collect::<crate::Result<Vec<usize>>>()
        .map_err(Failure::input)?;
    let g = induce_function(&code, &net, &f, &order, &limits(common)).map_err(Failure::analysis)?;
    let _ = writeln!(out, "{}", g.to_table_json());
    Ok(0)
}
