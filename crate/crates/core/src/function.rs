//! Target functions `f: A^s -> O` stored as dense tables.
//!
//! Inputs are indexed mixed-radix with `x_1` most significant:
//! `index(x) = sum_i x_i * q^(s-i)`. The same convention is used for every
//! table in the crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{is_prime, rank_over_prime_field};

/// Default cap on the number of table entries, `2^20`.
pub const DEFAULT_TABLE_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetFunction {
    arity: usize,
    q: usize,
    output_size: usize,
    table: Vec<u32>,
}

/// `q^s`, or a limit error when it exceeds `limit`.
pub(crate) fn checked_space(q: usize, s: usize, limit: usize, what: &'static str) -> Result<usize> {
    let exceeded = || Error::LimitExceeded {
        limit: what,
        required: (q as u128).checked_pow(s as u32).unwrap_or(u128::MAX),
        allowed: limit as u128,
    };
    let size = q.checked_pow(s as u32).ok_or_else(exceeded)?;
    if size > limit {
        return Err(exceeded());
    }
    Ok(size)
}

/// Digits of `index` in base `q`, most significant first.
pub fn decode_mixed_radix(mut index: usize, q: usize, len: usize) -> Vec<u32> {
    let mut digits = vec![0; len];
    for d in digits.iter_mut().rev() {
        *d = (index % q) as u32;
        index /= q;
    }
    digits
}

pub fn encode_mixed_radix(digits: &[u32], q: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * q + d as usize)
}

impl TargetFunction {
    pub fn from_table(arity: usize, q: usize, output_size: usize, table: Vec<u32>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidFunction("arity must be at least 1".into()));
        }
        if q < 2 {
            return Err(Error::InvalidFunction("input alphabet size must be at least 2".into()));
        }
        if output_size == 0 {
            return Err(Error::InvalidFunction("output alphabet must be nonempty".into()));
        }
        let expected = q
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::InvalidFunction("table size overflows".into()))?;
        if table.len() != expected {
            return Err(Error::InvalidFunction(format!(
                "table has {} entries, expected q^s = {expected}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&v| v as usize >= output_size) {
            return Err(Error::InvalidFunction(format!(
                "table entry {bad} outside output alphabet of size {output_size}"
            )));
        }
        Ok(TargetFunction {
            arity,
            q,
            output_size,
            table,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Input alphabet size.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn eval(&self, x: &[u32]) -> u32 {
        debug_assert_eq!(x.len(), self.arity);
        self.table[encode_mixed_radix(x, self.q)]
    }

    pub fn eval_index(&self, index: usize) -> u32 {
        self.table[index]
    }

    /// Number of distinct values the function takes.
    pub fn image_size(&self) -> usize {
        let mut seen = vec![false; self.output_size];
        let mut count = 0;
        for &v in &self.table {
            if !std::mem::replace(&mut seen[v as usize], true) {
                count += 1;
            }
        }
        count
    }

    /// Serializes as a table-type function file.
    pub fn to_table_json(&self) -> String {
        let file = FunctionFile::Table {
            s: self.arity,
            q: self.q,
            output_alphabet_size: self.output_size,
            table: self.table.clone(),
        };
        serde_json::to_string(&file).expect("function serialization")
    }
}

pub fn image_size(f: &TargetFunction) -> usize {
    f.image_size()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinKind {
    ArithSum,
    ModSum,
    Max,
    Min,
    Identity,
}

impl FromStr for BuiltinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arith_sum" => Ok(BuiltinKind::ArithSum),
            "mod_sum" => Ok(BuiltinKind::ModSum),
            "max" => Ok(BuiltinKind::Max),
            "min" => Ok(BuiltinKind::Min),
            "identity" => Ok(BuiltinKind::Identity),
            other => Err(Error::Unsupported(format!("builtin function kind {other:?}"))),
        }
    }
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BuiltinKind::ArithSum => "arith_sum",
            BuiltinKind::ModSum => "mod_sum",
            BuiltinKind::Max => "max",
            BuiltinKind::Min => "min",
            BuiltinKind::Identity => "identity",
        };
        f.write_str(name)
    }
}

pub fn make_builtin(kind: BuiltinKind, s: usize, q: usize) -> Result<TargetFunction> {
    make_builtin_with_limit(kind, s, q, DEFAULT_TABLE_LIMIT)
}

pub fn make_builtin_with_limit(kind: BuiltinKind, s: usize, q: usize, table_limit: usize) -> Result<TargetFunction> {
    if s == 0 || q < 2 {
        return Err(Error::InvalidFunction("builtins need s >= 1 and q >= 2".into()));
    }
    let size = checked_space(q, s, table_limit, "function table size")?;
    let output_size = match kind {
        BuiltinKind::ArithSum => s * (q - 1) + 1,
        BuiltinKind::ModSum | BuiltinKind::Max | BuiltinKind::Min => q,
        BuiltinKind::Identity => size,
    };
    let table = (0..size)
        .map(|idx| {
            let x = decode_mixed_radix(idx, q, s);
            match kind {
                BuiltinKind::ArithSum => x.iter().sum(),
                BuiltinKind::ModSum => x.iter().sum::<u32>() % q as u32,
                BuiltinKind::Max => *x.iter().max().unwrap(),
                BuiltinKind::Min => *x.iter().min().unwrap(),
                BuiltinKind::Identity => idx as u32,
            }
        })
        .collect();
    TargetFunction::from_table(s, q, output_size, table)
}

/// An `l x s` matrix `T` over a prime field defining `f(x) = T x^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSpec {
    pub q: usize,
    pub matrix: Vec<Vec<u32>>,
}

impl LinearSpec {
    pub fn new(q: usize, matrix: Vec<Vec<u32>>) -> Result<Self> {
        let spec = LinearSpec { q, matrix };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn columns(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    /// Column `i` (0-based), i.e. the coefficients of source `i`.
    pub fn column(&self, i: usize) -> Vec<u32> {
        self.matrix.iter().map(|row| row[i]).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.q) {
            return Err(Error::NonPrime(self.q));
        }
        let s = self.columns();
        if self.matrix.is_empty() || s == 0 {
            return Err(Error::InvalidFunction(
                "linear map needs at least one row and column".into(),
            ));
        }
        if self.matrix.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidFunction("matrix rows differ in length".into()));
        }
        if self.matrix.iter().flatten().any(|&v| v as usize >= self.q) {
            return Err(Error::InvalidFunction("matrix entry outside [0, q)".into()));
        }
        if let Some(zero) = (0..s).find(|&i| self.matrix.iter().all(|row| row[i] == 0)) {
            return Err(Error::ZeroColumn(zero));
        }
        let cols: Vec<Vec<u32>> = (0..s).map(|i| self.column(i)).collect();
        let rank = rank_over_prime_field(&cols, self.q)?;
        if rank < self.rows() {
            return Err(Error::RankDeficient {
                rank,
                rows: self.rows(),
            });
        }
        Ok(())
    }
}

pub fn linear_from_spec(spec: &LinearSpec) -> Result<TargetFunction> {
    linear_from_spec_with_limit(spec, DEFAULT_TABLE_LIMIT)
}

pub fn linear_from_spec_with_limit(spec: &LinearSpec, table_limit: usize) -> Result<TargetFunction> {
    spec.validate()?;
    let (q, s, l) = (spec.q, spec.columns(), spec.rows());
    let size = checked_space(q, s, table_limit, "function table size")?;
    let output_size = checked_space(q, l, u32::MAX as usize, "linear output alphabet")?;
    let table = (0..size)
        .map(|idx| {
            let x = decode_mixed_radix(idx, q, s);
            let y: Vec<u32> = spec
                .matrix
                .iter()
                .map(|row| {
                    let dot: u64 = row.iter().zip(&x).map(|(&a, &b)| a as u64 * b as u64).sum();
                    (dot % q as u64) as u32
                })
                .collect();
            encode_mixed_radix(&y, q) as u32
        })
        .collect();
    TargetFunction::from_table(s, q, output_size, table)
}

/// The JSON function file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionFile {
    Builtin {
        kind: String,
        s: usize,
        q: usize,
    },
    Linear {
        q: usize,
        matrix: Vec<Vec<u32>>,
    },
    Table {
        s: usize,
        q: usize,
        output_alphabet_size: usize,
        table: Vec<u32>,
    },
}

pub fn parse_function(text: &str, table_limit: usize) -> Result<TargetFunction> {
    let file: FunctionFile = serde_json::from_str(text).map_err(Error::from_json)?;
    match file {
        FunctionFile::Builtin { kind, s, q } => make_builtin_with_limit(kind.parse()?, s, q, table_limit),
        FunctionFile::Linear { q, matrix } => linear_from_spec_with_limit(&LinearSpec { q, matrix }, table_limit),
        FunctionFile::Table {
            s,
            q,
            output_alphabet_size,
            table,
        } => {
            checked_space(q.max(2), s, table_limit, "function table size")?;
            TargetFunction::from_table(s, q, output_alphabet_size, table)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_examples() {
        let f = make_builtin(BuiltinKind::ArithSum, 3, 2).unwrap();
        assert_eq!(f.table(), &[0, 1, 1, 2, 1, 2, 2, 3]);
        assert_eq!(f.output_size(), 4);
        assert_eq!(f.image_size(), 4);
        let f = make_builtin(BuiltinKind::Max, 2, 2).unwrap();
        assert_eq!(f.table(), &[0, 1, 1, 1]);
        assert_eq!(f.image_size(), 2);
        let f = make_builtin(BuiltinKind::Identity, 1, 2).unwrap();
        assert_eq!(f.table(), &[0, 1]);
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(
            make_builtin(BuiltinKind::Max, 21, 2),
            Err(Error::LimitExceeded { .. })
        ));
        assert!(matches!("xor".parse::<BuiltinKind>(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn constant_function_has_image_one() {
        let f = TargetFunction::from_table(2, 2, 1, vec![0; 4]).unwrap();
        assert_eq!(f.image_size(), 1);
    }

    #[test]
    fn linear_examples() {
        let that = LinearSpec::new(2, vec![vec![1, 0, 1], vec![0, 1, 0]]).unwrap();
        let f = linear_from_spec(&that).unwrap();
        assert_eq!(f.output_size(), 4);
        for idx in 0..8 {
            let x = decode_mixed_radix(idx, 2, 3);
            let expected = ((x[0] + x[2]) % 2) * 2 + x[1];
            assert_eq!(f.eval(&x), expected);
        }
        let id = linear_from_spec(&LinearSpec::new(3, vec![vec![1, 0], vec![0, 1]]).unwrap()).unwrap();
        assert_eq!(id.output_size(), 9);
        assert_eq!(id.table(), (0..9).collect::<Vec<u32>>().as_slice());
        let xor = linear_from_spec(&LinearSpec::new(2, vec![vec![1, 1]]).unwrap()).unwrap();
        assert_eq!(xor.table(), &[0, 1, 1, 0]);
    }

    #[test]
    fn linear_errors() {
        assert_eq!(LinearSpec::new(4, vec![vec![1, 1]]).unwrap_err(), Error::NonPrime(4));
        assert_eq!(LinearSpec::new(2, vec![vec![1, 0]]).unwrap_err(), Error::ZeroColumn(1));
        assert_eq!(
            LinearSpec::new(2, vec![vec![1, 1], vec![1, 1]]).unwrap_err(),
            Error::RankDeficient { rank: 1, rows: 2 }
        );
    }

    #[test]
    fn function_files() {
        let f = parse_function(
            r#"{"type":"builtin","kind":"arith_sum","s":3,"q":2}"#,
            DEFAULT_TABLE_LIMIT,
        )
        .unwrap();
        let g = parse_function(
            r#"{"type":"table","s":3,"q":2,"output_alphabet_size":4,"table":[0,1,1,2,1,2,2,3]}"#,
            DEFAULT_TABLE_LIMIT,
        )
        .unwrap();
        assert_eq!(f, g);
        let h = parse_function(
            r#"{"type":"linear","q":2,"matrix":[[1,0,1],[0,1,0]]}"#,
            DEFAULT_TABLE_LIMIT,
        )
        .unwrap();
        assert_eq!(h.arity(), 3);
        assert_eq!(parse_function(&g.to_table_json(), DEFAULT_TABLE_LIMIT).unwrap(), g);
        assert!(parse_function(
            r#"{"type":"table","s":1,"q":2,"output_alphabet_size":2,"table":[0,2]}"#,
            DEFAULT_TABLE_LIMIT
        )
        .is_err());
        assert!(parse_function(
            r#"{"type":"builtin","kind":"max","s":2,"q":2,"x":1}"#,
            DEFAULT_TABLE_LIMIT
        )
        .is_err());
    }
}
