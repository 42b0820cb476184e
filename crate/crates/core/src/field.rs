//! Arithmetic and Gaussian elimination over prime fields F_p.

use crate::error::{Error, Result};

pub fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of a nonzero element (Fermat).
fn inverse(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Rank over F_q of the matrix whose columns are `columns`. Entries are
/// reduced mod q first. An empty column set has rank 0.
pub fn rank_over_prime_field(columns: &[Vec<u32>], q: usize) -> Result<usize> {
    if !is_prime(q) {
        return Err(Error::NonPrime(q));
    }
    let p = q as u64;
    // Eliminate on the columns as row vectors; row rank equals column rank.
    let mut rows: Vec<Vec<u64>> = columns
        .iter()
        .map(|c| c.iter().map(|&x| x as u64 % p).collect())
        .collect();
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::ShapeMismatch("columns differ in length".into()));
    }
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inverse(rows[rank][col], p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (x, &y) in row[col..width].iter_mut().zip(&pivot_row[col..width]) {
                    *x = (*x + p - factor * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    Ok(rank)
}
