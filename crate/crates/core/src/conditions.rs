//! Rank conditions for the existence of an LU factorization.
//!
//! A square `A` of order `n` has `A = LU` iff for every `k = 1..n`
//!
//! ```text
//! rank A[{1..k}] + k >= rank A[{1..k},{1..n}] + rank A[{1..n},{1..k}]
//! ```
//!
//! The amount by which the right side exceeds the left is the deficiency at
//! `k`; the maximum positive deficiency is the failure degree, which is also the
//! least number of extra diagonals needed in an almost-triangular factorization.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankRecord {
    pub k: usize,
    pub rank_leading: usize,
    pub rank_row_block: usize,
    pub rank_col_block: usize,
    /// `rank_row_block + rank_col_block - rank_leading - k`; negative when the
    /// condition holds with slack.
    pub deficiency: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub n: usize,
    pub per_k: Vec<RankRecord>,
    pub satisfies: bool,
    pub failure_degree: usize,
}

impl ConditionReport {
    /// First `k` whose deficiency is positive.
    pub fn first_failing_k(&self) -> Option<usize> {
        self.per_k.iter().find(|r| r.deficiency > 0).map(|r| r.k)
    }
}

pub(crate) fn require_square<F: Field>(a: &Matrix<F>) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

pub fn condition_report<F: Field>(a: &Matrix<F>) -> Result<ConditionReport> {
    let n = require_square(a)?;
    let mut per_k = Vec::with_capacity(n);
    for k in 1..=n {
        let rank_leading = a.leading(k)?.rank();
        let rank_row_block = a.submatrix(1..=k, 1..=n)?.rank();
        let rank_col_block = a.submatrix(1..=n, 1..=k)?.rank();
        let deficiency =
            rank_row_block as i64 + rank_col_block as i64 - rank_leading as i64 - k as i64;
        per_k.push(RankRecord {
            k,
            rank_leading,
            rank_row_block,
            rank_col_block,
            deficiency,
        });
    }
    let failure_degree = per_k.iter().map(|r| r.deficiency).max().unwrap_or(0).max(0) as usize;
    Ok(ConditionReport {
        n,
        per_k,
        satisfies: failure_degree == 0,
        failure_degree,
    })
}

pub fn satisfies_lu_conditions<F: Field>(a: &Matrix<F>) -> Result<bool> {
    Ok(condition_report(a)?.satisfies)
}

/// Least `m` such that `A` fails the LU rank conditions by at most `m`.
pub fn failure_degree<F: Field>(a: &Matrix<F>) -> Result<usize> {
    Ok(condition_report(a)?.failure_degree)
}

/// Prepends `m` zero rows and `m` zero columns: the result `C` has
/// `C[{m+1..n+m},{m+1..n+m}] = A` and zeros elsewhere.
pub fn border<F: Field>(a: &Matrix<F>, m: usize) -> Result<Matrix<F>> {
    let n = require_square(a)?;
    let mut c = Matrix::zeros(a.field().clone(), n + m, n + m)?;
    for r in 0..n {
        for col in 0..n {
            *c.at_mut(r + m, col + m) = a.at(r, col).clone();
        }
    }
    Ok(c)
}

/// For invertible `A`: true iff every leading principal block has full rank,
/// which is equivalent to the general rank conditions in that case.
pub fn invertible_shortcut<F: Field>(a: &Matrix<F>) -> Result<bool> {
    let n = require_square(a)?;
    if a.rank() != n {
        return Err(Error::Usage("matrix is not invertible".into()));
    }
    for k in 1..=n {
        if a.leading(k)?.rank() != k {
            return Ok(false);
        }
    }
    Ok(true)
}
