//! The priority-pivot factorizer and the LU / extra-diagonal / extra-column
//! front-ends built on it.
//!
//! Positions of an `n x n` matrix are numbered by a symmetric priority: walking
//! `i = 1..n`, `j = i..n` and giving `(i, j)` and `(j, i)` the next counter
//! value. For `n = 4`:
//!
//! ```text
//! 1 2 3 4
//! 2 5 6 7
//! 3 6 8 9
//! 4 7 9 10
//! ```
//!
//! Each of the `n` steps takes the nonzero residual entry of least priority
//! (the position on or above the diagonal wins against its mirror), emits the
//! pivot column into `L` and the scaled pivot row into `U`, and subtracts their
//! outer product from the residual. `L * U = A` always holds; `L` and `U` are
//! triangular exactly when `A` satisfies the LU rank conditions, and in general
//! their off-triangle spread equals the failure degree of `A`.

use std::fmt;

use serde::Serialize;

use crate::conditions::{border, condition_report, require_square, ConditionReport};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

/// Priority of position `(i, j)` (1-based) in an `n x n` matrix.
pub fn priority(i: usize, j: usize, n: usize) -> Result<usize> {
    if i < 1 || j < 1 || i > n || j > n {
        return Err(Error::Usage(format!(
            "position ({i},{j}) outside an order-{n} matrix"
        )));
    }
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    Ok((lo - 1) * n - (lo - 1) * lo.saturating_sub(2) / 2 + (hi - lo + 1))
}

/// One step of the pivot search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PivotStep {
    pub step: usize,
    /// 1-based `(row, col)`; `None` once the residual is zero.
    pub pivot: Option<(usize, usize)>,
    pub priority: Option<usize>,
}

impl fmt::Display for PivotStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.pivot, self.priority) {
            (Some((i, j)), Some(p)) => write!(f, "k={} pivot=({i},{j}) priority={p}", self.step),
            _ => write!(f, "k={} pivot=none", self.step),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPair<F: Field> {
    pub lower: Matrix<F>,
    pub upper: Matrix<F>,
    /// Largest `j - i` with `L[i][j] != 0`, clamped at zero.
    pub extra_lower: usize,
    /// Largest `i - j` with `U[i][j] != 0`, clamped at zero.
    pub extra_upper: usize,
    pub trace: Vec<PivotStep>,
}

impl<F: Field> FactorPair<F> {
    pub fn is_triangular(&self) -> bool {
        self.extra_lower == 0 && self.extra_upper == 0
    }

    /// Extra diagonals needed by the worse of the two factors.
    pub fn extra_diagonals(&self) -> usize {
        self.extra_lower.max(self.extra_upper)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HvFactorization<F: Field> {
    pub extra: usize,
    /// `n x (n+m)`, lower triangular in its last `n` columns.
    pub h: Matrix<F>,
    /// `(n+m) x n`, upper triangular in its last `n` rows.
    pub v: Matrix<F>,
    pub trace: Vec<PivotStep>,
}

/// A requested factorization that does not exist, with the evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoFactorization<F: Field> {
    pub extra: usize,
    pub report: ConditionReport,
    /// The unconditional pair produced by the pivot search.
    pub pair: FactorPair<F>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T, F: Field> {
    Factored(T),
    NotFactorable(Box<NoFactorization<F>>),
}

impl<T, F: Field> Outcome<T, F> {
    pub fn factored(self) -> Option<T> {
        match self {
            Outcome::Factored(t) => Some(t),
            Outcome::NotFactorable(_) => None,
        }
    }

    pub fn is_factored(&self) -> bool {
        matches!(self, Outcome::Factored(_))
    }
}

/// Runs the priority-pivot search on a square matrix. The result always
/// multiplies back to `a`.
pub fn priority_pivot<F: Field>(a: &Matrix<F>) -> Result<FactorPair<F>> {
    let n = require_square(a)?;
    let f = a.field().clone();
    let mut residual = a.clone();
    let mut lower = Matrix::zeros(f.clone(), n, n)?;
    let mut upper = Matrix::zeros(f.clone(), n, n)?;
    let mut trace = Vec::with_capacity(n);

    for k in 0..n {
        let Some((pr, pc)) = find_pivot(&residual) else {
            // residual is zero; it stays zero, so every later step is empty too
            trace.extend((k..n).map(|s| PivotStep {
                step: s + 1,
                pivot: None,
                priority: None,
            }));
            break;
        };
        let inv = f.inv(residual.at(pr, pc)).expect("pivot is nonzero");
        for r in 0..n {
            *lower.at_mut(r, k) = residual.at(r, pc).clone();
        }
        for c in 0..n {
            *upper.at_mut(k, c) = f.mul(residual.at(pr, c), &inv);
        }
        for r in 0..n {
            let lr = lower.at(r, k).clone();
            if f.is_zero(&lr) {
                continue;
            }
            for c in 0..n {
                let uc = upper.at(k, c);
                if f.is_zero(uc) {
                    continue;
                }
                let v = f.sub(residual.at(r, c), &f.mul(&lr, uc));
                *residual.at_mut(r, c) = v;
            }
        }
        trace.push(PivotStep {
            step: k + 1,
            pivot: Some((pr + 1, pc + 1)),
            priority: Some(priority(pr + 1, pc + 1, n)?),
        });
    }

    let extra_lower = lower.extra_above_diagonal();
    let extra_upper = upper.extra_below_diagonal();
    Ok(FactorPair {
        lower,
        upper,
        extra_lower,
        extra_upper,
        trace,
    })
}

/// Nonzero entry of least priority (0-based), scanning in priority order.
fn find_pivot<F: Field>(m: &Matrix<F>) -> Option<(usize, usize)> {
    let n = m.rows();
    let f = m.field();
    for i in 0..n {
        for j in i..n {
            if !f.is_zero(m.at(i, j)) {
                return Some((i, j));
            }
            if !f.is_zero(m.at(j, i)) {
                return Some((j, i));
            }
        }
    }
    None
}

/// `A = LU` with `L` lower and `U` upper triangular, when one exists.
pub fn lu<F: Field>(a: &Matrix<F>) -> Result<Outcome<FactorPair<F>, F>> {
    kw_factor(a, 0)
}

/// `A = KW` with `K` zero above its `m`-th superdiagonal and `W` zero below its
/// `m`-th subdiagonal. Exists iff the failure degree of `A` is at most `m`.
pub fn kw_factor<F: Field>(a: &Matrix<F>, m: usize) -> Result<Outcome<FactorPair<F>, F>> {
    let pair = priority_pivot(a)?;
    if pair.extra_diagonals() <= m {
        return Ok(Outcome::Factored(pair));
    }
    Ok(Outcome::NotFactorable(Box::new(NoFactorization {
        extra: m,
        report: condition_report(a)?,
        pair,
    })))
}

/// Extra-diagonal factors obtained by running the search on `A` bordered with
/// `m` zero rows and columns, then cutting `K = L[{m+1..n+m},{1..n}]` and
/// `W = U[{1..n},{m+1..n+m}]`. Agrees entrywise with [`kw_factor`].
pub fn kw_factor_bordered<F: Field>(a: &Matrix<F>, m: usize) -> Result<Outcome<FactorPair<F>, F>> {
    let n = require_square(a)?;
    let c = border(a, m)?;
    let big = priority_pivot(&c)?;
    let k = big.lower.submatrix(m + 1..=n + m, 1..=n)?;
    let w = big.upper.submatrix(1..=n, m + 1..=n + m)?;
    let (extra_lower, extra_upper) = (k.extra_above_diagonal(), w.extra_below_diagonal());
    // pivots of the bordered run always sit inside the A block
    let trace = big
        .trace
        .into_iter()
        .take(n)
        .map(|s| {
            let pivot = s.pivot.map(|(i, j)| (i - m, j - m));
            let priority = pivot.map(|(i, j)| priority(i, j, n)).transpose()?;
            Ok(PivotStep {
                step: s.step,
                pivot,
                priority,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pair = FactorPair {
        lower: k,
        upper: w,
        extra_lower,
        extra_upper,
        trace,
    };
    if big.extra_lower == 0 && big.extra_upper == 0 {
        return Ok(Outcome::Factored(pair));
    }
    Ok(Outcome::NotFactorable(Box::new(NoFactorization {
        extra: m,
        report: condition_report(a)?,
        pair,
    })))
}

/// `A = HV` with `H` an `n x (n+m)` matrix lower triangular in its last `n`
/// columns and `V` an `(n+m) x n` matrix upper triangular in its last `n` rows.
///
/// Built from the LU factorization of `A` bordered by `m` zero rows and
/// columns; the pivot search leaves the first `m` rows of `L` and the first `m`
/// columns of `U` zero, which this checks before cutting out `H` and `V`.
pub fn hv_factor<F: Field>(a: &Matrix<F>, m: usize) -> Result<Outcome<HvFactorization<F>, F>> {
    let n = require_square(a)?;
    let c = border(a, m)?;
    let pair = priority_pivot(&c)?;
    if !pair.is_triangular() {
        let direct = priority_pivot(a)?;
        return Ok(Outcome::NotFactorable(Box::new(NoFactorization {
            extra: m,
            report: condition_report(a)?,
            pair: direct,
        })));
    }
    if m > 0 {
        let top_rows_zero = pair.lower.submatrix(1..=m, 1..=n + m)?.is_zero();
        let left_cols_zero = pair.upper.submatrix(1..=n + m, 1..=m)?.is_zero();
        if !top_rows_zero || !left_cols_zero {
            return Err(Error::Invariant(
                "bordered LU has nonzero entries in the border rows of L or columns of U".into(),
            ));
        }
    }
    let h = pair.lower.submatrix(m + 1..=n + m, 1..=n + m)?;
    let v = pair.upper.submatrix(1..=n + m, m + 1..=n + m)?;
    Ok(Outcome::Factored(HvFactorization {
        extra: m,
        h,
        v,
        trace: pair.trace,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn q(rows: &[&[i64]]) -> Matrix<Rationals> {
        Matrix::from_i64(Rationals, rows).unwrap()
    }

    #[allow(clippy::needless_range_loop)]
    /// Counter walk over `(i, j)`, `j >= i`, assigning both mirrors.
    fn priority_table_by_counter(n: usize) -> Vec<Vec<usize>> {
        let mut t = vec![vec![0; n]; n];
        let mut counter = 0;
        for i in 0..n {
            for j in i..n {
                counter += 1;
                t[i][j] = counter;
                t[j][i] = counter;
            }
        }
        t
    }

    #[test]
    fn priority_closed_form_matches_counter() {
        for n in 1..=7 {
            let table = priority_table_by_counter(n);
            for i in 1..=n {
                for j in 1..=n {
                    assert_eq!(
                        priority(i, j, n).unwrap(),
                        table[i - 1][j - 1],
                        "n={n} ({i},{j})"
                    );
                    assert_eq!(priority(i, j, n).unwrap(), priority(j, i, n).unwrap());
                }
            }
        }
        assert!(priority(0, 1, 3).is_err());
        assert!(priority(1, 4, 3).is_err());
    }

    #[test]
    fn priority_values_cover_triangle() {
        for n in 1..=6 {
            let mut counts = vec![0usize; n * (n + 1) / 2 + 1];
            for i in 1..=n {
                for j in 1..=n {
                    counts[priority(i, j, n).unwrap()] += 1;
                }
            }
            assert_eq!(counts[0], 0);
            // diagonal positions appear once, off-diagonal values twice
            let diag: Vec<usize> = (1..=n).map(|i| priority(i, i, n).unwrap()).collect();
            for (v, &c) in counts.iter().enumerate().skip(1) {
                assert_eq!(c, if diag.contains(&v) { 1 } else { 2 });
            }
        }
    }

    #[test]
    fn pivot_on_lower_right_one() {
        let a = q(&[&[0, 0], &[0, 1]]);
        let pair = priority_pivot(&a).unwrap();
        assert_eq!(pair.trace[0].pivot, Some((2, 2)));
        assert_eq!(pair.trace[1].pivot, None);
        assert_eq!(pair.lower, q(&[&[0, 0], &[1, 0]]));
        assert_eq!(pair.upper, q(&[&[0, 1], &[0, 0]]));
        assert!(pair.is_triangular());
    }

    #[test]
    fn swap_matrix_pivots() {
        let a = q(&[&[0, 1], &[1, 0]]);
        let pair = priority_pivot(&a).unwrap();
        assert_eq!(pair.trace[0].pivot, Some((1, 2)));
        assert_eq!(pair.trace[1].pivot, Some((2, 1)));
        assert_eq!(pair.lower, Matrix::identity(Rationals, 2).unwrap());
        assert_eq!(pair.upper, a);
        assert_eq!((pair.extra_lower, pair.extra_upper), (0, 1));
        assert_eq!(pair.trace[0].to_string(), "k=1 pivot=(1,2) priority=2");
    }

    #[test]
    fn zero_matrix_gives_zero_factors() {
        let z = Matrix::zeros(Rationals, 3, 3).unwrap();
        let pair = priority_pivot(&z).unwrap();
        assert!(pair.lower.is_zero() && pair.upper.is_zero());
        assert_eq!(pair.trace.len(), 3);
        assert_eq!(pair.trace[2].to_string(), "k=3 pivot=none");
    }

    #[test]
    fn lu_outcomes() {
        assert!(lu(&q(&[&[0, 0], &[0, 1]])).unwrap().is_factored());
        match lu(&q(&[&[0, 1], &[1, 0]])).unwrap() {
            Outcome::NotFactorable(nf) => {
                assert_eq!(nf.report.per_k[0].deficiency, 1);
                assert_eq!(nf.pair.extra_upper, 1);
            }
            Outcome::Factored(_) => panic!("swap matrix has no LU"),
        }
        let i = Matrix::identity(Rationals, 3).unwrap();
        let pair = lu(&i).unwrap().factored().unwrap();
        assert_eq!(pair.lower, i);
        assert_eq!(pair.upper, i);
    }

    #[test]
    fn kw_on_swap_matrix() {
        let a = q(&[&[0, 1], &[1, 0]]);
        let pair = kw_factor(&a, 1).unwrap().factored().unwrap();
        assert_eq!(pair.lower, Matrix::identity(Rationals, 2).unwrap());
        assert_eq!(pair.upper, a);
        assert!(!kw_factor(&a, 0).unwrap().is_factored());
        let bordered = kw_factor_bordered(&a, 1).unwrap().factored().unwrap();
        assert_eq!(bordered.lower, pair.lower);
        assert_eq!(bordered.upper, pair.upper);
    }

    #[test]
    fn hv_on_swap_matrix() {
        let a = q(&[&[0, 1], &[1, 0]]);
        let c = border(&a, 1).unwrap();
        let big = priority_pivot(&c).unwrap();
        assert_eq!(big.lower, q(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(big.upper, q(&[&[0, 0, 1], &[0, 1, 0], &[0, 0, 0]]));

        let hv = hv_factor(&a, 1).unwrap().factored().unwrap();
        assert_eq!(hv.h, q(&[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(hv.v, q(&[&[0, 1], &[1, 0], &[0, 0]]));
        assert_eq!(hv.h.multiply(&hv.v).unwrap(), a);
        assert!(hv.h.submatrix(1..=2, 2..=3).unwrap().is_lower_triangular());
        assert!(hv.v.submatrix(2..=3, 1..=2).unwrap().is_upper_triangular());
        assert!(!hv_factor(&a, 0).unwrap().is_factored());
    }

    #[test]
    fn hv_zero_matrix() {
        let z = Matrix::zeros(Rationals, 2, 2).unwrap();
        let hv = hv_factor(&z, 1).unwrap().factored().unwrap();
        assert_eq!((hv.h.rows(), hv.h.cols()), (2, 3));
        assert_eq!((hv.v.rows(), hv.v.cols()), (3, 2));
        assert!(hv.h.multiply(&hv.v).unwrap().is_zero());
    }

    #[test]
    fn hv_with_no_border_matches_lu() {
        let a = q(&[&[2, 1, 0], &[4, 3, 1], &[0, 1, 5]]);
        let pair = lu(&a).unwrap().factored().unwrap();
        let hv = hv_factor(&a, 0).unwrap().factored().unwrap();
        assert_eq!(hv.h, pair.lower);
        assert_eq!(hv.v, pair.upper);
    }

    #[test]
    fn reconstruction_over_f5() {
        let f5 = PrimeField::new(5).unwrap();
        let a = Matrix::from_i64(f5, &[[0, 2, 3], [1, 4, 0], [2, 3, 3]]).unwrap();
        let pair = priority_pivot(&a).unwrap();
        assert_eq!(pair.lower.multiply(&pair.upper).unwrap(), a);
    }
}
