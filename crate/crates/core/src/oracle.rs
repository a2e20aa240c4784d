//! Brute-force ground truth for tiny matrices over GF(2) and GF(3).
//!
//! Nothing here touches the rank kernel or the pivot search: the searches
//! enumerate candidate factors with their own residue arithmetic and test
//! products directly. Candidates are visited in lexicographic order over the
//! free entries of `W` (row-major, last entry fastest) and, for each `W`, over
//! the free entries of each row of `K`. Since the rows of `K` are independent
//! once `W` is fixed, taking the first matching row of `K` row by row yields
//! the lexicographically first witness for that `W`.

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::matrix::Matrix;

/// Largest prime and order the searches accept.
pub const MAX_PRIME: u32 = 3;
pub const MAX_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeConstraint {
    Lower,
    Upper,
    /// Zero whenever `j > i + m`.
    LowerBand(usize),
    /// Zero whenever `i > j + m`.
    UpperBand(usize),
}

impl ShapeConstraint {
    /// Whether 0-based position `(i, j)` may be nonzero.
    pub fn is_free(&self, i: usize, j: usize) -> bool {
        match *self {
            ShapeConstraint::Lower => j <= i,
            ShapeConstraint::Upper => i <= j,
            ShapeConstraint::LowerBand(m) => j <= i + m,
            ShapeConstraint::UpperBand(m) => i <= j + m,
        }
    }
}

/// A finite set of candidate factors: all `n x n` matrices over `GF(p)` with a given shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationDomain {
    pub prime: u32,
    pub n: usize,
    pub shape: ShapeConstraint,
}

impl EnumerationDomain {
    pub fn new(prime: u32, n: usize, shape: ShapeConstraint) -> Result<Self> {
        if prime > MAX_PRIME || n == 0 || n > MAX_ORDER {
            return Err(Error::Usage(format!(
                "enumeration over GF({prime}) with n={n} exceeds the caps p<={MAX_PRIME}, n<={MAX_ORDER}"
            )));
        }
        Ok(EnumerationDomain { prime, n, shape })
    }

    pub fn free_positions(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.shape.is_free(i, j))
            .collect()
    }

    /// Number of candidates, `p^(free positions)`.
    pub fn size(&self) -> u64 {
        (self.prime as u64).pow(self.free_positions().len() as u32)
    }
}

/// Dense small-residue matrix used only inside the searches.
type Small = Vec<Vec<u32>>;

fn to_small(a: &Matrix<PrimeField>) -> Small {
    a.row_slices().map(<[u32]>::to_vec).collect()
}

fn from_small(field: PrimeField, m: &Small) -> Matrix<PrimeField> {
    Matrix::from_rows(field, m.clone()).expect("search matrices are nonempty and square")
}

fn check_domain(a: &Matrix<PrimeField>) -> Result<(u32, usize)> {
    let p = a.field().modulus();
    if !a.is_square() {
        return Err(Error::Dimension("oracle needs a square matrix".into()));
    }
    EnumerationDomain::new(p, a.rows(), ShapeConstraint::Lower)?;
    Ok((p, a.rows()))
}

/// Advances `digits` as a base-`p` counter with the last digit fastest.
/// Returns false after wrapping past the last value.
fn next_digits(digits: &mut [u32], p: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < p {
            return true;
        }
        *d = 0;
    }
    false
}

/// First `(K, W)` with `K` in `lower` shape, `W` in `upper` shape and `K W = A`.
fn search(
    a: &Small,
    p: u32,
    lower: ShapeConstraint,
    upper: ShapeConstraint,
) -> Option<(Small, Small)> {
    let n = a.len();
    let w_free: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| upper.is_free(i, j))
        .collect();
    let mut w_digits = vec![0u32; w_free.len()];
    loop {
        let mut w = vec![vec![0u32; n]; n];
        for (&(i, j), &d) in w_free.iter().zip(&w_digits) {
            w[i][j] = d;
        }
        if let Some(k) = solve_rows(a, &w, p, lower) {
            return Some((k, w));
        }
        if !next_digits(&mut w_digits, p) {
            return None;
        }
    }
}

/// For fixed `W`, the lexicographically first `K` (row by row) with `K W = A`.
#[allow(clippy::needless_range_loop)]
fn solve_rows(a: &Small, w: &Small, p: u32, lower: ShapeConstraint) -> Option<Small> {
    let n = a.len();
    let mut k = Vec::with_capacity(n);
    for i in 0..n {
        let free: Vec<usize> = (0..n).filter(|&j| lower.is_free(i, j)).collect();
        let mut digits = vec![0u32; free.len()];
        let row = loop {
            let mut row = vec![0u32; n];
            for (&j, &d) in free.iter().zip(&digits) {
                row[j] = d;
            }
            let matches = (0..n).all(|c| {
                let s: u32 = (0..n).map(|t| row[t] * w[t][c]).sum();
                s % p == a[i][c]
            });
            if matches {
                break Some(row);
            }
            if !next_digits(&mut digits, p) {
                break None;
            }
        }?;
        k.push(row);
    }
    Some(k)
}

/// First LU witness by exhaustive search, if any.
pub fn find_lu_bruteforce(
    a: &Matrix<PrimeField>,
) -> Result<Option<(Matrix<PrimeField>, Matrix<PrimeField>)>> {
    let (p, _) = check_domain(a)?;
    let found = search(
        &to_small(a),
        p,
        ShapeConstraint::Lower,
        ShapeConstraint::Upper,
    );
    Ok(found.map(|(l, u)| (from_small(*a.field(), &l), from_small(*a.field(), &u))))
}

/// Whether `A = LU` for some lower triangular `L` and upper triangular `U`,
/// decided by enumeration. `A` must be over GF(2) or GF(3) with order at most 3.
pub fn exists_lu_bruteforce(a: &Matrix<PrimeField>) -> Result<bool> {
    Ok(find_lu_bruteforce(a)?.is_some())
}

/// Least `m` for which `A = KW` with `K` zero above its `m`-th superdiagonal
/// and `W` zero below its `m`-th subdiagonal, with the first witness.
pub fn find_min_extra_diagonals(
    a: &Matrix<PrimeField>,
) -> Result<(usize, Matrix<PrimeField>, Matrix<PrimeField>)> {
    let (p, n) = check_domain(a)?;
    let small = to_small(a);
    for m in 0..n {
        if let Some((k, w)) = search(
            &small,
            p,
            ShapeConstraint::LowerBand(m),
            ShapeConstraint::UpperBand(m),
        ) {
            return Ok((m, from_small(*a.field(), &k), from_small(*a.field(), &w)));
        }
    }
    Err(Error::Invariant(
        "no banded factorization even without band limits".into(),
    ))
}

pub fn min_extra_diagonals_bruteforce(a: &Matrix<PrimeField>) -> Result<usize> {
    Ok(find_min_extra_diagonals(a)?.0)
}

/// Checks `rank X + rank Y - k <= rank XY <= min(rank X, rank Y)` where `k`
/// is the inner dimension. A `false` return means the rank kernel is wrong.
pub fn frobenius_rank_bounds_check<F: Field>(x: &Matrix<F>, y: &Matrix<F>) -> Result<bool> {
    if x.cols() != y.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} and {}x{} are not conformal",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    let z = x.multiply(y)?;
    let (rx, ry, rz) = (x.rank() as i64, y.rank() as i64, z.rank() as i64);
    let k = x.cols() as i64;
    Ok(rx + ry - k <= rz && rz <= rx.min(ry))
}

/// Every `n x n` matrix over `field`, in lexicographic order of entries.
pub fn all_matrices(field: PrimeField, n: usize) -> impl Iterator<Item = Matrix<PrimeField>> {
    let p = field.modulus();
    let total = (p as u64).pow((n * n) as u32);
    (0..total).map(move |mut code| {
        let mut data = vec![0u32; n * n];
        for slot in data.iter_mut().rev() {
            *slot = (code % p as u64) as u32;
            code /= p as u64;
        }
        Matrix::from_vec(field, n, n, data).expect("nonempty square")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, rows: &[&[i64]]) -> Matrix<PrimeField> {
        Matrix::from_i64(PrimeField::new(p).unwrap(), rows).unwrap()
    }

    #[test]
    fn swap_has_no_lu() {
        assert!(!exists_lu_bruteforce(&gf(2, &[&[0, 1], &[1, 0]])).unwrap());
        assert!(!exists_lu_bruteforce(&gf(3, &[&[0, 1], &[1, 0]])).unwrap());
    }

    #[test]
    fn witness_for_lower_right_one() {
        let a = gf(2, &[&[0, 0], &[0, 1]]);
        let (l, u) = find_lu_bruteforce(&a).unwrap().unwrap();
        assert!(l.is_lower_triangular() && u.is_upper_triangular());
        assert_eq!(l.multiply(&u).unwrap(), a);
        // lexicographically first W is [[0,0],[0,1]], then K = [[0,0],[0,1]]
        assert_eq!(u, gf(2, &[&[0, 0], &[0, 1]]));
        assert_eq!(l, gf(2, &[&[0, 0], &[0, 1]]));
    }

    #[test]
    fn zero_matrix() {
        let z = gf(2, &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        assert!(exists_lu_bruteforce(&z).unwrap());
        assert_eq!(min_extra_diagonals_bruteforce(&z).unwrap(), 0);
    }

    #[test]
    fn swap_needs_one_diagonal() {
        let (m, k, w) = find_min_extra_diagonals(&gf(2, &[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(m, 1);
        assert_eq!(k.multiply(&w).unwrap(), gf(2, &[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn domain_caps() {
        assert!(exists_lu_bruteforce(&gf(5, &[&[1]])).is_err());
        let big = Matrix::zeros(PrimeField::new(2).unwrap(), 4, 4).unwrap();
        assert!(exists_lu_bruteforce(&big).is_err());
        let d = EnumerationDomain::new(2, 3, ShapeConstraint::Lower).unwrap();
        assert_eq!(d.size(), 64);
        let d = EnumerationDomain::new(2, 3, ShapeConstraint::LowerBand(1)).unwrap();
        assert_eq!(d.size(), 256);
        assert!(EnumerationDomain::new(5, 2, ShapeConstraint::Upper).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let i3 = Matrix::identity(f5, 3).unwrap();
        assert!(frobenius_rank_bounds_check(&i3, &i3).unwrap());
        let z = Matrix::zeros(f5, 3, 2).unwrap();
        let y = Matrix::from_i64(f5, &[[1, 2, 3], [4, 0, 1]]).unwrap();
        assert!(frobenius_rank_bounds_check(&z, &y).unwrap());
        assert!(frobenius_rank_bounds_check(&y, &y).is_err());
    }

    #[test]
    fn enumeration_count_and_order() {
        let f2 = PrimeField::new(2).unwrap();
        let all: Vec<_> = all_matrices(f2, 2).collect();
        assert_eq!(all.len(), 16);
        assert!(all[0].is_zero());
        assert_eq!(all[1], gf(2, &[&[0, 0], &[0, 1]]));
    }
}
