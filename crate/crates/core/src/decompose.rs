//! Triangular decompositions that exist for every square matrix:
//! `A = U1 L U2`, `A = L1 U L2`, `A = P L U` and `A = L U P`.
//!
//! Each one first moves `A` to a matrix `C` whose leading blocks carry as much
//! rank as its leading column blocks (`rank C[{1..k}] = rank C[{1..n},{1..k}]`
//! for every `k`), which is enough for an LU factorization of `C` to exist.
//! The move is either unit upper triangular row additions or a row
//! permutation; the other two forms follow by transposition.

use std::fmt;

use crate::conditions::{require_square, satisfies_lu_conditions};
use crate::error::{Error, Result};
use crate::factor::{lu, FactorPair, Outcome, PivotStep};
use crate::field::Field;
use crate::matrix::{row_in_span, Matrix};

/// Permutation of `{1..n}`. As a matrix, `P[i][map[i]] = 1`, so `P * A` has
/// row `map[i]` of `A` as its row `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    // 0-based images
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// From 1-based images; fails unless `map` is a bijection on `{1..n}`.
    pub fn from_one_based(map: &[usize]) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in map {
            if v < 1 || v > n || seen[v - 1] {
                return Err(Error::Usage(format!(
                    "{map:?} is not a permutation of 1..{n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation {
            map: map.iter().map(|v| v - 1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.map.swap(a, b);
    }

    pub fn to_matrix<F: Field>(&self, field: F) -> Result<Matrix<F>> {
        let n = self.map.len();
        let mut m = Matrix::zeros(field, n, n)?;
        for (i, &v) in self.map.iter().enumerate() {
            *m.at_mut(i, v) = m.field().one();
        }
        Ok(m)
    }

    /// `P * A`.
    pub fn apply_rows<F: Field>(&self, a: &Matrix<F>) -> Result<Matrix<F>> {
        if a.rows() != self.map.len() {
            return Err(Error::Dimension(format!(
                "permutation of order {} applied to {} rows",
                self.map.len(),
                a.rows()
            )));
        }
        let data = self
            .map
            .iter()
            .flat_map(|&r| a.row(r).iter().cloned())
            .collect();
        Matrix::from_vec(a.field().clone(), a.rows(), a.cols(), data)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images().iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    Ulu,
    Lul,
    Plu,
    Lup,
}

impl fmt::Display for DecompositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecompositionKind::Ulu => "ulu",
            DecompositionKind::Lul => "lul",
            DecompositionKind::Plu => "plu",
            DecompositionKind::Lup => "lup",
        })
    }
}

/// Shape claimed for one factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Lower,
    Upper,
    InvertibleLower,
    InvertibleUpper,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor<F: Field> {
    Matrix(Matrix<F>),
    Permutation(Permutation),
}

impl<F: Field> Factor<F> {
    pub fn to_matrix(&self, field: &F) -> Result<Matrix<F>> {
        match self {
            Factor::Matrix(m) => Ok(m.clone()),
            Factor::Permutation(p) => p.to_matrix(field.clone()),
        }
    }

    /// Whether this factor really has the claimed shape.
    pub fn has_shape(&self, shape: Shape) -> bool {
        match (self, shape) {
            (Factor::Permutation(_), Shape::Permutation) => true,
            (Factor::Matrix(m), Shape::Lower) => m.is_square() && m.is_lower_triangular(),
            (Factor::Matrix(m), Shape::Upper) => m.is_square() && m.is_upper_triangular(),
            (Factor::Matrix(m), Shape::InvertibleLower) => {
                m.is_square() && m.is_lower_triangular() && nonzero_diagonal(m)
            }
            (Factor::Matrix(m), Shape::InvertibleUpper) => {
                m.is_square() && m.is_upper_triangular() && nonzero_diagonal(m)
            }
            _ => false,
        }
    }
}

fn nonzero_diagonal<F: Field>(m: &Matrix<F>) -> bool {
    (0..m.rows()).all(|i| !m.field().is_zero(m.at(i, i)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriDecomposition<F: Field> {
    pub kind: DecompositionKind,
    /// In multiplication order: the product of the three is the input.
    pub factors: [Factor<F>; 3],
    pub shapes: [Shape; 3],
    /// Pivot trace of the inner LU run.
    pub trace: Vec<PivotStep>,
}

impl<F: Field> TriDecomposition<F> {
    pub fn product(&self, field: &F) -> Result<Matrix<F>> {
        let [a, b, c] = &self.factors;
        a.to_matrix(field)?
            .multiply(&b.to_matrix(field)?)?
            .multiply(&c.to_matrix(field)?)
    }

    pub fn shapes_hold(&self) -> bool {
        self.factors
            .iter()
            .zip(self.shapes)
            .all(|(f, s)| f.has_shape(s))
    }
}

/// `rank C[{1..k}] < rank C[{1..n},{1..k}]`, i.e. the column block has a
/// row outside the span of the leading block's rows.
fn leading_rank_short<F: Field>(c: &Matrix<F>, k: usize) -> Result<bool> {
    let n = c.rows();
    Ok(c.leading(k)?.rank() < c.submatrix(1..=n, 1..=k)?.rank())
}

/// Smallest 0-based row index `i > k` whose `(k+1)`-prefix is outside the row
/// span of the leading `(k+1) x (k+1)` block.
fn first_row_outside_span<F: Field>(c: &Matrix<F>, k: usize) -> Result<Option<usize>> {
    let n = c.rows();
    let lead = c.leading(k + 1)?;
    for i in k + 1..n {
        let prefix = c.submatrix(i + 1..=i + 1, 1..=k + 1)?;
        if !row_in_span(&prefix, &lead)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn check_leading_ranks<F: Field>(c: &Matrix<F>, what: &str) -> Result<()> {
    for k in 1..=c.rows() {
        if leading_rank_short(c, k)? {
            return Err(Error::Invariant(format!(
                "{what}: leading rank still short at k={k}"
            )));
        }
    }
    Ok(())
}

/// Unit upper triangular `M` and `C = M * A` with
/// `rank C[{1..k}] = rank C[{1..n},{1..k}]` for all `k`.
///
/// At each short `k` the first lower row whose prefix leaves the span of the
/// leading block is added (with coefficient 1) to row `k`. One addition per `k`
/// suffices, since appending a column raises the column-block rank by at most
/// one. Row `k` is only touched at step `k`.
pub fn ulu_transform<F: Field>(a: &Matrix<F>) -> Result<(Matrix<F>, Matrix<F>)> {
    let n = require_square(a)?;
    let mut c = a.clone();
    let mut m = Matrix::identity(a.field().clone(), n)?;
    for k in 0..n {
        if !leading_rank_short(&c, k + 1)? {
            continue;
        }
        let i = first_row_outside_span(&c, k)?.ok_or_else(|| {
            Error::Invariant(format!("no row to repair leading rank at k={}", k + 1))
        })?;
        c.add_row(k, i);
        m.add_row(k, i);
    }
    check_leading_ranks(&c, "ulu transform")?;
    Ok((m, c))
}

/// Permutation `P0` such that `C = P0 * A` has
/// `rank C[{1..k}] = rank C[{1..n},{1..k}]` for all `k`. At each short `k`,
/// row `k` is swapped with the first lower row whose prefix leaves the span of
/// the leading block.
pub fn plu_permutation<F: Field>(a: &Matrix<F>) -> Result<Permutation> {
    let n = require_square(a)?;
    let mut c = a.clone();
    let mut p0 = Permutation::identity(n);
    for k in 0..n {
        if !leading_rank_short(&c, k + 1)? {
            continue;
        }
        let i = first_row_outside_span(&c, k)?.ok_or_else(|| {
            Error::Invariant(format!("no row to repair leading rank at k={}", k + 1))
        })?;
        c.swap_rows(k, i);
        p0.swap(k, i);
    }
    check_leading_ranks(&c, "plu permutation")?;
    Ok(p0)
}

/// Inverse of an upper triangular matrix with nonzero diagonal, by back substitution.
fn upper_inverse<F: Field>(u: &Matrix<F>) -> Result<Matrix<F>> {
    let n = require_square(u)?;
    let f = u.field().clone();
    let mut x = Matrix::zeros(f.clone(), n, n)?;
    for j in 0..n {
        for i in (0..=j).rev() {
            let mut acc = if i == j { f.one() } else { f.zero() };
            for k in i + 1..=j {
                acc = f.sub(&acc, &f.mul(u.at(i, k), x.at(k, j)));
            }
            let d = f.inv(u.at(i, i)).ok_or(Error::DivisionByZero)?;
            *x.at_mut(i, j) = f.mul(&acc, &d);
        }
    }
    Ok(x)
}

fn lu_of_repaired<F: Field>(c: &Matrix<F>) -> Result<FactorPair<F>> {
    match lu(c)? {
        Outcome::Factored(pair) => Ok(pair),
        Outcome::NotFactorable(_) => Err(Error::Invariant(
            "repaired matrix has no LU factorization".into(),
        )),
    }
}

/// `A = U1 L U2` with `U1` unit upper triangular, `L` lower and `U2` upper triangular.
pub fn ulu<F: Field>(a: &Matrix<F>) -> Result<TriDecomposition<F>> {
    let (m, c) = ulu_transform(a)?;
    if !satisfies_lu_conditions(&c)? {
        return Err(Error::Invariant(
            "ulu transform output fails the LU conditions".into(),
        ));
    }
    let pair = lu_of_repaired(&c)?;
    let u1 = upper_inverse(&m)?;
    Ok(TriDecomposition {
        kind: DecompositionKind::Ulu,
        factors: [
            Factor::Matrix(u1),
            Factor::Matrix(pair.lower),
            Factor::Matrix(pair.upper),
        ],
        shapes: [Shape::InvertibleUpper, Shape::Lower, Shape::Upper],
        trace: pair.trace,
    })
}

/// `A = L1 U L2` with `L2` unit lower triangular, from `ulu` of the transpose.
pub fn lul<F: Field>(a: &Matrix<F>) -> Result<TriDecomposition<F>> {
    let t = ulu(&a.transpose())?;
    let [u1, l, u2] = t.factors.map(|f| match f {
        Factor::Matrix(m) => m.transpose(),
        Factor::Permutation(_) => unreachable!("ulu has no permutation factor"),
    });
    Ok(TriDecomposition {
        kind: DecompositionKind::Lul,
        factors: [Factor::Matrix(u2), Factor::Matrix(l), Factor::Matrix(u1)],
        shapes: [Shape::Lower, Shape::Upper, Shape::InvertibleLower],
        trace: t.trace,
    })
}

/// `A = P L U` with `P` a permutation.
pub fn plu<F: Field>(a: &Matrix<F>) -> Result<TriDecomposition<F>> {
    let p0 = plu_permutation(a)?;
    let c = p0.apply_rows(a)?;
    let pair = lu_of_repaired(&c)?;
    Ok(TriDecomposition {
        kind: DecompositionKind::Plu,
        factors: [
            Factor::Permutation(p0.inverse()),
            Factor::Matrix(pair.lower),
            Factor::Matrix(pair.upper),
        ],
        shapes: [Shape::Permutation, Shape::Lower, Shape::Upper],
        trace: pair.trace,
    })
}

/// `A = L U P` with `P` a permutation, from `plu` of the transpose.
pub fn lup<F: Field>(a: &Matrix<F>) -> Result<TriDecomposition<F>> {
    let t = plu(&a.transpose())?;
    let [p, l0, u0] = t.factors;
    let (Factor::Permutation(p), Factor::Matrix(l0), Factor::Matrix(u0)) = (p, l0, u0) else {
        unreachable!("plu factors are (permutation, matrix, matrix)");
    };
    Ok(TriDecomposition {
        kind: DecompositionKind::Lup,
        factors: [
            Factor::Matrix(u0.transpose()),
            Factor::Matrix(l0.transpose()),
            Factor::Permutation(p.inverse()),
        ],
        shapes: [Shape::Lower, Shape::Upper, Shape::Permutation],
        trace: t.trace,
    })
}

pub fn decompose<F: Field>(kind: DecompositionKind, a: &Matrix<F>) -> Result<TriDecomposition<F>> {
    match kind {
        DecompositionKind::Ulu => ulu(a),
        DecompositionKind::Lul => lul(a),
        DecompositionKind::Plu => plu(a),
        DecompositionKind::Lup => lup(a),
    }
}
