//! Dense matrices over an exact [`Field`].
//!
//! Storage is row-major and 0-based internally, but every public accessor and
//! range argument uses 1-based inclusive indices: `a.submatrix(1..=k, 1..=n)`
//! is the block written `A[{1..k},{1..n}]`.

use std::fmt;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Result<Self> {
        check_shape(rows, cols)?;
        let data = vec![field.zero(); rows * cols];
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn identity(field: F, n: usize) -> Result<Self> {
        let mut m = Self::zeros(field, n, n)?;
        for i in 0..n {
            m.data[i * n + i] = m.field.one();
        }
        Ok(m)
    }

    /// Builds a matrix from row-major element data.
    pub fn from_vec(field: F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        check_shape(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: F, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(field, r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from small integers.
    pub fn from_i64<R: AsRef<[i64]>>(field: F, rows: &[R]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|row| row.as_ref().iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, rows)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> Option<&F::Elem> {
        if (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j) {
            Some(&self.data[(i - 1) * self.cols + (j - 1)])
        } else {
            None
        }
    }

    /// Entry `(i, j)`, 1-based, as a field-tagged scalar.
    pub fn entry(&self, i: usize, j: usize) -> Result<Scalar<F>> {
        self.get(i, j)
            .map(|v| Scalar::new(self.field.clone(), v.clone()))
            .ok_or_else(|| {
                Error::Usage(format!(
                    "index ({i},{j}) outside a {}x{} matrix",
                    self.rows, self.cols
                ))
            })
    }

    /// Sets entry `(i, j)`, 1-based.
    pub fn set(&mut self, i: usize, j: usize, value: F::Elem) -> Result<()> {
        if !(1..=self.rows).contains(&i) || !(1..=self.cols).contains(&j) {
            return Err(Error::Usage(format!(
                "index ({i},{j}) outside a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        self.data[(i - 1) * self.cols + (j - 1)] = value;
        Ok(())
    }

    /// Rows as slices, top to bottom.
    pub fn row_slices(&self) -> impl DoubleEndedIterator<Item = &[F::Elem]> + ExactSizeIterator {
        self.data.chunks(self.cols)
    }

    pub(crate) fn at(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    pub(crate) fn at_mut(&mut self, r: usize, c: usize) -> &mut F::Elem {
        &mut self.data[r * self.cols + c]
    }

    pub(crate) fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `row[dst] += row[src]` (0-based).
    pub(crate) fn add_row(&mut self, dst: usize, src: usize) {
        for c in 0..self.cols {
            let v = self.field.add(self.at(dst, c), self.at(src, c));
            *self.at_mut(dst, c) = v;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.spec(),
                right: other.field.spec(),
            });
        }
        Ok(())
    }

    /// Copy of the block `A[rows, cols]` with 1-based inclusive ranges.
    pub fn submatrix(
        &self,
        rows: RangeInclusive<usize>,
        cols: RangeInclusive<usize>,
    ) -> Result<Self> {
        let (r0, r1) = (*rows.start(), *rows.end());
        let (c0, c1) = (*cols.start(), *cols.end());
        if r0 < 1 || r0 > r1 || r1 > self.rows || c0 < 1 || c0 > c1 || c1 > self.cols {
            return Err(Error::Usage(format!(
                "block [{{{r0}..{r1}}},{{{c0}..{c1}}}] is outside a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let data = (r0 - 1..r1)
            .flat_map(|r| self.row(r)[c0 - 1..c1].iter().cloned())
            .collect();
        Self::from_vec(self.field.clone(), r1 - r0 + 1, c1 - c0 + 1, data)
    }

    /// Leading principal block `A[{1..k}]`.
    pub fn leading(&self, k: usize) -> Result<Self> {
        self.submatrix(1..=k, 1..=k)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f.clone(), self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let v = f.add(out.at(i, j), &f.mul(a, b));
                    *out.at_mut(i, j) = v;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "cannot subtract {}x{} from {}x{}",
                other.rows, other.cols, self.rows, self.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.sub(a, b))
            .collect();
        Self::from_vec(self.field.clone(), self.rows, self.cols, data)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.at(r, c).clone());
            }
        }
        Matrix {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Exact rank by Gaussian elimination, taking the first nonzero entry in
    /// each column as pivot.
    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| !f.is_zero(m.at(r, c))) else {
                continue;
            };
            m.swap_rows(rank, p);
            let inv = f.inv(m.at(rank, c)).expect("pivot is nonzero");
            for r in rank + 1..m.rows {
                if f.is_zero(m.at(r, c)) {
                    continue;
                }
                let factor = f.mul(m.at(r, c), &inv);
                for cc in c..m.cols {
                    let v = f.sub(m.at(r, cc), &f.mul(&factor, m.at(rank, cc)));
                    *m.at_mut(r, cc) = v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// `self` stacked on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::from_vec(self.field.clone(), self.rows + other.rows, self.cols, data)
    }

    /// Largest `j - i` over nonzero entries, clamped at zero. A square matrix
    /// is lower triangular iff this is zero.
    pub fn extra_above_diagonal(&self) -> usize {
        let mut extra = 0;
        for r in 0..self.rows {
            for c in r + 1..self.cols {
                if !self.field.is_zero(self.at(r, c)) {
                    extra = extra.max(c - r);
                }
            }
        }
        extra
    }

    /// Largest `i - j` over nonzero entries, clamped at zero.
    pub fn extra_below_diagonal(&self) -> usize {
        let mut extra = 0;
        for r in 0..self.rows {
            for c in 0..r.min(self.cols) {
                if !self.field.is_zero(self.at(r, c)) {
                    extra = extra.max(r - c);
                }
            }
        }
        extra
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.extra_above_diagonal() == 0
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.extra_below_diagonal() == 0
    }

    /// First entry (1-based, row-major order) where the two matrices differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((1, 1));
        }
        self.data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| a != b)
            .map(|idx| (idx / self.cols + 1, idx % self.cols + 1))
    }

    pub fn format_entry(&self, i: usize, j: usize) -> Option<String> {
        self.get(i, j).map(|v| self.field.format_elem(v))
    }
}

/// True iff `v` (a single row) lies in the row space of `s`.
pub fn row_in_span<F: Field>(v: &Matrix<F>, s: &Matrix<F>) -> Result<bool> {
    if v.rows != 1 {
        return Err(Error::Dimension(format!(
            "expected a row vector, got {} rows",
            v.rows
        )));
    }
    let stacked = s.vstack(v)?;
    Ok(stacked.rank() == s.rank())
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!(
            "{rows}x{cols} matrix has no entries"
        )));
    }
    Ok(())
}

impl<F: Field> fmt::Display for Matrix<F> {
    /// Matrix-file block: a `rows cols field` header followed by the rows.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.field.spec())?;
        for row in self.row_slices() {
            let tokens: Vec<String> = row.iter().map(|x| self.field.format_elem(x)).collect();
            writeln!(f, "{}", tokens.join(" "))?;
        }
        Ok(())
    }
}
