//! Matrix file format.
//!
//! ```text
//! # comment
//! 2 2 Q
//! 0 1
//! 1 0
//! ```
//!
//! The header is `<rows> <cols> <field>` with field `Q` or `F<p>`; then `rows`
//! lines of `cols` scalar tokens. Blank lines and lines starting with `#` are
//! ignored. A factor stream is a sequence of such blocks and one-line
//! permutations `[p1 p2 ... pn]`, separated by `---`. Pivot-trace lines
//! (`k=...`) may appear in a factor stream and are skipped.

use std::fmt;

use thiserror::Error;

use crate::decompose::Permutation;
use crate::field::{Field, FieldSpec, PrimeField, Rationals};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// A matrix whose field was chosen at runtime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyMatrix {
    Rational(Matrix<Rationals>),
    Prime(Matrix<PrimeField>),
}

impl AnyMatrix {
    pub fn spec(&self) -> FieldSpec {
        match self {
            AnyMatrix::Rational(m) => m.field().spec(),
            AnyMatrix::Prime(m) => m.field().spec(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            AnyMatrix::Rational(m) => (m.rows(), m.cols()),
            AnyMatrix::Prime(m) => (m.rows(), m.cols()),
        }
    }
}

impl fmt::Display for AnyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyMatrix::Rational(m) => m.fmt(f),
            AnyMatrix::Prime(m) => m.fmt(f),
        }
    }
}

/// One block of a factor stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Matrix(AnyMatrix),
    Permutation(Permutation),
}

/// Non-ignorable lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('#') && !t.starts_with("k=")).then_some((i + 1, l))
    })
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..idx]));
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize, FieldSpec), ParseError> {
    let toks = tokens(line);
    if toks.len() != 3 {
        return Err(err(line_no, 1, "expected header `<rows> <cols> <field>`"));
    }
    let dim = |(col, tok): (usize, &str), what: &str| -> Result<usize, ParseError> {
        match tok.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(err(line_no, col, format!("invalid {what} `{tok}`"))),
        }
    };
    let rows = dim(toks[0], "row count")?;
    let cols = dim(toks[1], "column count")?;
    let (fcol, ftok) = toks[2];
    let spec = ftok
        .parse::<FieldSpec>()
        .map_err(|e| err(line_no, fcol, e.to_string()))?;
    Ok((rows, cols, spec))
}

fn parse_body<F: Field>(
    field: F,
    rows: usize,
    cols: usize,
    lines: &[(usize, &str)],
    header_line: usize,
) -> Result<Matrix<F>, ParseError> {
    if lines.len() < rows {
        let at = lines.last().map_or(header_line, |l| l.0);
        return Err(err(
            at + 1,
            1,
            format!("expected {rows} rows, found {}", lines.len()),
        ));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for &(line_no, line) in &lines[..rows] {
        let toks = tokens(line);
        if toks.len() != cols {
            let col = toks.get(cols).map_or(line.chars().count() + 1, |t| t.0);
            return Err(err(
                line_no,
                col,
                format!("expected {cols} entries, found {}", toks.len()),
            ));
        }
        for (col, tok) in toks {
            let v = field
                .parse_elem(tok)
                .map_err(|e| err(line_no, col, e.to_string()))?;
            data.push(v);
        }
    }
    if let Some(&(line_no, _)) = lines.get(rows) {
        return Err(err(
            line_no,
            1,
            format!("unexpected extra row after {rows} rows"),
        ));
    }
    Ok(Matrix::from_vec(field, rows, cols, data).expect("validated shape"))
}

fn parse_matrix_lines(lines: &[(usize, &str)]) -> Result<AnyMatrix, ParseError> {
    let Some(&(hline, header)) = lines.first() else {
        return Err(err(1, 1, "empty matrix block"));
    };
    let (rows, cols, spec) = parse_header(hline, header)?;
    let body = &lines[1..];
    Ok(match spec {
        FieldSpec::Rationals => {
            AnyMatrix::Rational(parse_body(Rationals, rows, cols, body, hline)?)
        }
        FieldSpec::PrimeField(p) => {
            let f = PrimeField::new(p as u64).expect("validated by FieldSpec parsing");
            AnyMatrix::Prime(parse_body(f, rows, cols, body, hline)?)
        }
    })
}

/// Parses a file holding exactly one matrix.
pub fn parse_matrix_text(text: &str) -> Result<AnyMatrix, ParseError> {
    let lines: Vec<_> = content_lines(text).collect();
    if let Some(&(line_no, _)) = lines.iter().find(|(_, l)| l.trim() == "---") {
        return Err(err(line_no, 1, "a matrix file holds a single block"));
    }
    parse_matrix_lines(&lines)
}

fn parse_permutation(line_no: usize, line: &str) -> Result<Permutation, ParseError> {
    let t = line.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err(line_no, 1, "expected `[p1 p2 ... pn]`"))?;
    let mut images = Vec::new();
    let offset = line.find('[').unwrap_or(0) + 1;
    for (col, tok) in tokens(inner) {
        let v = tok
            .parse::<usize>()
            .map_err(|_| err(line_no, col + offset, format!("invalid index `{tok}`")))?;
        images.push(v);
    }
    if images.is_empty() {
        return Err(err(line_no, 1, "empty permutation"));
    }
    Permutation::from_one_based(&images).map_err(|e| err(line_no, 1, e.to_string()))
}

/// Parses a `---`-separated stream of matrix and permutation blocks.
pub fn parse_blocks(text: &str) -> Result<Vec<Block>, ParseError> {
    let lines: Vec<_> = content_lines(text).collect();
    let mut blocks = Vec::new();
    for chunk in lines.split(|(_, l)| l.trim() == "---") {
        let Some(&(line_no, first)) = chunk.first() else {
            let at = lines.first().map_or(1, |l| l.0);
            return Err(err(at, 1, "empty block between `---` separators"));
        };
        if first.trim_start().starts_with('[') {
            if chunk.len() > 1 {
                return Err(err(chunk[1].0, 1, "unexpected line after a permutation"));
            }
            blocks.push(Block::Permutation(parse_permutation(line_no, first)?));
        } else {
            blocks.push(Block::Matrix(parse_matrix_lines(chunk)?));
        }
    }
    Ok(blocks)
}
