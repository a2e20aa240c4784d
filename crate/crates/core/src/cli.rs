//! Command-line front end.
//!
//! Exit codes: 0 the requested factorization exists (or was verified), 1 it
//! does not, 2 usage or parse error, 3 internal invariant violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::conditions::{condition_report, ConditionReport};
use crate::decompose::{decompose, DecompositionKind, Factor, Permutation};
use crate::error::Error;
use crate::factor::{hv_factor, kw_factor, Outcome, PivotStep};
use crate::field::{Field, PrimeField};
use crate::format::{parse_blocks, parse_matrix_text, AnyMatrix, Block};
use crate::matrix::Matrix;
use crate::{conditions, factor, oracle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FACTORABLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "exact-lu",
    about = "Exact LU and almost-LU factorizations over Q and GF(p)"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Args)]
struct Common {
    /// Matrix file: `<rows> <cols> <Q|Fp>` header, then the rows.
    input: PathBuf,
    /// Print the pivot trace, one line per step.
    #[arg(long)]
    trace: bool,
    /// Emit one JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct WithExtra {
    /// Number of extra diagonals (kw) or extra columns/rows (hv).
    #[arg(long, required = true)]
    extra: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Report the rank conditions and the failure degree.
    Check(Common),
    /// A = L U.
    Lu(Common),
    /// A = K W with `--extra` extra diagonals.
    Kw(WithExtra),
    /// A = H V with `--extra` extra columns / rows.
    Hv(WithExtra),
    /// A = U1 L U2.
    Ulu(Common),
    /// A = L1 U L2.
    Lul(Common),
    /// A = P L U.
    Plu(Common),
    /// A = L U P.
    Lup(Common),
    /// Multiply factor blocks and compare with the original matrix.
    Verify {
        /// Original matrix, or a stream whose first block is the original.
        input: PathBuf,
        /// Factor stream as printed by a factorization verb.
        factors: Option<PathBuf>,
        /// Emit one JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run the exhaustive oracle sweeps over GF(2) and GF(3).
    Selftest {
        /// Emit one JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(code: i32, stdout: String) -> Self {
        CliOutput {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        CliOutput {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

fn error_output(e: &Error) -> CliOutput {
    let code = if e.is_internal() {
        EXIT_INTERNAL
    } else {
        EXIT_USAGE
    };
    CliOutput::fail(code, format!("error: {e}\n"))
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput::fail(EXIT_USAGE, text)
            } else {
                CliOutput::ok(EXIT_OK, text)
            };
        }
    };
    match cli.verb {
        Verb::Check(c) => with_matrix(&c.input, |m| match m {
            AnyMatrix::Rational(a) => check(&a, &c),
            AnyMatrix::Prime(a) => check(&a, &c),
        }),
        Verb::Lu(c) => factor_verb(&c, Request::Extra(Diagonals, 0)),
        Verb::Kw(w) => factor_verb(&w.common, Request::Extra(Diagonals, w.extra)),
        Verb::Hv(w) => factor_verb(&w.common, Request::Extra(Columns, w.extra)),
        Verb::Ulu(c) => factor_verb(&c, Request::Tri(DecompositionKind::Ulu)),
        Verb::Lul(c) => factor_verb(&c, Request::Tri(DecompositionKind::Lul)),
        Verb::Plu(c) => factor_verb(&c, Request::Tri(DecompositionKind::Plu)),
        Verb::Lup(c) => factor_verb(&c, Request::Tri(DecompositionKind::Lup)),
        Verb::Verify {
            input,
            factors,
            json,
        } => verify(&input, factors.as_deref(), json),
        Verb::Selftest { json } => selftest(json),
    }
}

fn read(path: &Path) -> Result<String, CliOutput> {
    std::fs::read_to_string(path).map_err(|e| {
        CliOutput::fail(
            EXIT_USAGE,
            format!("error: cannot read {}: {e}\n", path.display()),
        )
    })
}

fn with_matrix(path: &Path, f: impl FnOnce(AnyMatrix) -> CliOutput) -> CliOutput {
    let text = match read(path) {
        Ok(t) => t,
        Err(out) => return out,
    };
    match parse_matrix_text(&text) {
        Ok(m) => f(m),
        Err(e) => CliOutput::fail(EXIT_USAGE, format!("error: {}: {e}\n", path.display())),
    }
}

fn report_table(report: &ConditionReport) -> String {
    let headers = [
        "k".to_string(),
        "rank A[{1..k}]".to_string(),
        format!("rank A[{{1..k}},{{1..{}}}]", report.n),
        format!("rank A[{{1..{}}},{{1..k}}]", report.n),
        "deficiency".to_string(),
    ];
    let rows: Vec<[String; 5]> = report
        .per_k
        .iter()
        .map(|r| {
            [
                r.k.to_string(),
                r.rank_leading.to_string(),
                r.rank_row_block.to_string(),
                r.rank_col_block.to_string(),
                r.deficiency.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..5)
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain([headers[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(&headers)).unwrap();
    for r in &rows {
        writeln!(out, "{}", line(r)).unwrap();
    }
    let verdict = if report.satisfies {
        "LU factorization exists"
    } else {
        "no LU factorization"
    };
    writeln!(out, "verdict: {verdict}").unwrap();
    writeln!(out, "failure degree: {}", report.failure_degree).unwrap();
    out
}

fn matrix_json<F: Field>(m: &Matrix<F>) -> Value {
    Value::Array(
        m.row_slices()
            .map(|row| {
                row.iter()
                    .map(|x| Value::String(m.field().format_elem(x)))
                    .collect()
            })
            .collect(),
    )
}

fn report_json(report: &ConditionReport, verdict: &str) -> serde_json::Map<String, Value> {
    let mut obj = serde_json::Map::new();
    obj.insert("verdict".into(), json!(verdict));
    obj.insert("failure_degree".into(), json!(report.failure_degree));
    obj.insert(
        "per_k".into(),
        serde_json::to_value(&report.per_k).expect("serializable"),
    );
    obj.insert("factors".into(), json!([]));
    obj
}

fn render_json(obj: serde_json::Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
    s.push('\n');
    s
}

fn check<F: Field>(a: &Matrix<F>, c: &Common) -> CliOutput {
    let report = match condition_report(a) {
        Ok(r) => r,
        Err(e) => return error_output(&e),
    };
    let code = if report.satisfies {
        EXIT_OK
    } else {
        EXIT_NOT_FACTORABLE
    };
    let stdout = if c.json {
        let verdict = if report.satisfies {
            "exists"
        } else {
            "does-not-exist"
        };
        render_json(report_json(&report, verdict))
    } else {
        report_table(&report)
    };
    CliOutput::ok(code, stdout)
}

#[derive(Debug, Clone, Copy)]
enum ExtraKind {
    Diagonals,
    Columns,
}
use ExtraKind::{Columns, Diagonals};

#[derive(Debug, Clone, Copy)]
enum Request {
    Extra(ExtraKind, usize),
    Tri(DecompositionKind),
}

/// Factors in application order, ready for printing.
enum Emitted<F: Field> {
    Matrix(Matrix<F>),
    Permutation(Permutation),
}

fn factor_verb(c: &Common, req: Request) -> CliOutput {
    with_matrix(&c.input, |m| match m {
        AnyMatrix::Rational(a) => run_factor(&a, c, req),
        AnyMatrix::Prime(a) => run_factor(&a, c, req),
    })
}

fn run_factor<F: Field>(a: &Matrix<F>, c: &Common, req: Request) -> CliOutput {
    match compute_factors(a, req) {
        Ok(Ok((factors, trace))) => emit_factors(a, c, factors, &trace),
        Ok(Err(nf)) => emit_failure(c, req, &nf),
        Err(e) => error_output(&e),
    }
}

type Computed<F> = (Vec<Emitted<F>>, Vec<PivotStep>);

fn compute_factors<F: Field>(
    a: &Matrix<F>,
    req: Request,
) -> crate::Result<Result<Computed<F>, Box<factor::NoFactorization<F>>>> {
    Ok(match req {
        Request::Extra(Diagonals, m) => match kw_factor(a, m)? {
            Outcome::Factored(p) => Ok((
                vec![Emitted::Matrix(p.lower), Emitted::Matrix(p.upper)],
                p.trace,
            )),
            Outcome::NotFactorable(nf) => Err(nf),
        },
        Request::Extra(Columns, m) => match hv_factor(a, m)? {
            Outcome::Factored(hv) => {
                Ok((vec![Emitted::Matrix(hv.h), Emitted::Matrix(hv.v)], hv.trace))
            }
            Outcome::NotFactorable(nf) => Err(nf),
        },
        Request::Tri(kind) => {
            let d = decompose(kind, a)?;
            if !d.shapes_hold() {
                return Err(Error::Invariant(format!(
                    "{kind} factors have the wrong shape"
                )));
            }
            let factors = d
                .factors
                .into_iter()
                .map(|f| match f {
                    Factor::Matrix(m) => Emitted::Matrix(m),
                    Factor::Permutation(p) => Emitted::Permutation(p),
                })
                .collect();
            Ok((factors, d.trace))
        }
    })
}

fn emit_factors<F: Field>(
    a: &Matrix<F>,
    c: &Common,
    factors: Vec<Emitted<F>>,
    trace: &[PivotStep],
) -> CliOutput {
    if c.json {
        let report = match condition_report(a) {
            Ok(r) => r,
            Err(e) => return error_output(&e),
        };
        let mut obj = report_json(&report, "exists");
        let mut mats = Vec::with_capacity(factors.len());
        for f in &factors {
            match f {
                Emitted::Matrix(m) => mats.push(matrix_json(m)),
                Emitted::Permutation(p) => match p.to_matrix(a.field().clone()) {
                    Ok(m) => mats.push(matrix_json(&m)),
                    Err(e) => return error_output(&e),
                },
            }
        }
        obj.insert("factors".into(), Value::Array(mats));
        if c.trace {
            obj.insert("trace".into(), trace_json(trace));
        }
        return CliOutput::ok(EXIT_OK, render_json(obj));
    }
    let mut out = String::new();
    if c.trace {
        for step in trace {
            writeln!(out, "{step}").unwrap();
        }
    }
    let blocks: Vec<String> = factors
        .iter()
        .map(|f| match f {
            Emitted::Matrix(m) => m.to_string(),
            Emitted::Permutation(p) => format!("{p}\n"),
        })
        .collect();
    out.push_str(&blocks.join("---\n"));
    CliOutput::ok(EXIT_OK, out)
}

fn trace_json(trace: &[PivotStep]) -> Value {
    Value::Array(trace.iter().map(|s| json!(s.to_string())).collect())
}

fn emit_failure<F: Field>(c: &Common, req: Request, nf: &factor::NoFactorization<F>) -> CliOutput {
    let what = match req {
        Request::Extra(Diagonals, 0) => "no LU factorization".to_string(),
        Request::Extra(Diagonals, m) => format!("no factorization with {m} extra diagonals"),
        Request::Extra(Columns, m) => format!("no factorization with {m} extra columns/rows"),
        Request::Tri(kind) => format!("no {kind} factorization"),
    };
    if c.json {
        let mut obj = report_json(&nf.report, "does-not-exist");
        if c.trace {
            obj.insert("trace".into(), trace_json(&nf.pair.trace));
        }
        return CliOutput::ok(EXIT_NOT_FACTORABLE, render_json(obj));
    }
    let mut out = String::new();
    writeln!(
        out,
        "{what}: failure degree {} exceeds {}",
        nf.report.failure_degree, nf.extra
    )
    .unwrap();
    if c.trace {
        for step in &nf.pair.trace {
            writeln!(out, "{step}").unwrap();
        }
    }
    out.push_str(&report_table(&nf.report));
    writeln!(
        out,
        "pivot search: {} extra diagonal(s) in L, {} in U",
        nf.pair.extra_lower, nf.pair.extra_upper
    )
    .unwrap();
    CliOutput::ok(EXIT_NOT_FACTORABLE, out)
}

fn verify(input: &Path, factors: Option<&Path>, json: bool) -> CliOutput {
    let text = match read(input) {
        Ok(t) => t,
        Err(out) => return out,
    };
    let parsed = match factors {
        Some(path) => {
            let ftext = match read(path) {
                Ok(t) => t,
                Err(out) => return out,
            };
            parse_matrix_text(&text)
                .map_err(|e| format!("{}: {e}", input.display()))
                .and_then(|target| {
                    parse_blocks(&ftext)
                        .map(|b| (target, b))
                        .map_err(|e| format!("{}: {e}", path.display()))
                })
        }
        None => parse_blocks(&text)
            .map_err(|e| format!("{}: {e}", input.display()))
            .and_then(|mut blocks| {
                if blocks.is_empty() {
                    return Err(format!("{}: no blocks", input.display()));
                }
                match blocks.remove(0) {
                    Block::Matrix(m) => Ok((m, blocks)),
                    Block::Permutation(_) => {
                        Err(format!("{}: first block must be a matrix", input.display()))
                    }
                }
            }),
    };
    let (target, blocks) = match parsed {
        Ok(p) => p,
        Err(msg) => return CliOutput::fail(EXIT_USAGE, format!("error: {msg}\n")),
    };
    if blocks.is_empty() {
        return CliOutput::fail(EXIT_USAGE, "error: no factor blocks to multiply\n".into());
    }
    match target {
        AnyMatrix::Rational(a) => verify_product(&a, &blocks, json, |b| match b {
            AnyMatrix::Rational(m) => Some(m.clone()),
            AnyMatrix::Prime(_) => None,
        }),
        AnyMatrix::Prime(a) => verify_product(&a, &blocks, json, |b| match b {
            AnyMatrix::Prime(m) => Some(m.clone()),
            AnyMatrix::Rational(_) => None,
        }),
    }
}

fn verify_product<F: Field>(
    a: &Matrix<F>,
    blocks: &[Block],
    json: bool,
    cast: impl Fn(&AnyMatrix) -> Option<Matrix<F>>,
) -> CliOutput {
    let mut product: Option<Matrix<F>> = None;
    for (idx, block) in blocks.iter().enumerate() {
        let m = match block {
            Block::Matrix(b) => match cast(b) {
                Some(m) if m.field() == a.field() => m,
                _ => {
                    return CliOutput::fail(
                        EXIT_USAGE,
                        format!(
                            "error: factor {} is over {}, expected {}\n",
                            idx + 1,
                            b.spec(),
                            a.field().spec()
                        ),
                    )
                }
            },
            Block::Permutation(p) => match p.to_matrix(a.field().clone()) {
                Ok(m) => m,
                Err(e) => return error_output(&e),
            },
        };
        product = Some(match product {
            None => m,
            Some(acc) => match acc.multiply(&m) {
                Ok(p) => p,
                Err(e) => return error_output(&e),
            },
        });
    }
    let product = product.expect("at least one block");
    let mismatch = if (product.rows(), product.cols()) != (a.rows(), a.cols()) {
        Some(format!(
            "product is {}x{}, expected {}x{}",
            product.rows(),
            product.cols(),
            a.rows(),
            a.cols()
        ))
    } else {
        product.first_difference(a).map(|(i, j)| {
            format!(
                "first difference at ({i},{j}): expected {}, got {}",
                a.format_entry(i, j).unwrap_or_default(),
                product.format_entry(i, j).unwrap_or_default()
            )
        })
    };
    let code = if mismatch.is_some() {
        EXIT_NOT_FACTORABLE
    } else {
        EXIT_OK
    };
    let stdout = if json {
        let mut obj = serde_json::Map::new();
        obj.insert(
            "verdict".into(),
            json!(if mismatch.is_some() {
                "mismatch"
            } else {
                "verified"
            }),
        );
        if let Some(msg) = &mismatch {
            obj.insert("detail".into(), json!(msg));
        }
        obj.insert("factors".into(), json!(blocks.len()));
        render_json(obj)
    } else {
        match &mismatch {
            None => format!(
                "verified: product of {} factors equals the matrix\n",
                blocks.len()
            ),
            Some(msg) => format!("mismatch: {msg}\n"),
        }
    };
    CliOutput::ok(code, stdout)
}

/// Outcome of one exhaustive sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep {
    pub name: String,
    pub checked: usize,
    pub agreed: usize,
    /// First disagreeing matrix, in file format.
    pub first_counterexample: Option<String>,
}

impl Sweep {
    pub fn passed(&self) -> bool {
        self.checked == self.agreed
    }
}

fn sweep(
    name: String,
    field: PrimeField,
    n: usize,
    agree: impl Fn(&Matrix<PrimeField>) -> crate::Result<bool>,
) -> crate::Result<Sweep> {
    let mut s = Sweep {
        name,
        checked: 0,
        agreed: 0,
        first_counterexample: None,
    };
    for a in oracle::all_matrices(field, n) {
        s.checked += 1;
        if agree(&a)? {
            s.agreed += 1;
        } else if s.first_counterexample.is_none() {
            s.first_counterexample = Some(a.to_string());
        }
    }
    Ok(s)
}

/// LU existence: rank conditions, brute force and the pivot search agree.
fn lu_agreement(a: &Matrix<PrimeField>) -> crate::Result<bool> {
    let by_ranks = conditions::satisfies_lu_conditions(a)?;
    let by_search = oracle::exists_lu_bruteforce(a)?;
    let by_pivots = factor::lu(a)?.is_factored();
    Ok(by_ranks == by_search && by_search == by_pivots)
}

/// Extra diagonals: failure degree, brute force and the pivot search agree.
fn kw_agreement(a: &Matrix<PrimeField>) -> crate::Result<bool> {
    let degree = conditions::failure_degree(a)?;
    let brute = oracle::min_extra_diagonals_bruteforce(a)?;
    let pair = factor::priority_pivot(a)?;
    Ok(degree == brute && brute == pair.extra_diagonals())
}

/// The exhaustive sweeps behind `selftest`.
pub fn selftest_sweeps() -> crate::Result<Vec<Sweep>> {
    let f2 = PrimeField::new(2)?;
    let f3 = PrimeField::new(3)?;
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(sweep(
            format!("lu-existence GF(2) n={n}"),
            f2,
            n,
            lu_agreement,
        )?);
    }
    for n in 1..=2 {
        out.push(sweep(
            format!("lu-existence GF(3) n={n}"),
            f3,
            n,
            lu_agreement,
        )?);
    }
    for n in 1..=3 {
        out.push(sweep(
            format!("extra-diagonals GF(2) n={n}"),
            f2,
            n,
            kw_agreement,
        )?);
    }
    Ok(out)
}

fn selftest(json: bool) -> CliOutput {
    let sweeps = match selftest_sweeps() {
        Ok(s) => s,
        Err(e) => return error_output(&e),
    };
    let all_ok = sweeps.iter().all(Sweep::passed);
    let code = if all_ok { EXIT_OK } else { EXIT_INTERNAL };
    let stdout = if json {
        let items: Vec<Value> = sweeps
            .iter()
            .map(|s| {
                json!({
                    "name": s.name,
                    "checked": s.checked,
                    "agreed": s.agreed,
                    "counterexample": s.first_counterexample,
                })
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert(
            "verdict".into(),
            json!(if all_ok { "pass" } else { "fail" }),
        );
        obj.insert("sweeps".into(), Value::Array(items));
        render_json(obj)
    } else {
        let mut out = String::new();
        for s in &sweeps {
            let status = if s.passed() { "ok" } else { "FAIL" };
            writeln!(
                out,
                "{status:<4} {}: {}/{} agree",
                s.name, s.agreed, s.checked
            )
            .unwrap();
            if let Some(cx) = &s.first_counterexample {
                out.push_str(cx);
            }
        }
        writeln!(out, "selftest: {}", if all_ok { "pass" } else { "fail" }).unwrap();
        out
    };
    CliOutput::ok(code, stdout)
}
