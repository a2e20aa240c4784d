//! Exact LU factorization of singular and non-singular square matrices.
//!
//! A square matrix over a field has `A = LU` with `L` lower and `U` upper
//! triangular iff its leading blocks satisfy a family of rank conditions
//! ([`conditions`]). The priority-pivot search in [`factor`] always returns a
//! pair with `L * U = A`; the pair is triangular exactly when those conditions
//! hold, and otherwise is off by as many diagonals as the conditions fail by.
//! [`decompose`] builds the universal forms `U1 L U2`, `L1 U L2`, `P L U`
//! and `L U P`, and [`oracle`] holds brute-force ground truth for tiny cases.
//!
//! All arithmetic is exact. The algorithms are generic over [`field::Field`];
//! the aliases below name the two fields shipped with the crate.
//!
//! ```
//! use exact_lu::{condition_report, kw_factor, QMatrix, Rationals};
//!
//! let a = QMatrix::from_i64(Rationals, &[[0, 1], [1, 0]])?;
//! assert_eq!(condition_report(&a)?.failure_degree, 1);
//! let kw = kw_factor(&a, 1)?.factored().unwrap();
//! assert_eq!(kw.lower.multiply(&kw.upper)?, a);
//! # Ok::<(), exact_lu::Error>(())
//! ```

pub mod cli;
pub mod conditions;
pub mod decompose;
pub mod error;
pub mod factor;
pub mod field;
pub mod format;
pub mod matrix;
pub mod oracle;

pub use conditions::{
    border, condition_report, failure_degree, invertible_shortcut, satisfies_lu_conditions,
    ConditionReport, RankRecord,
};
pub use decompose::{
    lul, lup, plu, plu_permutation, ulu, ulu_transform, DecompositionKind, Factor, Permutation,
    Shape, TriDecomposition,
};
pub use error::{Error, Result};
pub use factor::{
    hv_factor, kw_factor, kw_factor_bordered, lu, priority, priority_pivot, FactorPair,
    HvFactorization, NoFactorization, Outcome, PivotStep,
};
pub use field::{Field, FieldSpec, PrimeField, Rationals, Scalar};
pub use matrix::{row_in_span, Matrix};

/// Exact rational number.
pub type Rational = num_rational::BigRational;
/// Field-tagged rational scalar.
pub type QScalar = Scalar<Rationals>;
/// Field-tagged residue modulo a runtime prime.
pub type FpScalar = Scalar<PrimeField>;
/// Matrix over the rationals.
pub type QMatrix = Matrix<Rationals>;
/// Matrix over a prime field.
pub type FpMatrix = Matrix<PrimeField>;
