//! Exact scalar fields.
//!
//! Everything above this module is written against the [`Field`] trait: a field
//! value (the descriptor) knows how to build and combine its elements. Two
//! fields ship with the crate:
//!
//! - [`Rationals`]: arbitrary-precision fractions, backed by `num-rational`.
//! - [`PrimeField`]: residues modulo a prime `p < 2^31`.
//!
//! Entry growth during exact elimination over `Q` is unbounded, so there is no
//! fixed-width rational type. There is no floating-point field at all: rank
//! decisions are meaningless under rounding.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest modulus accepted by [`PrimeField`] (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// Runtime description of a field, as written in matrix files (`Q`, `F7`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u32),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let digits = s
            .strip_prefix('F')
            .ok_or_else(|| Error::InvalidField(format!("unknown field token `{s}`")))?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidField(format!("unknown field token `{s}`")));
        }
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::InvalidField(format!("modulus `{digits}` is too large")))?;
        PrimeField::new(p).map(|f| f.spec())
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A field whose elements are exact values of type [`Field::Elem`].
///
/// Implementations are small descriptors (`Rationals` is a unit struct,
/// `PrimeField` carries its modulus) so matrices can store one copy of the
/// field next to a flat vector of elements.
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;

    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, x: &Self::Elem) -> Option<Self::Elem>;

    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::Elem;

    /// Parses one scalar token. See [`parse_scalar`] for the accepted syntax.
    fn parse_elem(&self, token: &str) -> Result<Self::Elem>;

    /// Canonical text form; always accepted back by [`Field::parse_elem`].
    fn format_elem(&self, x: &Self::Elem) -> String;
}

/// The field of rational numbers with arbitrary-precision numerators and denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, x: &BigRational) -> bool {
        x.is_zero()
    }

    fn add(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x + y
    }

    fn sub(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x - y
    }

    fn mul(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x * y
    }

    fn neg(&self, x: &BigRational) -> BigRational {
        -x
    }

    fn inv(&self, x: &BigRational) -> Option<BigRational> {
        (!x.is_zero()).then(|| x.recip())
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn parse_elem(&self, token: &str) -> Result<BigRational> {
        let (negative, body) = split_sign(token)?;
        let (num, den) = match body.split_once('/') {
            Some((a, b)) => (parse_digits(token, a)?, parse_digits(token, b)?),
            None => (parse_digits(token, body)?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(parse_error(token, "zero denominator"));
        }
        let num = if negative { -num } else { num };
        Ok(BigRational::new(num, den))
    }

    fn format_elem(&self, x: &BigRational) -> String {
        if x.denom().is_one() {
            x.numer().to_string()
        } else {
            format!("{}/{}", x.numer(), x.denom())
        }
    }
}

/// Integers modulo a prime `p < 2^31`. Elements are stored as their least
/// nonnegative residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::InvalidField(format!("modulus {p} exceeds 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("modulus {p} is not prime")));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn reduce_big(&self, v: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        v.mod_floor(&p).to_u32().expect("residue fits in u32")
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::PrimeField(self.p)
    }

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1 % self.p
    }

    fn is_zero(&self, x: &u32) -> bool {
        *x == 0
    }

    fn add(&self, x: &u32, y: &u32) -> u32 {
        ((*x as u64 + *y as u64) % self.p as u64) as u32
    }

    fn sub(&self, x: &u32, y: &u32) -> u32 {
        ((*x as u64 + self.p as u64 - *y as u64) % self.p as u64) as u32
    }

    fn mul(&self, x: &u32, y: &u32) -> u32 {
        ((*x as u64 * *y as u64) % self.p as u64) as u32
    }

    fn neg(&self, x: &u32) -> u32 {
        if *x == 0 {
            0
        } else {
            self.p - *x
        }
    }

    fn inv(&self, x: &u32) -> Option<u32> {
        if *x == 0 {
            return None;
        }
        // extended Euclid on (x, p)
        let (mut r0, mut r1) = (self.p as i64, *x as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(t0.rem_euclid(self.p as i64) as u32)
    }

    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    fn parse_elem(&self, token: &str) -> Result<u32> {
        let (negative, body) = split_sign(token)?;
        if body.contains('/') {
            return Err(parse_error(
                token,
                "fractions are not allowed over a prime field",
            ));
        }
        let v = parse_digits(token, body)?;
        Ok(self.reduce_big(&if negative { -v } else { v }))
    }

    fn format_elem(&self, x: &u32) -> String {
        x.to_string()
    }
}

fn parse_error(token: &str, reason: &str) -> Error {
    Error::ParseScalar {
        token: token.to_string(),
        reason: reason.to_string(),
    }
}

fn split_sign(token: &str) -> Result<(bool, &str)> {
    if let Some(rest) = token
        .strip_prefix('-')
        .or_else(|| token.strip_prefix('\u{2212}'))
    {
        Ok((true, rest))
    } else if let Some(rest) = token.strip_prefix('+') {
        Ok((false, rest))
    } else {
        Ok((false, token))
    }
}

fn parse_digits(token: &str, digits: &str) -> Result<BigInt> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_error(token, "expected a decimal integer or a/b"));
    }
    Ok(digits.parse::<BigInt>().expect("validated digits"))
}

/// A field element paired with the field it belongs to.
///
/// Arithmetic between scalars of different fields (say `F5` and `F7`) is a
/// usage error rather than a panic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar<F: Field> {
    field: F,
    value: F::Elem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Neg,
}

impl<F: Field> Scalar<F> {
    pub fn new(field: F, value: F::Elem) -> Self {
        Scalar { field, value }
    }

    pub fn from_i64(field: F, v: i64) -> Self {
        let value = field.from_i64(v);
        Scalar { field, value }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn value(&self) -> &F::Elem {
        &self.value
    }

    pub fn into_value(self) -> F::Elem {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.value)
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.spec(),
                right: other.field.spec(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        scalar_arith(ScalarOp::Add, self, other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        scalar_arith(ScalarOp::Sub, self, other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        scalar_arith(ScalarOp::Mul, self, other)
    }

    pub fn neg(&self) -> Self {
        Scalar::new(self.field.clone(), self.field.neg(&self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        scalar_inv(self)
    }
}

impl<F: Field> fmt::Display for Scalar<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(&self.value))
    }
}

/// Binary field arithmetic. For [`ScalarOp::Neg`] the second operand only
/// takes part in the field check.
pub fn scalar_arith<F: Field>(op: ScalarOp, x: &Scalar<F>, y: &Scalar<F>) -> Result<Scalar<F>> {
    x.check_field(y)?;
    let f = &x.field;
    let value = match op {
        ScalarOp::Add => f.add(&x.value, &y.value),
        ScalarOp::Sub => f.sub(&x.value, &y.value),
        ScalarOp::Mul => f.mul(&x.value, &y.value),
        ScalarOp::Neg => f.neg(&x.value),
    };
    Ok(Scalar::new(f.clone(), value))
}

pub fn scalar_inv<F: Field>(x: &Scalar<F>) -> Result<Scalar<F>> {
    let value = x.field.inv(&x.value).ok_or(Error::DivisionByZero)?;
    Ok(Scalar::new(x.field.clone(), value))
}

/// Parses a scalar token: an optional sign followed by a decimal integer, or
/// `a/b` with `b > 0` over `Q`. Over `F<p>` any integer is accepted and reduced
/// mod `p`; fractions are rejected.
pub fn parse_scalar<F: Field>(text: &str, field: &F) -> Result<Scalar<F>> {
    let value = field.parse_elem(text.trim())?;
    Ok(Scalar::new(field.clone(), value))
}

pub fn format_scalar<F: Field>(x: &Scalar<F>) -> String {
    x.to_string()
}

/// Rational helper used by tests and examples: `rational(a, b)` is `a/b` in lowest terms.
pub fn rational(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
