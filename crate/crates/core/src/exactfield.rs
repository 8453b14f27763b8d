//! Exact arithmetic in `Q` and in real quadratic fields `Q(sqrt d)`.
//!
//! [`QuadFieldElem`] is the numeric substrate for everything else in the crate.
//! The [`Scalar`] trait abstracts over the three coefficient flavours used by
//! the linear algebra and the group laws: exact rationals, exact quadratic
//! field elements and `f64` approximations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched fields: sqrt({0}) vs sqrt({1})")]
    MismatchedField(u64, u64),
    #[error("{0} is not a squarefree integer > 1")]
    InvalidRadicand(u64),
    #[error("cannot parse field element `{0}`")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_squarefree(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Parse a rational literal: `3`, `-7/4`, `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let s = s.trim();
    let err = || FieldError::Parse(s.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            t => t.parse().map_err(|_| err())?,
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| err())?;
        let mag = int_part.abs() * &scale + frac_part;
        let num = if neg { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

/// Which real embedding of `Q(sqrt d)` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Embedding {
    /// `sqrt d` maps to the positive square root.
    Principal,
    /// `sqrt d` maps to the negative square root.
    Conjugate,
}

/// `a + b sqrt(d)` with `d` squarefree and greater than one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadFieldElem {
    a: Rational,
    b: Rational,
    d: u64,
}

impl QuadFieldElem {
    pub fn new(a: Rational, b: Rational, d: u64) -> Result<Self, FieldError> {
        if !is_squarefree(d) {
            return Err(FieldError::InvalidRadicand(d));
        }
        Ok(Self { a, b, d })
    }

    /// Unchecked constructor for callers that already validated `d`.
    pub(crate) fn from_parts(a: Rational, b: Rational, d: u64) -> Self {
        debug_assert!(is_squarefree(d));
        Self { a, b, d }
    }

    pub fn from_rational(q: Rational, d: u64) -> Self {
        Self::from_parts(q, Rational::zero(), d)
    }

    pub fn from_ints(a: i64, b: i64, d: u64) -> Self {
        Self::from_parts(rat_int(a), rat_int(b), d)
    }

    pub fn zero(d: u64) -> Self {
        Self::from_rational(Rational::zero(), d)
    }

    pub fn one(d: u64) -> Self {
        Self::from_rational(Rational::one(), d)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: u64) -> Self {
        Self::from_parts(Rational::zero(), Rational::one(), d)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(FieldError::MismatchedField(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self::from_parts(
            &self.a + &other.a,
            &self.b + &other.b,
            self.d,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self::from_parts(
            &self.a - &other.a,
            &self.b - &other.b,
            self.d,
        ))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        let d = Rational::from_integer(BigInt::from(self.d));
        let a = &self.a * &other.a + &self.b * &other.b * d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::from_parts(a, b, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        self.checked_mul(&other.inverse()?)
    }

    /// Multiplicative inverse, via the conjugate: `1/x = sigma(x) / N(x)`.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::from_parts(&self.a / &n, -&self.b / &n, self.d))
    }

    /// Galois conjugation `a + b sqrt d -> a - b sqrt d`.
    pub fn conjugate(&self) -> Self {
        Self::from_parts(self.a.clone(), -&self.b, self.d)
    }

    /// Field norm `x * sigma(x) = a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        let d = Rational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - &self.b * &self.b * d
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::from_parts(&self.a * q, &self.b * q, self.d)
    }

    /// Exact sign of the principal embedding.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with d b^2
        let d = Rational::from_integer(BigInt::from(self.d));
        let a2 = &self.a * &self.a;
        let db2 = &self.b * &self.b * d;
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Exact comparison of principal embeddings.
    pub fn cmp_real(&self, other: &Self) -> Result<Ordering, FieldError> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// `|embed(self, which)| <= bound`, decided exactly.
    pub fn abs_le(&self, bound: &Rational, which: Embedding) -> bool {
        let x = match which {
            Embedding::Principal => self.clone(),
            Embedding::Conjugate => self.conjugate(),
        };
        let upper = Self::from_rational(bound.clone(), self.d);
        let hi = upper.checked_sub(&x).expect("same field").signum();
        let lo = upper.checked_add(&x).expect("same field").signum();
        hi != Ordering::Less && lo != Ordering::Less
    }

    pub fn embed(&self, which: Embedding) -> f64 {
        match which {
            Embedding::Principal => embed_parts(&self.a, &self.b, self.d),
            Embedding::Conjugate => embed_parts(&self.a, &-&self.b, self.d),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.embed(Embedding::Principal)
    }

    /// Parse `a`, `a/b`, `a+b*sqrt(d)`, `b*sqrt(d)`, `sqrt(d)` and the like.
    /// A purely rational literal needs the field supplied through `default_d`.
    pub fn parse(s: &str, default_d: Option<u64>) -> Result<Self, FieldError> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || FieldError::Parse(s.to_string());
        let Some(pos) = text.find("sqrt(") else {
            let d = default_d.ok_or_else(err)?;
            if !is_squarefree(d) {
                return Err(FieldError::InvalidRadicand(d));
            }
            return Ok(Self::from_rational(parse_rational(&text)?, d));
        };
        let close = text[pos..].find(')').ok_or_else(err)? + pos;
        if close != text.len() - 1 {
            return Err(err());
        }
        let d: u64 = text[pos + 5..close].parse().map_err(|_| err())?;
        if let Some(dd) = default_d {
            if dd != d {
                return Err(FieldError::MismatchedField(dd, d));
            }
        }
        if !is_squarefree(d) {
            return Err(FieldError::InvalidRadicand(d));
        }
        let head = &text[..pos];
        let (head, coeff_str) = match head.strip_suffix('*') {
            Some(h) => {
                // split the rational part from the coefficient at the last sign
                let split = h
                    .char_indices()
                    .rev()
                    .find(|&(i, c)| (c == '+' || c == '-') && i > 0)
                    .map(|(i, _)| i);
                match split {
                    Some(i) => (&h[..i], &h[i..]),
                    None => ("", h),
                }
            }
            None => {
                // bare `sqrt(d)` with an optional sign, possibly after a rational part
                let (rest, sign) = if let Some(r) = head.strip_suffix('+') {
                    (r, "1")
                } else if let Some(r) = head.strip_suffix('-') {
                    (r, "-1")
                } else if head.is_empty() {
                    ("", "1")
                } else {
                    return Err(err());
                };
                (rest, sign)
            }
        };
        let a = if head.is_empty() {
            Rational::zero()
        } else {
            parse_rational(head)?
        };
        let b = parse_rational(coeff_str.trim_start_matches('+'))?;
        Ok(Self::from_parts(a, b, d))
    }
}

/// 50-bit accurate evaluation of `a + b sqrt(d)`. When the two terms have
/// opposite signs the value is recomputed as `N / (a - b sqrt d)` so that no
/// cancellation occurs.
fn embed_parts(a: &Rational, b: &Rational, d: u64) -> f64 {
    let sd = (d as f64).sqrt();
    let af = a.to_f64().unwrap_or(f64::NAN);
    let bf = b.to_f64().unwrap_or(f64::NAN);
    if b.is_zero() || a.is_zero() || a.is_positive() == b.is_positive() {
        return af + bf * sd;
    }
    let dq = Rational::from_integer(BigInt::from(d));
    let norm = a * a - b * b * dq;
    if norm.is_zero() {
        return 0.0;
    }
    norm.to_f64().unwrap_or(f64::NAN) / (af - bf * sd)
}

impl fmt::Display for QuadFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            if self.b.is_positive() {
                write!(f, "+")?;
            }
        }
        write!(f, "{}*sqrt({})", self.b, self.d)
    }
}

impl fmt::Debug for QuadFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for QuadFieldElem {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s, None)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a QuadFieldElem> for &'a QuadFieldElem {
            type Output = QuadFieldElem;
            fn $method(self, rhs: &'a QuadFieldElem) -> QuadFieldElem {
                self.$checked(rhs).expect("quadratic field operation")
            }
        }
        impl $tr for QuadFieldElem {
            type Output = QuadFieldElem;
            fn $method(self, rhs: QuadFieldElem) -> QuadFieldElem {
                (&self).$checked(&rhs).expect("quadratic field operation")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for QuadFieldElem {
    type Output = QuadFieldElem;
    fn neg(self) -> QuadFieldElem {
        Self::from_parts(-self.a, -self.b, self.d)
    }
}

impl Neg for &QuadFieldElem {
    type Output = QuadFieldElem;
    fn neg(self) -> QuadFieldElem {
        QuadFieldElem::from_parts(-&self.a, -&self.b, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// Dispatching form of the field operations; `Neg` ignores `y`.
pub fn field_arith(
    op: ArithOp,
    x: &QuadFieldElem,
    y: &QuadFieldElem,
) -> Result<QuadFieldElem, FieldError> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Div => x.checked_div(y),
        ArithOp::Neg => Ok(-x),
    }
}

/// The coefficient field of an algebra or scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoeffField {
    Rational,
    Quad(u64),
}

impl CoeffField {
    pub fn quad(d: u64) -> Result<Self, FieldError> {
        if is_squarefree(d) {
            Ok(CoeffField::Quad(d))
        } else {
            Err(FieldError::InvalidRadicand(d))
        }
    }

    pub fn radicand(&self) -> Option<u64> {
        match self {
            CoeffField::Rational => None,
            CoeffField::Quad(d) => Some(*d),
        }
    }
}

impl fmt::Display for CoeffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffField::Rational => write!(f, "Q"),
            CoeffField::Quad(d) => write!(f, "Q(sqrt {d})"),
        }
    }
}

impl FromStr for CoeffField {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "Q" {
            return Ok(CoeffField::Rational);
        }
        let inner = t
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .map(|r| r.trim_start_matches('(').trim_end_matches(')'))
            .ok_or_else(|| FieldError::Parse(s.to_string()))?;
        let d: u64 = inner
            .parse()
            .map_err(|_| FieldError::Parse(s.to_string()))?;
        CoeffField::quad(d)
    }
}

/// Coefficient ring interface shared by the exact and approximate code paths.
///
/// Constants are produced from an existing value (`zero_like`, `one_like`)
/// because a quadratic field element carries its radicand.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rational_like(&self, q: &Rational) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// `None` for zero.
    fn inv_ref(&self) -> Option<Self>;
    /// Pivot-selection magnitude; any monotone size proxy works.
    fn magnitude(&self) -> f64;
    /// Principal real value.
    fn approx(&self) -> f64;
    /// The value as a rational number, when it is one.
    fn rational_value(&self) -> Option<Rational>;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::MAX)
    }
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn rational_value(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Scalar for QuadFieldElem {
    fn zero_like(&self) -> Self {
        Self::zero(self.d)
    }
    fn one_like(&self) -> Self {
        Self::one(self.d)
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        Self::from_rational(q.clone(), self.d)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
    fn rational_value(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }
}

impl Scalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero_elem(&self) -> bool {
        *self == 0.0
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv_ref(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn approx(&self) -> f64 {
        *self
    }
    fn rational_value(&self) -> Option<Rational> {
        None
    }
}

/// Exact sign of `p + q sqrt(d)` for machine integers.
pub fn sign_int_surd(p: i128, q: i128, d: u64) -> Ordering {
    let sp = p.cmp(&0);
    let sq = q.cmp(&0);
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    let p2 = p.checked_mul(p).expect("surd sign overflow");
    let dq2 = q
        .checked_mul(q)
        .and_then(|v| v.checked_mul(d as i128))
        .expect("surd sign overflow");
    match p2.cmp(&dq2) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q2(a: i64, b: i64) -> QuadFieldElem {
        QuadFieldElem::from_ints(a, b, 2)
    }

    #[test]
    fn arithmetic_examples() {
        let x = q2(1, 0) + q2(0, 1);
        assert_eq!(x, q2(1, 1));
        assert_eq!(q2(1, 1) * q2(1, -1), q2(-1, 0));
        assert_eq!(q2(1, 0) / q2(1, 1), q2(-1, 1));
        assert_eq!(&(q2(-1, 1) * q2(1, 1)), &q2(1, 0));
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        assert_eq!(
            q2(1, 0).checked_div(&q2(0, 0)),
            Err(FieldError::DivisionByZero)
        );
        let y = QuadFieldElem::from_ints(1, 1, 3);
        assert_eq!(
            q2(1, 0).checked_add(&y),
            Err(FieldError::MismatchedField(2, 3))
        );
        assert_eq!(
            field_arith(ArithOp::Mul, &q2(1, 1), &y),
            Err(FieldError::MismatchedField(2, 3))
        );
    }

    #[test]
    fn radicand_validation() {
        assert!(QuadFieldElem::new(rat_int(1), rat_int(1), 4).is_err());
        assert!(QuadFieldElem::new(rat_int(1), rat_int(1), 1).is_err());
        assert!(QuadFieldElem::new(rat_int(1), rat_int(1), 6).is_ok());
        assert!(is_squarefree(30) && !is_squarefree(12) && !is_squarefree(9));
    }

    #[test]
    fn conjugation_and_norm() {
        assert_eq!(q2(3, 0).conjugate(), q2(3, 0));
        assert_eq!(q2(1, 1).conjugate(), q2(1, -1));
        assert_eq!(q2(1, 1).norm(), rat_int(-1));
        assert_eq!(q2(0, 0).norm(), rat_int(0));
    }

    #[test]
    fn embeddings() {
        let x = q2(1, 1);
        let p = x.embed(Embedding::Principal);
        let c = x.embed(Embedding::Conjugate);
        assert!((p - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((c - (1.0 - 2f64.sqrt())).abs() < 1e-15);
        let q = QuadFieldElem::from_rational(rat(-7, 3), 5);
        assert_eq!(q.embed(Embedding::Principal), q.embed(Embedding::Conjugate));
        assert!((q.to_f64() + 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn embedding_without_cancellation() {
        // (sqrt2 - 1)^20 = p - q sqrt2 with large p, q
        let mut x = q2(1, 0);
        let u = q2(-1, 1);
        for _ in 0..20 {
            x = x * u.clone();
        }
        let expected = (2f64.sqrt() - 1.0).powi(20);
        let got = x.to_f64();
        assert!(
            ((got - expected) / expected).abs() < 1e-13,
            "{got} vs {expected}"
        );
    }

    #[test]
    fn exact_sign_and_bounds() {
        assert_eq!(q2(-1, 1).signum(), Ordering::Greater);
        assert_eq!(q2(1, -1).signum(), Ordering::Less);
        assert_eq!(q2(0, 0).signum(), Ordering::Equal);
        assert!(q2(1, 1).abs_le(&rat(242, 100), Embedding::Principal));
        assert!(!q2(1, 1).abs_le(&rat(241, 100), Embedding::Principal));
        assert!(q2(1, 1).abs_le(&rat(42, 100), Embedding::Conjugate));
        assert_eq!(sign_int_surd(-1, 1, 2), Ordering::Greater);
        assert_eq!(sign_int_surd(3, -2, 2), Ordering::Greater);
        assert_eq!(sign_int_surd(-3, 2, 2), Ordering::Less);
    }

    #[test]
    fn parsing() {
        assert_eq!(QuadFieldElem::parse("1+1*sqrt(2)", None).unwrap(), q2(1, 1));
        assert_eq!(QuadFieldElem::parse("sqrt(2)", None).unwrap(), q2(0, 1));
        assert_eq!(QuadFieldElem::parse("-sqrt(2)", None).unwrap(), q2(0, -1));
        assert_eq!(QuadFieldElem::parse("3-sqrt(2)", None).unwrap(), q2(3, -1));
        assert_eq!(
            QuadFieldElem::parse("1/2 - 3/4*sqrt(2)", None).unwrap(),
            QuadFieldElem::new(rat(1, 2), rat(-3, 4), 2).unwrap()
        );
        assert_eq!(QuadFieldElem::parse("-2*sqrt(2)", None).unwrap(), q2(0, -2));
        assert_eq!(
            QuadFieldElem::parse("5/3", Some(2)).unwrap().a(),
            &rat(5, 3)
        );
        assert!(QuadFieldElem::parse("5/3", None).is_err());
        assert!(QuadFieldElem::parse("1+sqrt(4)", None).is_err());
        assert!(QuadFieldElem::parse("1+sqrt(3)", Some(2)).is_err());
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        for x in [q2(1, 1), q2(0, -3), q2(-2, 0), q2(7, -5)] {
            let s = x.to_string();
            assert_eq!(QuadFieldElem::parse(&s, Some(2)).unwrap(), x, "{s}");
        }
        assert_eq!(
            "Q(sqrt 2)".parse::<CoeffField>().unwrap(),
            CoeffField::Quad(2)
        );
        assert_eq!(
            "Q(sqrt(5))".parse::<CoeffField>().unwrap(),
            CoeffField::Quad(5)
        );
        assert_eq!("Q".parse::<CoeffField>().unwrap(), CoeffField::Rational);
        assert!("Q(sqrt 8)".parse::<CoeffField>().is_err());
    }

    fn arb_elem() -> impl Strategy<Value = QuadFieldElem> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(|(an, ad, bn, bd)| QuadFieldElem::new(rat(an, ad), rat(bn, bd), 2).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_elem(), y in arb_elem(), z in arb_elem()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.inverse().unwrap(), QuadFieldElem::one(2));
            }
        }

        #[test]
        fn conjugation_is_ring_automorphism(x in arb_elem(), y in arb_elem()) {
            prop_assert_eq!((&x * &y).conjugate(), &x.conjugate() * &y.conjugate());
            prop_assert_eq!((&x + &y).conjugate(), &x.conjugate() + &y.conjugate());
            prop_assert_eq!(x.conjugate().conjugate(), x.clone());
            prop_assert_eq!(x.norm(), (&x * &x.conjugate()).a().clone());
        }

        #[test]
        fn norm_of_nonzero_integer_element(a in -1000i64..1000, b in -1000i64..1000) {
            prop_assume!(a != 0 || b != 0);
            let n = q2(a, b).norm();
            prop_assert!(n.is_integer() && !n.is_zero());
        }

        #[test]
        fn embedding_is_multiplicative(x in arb_elem(), y in arb_elem()) {
            for which in [Embedding::Principal, Embedding::Conjugate] {
                let lhs = (&x * &y).embed(which);
                let rhs = x.embed(which) * y.embed(which);
                let scale = lhs.abs().max(1.0);
                prop_assert!((lhs - rhs).abs() <= scale * 2f64.powi(-40));
            }
            prop_assert_eq!(x.embed(Embedding::Conjugate), x.conjugate().embed(Embedding::Principal));
        }
    }
}
