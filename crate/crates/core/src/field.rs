//! Coefficient fields: the rationals and prime fields.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The coefficient field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u32),
}

impl FieldSpec {
    /// The prime field with `p` elements. Fails when `p` is not prime or
    /// does not fit the 16-bit limb used for products.
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > u16::MAX as u32 {
            return Err(Error::InvalidField(format!("modulus {p} too large")));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub const F2: FieldSpec = FieldSpec::Prime(2);
    pub const Q: FieldSpec = FieldSpec::Rationals;

    pub fn modulus(&self) -> Option<u32> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(p) => Some(*p),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSpec::Prime(_))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::Prime(p) => Scalar::Modular(v.rem_euclid(*p as i64) as u32),
        }
    }

    /// All elements of a prime field in increasing order; `None` over Q.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        self.modulus()
            .map(|p| (0..p).map(Scalar::Modular).collect())
    }

    pub(crate) fn check_same(&self, other: &FieldSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.to_string(), other.to_string()))
        }
    }

    /// Parses a scalar literal: an integer or a `"p/q"` string over Q, an
    /// integer in `[0, p)` over a prime field.
    pub fn parse_scalar(&self, v: &serde_json::Value) -> Result<Scalar> {
        match self {
            FieldSpec::Rationals => {
                let text = match v {
                    serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                    serde_json::Value::String(s) => s.trim().to_string(),
                    _ => return Err(Error::InvalidInput(format!("bad rational literal {v}"))),
                };
                parse_rational(&text).map(Scalar::Rational)
            }
            FieldSpec::Prime(p) => {
                let n = v
                    .as_u64()
                    .ok_or_else(|| Error::InvalidInput(format!("bad F_{p} literal {v}")))?;
                if n >= *p as u64 {
                    return Err(Error::InvalidInput(format!("{n} is not in [0, {p})")));
                }
                Ok(Scalar::Modular(n as u32))
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix('F')
            .and_then(|rest| rest.parse::<u32>().ok())
            .ok_or_else(|| Error::InvalidField(format!("unrecognised field {s:?}")))?;
        FieldSpec::prime(p)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("bad rational literal {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// A field element. The field itself is carried by the surrounding matrix or
/// [`FieldSpec`]; modular values are always reduced into `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular(u32),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular(v) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular(v) => *v == 1,
        }
    }

    /// JSON literal in the canonical form: integers as numbers when they fit,
    /// other rationals as `"p/q"` strings in lowest terms.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Scalar::Modular(v) => serde_json::Value::from(*v),
            Scalar::Rational(r) => {
                if r.is_integer() {
                    if let Ok(i) = i64::try_from(r.numer().clone()) {
                        return serde_json::Value::from(i);
                    }
                }
                serde_json::Value::String(self.to_string())
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Modular(v) => write!(f, "{v}"),
            Scalar::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => {
                let sign = if r.is_negative() { "-" } else { "" };
                write!(f, "{sign}{}/{}", r.numer().abs(), r.denom())
            }
        }
    }
}

/// Arithmetic kernel shared by the dense matrix routines.
pub(crate) trait Ops: Copy {
    type E: Clone + PartialEq;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn to_scalar(&self, a: &Self::E) -> Scalar;
    #[allow(clippy::wrong_self_convention)]
    fn from_scalar(&self, s: &Scalar) -> Self::E;
}

#[derive(Clone, Copy)]
pub(crate) struct QOps;

#[derive(Clone, Copy)]
pub(crate) struct FpOps {
    pub p: u32,
}

impl Ops for QOps {
    type E = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn to_scalar(&self, a: &BigRational) -> Scalar {
        Scalar::Rational(a.clone())
    }
    fn from_scalar(&self, s: &Scalar) -> BigRational {
        match s {
            Scalar::Rational(r) => r.clone(),
            Scalar::Modular(v) => BigRational::from_integer(BigInt::from(*v)),
        }
    }
}

impl Ops for FpOps {
    type E = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        a * b % self.p
    }
    fn neg(&self, a: &u32) -> u32 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u32) -> u32 {
        // Fermat: a^(p-2)
        let mut base = *a as u64;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        let p = self.p as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }
    fn to_scalar(&self, a: &u32) -> Scalar {
        Scalar::Modular(*a)
    }
    fn from_scalar(&self, s: &Scalar) -> u32 {
        match s {
            Scalar::Modular(v) => v % self.p,
            Scalar::Rational(r) => {
                let p = BigInt::from(self.p);
                let n = ((r.numer() % &p) + &p) % &p;
                let d = ((r.denom() % &p) + &p) % &p;
                let n = u32::try_from(n).unwrap_or(0);
                let d = u32::try_from(d).unwrap_or(0);
                self.mul(&n, &self.inv(&d))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_field_names() {
        assert_eq!("Q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!("F5".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(5));
        assert!("F4".parse::<FieldSpec>().is_err());
        assert!("R".parse::<FieldSpec>().is_err());
        assert_eq!(FieldSpec::Prime(7).to_string(), "F7");
    }

    #[test]
    fn rational_literals_are_canonical() {
        let q = FieldSpec::Rationals;
        let s = q.parse_scalar(&json!("4/-6")).unwrap();
        assert_eq!(s.to_string(), "-2/3");
        assert_eq!(q.parse_scalar(&json!("6/3")).unwrap().to_json(), json!(2));
        assert!(q.parse_scalar(&json!("1/0")).is_err());
    }

    #[test]
    fn modular_literals_are_range_checked() {
        let f5 = FieldSpec::Prime(5);
        assert_eq!(f5.parse_scalar(&json!(4)).unwrap(), Scalar::Modular(4));
        assert!(f5.parse_scalar(&json!(5)).is_err());
        assert!(f5.parse_scalar(&json!(-1)).is_err());
    }

    #[test]
    fn fermat_inverse() {
        let ops = FpOps { p: 7 };
        for a in 1..7 {
            assert_eq!(ops.mul(&a, &ops.inv(&a)), 1);
        }
    }
}
