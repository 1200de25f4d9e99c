//! Exact field arithmetic over the rationals and over GF(p) for odd primes p.
//!
//! Every value carries its field, field mismatches are runtime errors, and no
//! operation ever approximates. GF(2) is rejected at construction: the Lie
//! results downstream (skew projections, skew witness recovery) divide by 2.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Identifies the ground field of a computation.
///
/// The inner representation is private so that a `PrimeField` spec can only be
/// built through [`FieldSpec::prime_field`], which validates the modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FieldSpec(FieldKind);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
enum FieldKind {
    Rationals,
    PrimeField(u64),
}

impl FieldSpec {
    /// The field of arbitrary-precision rationals.
    pub const fn rationals() -> Self {
        FieldSpec(FieldKind::Rationals)
    }

    /// GF(p). The modulus must be an odd prime; GF(2) is rejected because the
    /// skew/symmetric splits used throughout require characteristic != 2.
    pub fn prime_field(p: u64) -> Result<Self, ScalarError> {
        if p >= 3 && is_prime_u64(p) {
            Ok(FieldSpec(FieldKind::PrimeField(p)))
        } else {
            Err(ScalarError::InvalidModulus(p))
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self.0, FieldKind::Rationals)
    }

    /// The modulus for GF(p), `None` over the rationals.
    pub fn modulus(&self) -> Option<u64> {
        match self.0 {
            FieldKind::Rationals => None,
            FieldKind::PrimeField(p) => Some(p),
        }
    }

    fn check_match(&self, other: &FieldSpec) -> Result<(), ScalarError> {
        if self == other {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(*self, *other))
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::PrimeField(p) => write!(f, "GF({p})"),
        }
    }
}

/// Serialized form: `{"type":"Q"}` or `{"type":"GF","p":7}`.
#[derive(Serialize, Deserialize)]
struct FieldSpecRaw {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = match self.0 {
            FieldKind::Rationals => FieldSpecRaw { kind: "Q".into(), p: None },
            FieldKind::PrimeField(p) => FieldSpecRaw { kind: "GF".into(), p: Some(p) },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = FieldSpecRaw::deserialize(d)?;
        match (raw.kind.as_str(), raw.p) {
            ("Q", None) => Ok(FieldSpec::rationals()),
            ("GF", Some(p)) => FieldSpec::prime_field(p).map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("field must be {\"type\":\"Q\"} or {\"type\":\"GF\",\"p\":<odd prime>}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not an odd prime")]
    InvalidModulus(u64),
    #[error("cannot parse {text:?} as an element of {field}")]
    Parse { text: String, field: FieldSpec },
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
enum Repr {
    Rat(BigRational),
    Mod(u64),
}

/// An element of a [`FieldSpec`] field: a reduced fraction over the rationals
/// or a residue in `[0, p)` over GF(p). Values are immutable; all operations
/// are pure and exact.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Scalar {
    spec: FieldSpec,
    repr: Repr,
}

impl Scalar {
    pub fn zero(spec: FieldSpec) -> Self {
        Self::from_i64(spec, 0)
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::from_i64(spec, 1)
    }

    pub fn from_i64(spec: FieldSpec, n: i64) -> Self {
        let repr = match spec.0 {
            FieldKind::Rationals => Repr::Rat(BigRational::from(BigInt::from(n))),
            FieldKind::PrimeField(p) => Repr::Mod(n.rem_euclid(p as i64) as u64),
        };
        Scalar { spec, repr }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rat(r) => r.is_zero(),
            Repr::Mod(m) => *m == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rat(r) => r.is_one(),
            Repr::Mod(m) => *m == 1,
        }
    }

    /// Exact equality against a small integer, without allocating.
    pub fn eq_i64(&self, n: i64) -> bool {
        match &self.repr {
            Repr::Rat(r) => r.denom().is_one() && r.numer() == &BigInt::from(n),
            Repr::Mod(m) => {
                let p = self.spec.modulus().expect("mod repr has modulus") as i64;
                *m == n.rem_euclid(p) as u64
            }
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.spec.check_match(&rhs.spec)?;
        let repr = match (&self.repr, &rhs.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a + b),
            (Repr::Mod(a), Repr::Mod(b)) => {
                let p = self.spec.modulus().unwrap() as u128;
                Repr::Mod(((*a as u128 + *b as u128) % p) as u64)
            }
            _ => unreachable!("repr always matches spec"),
        };
        Ok(Scalar { spec: self.spec, repr })
    }

    pub fn sub(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.spec.check_match(&rhs.spec)?;
        let repr = match (&self.repr, &rhs.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a * b),
            (Repr::Mod(a), Repr::Mod(b)) => {
                let p = self.spec.modulus().unwrap() as u128;
                Repr::Mod(((*a as u128 * *b as u128) % p) as u64)
            }
            _ => unreachable!("repr always matches spec"),
        };
        Ok(Scalar { spec: self.spec, repr })
    }

    pub fn neg(&self) -> Scalar {
        let repr = match &self.repr {
            Repr::Rat(a) => Repr::Rat(-a),
            Repr::Mod(a) => {
                let p = self.spec.modulus().unwrap();
                Repr::Mod(if *a == 0 { 0 } else { p - *a })
            }
        };
        Scalar { spec: self.spec, repr }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Rat(a) => Repr::Rat(a.recip()),
            Repr::Mod(a) => {
                let p = self.spec.modulus().unwrap();
                Repr::Mod(mod_inverse(*a, p))
            }
        };
        Ok(Scalar { spec: self.spec, repr })
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.mul(&rhs.inv()?)
    }

    /// Parse the canonical text form: `n` or `n/d` over the rationals
    /// (optional leading minus), a decimal integer over GF(p) (reduced mod p).
    pub fn parse(spec: FieldSpec, text: &str) -> Result<Scalar, ScalarError> {
        let trimmed = text.trim();
        let err = || ScalarError::Parse { text: text.to_string(), field: spec };
        match spec.0 {
            FieldKind::Rationals => {
                let (num_s, den_s) = match trimmed.split_once('/') {
                    Some((n, d)) => (n, Some(d)),
                    None => (trimmed, None),
                };
                let numer: BigInt = num_s.trim().parse().map_err(|_| err())?;
                let denom: BigInt = match den_s {
                    Some(d) => d.trim().parse().map_err(|_| err())?,
                    None => BigInt::one(),
                };
                if denom.is_zero() {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(Scalar { spec, repr: Repr::Rat(BigRational::new(numer, denom)) })
            }
            FieldKind::PrimeField(p) => {
                let n: BigInt = trimmed.parse().map_err(|_| err())?;
                let residue = n.mod_floor(&BigInt::from(p));
                let (_, digits) = residue.to_u64_digits();
                Ok(Scalar { spec, repr: Repr::Mod(digits.first().copied().unwrap_or(0)) })
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else if r.numer().is_negative() {
                    // keep the sign on the whole fraction
                    write!(f, "-{}/{}", r.numer().magnitude(), r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Repr::Mod(m) => write!(f, "{m}"),
        }
    }
}

/// Extended-Euclid inverse of a nonzero residue mod an odd prime.
fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime and a nonzero");
    t0.rem_euclid(p as i128) as u64
}

/// Deterministic Miller-Rabin over the bases sufficient for all u64 inputs.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow_mod = |base: u64, mut exp: u64| -> u64 {
        let m = n as u128;
        let mut acc: u128 = 1;
        let mut b = base as u128 % m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            exp >>= 1;
        }
        acc as u64
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
