//! Arithmetic in the prime field F_p and Koszul sign bookkeeping.
//!
//! Internally every linear combination stores raw residues (`u64` in
//! `[0, p)`) and carries a [`PrimeField`] alongside; [`Scalar`] is the
//! checked, self-describing value type used at API boundaries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Largest modulus accepted; keeps products of residues inside `u64`.
    pub const MAX_MODULUS: u64 = 1 << 31;

    pub fn new(p: u64) -> Result<Self> {
        if p > Self::MAX_MODULUS || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    /// Embeds a signed integer.
    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// `(-1)^e` as a residue.
    pub fn sign(&self, e: i64) -> u64 {
        if e.rem_euclid(2) == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }

    /// Koszul sign of moving symbols past each other.
    ///
    /// `swaps` lists the degree pairs of every transposition performed;
    /// the result is `(-1)^(Σ |x|·|y|)`.
    pub fn koszul_sign(&self, swaps: &[(i64, i64)]) -> u64 {
        let e: i64 = swaps.iter().map(|(x, y)| (x * y).rem_euclid(2)).sum();
        self.sign(e)
    }

    pub fn scalar(&self, value: i64) -> Scalar {
        Scalar { value: self.from_i64(value), p: self.p }
    }

    /// Every residue of the field, in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.p
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// An element of F_p that remembers its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: u64,
    p: u64,
}

impl Scalar {
    pub fn new(field: PrimeField, value: i64) -> Self {
        field.scalar(value)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Scalar) -> Result<PrimeField> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        Ok(self.field())
    }

    pub fn add(self, other: Scalar) -> Result<Scalar> {
        let f = self.same_field(&other)?;
        Ok(Scalar { value: f.add(self.value, other.value), p: self.p })
    }

    pub fn mul(self, other: Scalar) -> Result<Scalar> {
        let f = self.same_field(&other)?;
        Ok(Scalar { value: f.mul(self.value, other.value), p: self.p })
    }

    pub fn neg(self) -> Scalar {
        Scalar { value: self.field().neg(self.value), p: self.p }
    }

    pub fn inv(self) -> Result<Scalar> {
        Ok(Scalar { value: self.field().inv(self.value)?, p: self.p })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Koszul sign of a sequence of transpositions, as a [`Scalar`].
pub fn koszul_sign(field: PrimeField, swaps: &[(i64, i64)]) -> Scalar {
    Scalar { value: field.koszul_sign(swaps), p: field.p }
}
