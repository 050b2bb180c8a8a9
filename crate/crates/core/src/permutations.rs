//! Symmetric groups in one-line notation with operadic block composition.
//!
//! A permutation `σ ∈ S_n` is stored as its images `[σ(1), …, σ(n)]`
//! (1-based). The composition `τ ∘_i ν` substitutes `ν` into position `i`
//! of `τ`: positions `i..i+k-1` of the result carry the values
//! `τ(i), …, τ(i)+k-1` in the pattern of `ν`, and every other value is
//! shifted past the inserted block. With `k = 0` the position is deleted,
//! which is the composition with the arity-zero unit.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::PrimeField;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::NotAPermutation(images));
            }
            seen[v - 1] = true;
        }
        if n > u8::MAX as usize {
            return Err(Error::NotAPermutation(images));
        }
        Ok(Self(images.into_iter().map(|v| v as u8).collect()))
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n as u8).collect())
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    /// `σ(j)` for `1 ≤ j ≤ n`.
    pub fn apply(&self, j: usize) -> usize {
        self.0[j - 1] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &v)| v as usize == j + 1)
    }

    /// All of `S_n` in lexicographic order of the image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        (1..=n as u8).permutations(n).map(Permutation).collect()
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch { expected: self.size(), got: other.size() });
        }
        Ok(Permutation(other.0.iter().map(|&j| self.0[j as usize - 1]).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.size()];
        for (j, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = (j + 1) as u8;
        }
        Permutation(inv)
    }

    pub fn inversions(&self) -> usize {
        let mut count = 0;
        for a in 0..self.0.len() {
            for b in a + 1..self.0.len() {
                if self.0[a] > self.0[b] {
                    count += 1;
                }
            }
        }
        count
    }

    /// `(-1)^{inversions}` in F_p.
    pub fn sign(&self, field: &PrimeField) -> u64 {
        field.sign(self.inversions() as i64)
    }

    /// Block composition `self ∘_i v` (see the module docs).
    pub fn block_compose(&self, v: &Permutation, i: usize) -> Result<Permutation> {
        let n = self.size();
        let k = v.size();
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, max: n });
        }
        let ti = self.apply(i);
        let shift = |x: usize| if x < ti { x } else { x + k - 1 };
        let mut out = Vec::with_capacity(n + k - 1);
        for j in 1..i {
            out.push(shift(self.apply(j)));
        }
        for j in 1..=k {
            out.push(ti + v.apply(j) - 1);
        }
        for j in i + 1..=n {
            out.push(shift(self.apply(j)));
        }
        Ok(Permutation(out.into_iter().map(|x| x as u8).collect()))
    }

    /// The unique `(τ, ν) ∈ S_n × S_k` with `τ ∘_i ν = self`, if any (`k ≥ 1`).
    pub fn decompose_block(&self, n: usize, k: usize, i: usize) -> Result<Option<(Permutation, Permutation)>> {
        if k == 0 || n == 0 || n + k - 1 != self.size() {
            return Err(Error::SizeMismatch { expected: self.size(), got: n + k - 1 });
        }
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, max: n });
        }
        let block: Vec<usize> = (i..i + k).map(|j| self.apply(j)).collect();
        let low = *block.iter().min().expect("k >= 1");
        if *block.iter().max().expect("k >= 1") != low + k - 1 {
            return Ok(None);
        }
        let nu = Permutation(block.iter().map(|&x| (x - low + 1) as u8).collect());
        let unshift = |x: usize| if x < low { x } else { x - (k - 1) };
        let mut tau = Vec::with_capacity(n);
        for j in 1..i {
            tau.push(unshift(self.apply(j)));
        }
        tau.push(low);
        for j in i + k..=self.size() {
            tau.push(unshift(self.apply(j)));
        }
        Ok(Some((Permutation(tau.into_iter().map(|x| x as u8).collect()), nu)))
    }

    /// Every `τ ∈ S_{m+1}` with `τ ∘_i () = self`, i.e. whose deletion at
    /// position `i` standardizes to `self`. There are exactly `m + 1`.
    pub fn deletion_preimages(&self, i: usize) -> Result<Vec<Permutation>> {
        let m = self.size();
        if i == 0 || i > m + 1 {
            return Err(Error::IndexOutOfRange { index: i, max: m + 1 });
        }
        Ok((1..=m + 1)
            .map(|v| {
                let lift = |x: usize| if x < v { x } else { x + 1 };
                let mut out = Vec::with_capacity(m + 1);
                for j in 1..i {
                    out.push(lift(self.apply(j)) as u8);
                }
                out.push(v as u8);
                for j in i..=m {
                    out.push(lift(self.apply(j)) as u8);
                }
                Permutation(out)
            })
            .collect())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.images()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for v in &self.0 {
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
