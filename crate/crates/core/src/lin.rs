//! Sparse F_p-linear combinations over an ordered basis.

use std::collections::BTreeMap;

use crate::scalars::PrimeField;

/// A finite linear combination `Σ c_k · k` with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lin<K: Ord> {
    terms: BTreeMap<K, u64>,
}

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: K) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(k, 1);
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &K) -> u64 {
        self.terms.get(k).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// The smallest term whose key is at least `k`.
    pub fn first_from(&self, k: &K) -> Option<(&K, u64)> {
        self.terms.range(k..).next().map(|(k, &c)| (k, c))
    }

    pub fn first(&self) -> Option<(&K, u64)> {
        self.terms.iter().next().map(|(k, &c)| (k, c))
    }

    pub fn add_term(&mut self, field: &PrimeField, k: K, c: u64) {
        let c = field.reduce(c);
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(k);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Inserts a term assumed reduced and absent.
    pub fn add_term_unchecked(&mut self, k: K, c: u64) {
        self.terms.insert(k, c);
    }

    pub fn add_scaled(&mut self, field: &PrimeField, other: &Lin<K>, c: u64) {
        let c = field.reduce(c);
        if c == 0 {
            return;
        }
        for (k, v) in other.iter() {
            self.add_term(field, k.clone(), field.mul(v, c));
        }
    }

    pub fn add_assign(&mut self, field: &PrimeField, other: &Lin<K>) {
        self.add_scaled(field, other, 1);
    }

    pub fn scaled(&self, field: &PrimeField, c: u64) -> Lin<K> {
        let mut out = Lin::zero();
        out.add_scaled(field, self, c);
        out
    }

    pub fn sub(&self, field: &PrimeField, other: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out.add_scaled(field, other, field.neg(1));
        out
    }

    /// Linear extension of `f` from basis elements.
    pub fn map_linear<L: Ord + Clone>(
        &self,
        field: &PrimeField,
        mut f: impl FnMut(&K) -> Lin<L>,
    ) -> Lin<L> {
        let mut out = Lin::zero();
        for (k, c) in self.iter() {
            out.add_scaled(field, &f(k), c);
        }
        out
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&K) -> bool) {
        self.terms.retain(|k, _| keep(k));
    }

    pub fn from_terms(field: &PrimeField, terms: impl IntoIterator<Item = (K, u64)>) -> Self {
        let mut out = Lin::zero();
        for (k, c) in terms {
            out.add_term(field, k, c);
        }
        out
    }
}

/// Bilinear Kronecker pairing of two combinations over the same basis.
pub fn pair<K: Ord + Clone>(field: &PrimeField, a: &Lin<K>, b: &Lin<K>) -> u64 {
    let mut acc = 0;
    for (k, c) in a.iter() {
        acc = field.add(acc, field.mul(c, b.coeff(k)));
    }
    acc
}
