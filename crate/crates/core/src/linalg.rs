//! Incremental row reduction over F_p on sparse vectors.

use std::collections::BTreeMap;

use crate::lin::Lin;
use crate::scalars::PrimeField;

/// A reduced basis of a subspace, keyed by pivot (the smallest index of
/// each stored row, whose coefficient is 1).
#[derive(Debug, Clone)]
pub struct Echelon {
    field: PrimeField,
    rows: BTreeMap<usize, Lin<usize>>,
}

impl Echelon {
    pub fn new(field: PrimeField) -> Self {
        Self { field, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, v: &Lin<usize>) -> Lin<usize> {
        let f = &self.field;
        let mut out = v.clone();
        let mut cursor = 0;
        while let Some((&k, c)) = out.first_from(&cursor) {
            if let Some(row) = self.rows.get(&k) {
                out.add_scaled(f, row, f.neg(c));
            } else {
                cursor = k + 1;
            }
        }
        out
    }

    pub fn contains(&self, v: &Lin<usize>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &Lin<usize>) -> bool {
        let r = self.reduce(v);
        let Some((&k, c)) = r.first() else {
            return false;
        };
        let inv = self.field.inv(c).expect("nonzero pivot");
        self.rows.insert(k, r.scaled(&self.field, inv));
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &Lin<usize>> {
        self.rows.values()
    }
}

pub fn rank(field: &PrimeField, rows: &[Lin<usize>]) -> usize {
    let mut e = Echelon::new(*field);
    rows.iter().filter(|r| e.insert(r)).count()
}

/// A basis of `{x ∈ F_p^ncols : ⟨row, x⟩ = 0 for every row}`, one vector
/// per non-pivot column.
pub fn nullspace(field: &PrimeField, rows: &[Lin<usize>], ncols: usize) -> Vec<Lin<usize>> {
    let mut e = Echelon::new(*field);
    for r in rows {
        e.insert(r);
    }
    let mut out = vec![];
    for free in (0..ncols).filter(|j| !e.rows.contains_key(j)) {
        let mut x = Lin::basis(free);
        for (&k, row) in e.rows.iter().rev() {
            let mut v = 0;
            for (&m, c) in row.iter() {
                if m != k {
                    v = field.add(v, field.mul(c, x.coeff(&m)));
                }
            }
            x.add_term(field, k, field.neg(v));
        }
        out.push(x);
    }
    out
}
