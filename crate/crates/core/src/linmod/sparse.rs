//! Sparse vectors with exact rational coefficients and incremental row
//! echelon forms whose pivots are leading (largest) keys.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::Rational;

/// A finite linear combination of basis keys. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparseVec<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

impl<K: Ord + Clone> SparseVec<K> {
    pub fn zero() -> Self {
        SparseVec { terms: BTreeMap::new() }
    }

    pub fn unit(k: K) -> Self {
        Self::term(k, Rational::one())
    }

    pub fn term(k: K, c: Rational) -> Self {
        let mut v = Self::zero();
        v.add_term(k, c);
        v
    }

    pub fn from_terms(it: impl IntoIterator<Item = (K, Rational)>) -> Self {
        let mut v = Self::zero();
        for (k, c) in it {
            v.add_term(k, c);
        }
        v
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

    pub fn get(&self, k: &K) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Largest key with a nonzero coefficient.
    pub fn leading(&self) -> Option<(&K, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, x) in &other.terms {
            self.add_term(k.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparseVec { terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect() }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut v = self.clone();
        v.add_scaled(other, &Rational::one());
        v
    }

    pub fn diff(&self, other: &Self) -> Self {
        let mut v = self.clone();
        v.add_scaled(other, &-Rational::one());
        v
    }

    /// Applies a linear map given on basis keys.
    pub fn map_linear<L: Ord + Clone, E>(
        &self,
        mut f: impl FnMut(&K) -> Result<SparseVec<L>, E>,
    ) -> Result<SparseVec<L>, E> {
        let mut out = SparseVec::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k)?, c);
        }
        Ok(out)
    }

    /// Keeps only the keys satisfying `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        SparseVec {
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for SparseVec<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(k, c)| (k, c.to_string()))).finish()
    }
}

/// Row echelon form with at most one row per pivot, the pivot of a row
/// being its largest key with coefficient one. Rows are only reduced at
/// their pivots, which is enough for rank, membership, and for reading
/// off `V ∩ span{keys <= k}` as the rows with pivot `<= k`.
#[derive(Clone, Default)]
pub struct Echelon<K: Ord> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.rows.values()
    }

    /// Subtracts rows until the leading key is not a pivot.
    pub fn reduce(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        loop {
            let Some((k, c)) = v.leading() else { return v };
            let Some(row) = self.rows.get(k) else { return v };
            let c = -c.clone();
            v.add_scaled(row, &c);
        }
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    /// Inserts `v`; returns whether it was independent of the rows.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let v = self.reduce(v);
        let Some((k, c)) = v.leading() else { return false };
        let k = k.clone();
        let inv = c.recip();
        self.rows.insert(k, v.scaled(&inv));
        true
    }

    /// Number of rows whose pivot satisfies `pred`.
    pub fn count_pivots(&self, pred: impl Fn(&K) -> bool) -> usize {
        self.rows.keys().filter(|k| pred(k)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn zero_coefficients_vanish() {
        let mut v = SparseVec::unit(3u32);
        v.add_term(3, -int(1));
        assert!(v.is_zero());
        let v = SparseVec::from_terms([(1u32, int(2)), (2, int(0))]);
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = Echelon::new();
        let a = SparseVec::from_terms([(0u32, int(1)), (2, int(1))]);
        let b = SparseVec::from_terms([(1u32, int(1)), (2, int(2))]);
        assert!(e.insert(a.clone()));
        assert!(e.insert(b.clone()));
        let mut c = a.scaled(&rat(1, 3));
        c.add_scaled(&b, &int(5));
        assert!(e.contains(&c));
        assert!(!e.insert(c));
        assert_eq!(e.rank(), 2);
        // a - b/2 has leading key 1
        let d = a.diff(&b.scaled(&rat(1, 2)));
        assert_eq!(d.leading().unwrap().0, &1);
        assert!(!e.insert(d));
        assert_eq!(e.count_pivots(|&k| k <= 1), 1);
        assert_eq!(e.count_pivots(|&k| k == 0), 0);
    }
}
