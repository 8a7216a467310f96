//! Sparse formal combinations and dense row reduction over `F_p`.

use std::collections::BTreeMap;

use crate::scalars::Prime;

/// A finitely supported combination `Σ c_k k` with coefficients in `F_p`.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lin<K: Ord> {
    p: Prime,
    terms: BTreeMap<K, u32>,
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero(p: Prime) -> Self {
        Lin { p, terms: BTreeMap::new() }
    }

    pub fn single(p: Prime, k: K, c: u32) -> Self {
        let mut v = Lin::zero(p);
        v.add_term(k, c);
        v
    }

    pub fn from_terms(p: Prime, terms: impl IntoIterator<Item = (K, u32)>) -> Self {
        let mut v = Lin::zero(p);
        for (k, c) in terms {
            v.add_term(k, c);
        }
        v
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn add_term(&mut self, k: K, c: u32) {
        let c = c % self.p.get();
        if c == 0 {
            return;
        }
        let p = self.p;
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = p.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Lin<K>, c: u32) {
        assert_eq!(self.p, other.p, "mixing combinations over different primes");
        if c % self.p.get() == 0 {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), self.p.mul(*v, c));
        }
    }

    pub fn add(&mut self, other: &Lin<K>) {
        self.add_scaled(other, 1);
    }

    pub fn sub(&mut self, other: &Lin<K>) {
        self.add_scaled(other, self.p.get() - 1);
    }

    pub fn scaled(&self, c: u32) -> Lin<K> {
        let mut r = Lin::zero(self.p);
        r.add_scaled(self, c);
        r
    }

    pub fn minus(&self, other: &Lin<K>) -> Lin<K> {
        let mut r = self.clone();
        r.sub(other);
        r
    }

    pub fn plus(&self, other: &Lin<K>) -> Lin<K> {
        let mut r = self.clone();
        r.add(other);
        r
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

    pub fn coeff(&self, k: &K) -> u32 {
        self.terms.get(k).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u32)> + '_ {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> + '_ {
        self.terms.keys()
    }

    /// Applies a linear map given on basis elements.
    pub fn map_linear<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<L>) -> Lin<L> {
        let mut r = Lin::zero(self.p);
        for (k, c) in &self.terms {
            r.add_scaled(&f(k), *c);
        }
        r
    }

    /// Keeps only the terms satisfying `pred`.
    pub fn filtered(&self, mut pred: impl FnMut(&K) -> bool) -> Lin<K> {
        Lin { p: self.p, terms: self.terms.iter().filter(|(k, _)| pred(k)).map(|(k, c)| (k.clone(), *c)).collect() }
    }
}

/// Reduced row echelon basis of a subspace of `F_p^n`, grown one vector at a time.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: Prime,
    ncols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: Prime, ncols: usize) -> Echelon {
        Echelon { p, ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Canonical representative of `v` modulo the subspace.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut v = v.to_vec();
        self.reduce_in_place(&mut v);
        v
    }

    fn reduce_in_place(&self, v: &mut [u32]) {
        let p = self.p;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                let f = p.neg(c);
                for (x, r) in v.iter_mut().zip(row).skip(piv) {
                    if *r != 0 {
                        *x = p.add(*x, p.mul(f, *r));
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let p = self.p;
        let mut v = self.reduce(v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = p.inv(v[piv]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = p.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                let f = p.neg(c);
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = p.add(*x, p.mul(f, *r));
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < piv);
        self.pivots.insert(pos, piv);
        self.rows.insert(pos, v);
        true
    }
}

/// A basis of the left kernel `{x : Σ x_i rows_i = 0}`.
pub fn left_kernel(p: Prime, rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let n = rows.len();
    let mut reduced: Vec<(usize, Vec<u32>, Vec<u32>)> = Vec::new();
    let mut kernel = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut a = row.clone();
        let mut combo = vec![0u32; n];
        combo[i] = 1;
        for (piv, ra, rc) in &reduced {
            let c = a[*piv];
            if c != 0 {
                let f = p.neg(c);
                for (x, y) in a.iter_mut().zip(ra) {
                    *x = p.add(*x, p.mul(f, *y));
                }
                for (x, y) in combo.iter_mut().zip(rc) {
                    *x = p.add(*x, p.mul(f, *y));
                }
            }
        }
        match a.iter().take(ncols).position(|&x| x != 0) {
            None => kernel.push(combo),
            Some(piv) => {
                let inv = p.inv(a[piv]).expect("nonzero pivot");
                a.iter_mut().for_each(|x| *x = p.mul(*x, inv));
                combo.iter_mut().for_each(|x| *x = p.mul(*x, inv));
                reduced.push((piv, a, combo));
            }
        }
    }
    kernel
}

/// Dense matrix product `a * b` over `F_p`.
pub fn mat_mul(p: Prime, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).fold(0, |acc, (&x, br)| p.add(acc, p.mul(x, br[j]))))
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> Vec<Vec<u32>> {
    (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn lin_cancels_to_zero() {
        let mut v = Lin::single(p5(), 'a', 3);
        v.add_term('a', 2);
        assert!(v.is_zero());
        v.add_term('b', 7);
        assert_eq!(v.coeff(&'b'), 2);
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new(p5(), 3);
        assert!(e.insert(&[1, 2, 0]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[1, 3, 1]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&[2, 0, 1]));
        assert!(!e.contains(&[0, 0, 1]));
    }

    #[test]
    fn kernel_of_dependent_rows() {
        let rows = vec![vec![1, 2], vec![2, 4], vec![0, 1]];
        let k = left_kernel(p5(), &rows, 2);
        assert_eq!(k.len(), 1);
        let x = &k[0];
        for j in 0..2 {
            let s = (0..3).fold(0, |a, i| p5().add(a, p5().mul(x[i], rows[i][j])));
            assert_eq!(s, 0);
        }
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in proptest::collection::vec(proptest::collection::vec(0u32..5, 4), 1..7)) {
            let p = p5();
            let mut e = Echelon::new(p, 4);
            for r in &rows { e.insert(r); }
            let k = left_kernel(p, &rows, 4);
            prop_assert_eq!(e.rank() + k.len(), rows.len());
            for r in &rows { prop_assert!(e.contains(r)); }
        }

        #[test]
        fn reduce_is_canonical(a in proptest::collection::vec(0u32..5, 4), b in proptest::collection::vec(0u32..5, 4), t in 0u32..5) {
            let p = p5();
            let mut e = Echelon::new(p, 4);
            e.insert(&b);
            let shifted: Vec<u32> = a.iter().zip(&b).map(|(x, y)| p.add(*x, p.mul(t, *y))).collect();
            prop_assert_eq!(e.reduce(&a), e.reduce(&shifted));
        }
    }
}
