//! Fixed-width vectors over F2, tagged by what they index.

use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

/// Marker for vectors indexed by faces (qubits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Faces {}

/// Marker for vectors indexed by edges (X checks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edges {}

/// A bit vector over F2 with a fixed width.
#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
pub struct F2Vec<K> {
    len: usize,
    words: Vec<u64>,
    #[serde(skip)]
    _kind: PhantomData<K>,
}

/// Errors, corrections and other face sets.
pub type QubitSet = F2Vec<Faces>;
/// Syndromes and other edge sets.
pub type CheckSet = F2Vec<Edges>;

impl<K> F2Vec<K> {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
            _kind: PhantomData,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, idx: I) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i & 63);
        if b {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// In-place XOR. Panics if widths differ.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "width mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the overlap with `other`.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "width mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter_ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }
}

impl<K> Clone for F2Vec<K> {
    fn clone(&self) -> Self {
        Self {
            len: self.len,
            words: self.words.clone(),
            _kind: PhantomData,
        }
    }
}

impl<K> PartialEq for F2Vec<K> {
    fn eq(&self, o: &Self) -> bool {
        self.len == o.len && self.words == o.words
    }
}

impl<K> Eq for F2Vec<K> {}

impl<K> std::hash::Hash for F2Vec<K> {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.len.hash(h);
        self.words.hash(h);
    }
}

impl<K> fmt::Debug for F2Vec<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter_ones()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_iterates_in_order() {
        let v = CheckSet::from_indices(200, [3, 64, 199, 0]);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 3, 64, 199]);
        assert_eq!(v.weight(), 4);
    }

    #[test]
    fn ones_vector_has_exact_width() {
        let v = QubitSet::ones(70);
        assert_eq!(v.weight(), 70);
        assert!(!v.is_zero());
    }

    #[test]
    fn xor_cancels() {
        let a = CheckSet::from_indices(10, [1, 2, 3]);
        let b = CheckSet::from_indices(10, [3, 4]);
        let c = a.xor(&b);
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(a.dot(&b));
        assert!(!c.xor(&c).dot(&a));
    }
}
