use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const WORDS: usize = 4;

/// Largest vertex count any [`Graph`](crate::Graph) or `VertexSet` can hold.
pub const MAX_VERTICES: usize = WORDS * 64;

/// A subset of `{0, .., MAX_VERTICES - 1}` stored as a fixed bitmask.
///
/// Ordering is lexicographic on ascending vertex lists, which is also the
/// order combinations are visited in by the solvers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct VertexSet {
    words: [u64; WORDS],
}

impl VertexSet {
    pub const fn empty() -> Self {
        Self { words: [0; WORDS] }
    }

    /// `{0, .., n - 1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        let mut s = Self::empty();
        for (w, word) in s.words.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        s
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = Self::empty();
        s.insert(v);
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = Self::empty();
        for v in it {
            s.insert(v);
        }
        s
    }

    /// Low word only; meaningful when every member is below 64.
    pub fn from_bits(bits: u64) -> Self {
        let mut s = Self::empty();
        s.words[0] = bits;
        s
    }

    pub(crate) fn from_words(words: [u64; WORDS]) -> Self {
        Self { words }
    }

    pub(crate) fn words(&self) -> &[u64; WORDS] {
        &self.words
    }

    /// Low 64 bits.
    pub fn low_bits(&self) -> u64 {
        self.words[0]
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < MAX_VERTICES && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        assert!(v < MAX_VERTICES, "vertex {v} beyond capacity");
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if v < MAX_VERTICES {
            self.words[v / 64] &= !(1u64 << (v % 64));
        }
    }

    pub fn with(mut self, v: usize) -> Self {
        self.insert(v);
        self
    }

    pub fn without(mut self, v: usize) -> Self {
        self.remove(v);
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        (*self & *other).is_empty()
    }

    /// Smallest member.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Largest member.
    pub fn last(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn iter(&self) -> Iter {
        Iter {
            words: self.words,
            idx: 0,
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Checks that every member is below `n`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.last() {
            Some(v) if v >= n => Err(Error::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

pub struct Iter {
    words: [u64; WORDS],
    idx: usize,
}

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.idx < WORDS {
            let w = self.words[self.idx];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.idx] &= w - 1;
                return Some(self.idx * 64 + bit);
            }
            self.idx += 1;
        }
        None
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Self::from_vertices(it)
    }
}

macro_rules! bitop {
    ($trait:ident, $f:ident, $op:tt) => {
        impl $trait for VertexSet {
            type Output = VertexSet;
            #[inline]
            fn $f(self, rhs: VertexSet) -> VertexSet {
                let mut words = [0u64; WORDS];
                for i in 0..WORDS {
                    words[i] = self.words[i] $op rhs.words[i];
                }
                VertexSet { words }
            }
        }
    };
}

bitop!(BitOr, bitor, |);
bitop!(BitAnd, bitand, &);

impl Sub for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn sub(self, rhs: VertexSet) -> VertexSet {
        let mut words = self.words;
        for (w, r) in words.iter_mut().zip(rhs.words) {
            *w &= !r;
        }
        VertexSet { words }
    }
}

/// Complement within the full capacity; intersect with `VertexSet::full(n)`
/// to stay inside a graph.
impl Not for VertexSet {
    type Output = VertexSet;
    fn not(self) -> VertexSet {
        let mut words = self.words;
        for w in words.iter_mut() {
            *w = !*w;
        }
        VertexSet { words }
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Self {
        s.to_vec()
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = v.iter().find(|&&x| x >= MAX_VERTICES) {
            return Err(Error::VertexOutOfRange {
                vertex: bad,
                n: MAX_VERTICES,
            });
        }
        Ok(Self::from_vertices(v))
    }
}
