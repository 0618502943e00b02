//! Edge-labelled digraphs over dense entity and right indices.
//!
//! A digraph on `n` entities with `k` access rights is the complete access
//! control matrix `M[u, a, v]`. Storage is a pair of bit matrices: the
//! out-view keeps row `(u, a)` as the bitset of objects `v`, the in-view
//! keeps row `(v, a)` as the bitset of subjects `u`. Both views make the
//! pairwise equivalence tests a handful of word comparisons.

use std::fmt;

use crate::error::{Error, Result};

/// An access request `(subject, right, object)`.
pub type Triple = (usize, usize, usize);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    k: usize,
    words: usize,
    out: Vec<u64>,
    inc: Vec<u64>,
}

impl Digraph {
    /// Edgeless digraph. `k` must be at least one.
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("digraph needs at least one access right".into()));
        }
        let words = n.div_ceil(64);
        Ok(Digraph {
            n,
            k,
            words,
            out: vec![0; n * k * words],
            inc: vec![0; n * k * words],
        })
    }

    pub fn complete(n: usize, k: usize) -> Result<Self> {
        let mut g = Self::empty(n, k)?;
        for u in 0..n {
            for a in 0..k {
                for v in 0..n {
                    g.set(u, a, v, true);
                }
            }
        }
        Ok(g)
    }

    pub fn from_edges<I>(n: usize, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Triple>,
    {
        let mut g = Self::empty(n, k)?;
        for (u, a, v) in edges {
            g.check(u, a, v)?;
            g.set(u, a, v, true);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub(crate) fn check(&self, u: usize, a: usize, v: usize) -> Result<()> {
        if u >= self.n {
            return Err(Error::OutOfRange { what: "entity", index: u, limit: self.n });
        }
        if v >= self.n {
            return Err(Error::OutOfRange { what: "entity", index: v, limit: self.n });
        }
        if a >= self.k {
            return Err(Error::OutOfRange { what: "right", index: a, limit: self.k });
        }
        Ok(())
    }

    #[inline]
    fn row(&self, x: usize, a: usize) -> usize {
        (x * self.k + a) * self.words
    }

    #[inline]
    pub fn has_edge(&self, u: usize, a: usize, v: usize) -> bool {
        self.out[self.row(u, a) + v / 64] >> (v % 64) & 1 == 1
    }

    /// Sets or clears `(u, a, v)`. Indices are not range checked beyond
    /// the slice bounds; use [`Digraph::from_edges`] for untrusted input.
    pub fn set(&mut self, u: usize, a: usize, v: usize, present: bool) {
        let (o, i) = (self.row(u, a) + v / 64, self.row(v, a) + u / 64);
        if present {
            self.out[o] |= 1 << (v % 64);
            self.inc[i] |= 1 << (u % 64);
        } else {
            self.out[o] &= !(1 << (v % 64));
            self.inc[i] &= !(1 << (u % 64));
        }
    }

    pub fn add_edge(&mut self, u: usize, a: usize, v: usize) -> Result<()> {
        self.check(u, a, v)?;
        self.set(u, a, v, true);
        Ok(())
    }

    /// Objects that `u` may access with right `a`, as a bitset.
    #[inline]
    pub fn out_row(&self, u: usize, a: usize) -> &[u64] {
        let r = self.row(u, a);
        &self.out[r..r + self.words]
    }

    /// Subjects that may access `v` with right `a`, as a bitset.
    #[inline]
    pub fn in_row(&self, v: usize, a: usize) -> &[u64] {
        let r = self.row(v, a);
        &self.inc[r..r + self.words]
    }

    /// All edges in row-major `(u, a, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = Triple> + '_ {
        (0..self.n).flat_map(move |u| {
            (0..self.k).flat_map(move |a| {
                let row = self.out_row(u, a);
                row.iter().enumerate().flat_map(move |(w, &bits)| {
                    BitIter(bits).map(move |b| (u, a, w * 64 + b))
                })
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `G[U]`: the subgraph induced by `vertices`, relabelled so that
    /// `vertices[i]` becomes vertex `i`.
    pub fn induced(&self, vertices: &[usize]) -> Digraph {
        let mut h = Digraph::empty(vertices.len(), self.k).expect("k >= 1");
        for (p, &u) in vertices.iter().enumerate() {
            for a in 0..self.k {
                for (q, &v) in vertices.iter().enumerate() {
                    if self.has_edge(u, a, v) {
                        h.set(p, a, q, true);
                    }
                }
            }
        }
        h
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Iterates the set bit positions of a word, lowest first.
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}
