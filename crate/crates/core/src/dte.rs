//! Domain and type enforcement (DTE) policies mined from complete matrices.
//!
//! Rows of the access control matrix classify entities as subjects
//! (domains) and columns classify them as objects (types). Giving each
//! row class its own domain and each column class its own type is
//! optimal for `max(|D|, |T|)`: entities with different rows can never
//! share a domain, and likewise for columns and types.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::summary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtePolicy {
    pub domain_count: usize,
    pub type_count: usize,
    /// Entity to domain.
    pub delta: Vec<usize>,
    /// Entity to type.
    pub tau: Vec<usize>,
    k: usize,
    tbl: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DteDoc {
    pub domains: usize,
    pub types: usize,
    pub delta: Vec<usize>,
    pub tau: Vec<usize>,
    /// `tbl[d][a][t]` as 0/1.
    pub tbl: Vec<Vec<Vec<u8>>>,
}

impl DtePolicy {
    /// A policy with an all-zero permission table.
    pub fn new(domain_count: usize, type_count: usize, k: usize, delta: Vec<usize>, tau: Vec<usize>) -> Result<Self> {
        if delta.len() != tau.len() {
            return Err(Error::Arity { what: "type assignment", expected: delta.len(), found: tau.len() });
        }
        if let Some(&d) = delta.iter().find(|&&d| d >= domain_count) {
            return Err(Error::OutOfRange { what: "domain", index: d, limit: domain_count });
        }
        if let Some(&t) = tau.iter().find(|&&t| t >= type_count) {
            return Err(Error::OutOfRange { what: "type", index: t, limit: type_count });
        }
        Ok(DtePolicy {
            domain_count,
            type_count,
            delta,
            tau,
            k,
            tbl: vec![false; domain_count * k * type_count],
        })
    }

    #[inline]
    fn slot(&self, d: usize, a: usize, t: usize) -> usize {
        (d * self.k + a) * self.type_count + t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tbl(&self, d: usize, a: usize, t: usize) -> bool {
        self.tbl[self.slot(d, a, t)]
    }

    pub fn set_tbl(&mut self, d: usize, a: usize, t: usize, value: bool) {
        let i = self.slot(d, a, t);
        self.tbl[i] = value;
    }

    /// Whether `(u, a, v)` is granted: `tbl[delta(u), a, tau(v)]`.
    pub fn grants(&self, u: usize, a: usize, v: usize) -> bool {
        self.tbl(self.delta[u], a, self.tau[v])
    }

    pub fn to_doc(&self) -> DteDoc {
        let tbl = (0..self.domain_count)
            .map(|d| {
                (0..self.k)
                    .map(|a| (0..self.type_count).map(|t| self.tbl(d, a, t) as u8).collect())
                    .collect()
            })
            .collect();
        DteDoc {
            domains: self.domain_count,
            types: self.type_count,
            delta: self.delta.clone(),
            tau: self.tau.clone(),
            tbl,
        }
    }
}

/// `u ≡row v`: both entities may perform exactly the same accesses.
pub fn row_equivalent(m: &Digraph, u: usize, v: usize) -> bool {
    (0..m.k()).all(|a| m.out_row(u, a) == m.out_row(v, a))
}

/// `u ≡col v`: exactly the same accesses may be performed on both.
pub fn col_equivalent(m: &Digraph, u: usize, v: usize) -> bool {
    (0..m.k()).all(|a| m.in_row(u, a) == m.in_row(v, a))
}

/// Labels entities by distinct key, numbering classes by first occurrence.
fn label_by<F>(n: usize, key: F) -> (Vec<usize>, Vec<usize>)
where
    F: Fn(usize) -> Vec<u64>,
{
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut reps = Vec::new();
    let labels = (0..n)
        .map(|u| {
            *seen.entry(key(u)).or_insert_with(|| {
                reps.push(u);
                reps.len() - 1
            })
        })
        .collect();
    (labels, reps)
}

fn row_key(m: &Digraph, u: usize) -> Vec<u64> {
    (0..m.k()).flat_map(|a| m.out_row(u, a).iter().copied()).collect()
}

fn col_key(m: &Digraph, v: usize) -> Vec<u64> {
    (0..m.k()).flat_map(|a| m.in_row(v, a).iter().copied()).collect()
}

/// Row classes in first-occurrence order, with one representative each.
pub fn row_classes(m: &Digraph) -> (Vec<usize>, Vec<usize>) {
    label_by(m.n(), |u| row_key(m, u))
}

pub fn col_classes(m: &Digraph) -> (Vec<usize>, Vec<usize>) {
    label_by(m.n(), |v| col_key(m, v))
}

/// Row-class, column-class and indistinguishability-class counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub rows: usize,
    pub cols: usize,
    pub classes: usize,
}

pub fn counts(m: &Digraph) -> ClassCounts {
    ClassCounts {
        rows: row_classes(m).1.len(),
        cols: col_classes(m).1.len(),
        classes: summary::class_count(m),
    }
}

/// The min-max optimal DTE policy: one domain per row class and one type
/// per column class.
pub fn mine_dte(m: &Digraph) -> DtePolicy {
    let (delta, row_reps) = row_classes(m);
    let (tau, col_reps) = col_classes(m);
    let mut policy =
        DtePolicy::new(row_reps.len(), col_reps.len(), m.k(), delta, tau).expect("labels are dense");
    for (d, &u) in row_reps.iter().enumerate() {
        for a in 0..m.k() {
            for (t, &v) in col_reps.iter().enumerate() {
                policy.set_tbl(d, a, t, m.has_edge(u, a, v));
            }
        }
    }
    debug_assert!(
        (0..m.n()).all(|u| (0..m.k()).all(|a| (0..m.n()).all(|v| policy.grants(u, a, v) == m.has_edge(u, a, v)))),
        "permission table must not depend on the chosen representatives"
    );
    policy
}

pub fn dte_enforces(policy: &DtePolicy, m: &Digraph) -> Result<bool> {
    if policy.delta.len() != m.n() {
        return Err(Error::Arity { what: "domain assignment", expected: m.n(), found: policy.delta.len() });
    }
    if policy.k != m.k() {
        return Err(Error::Arity { what: "rights", expected: m.k(), found: policy.k });
    }
    Ok((0..m.n()).all(|u| (0..m.k()).all(|a| (0..m.n()).all(|v| policy.grants(u, a, v) == m.has_edge(u, a, v)))))
}
