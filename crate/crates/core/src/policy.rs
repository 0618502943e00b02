use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// A domain digraph plus the entity-to-domain assignment.
///
/// The policy grants `(u, a, v)` iff `(assignment[u], a, assignment[v])`
/// is an edge of `summary`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPolicy {
    pub summary: Digraph,
    pub assignment: Vec<usize>,
}

/// JSON shape of a [`DomainPolicy`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDoc {
    pub domains: usize,
    pub assignment: Vec<usize>,
    pub summary_edges: Vec<[usize; 3]>,
}

impl DomainPolicy {
    pub fn new(summary: Digraph, assignment: Vec<usize>) -> Result<Self> {
        if let Some(&d) = assignment.iter().find(|&&d| d >= summary.n()) {
            return Err(Error::OutOfRange { what: "domain", index: d, limit: summary.n() });
        }
        Ok(DomainPolicy { summary, assignment })
    }

    pub fn domain_count(&self) -> usize {
        self.summary.n()
    }

    pub fn grants(&self, u: usize, a: usize, v: usize) -> bool {
        self.summary.has_edge(self.assignment[u], a, self.assignment[v])
    }

    /// Whether the assignment is a strong homomorphism from `g` onto the
    /// summary: every triple is granted exactly when it is an edge of `g`.
    pub fn enforces(&self, g: &Digraph) -> Result<bool> {
        Ok(self.first_violation(g)?.is_none())
    }

    /// The first triple (row-major) on which policy and digraph disagree.
    pub fn first_violation(&self, g: &Digraph) -> Result<Option<(usize, usize, usize)>> {
        if self.assignment.len() != g.n() {
            return Err(Error::Arity { what: "assignment", expected: g.n(), found: self.assignment.len() });
        }
        if self.summary.k() != g.k() {
            return Err(Error::Arity { what: "rights", expected: g.k(), found: self.summary.k() });
        }
        for u in 0..g.n() {
            for a in 0..g.k() {
                for v in 0..g.n() {
                    if g.has_edge(u, a, v) != self.grants(u, a, v) {
                        return Ok(Some((u, a, v)));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn to_doc(&self) -> PolicyDoc {
        PolicyDoc {
            domains: self.domain_count(),
            assignment: self.assignment.clone(),
            summary_edges: self.summary.edges().map(|(p, a, q)| [p, a, q]).collect(),
        }
    }

    pub fn from_doc(doc: &PolicyDoc, k: usize) -> Result<Self> {
        let h = Digraph::from_edges(doc.domains, k, doc.summary_edges.iter().map(|e| (e[0], e[1], e[2])))?;
        Self::new(h, doc.assignment.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_policy_enforces() {
        let g = Digraph::from_edges(3, 2, [(0, 1, 2), (2, 0, 2), (1, 1, 0)]).unwrap();
        let p = DomainPolicy::new(g.clone(), vec![0, 1, 2]).unwrap();
        assert!(p.enforces(&g).unwrap());
    }

    #[test]
    fn merging_inequivalent_entities_fails() {
        // 0 has a self-loop, 1 does not
        let g = Digraph::from_edges(2, 1, [(0, 0, 0)]).unwrap();
        let h = Digraph::from_edges(1, 1, [(0, 0, 0)]).unwrap();
        let p = DomainPolicy::new(h, vec![0, 0]).unwrap();
        assert!(!p.enforces(&g).unwrap());
        assert_eq!(p.first_violation(&g).unwrap(), Some((0, 0, 1)));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let g = Digraph::empty(2, 1).unwrap();
        let p = DomainPolicy::new(Digraph::empty(1, 1).unwrap(), vec![0]).unwrap();
        assert!(matches!(p.enforces(&g), Err(Error::Arity { .. })));
        assert!(DomainPolicy::new(Digraph::empty(1, 1).unwrap(), vec![1]).is_err());
    }

    #[test]
    fn json_shape() {
        let h = Digraph::from_edges(2, 1, [(0, 0, 1)]).unwrap();
        let p = DomainPolicy::new(h, vec![0, 1, 1]).unwrap();
        let json = serde_json::to_string(&p.to_doc()).unwrap();
        assert_eq!(json, r#"{"domains":2,"assignment":[0,1,1],"summary_edges":[[0,0,1]]}"#);
        let back: PolicyDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(DomainPolicy::from_doc(&back, 1).unwrap(), p);
    }
}
