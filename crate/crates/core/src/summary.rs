//! Indistinguishability and the minimal summary of a complete digraph.

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::policy::DomainPolicy;

/// Largest digraph accepted by [`is_summary_of`], whose homomorphism
/// search is exponential.
pub const SUMMARY_CHECK_LIMIT: usize = 10;

/// Classes of the indistinguishability relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalencePartition {
    /// Entity to the minimum entity of its class.
    pub representative: Vec<usize>,
    /// Classes in increasing order of representative, members ascending.
    pub classes: Vec<Vec<usize>>,
}

impl EquivalencePartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Builds the partition from any class labelling of the entities.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut first = std::collections::HashMap::new();
        let mut representative = vec![0; n];
        for (u, &l) in labels.iter().enumerate() {
            representative[u] = *first.entry(l).or_insert(u);
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for u in 0..n {
            let r = representative[u];
            if slot[r] == usize::MAX {
                slot[r] = classes.len();
                classes.push(Vec::new());
            }
            classes[slot[r]].push(u);
        }
        EquivalencePartition { representative, classes }
    }
}

/// Signed right set `{+a | (u,a,v) ∈ E} ∪ {-a | (v,a,u) ∈ E}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencySignature {
    forward: Vec<bool>,
    backward: Vec<bool>,
}

impl AdjacencySignature {
    pub fn has_forward(&self, a: usize) -> bool {
        self.forward[a]
    }

    pub fn has_backward(&self, a: usize) -> bool {
        self.backward[a]
    }

    pub fn is_empty(&self) -> bool {
        !self.forward.iter().chain(&self.backward).any(|&b| b)
    }

    /// `+a` is encoded as `a + 1`, `-a` as `-(a + 1)`.
    pub fn signed(&self) -> Vec<i64> {
        let plus = (0..self.forward.len()).filter(|&a| self.forward[a]).map(|a| a as i64 + 1);
        let minus = (0..self.backward.len()).filter(|&a| self.backward[a]).map(|a| -(a as i64 + 1));
        plus.chain(minus).collect()
    }
}

pub fn adjacency(g: &Digraph, u: usize, v: usize) -> AdjacencySignature {
    AdjacencySignature {
        forward: (0..g.k()).map(|a| g.has_edge(u, a, v)).collect(),
        backward: (0..g.k()).map(|a| g.has_edge(v, a, u)).collect(),
    }
}

/// Whether two equally long bitsets agree outside positions `u` and `v`.
#[inline]
fn rows_agree_except(x: &[u64], y: &[u64], u: usize, v: usize) -> bool {
    x.iter().zip(y).enumerate().all(|(w, (&a, &b))| {
        let mut diff = a ^ b;
        if u / 64 == w {
            diff &= !(1 << (u % 64));
        }
        if v / 64 == w {
            diff &= !(1 << (v % 64));
        }
        diff == 0
    })
}

/// `u ≡ v`: for every right, the four edges among `{u, v}` are all
/// present or all absent, and `u`, `v` agree on every other entity as
/// both subject and object.
pub fn indistinguishable(g: &Digraph, u: usize, v: usize) -> bool {
    if u == v {
        return true;
    }
    (0..g.k()).all(|a| {
        let uu = g.has_edge(u, a, u);
        uu == g.has_edge(u, a, v)
            && uu == g.has_edge(v, a, u)
            && uu == g.has_edge(v, a, v)
            && rows_agree_except(g.out_row(u, a), g.out_row(v, a), u, v)
            && rows_agree_except(g.in_row(u, a), g.in_row(v, a), u, v)
    })
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (mut x, mut y) = (self.find(x), self.find(y));
        if x == y {
            return;
        }
        if self.rank[x] < self.rank[y] {
            std::mem::swap(&mut x, &mut y);
        }
        self.parent[y] = x;
        if self.rank[x] == self.rank[y] {
            self.rank[x] += 1;
        }
    }
}

/// Computes the indistinguishability classes and returns the summary
/// `G[U]` over the class representatives together with the assignment
/// of every entity to its class.
///
/// Domain `p` of the returned policy is the `p`-th class in order of
/// its minimum entity, and that entity is the class representative.
pub fn summarize(g: &Digraph) -> (DomainPolicy, EquivalencePartition) {
    let n = g.n();
    let mut sets = UnionFind::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if sets.find(u) != sets.find(v) && indistinguishable(g, u, v) {
                sets.union(u, v);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|u| sets.find(u)).collect();
    let partition = EquivalencePartition::from_labels(&roots);

    let reps: Vec<usize> = partition.classes.iter().map(|c| c[0]).collect();
    let mut domain_of = vec![0; n];
    for (p, class) in partition.classes.iter().enumerate() {
        for &u in class {
            domain_of[u] = p;
        }
    }
    let policy = DomainPolicy::new(g.induced(&reps), domain_of).expect("domains index the representatives");
    (policy, partition)
}

/// Number of indistinguishability classes of `g`.
pub fn class_count(g: &Digraph) -> usize {
    summarize(g).1.class_count()
}

/// A digraph is irreducible when no two distinct vertices are
/// indistinguishable, i.e. it is its own summary.
pub fn is_irreducible(h: &Digraph) -> bool {
    (0..h.n()).all(|p| (p + 1..h.n()).all(|q| !indistinguishable(h, p, q)))
}

/// Exhaustive search for a surjective strong homomorphism `g -> h`.
///
/// Exponential; both digraphs must have at most
/// [`SUMMARY_CHECK_LIMIT`] vertices.
pub fn find_surjective_strong_homomorphism(g: &Digraph, h: &Digraph) -> Result<Option<Vec<usize>>> {
    if g.n() > SUMMARY_CHECK_LIMIT || h.n() > SUMMARY_CHECK_LIMIT {
        return Err(Error::SizeLimit(format!(
            "summary check supports at most {SUMMARY_CHECK_LIMIT} vertices, got {} and {}",
            g.n(),
            h.n()
        )));
    }
    if g.k() != h.k() || h.n() > g.n() || (h.n() == 0) != (g.n() == 0) {
        return Ok(None);
    }
    let mut map = Vec::with_capacity(g.n());
    let mut hits = vec![0usize; h.n()];
    Ok(extend_homomorphism(g, h, &mut map, &mut hits).then_some(map))
}

fn extend_homomorphism(g: &Digraph, h: &Digraph, map: &mut Vec<usize>, hits: &mut [usize]) -> bool {
    let u = map.len();
    if u == g.n() {
        return hits.iter().all(|&c| c > 0);
    }
    let missing = hits.iter().filter(|&&c| c == 0).count();
    if missing > g.n() - u {
        return false;
    }
    for p in 0..h.n() {
        map.push(p);
        let consistent = (0..=u).all(|w| {
            let q = map[w];
            (0..g.k()).all(|a| g.has_edge(u, a, w) == h.has_edge(p, a, q) && g.has_edge(w, a, u) == h.has_edge(q, a, p))
        });
        if consistent {
            hits[p] += 1;
            if extend_homomorphism(g, h, map, hits) {
                return true;
            }
            hits[p] -= 1;
        }
        map.pop();
    }
    false
}

/// Whether `h` is a summary of `g`: some surjective strong homomorphism
/// maps `g` onto `h`, and `h` is irreducible.
pub fn is_summary_of(h: &Digraph, g: &Digraph) -> Result<bool> {
    Ok(find_surjective_strong_homomorphism(g, h)?.is_some() && is_irreducible(h))
}
