//! Independent reference implementations shared by the integration tests.
//! They work from the definitions directly and avoid the library's
//! bitset paths.
#![allow(dead_code)]

use domainminer::{Cell, Digraph, DomainPolicy, PartialMatrix};
use rand::Rng;

pub fn random_digraph(rng: &mut impl Rng, n: usize, k: usize, p: f64) -> Digraph {
    let mut g = Digraph::empty(n, k).unwrap();
    for u in 0..n {
        for a in 0..k {
            for v in 0..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, a, v).unwrap();
                }
            }
        }
    }
    g
}

/// Random matrix with at most `max_stars` Stars; other cells 0/1 evenly.
pub fn random_psm(rng: &mut impl Rng, n: usize, k: usize, max_stars: usize) -> PartialMatrix {
    let g = random_digraph(rng, n, k, 0.5);
    let mut psm = PartialMatrix::from_digraph(&g);
    let total = n * k * n;
    let stars = rng.gen_range(0..=max_stars.min(total));
    for idx in rand::seq::index::sample(rng, total, stars) {
        let (u, a, v) = psm.triple(idx);
        psm.set(u, a, v, Cell::Star);
    }
    psm
}

/// Indistinguishability read straight off its definition.
pub fn naive_indist(g: &Digraph, u: usize, v: usize) -> bool {
    (0..g.k()).all(|a| {
        let quad = [g.has_edge(u, a, u), g.has_edge(u, a, v), g.has_edge(v, a, u), g.has_edge(v, a, v)];
        let block = quad.iter().all(|&b| b) || quad.iter().all(|&b| !b);
        block
            && (0..g.n())
                .filter(|&x| x != u && x != v)
                .all(|x| g.has_edge(u, a, x) == g.has_edge(v, a, x) && g.has_edge(x, a, u) == g.has_edge(x, a, v))
    })
}

/// Class labels by pairwise merging: each vertex joins the class of the
/// first earlier vertex it is indistinguishable from.
pub fn pairwise_labels(g: &Digraph) -> Vec<usize> {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        match (0..v).find(|&u| naive_indist(g, u, v)) {
            Some(u) => label[v] = label[u],
            None => {
                label[v] = next;
                next += 1;
            }
        }
    }
    label
}

pub fn pairwise_class_count(g: &Digraph) -> usize {
    pairwise_labels(g).iter().max().map_or(0, |&m| m + 1)
}

/// Enforcement by scanning every triple.
pub fn scan_enforces(p: &DomainPolicy, g: &Digraph) -> bool {
    let h = &p.summary;
    (0..g.n()).all(|u| {
        (0..g.k()).all(|a| {
            (0..g.n()).all(|v| g.has_edge(u, a, v) == h.has_edge(p.assignment[u], a, p.assignment[v]))
        })
    })
}

/// Distinct rows and columns, counted by sorting bit strings.
pub fn dedup_rows_cols(g: &Digraph) -> (usize, usize) {
    let (n, k) = (g.n(), g.k());
    let mut rows: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..k).flat_map(|a| (0..n).map(move |v| (a, v))).map(|(a, v)| g.has_edge(u, a, v)).collect())
        .collect();
    let mut cols: Vec<Vec<bool>> = (0..n)
        .map(|v| (0..k).flat_map(|a| (0..n).map(move |u| (a, u))).map(|(a, u)| g.has_edge(u, a, v)).collect())
        .collect();
    rows.sort();
    rows.dedup();
    cols.sort();
    cols.dedup();
    (rows.len(), cols.len())
}

/// Minimum class count over all fills, by plain binary counting.
pub fn enumerate_dbpm(psm: &PartialMatrix) -> usize {
    let s = psm.star_count();
    assert!(s <= 16);
    (0u32..1 << s)
        .map(|bits| {
            let fill: Vec<bool> = (0..s).map(|i| bits >> i & 1 == 1).collect();
            pairwise_class_count(&psm.instantiate(&fill).unwrap())
        })
        .min()
        .unwrap()
}

/// Whether `a` and `b` are isomorphic, by trying every bijection.
pub fn isomorphic(a: &Digraph, b: &Digraph) -> bool {
    if a.n() != b.n() || a.k() != b.k() || a.edge_count() != b.edge_count() {
        return false;
    }
    let n = a.n();
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(i: usize, perm: &mut Vec<usize>, a: &Digraph, b: &Digraph) -> bool {
        let n = perm.len();
        if i == n {
            return a.edges().all(|(u, x, v)| b.has_edge(perm[u], x, perm[v]));
        }
        for j in i..n {
            perm.swap(i, j);
            // prune on self-loops, which a bijection must preserve
            let ok = (0..a.k()).all(|x| a.has_edge(i, x, i) == b.has_edge(perm[i], x, perm[i]));
            if ok && rec(i + 1, perm, a, b) {
                return true;
            }
            perm.swap(i, j);
        }
        false
    }
    rec(0, &mut perm, a, b)
}
