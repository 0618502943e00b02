//! Reductions from graph 3-colorability to DBPM and DB, and from DB to
//! DTEPM. They double as generators of hard instances with known answers.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{Cell, PartialMatrix};

/// Largest graph accepted by [`is_three_colorable`].
pub const COLORING_LIMIT: usize = 12;

/// A simple undirected graph with edges stored as `(u, v)`, `u < v`, in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl UndirectedGraph {
    /// Builds a graph; endpoints are normalized and edges sorted.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::OutOfRange { what: "vertex", index: x, limit: n });
                }
            }
            if u == v {
                return Err(Error::Config(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate edge {:?}", w[0])));
        }
        Ok(UndirectedGraph { n, edges: list })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        UndirectedGraph::new(n, edges).expect("complete graph is simple")
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        UndirectedGraph::new(10, outer.chain(spokes).chain(inner)).expect("Petersen graph is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Parses `g <n>` followed by `e <u> <v>` lines (0-based); `#` starts
    /// a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(origin, lno, format!("bad number {s:?}")));
            match f.as_slice() {
                ["g", count] if n.is_none() => n = Some(num(count)?),
                ["e", u, v] if n.is_some() => {
                    let (u, v) = (num(u)?, num(v)?);
                    let limit = n.unwrap_or(0);
                    if u >= limit || v >= limit || u == v {
                        return Err(Error::parse(origin, lno, format!("invalid edge {u} {v} for {limit} vertices")));
                    }
                    edges.push((u, v));
                }
                _ => return Err(Error::parse(origin, lno, format!("unexpected line {line:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::parse(origin, 1, "missing `g <n>` line"))?;
        UndirectedGraph::new(n, edges).map_err(|e| Error::parse(origin, 1, e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        UndirectedGraph::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("g {}\n", self.n);
        for &(u, v) in &self.edges {
            s.push_str(&format!("e {u} {v}\n"));
        }
        s
    }
}

/// Entity layout of the DBPM reduction instance.
#[derive(Debug, Clone, Copy)]
pub struct DbpmLayout {
    pub vertices: usize,
    pub edges: usize,
}

impl DbpmLayout {
    /// Colour-option entity for vertex `v` and colour `i` (0..3).
    pub fn x(&self, v: usize, i: usize) -> usize {
        3 * v + i
    }
    pub fn y(&self, v: usize) -> usize {
        3 * self.vertices + v
    }
    pub fn z(&self, e: usize, i: usize) -> usize {
        4 * self.vertices + 3 * e + i
    }
    /// Right attached to vertex `v`.
    pub fn a(&self, v: usize) -> usize {
        v
    }
    /// Right attached to edge `e`.
    pub fn b(&self, e: usize) -> usize {
        self.vertices + e
    }
    pub fn entity_count(&self) -> usize {
        4 * self.vertices + 3 * self.edges
    }
    pub fn right_count(&self) -> usize {
        self.vertices + self.edges
    }
}

/// Builds the DBPM instance `(3|V|, psm)` whose optimum is at most `3|V|`
/// exactly when `h` is 3-colorable. Unlisted cells are Star.
///
/// Rights: one per vertex, then one per edge. Entities: three colour
/// options per vertex, one per vertex, three per edge.
pub fn three_color_to_dbpm(h: &UndirectedGraph) -> Result<(usize, PartialMatrix)> {
    let lay = DbpmLayout { vertices: h.vertex_count(), edges: h.edges().len() };
    let nv = lay.vertices;
    if nv == 0 {
        return Err(Error::Config("graph has no vertices".into()));
    }
    let mut psm = PartialMatrix::new(lay.entity_count(), lay.right_count())?;
    for v in 0..nv {
        for i in 0..3 {
            psm.set(lay.x(v, i), lay.a(v), lay.x(v, i), Cell::One);
            for j in 0..3 {
                if i != j {
                    psm.set(lay.x(v, i), lay.a(v), lay.x(v, j), Cell::Zero);
                }
            }
            for u in (0..nv).filter(|&u| u != v) {
                psm.set(lay.x(v, i), lay.a(u), lay.x(v, i), Cell::Zero);
            }
        }
        psm.set(lay.y(v), lay.a(v), lay.y(v), Cell::One);
        for u in (0..nv).filter(|&u| u != v) {
            psm.set(lay.y(v), lay.a(u), lay.y(v), Cell::Zero);
        }
    }
    for (e, &(p, q)) in h.edges().iter().enumerate() {
        for v in [p, q] {
            psm.set(lay.y(v), lay.b(e), lay.y(v), Cell::Zero);
        }
        for i in 0..3 {
            let z = lay.z(e, i);
            psm.set(z, lay.b(e), z, Cell::One);
            for u in (0..nv).filter(|&u| u != p && u != q) {
                psm.set(z, lay.a(u), z, Cell::Zero);
            }
            for v in [p, q] {
                for j in (0..3).filter(|&j| j != i) {
                    psm.set(z, lay.a(v), lay.x(v, j), Cell::Zero);
                    psm.set(lay.x(v, j), lay.a(v), z, Cell::Zero);
                }
            }
        }
    }
    Ok((3 * nv, psm))
}

/// Builds the single-right DB instance `(3, psm)`: some instantiation has
/// at most three distinct rows exactly when `h` is 3-colorable.
///
/// Rows 0..3 are colour rows, rows `3 + v` vertex rows, and each edge `i`
/// owns three rows from `3 + |V| + 3i`. Column `3 + v` belongs to vertex
/// `v`; the last `3|E|` columns are all zero.
pub fn three_color_to_db(h: &UndirectedGraph) -> Result<(usize, PartialMatrix)> {
    let nv = h.vertex_count();
    let left = 3 + nv;
    let n = left + 3 * h.edges().len();
    let mut psm = PartialMatrix::filled(n, 1, Cell::Zero)?;
    for row in 0..n {
        for col in 0..left {
            psm.set(row, 0, col, Cell::Star);
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            psm.set(i, 0, j, if i == j { Cell::One } else { Cell::Zero });
        }
    }
    for v in 0..nv {
        psm.set(3 + v, 0, 3 + v, Cell::One);
    }
    for (i, &(u, v)) in h.edges().iter().enumerate() {
        let base = left + 3 * i;
        let patterns = [(Cell::One, Cell::Zero), (Cell::Zero, Cell::One), (Cell::Zero, Cell::Zero)];
        for (t, (cu, cv)) in patterns.into_iter().enumerate() {
            psm.set(base + t, 0, 3 + u, cu);
            psm.set(base + t, 0, 3 + v, cv);
        }
    }
    Ok((3, psm))
}

/// The fixed `(2n+1)`-square gadget with `2n+1` distinct rows and `n+1`
/// distinct columns.
pub fn gadget(n: usize) -> Vec<Vec<bool>> {
    let size = 2 * n + 1;
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| if i < n { j == i || j == 2 * n - i } else { 2 * n - i <= j && j <= i })
                .collect()
        })
        .collect()
}

/// Embeds a single-right DB instance into a DTEPM instance: the matrix
/// becomes the top-left block, the gadget the bottom-right block, and
/// both off-diagonal blocks are zero. Returns `(m + 2n + 1, psm')`.
pub fn db_to_dtepm(m: usize, psm: &PartialMatrix) -> Result<(usize, PartialMatrix)> {
    if psm.k() != 1 {
        return Err(Error::Arity { what: "rights of a DB instance", expected: 1, found: psm.k() });
    }
    let n = psm.n();
    let mut out = PartialMatrix::filled(3 * n + 1, 1, Cell::Zero)?;
    for u in 0..n {
        for v in 0..n {
            out.set(u, 0, v, psm.get(u, 0, v));
        }
    }
    for (i, row) in gadget(n).iter().enumerate() {
        for (j, &bit) in row.iter().enumerate() {
            if bit {
                out.set(n + i, 0, n + j, Cell::One);
            }
        }
    }
    Ok((m + 2 * n + 1, out))
}

/// Exhaustive 3-colorability test for graphs with at most
/// [`COLORING_LIMIT`] vertices.
pub fn is_three_colorable(h: &UndirectedGraph) -> Result<bool> {
    Ok(three_coloring(h)?.is_some())
}

/// A proper 3-coloring, if one exists.
pub fn three_coloring(h: &UndirectedGraph) -> Result<Option<Vec<usize>>> {
    let n = h.vertex_count();
    if n > COLORING_LIMIT {
        return Err(Error::SizeLimit(format!("{n} vertices exceed the coloring limit of {COLORING_LIMIT}")));
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in h.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    fn extend(v: usize, adj: &[Vec<usize>], colors: &mut Vec<usize>) -> bool {
        if v == adj.len() {
            return true;
        }
        for c in 0..3 {
            if adj[v].iter().all(|&u| u > v || colors[u] != c) {
                colors.push(c);
                if extend(v + 1, adj, colors) {
                    return true;
                }
                colors.pop();
            }
        }
        false
    }
    let mut colors = Vec::with_capacity(n);
    Ok(extend(0, &adj, &mut colors).then_some(colors))
}
