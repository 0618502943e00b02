//! Partially specified access control matrices and their text format.
//!
//! ```text
//! # comments run to end of line
//! psm <n> <k>
//! default *                  (optional; unlisted cells become `*`)
//! entities <name>...         (optional string table, n names)
//! rights <name>...           (optional string table, k names)
//! <u> <a> <v> <0|1|*>        (one line per cell)
//! ```
//!
//! Without `default *` every one of the `n * k * n` cells must be listed.

use std::fmt::Write as _;
use std::path::Path;

use crate::digraph::{Digraph, Triple};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Zero,
    One,
    Star,
}

impl Cell {
    fn symbol(self) -> char {
        match self {
            Cell::Zero => '0',
            Cell::One => '1',
            Cell::Star => '*',
        }
    }
}

/// Optional external names for entities and rights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Names {
    pub entities: Option<Vec<String>>,
    pub rights: Option<Vec<String>>,
}

/// An `n x k x n` matrix over `{0, 1, *}`.
///
/// Cells are stored row-major by `(u, a, v)`; that order is also the
/// canonical order of star cells used by fill vectors and SAT numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatrix {
    n: usize,
    k: usize,
    cells: Vec<Cell>,
    names: Names,
}

impl PartialMatrix {
    /// All-star matrix.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::filled(n, k, Cell::Star)
    }

    pub fn filled(n: usize, k: usize, cell: Cell) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("matrix needs at least one access right".into()));
        }
        Ok(PartialMatrix {
            n,
            k,
            cells: vec![cell; n * k * n],
            names: Names::default(),
        })
    }

    /// The fully specified matrix of a digraph.
    pub fn from_digraph(g: &Digraph) -> Self {
        let mut m = Self::filled(g.n(), g.k(), Cell::Zero).expect("digraph has k >= 1");
        for (u, a, v) in g.edges() {
            m.set(u, a, v, Cell::One);
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn index(&self, u: usize, a: usize, v: usize) -> usize {
        (u * self.k + a) * self.n + v
    }

    /// Inverse of [`PartialMatrix::index`].
    pub fn triple(&self, index: usize) -> Triple {
        let v = index % self.n;
        let rest = index / self.n;
        (rest / self.k, rest % self.k, v)
    }

    #[inline]
    pub fn get(&self, u: usize, a: usize, v: usize) -> Cell {
        self.cells[self.index(u, a, v)]
    }

    #[inline]
    pub fn set(&mut self, u: usize, a: usize, v: usize, cell: Cell) {
        let i = self.index(u, a, v);
        self.cells[i] = cell;
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn set_names(&mut self, names: Names) -> Result<()> {
        if let Some(e) = &names.entities {
            if e.len() != self.n {
                return Err(Error::Arity { what: "entity names", expected: self.n, found: e.len() });
            }
        }
        if let Some(r) = &names.rights {
            if r.len() != self.k {
                return Err(Error::Arity { what: "right names", expected: self.k, found: r.len() });
            }
        }
        let bad = names
            .entities
            .iter()
            .chain(names.rights.iter())
            .flatten()
            .find(|s| s.is_empty() || s.contains(|c: char| c.is_whitespace() || c == '#'));
        if let Some(s) = bad {
            return Err(Error::Config(format!("name {s:?} must be a non-empty token without whitespace or '#'")));
        }
        self.names = names;
        Ok(())
    }

    pub fn star_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Star).count()
    }

    /// Star cells in canonical row-major order.
    pub fn stars(&self) -> impl Iterator<Item = Triple> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == Cell::Star)
            .map(|(i, _)| self.triple(i))
    }

    pub fn is_complete(&self) -> bool {
        !self.cells.contains(&Cell::Star)
    }

    /// Replaces star `i` (canonical order) by `fill[i]`.
    pub fn instantiate(&self, fill: &[bool]) -> Result<Digraph> {
        let stars = self.star_count();
        if fill.len() != stars {
            return Err(Error::Arity { what: "star fill", expected: stars, found: fill.len() });
        }
        let mut g = Digraph::empty(self.n, self.k)?;
        let mut next = fill.iter();
        for (i, &c) in self.cells.iter().enumerate() {
            let present = match c {
                Cell::One => true,
                Cell::Zero => false,
                Cell::Star => *next.next().expect("length checked"),
            };
            if present {
                let (u, a, v) = self.triple(i);
                g.set(u, a, v, true);
            }
        }
        Ok(g)
    }

    /// Instantiation with every star set to `value`.
    pub fn instantiate_uniform(&self, value: bool) -> Digraph {
        self.instantiate(&vec![value; self.star_count()]).expect("fill sized from matrix")
    }

    /// The digraph of a complete matrix; errors if any cell is a star.
    pub fn to_digraph(&self) -> Result<Digraph> {
        if let Some(i) = self.cells.iter().position(|&c| c == Cell::Star) {
            let (u, a, v) = self.triple(i);
            return Err(Error::Config(format!(
                "matrix is not fully specified: cell ({u}, {a}, {v}) is '*'"
            )));
        }
        Ok(self.instantiate_uniform(false))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// Serializes with `default *` and one line per specified cell.
    pub fn to_text(&self) -> String {
        let mut s = format!("psm {} {}\ndefault *\n", self.n, self.k);
        if let Some(e) = &self.names.entities {
            let _ = writeln!(s, "entities {}", e.join(" "));
        }
        if let Some(r) = &self.names.rights {
            let _ = writeln!(s, "rights {}", r.join(" "));
        }
        for (i, &c) in self.cells.iter().enumerate() {
            if c != Cell::Star {
                let (u, a, v) = self.triple(i);
                let _ = writeln!(s, "{u} {a} {v} {}", c.symbol());
            }
        }
        s
    }

    /// Parses the text format; `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::parse(origin, line, msg);
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| err(1, "missing `psm <n> <k>` header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (n, k) = match fields.as_slice() {
            ["psm", n, k] => {
                let n: usize = n.parse().map_err(|_| err(hline, format!("bad entity count {n:?}")))?;
                let k: usize = k.parse().map_err(|_| err(hline, format!("bad right count {k:?}")))?;
                (n, k)
            }
            _ => return Err(err(hline, format!("expected `psm <n> <k>`, found {header:?}"))),
        };
        if n == 0 {
            return Err(err(hline, "entity count must be at least 1".into()));
        }
        if k == 0 {
            return Err(err(hline, "right count must be at least 1".into()));
        }

        let mut listed = vec![false; n * k * n];
        let mut psm = PartialMatrix::filled(n, k, Cell::Zero).expect("k checked");
        let mut names = Names::default();
        let mut defaulted = false;
        let mut last_line = hline;

        for (pos, (lno, line)) in lines.enumerate() {
            last_line = lno;
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["default", "*"] if pos == 0 => {
                    defaulted = true;
                    continue;
                }
                ["default", ..] => {
                    return Err(err(lno, "`default *` must directly follow the header".into()));
                }
                ["entities", rest @ ..] | ["rights", rest @ ..] => {
                    let slot = if toks[0] == "entities" { &mut names.entities } else { &mut names.rights };
                    if slot.is_some() {
                        return Err(err(lno, format!("duplicate `{}` table", toks[0])));
                    }
                    *slot = Some(rest.iter().map(|s| s.to_string()).collect());
                    continue;
                }
                [u, a, v, val] => {
                    let idx = |s: &str, what: &str, limit: usize| -> Result<usize> {
                        let x: usize = s.parse().map_err(|_| err(lno, format!("bad {what} index {s:?}")))?;
                        if x >= limit {
                            return Err(err(lno, format!("{what} index {x} out of range (< {limit})")));
                        }
                        Ok(x)
                    };
                    let (u, a, v) = (idx(u, "entity", n)?, idx(a, "right", k)?, idx(v, "entity", n)?);
                    let cell = match *val {
                        "0" => Cell::Zero,
                        "1" => Cell::One,
                        "*" => Cell::Star,
                        other => return Err(err(lno, format!("bad cell value {other:?}"))),
                    };
                    let i = psm.index(u, a, v);
                    if listed[i] {
                        return Err(err(lno, format!("duplicate cell ({u}, {a}, {v})")));
                    }
                    listed[i] = true;
                    psm.cells[i] = cell;
                }
                _ => return Err(err(lno, format!("unrecognized line {line:?}"))),
            }
        }

        for (i, seen) in listed.iter().enumerate() {
            if !seen {
                if defaulted {
                    psm.cells[i] = Cell::Star;
                } else {
                    let (u, a, v) = psm.triple(i);
                    return Err(err(
                        last_line,
                        format!("cell ({u}, {a}, {v}) not listed and no `default *` given"),
                    ));
                }
            }
        }
        psm.set_names(names).map_err(|e| err(hline, e.to_string()))?;
        Ok(psm)
    }
}
