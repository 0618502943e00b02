//! WCNF exchange format and solver model parsing.
//!
//! Header `p wcnf <vars> <clauses> <top>`, then one clause per line as
//! `<weight> <lit>* 0`. Hard clauses carry weight `top = #soft + 1` and
//! are written first; soft clauses carry weight 1.

use std::fmt::Write as _;
use std::path::Path;

use super::{Clause, CnfInstance, Lit};
use crate::error::{Error, Result};

pub fn to_wcnf(inst: &CnfInstance) -> String {
    let top = inst.soft.len() + 1;
    let mut s = String::with_capacity(16 * (inst.hard.len() + inst.soft.len()) + 32);
    let _ = writeln!(s, "p wcnf {} {} {}", inst.var_count(), inst.hard.len() + inst.soft.len(), top);
    let mut line = |w: usize, c: &Clause| {
        let _ = write!(s, "{w}");
        for l in c {
            let _ = write!(s, " {l}");
        }
        s.push_str(" 0\n");
    };
    for c in &inst.hard {
        line(top, c);
    }
    for c in &inst.soft {
        line(1, c);
    }
    s
}

pub fn write_wcnf(inst: &CnfInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_wcnf(inst)).map_err(|e| Error::io(path, e))
}

/// A parsed WCNF file. Clauses whose weight equals `top` are hard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wcnf {
    pub var_count: usize,
    pub top: u64,
    pub hard: Vec<Clause>,
    pub soft: Vec<(u64, Clause)>,
}

impl Wcnf {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut header = None;
        let mut hard = Vec::new();
        let mut soft = Vec::new();
        let mut pending: Vec<i64> = Vec::new();
        let mut pending_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let lno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                let parsed = match f.as_slice() {
                    ["p", "wcnf", v, c, t] => v.parse::<usize>().ok().zip(c.parse::<usize>().ok()).zip(t.parse::<u64>().ok()),
                    _ => None,
                };
                let ((v, c), t) =
                    parsed.ok_or_else(|| Error::parse(origin, lno, format!("bad header {line:?}")))?;
                header = Some((v, c, t));
                continue;
            }
            let (vars, _, top) = header.ok_or_else(|| Error::parse(origin, lno, "clause before header"))?;
            if pending.is_empty() {
                pending_line = lno;
            }
            for tok in line.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| Error::parse(origin, lno, format!("bad token {tok:?}")))?;
                if x == 0 && !pending.is_empty() {
                    let weight = pending[0];
                    if weight <= 0 {
                        return Err(Error::parse(origin, pending_line, "clause weight must be positive"));
                    }
                    let lits: Clause = pending[1..].iter().map(|&l| l as Lit).collect();
                    if let Some(bad) = lits.iter().find(|l| l.unsigned_abs() as usize > vars) {
                        return Err(Error::parse(origin, pending_line, format!("literal {bad} exceeds {vars} variables")));
                    }
                    if weight as u64 >= top {
                        hard.push(lits);
                    } else {
                        soft.push((weight as u64, lits));
                    }
                    pending.clear();
                } else {
                    pending.push(x);
                }
            }
        }
        let (var_count, clauses, top) = header.ok_or_else(|| Error::parse(origin, 1, "missing `p wcnf` header"))?;
        if !pending.is_empty() {
            return Err(Error::parse(origin, pending_line, "unterminated clause"));
        }
        if hard.len() + soft.len() != clauses {
            return Err(Error::parse(
                origin,
                1,
                format!("header declares {clauses} clauses, found {}", hard.len() + soft.len()),
            ));
        }
        Ok(Wcnf { var_count, top, hard, soft })
    }
}

/// Parses solver `v` lines into an assignment over variables `1..=var_count`.
///
/// Accepts literal lists (`v 1 -2 3 0`, possibly across several lines) and
/// the compact bit-string form (`v 101`). Every variable must be assigned.
pub fn parse_model(text: &str, var_count: usize) -> Result<Vec<bool>> {
    let tokens: Vec<&str> = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('v'))
        .filter(|rest| rest.is_empty() || rest.starts_with(char::is_whitespace))
        .flat_map(str::split_whitespace)
        .collect();
    if !text.lines().any(|l| l.trim_start().starts_with('v')) {
        return Err(Error::Solver("solver output has no `v` line".into()));
    }
    let mut assignment = vec![None; var_count];
    let bitstring = tokens.len() == 1 && tokens[0].len() == var_count && tokens[0].bytes().all(|b| b == b'0' || b == b'1');
    if bitstring {
        for (i, b) in tokens[0].bytes().enumerate() {
            assignment[i] = Some(b == b'1');
        }
    } else {
        for tok in tokens {
            let lit: i64 = tok.parse().map_err(|_| Error::Solver(format!("bad model token {tok:?}")))?;
            if lit == 0 {
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > var_count {
                return Err(Error::Solver(format!("model references unknown variable {var}")));
            }
            assignment[var - 1] = Some(lit > 0);
        }
    }
    assignment
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Solver(format!("model does not assign variable {}", i + 1))))
        .collect()
}

pub fn read_model(path: impl AsRef<Path>, var_count: usize) -> Result<Vec<bool>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text, var_count)
}
