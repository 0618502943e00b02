//! Ladder encoding of "exactly one of `y[0..m]`".
//!
//! Auxiliary `s[j]` reads "the selected index is greater than `j`"; the
//! ladder forces `s` to be a unary number and channels each `y[j]` to
//! the step where the ladder changes from true to false.

use super::{Clause, Lit};

pub fn ladder_aux_count(m: usize) -> usize {
    m.saturating_sub(1)
}

/// Clauses over `ys` (length `m`) and `aux` (length `m - 1`).
/// Emits `4m - 4` clauses for `m >= 2` and the unit `(y0)` for `m = 1`.
pub fn ladder_clauses(ys: &[Lit], aux: &[Lit]) -> Vec<Clause> {
    let m = ys.len();
    assert_eq!(aux.len(), ladder_aux_count(m));
    if m == 1 {
        return vec![vec![ys[0]]];
    }
    let s = aux;
    let mut out = Vec::with_capacity(4 * m - 4);
    for j in 0..m - 2 {
        out.push(vec![-s[j + 1], s[j]]);
    }
    out.push(vec![ys[0], s[0]]);
    out.push(vec![-ys[0], -s[0]]);
    for j in 1..m - 1 {
        out.push(vec![-ys[j], s[j - 1]]);
        out.push(vec![-ys[j], -s[j]]);
        out.push(vec![ys[j], -s[j - 1], s[j]]);
    }
    out.push(vec![-ys[m - 1], s[m - 2]]);
    out.push(vec![ys[m - 1], -s[m - 2]]);
    out
}
