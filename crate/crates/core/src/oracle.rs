//! Ground truth for small instances.
//!
//! The `*_optimum` functions enumerate every instantiation in Gray-code
//! order, flipping one cell per step. The `*_feasible` deciders answer the
//! bounded questions on instances far beyond enumeration by searching over
//! partitions of the entities instead of over fills: an instantiation with
//! at most `m` classes exists iff the entities can be split into at most
//! `m` blocks such that no block pair mixes a One and a Zero under the
//! same right (for rows only, in the DB case).

use crate::dte;
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::matrix::{Cell, PartialMatrix};
use crate::summary;

pub const STAR_LIMIT: usize = 22;
pub const ENTITY_LIMIT: usize = 12;

fn check_limits(psm: &PartialMatrix) -> Result<()> {
    if psm.n() > ENTITY_LIMIT {
        return Err(Error::SizeLimit(format!("{} entities (limit {ENTITY_LIMIT})", psm.n())));
    }
    if psm.star_count() > STAR_LIMIT {
        return Err(Error::SizeLimit(format!("{} star cells (limit {STAR_LIMIT})", psm.star_count())));
    }
    Ok(())
}

/// Minimum of `score` over all instantiations.
fn min_over_fills(psm: &PartialMatrix, score: impl Fn(&Digraph) -> usize) -> Result<usize> {
    check_limits(psm)?;
    let stars: Vec<_> = psm.stars().collect();
    let mut g = psm.instantiate_uniform(false);
    let mut best = score(&g);
    for step in 1u64..1 << stars.len() {
        let bit = step.trailing_zeros() as usize;
        let (u, a, v) = stars[bit];
        let gray = step ^ (step >> 1);
        g.set(u, a, v, gray >> bit & 1 == 1);
        best = best.min(score(&g));
        if best == 1 {
            break;
        }
    }
    Ok(best)
}

/// Fewest indistinguishability classes over all instantiations.
pub fn dbpm_optimum(psm: &PartialMatrix) -> Result<usize> {
    min_over_fills(psm, summary::class_count)
}

/// Fewest distinct rows over all instantiations.
pub fn db_optimum(psm: &PartialMatrix) -> Result<usize> {
    min_over_fills(psm, |g| dte::counts(g).rows)
}

/// Smallest `max(rows, cols)` over all instantiations, i.e. the fewest
/// labels of a domain-and-type policy.
pub fn dtepm_optimum(psm: &PartialMatrix) -> Result<usize> {
    min_over_fills(psm, |g| {
        let c = dte::counts(g);
        c.rows.max(c.cols)
    })
}

/// Per block pair and right: which cell values have been seen.
struct Blocks {
    n: usize,
    k: usize,
    m: usize,
    /// `seen[(b * k + a) * m + c]`: bit 0 = a Zero seen, bit 1 = a One seen
    seen: Vec<u8>,
}

impl Blocks {
    fn slot(&self, b: usize, a: usize, c: usize) -> usize {
        (b * self.k + a) * self.m + c
    }
}

/// Whether some instantiation of `psm` has at most `m` classes.
///
/// Exact but exponential in the worst case; entities are placed in index
/// order, and a new block is only ever opened as the next unused one.
pub fn dbpm_feasible(psm: &PartialMatrix, m: usize) -> bool {
    let (n, k) = (psm.n(), psm.k());
    if m == 0 {
        return n == 0;
    }
    let mut st = Blocks { n, k, m, seen: vec![0; m * k * m] };
    let mut block = vec![usize::MAX; n];
    // undo log of (slot, previous value)
    let mut log: Vec<(usize, u8)> = Vec::new();

    fn mark(st: &mut Blocks, log: &mut Vec<(usize, u8)>, slot: usize, cell: Cell) -> bool {
        let bit = match cell {
            Cell::Zero => 1,
            Cell::One => 2,
            Cell::Star => return true,
        };
        let old = st.seen[slot];
        if old | bit == 3 {
            return false;
        }
        if old & bit == 0 {
            log.push((slot, old));
            st.seen[slot] = old | bit;
        }
        true
    }

    fn place(x: usize, b: usize, psm: &PartialMatrix, st: &mut Blocks, block: &mut [usize], log: &mut Vec<(usize, u8)>) -> bool {
        block[x] = b;
        for a in 0..st.k {
            for y in 0..=x {
                let c = block[y];
                let s1 = st.slot(b, a, c);
                if !mark(st, log, s1, psm.get(x, a, y)) {
                    return false;
                }
                let s2 = st.slot(c, a, b);
                if !mark(st, log, s2, psm.get(y, a, x)) {
                    return false;
                }
            }
        }
        true
    }

    fn search(x: usize, used: usize, psm: &PartialMatrix, st: &mut Blocks, block: &mut Vec<usize>, log: &mut Vec<(usize, u8)>) -> bool {
        if x == st.n {
            return true;
        }
        let limit = (used + 1).min(st.m);
        for b in 0..limit {
            let mark_len = log.len();
            let ok = place(x, b, psm, st, block, log);
            if ok && search(x + 1, used.max(b + 1), psm, st, block, log) {
                return true;
            }
            while log.len() > mark_len {
                let (slot, old) = log.pop().expect("non-empty log");
                st.seen[slot] = old;
            }
            block[x] = usize::MAX;
        }
        false
    }

    search(0, 0, psm, &mut st, &mut block, &mut log)
}

/// Whether some instantiation of `psm` has at most `m` distinct rows.
pub fn db_feasible(psm: &PartialMatrix, m: usize) -> bool {
    let (n, k) = (psm.n(), psm.k());
    if m == 0 {
        return n == 0;
    }
    let width = k * n;
    // seen[b * width + col]: bit 0 = Zero, bit 1 = One
    let mut seen = vec![0u8; m * width];

    fn search(x: usize, used: usize, m: usize, psm: &PartialMatrix, seen: &mut [u8]) -> bool {
        let (n, k) = (psm.n(), psm.k());
        if x == n {
            return true;
        }
        let width = k * n;
        for b in 0..(used + 1).min(m) {
            let row = &mut seen[b * width..(b + 1) * width];
            let mut changed = Vec::new();
            let mut ok = true;
            for a in 0..k {
                for v in 0..n {
                    let bit = match psm.get(x, a, v) {
                        Cell::Zero => 1,
                        Cell::One => 2,
                        Cell::Star => continue,
                    };
                    let col = a * n + v;
                    if row[col] | bit == 3 {
                        ok = false;
                        break;
                    }
                    if row[col] & bit == 0 {
                        changed.push((col, row[col]));
                        row[col] |= bit;
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok && search(x + 1, used.max(b + 1), m, psm, seen) {
                return true;
            }
            let row = &mut seen[b * width..(b + 1) * width];
            for (col, old) in changed {
                row[col] = old;
            }
        }
        false
    }

    search(0, 0, m, psm, &mut seen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_stars_is_class_count() {
        let g = Digraph::from_edges(3, 1, [(0, 0, 1), (1, 0, 2)]).unwrap();
        let psm = PartialMatrix::from_digraph(&g);
        assert_eq!(dbpm_optimum(&psm).unwrap(), summary::class_count(&g));
        assert_eq!(db_optimum(&psm).unwrap(), dte::counts(&g).rows);
    }

    #[test]
    fn all_star_is_one() {
        let psm = PartialMatrix::new(2, 1).unwrap();
        assert_eq!(dbpm_optimum(&psm).unwrap(), 1);
        assert_eq!(db_optimum(&psm).unwrap(), 1);
        assert_eq!(dtepm_optimum(&psm).unwrap(), 1);
    }

    #[test]
    fn size_guards() {
        assert!(matches!(dbpm_optimum(&PartialMatrix::new(5, 1).unwrap()), Err(Error::SizeLimit(_))));
        assert!(matches!(dbpm_optimum(&PartialMatrix::filled(13, 1, Cell::Zero).unwrap()), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn deciders_agree_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=5);
            let k = rng.gen_range(1..=2);
            let mut psm = PartialMatrix::filled(n, k, Cell::Zero).unwrap();
            let mut stars = 0;
            for u in 0..n {
                for a in 0..k {
                    for v in 0..n {
                        let cell = match rng.gen_range(0..3) {
                            0 if stars < 10 => {
                                stars += 1;
                                Cell::Star
                            }
                            1 => Cell::One,
                            _ => Cell::Zero,
                        };
                        psm.set(u, a, v, cell);
                    }
                }
            }
            let opt = dbpm_optimum(&psm).unwrap();
            let rows = db_optimum(&psm).unwrap();
            for m in 1..=n {
                assert_eq!(dbpm_feasible(&psm, m), opt <= m, "{psm:?} m={m}");
                assert_eq!(db_feasible(&psm, m), rows <= m, "{psm:?} m={m}");
            }
        }
    }
}
