//! A small conflict-driven SAT solver.
//!
//! Two watched literals per clause with blocking literals, first-UIP
//! learning with local minimization, activity-ordered branching (ties go
//! to the lowest variable, saved phases start false), Luby restarts and
//! periodic removal of high-LBD learnt clauses. Solving under
//! assumptions lets callers tighten bounds incrementally while keeping
//! learnt clauses. Everything is deterministic.

use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatOutcome {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SatStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
}

/// Internal literal: `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct L(u32);

impl L {
    #[inline]
    fn from_dimacs(d: i32) -> L {
        let v = d.unsigned_abs() - 1;
        L(2 * v + (d < 0) as u32)
    }
    #[inline]
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    #[inline]
    fn neg(self) -> L {
        L(self.0 ^ 1)
    }
    #[inline]
    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }
    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }
}

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

struct ClauseData {
    lits: Vec<L>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: L,
}

/// Max-heap of variables keyed by activity; ties favour lower indices.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

impl VarHeap {
    const ABSENT: usize = usize::MAX;

    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != Self::ABSENT
    }

    fn grow(&mut self, act: &[f64]) {
        let v = self.pos.len();
        self.pos.push(Self::ABSENT);
        self.insert(v, act);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && Self::better(act, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v], act);
        }
    }
}

pub struct Solver {
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,
    learnts: Vec<u32>,
    max_learnts: f64,
    stats: SatStats,
    model: Vec<bool>,
}

impl Solver {
    pub fn new(vars: usize) -> Self {
        let mut s = Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap { heap: Vec::new(), pos: Vec::new() },
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            learnts: Vec::new(),
            max_learnts: 0.0,
            stats: SatStats::default(),
            model: Vec::new(),
        };
        for _ in 0..vars {
            s.new_var();
        }
        s
    }

    pub fn var_count(&self) -> usize {
        self.assigns.len()
    }

    /// Adds a variable and returns its 1-based id.
    pub fn new_var(&mut self) -> i32 {
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.phase.push(false);
        self.activity.push(0.0);
        self.seen.push(false);
        self.heap.grow(&self.activity);
        self.assigns.len() as i32
    }

    pub fn stats(&self) -> SatStats {
        self.stats
    }

    /// Model of the last satisfiable call; index `v - 1` for variable `v`.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    #[inline]
    fn value(&self, l: L) -> u8 {
        let a = self.assigns[l.var()];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ l.is_neg() as u8
        }
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause of DIMACS literals. Returns false once the clause set
    /// is known to be unsatisfiable.
    pub fn add_clause(&mut self, dimacs: &[i32]) -> bool {
        self.cancel_until(0);
        if !self.ok {
            return false;
        }
        let mut lits: Vec<L> = Vec::with_capacity(dimacs.len());
        for &d in dimacs {
            assert!(d != 0 && d.unsigned_abs() as usize <= self.var_count(), "literal {d} out of range");
            let l = L::from_dimacs(d);
            match self.value(l) {
                1 => return true,
                0 => continue,
                _ => {}
            }
            if lits.contains(&l.neg()) {
                return true;
            }
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        match lits.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(lits[0], NO_REASON);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                self.attach(lits, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<L>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].idx()].push(Watch { cref, blocker: lits[1] });
        self.watches[lits[1].idx()].push(Watch { cref, blocker: lits[0] });
        self.clauses.push(ClauseData { lits, learnt, deleted: false, lbd, activity: 0.0 });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    #[inline]
    fn enqueue(&mut self, l: L, reason: u32) {
        let v = l.var();
        self.assigns[v] = !l.is_neg() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
        self.stats.propagations += 1;
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p.neg();
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let keep = Watch { cref: w.cref, blocker: first };
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = keep;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for t in 2..self.clauses[cref].lits.len() {
                    let cand = self.clauses[cref].lits[t];
                    if self.value(cand) != 0 {
                        let lits = &mut self.clauses[cref].lits;
                        lits.swap(1, t);
                        self.watches[cand.idx()].push(keep);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = keep;
                j += 1;
                if self.value(first) == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<L>, u32) {
        let mut learnt = vec![L(0)];
        let mut pending = 0;
        let mut p: Option<L> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = if p.is_some() { 1 } else { 0 };
            for t in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[t];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var()] = false;
            p = Some(lit);
            pending -= 1;
            if pending == 0 {
                break;
            }
            confl = self.reason[lit.var()];
        }
        learnt[0] = p.expect("conflict at a decision level").neg();

        // local minimization: drop literals implied by other learnt literals
        let mut kept = vec![learnt[0]];
        for &q in &learnt[1..] {
            let r = self.reason[q.var()];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..]
                    .iter()
                    .all(|x| self.seen[x.var()] || self.level[x.var()] == 0);
            if !redundant {
                kept.push(q);
            }
        }
        for q in &learnt[1..] {
            self.seen[q.var()] = false;
        }
        let mut learnt = kept;

        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for t in 2..learnt.len() {
                if self.level[learnt[t].var()] > self.level[learnt[max_i].var()] {
                    max_i = t;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[learnt[1].var()];
        }
        (learnt, back)
    }

    fn lbd(&mut self, lits: &[L]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let keep = self.trail_lim[lvl as usize];
        for t in (keep..self.trail.len()).rev() {
            let l = self.trail[t];
            let v = l.var();
            self.phase[v] = !l.is_neg();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = keep;
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let v = c.lits[0].var();
        self.reason[v] == cref && self.value(c.lits[0]) == 1
    }

    fn reduce_learnts(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.clauses[c as usize].lbd > 2 && !self.locked(c))
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
                .then(a.cmp(&b))
        });
        for &c in &cands[..cands.len() / 2] {
            let cd = &mut self.clauses[c as usize];
            cd.deleted = true;
            cd.lits = Vec::new();
        }
        self.learnts.retain(|&c| !self.clauses[c as usize].deleted);
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<L> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(L(2 * v as u32 + (!self.phase[v]) as u32));
            }
        }
        None
    }

    /// Solves under `assumptions` (DIMACS literals). `deadline` bounds
    /// wall-clock time; reaching it yields [`SatOutcome::Unknown`].
    pub fn solve(&mut self, assumptions: &[i32], deadline: Option<Instant>) -> SatOutcome {
        self.cancel_until(0);
        if !self.ok {
            return SatOutcome::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return SatOutcome::Unsat;
        }
        let assumptions: Vec<L> = assumptions.iter().map(|&d| L::from_dimacs(d)).collect();
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(5000.0);
        }
        let mut restart = 0u32;
        loop {
            let budget = 100 * luby(restart);
            restart += 1;
            match self.search(&assumptions, budget, deadline) {
                Some(out) => {
                    if out == SatOutcome::Sat {
                        self.model = self.assigns.iter().map(|&a| a == 1).collect();
                    }
                    self.cancel_until(0);
                    return out;
                }
                None => self.cancel_until(0),
            }
        }
    }

    /// Runs until a result, or `None` after `budget` conflicts (restart).
    fn search(&mut self, assumptions: &[L], budget: u64, deadline: Option<Instant>) -> Option<SatOutcome> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SatOutcome::Unsat);
                }
                let (learnt, back) = self.analyze(confl);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.clause_inc /= 0.999;
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    return Some(SatOutcome::Unknown);
                }
            } else {
                if conflicts >= budget {
                    return None;
                }
                if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_learnts();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match self.value(a) {
                        1 => self.trail_lim.push(self.trail.len()),
                        0 => return Some(SatOutcome::Unsat),
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let decision = match next {
                    Some(a) => a,
                    None => match self.pick_branch() {
                        Some(l) => l,
                        None => return Some(SatOutcome::Sat),
                    },
                };
                self.stats.decisions += 1;
                if self.stats.decisions.is_multiple_of(256) && deadline.is_some_and(|d| Instant::now() >= d) {
                    return Some(SatOutcome::Unknown);
                }
                self.trail_lim.push(self.trail.len());
                self.enqueue(decision, NO_REASON);
            }
        }
    }
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut i = i as u64;
    while size - 1 != i {
        size = (size - 1) / 2;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(vars: usize, clauses: &[Vec<i32>]) -> bool {
        (0u32..1 << vars).any(|bits| {
            clauses
                .iter()
                .all(|c| c.iter().any(|&l| (bits >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
        })
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_cases() {
        let mut s = Solver::new(2);
        assert!(s.add_clause(&[1, 2]));
        assert!(s.add_clause(&[-1]));
        assert_eq!(s.solve(&[], None), SatOutcome::Sat);
        assert_eq!(s.model(), &[false, true]);
        assert_eq!(s.solve(&[-2], None), SatOutcome::Unsat);
        assert_eq!(s.solve(&[2], None), SatOutcome::Sat);
        assert!(!s.add_clause(&[-2]));
        assert_eq!(s.solve(&[], None), SatOutcome::Unsat);
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 5 pigeons, 4 holes
        let (p, h) = (5, 4);
        let var = |i: usize, j: usize| (i * h + j + 1) as i32;
        let mut s = Solver::new(p * h);
        for i in 0..p {
            s.add_clause(&(0..h).map(|j| var(i, j)).collect::<Vec<_>>());
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add_clause(&[-var(a, j), -var(b, j)]);
                }
            }
        }
        assert_eq!(s.solve(&[], None), SatOutcome::Unsat);
    }

    #[test]
    fn agrees_with_brute_force_on_random_3sat() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let vars = rng.gen_range(3..12);
            let count = rng.gen_range(1..60);
            let clauses: Vec<Vec<i32>> = (0..count)
                .map(|_| {
                    (0..rng.gen_range(1..4))
                        .map(|_| {
                            let v = rng.gen_range(1..=vars as i32);
                            if rng.gen_bool(0.5) { v } else { -v }
                        })
                        .collect()
                })
                .collect();
            let mut s = Solver::new(vars);
            for c in &clauses {
                s.add_clause(c);
            }
            let out = s.solve(&[], None);
            assert_eq!(out == SatOutcome::Sat, brute(vars, &clauses));
            if out == SatOutcome::Sat {
                let m = s.model();
                assert!(clauses.iter().all(|c| c.iter().any(|&l| m[l.unsigned_abs() as usize - 1] == (l > 0))));
            }
        }
    }
}
