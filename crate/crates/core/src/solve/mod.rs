//! Optimal models for encoded instances: a built-in exact partial-MaxSAT
//! solver and an adapter for external WCNF solvers.

mod external;
pub mod sat;

use std::time::{Duration, Instant};

pub use external::{solve_external, SOLVER_ENV};

use crate::encode::{self, decode, Clause, CnfInstance, Encoding, EncodingConfig, Lit};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::matrix::PartialMatrix;
use crate::policy::DomainPolicy;
use sat::{SatOutcome, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Timeout,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    /// Satisfied soft clauses (unoccupied classes) of the returned model.
    pub objective: Option<usize>,
    pub assignment: Option<Vec<bool>>,
    /// Best objective seen before a timeout, if any model was found.
    pub best_known: Option<usize>,
    pub stats: SolveStats,
}

impl SolveResult {
    fn infeasible(stats: SolveStats) -> Self {
        SolveResult { status: Status::Infeasible, objective: None, assignment: None, best_known: None, stats }
    }
}

/// Exact partial MaxSAT over unit-weight soft clauses.
///
/// Each soft clause gets a violation indicator (the negated literal for
/// unit clauses, a fresh relaxation variable otherwise). A first call
/// finds any model; a sequential counter over the indicators then lets
/// each further call demand strictly fewer violations than the best model
/// so far, until the bound is refuted. The last model is optimal.
pub fn maxsat(var_count: usize, hard: &[Clause], soft: &[Clause], timeout: Option<Duration>) -> SolveResult {
    let start = Instant::now();
    let deadline = timeout.map(|t| start + t);
    let mut solver = Solver::new(var_count);
    let finish = |solver: &Solver, status, model: Option<Vec<bool>>, best: Option<usize>| {
        let st = solver.stats();
        let stats = SolveStats {
            decisions: st.decisions,
            propagations: st.propagations,
            conflicts: st.conflicts,
            seconds: start.elapsed().as_secs_f64(),
        };
        let (objective, assignment) = match status {
            Status::Optimal => (best, model),
            _ => (None, None),
        };
        SolveResult { status, objective, assignment, best_known: best, stats }
    };

    let mut consistent = true;
    for c in hard {
        consistent &= solver.add_clause(c);
    }
    let mut indicators: Vec<Lit> = Vec::with_capacity(soft.len());
    for c in soft {
        if c.len() == 1 {
            indicators.push(-c[0]);
        } else {
            let b = solver.new_var();
            let mut relaxed = c.clone();
            relaxed.push(b);
            consistent &= solver.add_clause(&relaxed);
            indicators.push(b);
        }
    }
    if !consistent {
        return finish(&solver, Status::Infeasible, None, None);
    }

    let violations = |model: &[bool]| {
        indicators.iter().filter(|&&l| model[l.unsigned_abs() as usize - 1] == (l > 0)).count()
    };
    let mut model = match solver.solve(&[], deadline) {
        SatOutcome::Sat => solver.model()[..var_count].to_vec(),
        SatOutcome::Unsat => return finish(&solver, Status::Infeasible, None, None),
        SatOutcome::Unknown => return finish(&solver, Status::Timeout, None, None),
    };
    let full_model = solver.model().to_vec();
    let mut cost = violations(&full_model);
    if cost == 0 {
        return finish(&solver, Status::Optimal, Some(model), Some(soft.len()));
    }

    let at_least = sequential_counter(&mut solver, &indicators, cost);
    while cost > 0 {
        // at_least[j] is forced whenever more than j indicators hold
        match solver.solve(&[-at_least[cost - 1]], deadline) {
            SatOutcome::Sat => {
                let full = solver.model().to_vec();
                let c = violations(&full);
                debug_assert!(c < cost);
                cost = c;
                model = full[..var_count].to_vec();
            }
            SatOutcome::Unsat => break,
            SatOutcome::Unknown => return finish(&solver, Status::Timeout, None, Some(soft.len() - cost)),
        }
    }
    finish(&solver, Status::Optimal, Some(model), Some(soft.len() - cost))
}

/// Adds counter variables `s[j]`, `j < width`, with the one-sided
/// implication "more than `j` of `inputs` are true ⇒ `s[j]`".
fn sequential_counter(solver: &mut Solver, inputs: &[Lit], width: usize) -> Vec<Lit> {
    let mut prev: Vec<Lit> = Vec::new();
    for &x in inputs {
        let cur: Vec<Lit> = (0..width).map(|_| solver.new_var()).collect();
        solver.add_clause(&[-x, cur[0]]);
        for j in 0..width {
            if let Some(&p) = prev.get(j) {
                solver.add_clause(&[-p, cur[j]]);
            }
            if j > 0 {
                if let Some(&p) = prev.get(j - 1) {
                    solver.add_clause(&[-x, -p, cur[j]]);
                }
            }
        }
        prev = cur;
    }
    prev
}

/// Solves an encoded instance with the built-in solver.
pub fn solve_builtin(inst: &CnfInstance, timeout: Option<Duration>) -> SolveResult {
    maxsat(inst.var_count(), &inst.hard, &inst.soft, timeout)
}

/// Which solver `mine` should use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Builtin,
    /// Command line of an external WCNF solver; the instance path is
    /// appended as the last argument.
    External(String),
}

#[derive(Debug, Clone)]
pub struct Mined {
    pub policy: DomainPolicy,
    pub instantiation: Digraph,
    /// Unoccupied classes out of the budget `m`.
    pub objective: usize,
    pub m: usize,
    pub stats: SolveStats,
}

impl Mined {
    pub fn domain_count(&self) -> usize {
        self.policy.domain_count()
    }
}

/// Encodes, solves, decodes and verifies a minimum-domain policy for `psm`.
///
/// `m` defaults to [`encode::default_budget`].
pub fn mine(
    psm: &PartialMatrix,
    encoding: Encoding,
    m: Option<usize>,
    backend: &Backend,
    timeout: Option<Duration>,
) -> Result<Mined> {
    let m = m.unwrap_or_else(|| encode::default_budget(psm));
    let inst = encode::encode(psm, EncodingConfig::new(encoding, m)?)?;
    let res = match backend {
        Backend::Builtin => solve_builtin(&inst, timeout),
        Backend::External(cmd) => solve_external(&inst, cmd, timeout)?,
    };
    match res.status {
        Status::Infeasible => Err(Error::Infeasible { m }),
        Status::Timeout => Err(Error::Timeout { seconds: res.stats.seconds }),
        Status::Optimal => {
            let assignment = res.assignment.expect("optimal result carries a model");
            let objective = res.objective.expect("optimal result carries an objective");
            let d = decode(&inst, &assignment)?;
            // an optimal model leaves no class occupied without an entity
            if d.policy.domain_count() != m - objective {
                return Err(Error::Integrity(format!(
                    "objective {objective} implies {} domains but the model uses {}",
                    m - objective,
                    d.policy.domain_count()
                )));
            }
            Ok(Mined { policy: d.policy, instantiation: d.instantiation, objective, m, stats: res.stats })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Cell;
    use crate::summary;

    #[test]
    fn forced_violation() {
        let r = maxsat(1, &[vec![1]], &[vec![-1]], None);
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective, Some(0));
    }

    #[test]
    fn non_unit_soft_clauses() {
        // x1 xor x2 hard; prefer (x1 or x2), (-x1), (-x2): best satisfies 2
        let hard = vec![vec![1, 2], vec![-1, -2]];
        let soft = vec![vec![1, 2], vec![-1], vec![-2]];
        let r = maxsat(2, &hard, &soft, None);
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective, Some(2));
        assert_eq!(r.assignment.unwrap().len(), 2);
    }

    #[test]
    fn unsat_hard_is_infeasible() {
        let r = maxsat(1, &[vec![1], vec![-1]], &[], None);
        assert_eq!(r.status, Status::Infeasible);
    }

    #[test]
    fn two_distinct_rows_need_two_domains() {
        let mut psm = PartialMatrix::filled(2, 1, Cell::Star).unwrap();
        psm.set(0, 0, 0, Cell::One);
        psm.set(1, 0, 0, Cell::Zero);
        assert!(matches!(
            mine(&psm, Encoding::BE, Some(1), &Backend::Builtin, None),
            Err(Error::Infeasible { m: 1 })
        ));
        let got = mine(&psm, Encoding::BE, Some(2), &Backend::Builtin, None).unwrap();
        assert_eq!(got.domain_count(), 2);
        assert_eq!(got.objective, 0);
    }

    #[test]
    fn complete_matrix_matches_summarize() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // without symmetry breaking, refuting fewer classes than distinct
        // entities is pigeonhole-hard; keep those encodings to n = 5
        for n in [5, 5, 5, 8, 8, 8] {
            let mut g = Digraph::empty(n, 1).unwrap();
            for u in 0..n {
                for v in 0..n {
                    g.set(u, 0, v, rng.gen_bool(0.5));
                }
            }
            let classes = summary::class_count(&g);
            let psm = PartialMatrix::from_digraph(&g);
            let encodings: Vec<Encoding> = if n <= 5 {
                Encoding::benchmark_set().to_vec()
            } else {
                vec!["BE+CC".parse().unwrap(), "BE+NF+MD+LI".parse().unwrap()]
            };
            for enc in encodings {
                let got = mine(&psm, enc, Some(2 * classes), &Backend::Builtin, None).unwrap();
                assert_eq!(got.objective, 2 * classes - classes, "{enc}");
                assert!(got.policy.enforces(&g).unwrap());
            }
        }
    }

    #[test]
    fn zero_timeout_reports_timeout() {
        let psm = PartialMatrix::new(6, 1).unwrap();
        let inst = encode::encode(&psm, EncodingConfig::new(Encoding::BE, 6).unwrap()).unwrap();
        let r = solve_builtin(&inst, Some(Duration::ZERO));
        // the first conflict or 256th decision notices the deadline; a
        // trivially easy instance may still finish
        assert!(matches!(r.status, Status::Timeout | Status::Optimal));
        if r.status == Status::Timeout {
            assert!(r.assignment.is_none());
        }
    }
}
