//! Partial MaxSAT encodings of domain-based policy mining.
//!
//! The instance places entities into `m` candidate classes. Variables:
//!
//! * `x(i,a,j)` fills star cell `(i,a,j)`,
//! * `y(i,p)`  puts entity `i` into class `p`,
//! * `z(p,a,q)` is the edge `(p,a,q)` of the class digraph,
//! * `r(p)`    marks class `p` occupied,
//! * `l(i,p)`  marks `i` as the lowest entity of class `p` (FM/MD only),
//! * ladder auxiliaries for the exactly-one constraint (CC only).
//!
//! Ids are dense and allocated in exactly that order. Soft clauses are
//! the units `¬r(p)`; maximizing satisfied soft clauses minimizes the
//! number of occupied classes.

mod decode;
mod ladder;
pub mod wcnf;

use std::fmt;
use std::str::FromStr;

pub use decode::{decode, Decoded};
pub use ladder::{ladder_aux_count, ladder_clauses};

use crate::digraph::Triple;
use crate::error::{Error, Result};
use crate::matrix::{Cell, PartialMatrix};
use crate::summary;

/// A DIMACS literal: positive or negative 1-based variable id.
pub type Lit = i32;
pub type Clause = Vec<Lit>;

/// Optional refinements on top of the baseline encoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Encoding {
    /// CC: exactly-one per entity through the ladder encoding.
    pub ladder: bool,
    /// NF: drop the pairwise at-most-one clauses.
    pub non_functional: bool,
    /// FM: sorted class minima with the feasible-mins clauses.
    pub feasible_mins: bool,
    /// MD: sorted class minima with the min-domain clauses.
    pub min_domain: bool,
    /// LI: occupy lower-indexed classes first.
    pub lower_indexed: bool,
}

impl Encoding {
    pub const BE: Encoding = Encoding {
        ladder: false,
        non_functional: false,
        feasible_mins: false,
        min_domain: false,
        lower_indexed: false,
    };

    /// The six configurations benchmarked side by side.
    pub fn benchmark_set() -> [Encoding; 6] {
        ["BE", "BE+CC", "BE+NF", "BE+NF+FM", "BE+NF+MD", "BE+NF+MD+LI"].map(|s| s.parse().expect("valid name"))
    }

    /// Every consistent flag combination.
    pub fn all_valid() -> Vec<Encoding> {
        let mut out = Vec::new();
        for amo in 0..3 {
            for mins in 0..3 {
                for li in [false, true] {
                    out.push(Encoding {
                        ladder: amo == 1,
                        non_functional: amo == 2,
                        feasible_mins: mins == 1,
                        min_domain: mins == 2,
                        lower_indexed: li,
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.ladder && self.non_functional {
            return Err(Error::Config("CC and NF are mutually exclusive".into()));
        }
        if self.feasible_mins && self.min_domain {
            return Err(Error::Config("FM and MD are mutually exclusive".into()));
        }
        Ok(())
    }

    fn uses_minima(&self) -> bool {
        self.feasible_mins || self.min_domain
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BE")?;
        for (on, name) in [
            (self.ladder, "CC"),
            (self.non_functional, "NF"),
            (self.feasible_mins, "FM"),
            (self.min_domain, "MD"),
            (self.lower_indexed, "LI"),
        ] {
            if on {
                write!(f, "+{name}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('+').map(str::trim);
        if parts.next().map(|p| p.to_ascii_uppercase()) != Some("BE".into()) {
            return Err(Error::Config(format!("encoding {s:?} must start with BE")));
        }
        let mut enc = Encoding::BE;
        for part in parts {
            let flag = match part.to_ascii_uppercase().as_str() {
                "CC" => &mut enc.ladder,
                "NF" => &mut enc.non_functional,
                "FM" => &mut enc.feasible_mins,
                "MD" => &mut enc.min_domain,
                "LI" => &mut enc.lower_indexed,
                other => return Err(Error::Config(format!("unknown encoding component {other:?}"))),
            };
            if *flag {
                return Err(Error::Config(format!("component {part} repeated in {s:?}")));
            }
            *flag = true;
        }
        enc.validate()?;
        Ok(enc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodingConfig {
    pub encoding: Encoding,
    /// Number of candidate classes.
    pub m: usize,
}

impl EncodingConfig {
    pub fn new(encoding: Encoding, m: usize) -> Result<Self> {
        encoding.validate()?;
        if m == 0 {
            return Err(Error::Config("class budget m must be at least 1".into()));
        }
        Ok(EncodingConfig { encoding, m })
    }
}

/// Default class budget: the better of the all-zeros and all-ones
/// instantiations. Either is a concrete instantiation, so its class count
/// bounds the optimum from above.
pub fn default_budget(psm: &PartialMatrix) -> usize {
    let zeros = summary::class_count(&psm.instantiate_uniform(false));
    let ones = summary::class_count(&psm.instantiate_uniform(true));
    zeros.min(ones).max(1)
}

/// What a variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Fill(Triple),
    Assign { entity: usize, class: usize },
    Edge { from: usize, right: usize, to: usize },
    Occupied(usize),
    Min { entity: usize, class: usize },
    Ladder { entity: usize, step: usize },
}

/// Maps variable roles to ids and back. Blocks are contiguous:
/// fills, assignments, edges, occupancy, minima, ladder auxiliaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRegistry {
    n: usize,
    k: usize,
    m: usize,
    fill_ids: Vec<u32>,
    stars: Vec<Triple>,
    y_base: usize,
    z_base: usize,
    r_base: usize,
    l_base: Option<usize>,
    ladder_base: Option<usize>,
    var_count: usize,
}

impl VarRegistry {
    fn new(psm: &PartialMatrix, cfg: &EncodingConfig) -> Self {
        let (n, k, m) = (psm.n(), psm.k(), cfg.m);
        let mut fill_ids = vec![0; psm.cells().len()];
        let mut stars = Vec::new();
        for (i, &c) in psm.cells().iter().enumerate() {
            if c == Cell::Star {
                stars.push(psm.triple(i));
                fill_ids[i] = stars.len() as u32;
            }
        }
        let y_base = stars.len() + 1;
        let z_base = y_base + n * m;
        let r_base = z_base + k * m * m;
        let mut next = r_base + m;
        let l_base = cfg.encoding.uses_minima().then(|| {
            let b = next;
            next += n * m;
            b
        });
        let ladder_base = (cfg.encoding.ladder && m >= 2).then(|| {
            let b = next;
            next += n * ladder_aux_count(m);
            b
        });
        VarRegistry {
            n,
            k,
            m,
            fill_ids,
            stars,
            y_base,
            z_base,
            r_base,
            l_base,
            ladder_base,
            var_count: next - 1,
        }
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    /// Id of the fill variable for cell index `cell`, if that cell is a star.
    pub fn x(&self, cell: usize) -> Option<Lit> {
        match self.fill_ids[cell] {
            0 => None,
            id => Some(id as Lit),
        }
    }

    pub fn fill_count(&self) -> usize {
        self.stars.len()
    }

    #[inline]
    pub fn y(&self, i: usize, p: usize) -> Lit {
        (self.y_base + i * self.m + p) as Lit
    }

    #[inline]
    pub fn z(&self, p: usize, a: usize, q: usize) -> Lit {
        (self.z_base + (p * self.k + a) * self.m + q) as Lit
    }

    #[inline]
    pub fn r(&self, p: usize) -> Lit {
        (self.r_base + p) as Lit
    }

    pub fn l(&self, i: usize, p: usize) -> Option<Lit> {
        self.l_base.map(|b| (b + i * self.m + p) as Lit)
    }

    pub fn ladder(&self, i: usize, step: usize) -> Option<Lit> {
        self.ladder_base.map(|b| (b + i * ladder_aux_count(self.m) + step) as Lit)
    }

    /// Role of a 1-based variable id.
    pub fn role(&self, var: usize) -> Option<Role> {
        if var == 0 || var > self.var_count {
            return None;
        }
        let (n, k, m) = (self.n, self.k, self.m);
        Some(if var < self.y_base {
            Role::Fill(self.stars[var - 1])
        } else if var < self.z_base {
            let o = var - self.y_base;
            Role::Assign { entity: o / m, class: o % m }
        } else if var < self.r_base {
            let o = var - self.z_base;
            Role::Edge { from: o / (k * m), right: (o / m) % k, to: o % m }
        } else if var < self.r_base + m {
            Role::Occupied(var - self.r_base)
        } else if let Some(b) = self.l_base.filter(|&b| var < b + n * m) {
            let o = var - b;
            Role::Min { entity: o / m, class: o % m }
        } else {
            let o = var - self.ladder_base.expect("id within range");
            let w = ladder_aux_count(m);
            Role::Ladder { entity: o / w, step: o % w }
        })
    }
}

/// Which hard constraint family a clause belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseKind {
    /// Every entity is in some class.
    AtLeastOne,
    /// Pairwise: no entity in two classes.
    AtMostOne,
    /// Ladder encoding of exactly-one.
    Ladder,
    /// A `0` cell forbids the class edge.
    NonEdge,
    /// A `1` cell forces the class edge.
    Edge,
    /// A class edge forces the star to `1`.
    StarFromEdge,
    /// A star set to `1` forces the class edge.
    EdgeFromStar,
    /// A class holding an entity is occupied.
    Occupied,
    /// Class minima increase with the class index.
    MinsSorted,
    /// No member of a class lies below its minimum.
    MinIsMinimum,
    /// A class minimum is a member of the class.
    MinIsSelected,
    /// Every member has a minimum at or below it (FM).
    FeasibleMins,
    /// Every occupied class has a minimum (MD).
    MinDomain,
    /// An unoccupied class forces the next one unoccupied (LI).
    LowerIndexed,
}

/// A built partial MaxSAT instance with everything needed to decode it.
#[derive(Debug, Clone)]
pub struct CnfInstance {
    pub config: EncodingConfig,
    pub registry: VarRegistry,
    pub hard: Vec<Clause>,
    /// Constraint family of each hard clause, parallel to `hard`.
    pub kinds: Vec<ClauseKind>,
    /// Unit-weight soft clauses `¬r(p)`.
    pub soft: Vec<Clause>,
    pub psm: PartialMatrix,
}

impl CnfInstance {
    pub fn var_count(&self) -> usize {
        self.registry.var_count()
    }

    pub fn count(&self, kind: ClauseKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    /// Whether `assignment` (index `v - 1` for variable `v`) satisfies a clause.
    pub fn satisfies(clause: &[Lit], assignment: &[bool]) -> bool {
        clause.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
    }

    /// First hard clause falsified by `assignment`.
    pub fn violated_hard(&self, assignment: &[bool]) -> Option<usize> {
        self.hard.iter().position(|c| !Self::satisfies(c, assignment))
    }

    /// Number of satisfied soft clauses.
    pub fn soft_satisfied(&self, assignment: &[bool]) -> usize {
        self.soft.iter().filter(|c| Self::satisfies(c, assignment)).count()
    }
}

struct Builder {
    hard: Vec<Clause>,
    kinds: Vec<ClauseKind>,
}

impl Builder {
    fn push(&mut self, kind: ClauseKind, lits: impl IntoIterator<Item = Lit>) {
        let mut clause: Clause = Vec::new();
        for l in lits {
            if !clause.contains(&l) {
                clause.push(l);
            }
        }
        debug_assert!(!clause.is_empty());
        self.hard.push(clause);
        self.kinds.push(kind);
    }
}

/// Builds the partial MaxSAT instance for `psm` under `config`.
pub fn encode(psm: &PartialMatrix, config: EncodingConfig) -> Result<CnfInstance> {
    let config = EncodingConfig::new(config.encoding, config.m)?;
    let enc = config.encoding;
    let reg = VarRegistry::new(psm, &config);
    let (n, m) = (psm.n(), config.m);
    let mut b = Builder { hard: Vec::new(), kinds: Vec::new() };

    if enc.ladder {
        for i in 0..n {
            let ys: Vec<Lit> = (0..m).map(|p| reg.y(i, p)).collect();
            let aux: Vec<Lit> = (0..ladder_aux_count(m)).map(|s| reg.ladder(i, s).expect("ladder block")).collect();
            for c in ladder_clauses(&ys, &aux) {
                b.push(ClauseKind::Ladder, c);
            }
        }
    } else {
        for i in 0..n {
            b.push(ClauseKind::AtLeastOne, (0..m).map(|p| reg.y(i, p)));
        }
        if !enc.non_functional {
            for i in 0..n {
                for p in 0..m {
                    for q in p + 1..m {
                        b.push(ClauseKind::AtMostOne, [-reg.y(i, p), -reg.y(i, q)]);
                    }
                }
            }
        }
    }

    for (cell, &value) in psm.cells().iter().enumerate() {
        let (i, a, j) = psm.triple(cell);
        for p in 0..m {
            for q in 0..m {
                let (yi, yj, z) = (reg.y(i, p), reg.y(j, q), reg.z(p, a, q));
                match value {
                    Cell::Zero => b.push(ClauseKind::NonEdge, [-yi, -yj, -z]),
                    Cell::One => b.push(ClauseKind::Edge, [-yi, -yj, z]),
                    Cell::Star => {
                        let x = reg.x(cell).expect("star has a fill variable");
                        b.push(ClauseKind::StarFromEdge, [-yi, -yj, x, -z]);
                        b.push(ClauseKind::EdgeFromStar, [-yi, -yj, -x, z]);
                    }
                }
            }
        }
    }

    for i in 0..n {
        for p in 0..m {
            b.push(ClauseKind::Occupied, [-reg.y(i, p), reg.r(p)]);
        }
    }

    if enc.uses_minima() {
        let l = |i, p| reg.l(i, p).expect("minima block");
        for p in 0..m {
            for q in p + 1..m {
                for i in 0..n {
                    for j in 0..=i {
                        b.push(ClauseKind::MinsSorted, [-l(i, p), -l(j, q)]);
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for p in 0..m {
                    b.push(ClauseKind::MinIsMinimum, [-reg.y(i, p), -l(j, p)]);
                }
            }
        }
        for i in 0..n {
            for p in 0..m {
                b.push(ClauseKind::MinIsSelected, [-l(i, p), reg.y(i, p)]);
            }
        }
        if enc.feasible_mins {
            for i in 0..n {
                for p in 0..m {
                    b.push(ClauseKind::FeasibleMins, std::iter::once(-reg.y(i, p)).chain((0..=i).map(|j| l(j, p))));
                }
            }
        } else {
            for p in 0..m {
                b.push(ClauseKind::MinDomain, std::iter::once(-reg.r(p)).chain((0..n).map(|j| l(j, p))));
            }
        }
    }

    if enc.lower_indexed {
        for p in 0..m.saturating_sub(1) {
            b.push(ClauseKind::LowerIndexed, [reg.r(p), -reg.r(p + 1)]);
        }
    }

    let soft = (0..m).map(|p| vec![-reg.r(p)]).collect();
    Ok(CnfInstance {
        config,
        registry: reg,
        hard: b.hard,
        kinds: b.kinds,
        soft,
        psm: psm.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(name: &str, m: usize) -> EncodingConfig {
        EncodingConfig::new(name.parse().unwrap(), m).unwrap()
    }

    #[test]
    fn single_star_instance() {
        let psm = PartialMatrix::new(1, 1).unwrap();
        let inst = encode(&psm, cfg("BE", 1)).unwrap();
        assert_eq!(inst.var_count(), 4);
        assert_eq!(inst.count(ClauseKind::AtLeastOne), 1);
        assert_eq!(inst.count(ClauseKind::AtMostOne), 0);
        assert_eq!(inst.count(ClauseKind::StarFromEdge), 1);
        assert_eq!(inst.count(ClauseKind::EdgeFromStar), 1);
        assert_eq!(inst.count(ClauseKind::Occupied), 1);
        assert_eq!(inst.hard.len(), 4);
        assert_eq!(inst.soft, vec![vec![-4]]);
        assert_eq!(inst.hard[1], vec![-2, 1, -3]);
    }

    #[test]
    fn pairwise_count() {
        let psm = PartialMatrix::filled(3, 1, Cell::Zero).unwrap();
        assert_eq!(encode(&psm, cfg("BE", 2)).unwrap().count(ClauseKind::AtMostOne), 3);
    }

    #[test]
    fn fm_versus_md() {
        let psm = PartialMatrix::filled(20, 1, Cell::One).unwrap();
        assert_eq!(encode(&psm, cfg("BE+NF+FM", 8)).unwrap().count(ClauseKind::FeasibleMins), 160);
        assert_eq!(encode(&psm, cfg("BE+NF+MD", 8)).unwrap().count(ClauseKind::MinDomain), 8);
    }

    #[test]
    fn names_round_trip() {
        for e in Encoding::all_valid() {
            assert_eq!(e.to_string().parse::<Encoding>().unwrap(), e);
        }
        assert_eq!(Encoding::all_valid().len(), 18);
        let names: Vec<String> = Encoding::benchmark_set().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["BE", "BE+CC", "BE+NF", "BE+NF+FM", "BE+NF+MD", "BE+NF+MD+LI"]);
    }

    #[test]
    fn rejects_inconsistent_flags() {
        for bad in ["BE+CC+NF", "BE+FM+MD", "NF", "BE+XX", "BE+LI+LI"] {
            assert!(bad.parse::<Encoding>().is_err(), "{bad}");
        }
        assert!(EncodingConfig::new(Encoding::BE, 0).is_err());
        let e = Encoding { ladder: true, non_functional: true, ..Encoding::BE };
        let psm = PartialMatrix::new(1, 1).unwrap();
        assert!(encode(&psm, EncodingConfig { encoding: e, m: 2 }).is_err());
    }

    #[test]
    fn registry_roles_are_total_and_injective() {
        let mut psm = PartialMatrix::new(3, 2).unwrap();
        psm.set(0, 1, 2, Cell::One);
        for name in ["BE+CC+FM", "BE+NF+MD+LI", "BE"] {
            let inst = encode(&psm, cfg(name, 3)).unwrap();
            let reg = &inst.registry;
            let roles: Vec<Role> = (1..=reg.var_count()).map(|v| reg.role(v).unwrap()).collect();
            let unique: std::collections::HashSet<_> = roles.iter().collect();
            assert_eq!(unique.len(), roles.len());
            assert!(reg.role(reg.var_count() + 1).is_none());
            for (v, role) in roles.iter().enumerate() {
                let id = match *role {
                    Role::Fill((i, a, j)) => reg.x(psm.index(i, a, j)).unwrap(),
                    Role::Assign { entity, class } => reg.y(entity, class),
                    Role::Edge { from, right, to } => reg.z(from, right, to),
                    Role::Occupied(p) => reg.r(p),
                    Role::Min { entity, class } => reg.l(entity, class).unwrap(),
                    Role::Ladder { entity, step } => reg.ladder(entity, step).unwrap(),
                };
                assert_eq!(id as usize, v + 1);
            }
            for c in &inst.hard {
                assert!(c.iter().all(|l| l.unsigned_abs() as usize <= reg.var_count()));
            }
        }
    }

    #[test]
    fn default_budget_uses_better_uniform_fill() {
        // all-star matrix: both uniform fills give one class
        assert_eq!(default_budget(&PartialMatrix::new(4, 1).unwrap()), 1);
        let mut psm = PartialMatrix::new(2, 1).unwrap();
        psm.set(0, 0, 0, Cell::One);
        psm.set(1, 0, 1, Cell::Zero);
        assert_eq!(default_budget(&psm), 2);
    }
}
