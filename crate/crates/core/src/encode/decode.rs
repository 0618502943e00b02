use super::{CnfInstance, Lit};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::matrix::Cell;
use crate::policy::DomainPolicy;

/// A model translated back into an instantiation and a policy.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub instantiation: Digraph,
    pub policy: DomainPolicy,
    /// Number of classes whose occupancy variable is true.
    pub occupied_count: usize,
    /// Raw class of each entity (lowest class when several are set).
    pub class_of: Vec<usize>,
    /// Classes whose occupancy variable is true, ascending.
    pub occupied: Vec<usize>,
}

/// Decodes a model that satisfies every hard clause of `inst`.
///
/// The policy's domains are the classes actually used by some entity,
/// renumbered densely in class order. The result is re-verified: the
/// policy must enforce the instantiation.
pub fn decode(inst: &CnfInstance, assignment: &[bool]) -> Result<Decoded> {
    if assignment.len() != inst.var_count() {
        return Err(Error::Arity { what: "model", expected: inst.var_count(), found: assignment.len() });
    }
    if let Some(c) = inst.violated_hard(assignment) {
        return Err(Error::Integrity(format!(
            "model falsifies hard clause #{c} ({:?}): {:?}",
            inst.kinds[c], inst.hard[c]
        )));
    }
    let psm = &inst.psm;
    let reg = &inst.registry;
    let (n, k, m) = (psm.n(), psm.k(), inst.config.m);
    let val = |l: Lit| assignment[l as usize - 1];

    let mut g = Digraph::empty(n, k)?;
    for (cell, &c) in psm.cells().iter().enumerate() {
        let present = match c {
            Cell::One => true,
            Cell::Zero => false,
            Cell::Star => val(reg.x(cell).expect("star is registered")),
        };
        if present {
            let (u, a, v) = psm.triple(cell);
            g.set(u, a, v, true);
        }
    }

    let class_of = (0..n)
        .map(|i| {
            (0..m)
                .find(|&p| val(reg.y(i, p)))
                .ok_or_else(|| Error::Integrity(format!("entity {i} is assigned to no class")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut used: Vec<usize> = class_of.clone();
    used.sort_unstable();
    used.dedup();
    let mut domain_of_class = vec![usize::MAX; m];
    for (d, &p) in used.iter().enumerate() {
        domain_of_class[p] = d;
    }
    let mut h = Digraph::empty(used.len(), k)?;
    for (d, &p) in used.iter().enumerate() {
        for a in 0..k {
            for (e, &q) in used.iter().enumerate() {
                if val(reg.z(p, a, q)) {
                    h.set(d, a, e, true);
                }
            }
        }
    }
    let assignment_map = class_of.iter().map(|&p| domain_of_class[p]).collect();
    let policy = DomainPolicy::new(h, assignment_map)?;
    if let Some((u, a, v)) = policy.first_violation(&g)? {
        return Err(Error::Integrity(format!(
            "decoded policy disagrees with instantiation on ({u}, {a}, {v})"
        )));
    }

    let occupied: Vec<usize> = (0..m).filter(|&p| val(reg.r(p))).collect();
    Ok(Decoded {
        instantiation: g,
        policy,
        occupied_count: occupied.len(),
        class_of,
        occupied,
    })
}
