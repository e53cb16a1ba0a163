//! Linear-time Horn satisfiability by counter-based unit propagation.
//!
//! Each clause keeps a count of negative literals whose variable is not yet
//! forced true. When the count reaches zero the clause fires: its head is
//! forced, or, for a negative clause, propagation fails. Every literal is
//! visited at most once, so a run is linear in the literal count.

use crate::error::{Error, Result};
use crate::formula::{same_universe, Clause, Cnf, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HornOutcome {
    /// The least model: exactly the variables forced true.
    Sat(Vec<bool>),
    Unsat,
}

impl HornOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, HornOutcome::Sat(_))
    }

    pub fn model(&self) -> Option<&[bool]> {
        match self {
            HornOutcome::Sat(m) => Some(m),
            HornOutcome::Unsat => None,
        }
    }
}

pub fn horn_sat(cnf: &Cnf) -> Result<HornOutcome> {
    if !cnf.is_horn() {
        return Err(Error::NotHorn);
    }
    Ok(match propagate(cnf, &[], &[]) {
        Some(m) => HornOutcome::Sat(m),
        None => HornOutcome::Unsat,
    })
}

pub fn is_satisfiable(cnf: &Cnf) -> Result<bool> {
    horn_sat(cnf).map(|o| o.is_sat())
}

/// Does every model of the Horn formula satisfy `clause`?
///
/// The clause may be non-Horn: its negation only contributes unit clauses.
pub fn entails(cnf: &Cnf, clause: &Clause) -> Result<bool> {
    if !cnf.is_horn() {
        return Err(Error::NotHorn);
    }
    if let Some(v) = clause.max_var() {
        if v.index() >= cnf.num_vars() {
            return Err(Error::UnknownVariable(format!("#{}", v.0)));
        }
    }
    let mut force_true = Vec::new();
    let mut force_false = Vec::new();
    for l in clause.lits() {
        if l.is_positive() {
            force_false.push(l.var());
        } else {
            force_true.push(l.var());
        }
    }
    Ok(propagate(cnf, &force_true, &force_false).is_none())
}

pub fn entails_cnf(a: &Cnf, b: &Cnf) -> Result<bool> {
    if !same_universe(a.universe(), b.universe()) {
        return Err(Error::UniverseMismatch);
    }
    if !a.is_horn() {
        return Err(Error::NotHorn);
    }
    for c in b.clauses() {
        if !entails(a, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Unit propagation with extra assumptions. Returns the least model of
/// `cnf ∧ force_true ∧ ¬force_false`, or `None` when that is unsatisfiable.
/// Clauses with more than one positive literal must not be passed in.
pub(crate) fn propagate(cnf: &Cnf, force_true: &[Var], force_false: &[Var]) -> Option<Vec<bool>> {
    let n = cnf.num_vars();
    let clauses = cnf.clauses();

    // Negative-occurrence lists in compressed form.
    let mut start = vec![0usize; n + 1];
    for c in clauses {
        for v in c.body() {
            start[v.index() + 1] += 1;
        }
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut occ = vec![0u32; start[n]];
    let mut pending: Vec<u32> = Vec::with_capacity(clauses.len());
    let mut heads: Vec<Option<Var>> = Vec::with_capacity(clauses.len());
    for (ci, c) in clauses.iter().enumerate() {
        let mut count = 0u32;
        for v in c.body() {
            occ[fill[v.index()]] = ci as u32;
            fill[v.index()] += 1;
            count += 1;
        }
        pending.push(count);
        heads.push(c.head());
    }

    let mut forbidden = vec![false; n];
    for v in force_false {
        forbidden[v.index()] = true;
    }
    let mut value = vec![false; n];
    let mut queue: Vec<Var> = Vec::new();

    let set_true = |v: Var, value: &mut Vec<bool>, queue: &mut Vec<Var>| -> bool {
        if forbidden[v.index()] {
            return false;
        }
        if !value[v.index()] {
            value[v.index()] = true;
            queue.push(v);
        }
        true
    };

    for &v in force_true {
        if !set_true(v, &mut value, &mut queue) {
            return None;
        }
    }
    for (ci, &count) in pending.iter().enumerate() {
        if count == 0 {
            let h = heads[ci]?;
            if !set_true(h, &mut value, &mut queue) {
                return None;
            }
        }
    }
    let mut next = 0;
    while next < queue.len() {
        let v = queue[next];
        next += 1;
        for &ci in &occ[start[v.index()]..start[v.index() + 1]] {
            let ci = ci as usize;
            pending[ci] -= 1;
            if pending[ci] == 0 {
                let h = heads[ci]?;
                if !set_true(h, &mut value, &mut queue) {
                    return None;
                }
            }
        }
    }
    Some(value)
}
