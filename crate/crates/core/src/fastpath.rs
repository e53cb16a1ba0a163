//! Horn envelope and cores of a Horn formula updated by one Horn clause,
//! built directly as clauses in linear time.
//!
//! If `g ∧ phi` is satisfiable every formalism but Winslett's returns the
//! conjunction, which is Horn. Otherwise `g` forces every body variable of
//! `phi` true and its head false, so `g` factors as those units times a
//! residual `g'` over the other variables. Each model of `g` then moves to
//! the models that flip exactly one variable of `phi`, and the envelope and
//! cores follow from that small pattern conjoined with `g'`.

use crate::change::FormalismTag;
use crate::error::{Error, Result};
use crate::formula::{Clause, Cnf, Var};
use crate::hornsat;

/// Which core [`fast_update_pick`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoreTieBreak {
    /// The canonically smallest core.
    #[default]
    First,
    /// 1-based position in the canonical core list.
    Index(usize),
}

impl CoreTieBreak {
    pub fn position(self) -> usize {
        match self {
            CoreTieBreak::First => 1,
            CoreTieBreak::Index(i) => i,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FastUpdate {
    pub envelope: Cnf,
    /// In canonical order (lexicographic on the canonical clause lists).
    pub cores: Vec<Cnf>,
    /// True when `g ∧ phi` was satisfiable and the result is the conjunction.
    pub consistent: bool,
}

enum Shape {
    Consistent(Cnf),
    Projection {
        residual: Cnf,
        /// Body variables in the order their cores are listed.
        body: Vec<Var>,
        head: Option<Var>,
    },
}

fn analyze(g: &Cnf, phi: &Clause, tag: FormalismTag) -> Result<Shape> {
    tag.require_model_based()?;
    if !g.is_horn() || !phi.is_horn() {
        return Err(Error::NotHorn);
    }
    if phi.is_empty() {
        return Err(Error::UnsatisfiableUpdate);
    }
    let with_phi = g.with_clause(phi.clone())?;
    if !hornsat::is_satisfiable(g)? {
        return Err(Error::UnsatisfiableBase);
    }
    if hornsat::is_satisfiable(&with_phi)? {
        if tag == FormalismTag::Winslett {
            return Err(Error::NeedsSemanticFallback);
        }
        return Ok(Shape::Consistent(with_phi));
    }
    let mut assignment: Vec<(Var, bool)> = phi.body().map(|v| (v, true)).collect();
    let head = phi.head();
    if let Some(h) = head {
        assignment.push((h, false));
    }
    let residual = g.condition(&assignment);
    // Descending variable order is the canonical order of the cores: the
    // core that keeps the smaller variables as units sorts first.
    let mut body: Vec<Var> = phi.body().collect();
    body.reverse();
    Ok(Shape::Projection {
        residual,
        body,
        head,
    })
}

fn envelope_of(residual: &Cnf, phi: &Clause, body: &[Var], head: Option<Var>) -> Cnf {
    let mut out = residual.clone();
    let mut extra = Vec::with_capacity(body.len() + 1);
    if let Some(h) = head {
        for &v in body {
            extra.push(Clause::implication(h, v));
        }
    }
    extra.push(phi.clone());
    for c in extra {
        out.push(c).expect("phi variables are in the universe");
    }
    out.into_canonical()
}

/// The core in which `flipped` is the body variable that moves.
fn core_of(residual: &Cnf, body: &[Var], head: Option<Var>, flipped: Var) -> Cnf {
    let mut out = residual.clone();
    for &v in body.iter().filter(|&&v| v != flipped) {
        out.push(Clause::unit(v.positive())).expect("in universe");
    }
    match head {
        Some(h) => {
            out.push(Clause::implication(flipped, h))
                .expect("in universe");
            out.push(Clause::implication(h, flipped))
                .expect("in universe");
        }
        None => out
            .push(Clause::unit(flipped.negative()))
            .expect("in universe"),
    }
    out.into_canonical()
}

pub fn fast_update(g: &Cnf, phi: &Clause, tag: FormalismTag) -> Result<FastUpdate> {
    match analyze(g, phi, tag)? {
        Shape::Consistent(both) => {
            let c = both.into_canonical();
            Ok(FastUpdate {
                envelope: c.clone(),
                cores: vec![c],
                consistent: true,
            })
        }
        Shape::Projection {
            residual,
            body,
            head,
        } => {
            let envelope = envelope_of(&residual, phi, &body, head);
            let cores = if body.is_empty() {
                vec![envelope.clone()]
            } else {
                body.iter()
                    .map(|&v| core_of(&residual, &body, head, v))
                    .collect()
            };
            Ok(FastUpdate {
                envelope,
                cores,
                consistent: false,
            })
        }
    }
}

/// Like [`fast_update`] but builds only the selected core.
pub fn fast_update_pick(
    g: &Cnf,
    phi: &Clause,
    tag: FormalismTag,
    pick: CoreTieBreak,
) -> Result<(Cnf, Cnf)> {
    match analyze(g, phi, tag)? {
        Shape::Consistent(both) => {
            check_index(pick, 1)?;
            let c = both.into_canonical();
            Ok((c.clone(), c))
        }
        Shape::Projection {
            residual,
            body,
            head,
        } => {
            let envelope = envelope_of(&residual, phi, &body, head);
            if body.is_empty() {
                check_index(pick, 1)?;
                return Ok((envelope.clone(), envelope));
            }
            let i = check_index(pick, body.len())?;
            let core = core_of(&residual, &body, head, body[i]);
            Ok((envelope, core))
        }
    }
}

fn check_index(pick: CoreTieBreak, count: usize) -> Result<usize> {
    let index = pick.position();
    if index == 0 || index > count {
        return Err(Error::BadIndex { index, count });
    }
    Ok(index - 1)
}
