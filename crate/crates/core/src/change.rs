//! Belief change operators.
//!
//! Two syntactic formalisms act on knowledge bases (maximal consistent
//! subsets, and their intersection). Five model-based formalisms act on
//! model sets and pick the models of the update closest to the base, by
//! Hamming distance or by inclusion-minimal difference, either over all
//! pairs at once or per base model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{same_universe, Cnf, KnowledgeBase};
use crate::hornsat;
use crate::semantics::{enumerate_models, Limits, Model, ModelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormalismTag {
    Fuv,
    Widtio,
    Dalal,
    Satoh,
    Borgida,
    Forbus,
    Winslett,
}

impl FormalismTag {
    pub const ALL: [FormalismTag; 7] = [
        FormalismTag::Fuv,
        FormalismTag::Widtio,
        FormalismTag::Dalal,
        FormalismTag::Satoh,
        FormalismTag::Borgida,
        FormalismTag::Forbus,
        FormalismTag::Winslett,
    ];

    pub const MODEL_BASED: [FormalismTag; 5] = [
        FormalismTag::Dalal,
        FormalismTag::Satoh,
        FormalismTag::Borgida,
        FormalismTag::Forbus,
        FormalismTag::Winslett,
    ];

    pub fn is_model_based(self) -> bool {
        !matches!(self, FormalismTag::Fuv | FormalismTag::Widtio)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FormalismTag::Fuv => "fuv",
            FormalismTag::Widtio => "widtio",
            FormalismTag::Dalal => "dalal",
            FormalismTag::Satoh => "satoh",
            FormalismTag::Borgida => "borgida",
            FormalismTag::Forbus => "forbus",
            FormalismTag::Winslett => "winslett",
        }
    }

    pub(crate) fn require_model_based(self) -> Result<()> {
        if self.is_model_based() {
            Ok(())
        } else {
            Err(Error::NotModelBased(self.as_str().into()))
        }
    }
}

impl fmt::Display for FormalismTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormalismTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormalismTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownFormalism(s.to_string()))
    }
}

#[derive(Debug, Clone)]
pub enum UpdateResult {
    Models(ModelSet),
    Bases(Vec<KnowledgeBase>),
    Base(KnowledgeBase),
}

/// Elements of `diffs` that have no proper subset in `diffs`.
fn minimal_diffs(diffs: &mut Vec<u64>) {
    // Running antichain: a new difference is dropped if it contains a kept
    // one, and otherwise evicts the kept ones containing it.
    let mut kept: Vec<u64> = Vec::new();
    for &d in diffs.iter() {
        if kept.iter().any(|&k| k & !d == 0) {
            continue;
        }
        kept.retain(|&k| k & d != d);
        kept.push(d);
    }
    kept.sort_unstable();
    *diffs = kept;
}

/// Models of `f` whose difference from `m` is inclusion-minimal.
fn closest_by_inclusion(m: Model, f: &ModelSet) -> impl Iterator<Item = Model> + '_ {
    let mut mins: Vec<u64> = f.iter().map(|x| m.diff(x)).collect();
    minimal_diffs(&mut mins);
    f.iter().filter(move |&x| mins.contains(&m.diff(x)))
}

fn closest_by_hamming(m: Model, f: &ModelSet) -> impl Iterator<Item = Model> + '_ {
    let best = f.iter().map(|x| m.hamming(x)).min().unwrap_or(0);
    f.iter().filter(move |&x| m.hamming(x) == best)
}

/// The models of `f` selected by a model-based formalism relative to `g`.
pub fn update_models(g: &ModelSet, f: &ModelSet, tag: FormalismTag) -> Result<ModelSet> {
    tag.require_model_based()?;
    if !same_universe(g.universe(), f.universe()) {
        return Err(Error::UniverseMismatch);
    }
    if g.is_empty() || f.is_empty() {
        return Err(Error::EmptyModelSet);
    }
    let universe = g.universe().clone();
    if tag != FormalismTag::Winslett {
        let both = g.intersection(f);
        if !both.is_empty() {
            return Ok(both);
        }
    }
    let selected: Vec<Model> = match tag {
        FormalismTag::Dalal => {
            let best = g
                .iter()
                .flat_map(|m| f.iter().map(move |x| m.hamming(x)))
                .min()
                .expect("both sets nonempty");
            f.iter()
                .filter(|&x| g.iter().any(|m| m.hamming(x) == best))
                .collect()
        }
        FormalismTag::Satoh => {
            let mut mins: Vec<u64> = g
                .iter()
                .flat_map(|m| f.iter().map(move |x| m.diff(x)))
                .collect();
            minimal_diffs(&mut mins);
            f.iter()
                .filter(|&x| g.iter().any(|m| mins.contains(&m.diff(x))))
                .collect()
        }
        FormalismTag::Forbus => g.iter().flat_map(|m| closest_by_hamming(m, f)).collect(),
        FormalismTag::Borgida | FormalismTag::Winslett => {
            g.iter().flat_map(|m| closest_by_inclusion(m, f)).collect()
        }
        FormalismTag::Fuv | FormalismTag::Widtio => unreachable!(),
    };
    ModelSet::new(universe, selected)
}

/// Enumerate both formulas and apply [`update_models`].
pub fn update_cnf(g: &Cnf, f: &Cnf, tag: FormalismTag, limits: &Limits) -> Result<ModelSet> {
    tag.require_model_based()?;
    if !same_universe(g.universe(), f.universe()) {
        return Err(Error::UniverseMismatch);
    }
    let gm = enumerate_models(g, limits)?;
    if gm.is_empty() {
        return Err(Error::UnsatisfiableBase);
    }
    let fm = enumerate_models(f, limits)?;
    if fm.is_empty() {
        return Err(Error::UnsatisfiableUpdate);
    }
    update_models(&gm, &fm, tag)
}

/// Largest knowledge base handled by the subset search.
pub const MAX_KB_ITEMS: usize = 20;

fn satisfiable(cnf: &Cnf, limits: &Limits) -> Result<bool> {
    if cnf.is_horn() {
        hornsat::is_satisfiable(cnf)
    } else {
        Ok(!enumerate_models(cnf, limits)?.is_empty())
    }
}

fn append_update(kb: &KnowledgeBase, keep: &[usize], f: &Cnf) -> KnowledgeBase {
    let mut name = "phi".to_string();
    while kb.contains_name(&name) {
        name.push('\'');
    }
    let mut items: Vec<(String, Cnf)> = keep.iter().map(|&i| kb.items()[i].clone()).collect();
    items.push((name, f.clone()));
    KnowledgeBase::new(kb.universe().clone(), items).expect("names are unique")
}

/// Positions of the items in each inclusion-maximal subset consistent with
/// `f`, in lexicographic order of the position lists.
pub fn maximal_consistent_subsets(
    kb: &KnowledgeBase,
    f: &Cnf,
    limits: &Limits,
) -> Result<Vec<Vec<usize>>> {
    if !same_universe(kb.universe(), f.universe()) {
        return Err(Error::UniverseMismatch);
    }
    if !satisfiable(f, limits)? {
        return Err(Error::UnsatisfiableUpdate);
    }
    let k = kb.len();
    if k > MAX_KB_ITEMS {
        return Err(Error::TooLarge(format!(
            "knowledge base has {k} items, limit {MAX_KB_ITEMS}"
        )));
    }
    let full = (1u32 << k) - 1;
    let conj = |mask: u32| -> Result<bool> {
        let mut c = f.clone();
        for (i, (_, item)) in kb.items().iter().enumerate() {
            if mask & 1 << i != 0 {
                c = c.conjoin(item)?;
            }
        }
        satisfiable(&c, limits)
    };
    if conj(full)? {
        return Ok(vec![(0..k).collect()]);
    }

    // Consistency is inherited by subsets, so masks are checked from the
    // largest down and a mask is maximal iff no consistent proper superset
    // was already found.
    let mut masks: Vec<u32> = (0..=full).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut maximal: Vec<u32> = Vec::new();
    for mask in masks {
        if maximal.iter().any(|&m| m & mask == mask) {
            continue;
        }
        if conj(mask)? {
            maximal.push(mask);
        }
    }
    let mut out: Vec<Vec<usize>> = maximal
        .into_iter()
        .map(|m| (0..k).filter(|&i| m & 1 << i != 0).collect())
        .collect();
    out.sort();
    Ok(out)
}

/// All maximal subsets of `kb` consistent with `f`, each with `f` appended.
pub fn fuv_update(kb: &KnowledgeBase, f: &Cnf, limits: &Limits) -> Result<Vec<KnowledgeBase>> {
    Ok(maximal_consistent_subsets(kb, f, limits)?
        .iter()
        .map(|keep| append_update(kb, keep, f))
        .collect())
}

/// The items kept by every maximal consistent subset, plus `f`.
pub fn widtio_update(kb: &KnowledgeBase, f: &Cnf, limits: &Limits) -> Result<KnowledgeBase> {
    let subsets = maximal_consistent_subsets(kb, f, limits)?;
    let keep: Vec<usize> = (0..kb.len())
        .filter(|i| subsets.iter().all(|s| s.contains(i)))
        .collect();
    Ok(append_update(kb, &keep, f))
}

/// Dispatch on the tag: model-based tags enumerate `kb`'s conjunction.
pub fn update(
    kb: &KnowledgeBase,
    f: &Cnf,
    tag: FormalismTag,
    limits: &Limits,
) -> Result<UpdateResult> {
    match tag {
        FormalismTag::Fuv => fuv_update(kb, f, limits).map(UpdateResult::Bases),
        FormalismTag::Widtio => widtio_update(kb, f, limits).map(UpdateResult::Base),
        _ => update_cnf(&kb.conjunction(), f, tag, limits).map(UpdateResult::Models),
    }
}
