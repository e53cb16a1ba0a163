//! Brute-force reference implementations shared by the integration tests.
//! Everything here works directly from truth tables and definitions.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hornbound::formula::{Cnf, KnowledgeBase, Var};
use hornbound::semantics::ModelSet;

pub type Set = BTreeSet<u64>;

/// Packed assignment with variable 0 in the highest of `n` bits.
pub fn value(bits: u64, n: usize, v: Var) -> bool {
    bits >> (n - 1 - v.index()) & 1 == 1
}

pub fn models(cnf: &Cnf) -> Set {
    let n = cnf.num_vars();
    (0..1u64 << n)
        .filter(|&b| cnf.eval_with(|v| value(b, n, v)))
        .collect()
}

pub fn set_of(ms: &ModelSet) -> Set {
    ms.iter().map(|m| m.bits()).collect()
}

pub fn closure(s: &Set) -> Set {
    let mut out = s.clone();
    loop {
        let items: Vec<u64> = out.iter().copied().collect();
        let before = out.len();
        for &a in &items {
            for &b in &items {
                out.insert(a & b);
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

pub fn is_closed(s: &Set) -> bool {
    s.iter().all(|&a| s.iter().all(|&b| s.contains(&(a & b))))
}

pub fn is_maximal_closed_subset(sub: &Set, all: &Set) -> bool {
    if !is_closed(sub) || !sub.is_subset(all) {
        return false;
    }
    // For closed `sub`, the closure of `sub + m` is `sub + m + {m & s}`.
    all.difference(sub)
        .all(|&m| sub.iter().any(|&s| !all.contains(&(m & s))))
}

fn proper_subset(a: u64, b: u64) -> bool {
    a & b == a && a != b
}

/// The model-based update operators, straight from their definitions.
pub fn update(g: &Set, f: &Set, tag: &str) -> Set {
    let both: Set = g.intersection(f).copied().collect();
    if tag != "winslett" && !both.is_empty() {
        return both;
    }
    let ham = |a: u64, b: u64| (a ^ b).count_ones();
    match tag {
        "dalal" => {
            let best = g
                .iter()
                .flat_map(|&m| f.iter().map(move |&x| ham(m, x)))
                .min()
                .unwrap();
            f.iter()
                .copied()
                .filter(|&x| g.iter().any(|&m| ham(m, x) == best))
                .collect()
        }
        "satoh" => {
            let diffs: Set = g
                .iter()
                .flat_map(|&m| f.iter().map(move |&x| m ^ x))
                .collect();
            let minimal: Set = diffs
                .iter()
                .copied()
                .filter(|&d| !diffs.iter().any(|&e| proper_subset(e, d)))
                .collect();
            f.iter()
                .copied()
                .filter(|&x| g.iter().any(|&m| minimal.contains(&(m ^ x))))
                .collect()
        }
        "forbus" => {
            let mut out = Set::new();
            for &m in g {
                let best = f.iter().map(|&x| ham(m, x)).min().unwrap();
                out.extend(f.iter().copied().filter(|&x| ham(m, x) == best));
            }
            out
        }
        "borgida" | "winslett" => {
            let mut out = Set::new();
            for &m in g {
                out.extend(
                    f.iter()
                        .copied()
                        .filter(|&x| !f.iter().any(|&y| proper_subset(m ^ y, m ^ x))),
                );
            }
            out
        }
        other => panic!("no oracle for {other}"),
    }
}

/// Is the conjunction of the chosen items and `f` satisfiable?
pub fn consistent(kb: &KnowledgeBase, keep: &[usize], f: &Cnf) -> bool {
    let n = f.num_vars();
    (0..1u64 << n).any(|b| {
        let val = |v: Var| value(b, n, v);
        f.eval_with(val) && keep.iter().all(|&i| kb.items()[i].1.eval_with(val))
    })
}

/// Maximal consistent subsets by checking every subset of positions.
pub fn maximal_subsets(kb: &KnowledgeBase, f: &Cnf) -> Vec<Vec<usize>> {
    let k = kb.len();
    let subsets: Vec<Vec<usize>> = (0..1u32 << k)
        .map(|mask| (0..k).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| consistent(kb, s, f))
        .collect();
    let mut out: Vec<Vec<usize>> = subsets
        .iter()
        .filter(|s| {
            !subsets
                .iter()
                .any(|t| t.len() > s.len() && s.iter().all(|i| t.contains(i)))
        })
        .cloned()
        .collect();
    out.sort();
    out
}

pub fn hits_all(set: &[usize], edges: &[Vec<usize>]) -> bool {
    edges.iter().all(|e| e.iter().any(|v| set.contains(v)))
}

/// Minimal hitting sets by checking every vertex subset.
pub fn transversals(n: usize, edges: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let hitting: Vec<Vec<usize>> = (0..1u32 << n)
        .map(|mask| {
            (1..=n)
                .filter(|&v| mask >> (v - 1) & 1 == 1)
                .collect::<Vec<_>>()
        })
        .filter(|s| hits_all(s, edges))
        .collect();
    hitting
        .iter()
        .filter(|s| {
            !hitting
                .iter()
                .any(|t| t.len() < s.len() && t.iter().all(|v| s.contains(v)))
        })
        .cloned()
        .collect()
}

pub fn min_node_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0..1u32 << n)
        .filter(|&mask| {
            edges
                .iter()
                .all(|&(a, b)| mask >> (a - 1) & 1 == 1 || mask >> (b - 1) & 1 == 1)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

/// Satisfiability of a clause list over `n` variables; a literal is
/// `(variable index, positive)`.
pub fn sat(n: usize, clauses: &[Vec<(usize, bool)>]) -> bool {
    (0..1u32 << n).any(|a| {
        clauses
            .iter()
            .all(|c| c.iter().any(|&(v, pos)| (a >> v & 1 == 1) == pos))
    })
}
