mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{closure, is_closed, is_maximal_closed_subset, models, set_of, update, Set};
use hornbound::change::{maximal_consistent_subsets, update_models, FormalismTag};
use hornbound::fastpath::fast_update;
use hornbound::formula::{
    parse_clauses, parse_dimacs, Clause, Cnf, KnowledgeBase, Lit, Var, VarUniverse,
};
use hornbound::hornsat::{entails, horn_sat, HornOutcome};
use hornbound::recompile::{BeliefState, RecompileConfig};
use hornbound::reductions::{transversals, Hypergraph};
use hornbound::semantics::{
    and_closure, characteristic_models, envelope_from_models, maximal_closed_subsets, CoreMode,
    Limits, Model, ModelSet,
};

fn build(n: usize, raw: &[Vec<(usize, bool)>]) -> Cnf {
    let u = VarUniverse::numbered("x", n).unwrap();
    let clauses = raw
        .iter()
        .filter_map(|c| Clause::new(c.iter().map(|&(v, p)| Lit::new(Var((v % n) as u32), p))).ok())
        .collect();
    Cnf::new(u, clauses).unwrap()
}

fn any_clause(n: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0..n, any::<bool>()), 0..4)
}

/// Body variables and an optional head; tautologies are dropped in `build`.
fn horn_clause(n: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    (prop::collection::vec(0..n, 0..3), prop::option::of(0..n)).prop_map(|(body, head)| {
        body.into_iter()
            .map(|v| (v, false))
            .chain(head.map(|h| (h, true)))
            .collect()
    })
}

fn horn_cnf(n: usize, max: usize) -> impl Strategy<Value = Cnf> {
    prop::collection::vec(horn_clause(n), 0..max).prop_map(move |cs| build(n, &cs))
}

fn model_set(n: usize, max: usize) -> impl Strategy<Value = ModelSet> {
    prop::collection::vec(0..1u64 << n, 1..max).prop_map(move |bits| {
        let u = VarUniverse::numbered("x", n).unwrap();
        ModelSet::new(u, bits.into_iter().map(|b| Model::new(n, b))).unwrap()
    })
}

fn same_universe_sets(n: usize, max: usize) -> impl Strategy<Value = (ModelSet, ModelSet)> {
    (
        prop::collection::vec(0..1u64 << n, 1..max),
        prop::collection::vec(0..1u64 << n, 1..max),
    )
        .prop_map(move |(a, b)| {
            let u = VarUniverse::numbered("x", n).unwrap();
            let mk = |bits: Vec<u64>| {
                ModelSet::new(u.clone(), bits.into_iter().map(|b| Model::new(n, b))).unwrap()
            };
            (mk(a), mk(b))
        })
}

proptest! {
    #[test]
    fn horn_sat_matches_truth_table(g in (1..9usize).prop_flat_map(|n| horn_cnf(n, 12))) {
        let all = models(&g);
        match horn_sat(&g).unwrap() {
            HornOutcome::Unsat => prop_assert!(all.is_empty()),
            HornOutcome::Sat(least) => {
                let n = g.num_vars();
                let bits = least
                    .iter()
                    .fold(0u64, |b, &v| b << 1 | u64::from(v));
                prop_assert!(all.contains(&bits));
                let meet = all.iter().fold((1u64 << n) - 1, |a, &m| a & m);
                prop_assert_eq!(bits, meet);
            }
        }
    }

    #[test]
    fn entailment_matches_truth_table(
        (g, q) in (1..8usize).prop_flat_map(|n| (horn_cnf(n, 10), any_clause(n).prop_map(move |c| (n, c))))
    ) {
        let (n, raw) = q;
        let query = build(n, &[raw]);
        let clause = query.clauses().first().cloned().unwrap_or_else(Clause::empty);
        let got = entails(&g, &clause).unwrap();
        let want = models(&g)
            .iter()
            .all(|&b| clause.eval_with(|v| common::value(b, n, v)));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn canonical_keeps_models_and_is_stable(
        g in (1..7usize).prop_flat_map(|n| prop::collection::vec(any_clause(n), 0..10).prop_map(move |c| build(n, &c)))
    ) {
        let c = g.canonical();
        prop_assert_eq!(models(&c), models(&g));
        let again = c.canonical();
        prop_assert_eq!(again.clauses(), c.clauses());
    }

    #[test]
    fn text_and_dimacs_round_trip(
        g in (1..7usize).prop_flat_map(|n| prop::collection::vec(any_clause(n), 0..10).prop_map(move |c| build(n, &c)))
    ) {
        let back = parse_clauses(&g.to_text(), g.universe()).unwrap();
        prop_assert_eq!(back.clauses(), g.clauses());
        let d = parse_dimacs(&g.to_dimacs()).unwrap();
        prop_assert_eq!(models(&d), models(&g));
    }

    #[test]
    fn closure_and_envelope_match_oracle(ms in (1..7usize).prop_flat_map(|n| model_set(n, 12))) {
        let want = closure(&set_of(&ms));
        let closed = and_closure(&ms);
        prop_assert_eq!(set_of(&closed), want.clone());
        prop_assert_eq!(set_of(&and_closure(&closed)), want.clone());
        let env = envelope_from_models(&ms, &Limits::default()).unwrap();
        prop_assert!(env.is_horn());
        prop_assert_eq!(models(&env), want.clone());
        let chars = set_of(&characteristic_models(&closed).unwrap());
        prop_assert_eq!(closure(&chars), want);
        for &c in &chars {
            let mut rest = chars.clone();
            rest.remove(&c);
            prop_assert!(!closure(&rest).contains(&c));
        }
    }

    #[test]
    fn exact_cores_are_all_maximal_closed_subsets(ms in (1..6usize).prop_flat_map(|n| model_set(n, 11))) {
        let all = set_of(&ms);
        let found: BTreeSet<Set> = maximal_closed_subsets(&ms, CoreMode::AllExact, &Limits::default())
            .unwrap()
            .iter()
            .map(set_of)
            .collect();
        let items: Vec<u64> = all.iter().copied().collect();
        let want: BTreeSet<Set> = (1..1u32 << items.len())
            .map(|mask| {
                (0..items.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| items[i])
                    .collect::<Set>()
            })
            .filter(|s| is_maximal_closed_subset(s, &all))
            .collect();
        prop_assert_eq!(found, want);
        let greedy = maximal_closed_subsets(&ms, CoreMode::Greedy, &Limits::default()).unwrap();
        prop_assert!(is_maximal_closed_subset(&set_of(&greedy[0]), &all));
        prop_assert!(is_closed(&set_of(&greedy[0])));
    }

    #[test]
    fn update_operators_match_definitions((g, f) in (1..6usize).prop_flat_map(|n| same_universe_sets(n, 10))) {
        for tag in FormalismTag::MODEL_BASED {
            let got = update_models(&g, &f, tag).unwrap();
            prop_assert_eq!(set_of(&got), update(&set_of(&g), &set_of(&f), tag.as_str()));
        }
    }

    #[test]
    fn winslett_update_is_additive(
        ((a, b), (phi, _)) in (1..6usize).prop_flat_map(|n| (same_universe_sets(n, 6), same_universe_sets(n, 6)))
    ) {
        let phi = ModelSet::new(a.universe().clone(), phi.iter()).unwrap();
        let w = FormalismTag::Winslett;
        let joint = update_models(&a.union(&b), &phi, w).unwrap();
        let split = update_models(&a, &phi, w).unwrap().union(&update_models(&b, &phi, w).unwrap());
        prop_assert_eq!(joint, split);
    }

    #[test]
    fn fast_path_matches_oracle(
        (g, raw) in (2..7usize).prop_flat_map(|n| (horn_cnf(n, 8), horn_clause(n)))
    ) {
        let n = g.num_vars();
        let phi_cnf = build(n, &[raw]);
        prop_assume!(phi_cnf.len() == 1 && !phi_cnf.has_empty_clause() && !models(&g).is_empty());
        let phi = phi_cnf.clauses()[0].clone();
        let gm = models(&g);
        let fm = models(&phi_cnf);
        for tag in FormalismTag::MODEL_BASED {
            match fast_update(&g, &phi, tag) {
                Ok(r) => {
                    let exact = update(&gm, &fm, tag.as_str());
                    prop_assert_eq!(models(&r.envelope), closure(&exact));
                    for c in &r.cores {
                        prop_assert!(is_maximal_closed_subset(&models(c), &exact));
                    }
                }
                Err(hornbound::Error::NeedsSemanticFallback) => {
                    prop_assert_eq!(tag, FormalismTag::Winslett);
                    prop_assert!(!gm.is_disjoint(&fm));
                }
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }

    #[test]
    fn maximal_subsets_match_oracle(
        (items, f) in (1..6usize).prop_flat_map(|n| (prop::collection::vec(horn_cnf(n, 3), 0..6), horn_cnf(n, 3)))
    ) {
        prop_assume!(!models(&f).is_empty());
        let u = f.universe().clone();
        let items: Vec<(String, Cnf)> = items
            .into_iter()
            .enumerate()
            .map(|(i, c)| (format!("g{i}"), Cnf::new(u.clone(), c.clauses().to_vec()).unwrap()))
            .collect();
        let kb = KnowledgeBase::new(u, items).unwrap();
        let got = maximal_consistent_subsets(&kb, &f, &Limits::default()).unwrap();
        prop_assert_eq!(got, common::maximal_subsets(&kb, &f));
    }

    #[test]
    fn sessions_round_trip(
        (g, steps) in (2..6usize).prop_flat_map(|n| (horn_cnf(n, 6), prop::collection::vec(horn_clause(n), 1..5)))
    ) {
        prop_assume!(!models(&g).is_empty());
        let n = g.num_vars();
        let mut state = BeliefState::init_horn(&g, FormalismTag::Winslett).unwrap();
        let config = RecompileConfig { core_mode: CoreMode::Greedy, ..RecompileConfig::default() };
        for raw in steps {
            let phi = build(n, &[raw]);
            if phi.is_empty() || phi.has_empty_clause() {
                continue;
            }
            let phi = Cnf::new(g.universe().clone(), phi.clauses().to_vec()).unwrap();
            state = state.step(&phi, &config).unwrap();
        }
        let text = state.to_json();
        let back = BeliefState::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(models(back.lower()), models(state.lower()));
    }

    #[test]
    fn transversals_are_minimal_hitting_sets(
        (n, edges) in (2..7usize).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::btree_set(1..=n, 2..=n), 0..6)))
    ) {
        let edges: Vec<Vec<usize>> = edges.into_iter().map(|e| e.into_iter().collect()).collect();
        let h = Hypergraph::new(n, edges.clone()).unwrap();
        let found = transversals(&h).unwrap();
        for t in &found {
            prop_assert!(common::hits_all(t, &edges));
            for i in 0..t.len() {
                let mut smaller = t.clone();
                smaller.remove(i);
                prop_assert!(!common::hits_all(&smaller, &edges));
            }
        }
        let got: BTreeSet<Vec<usize>> = found.into_iter().collect();
        prop_assert_eq!(got, common::transversals(n, &edges));
    }
}
