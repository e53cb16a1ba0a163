//! Seeded random instances and the property suites behind `hornbound verify`.
//!
//! Every suite checks a linear-time or incremental construction against the
//! exact model-set computation of the same object.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::change::{maximal_consistent_subsets, update_cnf, update_models, FormalismTag};
use crate::error::Result;
use crate::fastpath::fast_update;
use crate::formula::{Clause, Cnf, Universe, Var, VarUniverse};
use crate::hornsat::{self, HornOutcome};
use crate::recompile::{BeliefState, RecompileConfig};
use crate::reductions::{fuv_reduction, transversals, Hypergraph};
use crate::semantics::{
    and_closure, characteristic_models, enumerate_models, envelope_from_models, CoreMode, Limits,
    Model, ModelSet,
};

/// Largest universe the suites accept.
pub const MAX_VERIFY_VARS: usize = 12;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random Horn clause of one to three literals; never empty.
pub fn random_horn_clause(rng: &mut impl Rng, universe: &Universe) -> Clause {
    let n = universe.len();
    let mut vars: Vec<u32> = (0..n as u32).collect();
    vars.shuffle(rng);
    let len = rng.gen_range(1..=n.min(3));
    let with_head = rng.gen_bool(0.7);
    let lits = vars[..len].iter().enumerate().map(|(i, &v)| {
        if i == 0 && with_head {
            Var(v).positive()
        } else {
            Var(v).negative()
        }
    });
    Clause::new(lits).expect("distinct variables")
}

/// A satisfiable Horn formula with between one and `max_clauses` clauses.
pub fn random_horn_cnf(rng: &mut impl Rng, universe: &Universe, max_clauses: usize) -> Cnf {
    loop {
        let count = rng.gen_range(1..=max_clauses.max(1));
        let clauses = (0..count)
            .map(|_| random_horn_clause(rng, universe))
            .collect();
        let cnf = Cnf::new(universe.clone(), clauses).expect("in universe");
        if hornsat::is_satisfiable(&cnf).expect("Horn") {
            return cnf;
        }
    }
}

/// A Horn clause inconsistent with the satisfiable Horn formula `g`, or
/// `None` when `g` entails no literal.
pub fn inconsistent_clause(rng: &mut impl Rng, g: &Cnf) -> Option<Clause> {
    let least = match hornsat::horn_sat(g).ok()? {
        HornOutcome::Sat(m) => m,
        HornOutcome::Unsat => return None,
    };
    let mut forced_true: Vec<Var> = (0..g.num_vars() as u32)
        .map(Var)
        .filter(|v| least[v.index()])
        .collect();
    let forced_false: Vec<Var> = (0..g.num_vars() as u32)
        .map(Var)
        .filter(|v| {
            !least[v.index()] && hornsat::entails(g, &Clause::unit(v.negative())).expect("Horn")
        })
        .collect();
    if forced_true.is_empty() && forced_false.is_empty() {
        return None;
    }
    let head = if !forced_false.is_empty() && (forced_true.is_empty() || rng.gen_bool(0.7)) {
        forced_false.choose(rng).copied()
    } else {
        None
    };
    forced_true.shuffle(rng);
    let lo = usize::from(head.is_none());
    let take = rng.gen_range(lo..=forced_true.len().min(3).max(lo));
    let lits = forced_true[..take]
        .iter()
        .map(|v| v.negative())
        .chain(head.map(Var::positive));
    Some(Clause::new(lits).expect("distinct variables"))
}

/// A random Horn base together with an update clause inconsistent with it.
pub fn random_inconsistent_pair(
    rng: &mut impl Rng,
    universe: &Universe,
    max_clauses: usize,
) -> (Cnf, Clause) {
    loop {
        let g = random_horn_cnf(rng, universe, max_clauses);
        if let Some(phi) = inconsistent_clause(rng, &g) {
            return (g, phi);
        }
    }
}

pub fn random_model_set(rng: &mut impl Rng, universe: &Universe, max_size: usize) -> ModelSet {
    let width = universe.len();
    let size = rng.gen_range(1..=max_size.max(1));
    let models = (0..size).map(|_| Model::new(width, rng.gen::<u64>()));
    ModelSet::new(universe.clone(), models).expect("width matches")
}

pub fn random_hypergraph(rng: &mut impl Rng, n: usize, max_edges: usize) -> Hypergraph {
    let count = rng.gen_range(0..=max_edges);
    let mut edges = Vec::with_capacity(count);
    if n >= 2 {
        for _ in 0..count {
            let mut vs: Vec<usize> = (1..=n).collect();
            vs.shuffle(rng);
            let k = rng.gen_range(2..=n.min(4));
            edges.push(vs[..k].to_vec());
        }
    }
    Hypergraph::new(n, edges).expect("edges are valid")
}

/// Drop clauses of `g` one at a time while `fails` still holds.
pub fn minimize(g: &Cnf, fails: impl Fn(&Cnf) -> bool) -> Cnf {
    let mut cur = g.clone();
    let mut i = 0;
    while i < cur.len() {
        let mut clauses = cur.clauses().to_vec();
        clauses.remove(i);
        let smaller = Cnf::new(cur.universe().clone(), clauses).expect("same universe");
        if fails(&smaller) {
            cur = smaller;
        } else {
            i += 1;
        }
    }
    cur
}

/// Is `sub` a maximal AND-closed subset of `all`?
pub fn is_maximal_closed_subset(sub: &ModelSet, all: &ModelSet) -> bool {
    if !sub.is_and_closed() || !sub.is_subset(all) {
        return false;
    }
    all.difference(sub).iter().all(|m| {
        let grown = sub.union(&ModelSet::new(sub.universe().clone(), [m]).expect("width"));
        !and_closure(&grown).is_subset(all)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> SuiteReport {
        SuiteReport {
            name,
            trials: 0,
            failures: 0,
            counterexample: None,
        }
    }

    fn fail(&mut self, witness: impl FnOnce() -> String) {
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAIL" };
        write!(
            f,
            "{:<22} {:>6} trials {:>4} failures  {status}",
            self.name, self.trials, self.failures
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, "\n  counterexample: {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

fn universe(n: usize) -> Universe {
    VarUniverse::numbered("x", n.clamp(1, MAX_VERIFY_VARS)).expect("valid names")
}

/// Fast envelope and cores against the exact update, for every model-based
/// formalism.
pub fn fastpath_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng_from_seed(opts.seed);
    let u = universe(opts.n);
    let limits = Limits::default();
    let mut report = SuiteReport::new("fastpath-vs-semantic");
    for _ in 0..opts.trials {
        report.trials += 1;
        let (g, phi) = random_inconsistent_pair(&mut rng, &u, 15);
        for tag in FormalismTag::MODEL_BASED {
            let fails =
                |g: &Cnf| -> bool { fastpath_mismatch(g, &phi, tag, &limits).unwrap_or(false) };
            if fails(&g) {
                let small = minimize(&g, fails);
                report.fail(|| format!("{tag}: g = {small}, phi = {}", u.clause_to_string(&phi)));
                break;
            }
        }
    }
    Ok(report)
}

/// `Ok(true)` when the fast path disagrees with the exact update.
fn fastpath_mismatch(g: &Cnf, phi: &Clause, tag: FormalismTag, limits: &Limits) -> Result<bool> {
    let fast = match fast_update(g, phi, tag) {
        Ok(f) => f,
        Err(_) => return Ok(false),
    };
    let phi_cnf = Cnf::new(g.universe().clone(), vec![phi.clone()])?;
    let exact = update_cnf(g, &phi_cnf, tag, limits)?;
    if enumerate_models(&fast.envelope, limits)? != and_closure(&exact) {
        return Ok(true);
    }
    for core in &fast.cores {
        if !is_maximal_closed_subset(&enumerate_models(core, limits)?, &exact) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Closure idempotence, envelope models and characteristic models on random
/// model sets.
pub fn closure_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng_from_seed(opts.seed.wrapping_add(1));
    let u = universe(opts.n);
    let limits = Limits::default();
    let mut report = SuiteReport::new("closure");
    for _ in 0..opts.trials {
        report.trials += 1;
        let ms = random_model_set(&mut rng, &u, 8);
        let closed = and_closure(&ms);
        let env = envelope_from_models(&ms, &limits)?;
        let chars = characteristic_models(&closed)?;
        let ok = and_closure(&closed) == closed
            && closed.is_and_closed()
            && enumerate_models(&env, &limits)? == closed
            && chars.is_subset(&ms)
            && and_closure(&chars) == closed;
        if !ok {
            report.fail(|| format!("models {ms}"));
        }
    }
    Ok(report)
}

/// Transversal complements against the FUV maximal subsets.
pub fn bijection_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = rng_from_seed(opts.seed.wrapping_add(2));
    let limits = Limits::default();
    let n = opts.n.clamp(1, 7);
    let mut report = SuiteReport::new("transversal-bijection");
    for _ in 0..opts.trials {
        report.trials += 1;
        let h = random_hypergraph(&mut rng, n, 6);
        let (kb, f) = fuv_reduction(&h)?;
        let mut expected: Vec<Vec<usize>> = transversals(&h)?
            .iter()
            .map(|t| (0..n).filter(|i| !t.contains(&(i + 1))).collect())
            .collect();
        expected.sort();
        if maximal_consistent_subsets(&kb, &f, &limits)? != expected {
            report.fail(|| format!("hypergraph {:?} on {n} vertices", h.edges()));
        }
    }
    Ok(report)
}

/// Sessions of single-clause updates under Winslett's formalism:
/// `lower ⊨ exact ⊨ upper` after every step.
pub fn bracketing_suite(opts: &VerifyOptions, steps: usize) -> Result<SuiteReport> {
    let mut rng = rng_from_seed(opts.seed.wrapping_add(3));
    let u = universe(opts.n.min(8));
    let limits = Limits::default();
    let config = RecompileConfig {
        core_mode: CoreMode::Greedy,
        ..RecompileConfig::default()
    };
    let mut report = SuiteReport::new("bracketing");
    for _ in 0..opts.trials {
        report.trials += 1;
        let g = random_horn_cnf(&mut rng, &u, 6);
        let mut state = BeliefState::init_horn(&g, FormalismTag::Winslett)?;
        let mut exact = enumerate_models(&g, &limits)?;
        for step in 0..steps {
            let phi = Cnf::new(u.clone(), vec![random_horn_clause(&mut rng, &u)])?;
            exact = update_models(
                &exact,
                &enumerate_models(&phi, &limits)?,
                FormalismTag::Winslett,
            )?;
            state = state.step(&phi, &config)?;
            let lower = enumerate_models(state.lower(), &limits)?;
            let upper = enumerate_models(state.upper(), &limits)?;
            if !lower.is_subset(&exact) || !exact.is_subset(&upper) {
                report.fail(|| format!("g = {g}, broken at step {}", step + 1));
                break;
            }
        }
    }
    Ok(report)
}

/// A witness that `(A ∨ B) + phi` differs from `(A + phi) ∨ (B + phi)`.
#[derive(Debug, Clone)]
pub struct AdditivityWitness {
    pub a: ModelSet,
    pub b: ModelSet,
    pub phi: ModelSet,
    pub joint: ModelSet,
    pub split: ModelSet,
}

impl fmt::Display for AdditivityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A = {}, B = {}, phi = {}: (A|B)+phi = {} but (A+phi)|(B+phi) = {}",
            self.a, self.b, self.phi, self.joint, self.split
        )
    }
}

/// Random search for a failure of additivity; `None` if none was found.
pub fn find_non_additivity(
    tag: FormalismTag,
    opts: &VerifyOptions,
) -> Result<Option<AdditivityWitness>> {
    let mut rng = rng_from_seed(opts.seed.wrapping_add(4));
    let u = universe(opts.n.min(8));
    for _ in 0..opts.trials.max(1) * 20 {
        let a = random_model_set(&mut rng, &u, 3);
        let b = random_model_set(&mut rng, &u, 3);
        let phi = random_model_set(&mut rng, &u, 4);
        let joint = update_models(&a.union(&b), &phi, tag)?;
        let split = update_models(&a, &phi, tag)?.union(&update_models(&b, &phi, tag)?);
        if joint != split {
            return Ok(Some(AdditivityWitness {
                a,
                b,
                phi,
                joint,
                split,
            }));
        }
    }
    Ok(None)
}

/// Run the four standard suites.
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        fastpath_suite(opts)?,
        closure_suite(opts)?,
        bijection_suite(opts)?,
        bracketing_suite(opts, 20)?,
    ])
}
