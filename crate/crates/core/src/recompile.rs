//! Incremental recompilation: a knowledge base held as a pair of Horn bounds.
//!
//! Each update replaces the upper bound by the envelope of its update and the
//! lower bound by a core of its update. Single Horn clause updates use
//! [`crate::fastpath`]; everything else goes through exact model sets.
//!
//! `lower ⊨ upper` is tracked but not enforced: under the formalisms that
//! special-case a consistent update it can fail, and queries then report
//! [`QueryVerdict::ContradictoryBounds`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::change::{update_cnf, FormalismTag};
use crate::error::{Error, Result};
use crate::fastpath::{fast_update, fast_update_pick, CoreTieBreak};
use crate::formula::{same_universe, Clause, Cnf, Universe, VarUniverse};
use crate::hornsat;
use crate::semantics::{
    enumerate_models, envelope_from_models, maximal_closed_subsets, CoreMode, Limits,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecompileConfig {
    pub limits: Limits,
    /// Core selection on the semantic path; `AllExact` behaves as `ExactMax`.
    pub core_mode: CoreMode,
    pub pick: CoreTieBreak,
    /// When false, updates the fast path cannot handle are errors.
    pub allow_fallback: bool,
}

impl Default for RecompileConfig {
    fn default() -> Self {
        RecompileConfig {
            limits: Limits::default(),
            core_mode: CoreMode::ExactMax,
            pick: CoreTieBreak::First,
            allow_fallback: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdatePath {
    Fast,
    Semantic,
}

impl fmt::Display for UpdatePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdatePath::Fast => "fast",
            UpdatePath::Semantic => "semantic",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub phi: Cnf,
    pub path: UpdatePath,
    /// 1-based core position used for the lower bound.
    pub core_pick: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryVerdict {
    Yes,
    No,
    Unknown,
    ContradictoryBounds,
}

impl fmt::Display for QueryVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryVerdict::Yes => "Yes",
            QueryVerdict::No => "No",
            QueryVerdict::Unknown => "Unknown",
            QueryVerdict::ContradictoryBounds => "ContradictoryBounds",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BeliefState {
    universe: Universe,
    lower: Cnf,
    upper: Cnf,
    formalism: FormalismTag,
    log: Vec<StepRecord>,
}

impl BeliefState {
    /// Start from a satisfiable Horn formula: both bounds equal it.
    pub fn init_horn(g: &Cnf, formalism: FormalismTag) -> Result<BeliefState> {
        formalism.require_model_based()?;
        if !g.is_horn() {
            return Err(Error::NotHorn);
        }
        if !hornsat::is_satisfiable(g)? {
            return Err(Error::UnsatisfiableBase);
        }
        let c = g.canonical();
        Ok(BeliefState {
            universe: g.universe().clone(),
            lower: c.clone(),
            upper: c,
            formalism,
            log: Vec::new(),
        })
    }

    /// Start from an arbitrary satisfiable formula by computing its envelope
    /// and one core from its models.
    pub fn init_compile(
        g: &Cnf,
        formalism: FormalismTag,
        config: &RecompileConfig,
    ) -> Result<BeliefState> {
        formalism.require_model_based()?;
        let models = enumerate_models(g, &config.limits)?;
        if models.is_empty() {
            return Err(Error::UnsatisfiableBase);
        }
        let upper = envelope_from_models(&models, &config.limits)?;
        let lower = best_core(&models, config)?;
        Ok(BeliefState {
            universe: g.universe().clone(),
            lower,
            upper,
            formalism,
            log: Vec::new(),
        })
    }

    /// Assemble a state from explicit bounds.
    pub fn from_bounds(lower: Cnf, upper: Cnf, formalism: FormalismTag) -> Result<BeliefState> {
        formalism.require_model_based()?;
        if !same_universe(lower.universe(), upper.universe()) {
            return Err(Error::UniverseMismatch);
        }
        for b in [&lower, &upper] {
            if !b.is_horn() {
                return Err(Error::NotHorn);
            }
            if !hornsat::is_satisfiable(b)? {
                return Err(Error::UnsatisfiableBase);
            }
        }
        Ok(BeliefState {
            universe: lower.universe().clone(),
            lower,
            upper,
            formalism,
            log: Vec::new(),
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn lower(&self) -> &Cnf {
        &self.lower
    }

    pub fn upper(&self) -> &Cnf {
        &self.upper
    }

    pub fn formalism(&self) -> FormalismTag {
        self.formalism
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    pub fn with_formalism(mut self, formalism: FormalismTag) -> Result<BeliefState> {
        formalism.require_model_based()?;
        self.formalism = formalism;
        Ok(self)
    }

    /// Apply one update to both bounds, returning the new state.
    pub fn step(&self, phi: &Cnf, config: &RecompileConfig) -> Result<BeliefState> {
        if !same_universe(&self.universe, phi.universe()) {
            return Err(Error::UniverseMismatch);
        }
        let single = match phi.clauses() {
            [c] if c.is_horn() => Some(c),
            _ => None,
        };
        if phi.has_empty_clause() {
            return Err(Error::UnsatisfiableUpdate);
        }
        let tag = self.formalism;

        let mut path = UpdatePath::Fast;
        let mut core_pick = 1;
        let upper = match single.map(|c| fast_update(&self.upper, c, tag)) {
            Some(Ok(r)) => r.envelope,
            Some(Err(Error::NeedsSemanticFallback)) | None => {
                self.fallback_allowed(config)?;
                path = UpdatePath::Semantic;
                let models = update_cnf(&self.upper, phi, tag, &config.limits)?;
                envelope_from_models(&models, &config.limits)?
            }
            Some(Err(e)) => return Err(e),
        };
        let lower = match single.map(|c| fast_update_pick(&self.lower, c, tag, config.pick)) {
            Some(Ok((_, core))) => {
                core_pick = config.pick.position();
                core
            }
            Some(Err(Error::NeedsSemanticFallback)) | None => {
                self.fallback_allowed(config)?;
                path = UpdatePath::Semantic;
                let models = update_cnf(&self.lower, phi, tag, &config.limits)?;
                best_core(&models, config)?
            }
            Some(Err(e)) => return Err(e),
        };
        debug_assert!(lower.is_horn() && upper.is_horn());

        let mut log = self.log.clone();
        log.push(StepRecord {
            phi: phi.clone(),
            path,
            core_pick,
        });
        Ok(BeliefState {
            universe: self.universe.clone(),
            lower,
            upper,
            formalism: tag,
            log,
        })
    }

    fn fallback_allowed(&self, config: &RecompileConfig) -> Result<()> {
        if config.allow_fallback {
            Ok(())
        } else {
            Err(Error::NeedsSemanticFallback)
        }
    }

    /// Three-valued answer from the two bounds, each checked in linear time.
    pub fn query(&self, psi: &Clause) -> Result<QueryVerdict> {
        let upper = hornsat::entails(&self.upper, psi)?;
        let lower = hornsat::entails(&self.lower, psi)?;
        Ok(match (upper, lower) {
            (true, true) => QueryVerdict::Yes,
            (false, false) => QueryVerdict::No,
            (false, true) => QueryVerdict::Unknown,
            (true, false) => QueryVerdict::ContradictoryBounds,
        })
    }

    /// Does the lower bound still imply the upper bound?
    pub fn check_bracket(&self) -> bool {
        hornsat::entails_cnf(&self.lower, &self.upper).expect("bounds are Horn")
    }

    /// Number of models of the upper bound that the lower bound lacks.
    pub fn gap_size(&self, limits: &Limits) -> Result<usize> {
        let up = enumerate_models(&self.upper, limits)?;
        let low = enumerate_models(&self.lower, limits)?;
        Ok(up.difference(&low).len())
    }

    pub fn to_json(&self) -> String {
        let file = SessionFile {
            vars: self.universe.names().to_vec(),
            formalism: self.formalism,
            lower: self.lower.canonical().to_string_lists(),
            upper: self.upper.canonical().to_string_lists(),
            log: self
                .log
                .iter()
                .map(|r| LogEntry {
                    phi: r.phi.to_string_lists(),
                    path: r.path,
                    core_pick: r.core_pick,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("session serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<BeliefState> {
        let file: SessionFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        let universe = VarUniverse::new(file.vars)?;
        let lower = Cnf::from_string_lists(universe.clone(), &file.lower)?;
        let upper = Cnf::from_string_lists(universe.clone(), &file.upper)?;
        let mut state = BeliefState::from_bounds(lower, upper, file.formalism)?;
        state.log = file
            .log
            .iter()
            .map(|e| {
                Ok(StepRecord {
                    phi: Cnf::from_string_lists(universe.clone(), &e.phi)?,
                    path: e.path,
                    core_pick: e.core_pick,
                })
            })
            .collect::<Result<_>>()?;
        Ok(state)
    }
}

fn best_core(models: &crate::semantics::ModelSet, config: &RecompileConfig) -> Result<Cnf> {
    let mode = match config.core_mode {
        CoreMode::Greedy => CoreMode::Greedy,
        CoreMode::ExactMax | CoreMode::AllExact => CoreMode::ExactMax,
    };
    let subsets = maximal_closed_subsets(models, mode, &config.limits)?;
    envelope_from_models(&subsets[0], &config.limits)
}

#[derive(Debug, Serialize, Deserialize)]
struct SessionFile {
    vars: Vec<String>,
    formalism: FormalismTag,
    lower: Vec<Vec<String>>,
    upper: Vec<Vec<String>>,
    log: Vec<LogEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LogEntry {
    phi: Vec<Vec<String>>,
    path: UpdatePath,
    core_pick: usize,
}
