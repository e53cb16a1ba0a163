//! Exact model-set semantics for small universes.
//!
//! Models are total assignments packed into a `u64`, variable 0 in the most
//! significant used bit, so numeric order equals the order of the printed bit
//! strings. All routines here are exponential in the universe size and are
//! guarded by [`Limits`].

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Clause, Cnf, Lit, Universe, Var};

/// Size guards for the exponential routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest universe whose models may be enumerated.
    pub enumeration_vars: usize,
    /// Largest universe for Horn envelope extraction.
    pub envelope_vars: usize,
    /// Largest model set searched exhaustively for cores.
    pub core_models: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_vars: 20,
            envelope_vars: 12,
            core_models: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Model {
    bits: u64,
    width: u8,
}

impl Model {
    pub fn new(width: usize, bits: u64) -> Model {
        assert!(width <= 64);
        let mask = full_mask(width);
        Model {
            bits: bits & mask,
            width: width as u8,
        }
    }

    pub fn from_values(values: &[bool]) -> Model {
        let width = values.len();
        let mut bits = 0;
        for (i, &b) in values.iter().enumerate() {
            if b {
                bits |= 1 << (width - 1 - i);
            }
        }
        Model::new(width, bits)
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn get(self, var: Var) -> bool {
        self.bits & var_mask(self.width(), var) != 0
    }

    pub fn with(self, var: Var, value: bool) -> Model {
        let m = var_mask(self.width(), var);
        Model {
            bits: if value { self.bits | m } else { self.bits & !m },
            width: self.width,
        }
    }

    pub fn popcount(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn and(self, other: Model) -> Model {
        Model {
            bits: self.bits & other.bits,
            width: self.width,
        }
    }

    /// Bits where the two models differ.
    pub fn diff(self, other: Model) -> u64 {
        self.bits ^ other.bits
    }

    pub fn hamming(self, other: Model) -> u32 {
        self.diff(other).count_ones()
    }

    pub fn satisfies(self, clause: &Clause) -> bool {
        clause.lits().iter().any(|&l| l.eval(self.get(l.var())))
    }

    pub fn parse(text: &str) -> Result<Model> {
        let text = text.trim();
        if text.is_empty() || text.len() > 64 {
            return Err(Error::Parse {
                line: 0,
                msg: format!("bad model `{text}`"),
            });
        }
        let mut values = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => values.push(false),
                '1' => values.push(true),
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("bad model `{text}`"),
                    })
                }
            }
        }
        Ok(Model::from_values(&values))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            let b = self.bits >> (self.width() - 1 - i) & 1;
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

fn full_mask(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub(crate) fn var_mask(width: usize, var: Var) -> u64 {
    1u64 << (width - 1 - var.index())
}

/// A canonically ordered, duplicate-free set of models over one universe.
#[derive(Debug, Clone)]
pub struct ModelSet {
    universe: Universe,
    models: Vec<Model>,
}

impl PartialEq for ModelSet {
    fn eq(&self, other: &Self) -> bool {
        self.models == other.models && *self.universe == *other.universe
    }
}

impl Eq for ModelSet {}

impl ModelSet {
    pub fn new<I: IntoIterator<Item = Model>>(universe: Universe, models: I) -> Result<ModelSet> {
        let width = universe.len();
        if width > 64 {
            return Err(Error::UniverseTooLarge {
                vars: width,
                limit: 64,
            });
        }
        let mut models: Vec<Model> = models.into_iter().collect();
        if let Some(m) = models.iter().find(|m| m.width() != width) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("model `{m}` has width {}, expected {width}", m.width()),
            });
        }
        models.sort_unstable();
        models.dedup();
        Ok(ModelSet { universe, models })
    }

    fn from_bits(universe: Universe, mut bits: Vec<u64>) -> ModelSet {
        let width = universe.len();
        bits.sort_unstable();
        bits.dedup();
        let models = bits.into_iter().map(|b| Model::new(width, b)).collect();
        ModelSet { universe, models }
    }

    pub fn empty(universe: Universe) -> ModelSet {
        ModelSet {
            universe,
            models: Vec::new(),
        }
    }

    /// Parse bit strings; the slice form is convenient in tests.
    pub fn from_strs(universe: Universe, models: &[&str]) -> Result<ModelSet> {
        let ms = models
            .iter()
            .map(|s| Model::parse(s))
            .collect::<Result<Vec<_>>>()?;
        ModelSet::new(universe, ms)
    }

    /// One model per line, `#` comments allowed.
    pub fn parse_lines(universe: Universe, text: &str) -> Result<ModelSet> {
        let mut ms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            ms.push(Model::parse(line).map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad model `{line}`"),
            })?);
        }
        ModelSet::new(universe, ms)
    }

    pub fn to_text(&self) -> String {
        self.models.iter().map(|m| format!("{m}\n")).collect()
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn width(&self) -> usize {
        self.universe.len()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn iter(&self) -> impl Iterator<Item = Model> + '_ {
        self.models.iter().copied()
    }

    pub fn contains(&self, m: Model) -> bool {
        self.models.binary_search(&m).is_ok()
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.models.iter().all(|&m| other.contains(m))
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        let mut models = self.models.clone();
        models.extend_from_slice(&other.models);
        models.sort_unstable();
        models.dedup();
        ModelSet {
            universe: self.universe.clone(),
            models,
        }
    }

    pub fn intersection(&self, other: &ModelSet) -> ModelSet {
        let models = self
            .models
            .iter()
            .copied()
            .filter(|&m| other.contains(m))
            .collect();
        ModelSet {
            universe: self.universe.clone(),
            models,
        }
    }

    pub fn difference(&self, other: &ModelSet) -> ModelSet {
        let models = self
            .models
            .iter()
            .copied()
            .filter(|&m| !other.contains(m))
            .collect();
        ModelSet {
            universe: self.universe.clone(),
            models,
        }
    }

    pub fn is_and_closed(&self) -> bool {
        let set = BitsSet::from_bits(self.width(), self.models.iter().map(|m| m.bits));
        self.models.iter().enumerate().all(|(i, a)| {
            self.models[i + 1..]
                .iter()
                .all(|b| set.contains(a.bits & b.bits))
        })
    }

    fn bits(&self) -> Vec<u64> {
        self.models.iter().map(|m| m.bits).collect()
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.models.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// Set of packed models: a bitmap for narrow universes, hashed otherwise.
enum BitsSet {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl BitsSet {
    fn new(width: usize) -> BitsSet {
        if width <= 16 {
            BitsSet::Dense(vec![0; (1usize << width).div_ceil(64)])
        } else {
            BitsSet::Sparse(HashSet::new())
        }
    }

    fn from_bits(width: usize, bits: impl IntoIterator<Item = u64>) -> BitsSet {
        let mut set = BitsSet::new(width);
        for b in bits {
            set.insert(b);
        }
        set
    }

    fn insert(&mut self, b: u64) -> bool {
        match self {
            BitsSet::Dense(words) => {
                let (w, bit) = ((b >> 6) as usize, 1u64 << (b & 63));
                let fresh = words[w] & bit == 0;
                words[w] |= bit;
                fresh
            }
            BitsSet::Sparse(set) => set.insert(b),
        }
    }

    fn contains(&self, b: u64) -> bool {
        match self {
            BitsSet::Dense(words) => words[(b >> 6) as usize] & 1 << (b & 63) != 0,
            BitsSet::Sparse(set) => set.contains(&b),
        }
    }
}

fn check_vars(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::UniverseTooLarge { vars: n, limit })
    } else {
        Ok(())
    }
}

/// Positive and negative literal masks of a clause in model coordinates.
fn clause_masks(width: usize, clause: &Clause) -> (u64, u64) {
    let mut pos = 0;
    let mut neg = 0;
    for l in clause.lits() {
        let m = var_mask(width, l.var());
        if l.is_positive() {
            pos |= m;
        } else {
            neg |= m;
        }
    }
    (pos, neg)
}

fn satisfies_masks(bits: u64, masks: &[(u64, u64)]) -> bool {
    masks
        .iter()
        .all(|&(pos, neg)| bits & pos != 0 || !bits & neg != 0)
}

pub fn enumerate_models(cnf: &Cnf, limits: &Limits) -> Result<ModelSet> {
    let n = cnf.num_vars();
    check_vars(n, limits.enumeration_vars.min(63))?;
    let masks: Vec<(u64, u64)> = cnf.clauses().iter().map(|c| clause_masks(n, c)).collect();
    let bits = (0..1u64 << n)
        .filter(|&b| satisfies_masks(b, &masks))
        .collect();
    Ok(ModelSet::from_bits(cnf.universe().clone(), bits))
}

/// Smallest superset closed under componentwise AND.
pub fn and_closure(ms: &ModelSet) -> ModelSet {
    // Adding m to a closed S: S ∪ {m} ∪ {m & s | s ∈ S} is again closed.
    let mut seen = BitsSet::new(ms.width());
    let mut list: Vec<u64> = Vec::with_capacity(ms.len() * 2);
    for m in ms.iter() {
        if !seen.insert(m.bits) {
            continue;
        }
        let before = list.len();
        list.push(m.bits);
        for j in 0..before {
            let a = list[j] & m.bits;
            if seen.insert(a) {
                list.push(a);
            }
        }
    }
    ModelSet::from_bits(ms.universe.clone(), list)
}

/// Exactly the AND-closed sets are the model sets of Horn formulas; the
/// empty set is represented by ⊥.
pub fn is_horn_representable(ms: &ModelSet) -> bool {
    ms.is_and_closed()
}

/// An irredundant Horn CNF whose models are exactly `and_closure(ms)`.
///
/// Candidate Horn clauses are scanned in increasing width and kept when they
/// cut the current model set; the scan stops once that set equals the
/// closure.
pub fn envelope_from_models(ms: &ModelSet, limits: &Limits) -> Result<Cnf> {
    let n = ms.width();
    check_vars(n, limits.envelope_vars.min(limits.enumeration_vars).min(63))?;
    let universe = ms.universe.clone();
    if ms.is_empty() {
        return Ok(Cnf::bottom(universe));
    }
    let target = and_closure(ms).len();
    let mut current: Vec<u64> = (0..1u64 << n).collect();
    let mut kept: Vec<Clause> = Vec::new();
    if current.len() == target {
        return Ok(Cnf::top(universe));
    }

    let models = ms.bits();
    let vars: Vec<Var> = universe.vars().collect();
    // AND of the models that contain every variable of `body` (None if no
    // model does).
    let meet_above = |body: u64| -> Option<u64> {
        models
            .iter()
            .filter(|&&m| m & body == body)
            .fold(None, |acc, &m| Some(acc.map_or(m, |a| a & m)))
    };

    'widths: for width in 0..=n {
        let mut candidates: Vec<Clause> = Vec::new();
        for_each_subset(n, width, |body_vars| {
            let body = body_vars.iter().fold(0, |b, &i| b | var_mask(n, vars[i]));
            if meet_above(body).is_none() {
                candidates.push(horn_clause(&vars, body_vars, None));
            }
        });
        if width > 0 {
            for_each_subset(n, width - 1, |body_vars| {
                let body = body_vars.iter().fold(0, |b, &i| b | var_mask(n, vars[i]));
                if let Some(meet) = meet_above(body) {
                    for h in 0..n {
                        if !body_vars.contains(&h) && meet & var_mask(n, vars[h]) != 0 {
                            candidates.push(horn_clause(&vars, body_vars, Some(h)));
                        }
                    }
                }
            });
        }
        candidates.sort_unstable();
        for c in candidates {
            if kept.iter().any(|k| k.subsumes(&c)) {
                continue;
            }
            let masks = [clause_masks(n, &c)];
            let filtered: Vec<u64> = current
                .iter()
                .copied()
                .filter(|&b| satisfies_masks(b, &masks))
                .collect();
            if filtered.len() < current.len() {
                current = filtered;
                kept.push(c);
                if current.len() == target {
                    break 'widths;
                }
            }
        }
    }
    debug_assert_eq!(current.len(), target);

    // Drop clauses implied by the rest, widest first.
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let masks: Vec<(u64, u64)> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, c)| clause_masks(n, c))
            .collect();
        let count = (0..1u64 << n)
            .filter(|&b| satisfies_masks(b, &masks))
            .count();
        if count == target {
            kept.remove(i);
        }
    }
    kept.sort_unstable();
    Cnf::new(universe, kept)
}

fn horn_clause(vars: &[Var], body: &[usize], head: Option<usize>) -> Clause {
    let lits = body
        .iter()
        .map(|&i| vars[i].negative())
        .chain(head.map(|h| vars[h].positive()));
    Clause::new(lits).expect("body and head are distinct")
}

/// Visit every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoreMode {
    /// One maximal closed subset with the most models.
    #[default]
    ExactMax,
    /// One maximal closed subset grown greedily; no size limit.
    Greedy,
    /// Every maximal closed subset.
    AllExact,
}

/// Maximal AND-closed subsets of `ms`, the model sets of its Horn cores.
///
/// `ExactMax` breaks ties by the canonical order of the model lists.
/// `AllExact` output is ordered by decreasing size, then canonically.
pub fn maximal_closed_subsets(
    ms: &ModelSet,
    mode: CoreMode,
    limits: &Limits,
) -> Result<Vec<ModelSet>> {
    if ms.is_and_closed() {
        return Ok(vec![ms.clone()]);
    }
    let bits = ms.bits();
    let subsets: Vec<Vec<u64>> = match mode {
        CoreMode::Greedy => vec![greedy_closed_subset(ms.width(), &bits)],
        CoreMode::ExactMax | CoreMode::AllExact => {
            if bits.len() > limits.core_models {
                return Err(Error::SetTooLarge {
                    size: bits.len(),
                    limit: limits.core_models,
                });
            }
            let mut all = all_maximal_closed(&bits);
            all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            if mode == CoreMode::ExactMax {
                all.truncate(1);
            }
            all
        }
    };
    Ok(subsets
        .into_iter()
        .map(|s| ModelSet::from_bits(ms.universe.clone(), s))
        .collect())
}

/// Horn cores as formulas, one per maximal closed subset.
pub fn cores_from_models(ms: &ModelSet, mode: CoreMode, limits: &Limits) -> Result<Vec<Cnf>> {
    check_vars(ms.width(), limits.envelope_vars.min(63))?;
    maximal_closed_subsets(ms, mode, limits)?
        .iter()
        .map(|s| envelope_from_models(s, limits))
        .collect()
}

fn greedy_closed_subset(width: usize, bits: &[u64]) -> Vec<u64> {
    let members = BitsSet::from_bits(width, bits.iter().copied());
    let mut order = bits.to_vec();
    order.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
    let mut chosen: Vec<u64> = Vec::new();
    let mut chosen_set = BitsSet::new(width);
    for m in order {
        if chosen_set.contains(m) {
            continue;
        }
        let mut added = vec![m];
        let fits = chosen.iter().all(|&s| {
            let a = s & m;
            if !members.contains(a) {
                return false;
            }
            if !chosen_set.contains(a) && a != m {
                added.push(a);
            }
            true
        });
        if fits {
            for a in added {
                if chosen_set.insert(a) {
                    chosen.push(a);
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// All maximal closed subsets by include/exclude search over the (≤ 32)
/// members, using bitmasks over member indices.
fn all_maximal_closed(bits: &[u64]) -> Vec<Vec<u64>> {
    let index: HashMap<u64, usize> = bits.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let len = bits.len();
    assert!(len <= 32);

    // Closure of S ∪ {i} for closed S, as a mask, or None if it leaves the set.
    let extend = |s: u32, i: usize| -> Option<u32> {
        let mut out = s | 1 << i;
        let mut rest = s;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << *index.get(&(bits[j] & bits[i]))?;
        }
        Some(out)
    };

    let mut found = Vec::new();
    let mut stack: Vec<(usize, u32, u32)> = vec![(0, 0, 0)];
    while let Some((pos, s, excluded)) = stack.pop() {
        let mut pos = pos;
        while pos < len && s & 1 << pos != 0 {
            pos += 1;
        }
        if pos == len {
            let maximal = (0..len)
                .filter(|&j| s & 1 << j == 0)
                .all(|j| extend(s, j).is_none());
            if maximal {
                found.push(s);
            }
            continue;
        }
        stack.push((pos + 1, s, excluded | 1 << pos));
        if let Some(t) = extend(s, pos) {
            if t & excluded == 0 {
                stack.push((pos + 1, t, excluded));
            }
        }
    }
    found
        .into_iter()
        .map(|s| {
            let mut v: Vec<u64> = (0..len)
                .filter(|&j| s & 1 << j != 0)
                .map(|j| bits[j])
                .collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// The members of a closed set that are not the AND of other members.
pub fn characteristic_models(ms: &ModelSet) -> Result<ModelSet> {
    if !ms.is_and_closed() {
        return Err(Error::NotClosed);
    }
    let bits = ms.bits();
    let chars = bits
        .iter()
        .copied()
        .filter(|&m| {
            // m is generated by others iff the AND of its strict supersets is m.
            let meet = bits
                .iter()
                .filter(|&&o| o != m && o & m == m)
                .fold(None, |acc: Option<u64>, &o| Some(acc.map_or(o, |a| a & o)));
            meet != Some(m)
        })
        .collect();
    Ok(ModelSet::from_bits(ms.universe.clone(), chars))
}

/// The conjunction of unit clauses fixing every variable to the model's value.
pub fn model_to_cnf(universe: &Universe, m: Model) -> Cnf {
    let clauses = universe
        .vars()
        .map(|v| Clause::unit(Lit::new(v, m.get(v))))
        .collect();
    Cnf::new(universe.clone(), clauses).expect("variables in range")
}
