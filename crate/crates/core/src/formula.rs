//! Variables, literals, clauses and CNF formulas.
//!
//! Everything here is an immutable value once built. A [`Cnf`] carries a
//! shared [`VarUniverse`]; an empty clause list denotes ⊤ and a formula
//! containing the empty clause denotes ⊥.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::Not;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered set of named propositional variables.
#[derive(Debug, Clone)]
pub struct VarUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

pub type Universe = Arc<VarUniverse>;

impl VarUniverse {
    pub fn new<I, S>(names: I) -> Result<Universe>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = VarUniverse {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in names {
            let name = name.into();
            if !valid_name(&name) {
                return Err(Error::InvalidName(name));
            }
            if out.index.contains_key(&name) {
                return Err(Error::DuplicateVariable(name));
            }
            out.index.insert(name.clone(), out.names.len());
            out.names.push(name);
        }
        if out.names.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        Ok(Arc::new(out))
    }

    /// Universe `{prefix}1 .. {prefix}n`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Universe> {
        Self::new((1..=n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, var: Var) -> &str {
        &self.names[var.index()]
    }

    pub fn var(&self, name: &str) -> Result<Var> {
        self.index
            .get(name)
            .map(|&i| Var(i as u32))
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.names.len() as u32).map(Var)
    }

    pub fn lit_to_string(&self, lit: Lit) -> String {
        if lit.is_positive() {
            self.name(lit.var()).to_string()
        } else {
            format!("-{}", self.name(lit.var()))
        }
    }

    /// Space-separated literal text; the empty clause prints as `()`.
    pub fn clause_to_string(&self, clause: &Clause) -> String {
        if clause.is_empty() {
            return "()".to_string();
        }
        clause
            .lits()
            .iter()
            .map(|&l| self.lit_to_string(l))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl PartialEq for VarUniverse {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for VarUniverse {}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('-')
        && name != "vars"
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '#' | '(' | ')' | ','))
}

pub(crate) fn same_universe(a: &Universe, b: &Universe) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn positive(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn negative(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A literal, ordered by variable and then positive before negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn is_negative(self) -> bool {
        !self.is_positive()
    }

    /// Truth value of the literal under a value for its variable.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// A disjunction of literals over distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Result<Clause> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var() == w[1].var()) {
            return Err(Error::TautologicalClause(format!("#{}", w[0].var().0)));
        }
        Ok(Clause { lits })
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause { lits: vec![lit] }
    }

    /// `a -> b` as the clause `-a b`.
    pub fn implication(a: Var, b: Var) -> Clause {
        Clause::new([a.negative(), b.positive()]).expect("implication between distinct variables")
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.lits.iter().filter(|l| l.is_positive()).count()
    }

    pub fn is_horn(&self) -> bool {
        self.positive_count() <= 1
    }

    pub fn is_negative(&self) -> bool {
        self.positive_count() == 0
    }

    /// The positive literal's variable of a Horn clause, if any.
    pub fn head(&self) -> Option<Var> {
        self.lits.iter().find(|l| l.is_positive()).map(|l| l.var())
    }

    /// Variables of the negative literals, in increasing order.
    pub fn body(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits
            .iter()
            .filter(|l| l.is_negative())
            .map(|l| l.var())
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// True if every literal of `self` occurs in `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.lits.iter();
        'outer: for l in &self.lits {
            for m in it.by_ref() {
                match m.cmp(l) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    /// One unit clause per literal, each with the sign flipped.
    pub fn negate(&self) -> Result<Vec<Clause>> {
        if self.is_empty() {
            return Err(Error::EmptyClause);
        }
        Ok(self.lits.iter().map(|&l| Clause::unit(!l)).collect())
    }

    pub fn max_var(&self) -> Option<Var> {
        self.lits.last().map(|l| l.var())
    }

    /// Evaluate under a total assignment given as a variable lookup.
    pub fn eval_with(&self, value: impl Fn(Var) -> bool) -> bool {
        self.lits.iter().any(|&l| l.eval(value(l.var())))
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lits
            .len()
            .cmp(&other.lits.len())
            .then_with(|| self.lits.cmp(&other.lits))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A conjunction of clauses over a variable universe.
#[derive(Debug, Clone)]
pub struct Cnf {
    universe: Universe,
    clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(universe: Universe, clauses: Vec<Clause>) -> Result<Cnf> {
        let n = universe.len();
        for c in &clauses {
            if let Some(v) = c.max_var() {
                if v.index() >= n {
                    return Err(Error::UnknownVariable(format!("#{}", v.0)));
                }
            }
        }
        Ok(Cnf { universe, clauses })
    }

    pub fn top(universe: Universe) -> Cnf {
        Cnf {
            universe,
            clauses: Vec::new(),
        }
    }

    pub fn bottom(universe: Universe) -> Cnf {
        Cnf {
            universe,
            clauses: vec![Clause::empty()],
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn num_vars(&self) -> usize {
        self.universe.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn is_horn(&self) -> bool {
        self.clauses.iter().all(Clause::is_horn)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn push(&mut self, clause: Clause) -> Result<()> {
        if let Some(v) = clause.max_var() {
            if v.index() >= self.num_vars() {
                return Err(Error::UnknownVariable(format!("#{}", v.0)));
            }
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn with_clause(&self, clause: Clause) -> Result<Cnf> {
        let mut out = self.clone();
        out.push(clause)?;
        Ok(out)
    }

    pub fn conjoin(&self, other: &Cnf) -> Result<Cnf> {
        if !same_universe(&self.universe, &other.universe) {
            return Err(Error::UniverseMismatch);
        }
        let mut clauses = Vec::with_capacity(self.len() + other.len());
        clauses.extend_from_slice(&self.clauses);
        clauses.extend_from_slice(&other.clauses);
        Ok(Cnf {
            universe: self.universe.clone(),
            clauses,
        })
    }

    /// Evaluate under a total assignment.
    pub fn eval_with(&self, value: impl Fn(Var) -> bool + Copy) -> bool {
        self.clauses.iter().all(|c| c.eval_with(value))
    }

    /// Clauses sorted by (width, literals), duplicates and subsumed clauses
    /// removed. A formula containing the empty clause collapses to ⊥.
    pub fn canonical(&self) -> Cnf {
        self.clone().into_canonical()
    }

    /// [`Cnf::canonical`], reusing the clauses.
    pub fn into_canonical(self) -> Cnf {
        if self.has_empty_clause() {
            return Cnf::bottom(self.universe);
        }
        let alphabet = 2 * self.num_vars();
        let order = sorted_order(&self.clauses, alphabet);
        let mut slots: Vec<Option<Clause>> = self.clauses.into_iter().map(Some).collect();

        // Kept clauses bucketed by their first literal: a subsuming clause
        // has its first literal inside the subsumed one. Duplicates count as
        // subsumed.
        let mut by_first: Vec<Vec<usize>> = vec![Vec::new(); alphabet];
        let mut kept: Vec<Clause> = Vec::with_capacity(order.len());
        for i in order {
            let c = slots[i].take().expect("each position appears once");
            let subsumed = c
                .lits()
                .iter()
                .any(|l| by_first[l.0 as usize].iter().any(|&k| kept[k].subsumes(&c)));
            if !subsumed {
                by_first[c.lits()[0].0 as usize].push(kept.len());
                kept.push(c);
            }
        }
        Cnf {
            universe: self.universe,
            clauses: kept,
        }
    }

    /// Substitute fixed values for some variables.
    ///
    /// Satisfied clauses are dropped and falsified literals deleted, so the
    /// result mentions none of the assigned variables.
    pub fn condition(&self, assignment: &[(Var, bool)]) -> Cnf {
        let mut value: Vec<Option<bool>> = vec![None; self.num_vars()];
        for &(v, b) in assignment {
            value[v.index()] = Some(b);
        }
        let mut clauses = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            let mut lits = Vec::with_capacity(c.len());
            let mut satisfied = false;
            for &l in c.lits() {
                match value[l.var().index()] {
                    Some(b) if l.eval(b) => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => lits.push(l),
                }
            }
            if !satisfied {
                clauses.push(Clause { lits });
            }
        }
        Cnf {
            universe: self.universe.clone(),
            clauses,
        }
    }

    /// File form: a `vars` header then one clause per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.universe.names().join(" "));
        for c in &self.clauses {
            out.push_str(&self.universe.clause_to_string(c));
            out.push('\n');
        }
        out
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars(), self.clauses.len());
        for c in &self.clauses {
            for l in c.lits() {
                let v = l.var().0 as i64 + 1;
                out.push_str(&format!("{} ", if l.is_positive() { v } else { -v }));
            }
            out.push_str("0\n");
        }
        out
    }

    /// Clauses as lists of literal strings, the session-file encoding.
    pub fn to_string_lists(&self) -> Vec<Vec<String>> {
        self.clauses
            .iter()
            .map(|c| {
                c.lits()
                    .iter()
                    .map(|&l| self.universe.lit_to_string(l))
                    .collect()
            })
            .collect()
    }

    pub fn from_string_lists(universe: Universe, lists: &[Vec<String>]) -> Result<Cnf> {
        let clauses = lists
            .iter()
            .map(|lits| parse_clause(&lits.join(" "), &universe))
            .collect::<Result<Vec<_>>>()?;
        Cnf::new(universe, clauses)
    }
}

/// One-line form: each clause parenthesized, `TRUE` for the empty formula.
impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "TRUE");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if c.is_empty() {
                write!(f, "()")?;
            } else {
                write!(f, "({})", self.universe.clause_to_string(c))?;
            }
        }
        Ok(())
    }
}
/// Positions of `clauses` in `Clause` order, in time linear in the number of
/// literals plus `alphabet`, the number of literal codes.
fn sorted_order(clauses: &[Clause], alphabet: usize) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let width = clauses.iter().map(Clause::len).max().unwrap_or(0);

    // Literal codes present at each position, ascending.
    let mut start = vec![0usize; alphabet + 1];
    for c in clauses {
        for l in &c.lits {
            start[l.0 as usize + 1] += 1;
        }
    }
    for k in 0..alphabet {
        start[k + 1] += start[k];
    }
    let mut fill = start.clone();
    let mut position = vec![0usize; start[alphabet]];
    for c in clauses {
        for (j, l) in c.lits.iter().enumerate() {
            position[fill[l.0 as usize]] = j;
            fill[l.0 as usize] += 1;
        }
    }
    let mut present: Vec<Vec<usize>> = vec![Vec::new(); width];
    for code in 0..alphabet {
        for &j in &position[start[code]..start[code + 1]] {
            if present[j].last() != Some(&code) {
                present[j].push(code);
            }
        }
    }

    let mut by_len: Vec<Vec<usize>> = vec![Vec::new(); width + 1];
    for (i, c) in clauses.iter().enumerate() {
        by_len[c.len()].push(i);
    }

    // Pass j orders the clauses longer than j by their literals from j on.
    let mut head = vec![NONE; alphabet];
    let mut tail = vec![NONE; alphabet];
    let mut next = vec![NONE; clauses.len()];
    let mut queue: Vec<usize> = Vec::new();
    for j in (0..width).rev() {
        let mut round = std::mem::take(&mut by_len[j + 1]);
        round.append(&mut queue);
        for &i in &round {
            let code = clauses[i].lits[j].0 as usize;
            if head[code] == NONE {
                head[code] = i;
            } else {
                next[tail[code]] = i;
            }
            tail[code] = i;
            next[i] = NONE;
        }
        for &code in &present[j] {
            let mut i = head[code];
            while i != NONE {
                queue.push(i);
                i = next[i];
            }
            head[code] = NONE;
        }
    }

    for &i in &queue {
        by_len[clauses[i].len()].push(i);
    }
    by_len.concat()
}

/// Parse whitespace-separated literals, `-` marking negation. `()` is the
/// empty clause.
pub fn parse_clause(text: &str, universe: &VarUniverse) -> Result<Clause> {
    let text = text.trim();
    if text == "()" {
        return Ok(Clause::empty());
    }
    let mut lits = Vec::new();
    for tok in text.split_whitespace() {
        let (name, positive) = match tok.strip_prefix('-') {
            Some(rest) => (rest, false),
            None => (tok, true),
        };
        lits.push(Lit::new(universe.var(name)?, positive));
    }
    Clause::new(lits.iter().copied()).map_err(|e| match e {
        Error::TautologicalClause(_) => {
            let mut sorted = lits.clone();
            sorted.sort_unstable();
            let var = sorted
                .windows(2)
                .find(|w| w[0].var() == w[1].var())
                .map(|w| universe.name(w[0].var()).to_string())
                .unwrap_or_default();
            Error::TautologicalClause(var)
        }
        other => other,
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parse a symbolic CNF file; the first non-comment line must be `vars ...`.
pub fn parse_cnf(text: &str) -> Result<Cnf> {
    let mut universe = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        match &universe {
            None => {
                let rest = line
                    .strip_prefix("vars")
                    .filter(|r| r.is_empty() || r.starts_with(char::is_whitespace));
                let Some(rest) = rest else {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "expected `vars` header".into(),
                    });
                };
                universe =
                    Some(
                        VarUniverse::new(rest.split_whitespace()).map_err(|e| Error::Parse {
                            line: i + 1,
                            msg: e.to_string(),
                        })?,
                    );
            }
            Some(u) => clauses.push(parse_clause(line, u).map_err(|e| at_line(e, i + 1))?),
        }
    }
    let universe = universe.ok_or(Error::Parse {
        line: 0,
        msg: "missing `vars` header".into(),
    })?;
    Cnf::new(universe, clauses)
}

/// Parse clause lines against an existing universe. A `vars` header is
/// allowed if every name it lists belongs to the universe.
pub fn parse_clauses(text: &str, universe: &Universe) -> Result<Cnf> {
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vars ") {
            for name in rest.split_whitespace() {
                universe.var(name).map_err(|e| at_line(e, i + 1))?;
            }
            continue;
        }
        clauses.push(parse_clause(line, universe).map_err(|e| at_line(e, i + 1))?);
    }
    Cnf::new(universe.clone(), clauses)
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line,
            msg: other.to_string(),
        },
    }
}

/// Parse DIMACS CNF; variable `i` is named `v<i>`.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: i + 1, msg };
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(perr("malformed `p cnf` header".into()));
            }
            let n = parts[2]
                .parse()
                .map_err(|_| perr("bad variable count".into()))?;
            let m = parts[3]
                .parse()
                .map_err(|_| perr("bad clause count".into()))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(perr("clause before `p cnf` header".into()));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| perr(format!("bad literal `{tok}`")))?;
            if v == 0 {
                clauses.push(Clause::new(current.drain(..)).map_err(|e| perr(e.to_string()))?);
            } else {
                let idx = v.unsigned_abs() as usize;
                if idx > n {
                    return Err(perr(format!("variable {idx} exceeds declared {n}")));
                }
                current.push(Lit::new(Var(idx as u32 - 1), v > 0));
            }
        }
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing `p cnf` header".into(),
    })?;
    if !current.is_empty() {
        clauses.push(Clause::new(current).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })?);
    }
    if clauses.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {m} clauses, found {}", clauses.len()),
        });
    }
    Cnf::new(VarUniverse::numbered("v", n.max(1))?, clauses)
}

/// Ordered, named collection of formulas for the syntactic formalisms.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    universe: Universe,
    items: Vec<(String, Cnf)>,
}

impl KnowledgeBase {
    pub fn new(universe: Universe, items: Vec<(String, Cnf)>) -> Result<KnowledgeBase> {
        let mut seen = std::collections::HashSet::new();
        for (name, f) in &items {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateItem(name.clone()));
            }
            if !same_universe(&universe, f.universe()) {
                return Err(Error::UniverseMismatch);
            }
        }
        Ok(KnowledgeBase { universe, items })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn items(&self) -> &[(String, Cnf)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.items.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.items.iter().any(|(n, _)| n == name)
    }

    /// Conjunction of all items.
    pub fn conjunction(&self) -> Cnf {
        let clauses = self
            .items
            .iter()
            .flat_map(|(_, f)| f.clauses().iter().cloned())
            .collect();
        Cnf {
            universe: self.universe.clone(),
            clauses,
        }
    }
}
