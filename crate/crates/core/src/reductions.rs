//! Hypergraph transversals and the reductions that show the hardness of
//! the syntactic formalisms and of intersecting characteristic models.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::formula::{Clause, Cnf, KnowledgeBase, Var, VarUniverse};
use crate::semantics::{and_closure, Model, ModelSet};

/// Largest vertex count for transversal enumeration and the FUV reduction.
pub const MAX_VERTICES: usize = 20;
/// Largest source variable count for the PURE3SAT reduction.
pub const MAX_PURE_VARS: usize = 8;
/// Largest `n + s` for the node cover reduction.
pub const MAX_COVER_WIDTH: usize = 20;

/// Vertices are numbered `1..=n`; each edge is sorted and has at least two
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Hypergraph> {
        let mut out = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 {
                return Err(Error::InvalidGraph(format!(
                    "edge {e:?} has fewer than two vertices"
                )));
            }
            if let Some(&v) = e.iter().find(|&&v| v == 0 || v > n) {
                return Err(Error::InvalidGraph(format!("vertex {v} outside 1..={n}")));
            }
            out.push(e);
        }
        Ok(Hypergraph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn parse(text: &str) -> Result<Hypergraph> {
        let (n, edges) = parse_edge_file(text)?;
        Hypergraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        edge_file(self.n, self.edges.iter().map(|e| e.as_slice()))
    }

    fn edge_masks(&self) -> Vec<u32> {
        self.edges
            .iter()
            .map(|e| e.iter().fold(0u32, |m, &v| m | 1 << (v - 1)))
            .collect()
    }
}

/// Simple undirected graph on nodes `1..=n`; edges keep their input order,
/// which fixes their positions in the node cover reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(Error::InvalidGraph(format!("node {v} outside 1..={n}")));
                }
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!(
                    "repeated edge {} {}",
                    e.0, e.1
                )));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn parse(text: &str) -> Result<Graph> {
        let (n, edges) = parse_edge_file(text)?;
        let mut pairs = Vec::with_capacity(edges.len());
        for e in edges {
            match e[..] {
                [a, b] => pairs.push((a, b)),
                _ => {
                    return Err(Error::InvalidGraph(format!(
                        "graph edge needs two nodes, got {e:?}"
                    )))
                }
            }
        }
        Graph::new(n, pairs)
    }

    pub fn to_text(&self) -> String {
        let pairs: Vec<[usize; 2]> = self.edges.iter().map(|&(a, b)| [a, b]).collect();
        edge_file(self.n, pairs.iter().map(|p| p.as_slice()))
    }
}

fn parse_edge_file(text: &str) -> Result<(usize, Vec<Vec<usize>>)> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        if n.is_none() {
            match nums[..] {
                [count] => n = Some(count),
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "first line must hold the vertex count".into(),
                    })
                }
            }
        } else {
            edges.push(nums);
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 1,
        msg: "missing vertex count".into(),
    })?;
    Ok((n, edges))
}

fn edge_file<'a>(n: usize, edges: impl Iterator<Item = &'a [usize]>) -> String {
    let mut out = format!("{n}\n");
    for e in edges {
        let parts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

/// Every inclusion-minimal vertex set meeting all edges, ordered by size and
/// then lexicographically.
pub fn transversals(h: &Hypergraph) -> Result<Vec<Vec<usize>>> {
    if h.n > MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "{} vertices, limit {MAX_VERTICES}",
            h.n
        )));
    }
    let edges = h.edge_masks();
    let mut found: Vec<u32> = Vec::new();
    let mut out = Vec::new();
    for k in 0..=h.n {
        crate::semantics::for_each_subset(h.n, k, |pick| {
            let mask = pick.iter().fold(0u32, |m, &v| m | 1 << v);
            if found.iter().any(|&t| t & !mask == 0) {
                return;
            }
            if edges.iter().all(|&e| e & mask != 0) {
                found.push(mask);
                out.push(pick.iter().map(|&v| v + 1).collect());
            }
        });
    }
    Ok(out)
}

/// Items `g_i = x_i` and one negative clause per edge.
pub fn fuv_reduction(h: &Hypergraph) -> Result<(KnowledgeBase, Cnf)> {
    if h.n > MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "{} vertices, limit {MAX_VERTICES}",
            h.n
        )));
    }
    let universe = VarUniverse::numbered("x", h.n)?;
    let items = (0..h.n)
        .map(|i| {
            let unit = Cnf::new(
                universe.clone(),
                vec![Clause::unit(Var(i as u32).positive())],
            );
            Ok((format!("g{}", i + 1), unit?))
        })
        .collect::<Result<Vec<_>>>()?;
    let clauses = h
        .edges
        .iter()
        .map(|e| Clause::new(e.iter().map(|&v| Var(v as u32 - 1).negative())))
        .collect::<Result<Vec<_>>>()?;
    let kb = KnowledgeBase::new(universe.clone(), items)?;
    Ok((kb, Cnf::new(universe, clauses)?))
}

/// The PURE3SAT construction: item `g` (named "g") followed by `g1..gn`,
/// over `X0..Xn, Y1..Yr` where `r` counts the positive clauses of `source`.
///
/// Returns the knowledge base, the position of `g` in it and the update.
pub fn pure3sat_reduction(source: &Cnf) -> Result<(KnowledgeBase, usize, Cnf)> {
    let n = source.num_vars();
    if n > MAX_PURE_VARS {
        return Err(Error::TooLarge(format!(
            "{n} source variables, limit {MAX_PURE_VARS}"
        )));
    }
    let mut positive: Vec<&Clause> = Vec::new();
    let mut negative: Vec<&Clause> = Vec::new();
    for (i, c) in source.clauses().iter().enumerate() {
        if c.is_empty() || (c.positive_count() != 0 && c.positive_count() != c.len()) {
            return Err(Error::NotPure(i + 1));
        }
        if c.positive_count() == c.len() {
            positive.push(c);
        } else {
            negative.push(c);
        }
    }
    let r = positive.len();
    let names = (0..=n)
        .map(|i| format!("X{i}"))
        .chain((1..=r).map(|j| format!("Y{j}")));
    let universe = VarUniverse::new(names)?;
    let x = |i: usize| Var(i as u32);
    let y = |j: usize| Var((n + 1 + j) as u32);

    let g = if r == 0 {
        Cnf::bottom(universe.clone())
    } else {
        let c = Clause::new((0..r).map(|j| y(j).negative()))?;
        Cnf::new(universe.clone(), vec![c])?
    };
    let mut items = vec![("g".to_string(), g)];
    for i in 0..n {
        let mut clauses = vec![Clause::unit(x(i + 1).positive())];
        for (j, p) in positive.iter().enumerate() {
            if p.lits().iter().any(|l| l.var().index() == i) {
                clauses.push(Clause::unit(y(j).positive()));
            }
        }
        items.push((format!("g{}", i + 1), Cnf::new(universe.clone(), clauses)?));
    }
    let phi = negative
        .iter()
        .map(|c| Clause::new(c.lits().iter().map(|l| x(l.var().index() + 1).negative())))
        .collect::<Result<Vec<_>>>()?;
    let kb = KnowledgeBase::new(universe.clone(), items)?;
    Ok((kb, 0, Cnf::new(universe, phi)?))
}

/// The node cover construction over positions `e1..es, n1..nn`.
///
/// The equivalence needs at least one edge: with none, `m1` is empty while the
/// empty cover is always small enough, so edgeless graphs are rejected.
pub fn nodecover_reduction(g: &Graph, l: i64) -> Result<(ModelSet, ModelSet, i64)> {
    let (n, s) = (g.n, g.edges.len());
    if n + s > MAX_COVER_WIDTH {
        return Err(Error::TooLarge(format!(
            "{n} nodes plus {s} edges, limit {MAX_COVER_WIDTH}"
        )));
    }
    if s == 0 {
        return Err(Error::InvalidGraph("graph has no edges".into()));
    }
    let names = (1..=s)
        .map(|r| format!("e{r}"))
        .chain((1..=n).map(|i| format!("n{i}")));
    let universe = VarUniverse::new(names)?;
    let width = s + n;
    let ones = Model::new(width, u64::MAX);
    let zeros_at = |positions: &[usize]| {
        positions
            .iter()
            .fold(ones, |m, &p| m.with(Var(p as u32), false))
    };

    let mut m1 = Vec::with_capacity(2 * s);
    for (r, &(i, j)) in g.edges.iter().enumerate() {
        m1.push(zeros_at(&[r, s + i - 1]));
        m1.push(zeros_at(&[r, s + j - 1]));
    }
    let m2 = (0..n).map(|i| {
        let mut pos: Vec<usize> = (0..s).collect();
        pos.push(s + i);
        zeros_at(&pos)
    });
    Ok((
        ModelSet::new(universe.clone(), m1)?,
        ModelSet::new(universe, m2)?,
        n as i64 - l,
    ))
}

/// Does the intersection of the two AND-closures have a model with more
/// than `k` ones?
pub fn maxmodel(m1: &ModelSet, m2: &ModelSet, k: i64) -> Result<bool> {
    if m1.width() != m2.width() {
        return Err(Error::UniverseMismatch);
    }
    if m1.width() > MAX_COVER_WIDTH {
        return Err(Error::TooLarge(format!(
            "width {}, limit {MAX_COVER_WIDTH}",
            m1.width()
        )));
    }
    // Enumerate the closure with fewer generators and test membership in the
    // other: m is in the closure of M iff the meet of M's supersets of m is m.
    let (small, other) = if m1.len() <= m2.len() {
        (m1, m2)
    } else {
        (m2, m1)
    };
    let in_other = |m: Model| {
        let mut meet: Option<Model> = None;
        for o in other.iter() {
            if o.and(m) == m {
                meet = Some(meet.map_or(o, |a| a.and(o)));
            }
        }
        meet == Some(m)
    };
    Ok(and_closure(small)
        .iter()
        .any(|m| i64::from(m.popcount()) > k && in_other(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::change::{maximal_consistent_subsets, widtio_update};
    use crate::formula::parse_cnf;
    use crate::semantics::Limits;

    fn hg(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn transversal_examples() {
        assert_eq!(
            transversals(&hg(3, &[&[1, 2], &[2, 3]])).unwrap(),
            vec![vec![2], vec![1, 3]]
        );
        assert_eq!(
            transversals(&hg(2, &[&[1, 2]])).unwrap(),
            vec![vec![1], vec![2]]
        );
        assert_eq!(
            transversals(&hg(4, &[&[1, 2, 3, 4]])).unwrap(),
            vec![vec![1], vec![2], vec![3], vec![4]]
        );
        assert_eq!(
            transversals(&hg(3, &[])).unwrap(),
            vec![Vec::<usize>::new()]
        );
    }

    #[test]
    fn hypergraph_validation() {
        assert!(matches!(
            Hypergraph::new(3, vec![vec![1]]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![1, 4]]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            transversals(&Hypergraph::new(21, vec![]).unwrap()),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn edge_files_round_trip() {
        let h = Hypergraph::parse("# path\n3\n1 2\n2 3\n").unwrap();
        assert_eq!(h, hg(3, &[&[1, 2], &[2, 3]]));
        assert_eq!(Hypergraph::parse(&h.to_text()).unwrap(), h);
        let g = Graph::parse("3\n1 2\n3 2\n").unwrap();
        assert_eq!(g.edges(), &[(1, 2), (2, 3)]);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
        assert!(Graph::parse("3\n1 2 3\n").is_err());
        assert!(Graph::parse("3\n1 1\n").is_err());
        assert!(Graph::parse("3\n1 2\n2 1\n").is_err());
        assert!(matches!(
            Graph::parse("x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn fuv_reduction_example() {
        let (kb, f) = fuv_reduction(&hg(3, &[&[1, 2], &[2, 3]])).unwrap();
        assert_eq!(kb.names(), ["g1", "g2", "g3"]);
        let items: Vec<String> = kb.items().iter().map(|(_, c)| c.to_string()).collect();
        assert_eq!(items, ["(x1)", "(x2)", "(x3)"]);
        assert_eq!(f.to_string(), "(-x1 -x2) (-x2 -x3)");
        let subsets = maximal_consistent_subsets(&kb, &f, &Limits::default()).unwrap();
        // complements of {2} and {1, 3}
        assert_eq!(subsets, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn fuv_reduction_edgeless() {
        let (kb, f) = fuv_reduction(&hg(2, &[])).unwrap();
        assert!(f.is_empty());
        let subsets = maximal_consistent_subsets(&kb, &f, &Limits::default()).unwrap();
        assert_eq!(subsets, vec![vec![0, 1]]);
    }

    #[test]
    fn pure3sat_shapes() {
        let f = parse_cnf("vars a b c\na b\n-a -c\nb c\n").unwrap();
        let (kb, gi, phi) = pure3sat_reduction(&f).unwrap();
        assert_eq!(gi, 0);
        assert_eq!(kb.universe().names(), ["X0", "X1", "X2", "X3", "Y1", "Y2"]);
        let items: Vec<String> = kb.items().iter().map(|(_, c)| c.to_string()).collect();
        assert_eq!(
            items,
            ["(-Y1 -Y2)", "(X1) (Y1)", "(X2) (Y1) (Y2)", "(X3) (Y2)"]
        );
        assert_eq!(phi.to_string(), "(-X1 -X3)");
        // satisfiable: g is dropped
        let out = widtio_update(&kb, &phi, &Limits::default()).unwrap();
        assert!(!out.contains_name("g"));
    }

    #[test]
    fn pure3sat_unsatisfiable_keeps_g() {
        let f = parse_cnf("vars a b\na b\n-a -b\na\n-a\n").unwrap();
        let (kb, _, phi) = pure3sat_reduction(&f).unwrap();
        let out = widtio_update(&kb, &phi, &Limits::default()).unwrap();
        assert!(out.contains_name("g"));
    }

    #[test]
    fn pure3sat_rejects_mixed_clauses() {
        let f = parse_cnf("vars a b\na b\n-a b\n").unwrap();
        assert_eq!(pure3sat_reduction(&f).unwrap_err(), Error::NotPure(2));
        let big = parse_cnf(&format!(
            "vars {}\n",
            (1..=9)
                .map(|i| format!("v{i}"))
                .collect::<Vec<_>>()
                .join(" ")
        ))
        .unwrap();
        assert!(matches!(pure3sat_reduction(&big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn nodecover_construction() {
        let g = Graph::new(2, vec![(1, 2)]).unwrap();
        let (m1, m2, k) = nodecover_reduction(&g, 1).unwrap();
        assert_eq!(m1.to_string(), "{001, 010}");
        assert_eq!(m2.to_string(), "{001, 010}");
        assert_eq!(k, 1);
        assert!(!maxmodel(&m1, &m2, k).unwrap());
        let (m1, m2, k) = nodecover_reduction(&g, 2).unwrap();
        assert!(maxmodel(&m1, &m2, k).unwrap());
    }

    #[test]
    fn nodecover_triangle() {
        let g = Graph::new(3, vec![(1, 2), (2, 3), (1, 3)]).unwrap();
        let (m1, m2, k) = nodecover_reduction(&g, 3).unwrap();
        assert!(maxmodel(&m1, &m2, k).unwrap());
        let (m1, m2, k) = nodecover_reduction(&g, 2).unwrap();
        assert!(!maxmodel(&m1, &m2, k).unwrap());
    }

    #[test]
    fn nodecover_rejects_edgeless() {
        let g = Graph::new(3, vec![]).unwrap();
        assert!(matches!(
            nodecover_reduction(&g, 1),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn maxmodel_trivial() {
        let u = VarUniverse::numbered("v", 3).unwrap();
        let all = ModelSet::from_strs(u.clone(), &["111"]).unwrap();
        assert!(maxmodel(&all, &all, 2).unwrap());
        assert!(!maxmodel(&all, &all, 3).unwrap());
        let a = ModelSet::from_strs(u.clone(), &["110"]).unwrap();
        let b = ModelSet::from_strs(u, &["011"]).unwrap();
        for k in -1..4 {
            assert!(!maxmodel(&a, &b, k).unwrap());
        }
    }
}
