//! CNF constraints over edge variables: walks and cycle covers whose
//! characteristic edge assignment must satisfy a CNF.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, WalkCount};
use crate::walk::{ceil_log2, LogGate};

/// A literal over an edge id (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub edge: usize,
    pub positive: bool,
}

impl Literal {
    /// From the 1-based signed DIMACS convention: `i` is edge `i - 1`.
    pub fn from_dimacs(lit: i64) -> Result<Self> {
        if lit == 0 {
            return Err(Error::Parse("literal 0 is not a variable".into()));
        }
        Ok(Self {
            edge: (lit.unsigned_abs() - 1) as usize,
            positive: lit > 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.edge as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

/// CNF whose variables are edge ids of a carrier graph. An empty clause is
/// unsatisfiable; a CNF with no clauses is always satisfied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeCnf {
    clauses: Vec<Vec<Literal>>,
}

impl EdgeCnf {
    pub fn new(clauses: Vec<Vec<Literal>>) -> Self {
        Self { clauses }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds from signed 1-based literals.
    pub fn from_dimacs_clauses(clauses: &[Vec<i64>]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| c.iter().map(|&l| Literal::from_dimacs(l)).collect())
            .collect::<Result<_>>()?;
        Ok(Self { clauses })
    }

    pub fn to_dimacs_clauses(&self) -> Vec<Vec<i64>> {
        self.clauses
            .iter()
            .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
            .collect()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Clause count plus literal count.
    pub fn size(&self) -> usize {
        self.clauses.len() + self.clauses.iter().map(Vec::len).sum::<usize>()
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.clauses.iter().flatten().map(|l| l.edge).collect()
    }

    /// Ensures every variable names an edge of `g`.
    pub fn check_against(&self, g: &DirectedGraph) -> Result<()> {
        for l in self.clauses.iter().flatten() {
            if l.edge >= g.edge_count() {
                return Err(Error::UnknownEdgeVariable {
                    var: l.to_dimacs(),
                    edges: g.edge_count(),
                });
            }
        }
        Ok(())
    }

    /// Evaluation under a total assignment indexed by edge id.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| assignment[l.edge] == l.positive))
    }

    /// Reads DIMACS cnf text. The header is optional; clauses end at `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        let mut declared: Option<(usize, usize)> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::Parse(format!(
                        "line {}: malformed header {line:?}",
                        lineno + 1
                    )));
                }
                let nums = (parts[1].parse::<usize>(), parts[2].parse::<usize>());
                match nums {
                    (Ok(v), Ok(c)) => declared = Some((v, c)),
                    _ => {
                        return Err(Error::Parse(format!(
                            "line {}: malformed header {line:?}",
                            lineno + 1
                        )))
                    }
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad literal {tok:?}", lineno + 1))
                })?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    if let Some((vars, _)) = declared {
                        if lit.unsigned_abs() as usize > vars {
                            return Err(Error::Parse(format!(
                                "line {}: variable {} exceeds declared count {vars}",
                                lineno + 1,
                                lit.unsigned_abs()
                            )));
                        }
                    }
                    current.push(Literal::from_dimacs(lit)?);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        if let Some((_, c)) = declared {
            if c != clauses.len() {
                return Err(Error::Parse(format!(
                    "header declares {c} clauses, found {}",
                    clauses.len()
                )));
            }
        }
        Ok(Self { clauses })
    }
}

/// CNF evaluation under a partial assignment; every referenced variable must
/// be assigned.
pub fn eval_cnf(cnf: &EdgeCnf, assignment: &HashMap<usize, bool>) -> Result<bool> {
    let mut value = true;
    for clause in cnf.clauses() {
        let mut sat = false;
        for l in clause {
            let bit = assignment
                .get(&l.edge)
                .ok_or(Error::UnassignedVariable(l.edge))?;
            sat |= *bit == l.positive;
        }
        value &= sat;
    }
    Ok(value)
}

fn check_degree_two(g: &DirectedGraph) -> Result<()> {
    let found = g.max_out_degree();
    if found > 2 {
        return Err(Error::DegreeBoundViolated { found, bound: 2 });
    }
    Ok(())
}

/// Gate of the CNF walk counter, with `|V| + |φ|` as the size term.
pub fn reach2_cnf_gate(g: &DirectedGraph, cnf: &EdgeCnf, a: usize, k: usize) -> LogGate {
    LogGate::new(a, k, (g.n() + cnf.size()) as u64)
}

/// Number of `s`-`t` walks with exactly `a` edges whose traversed-edge set,
/// read as a total 0/1 assignment over all edges, satisfies `cnf`.
///
/// Only the edges that occur in `cnf` influence satisfaction, so the
/// propagation is keyed by (current vertex, which constrained edges have been
/// used so far).
pub fn count_log_reach2_cnf(
    g: &DirectedGraph,
    s: usize,
    t: usize,
    cnf: &EdgeCnf,
    a: usize,
    k: usize,
) -> Result<WalkCount> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    check_degree_two(g)?;
    cnf.check_against(g)?;
    if !reach2_cnf_gate(g, cnf, a, k).passes() {
        return Ok(BigUint::zero());
    }
    let relevant: Vec<usize> = cnf.variables().into_iter().collect();
    let slot: HashMap<usize, usize> = relevant.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let words = relevant.len().div_ceil(64).max(1);

    let mut frontier: HashMap<(usize, Vec<u64>), WalkCount> = HashMap::new();
    frontier.insert((s, vec![0; words]), BigUint::from(1u32));
    for _ in 0..a {
        let mut next: HashMap<(usize, Vec<u64>), WalkCount> = HashMap::new();
        for ((u, used), c) in frontier {
            for &v in g.successors(u) {
                let e = g.edge_id(u, v).expect("successor edge exists");
                let mut used = used.clone();
                if let Some(&i) = slot.get(&e) {
                    used[i / 64] |= 1 << (i % 64);
                }
                *next.entry((v, used)).or_default() += &c;
            }
        }
        frontier = next;
    }

    let mut total = BigUint::zero();
    let mut assignment = vec![false; g.edge_count()];
    for ((v, used), c) in frontier {
        if v != t {
            continue;
        }
        for (i, &e) in relevant.iter().enumerate() {
            assignment[e] = used[i / 64] >> (i % 64) & 1 == 1;
        }
        if cnf.satisfied_by(&assignment) {
            total += c;
        }
    }
    Ok(total)
}

/// A set of edge ids in which every vertex has exactly one outgoing and one
/// incoming edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleCover {
    /// Sorted ascending.
    pub edges: Vec<usize>,
}

impl CycleCover {
    pub fn characteristic(&self, edge_count: usize) -> Vec<bool> {
        let mut bits = vec![false; edge_count];
        for &e in &self.edges {
            bits[e] = true;
        }
        bits
    }

    /// `(number of non-self-loop cycles, vertices covered by them)`.
    pub fn nontrivial_profile(&self, g: &DirectedGraph) -> (usize, usize) {
        let n = g.n();
        let mut next = vec![usize::MAX; n];
        for &e in &self.edges {
            let (u, v) = g.edges()[e];
            next[u] = v;
        }
        let mut seen = vec![false; n];
        let (mut cycles, mut covered) = (0, 0);
        for start in 0..n {
            if seen[start] || next[start] == start {
                continue;
            }
            cycles += 1;
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                covered += 1;
                v = next[v];
            }
        }
        (cycles, covered)
    }
}

/// Every cycle cover of `g`, sorted by their sorted edge-id lists.
pub fn enumerate_cycle_covers(g: &DirectedGraph, limit: u64) -> Result<Vec<CycleCover>> {
    if limit == 0 {
        return Err(Error::InvalidArgument("limit must be positive".into()));
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(g.n());
    let mut target_used = vec![false; g.n()];
    cover_dfs(g, 0, limit, &mut chosen, &mut target_used, &mut out)?;
    out.sort();
    Ok(out)
}

fn cover_dfs(
    g: &DirectedGraph,
    u: usize,
    limit: u64,
    chosen: &mut Vec<usize>,
    target_used: &mut [bool],
    out: &mut Vec<CycleCover>,
) -> Result<()> {
    if u == g.n() {
        if out.len() as u64 >= limit {
            return Err(Error::LimitExceeded(limit));
        }
        let mut edges = chosen.clone();
        edges.sort_unstable();
        out.push(CycleCover { edges });
        return Ok(());
    }
    for &v in g.successors(u) {
        if target_used[v] {
            continue;
        }
        target_used[v] = true;
        chosen.push(g.edge_id(u, v).expect("successor edge exists"));
        cover_dfs(g, u + 1, limit, chosen, target_used, out)?;
        chosen.pop();
        target_used[v] = false;
    }
    Ok(())
}

/// The side condition `a <= ceil(log2(max(|G| + |φ|, 2)))` with
/// `|G| = n + |E|`, applied as an output gate.
pub fn cycle_cover_gate_passes(g: &DirectedGraph, cnf: &EdgeCnf, a: usize) -> bool {
    let size = (g.n() + g.edge_count() + cnf.size()) as u64;
    a as u64 <= ceil_log2(size)
}

/// Cycle covers with at most `k` non-self-loop cycles that together cover
/// exactly `k * a` vertices, and whose edge set satisfies `cnf`.
///
/// Non-trivial cycles are built one at a time in ascending order of their
/// minimum vertex (the head), each as a simple cycle through vertices larger
/// than its head; every vertex left over must carry a self-loop.
pub fn count_cycle_cover2_cnf(
    g: &DirectedGraph,
    cnf: &EdgeCnf,
    a: usize,
    k: usize,
) -> Result<WalkCount> {
    check_degree_two(g)?;
    cnf.check_against(g)?;
    if !cycle_cover_gate_passes(g, cnf, a) {
        return Ok(BigUint::zero());
    }
    let target = k
        .checked_mul(a)
        .ok_or_else(|| Error::InvalidArgument(format!("k * a overflows for k = {k}, a = {a}")))?;
    if target > g.n() {
        return Ok(BigUint::zero());
    }
    let mut search = CoverSearch {
        g,
        cnf,
        max_cycles: k,
        target,
        in_cycle: vec![false; g.n()],
        used_edges: Vec::new(),
        total: BigUint::zero(),
    };
    search.pick_head(0, 0, 0);
    Ok(search.total)
}

struct CoverSearch<'a> {
    g: &'a DirectedGraph,
    cnf: &'a EdgeCnf,
    max_cycles: usize,
    target: usize,
    in_cycle: Vec<bool>,
    used_edges: Vec<usize>,
    total: WalkCount,
}

impl CoverSearch<'_> {
    // choose the next cycle head >= min_head, or stop and complete with loops
    fn pick_head(&mut self, min_head: usize, cycles: usize, covered: usize) {
        if covered == self.target {
            self.finish();
        }
        if cycles == self.max_cycles || covered >= self.target {
            return;
        }
        for head in min_head..self.g.n() {
            if self.in_cycle[head] {
                continue;
            }
            self.in_cycle[head] = true;
            self.extend(head, head, 1, cycles, covered);
            self.in_cycle[head] = false;
        }
    }

    fn extend(&mut self, head: usize, cur: usize, len: usize, cycles: usize, covered: usize) {
        for &v in self.g.successors(cur) {
            let e = self.g.edge_id(cur, v).expect("successor edge exists");
            if v == head && len >= 2 {
                self.used_edges.push(e);
                self.pick_head(head + 1, cycles + 1, covered + len);
                self.used_edges.pop();
            } else if v > head && !self.in_cycle[v] && covered + len < self.target {
                self.in_cycle[v] = true;
                self.used_edges.push(e);
                self.extend(head, v, len + 1, cycles, covered);
                self.used_edges.pop();
                self.in_cycle[v] = false;
            }
        }
    }

    fn finish(&mut self) {
        let mut bits = vec![false; self.g.edge_count()];
        for &e in &self.used_edges {
            bits[e] = true;
        }
        for v in 0..self.g.n() {
            if self.in_cycle[v] {
                continue;
            }
            match self.g.edge_id(v, v) {
                Some(e) => bits[e] = true,
                None => return,
            }
        }
        if self.cnf.satisfied_by(&bits) {
            self.total += 1u32;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::count_log_reach_b;

    fn diamond() -> DirectedGraph {
        DirectedGraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn two_vertex() -> DirectedGraph {
        DirectedGraph::new(2, vec![(0, 0), (1, 1), (0, 1), (1, 0)]).unwrap()
    }

    fn lit(edge: usize, positive: bool) -> Literal {
        Literal { edge, positive }
    }

    #[test]
    fn eval_examples() {
        let assign: HashMap<usize, bool> = [(0, true), (1, true)].into_iter().collect();
        assert!(eval_cnf(&EdgeCnf::empty(), &assign).unwrap());
        let neg = EdgeCnf::new(vec![vec![lit(0, false)]]);
        assert!(!eval_cnf(&neg, &assign).unwrap());
        let two = EdgeCnf::new(vec![vec![lit(0, true), lit(1, true)], vec![lit(0, false)]]);
        let assign: HashMap<usize, bool> = [(0, false), (1, true)].into_iter().collect();
        assert!(eval_cnf(&two, &assign).unwrap());
        let assign: HashMap<usize, bool> = [(1, true)].into_iter().collect();
        assert_eq!(
            eval_cnf(&two, &assign).unwrap_err().name(),
            "unassigned-variable"
        );
        let unsat = EdgeCnf::new(vec![vec![]]);
        assert!(!eval_cnf(&unsat, &HashMap::new()).unwrap());
    }

    #[test]
    fn dimacs_round_trip() {
        let cnf = EdgeCnf::parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n3 0\n").unwrap();
        assert_eq!(
            cnf.clauses(),
            &[vec![lit(0, true), lit(1, false)], vec![lit(2, true)]]
        );
        assert_eq!(cnf.to_dimacs_clauses(), vec![vec![1, -2], vec![3]]);
        assert_eq!(cnf.size(), 5);
        assert!(EdgeCnf::parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(EdgeCnf::parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(EdgeCnf::parse_dimacs("1 x 0").is_err());
    }

    #[test]
    fn reach2_cnf_examples() {
        let g = diamond();
        let plain = count_log_reach_b(&g, 0, 3, 2, 1, 2).unwrap();
        assert_eq!(
            count_log_reach2_cnf(&g, 0, 3, &EdgeCnf::empty(), 2, 1).unwrap(),
            plain
        );
        let e01 = g.edge_id(0, 1).unwrap();
        let cnf = EdgeCnf::new(vec![vec![lit(e01, false)]]);
        // |V| + |φ| = 6, gate bound k * 3
        assert_eq!(
            count_log_reach2_cnf(&g, 0, 3, &cnf, 2, 1).unwrap(),
            BigUint::from(1u32)
        );
        assert!(count_log_reach2_cnf(&g, 0, 3, &cnf, 2, 0)
            .unwrap()
            .is_zero());
        let bad = EdgeCnf::new(vec![vec![lit(9, true)]]);
        assert_eq!(
            count_log_reach2_cnf(&g, 0, 3, &bad, 2, 1)
                .unwrap_err()
                .name(),
            "unknown-edge-variable"
        );
    }

    #[test]
    fn cycle_cover_enumeration_examples() {
        let covers = enumerate_cycle_covers(&two_vertex(), 100).unwrap();
        assert_eq!(
            covers,
            vec![
                CycleCover { edges: vec![0, 1] },
                CycleCover { edges: vec![2, 3] }
            ]
        );
        let single = DirectedGraph::new(1, vec![(0, 0)]).unwrap();
        assert_eq!(enumerate_cycle_covers(&single, 10).unwrap().len(), 1);
        let bare = DirectedGraph::new(1, vec![]).unwrap();
        assert!(enumerate_cycle_covers(&bare, 10).unwrap().is_empty());
        assert_eq!(
            enumerate_cycle_covers(&two_vertex(), 1).unwrap_err().name(),
            "limit-exceeded"
        );
    }

    #[test]
    fn cycle_cover_count_examples() {
        let g = two_vertex();
        let empty = EdgeCnf::empty();
        assert_eq!(
            count_cycle_cover2_cnf(&g, &empty, 2, 1).unwrap(),
            BigUint::from(1u32)
        );
        // k = 0: only the all-self-loop cover qualifies
        assert_eq!(
            count_cycle_cover2_cnf(&g, &empty, 2, 0).unwrap(),
            BigUint::from(1u32)
        );
        let unsat = EdgeCnf::new(vec![vec![]]);
        assert!(count_cycle_cover2_cnf(&g, &unsat, 2, 1).unwrap().is_zero());
        assert!(count_cycle_cover2_cnf(&g, &empty, 4, 1).unwrap().is_zero());
    }

    #[test]
    fn cover_profile() {
        let g = two_vertex();
        let swap = CycleCover { edges: vec![2, 3] };
        assert_eq!(swap.nontrivial_profile(&g), (1, 2));
        let loops = CycleCover { edges: vec![0, 1] };
        assert_eq!(loops.nontrivial_profile(&g), (0, 0));
    }
}
