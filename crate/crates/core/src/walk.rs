//! The unconstrained walk counters.
//!
//! Length conventions differ between problems: [`count_reach`] and
//! [`count_reach_colour`] count walks by number of *vertices* (`k` vertices,
//! `k - 1` edges), while the logarithmic variants count by number of *edges*.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexColouring, WalkCount};

/// `ceil(log2(max(x, 2)))`.
pub fn ceil_log2(x: u64) -> u64 {
    let x = x.max(2);
    u64::from(64 - (x - 1).leading_zeros())
}

/// The length gate of the logarithmic problems: a walk length `a` is admitted
/// iff `a <= k * ceil(log2(max(size_term, 2)))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogGate {
    pub a: usize,
    pub k: usize,
    pub size_term: u64,
}

impl LogGate {
    pub fn new(a: usize, k: usize, size_term: u64) -> Self {
        Self { a, k, size_term }
    }

    pub fn bound(&self) -> u128 {
        self.k as u128 * u128::from(ceil_log2(self.size_term))
    }

    pub fn passes(&self) -> bool {
        self.a as u128 <= self.bound()
    }
}

/// An instance of the plain reachability count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachInstance {
    pub graph: DirectedGraph,
    pub s: usize,
    pub t: usize,
    pub k: usize,
}

impl ReachInstance {
    pub fn new(graph: DirectedGraph, s: usize, t: usize, k: usize) -> Result<Self> {
        graph.check_vertex(s)?;
        graph.check_vertex(t)?;
        Ok(Self { graph, s, t, k })
    }
}

/// Number of walks `(v_1, ..., v_k)` with `v_1 = s`, `v_k = t`. Zero for `k = 0`.
pub fn count_reach(inst: &ReachInstance) -> WalkCount {
    if inst.k == 0 {
        return BigUint::zero();
    }
    let g = &inst.graph;
    let mut row = unit_vector(g.n(), inst.s);
    for _ in 1..inst.k {
        row = step(g, &row);
    }
    row.swap_remove(inst.t)
}

fn unit_vector(n: usize, v: usize) -> Vec<WalkCount> {
    let mut row = vec![BigUint::zero(); n];
    row[v] = BigUint::one();
    row
}

// one edge forward: new[v] = sum over u with (u, v) in E of old[u]
fn step(g: &DirectedGraph, row: &[WalkCount]) -> Vec<WalkCount> {
    let mut next = vec![BigUint::zero(); g.n()];
    for (u, c) in row.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for &v in g.successors(u) {
            next[v] += c;
        }
    }
    next
}

fn check_degree(g: &DirectedGraph, b: usize) -> Result<()> {
    if b < 2 {
        return Err(Error::InvalidArgument(format!(
            "degree bound b = {b}; must be at least 2"
        )));
    }
    let found = g.max_out_degree();
    if found > b {
        return Err(Error::DegreeBoundViolated { found, bound: b });
    }
    Ok(())
}

/// Gate for the bounded-degree problems, with `|V|` as the size term.
pub fn log_gate(g: &DirectedGraph, a: usize, k: usize) -> LogGate {
    LogGate::new(a, k, g.n() as u64)
}

/// Walks from `s` to `t` with exactly `a` edges in a graph of out-degree at
/// most `b`, or 0 when `a` exceeds the logarithmic gate.
///
/// The propagation follows the successor-index choice: at each of the `a`
/// steps a number `j` in `1..=b` picks the `j`-th successor, and choices
/// beyond the current vertex's out-degree are dead.
pub fn count_log_reach_b(
    g: &DirectedGraph,
    s: usize,
    t: usize,
    a: usize,
    k: usize,
    b: usize,
) -> Result<WalkCount> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    check_degree(g, b)?;
    if !log_gate(g, a, k).passes() {
        return Ok(BigUint::zero());
    }
    let mut row = unit_vector(g.n(), s);
    for _ in 0..a {
        row = successor_choice_step(g, &row, b);
    }
    Ok(row.swap_remove(t))
}

fn successor_choice_step(g: &DirectedGraph, row: &[WalkCount], b: usize) -> Vec<WalkCount> {
    let mut next = vec![BigUint::zero(); g.n()];
    for (u, c) in row.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let succ = g.successors(u);
        for j in 0..b {
            if let Some(&v) = succ.get(j) {
                next[v] += c;
            }
        }
    }
    next
}

/// All walks with exactly `a` edges (any endpoints), gated like
/// [`count_log_reach_b`].
pub fn count_log_walk_b(g: &DirectedGraph, a: usize, k: usize, b: usize) -> Result<WalkCount> {
    check_degree(g, b)?;
    if !log_gate(g, a, k).passes() {
        return Ok(BigUint::zero());
    }
    let mut row = vec![BigUint::one(); g.n()];
    for _ in 0..a {
        row = successor_choice_step(g, &row, b);
    }
    Ok(row.into_iter().sum())
}

/// Checks the side conditions `colour(s) = 1` and `colour(t) = m`.
pub fn check_colour_side_conditions(vc: &VertexColouring, s: usize, t: usize) -> Result<()> {
    let g = vc.graph();
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if vc.colour(s) != 1 {
        return Err(Error::ColouringSideCondition(format!(
            "colour of s = {} is {}, expected 1",
            s,
            vc.colour(s)
        )));
    }
    if vc.colour(t) != vc.m() {
        return Err(Error::ColouringSideCondition(format!(
            "colour of t = {} is {}, expected m = {}",
            t,
            vc.colour(t),
            vc.m()
        )));
    }
    Ok(())
}

/// Walks `(s = v_1, ..., v_k = t)` with `colour(v_i) = i`; 0 unless `m = k`.
pub fn count_reach_colour(vc: &VertexColouring, s: usize, t: usize, k: usize) -> Result<WalkCount> {
    check_colour_side_conditions(vc, s, t)?;
    if vc.m() != k {
        return Ok(BigUint::zero());
    }
    let g = vc.graph();
    // position 1 holds s only; position i keeps vertices of colour i
    let mut row = unit_vector(g.n(), s);
    for i in 2..=k {
        row = step(g, &row);
        for (v, c) in row.iter_mut().enumerate() {
            if vc.colour(v) != i {
                *c = BigUint::zero();
            }
        }
    }
    Ok(row.swap_remove(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> DirectedGraph {
        DirectedGraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn path3() -> DirectedGraph {
        DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(0), 1);
        assert_eq!(ceil_log2(1), 1);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(1 << 40), 40);
    }

    #[test]
    fn reach_examples() {
        let inst = ReachInstance::new(diamond(), 0, 3, 3).unwrap();
        assert_eq!(count_reach(&inst), BigUint::from(2u32));
        for v in 0..4 {
            let single = ReachInstance::new(diamond(), v, v, 1).unwrap();
            assert_eq!(count_reach(&single), BigUint::one());
        }
        let zero = ReachInstance::new(diamond(), 0, 0, 0).unwrap();
        assert!(count_reach(&zero).is_zero());
        assert!(ReachInstance::new(diamond(), 0, 4, 1).is_err());
    }

    #[test]
    fn log_reach_examples() {
        let g = diamond();
        assert_eq!(
            count_log_reach_b(&g, 0, 3, 2, 1, 2).unwrap(),
            BigUint::from(2u32)
        );
        // gate: 2 > 0 * 2
        assert!(count_log_reach_b(&g, 0, 3, 2, 0, 2).unwrap().is_zero());
        let err = count_log_reach_b(&g, 0, 3, 2, 1, 1).unwrap_err();
        assert_eq!(err.name(), "invalid-argument");
        let star = DirectedGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let err = count_log_reach_b(&star, 0, 1, 1, 1, 2).unwrap_err();
        assert_eq!(err.name(), "degree-bound-violated");
    }

    #[test]
    fn log_walk_examples() {
        let g = path3();
        assert_eq!(count_log_walk_b(&g, 1, 1, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(count_log_walk_b(&g, 2, 1, 2).unwrap(), BigUint::one());
        assert_eq!(count_log_walk_b(&g, 0, 0, 2).unwrap(), BigUint::from(3u32));
        assert!(count_log_walk_b(&g, 3, 1, 2).unwrap().is_zero());
    }

    #[test]
    fn reach_colour_examples() {
        let vc = VertexColouring::new(path3(), vec![1, 2, 3]).unwrap();
        assert_eq!(count_reach_colour(&vc, 0, 2, 3).unwrap(), BigUint::one());
        assert!(count_reach_colour(&vc, 0, 2, 2).unwrap().is_zero());
        let err = count_reach_colour(&vc, 1, 2, 3).unwrap_err();
        assert_eq!(err.name(), "colouring-side-condition-violated");
        let err = count_reach_colour(&vc, 0, 1, 3).unwrap_err();
        assert_eq!(err.name(), "colouring-side-condition-violated");
    }
}
