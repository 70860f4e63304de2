//! Canonical digraphs and the walk-count primitives every counter builds on.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact walk / assignment count. Never narrowed to a fixed width.
pub type WalkCount = BigUint;

/// Square table of exact counts, indexed `[u][v]`.
pub type CountTable = Vec<Vec<WalkCount>>;

/// A finite simple digraph on vertices `0..n`. Self-loops are allowed,
/// parallel edges are not. The position of an edge in [`edges`](Self::edges)
/// is its canonical id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    // successors sorted ascending; the j-th entry is "the j-th successor"
    succ: Vec<Vec<usize>>,
    edge_ids: HashMap<(usize, usize), usize>,
}

impl DirectedGraph {
    /// Validates a raw vertex count and edge list.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut succ = vec![Vec::new(); n];
        let mut edge_ids = HashMap::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::EndpointOutOfRange { vertex: w, n });
                }
            }
            if edge_ids.insert((u, v), id).is_some() {
                return Err(Error::DuplicateEdge(u, v));
            }
            succ[u].push(v);
        }
        for s in &mut succ {
            s.sort_unstable();
        }
        Ok(Self {
            n,
            edges,
            succ,
            edge_ids,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Successors of `u` in ascending vertex order.
    pub fn successors(&self, u: usize) -> &[usize] {
        &self.succ[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_ids.contains_key(&(u, v))
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_ids.get(&(u, v)).copied()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::EndpointOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    pub fn max_out_degree(&self) -> usize {
        self.succ.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff the graph has no directed cycle (self-loops count as cycles).
    pub fn is_dag(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn's algorithm; `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        for &(_, v) in &self.edges {
            indeg[v] += 1;
        }
        let mut stack: Vec<usize> = (0..self.n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in &self.succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    /// Adjacency as a 0/1 count table.
    pub fn adjacency_table(&self) -> CountTable {
        let mut t = zero_table(self.n);
        for &(u, v) in &self.edges {
            t[u][v] = BigUint::one();
        }
        t
    }

    /// Entry `(u, v)` is the number of walks from `u` to `v` with exactly
    /// `length` edges. `length = 0` gives the identity.
    pub fn walk_count_matrix(&self, length: usize) -> CountTable {
        let mut result = identity_table(self.n);
        let mut base = self.adjacency_table();
        let mut e = length;
        while e > 0 {
            if e & 1 == 1 {
                result = table_product(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = table_product(&base, &base);
            }
        }
        result
    }

    /// All `s`-to-`t` walks with exactly `length` edges, as vertex sequences in
    /// lexicographic order. Fails once more than `limit` walks exist.
    pub fn enumerate_walks(
        &self,
        s: usize,
        t: usize,
        length: usize,
        limit: u64,
    ) -> Result<Vec<Vec<usize>>> {
        self.check_vertex(s)?;
        self.check_vertex(t)?;
        if limit == 0 {
            return Err(Error::InvalidArgument("limit must be positive".into()));
        }
        let mut out = Vec::new();
        let mut walk = vec![s];
        let mut visited_states: u64 = 0;
        self.walk_dfs(t, length, limit, &mut walk, &mut out, &mut visited_states)?;
        Ok(out)
    }

    fn walk_dfs(
        &self,
        t: usize,
        length: usize,
        limit: u64,
        walk: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        states: &mut u64,
    ) -> Result<()> {
        *states += 1;
        // the search tree itself can dwarf the output; cap it by the same budget
        if *states > limit.saturating_mul(64) {
            return Err(Error::LimitExceeded(limit));
        }
        let u = *walk.last().expect("walk is never empty");
        if walk.len() == length + 1 {
            if u == t {
                if out.len() as u64 >= limit {
                    return Err(Error::LimitExceeded(limit));
                }
                out.push(walk.clone());
            }
            return Ok(());
        }
        for &v in &self.succ[u] {
            walk.push(v);
            self.walk_dfs(t, length, limit, walk, out, states)?;
            walk.pop();
        }
        Ok(())
    }
}

pub fn zero_table(n: usize) -> CountTable {
    vec![vec![BigUint::zero(); n]; n]
}

pub fn identity_table(n: usize) -> CountTable {
    let mut t = zero_table(n);
    for (i, row) in t.iter_mut().enumerate() {
        row[i] = BigUint::one();
    }
    t
}

/// Product of two square count tables over the naturals.
pub fn table_product(a: &CountTable, b: &CountTable) -> CountTable {
    let n = a.len();
    let mut c = zero_table(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    c[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    c
}

/// A graph together with a colour in `1..=m` for every vertex, where `m` is
/// the largest colour used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexColouring {
    graph: DirectedGraph,
    colour: Vec<usize>,
    m: usize,
}

impl VertexColouring {
    pub fn new(graph: DirectedGraph, colour: Vec<usize>) -> Result<Self> {
        if colour.len() != graph.n() {
            return Err(Error::InvalidColouring(format!(
                "{} colours given for {} vertices",
                colour.len(),
                graph.n()
            )));
        }
        if let Some(v) = colour.iter().position(|&c| c == 0) {
            return Err(Error::InvalidColouring(format!(
                "vertex {v} has colour 0; colours are positive"
            )));
        }
        let m = colour.iter().copied().max().unwrap_or(0);
        Ok(Self { graph, colour, m })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn colour(&self, v: usize) -> usize {
        self.colour[v]
    }

    pub fn colours(&self) -> &[usize] {
        &self.colour
    }

    /// Number of colours (the maximum colour used).
    pub fn m(&self) -> usize {
        self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> DirectedGraph {
        DirectedGraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(DirectedGraph::new(2, vec![(0, 1)]).is_ok());
        assert_eq!(
            DirectedGraph::new(2, vec![(0, 2)]).unwrap_err().name(),
            "endpoint-out-of-range"
        );
        assert_eq!(
            DirectedGraph::new(1, vec![(0, 0), (0, 0)])
                .unwrap_err()
                .name(),
            "duplicate-edge"
        );
    }

    #[test]
    fn out_degree() {
        let path = DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.max_out_degree(), 1);
        assert_eq!(diamond().max_out_degree(), 2);
        assert_eq!(DirectedGraph::new(3, vec![]).unwrap().max_out_degree(), 0);
    }

    #[test]
    fn matrix_small_cases() {
        let g = diamond();
        assert_eq!(g.walk_count_matrix(0), identity_table(4));
        let cyc = DirectedGraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(cyc.walk_count_matrix(2)[0][0], BigUint::one());
        assert_eq!(g.walk_count_matrix(2)[0][3], BigUint::from(2u32));
    }

    #[test]
    fn walks_in_lexicographic_order() {
        let path = DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            path.enumerate_walks(0, 2, 2, 10).unwrap(),
            vec![vec![0, 1, 2]]
        );
        assert_eq!(path.enumerate_walks(1, 1, 0, 10).unwrap(), vec![vec![1]]);
        assert_eq!(
            diamond().enumerate_walks(0, 3, 2, 10).unwrap(),
            vec![vec![0, 1, 3], vec![0, 2, 3]]
        );
    }

    #[test]
    fn walk_limit() {
        let err = diamond().enumerate_walks(0, 3, 2, 1).unwrap_err();
        assert_eq!(err.name(), "limit-exceeded");
    }

    #[test]
    fn large_counts_do_not_overflow() {
        // complete digraph with loops on 4 vertices: 4^40 walks of 40 edges from 0
        let edges = (0..4).flat_map(|u| (0..4).map(move |v| (u, v))).collect();
        let g = DirectedGraph::new(4, edges).unwrap();
        let total: BigUint = g.walk_count_matrix(40)[0].iter().sum();
        assert_eq!(total, BigUint::from(4u32).pow(40));
    }

    #[test]
    fn colouring_checks() {
        let g = DirectedGraph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(VertexColouring::new(g.clone(), vec![1, 3]).unwrap().m(), 3);
        assert!(VertexColouring::new(g.clone(), vec![1]).is_err());
        assert!(VertexColouring::new(g, vec![0, 1]).is_err());
    }
}
