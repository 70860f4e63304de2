//! Homomorphisms from coloured canonical paths, counted as walks in a
//! layered digraph, with an exhaustive map-enumeration oracle.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fo::{RelationalStructure, Vocabulary};
use crate::graph::{DirectedGraph, WalkCount};
use crate::walk::{count_reach, ReachInstance};

/// Name of the `i`-th colour symbol, `i` in `1..=n`.
pub fn colour_symbol(i: usize) -> String {
    format!("C_{i}")
}

/// The vocabulary `(E, C_1, ..., C_n)`.
pub fn path_star_vocabulary(n: usize) -> Vocabulary {
    let mut rels = vec![("E".to_string(), 2)];
    rels.extend((1..=n).map(|i| (colour_symbol(i), 1)));
    Vocabulary::new(rels, Vec::new()).expect("symbols are distinct")
}

/// The undirected path on `n` elements with one singleton colour class per
/// element (`C_i = {i - 1}`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStar {
    n: usize,
    structure: RelationalStructure,
}

impl PathStar {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn structure(&self) -> &RelationalStructure {
        &self.structure
    }
}

pub fn make_path_star(n: usize) -> Result<PathStar> {
    if n < 2 {
        return Err(Error::NTooSmall(n));
    }
    let mut rels = Vec::with_capacity(n + 1);
    rels.push(
        (0..n - 1)
            .flat_map(|i| [vec![i, i + 1], vec![i + 1, i]])
            .collect(),
    );
    rels.extend((0..n).map(|i| vec![vec![i]]));
    let structure = RelationalStructure::new(path_star_vocabulary(n), n, rels, Vec::new())?;
    Ok(PathStar { n, structure })
}

/// A target structure over `(E, C_1, ..., C_n)` together with the gate
/// parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomInstance {
    pub n: usize,
    pub target: RelationalStructure,
    pub k: usize,
}

fn check_vocabularies(a: &RelationalStructure, b: &RelationalStructure) -> Result<()> {
    if a.vocab().same_symbols(b.vocab()) {
        Ok(())
    } else {
        Err(Error::VocabularyMismatch(
            "source and target interpret different symbols".into(),
        ))
    }
}

fn check_target(n: usize, b: &RelationalStructure) -> Result<()> {
    if b.vocab().same_symbols(&path_star_vocabulary(n)) {
        Ok(())
    } else {
        Err(Error::VocabularyMismatch(format!(
            "target must interpret exactly E/2 and C_1..C_{n}/1"
        )))
    }
}

/// Whether `h` (indexed by the elements of `a`) maps every tuple of every
/// relation of `a` into `b` and every constant of `a` onto the same constant
/// of `b`.
pub fn is_homomorphism(
    h: &[usize],
    a: &RelationalStructure,
    b: &RelationalStructure,
) -> Result<bool> {
    check_vocabularies(a, b)?;
    if h.len() != a.universe_size() {
        return Err(Error::InvalidArgument(format!(
            "map has {} entries for a universe of {}",
            h.len(),
            a.universe_size()
        )));
    }
    if let Some(&x) = h.iter().find(|&&x| x >= b.universe_size()) {
        return Err(Error::InvalidArgument(format!(
            "image {x} outside target universe of {}",
            b.universe_size()
        )));
    }
    Ok(maps_into(h, a, b))
}

fn maps_into(h: &[usize], a: &RelationalStructure, b: &RelationalStructure) -> bool {
    for (name, _) in a.vocab().relations() {
        let rel = a.relation(name).expect("declared");
        for tuple in rel {
            let image: Vec<usize> = tuple.iter().map(|&x| h[x]).collect();
            if !b.holds(name, &image) {
                return false;
            }
        }
    }
    a.vocab()
        .constants()
        .iter()
        .all(|c| Some(h[a.constant(c).expect("declared")]) == b.constant(c))
}

/// Every homomorphism from `a` to `b`, in lexicographic order of the image
/// vectors. Fails when `|dom(b)|^|dom(a)|` exceeds `limit`.
pub fn enumerate_homs(
    a: &RelationalStructure,
    b: &RelationalStructure,
    limit: u64,
) -> Result<Vec<Vec<usize>>> {
    check_vocabularies(a, b)?;
    let (na, nb) = (a.universe_size(), b.universe_size());
    let space = (nb as u128).checked_pow(na as u32);
    if space.is_none_or(|s| s > u128::from(limit)) {
        return Err(Error::LimitExceeded(limit));
    }
    let mut out = Vec::new();
    let mut h = vec![0usize; na];
    loop {
        if maps_into(&h, a, b) {
            out.push(h.clone());
        }
        // odometer, last position fastest
        let mut pos = na;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            h[pos] += 1;
            if h[pos] < nb {
                break;
            }
            h[pos] = 0;
        }
    }
}

/// Exhaustive homomorphism count.
pub fn count_hom_oracle(
    a: &RelationalStructure,
    b: &RelationalStructure,
    limit: u64,
) -> Result<WalkCount> {
    Ok(BigUint::from(enumerate_homs(a, b, limit)?.len()))
}

/// The layered digraph whose `s`-`t` walks of `n + 2` vertices correspond
/// one-to-one to homomorphisms `P_n* -> B`.
///
/// Vertex `(x, i)` stands for "element `x` of `B` as the image of path
/// position `i`". The first colour class containing `x` reuses index `x`;
/// further memberships get fresh indices after `|dom(B)|`; `s` and `t` come
/// last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredHomGraph {
    pub graph: DirectedGraph,
    pub s: usize,
    pub t: usize,
    pub k_prime: usize,
    /// `(element, position)` for each vertex other than `s` and `t`; `None`
    /// for elements in no colour class.
    pub index: Vec<Option<(usize, usize)>>,
}

impl LayeredHomGraph {
    pub fn build(n: usize, b: &RelationalStructure) -> Result<Self> {
        if n < 2 {
            return Err(Error::NTooSmall(n));
        }
        check_target(n, b)?;
        let nb = b.universe_size();
        let mut index: Vec<Option<(usize, usize)>> = vec![None; nb];
        // vertex id of (x, i) per layer
        let mut layers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
        for (i, layer) in layers.iter_mut().enumerate().skip(1) {
            let mut members: Vec<usize> = b
                .relation(&colour_symbol(i))
                .expect("checked vocabulary")
                .iter()
                .map(|t| t[0])
                .collect();
            members.sort_unstable();
            for x in members {
                let id = if index[x].is_none() {
                    x
                } else {
                    index.push(None);
                    index.len() - 1
                };
                index[id] = Some((x, i));
                layer.push((x, id));
            }
        }
        let s = index.len();
        let t = s + 1;
        let mut edges = Vec::new();
        for &(_, v) in &layers[1] {
            edges.push((s, v));
        }
        for i in 1..n {
            for &(x, u) in &layers[i] {
                for &(y, v) in &layers[i + 1] {
                    if b.holds("E", &[x, y]) && b.holds("E", &[y, x]) {
                        edges.push((u, v));
                    }
                }
            }
        }
        for &(_, v) in &layers[n] {
            edges.push((v, t));
        }
        let graph = DirectedGraph::new(t + 1, edges)?;
        Ok(Self {
            graph,
            s,
            t,
            k_prime: n + 2,
            index,
        })
    }

    /// Reads a walk `(s, v_1, ..., v_n, t)` as the map `h(i - 1) = element(v_i)`.
    pub fn walk_to_hom(&self, walk: &[usize]) -> Option<Vec<usize>> {
        if walk.len() != self.k_prime || walk[0] != self.s || walk[walk.len() - 1] != self.t {
            return None;
        }
        walk[1..walk.len() - 1]
            .iter()
            .enumerate()
            .map(|(pos, &v)| match self.index.get(v).copied().flatten() {
                Some((x, i)) if i == pos + 1 => Some(x),
                _ => None,
            })
            .collect()
    }

    /// Inverse of [`walk_to_hom`](Self::walk_to_hom).
    pub fn hom_to_walk(&self, h: &[usize]) -> Option<Vec<usize>> {
        let mut walk = vec![self.s];
        for (pos, &x) in h.iter().enumerate() {
            let v = self.index.iter().position(|e| *e == Some((x, pos + 1)))?;
            walk.push(v);
        }
        walk.push(self.t);
        Some(walk)
    }

    pub fn reach_instance(&self) -> ReachInstance {
        ReachInstance::new(self.graph.clone(), self.s, self.t, self.k_prime)
            .expect("s and t are vertices")
    }
}

/// Homomorphisms `P_n* -> B` if `n <= k`, else 0, via walks in the layered
/// graph.
pub fn count_hom_path_star(n: usize, b: &RelationalStructure, k: usize) -> Result<WalkCount> {
    let layered = LayeredHomGraph::build(n, b)?;
    if n > k {
        return Ok(BigUint::zero());
    }
    Ok(count_reach(&layered.reach_instance()))
}
