//! The parameterised determinant, its clow-sequence expansion and the
//! sign-reversing involution that pairs off non-cover sequences.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Exact signed result.
pub type SignedValue = BigInt;

/// Square 0/1 matrix, read as the adjacency matrix of a digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOneMatrix {
    n: usize,
    rows: Vec<Vec<bool>>,
}

impl ZeroOneMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len();
        let mut bits = Vec::with_capacity(n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut r = Vec::with_capacity(n);
            for (j, x) in row.into_iter().enumerate() {
                match x {
                    0 => r.push(false),
                    1 => r.push(true),
                    _ => {
                        return Err(Error::InvalidMatrix(format!(
                            "entry ({i}, {j}) is {x}, not a bit"
                        )))
                    }
                }
            }
            bits.push(r);
        }
        Ok(Self { n, rows: bits })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rows: vec![vec![false; n]; n],
        }
    }

    pub fn from_graph(g: &DirectedGraph) -> Self {
        let mut m = Self::zeros(g.n());
        for &(u, v) in g.edges() {
            m.rows[u][v] = true;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        self.rows[i][j] = bit;
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect()
    }
}

fn sign_value(negative: bool) -> SignedValue {
    if negative {
        -BigInt::one()
    } else {
        BigInt::one()
    }
}

/// Sum over permutations moving exactly `k` points of
/// `sgn(pi) * prod a[i][pi(i)]` over the moved points.
pub fn pdet_direct(a: &ZeroOneMatrix, k: usize) -> Result<SignedValue> {
    let n = a.n();
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut total = BigInt::zero();
    for subset in k_subsets(n, k) {
        let mut image = vec![usize::MAX; k];
        let mut used = vec![false; k];
        derangements(a, &subset, 0, &mut image, &mut used, &mut |img| {
            let cycles = count_cycles(img);
            total += sign_value((k + cycles) % 2 == 1);
        });
    }
    Ok(total)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

// bijections of `subset` onto itself with no fixed point and every
// a[i][pi(i)] = 1; `image` holds positions within `subset`
fn derangements(
    a: &ZeroOneMatrix,
    subset: &[usize],
    pos: usize,
    image: &mut [usize],
    used: &mut [bool],
    visit: &mut dyn FnMut(&[usize]),
) {
    if pos == subset.len() {
        visit(image);
        return;
    }
    for j in 0..subset.len() {
        if j == pos || used[j] || !a.get(subset[pos], subset[j]) {
            continue;
        }
        used[j] = true;
        image[pos] = j;
        derangements(a, subset, pos + 1, image, used, visit);
        used[j] = false;
    }
}

fn count_cycles(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        cycles += 1;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
        }
    }
    cycles
}

/// Determinant by expansion over all `n!` permutations, signed by inversion
/// count.
pub fn det_permutation_expansion(a: &ZeroOneMatrix) -> SignedValue {
    let n = a.n();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    loop {
        if (0..n).all(|i| a.get(i, perm[i])) {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            total += sign_value(inversions % 2 == 1);
        }
        if !next_permutation(&mut perm) {
            return total;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `sum_k pdet(A, k)`, which is `det(A)` when every diagonal entry is 1.
pub fn det_cross_check(a: &ZeroOneMatrix) -> Result<SignedValue> {
    if let Some(i) = (0..a.n()).find(|&i| !a.get(i, i)) {
        return Err(Error::DiagonalNotUnit(i));
    }
    let mut total = BigInt::zero();
    for k in 0..=a.n() {
        total += pdet_direct(a, k)?;
    }
    Ok(total)
}

/// A closed walk `body[0] -> body[1] -> ... -> body[last] -> body[0]` whose
/// head `body[0]` is its least vertex and is not revisited.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clow {
    body: Vec<usize>,
}

impl Clow {
    pub fn new(body: Vec<usize>) -> Result<Self> {
        let Some(&head) = body.first() else {
            return Err(Error::InvalidClowSequence("empty clow".into()));
        };
        if body[1..].iter().any(|&v| v <= head) {
            return Err(Error::InvalidClowSequence(format!(
                "head {head} is not the strict minimum of {body:?}"
            )));
        }
        Ok(Self { body })
    }

    pub fn head(&self) -> usize {
        self.body[0]
    }

    pub fn body(&self) -> &[usize] {
        &self.body
    }

    pub fn edge_count(&self) -> usize {
        self.body.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let len = self.body.len();
        (0..len).map(move |i| (self.body[i], self.body[(i + 1) % len]))
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::new();
        self.body.iter().all(|v| seen.insert(*v))
    }

    fn has_self_loop(&self) -> bool {
        self.edges().any(|(u, v)| u == v)
    }
}

/// Clows with strictly ascending heads over vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClowSequence {
    n: usize,
    clows: Vec<Clow>,
}

impl ClowSequence {
    pub fn new(n: usize, clows: Vec<Clow>) -> Result<Self> {
        for w in clows.windows(2) {
            if w[0].head() >= w[1].head() {
                return Err(Error::InvalidClowSequence(
                    "heads not strictly ascending".into(),
                ));
            }
        }
        if let Some(&v) = clows.iter().flat_map(|c| c.body()).find(|&&v| v >= n) {
            return Err(Error::InvalidClowSequence(format!(
                "vertex {v} outside 0..{n}"
            )));
        }
        Ok(Self { n, clows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clows(&self) -> &[Clow] {
        &self.clows
    }

    pub fn total_edges(&self) -> usize {
        self.clows.iter().map(Clow::edge_count).sum()
    }

    /// Checks the extra conditions of a k-clow sequence: at least two edges
    /// per clow and no self-loop.
    pub fn check_k_clow(&self) -> Result<()> {
        for c in &self.clows {
            if c.edge_count() < 2 {
                return Err(Error::InvalidClowSequence(format!(
                    "clow {:?} has fewer than two edges",
                    c.body()
                )));
            }
            if c.has_self_loop() {
                return Err(Error::InvalidClowSequence(format!(
                    "clow {:?} uses a self-loop",
                    c.body()
                )));
            }
        }
        Ok(())
    }

    /// All clows are simple cycles and pairwise vertex-disjoint.
    pub fn is_cycle_cover(&self) -> bool {
        disjoint_simple(&self.clows)
    }

    /// Multiset of traversed edges, sorted.
    pub fn edge_multiset(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.clows.iter().flat_map(Clow::edges).collect();
        e.sort_unstable();
        e
    }

    pub fn weight_is_one(&self, a: &ZeroOneMatrix) -> bool {
        self.clows
            .iter()
            .flat_map(Clow::edges)
            .all(|(u, v)| a.get(u, v))
    }
}

fn disjoint_simple(clows: &[Clow]) -> bool {
    let mut seen = HashSet::new();
    clows.iter().flat_map(|c| c.body()).all(|v| seen.insert(*v))
}

/// `(-1)^(2n - k + r')` with `k` the total edge count and `r'` the number of
/// clows.
pub fn clow_sign(w: &ClowSequence) -> SignedValue {
    sign_value(clow_sign_negative(w))
}

fn clow_sign_negative(w: &ClowSequence) -> bool {
    (2 * w.n() + w.clows().len() - w.total_edges()) % 2 == 1
}

/// Accepted sequences split by parity: `positive` counts the runs ending with
/// parity `+1`, `negative` those ending with `-1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClowCounts {
    pub positive: BigUint,
    pub negative: BigUint,
}

impl ClowCounts {
    pub fn value(&self) -> SignedValue {
        BigInt::from(self.positive.clone()) - BigInt::from(self.negative.clone())
    }
}

struct ClowSearch<'a> {
    a: &'a ZeroOneMatrix,
    k: usize,
    limit: u64,
    states: u64,
    accepted: u64,
    clows: Vec<Vec<usize>>,
}

impl ClowSearch<'_> {
    fn tick(&mut self) -> Result<()> {
        self.states += 1;
        if self.states > self.limit.saturating_mul(64) {
            return Err(Error::LimitExceeded(self.limit));
        }
        Ok(())
    }

    // guess a new head strictly larger than `after`
    fn open(
        &mut self,
        after: Option<usize>,
        count: usize,
        negative: bool,
        visit: &mut dyn FnMut(&[Vec<usize>], bool),
    ) -> Result<()> {
        let first = after.map_or(0, |h| h + 1);
        for head in first..self.a.n() {
            self.clows.push(vec![head]);
            self.step(count, negative, visit)?;
            self.clows.pop();
        }
        Ok(())
    }

    // the current clow is the last one; `count` edges are used so far
    fn step(
        &mut self,
        count: usize,
        negative: bool,
        visit: &mut dyn FnMut(&[Vec<usize>], bool),
    ) -> Result<()> {
        self.tick()?;
        let clow = self.clows.last().expect("open clow");
        let (head, curr, ccount) = (clow[0], clow[clow.len() - 1], clow.len() - 1);
        if count >= self.k {
            return Ok(());
        }
        // a = 0: extend, leaving room for the closing edge
        if count + 2 <= self.k {
            for v in head + 1..self.a.n() {
                if v != curr && self.a.get(curr, v) {
                    self.clows.last_mut().expect("open clow").push(v);
                    self.step(count + 1, negative, visit)?;
                    self.clows.last_mut().expect("open clow").pop();
                }
            }
        }
        // a = 1: close
        if ccount >= 1 && self.a.get(curr, head) {
            let negative = !negative;
            let count = count + 1;
            if count == self.k {
                self.accepted += 1;
                if self.accepted > self.limit {
                    return Err(Error::LimitExceeded(self.limit));
                }
                visit(&self.clows, negative);
            } else if count + 2 <= self.k {
                self.open(Some(head), count, negative, visit)?;
            }
        }
        Ok(())
    }
}

fn search_clows(
    a: &ZeroOneMatrix,
    k: usize,
    limit: u64,
    visit: &mut dyn FnMut(&[Vec<usize>], bool),
) -> Result<()> {
    if limit == 0 {
        return Err(Error::InvalidArgument("limit must be positive".into()));
    }
    // parity starts at (-1)^(2n - k)
    let negative = k % 2 == 1;
    if k == 0 {
        visit(&[], negative);
        return Ok(());
    }
    let mut search = ClowSearch {
        a,
        k,
        limit,
        states: 0,
        accepted: 0,
        clows: Vec::new(),
    };
    search.open(None, 0, negative, visit)
}

/// Every k-clow sequence of weight one, in the order of the choice sequence:
/// head first, then per step "extend by the next successor" before "close".
pub fn enumerate_k_clow_sequences(
    a: &ZeroOneMatrix,
    k: usize,
    limit: u64,
) -> Result<Vec<ClowSequence>> {
    let mut out = Vec::new();
    search_clows(a, k, limit, &mut |clows, _| {
        out.push(ClowSequence {
            n: a.n(),
            clows: clows.iter().map(|b| Clow { body: b.clone() }).collect(),
        });
    })?;
    Ok(out)
}

/// Accepting runs split by final parity.
pub fn clow_machine_counts(a: &ZeroOneMatrix, k: usize, limit: u64) -> Result<ClowCounts> {
    let mut counts = ClowCounts::default();
    search_clows(a, k, limit, &mut |_, negative| {
        if negative {
            counts.negative += 1u32;
        } else {
            counts.positive += 1u32;
        }
    })?;
    Ok(counts)
}

/// `pdet(A, k)` as the signed count of k-clow sequences.
pub fn pdet_clow(a: &ZeroOneMatrix, k: usize, limit: u64) -> Result<SignedValue> {
    clow_machine_counts(a, k, limit).map(|c| c.value())
}

/// The involution: fixed on cycle covers, otherwise merges the first later
/// cycle met while traversing the critical clow, or splits off the first
/// simple cycle closed inside it.
pub fn eta(w: &ClowSequence) -> Result<ClowSequence> {
    w.check_k_clow()?;
    let clows = w.clows();
    let r = clows.len();
    // least j such that clows[j..] are disjoint simple cycles
    let mut j = r;
    while j > 0 && disjoint_simple(&clows[j - 1..]) {
        j -= 1;
    }
    if j == 0 {
        return Ok(w.clone());
    }
    let i = j - 1;
    let body = clows[i].body();
    let mut first_seen = std::collections::HashMap::new();
    for (p, &v) in body.iter().enumerate() {
        if let Some(later) = clows[i + 1..].iter().position(|c| c.body().contains(&v)) {
            let later = i + 1 + later;
            let cyc = clows[later].body();
            let at = cyc.iter().position(|&x| x == v).expect("contains v");
            let mut merged = body[..p].to_vec();
            merged.extend(cyc[at..].iter().chain(&cyc[..at]));
            merged.extend(&body[p..]);
            let mut out = clows.to_vec();
            out[i] = Clow { body: merged };
            out.remove(later);
            return Ok(ClowSequence { n: w.n, clows: out });
        }
        if let Some(&q) = first_seen.get(&v) {
            let segment: &[usize] = &body[q..p];
            let min_at = (0..segment.len())
                .min_by_key(|&x| segment[x])
                .expect("nonempty");
            let cycle: Vec<usize> = segment[min_at..]
                .iter()
                .chain(&segment[..min_at])
                .copied()
                .collect();
            let mut rest = body[..q].to_vec();
            rest.extend(&body[p..]);
            let mut out = clows.to_vec();
            out[i] = Clow { body: rest };
            let new = Clow { body: cycle };
            let pos = out.partition_point(|c| c.head() < new.head());
            out.insert(pos, new);
            return Ok(ClowSequence { n: w.n, clows: out });
        }
        first_seen.insert(v, p);
    }
    Err(Error::InvalidClowSequence(
        "critical clow is a simple cycle disjoint from the rest".into(),
    ))
}
