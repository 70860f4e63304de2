//! Count-preserving instance transforms between the problems, and a
//! verifier that replays both sides on a batch of instances.

use crate::error::{Error, Result};
use crate::fo::{Formula, QfFormula, RelationalStructure, Term, Vocabulary};
use crate::graph::{DirectedGraph, VertexColouring};
use crate::hom::{make_path_star, path_star_vocabulary, HomInstance, LayeredHomGraph};
use crate::pdet::ZeroOneMatrix;
use crate::walk::{check_colour_side_conditions, ReachInstance};
use num_bigint::BigInt;

/// What a reduction maps and how its output parameter is bounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionRecord {
    pub name: &'static str,
    pub source_problem: &'static str,
    pub target_problem: &'static str,
    pub parameter_bound: &'static str,
}

pub trait Reduction {
    type Source;
    type Target;

    fn record(&self) -> ReductionRecord;
    fn transform(&self, source: &Self::Source) -> Result<Self::Target>;
    fn source_parameter(&self, source: &Self::Source) -> usize;
    fn target_parameter(&self, target: &Self::Target) -> usize;
    /// Largest output parameter allowed for input parameter `k`.
    fn parameter_bound(&self, k: usize) -> usize;
}

/// Coloured reachability instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourReachInstance {
    pub colouring: VertexColouring,
    pub s: usize,
    pub t: usize,
    pub k: usize,
}

/// Model-counting instance.
#[derive(Debug, Clone)]
pub struct McInstance {
    pub formula: QfFormula,
    pub structure: RelationalStructure,
    pub k: usize,
}

/// Parameterised determinant instance whose value, times `recovery_sign`,
/// is the source count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdetInstance {
    pub matrix: ZeroOneMatrix,
    pub k: usize,
    pub recovery_sign: i8,
}

pub struct HomToReach;

impl Reduction for HomToReach {
    type Source = HomInstance;
    type Target = ReachInstance;

    fn record(&self) -> ReductionRecord {
        ReductionRecord {
            name: "hom-to-reach",
            source_problem: "p-#Hom(P*)",
            target_problem: "p-#Reach",
            parameter_bound: "k' = n + 2 <= k + 2",
        }
    }

    fn transform(&self, src: &HomInstance) -> Result<ReachInstance> {
        reduce_hom_to_reach(src.n, &src.target, src.k)
    }

    fn source_parameter(&self, src: &HomInstance) -> usize {
        src.k
    }

    fn target_parameter(&self, tgt: &ReachInstance) -> usize {
        tgt.k
    }

    fn parameter_bound(&self, k: usize) -> usize {
        k + 2
    }
}

/// The layered graph of `P_n* -> B` with `k' = n + 2`. When `n > k` the
/// source count is 0 by the gate and a walk-free two-vertex graph is
/// returned.
pub fn reduce_hom_to_reach(n: usize, b: &RelationalStructure, k: usize) -> Result<ReachInstance> {
    let layered = LayeredHomGraph::build(n, b)?;
    if n > k {
        return ReachInstance::new(DirectedGraph::new(2, Vec::new())?, 0, 1, 2);
    }
    Ok(layered.reach_instance())
}

pub struct ReachColourToHom;

impl Reduction for ReachColourToHom {
    type Source = ColourReachInstance;
    type Target = HomInstance;

    fn record(&self) -> ReductionRecord {
        ReductionRecord {
            name: "reachcolour-to-hom",
            source_problem: "p-#Reach^colour",
            target_problem: "p-#Hom(P*)",
            parameter_bound: "k' = k",
        }
    }

    fn transform(&self, src: &ColourReachInstance) -> Result<HomInstance> {
        reduce_reach_colour_to_hom(&src.colouring, src.s, src.t, src.k)
    }

    fn source_parameter(&self, src: &ColourReachInstance) -> usize {
        src.k
    }

    fn target_parameter(&self, tgt: &HomInstance) -> usize {
        tgt.k
    }

    fn parameter_bound(&self, k: usize) -> usize {
        k
    }
}

/// Pattern `P_k*` and a target whose edges are the colour-increasing edges
/// of `g` closed under reversal, with `C_1 = {s}`, `C_k = {t}` and
/// `C_i = {u : colour(u) = i}` in between.
pub fn reduce_reach_colour_to_hom(
    vc: &VertexColouring,
    s: usize,
    t: usize,
    k: usize,
) -> Result<HomInstance> {
    check_colour_side_conditions(vc, s, t)
        .map_err(|e| Error::SideConditionViolated(e.to_string()))?;
    if vc.m() != k {
        return Err(Error::SideConditionViolated(format!(
            "number of colours {} differs from k = {k}",
            vc.m()
        )));
    }
    make_path_star(k)?;
    let g = vc.graph();
    let mut e = Vec::new();
    for &(u, v) in g.edges() {
        if vc.colour(v) == vc.colour(u) + 1 {
            e.push(vec![u, v]);
            e.push(vec![v, u]);
        }
    }
    let mut rels = vec![e];
    for i in 1..=k {
        let class = if i == 1 {
            vec![vec![s]]
        } else if i == k {
            vec![vec![t]]
        } else {
            (0..g.n())
                .filter(|&u| vc.colour(u) == i)
                .map(|u| vec![u])
                .collect()
        };
        rels.push(class);
    }
    let target = RelationalStructure::new(path_star_vocabulary(k), g.n(), rels, Vec::new())?;
    Ok(HomInstance { n: k, target, k })
}

pub struct ReachToMc;

impl Reduction for ReachToMc {
    type Source = ReachInstance;
    type Target = McInstance;

    fn record(&self) -> ReductionRecord {
        ReductionRecord {
            name: "reach-to-mc",
            source_problem: "p-#Reach",
            target_problem: "p-#MC(Sigma_0, 1-local, arity 2)",
            parameter_bound: "k' = |phi| = k + 2 <= 2k",
        }
    }

    fn transform(&self, src: &ReachInstance) -> Result<McInstance> {
        reduce_reach_to_mc(&src.graph, src.s, src.t, src.k)
    }

    fn source_parameter(&self, src: &ReachInstance) -> usize {
        src.k
    }

    fn target_parameter(&self, tgt: &McInstance) -> usize {
        tgt.k
    }

    fn parameter_bound(&self, k: usize) -> usize {
        2 * k
    }
}

/// The structure `(V, E, s, t)` of `g` and the conjunction
/// `x1 = s, E(x1, x2), ..., E(x(k-1), xk), xk = t`.
pub fn reduce_reach_to_mc(g: &DirectedGraph, s: usize, t: usize, k: usize) -> Result<McInstance> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if k < 2 {
        return Err(Error::PreconditionViolated(format!("k = {k}; need k >= 2")));
    }
    if g.n() == 0 {
        return Err(Error::InvalidStructure("empty graph".into()));
    }
    let vocab = Vocabulary::new(vec![("E".into(), 2)], vec!["s".into(), "t".into()])?;
    let tuples = g.edges().iter().map(|&(u, v)| vec![u, v]).collect();
    let structure = RelationalStructure::new(vocab, g.n(), vec![tuples], vec![s, t])?;
    let var = |i: usize| format!("x{i}");
    let mut conj = vec![Formula::eq(Term::Var(var(1)), Term::constant("s"))];
    for i in 1..k {
        conj.push(Formula::Atom {
            relation: "E".into(),
            args: vec![Term::Var(var(i)), Term::Var(var(i + 1))],
        });
    }
    conj.push(Formula::eq(Term::Var(var(k)), Term::constant("t")));
    let formula = QfFormula::new(Formula::And(conj))?;
    let k = formula.size();
    Ok(McInstance {
        formula,
        structure,
        k,
    })
}

pub struct ReachToPdet;

impl Reduction for ReachToPdet {
    type Source = ReachInstance;
    type Target = PdetInstance;

    fn record(&self) -> ReductionRecord {
        ReductionRecord {
            name: "reach-to-pdet",
            source_problem: "p-#Reach on DAGs",
            target_problem: "pdet",
            parameter_bound: "k' = k",
        }
    }

    fn transform(&self, src: &ReachInstance) -> Result<PdetInstance> {
        reduce_reach_to_pdet(&src.graph, src.s, src.t, src.k)
    }

    fn source_parameter(&self, src: &ReachInstance) -> usize {
        src.k
    }

    fn target_parameter(&self, tgt: &PdetInstance) -> usize {
        tgt.k
    }

    fn parameter_bound(&self, k: usize) -> usize {
        k
    }
}

/// Adjacency of `g` plus the back edge `(t, s)`. Every cycle then passes
/// through the back edge, so `pdet(A', k) = (-1)^(2n - k + 1)` times the
/// number of `s`-`t` paths on `k` vertices.
pub fn reduce_reach_to_pdet(
    g: &DirectedGraph,
    s: usize,
    t: usize,
    k: usize,
) -> Result<PdetInstance> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if s == t {
        return Err(Error::SEqualsT);
    }
    if !g.is_dag() {
        return Err(Error::NotADag);
    }
    if k == 0 {
        return Err(Error::PreconditionViolated(
            "k = 0: pdet(A', 0) = 1 while no walk has zero vertices".into(),
        ));
    }
    let mut matrix = ZeroOneMatrix::from_graph(g);
    matrix.set(t, s, true);
    // (-1)^(2n - k + 1) depends only on the parity of k
    let recovery_sign = if k % 2 == 1 { 1 } else { -1 };
    Ok(PdetInstance {
        matrix,
        k,
        recovery_sign,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsimonyFailure {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsimonyReport {
    pub record: ReductionRecord,
    pub cases: usize,
    pub failures: Vec<ParsimonyFailure>,
}

impl ParsimonyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `red` on each instance and compares the source count with the
/// target count, and the output parameter with its bound.
pub fn verify_parsimonious<R: Reduction>(
    red: &R,
    instances: &[R::Source],
    source_oracle: impl Fn(&R::Source) -> Result<BigInt>,
    target_oracle: impl Fn(&R::Target) -> Result<BigInt>,
) -> ParsimonyReport {
    let mut failures = Vec::new();
    for (index, src) in instances.iter().enumerate() {
        let fail = |reason: String| ParsimonyFailure { index, reason };
        let target = match red.transform(src) {
            Ok(t) => t,
            Err(e) => {
                failures.push(fail(format!("transform failed: {e}")));
                continue;
            }
        };
        let (k, k2) = (red.source_parameter(src), red.target_parameter(&target));
        if k2 > red.parameter_bound(k) {
            failures.push(fail(format!(
                "output parameter {k2} exceeds bound {}",
                red.parameter_bound(k)
            )));
        }
        match (source_oracle(src), target_oracle(&target)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => failures.push(fail(format!("source count {a}, target count {b}"))),
            (Err(e), _) | (_, Err(e)) => failures.push(fail(format!("oracle failed: {e}"))),
        }
    }
    ParsimonyReport {
        record: red.record(),
        cases: instances.len(),
        failures,
    }
}

/// `recovery_sign * pdet(A', k)`, using the clow expansion when `k > n`.
pub fn pdet_target_count(tgt: &PdetInstance, limit: u64) -> Result<BigInt> {
    let value = if tgt.k <= tgt.matrix.n() {
        crate::pdet::pdet_direct(&tgt.matrix, tgt.k)?
    } else {
        crate::pdet::pdet_clow(&tgt.matrix, tgt.k, limit)?
    };
    Ok(value * BigInt::from(tgt.recovery_sign))
}
