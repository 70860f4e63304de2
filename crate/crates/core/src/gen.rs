//! Seeded random instance generators for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bp::{validate_bp, BranchingProgram, NodeLabel, RawProgram};
use crate::cnf::{EdgeCnf, Literal};
use crate::fo::{Formula, RelationalStructure, Term, Vocabulary};
use crate::graph::{DirectedGraph, VertexColouring};
use crate::hom::path_star_vocabulary;
use crate::pdet::ZeroOneMatrix;

/// Each ordered pair (self-loops included) is an edge with probability `p`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedGraph {
    let edges = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    DirectedGraph::new(n, edges).expect("pairs are distinct and in range")
}

/// Every vertex gets between 0 and `b` distinct successors.
pub fn random_bounded_graph<R: Rng>(rng: &mut R, n: usize, b: usize) -> DirectedGraph {
    let mut edges = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    for u in 0..n {
        let d = rng.gen_range(0..=b.min(n));
        for &v in all.choose_multiple(rng, d) {
            edges.push((u, v));
        }
    }
    DirectedGraph::new(n, edges).expect("successors are distinct")
}

/// Acyclic: edges only go forward in a random vertex order.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    DirectedGraph::new(n, edges).expect("pairs are distinct")
}

/// Colours in `1..=m` with `colour(s) = 1` and `colour(t) = m`; needs
/// `s != t` unless `m = 1`.
pub fn random_colouring<R: Rng>(
    rng: &mut R,
    g: DirectedGraph,
    m: usize,
    s: usize,
    t: usize,
) -> VertexColouring {
    let mut colours: Vec<usize> = (0..g.n()).map(|_| rng.gen_range(1..=m)).collect();
    colours[s] = 1;
    colours[t] = m;
    VertexColouring::new(g, colours).expect("colours are positive and complete")
}

/// Up to `max_clauses` clauses of up to three literals over the edge ids;
/// an empty clause shows up now and then.
pub fn random_cnf<R: Rng>(rng: &mut R, edge_count: usize, max_clauses: usize) -> EdgeCnf {
    if edge_count == 0 {
        return EdgeCnf::empty();
    }
    let clauses = (0..rng.gen_range(0..=max_clauses))
        .map(|_| {
            let len = if rng.gen_bool(0.05) {
                0
            } else {
                rng.gen_range(1..=3)
            };
            (0..len)
                .map(|_| Literal {
                    edge: rng.gen_range(0..edge_count),
                    positive: rng.gen_bool(0.5),
                })
                .collect()
        })
        .collect();
    EdgeCnf::new(clauses)
}

/// Vocabulary `E/2, P/1` with constant `c`, random interpretation.
pub fn random_fo_structure<R: Rng>(rng: &mut R, universe: usize) -> RelationalStructure {
    let vocab = Vocabulary::new(vec![("E".into(), 2), ("P".into(), 1)], vec!["c".into()])
        .expect("distinct symbols");
    let e = (0..universe)
        .flat_map(|u| (0..universe).map(move |v| vec![u, v]))
        .filter(|_| rng.gen_bool(0.4))
        .collect();
    let p = (0..universe)
        .filter(|_| rng.gen_bool(0.5))
        .map(|u| vec![u])
        .collect();
    let c = rng.gen_range(0..universe);
    RelationalStructure::new(vocab, universe, vec![e, p], vec![c]).expect("in range")
}

/// A formula over `E/2, P/1, c` whose atoms, in depth-first order, only
/// share variables within distance `r`, with at most `max_vars` variables.
/// `max_arity < 2` leaves out `E`.
pub fn random_local_formula<R: Rng>(
    rng: &mut R,
    r: usize,
    max_vars: usize,
    max_arity: usize,
) -> Formula {
    let atoms = rng.gen_range(1..=5);
    let mut first: Vec<usize> = Vec::new();
    let mut leaves = Vec::with_capacity(atoms);
    for i in 0..atoms {
        let term = |rng: &mut R, first: &mut Vec<usize>| {
            if rng.gen_bool(0.1) {
                return Term::constant("c");
            }
            let usable: Vec<usize> = (0..first.len()).filter(|&x| first[x] + r >= i).collect();
            if first.len() < max_vars && (usable.is_empty() || rng.gen_bool(0.4)) {
                first.push(i);
                Term::Var(format!("v{}", first.len() - 1))
            } else if let Some(&x) = usable.choose(rng) {
                Term::Var(format!("v{x}"))
            } else {
                Term::constant("c")
            }
        };
        let kind = rng.gen_range(0..3);
        let leaf = if kind == 0 && max_arity >= 2 {
            let a = term(rng, &mut first);
            let b = term(rng, &mut first);
            Formula::Atom {
                relation: "E".into(),
                args: vec![a, b],
            }
        } else if kind == 1 && max_arity >= 1 {
            Formula::Atom {
                relation: "P".into(),
                args: vec![term(rng, &mut first)],
            }
        } else {
            let a = term(rng, &mut first);
            let b = term(rng, &mut first);
            Formula::eq(a, b)
        };
        leaves.push(leaf);
    }
    tree_over(rng, leaves)
}

// random connective tree whose leaves, left to right, are `leaves`
fn tree_over<R: Rng>(rng: &mut R, mut leaves: Vec<Formula>) -> Formula {
    let node = if leaves.len() == 1 {
        leaves.pop().expect("one leaf")
    } else {
        let parts = rng.gen_range(2..=leaves.len().min(3));
        let mut cuts: Vec<usize> = (1..leaves.len()).collect::<Vec<_>>();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts[..parts - 1].to_vec();
        cuts.sort_unstable();
        let mut children = Vec::new();
        let mut rest = leaves;
        for &c in cuts.iter().rev() {
            let tail = rest.split_off(c);
            children.push(tree_over(rng, tail));
        }
        children.push(tree_over(rng, rest));
        children.reverse();
        if rng.gen_bool(0.5) {
            Formula::And(children)
        } else {
            Formula::Or(children)
        }
    };
    if rng.gen_bool(0.25) {
        Formula::negate(node)
    } else {
        node
    }
}

/// Target over `(E, C_1, ..., C_n)`: random (not necessarily symmetric)
/// edges, and every element joins each colour class with probability 0.4.
pub fn random_hom_target<R: Rng>(rng: &mut R, n: usize, universe: usize) -> RelationalStructure {
    let mut rels = vec![(0..universe)
        .flat_map(|u| (0..universe).map(move |v| vec![u, v]))
        .filter(|_| rng.gen_bool(0.55))
        .collect::<Vec<_>>()];
    for _ in 0..n {
        rels.push(
            (0..universe)
                .filter(|_| rng.gen_bool(0.4))
                .map(|u| vec![u])
                .collect(),
        );
    }
    RelationalStructure::new(path_star_vocabulary(n), universe, rels, Vec::new()).expect("in range")
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, p: f64) -> ZeroOneMatrix {
    let mut a = ZeroOneMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, rng.gen_bool(p));
        }
    }
    a
}

pub fn random_unit_diagonal_matrix<R: Rng>(rng: &mut R, n: usize, p: f64) -> ZeroOneMatrix {
    let mut a = random_matrix(rng, n, p);
    for i in 0..n {
        a.set(i, i, true);
    }
    a
}

/// A program with `inner` layers between source layer and sink, deterministic
/// given `y`, in which every path reads `y` variables in strictly increasing
/// order. Reads on separate branches are unconstrained, so the layering is
/// often not certified.
pub fn random_ordered_program<R: Rng>(
    rng: &mut R,
    num_x: usize,
    num_y: usize,
    inner: usize,
) -> BranchingProgram {
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    layers.push(vec![next]);
    next += 1;
    for _ in 0..inner {
        let width = rng.gen_range(1..=3);
        layers.push((next..next + width).collect());
        next += width;
    }
    let sink = next;
    layers.push(vec![sink]);
    let count = sink + 1;
    let mut layer_of = vec![0; count];
    for (i, l) in layers.iter().enumerate() {
        for &u in l {
            layer_of[u] = i;
        }
    }
    let last = layers.len() - 1;
    let mut labels = vec![None; count];
    let mut edges = Vec::new();
    // least y index each node may still read
    let mut floor = vec![0usize; count];
    for l in 0..last {
        for &u in &layers[l] {
            if rng.gen_bool(0.08) && u != 0 {
                continue; // dead end
            }
            let roll = rng.gen_range(0..10);
            let label = if roll < 4 && floor[u] < num_y {
                NodeLabel::Y(rng.gen_range(floor[u]..num_y))
            } else if roll < 8 && num_x > 0 {
                NodeLabel::X(rng.gen_range(0..num_x))
            } else {
                NodeLabel::Pass
            };
            labels[u] = Some(label);
            let after = match label {
                NodeLabel::Y(j) => j + 1,
                _ => floor[u],
            };
            let target = |rng: &mut R| {
                let to_layer = if rng.gen_bool(0.7) {
                    l + 1
                } else {
                    rng.gen_range(l + 1..=last)
                };
                *layers[to_layer].choose(rng).expect("layers are nonempty")
            };
            let bits: Vec<Option<i64>> = match label {
                NodeLabel::Pass => vec![None],
                _ => [0, 1]
                    .into_iter()
                    .filter(|_| rng.gen_bool(0.85))
                    .map(Some)
                    .collect(),
            };
            for bit in bits {
                let v = target(rng);
                floor[v] = floor[v].max(after);
                edges.push((u, v, bit));
            }
        }
    }
    validate_bp(RawProgram {
        layers,
        labels,
        edges,
        num_x,
        num_y,
        source: 0,
        sink,
    })
    .expect("generator respects the layering")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::check_order_property;
    use crate::fo::QfFormula;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn formulas_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r = rng.gen_range(0..=2);
            let f = QfFormula::new(random_local_formula(&mut rng, r, 4, 2)).unwrap();
            assert!(f.locality_radius() <= r);
            assert!(f.max_arity() <= 2);
            assert!(f.free_variables().len() <= 4);
        }
    }

    #[test]
    fn programs_are_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let p = random_ordered_program(&mut rng, 2, 3, 3);
            check_order_property(&p).unwrap();
            p.check_deterministic_given_y().unwrap();
        }
    }

    #[test]
    fn dags_are_acyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            assert!(random_dag(&mut rng, 6, 0.5).is_dag());
        }
    }
}
