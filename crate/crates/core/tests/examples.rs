//! Worked examples, each checked against an oracle written here from the
//! definitions rather than taken from the library.

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paracount::bp::{
    bp_count_acc, bp_count_fast, check_read_once_certified, stagger, validate_bp, NodeLabel,
    RawProgram,
};
use paracount::cnf::{
    count_cycle_cover2_cnf, count_log_reach2_cnf, enumerate_cycle_covers, EdgeCnf,
};
use paracount::fo::{
    count_mc, count_mc_local, Formula, QfFormula, RelationalStructure, Term, Vocabulary,
};
use paracount::gen;
use paracount::hom::{count_hom_oracle, count_hom_path_star, make_path_star};
use paracount::pdet::{
    clow_sign, det_cross_check, enumerate_k_clow_sequences, eta, pdet_clow, pdet_direct, Clow,
    ClowSequence, ZeroOneMatrix,
};
use paracount::reductions::reduce_reach_to_pdet;
use paracount::walk::{
    count_log_reach_b, count_log_walk_b, count_reach, count_reach_colour, ReachInstance,
};
use paracount::{DirectedGraph, VertexColouring};

const LIMIT: u64 = 10_000_000;

fn diamond() -> DirectedGraph {
    DirectedGraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
}

// all vertex sequences of the given edge length, tested edge by edge
fn naive_walks(g: &DirectedGraph, s: usize, t: usize, edges: usize) -> Vec<Vec<usize>> {
    fn go(
        g: &DirectedGraph,
        t: usize,
        left: usize,
        walk: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *walk.last().unwrap();
        if left == 0 {
            if u == t {
                out.push(walk.clone());
            }
            return;
        }
        for v in 0..g.n() {
            if g.has_edge(u, v) {
                walk.push(v);
                go(g, t, left - 1, walk, out);
                walk.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, t, edges, &mut vec![s], &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn cycles_of(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for i in 0..p.len() {
        if !seen[i] && p[i] != i {
            count += 1;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = p[j];
            }
        }
    }
    count
}

// sum over permutations moving exactly k points of (-1)^(k + cycles)
fn naive_pdet(a: &ZeroOneMatrix, k: usize) -> BigInt {
    let mut total = BigInt::from(0);
    for p in permutations(a.n()) {
        let moved: Vec<usize> = (0..a.n()).filter(|&i| p[i] != i).collect();
        if moved.len() != k || !moved.iter().all(|&i| a.get(i, p[i])) {
            continue;
        }
        if (k + cycles_of(&p)).is_multiple_of(2) {
            total += 1;
        } else {
            total -= 1;
        }
    }
    total
}

#[test]
fn walk_matrix_matches_naive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let g = gen::random_graph(&mut rng, 5, 0.4);
        let m = g.walk_count_matrix(4);
        for (s, row) in m.iter().enumerate() {
            for (t, entry) in row.iter().enumerate() {
                assert_eq!(*entry, BigUint::from(naive_walks(&g, s, t, 4).len()));
            }
        }
    }
}

#[test]
fn reach_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let g = gen::random_graph(&mut rng, 6, 0.4);
        let (s, t) = (rng.gen_range(0..6), rng.gen_range(0..6));
        let want = naive_walks(&g, s, t, 4).len();
        let got = count_reach(&ReachInstance::new(g, s, t, 5).unwrap());
        assert_eq!(got, BigUint::from(want));
    }
}

#[test]
fn log_reach_and_walk_on_random_bounded_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let g = gen::random_bounded_graph(&mut rng, 8, 2);
        let (s, t) = (rng.gen_range(0..8), rng.gen_range(0..8));
        let m5 = g.walk_count_matrix(5);
        assert_eq!(count_log_reach_b(&g, s, t, 5, 3, 2).unwrap(), m5[s][t]);
        let m4 = g.walk_count_matrix(4);
        let total: BigUint = m4.iter().flatten().sum();
        assert_eq!(count_log_walk_b(&g, 4, 2, 2).unwrap(), total);
        // 5 edges against a bound of 1 * ceil(log2 8) = 3
        assert_eq!(
            count_log_reach_b(&g, s, t, 5, 1, 2).unwrap(),
            BigUint::from(0u32)
        );
    }
}

#[test]
fn reach_colour_examples() {
    let path = DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
    let vc = VertexColouring::new(path, vec![1, 2, 3]).unwrap();
    assert_eq!(
        count_reach_colour(&vc, 0, 2, 3).unwrap(),
        BigUint::from(1u32)
    );
    assert_eq!(
        count_reach_colour(&vc, 0, 2, 2).unwrap(),
        BigUint::from(0u32)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let g = gen::random_graph(&mut rng, 6, 0.5);
        let vc = gen::random_colouring(&mut rng, g, 4, 0, 5);
        let want = naive_walks(vc.graph(), 0, 5, 3)
            .iter()
            .filter(|w| w.iter().enumerate().all(|(i, &v)| vc.colour(v) == i + 1))
            .count();
        assert_eq!(
            count_reach_colour(&vc, 0, 5, 4).unwrap(),
            BigUint::from(want)
        );
    }
}

#[test]
fn reach2cnf_diamond() {
    let g = diamond();
    // edge (0, 1) has id 0
    let cnf = EdgeCnf::from_dimacs_clauses(&[vec![-1]]).unwrap();
    let want = naive_walks(&g, 0, 3, 2)
        .iter()
        .filter(|w| !w.windows(2).any(|p| p == [0, 1]))
        .count();
    assert_eq!(want, 1);
    assert_eq!(
        count_log_reach2_cnf(&g, 0, 3, &cnf, 2, 1).unwrap(),
        BigUint::from(1u32)
    );
    assert_eq!(
        count_log_reach2_cnf(&g, 0, 3, &cnf, 2, 0).unwrap(),
        BigUint::from(0u32)
    );
}

#[test]
fn cycle_cover_two_vertex_examples() {
    let g = DirectedGraph::new(2, vec![(0, 0), (1, 1), (0, 1), (1, 0)]).unwrap();
    // permutations whose every arc is an edge
    let covers: Vec<Vec<usize>> = permutations(2)
        .into_iter()
        .filter(|p| (0..2).all(|i| g.has_edge(i, p[i])))
        .collect();
    assert_eq!(covers.len(), 2);
    assert_eq!(enumerate_cycle_covers(&g, LIMIT).unwrap().len(), 2);
    let empty = EdgeCnf::empty();
    assert_eq!(
        count_cycle_cover2_cnf(&g, &empty, 2, 1).unwrap(),
        BigUint::from(1u32)
    );
    assert_eq!(
        count_cycle_cover2_cnf(&g, &empty, 2, 0).unwrap(),
        BigUint::from(1u32)
    );
    let unsat = EdgeCnf::new(vec![vec![]]);
    assert_eq!(
        count_cycle_cover2_cnf(&g, &unsat, 2, 1).unwrap(),
        BigUint::from(0u32)
    );
}

fn digraph_structure(n: usize, edges: &[(usize, usize)]) -> RelationalStructure {
    let vocab = Vocabulary::new(vec![("E".into(), 2)], vec![]).unwrap();
    let tuples = edges.iter().map(|&(u, v)| vec![u, v]).collect();
    RelationalStructure::new(vocab, n, vec![tuples], vec![]).unwrap()
}

fn eval(f: &Formula, a: &RelationalStructure, value: &dyn Fn(&Term) -> usize) -> bool {
    match f {
        Formula::And(c) => c.iter().all(|g| eval(g, a, value)),
        Formula::Or(c) => c.iter().any(|g| eval(g, a, value)),
        Formula::Not(g) => !eval(g, a, value),
        Formula::Atom { relation, args } => {
            let tuple: Vec<usize> = args.iter().map(value).collect();
            a.holds(relation, &tuple)
        }
        Formula::Eq([x, y]) => value(x) == value(y),
    }
}

// assignments to the named variables, by odometer
fn naive_mc(f: &Formula, vars: &[&str], a: &RelationalStructure) -> usize {
    let u = a.universe_size();
    let mut count = 0;
    for code in 0..u.pow(vars.len() as u32) {
        let digits: Vec<usize> = (0..vars.len())
            .map(|i| code / u.pow(i as u32) % u)
            .collect();
        let value = |t: &Term| match t {
            Term::Var(x) => digits[vars.iter().position(|v| v == x).unwrap()],
            Term::Const(c) => a.constant(c).unwrap(),
        };
        count += usize::from(eval(f, a, &value));
    }
    count
}

#[test]
fn locality_of_a_spread_formula() {
    let atoms = [["x1", "x2"], ["x3", "x4"], ["x1", "x4"]];
    let mut radius = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if atoms[i].iter().any(|v| atoms[j].contains(v)) {
                radius = radius.max(j - i);
            }
        }
    }
    assert_eq!(radius, 2);
    let phi = QfFormula::new(Formula::And(
        atoms.iter().map(|a| Formula::atom("E", a)).collect(),
    ))
    .unwrap();
    assert_eq!(phi.locality_radius(), radius);
}

#[test]
fn model_counting_examples() {
    let a = digraph_structure(3, &[(0, 1), (1, 2), (2, 0)]);
    let edge = QfFormula::new(Formula::atom("E", &["x1", "x2"])).unwrap();
    assert_eq!(count_mc(&edge, &a, 1).unwrap(), BigUint::from(3u32));
    assert_eq!(count_mc(&edge, &a, 2).unwrap(), BigUint::from(0u32));
    let four = digraph_structure(4, &[]);
    let same = QfFormula::new(Formula::eq(Term::var("x1"), Term::var("x2"))).unwrap();
    assert_eq!(count_mc(&same, &four, 1).unwrap(), BigUint::from(4u32));
}

#[test]
fn local_count_on_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let names = ["x1", "x2", "x3", "x4"];
    for _ in 0..10 {
        let g = gen::random_graph(&mut rng, 4, 0.5);
        let a = digraph_structure(4, g.edges());
        let chain = Formula::And(names.windows(2).map(|w| Formula::atom("E", w)).collect());
        let phi = QfFormula::new(chain.clone()).unwrap();
        let k = phi.size();
        let want = naive_mc(&chain, &names, &a);
        assert_eq!(count_mc(&phi, &a, k).unwrap(), BigUint::from(want));
        assert_eq!(
            count_mc_local(&phi, &a, k, 1, 2).unwrap(),
            BigUint::from(want)
        );
    }
}

#[test]
fn hom_path_star_against_naive_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..20 {
        let n = 3;
        let universe = rng.gen_range(1..=5);
        let b = gen::random_hom_target(&mut rng, n, universe);
        // tuples (v_1, ..., v_n) with C_i(v_i) and E both ways along the path
        let mut want = 0;
        for code in 0..universe.pow(n as u32) {
            let v: Vec<usize> = (0..n)
                .map(|i| code / universe.pow(i as u32) % universe)
                .collect();
            let coloured = (0..n).all(|i| b.holds(&format!("C_{}", i + 1), &[v[i]]));
            let linked = v
                .windows(2)
                .all(|p| b.holds("E", &[p[0], p[1]]) && b.holds("E", &[p[1], p[0]]));
            want += usize::from(coloured && linked);
        }
        let pattern = make_path_star(n).unwrap();
        assert_eq!(
            count_hom_oracle(pattern.structure(), &b, LIMIT).unwrap(),
            BigUint::from(want)
        );
        assert_eq!(count_hom_path_star(n, &b, 3).unwrap(), BigUint::from(want));
        assert_eq!(count_hom_path_star(n, &b, 2).unwrap(), BigUint::from(0u32));
    }
}

fn matrix(rows: &[&[u8]]) -> ZeroOneMatrix {
    ZeroOneMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

#[test]
fn pdet_small_examples() {
    let ones = matrix(&[&[1, 1], &[1, 1]]);
    assert_eq!(pdet_direct(&ones, 2).unwrap(), BigInt::from(-1));
    assert_eq!(naive_pdet(&ones, 2), BigInt::from(-1));
    assert_eq!(pdet_clow(&ones, 2, LIMIT).unwrap(), BigInt::from(-1));
    let swap = matrix(&[&[0, 1], &[1, 0]]);
    assert_eq!(pdet_clow(&swap, 2, LIMIT).unwrap(), BigInt::from(-1));
    assert_eq!(pdet_direct(&swap, 2).unwrap(), BigInt::from(-1));
    // 1 + 0 + (-1)
    assert_eq!(det_cross_check(&ones).unwrap(), BigInt::from(0));
}

#[test]
fn clow_enumeration_examples() {
    let swap = matrix(&[&[0, 1], &[1, 0]]);
    let seqs = enumerate_k_clow_sequences(&swap, 2, LIMIT).unwrap();
    assert_eq!(seqs.len(), 1);
    assert_eq!(seqs[0].clows()[0].body(), &[0, 1]);

    let both_ways = matrix(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
    let seqs = enumerate_k_clow_sequences(&both_ways, 2, LIMIT).unwrap();
    let mut bodies: Vec<Vec<usize>> = seqs.iter().map(|w| w.clows()[0].body().to_vec()).collect();
    bodies.sort();
    assert_eq!(bodies, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
}

#[test]
fn clow_sign_instances() {
    let one = ClowSequence::new(2, vec![Clow::new(vec![0, 1]).unwrap()]).unwrap();
    assert_eq!(clow_sign(&one), BigInt::from(-1));
    let two = ClowSequence::new(
        4,
        vec![
            Clow::new(vec![0, 1]).unwrap(),
            Clow::new(vec![2, 3]).unwrap(),
        ],
    )
    .unwrap();
    assert_eq!(clow_sign(&two), BigInt::from(1));
    assert_eq!(
        clow_sign(&ClowSequence::new(3, vec![]).unwrap()),
        BigInt::from(1)
    );
}

#[test]
fn eta_examples() {
    let cycle = ClowSequence::new(3, vec![Clow::new(vec![0, 1, 2]).unwrap()]).unwrap();
    assert_eq!(eta(&cycle).unwrap(), cycle);
    let revisit = ClowSequence::new(3, vec![Clow::new(vec![0, 1, 2, 1]).unwrap()]).unwrap();
    let split = eta(&revisit).unwrap();
    assert_eq!(split.clows().len(), 2);
    assert_eq!(clow_sign(&split), -clow_sign(&revisit));
    assert_eq!(split.total_edges(), revisit.total_edges());
    assert_eq!(eta(&split).unwrap(), revisit);
}

#[test]
fn pdet_clow_against_naive_up_to_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=6 {
        for _ in 0..3 {
            let a = gen::random_matrix(&mut rng, n, 0.5);
            for k in 0..=n {
                let want = naive_pdet(&a, k);
                assert_eq!(pdet_direct(&a, k).unwrap(), want);
                assert_eq!(pdet_clow(&a, k, LIMIT).unwrap(), want);
            }
        }
    }
}

#[test]
fn back_edge_on_a_path() {
    let path = DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
    let inst = reduce_reach_to_pdet(&path, 0, 2, 3).unwrap();
    assert_eq!(inst.recovery_sign, 1);
    // the back edge closes the 3-cycle 0 -> 1 -> 2 -> 0
    assert_eq!(naive_pdet(&inst.matrix, 3), BigInt::from(1));
    assert_eq!(pdet_direct(&inst.matrix, 3).unwrap(), BigInt::from(1));
    assert_eq!(
        count_reach(&ReachInstance::new(path, 0, 2, 3).unwrap()),
        BigUint::from(1u32)
    );
}

fn chain_program(reads: &[usize], num_y: usize) -> RawProgram {
    let n = reads.len();
    let mut labels: Vec<Option<NodeLabel>> = reads.iter().map(|&j| Some(NodeLabel::Y(j))).collect();
    labels.push(None);
    let edges = (0..n)
        .flat_map(|i| [(i, i + 1, Some(0)), (i, i + 1, Some(1))])
        .collect();
    RawProgram {
        layers: (0..=n).map(|i| vec![i]).collect(),
        labels,
        edges,
        num_x: 0,
        num_y,
        source: 0,
        sink: n,
    }
}

#[test]
fn bp_examples() {
    let p = validate_bp(chain_program(&[0], 2)).unwrap();
    // y_1 may take either edge and y_2 is never read: all four y pass
    assert_eq!(bp_count_acc(&p, &[]).unwrap(), BigUint::from(4u32));
    assert_eq!(check_read_once_certified(&p).unwrap().cut_layers.len(), 3);
    assert_eq!(bp_count_fast(&p, &[]).unwrap(), BigUint::from(4u32));

    let reread = validate_bp(chain_program(&[0, 1, 0], 2)).unwrap();
    assert_eq!(
        stagger(&reread).unwrap_err().name(),
        "order-property-violated"
    );

    let ordered = validate_bp(chain_program(&[0, 1], 2)).unwrap();
    assert!(check_read_once_certified(&ordered).is_ok());
    assert_eq!(stagger(&ordered).unwrap(), ordered);
}

#[test]
fn stagger_on_random_ordered_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..30 {
        let p = gen::random_ordered_program(&mut rng, 2, 3, 3);
        let q = stagger(&p).unwrap();
        assert!(check_read_once_certified(&q).is_ok());
        for bits in 0..4u8 {
            let x = [bits & 1 == 1, bits & 2 == 2];
            let acc = bp_count_acc(&p, &x).unwrap();
            assert_eq!(bp_count_acc(&q, &x).unwrap(), acc);
            assert_eq!(bp_count_fast(&q, &x).unwrap(), acc);
        }
    }
}
