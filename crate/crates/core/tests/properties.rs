use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paracount::bp::{check_read_once_certified, is_k_bounded, stagger};
use paracount::cnf::{
    count_cycle_cover2_cnf, count_log_reach2_cnf, enumerate_cycle_covers, EdgeCnf,
};
use paracount::fo::{count_mc, Formula, QfFormula, Term};
use paracount::formats::{
    formula_from_json, formula_to_json, GraphFile, MatrixFile, ProgramFile, StructureFile,
};
use paracount::gen;
use paracount::graph::table_product;
use paracount::hom::count_hom_path_star;
use paracount::pdet::{pdet_clow, pdet_direct};
use paracount::reductions::reduce_reach_to_mc;
use paracount::walk::{
    ceil_log2, count_log_reach_b, count_log_walk_b, count_reach, log_gate, ReachInstance,
};
use paracount::DirectedGraph;

const LIMIT: u64 = 10_000_000;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn graph(max_n: usize) -> impl Strategy<Value = DirectedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::btree_set((0..n, 0..n), 0..=n * n)
            .prop_map(move |edges| DirectedGraph::new(n, edges.into_iter().collect()).unwrap())
    })
}

fn total(table: &[Vec<BigUint>]) -> BigUint {
    table.iter().flatten().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_total_counts_every_walk(g in graph(6), a in 0usize..=6) {
        let enumerated: usize = (0..g.n())
            .flat_map(|s| (0..g.n()).map(move |t| (s, t)))
            .map(|(s, t)| g.enumerate_walks(s, t, a, LIMIT).unwrap().len())
            .sum();
        prop_assert_eq!(total(&g.walk_count_matrix(a)), BigUint::from(enumerated));
    }

    #[test]
    fn matrix_powers_compose(g in graph(5), a in 0usize..4, b in 0usize..4) {
        let product = table_product(&g.walk_count_matrix(a), &g.walk_count_matrix(b));
        prop_assert_eq!(g.walk_count_matrix(a + b), product);
    }

    #[test]
    fn enumeration_length_is_matrix_entry(g in graph(5), a in 0usize..5, s in 0usize..5, t in 0usize..5) {
        let (s, t) = (s % g.n(), t % g.n());
        let walks = g.enumerate_walks(s, t, a, LIMIT).unwrap();
        prop_assert_eq!(BigUint::from(walks.len()), g.walk_count_matrix(a)[s][t].clone());
    }

    #[test]
    fn reach_recurrence(g in graph(6), s in 0usize..6, t in 0usize..6, k in 2usize..7) {
        let (s, t) = (s % g.n(), t % g.n());
        let reach = |v: usize, k: usize| count_reach(&ReachInstance::new(g.clone(), s, v, k).unwrap());
        let expected: BigUint = (0..g.n()).filter(|&u| g.has_edge(u, t)).map(|u| reach(u, k - 1)).sum();
        prop_assert_eq!(reach(t, k), expected);
    }

    #[test]
    fn walks_in_dags_are_paths(seed: u64, k in 1usize..6) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=6);
        let g = gen::random_dag(&mut r, n, 0.5);
        let (s, t) = (r.gen_range(0..n), r.gen_range(0..n));
        let walks = g.enumerate_walks(s, t, k - 1, LIMIT).unwrap();
        let paths = walks.iter().filter(|w| {
            let mut seen = w.to_vec();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == w.len()
        }).count();
        prop_assert_eq!(paths, walks.len());
        prop_assert_eq!(count_reach(&ReachInstance::new(g, s, t, k).unwrap()), BigUint::from(paths));
    }

    #[test]
    fn log_walk_sums_log_reach(seed: u64, a in 0usize..6, k in 0usize..4) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let b = r.gen_range(2..=3);
        let g = gen::random_bounded_graph(&mut r, n, b);
        prop_assume!(log_gate(&g, a, k).passes());
        let sum: BigUint = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .map(|(s, t)| count_log_reach_b(&g, s, t, a, k, b).unwrap())
            .sum();
        prop_assert_eq!(count_log_walk_b(&g, a, k, b).unwrap(), sum);
    }

    #[test]
    fn gate_is_monotone_in_k(seed: u64, a in 0usize..8, k in 0usize..4) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let g = gen::random_bounded_graph(&mut r, n, 2);
        let (s, t) = (r.gen_range(0..n), r.gen_range(0..n));
        if log_gate(&g, a, k).passes() {
            prop_assert!(log_gate(&g, a, k + 1).passes());
            prop_assert_eq!(
                count_log_reach_b(&g, s, t, a, k, 2).unwrap(),
                count_log_reach_b(&g, s, t, a, k + 1, 2).unwrap()
            );
        }
    }

    #[test]
    fn disjoint_union_adds_walks(g1 in graph(4), g2 in graph(4), a in 0usize..5) {
        let shift = g1.n();
        let edges = g1.edges().iter().copied()
            .chain(g2.edges().iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        let union = DirectedGraph::new(g1.n() + g2.n(), edges).unwrap();
        let parts = total(&g1.walk_count_matrix(a)) + total(&g2.walk_count_matrix(a));
        prop_assert_eq!(total(&union.walk_count_matrix(a)), parts);
    }

    #[test]
    fn empty_cnf_is_unconstrained(seed: u64, a in 0usize..6, k in 0usize..3) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let g = gen::random_bounded_graph(&mut r, n, 2);
        let (s, t) = (r.gen_range(0..n), r.gen_range(0..n));
        prop_assert_eq!(
            count_log_reach2_cnf(&g, s, t, &EdgeCnf::empty(), a, k).unwrap(),
            count_log_reach_b(&g, s, t, a, k, 2).unwrap()
        );
    }

    #[test]
    fn cover_counts_never_exceed_all_covers(seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let g = gen::random_bounded_graph(&mut r, n, 2);
        let cnf = gen::random_cnf(&mut r, g.edge_count(), 2);
        let all = enumerate_cycle_covers(&g, LIMIT).unwrap().len();
        // for fixed a the covered count k * a pins down k
        for a in 1..=n {
            let sum: BigUint = (0..=n).map(|k| count_cycle_cover2_cnf(&g, &cnf, a, k).unwrap()).sum();
            prop_assert!(sum <= BigUint::from(all));
        }
    }

    #[test]
    fn mc_count_is_bounded_and_negation_complements(seed: u64) {
        let mut r = rng(seed);
        let universe = r.gen_range(1..=4);
        let a = gen::random_fo_structure(&mut r, universe);
        let f = gen::random_local_formula(&mut r, 2, 3, 2);
        let phi = QfFormula::new(f.clone()).unwrap();
        let neg = QfFormula::new(Formula::negate(f)).unwrap();
        let v = phi.free_variables().len();
        let count = count_mc(&phi, &a, phi.size()).unwrap();
        prop_assert!(count <= BigUint::from(universe).pow(v as u32));
        let mut values = vec![0; v];
        loop {
            prop_assert_ne!(phi.satisfied(&a, &values).unwrap(), neg.satisfied(&a, &values).unwrap());
            let Some(i) = values.iter().position(|&d| d + 1 < universe) else { break };
            values[i] += 1;
            values[..i].fill(0);
        }
    }

    #[test]
    fn renaming_keeps_the_count(seed: u64) {
        let mut r = rng(seed);
        let universe = r.gen_range(1..=4);
        let a = gen::random_fo_structure(&mut r, universe);
        let f = gen::random_local_formula(&mut r, 1, 4, 2);
        let renamed = rename(&f, &|x| format!("renamed_{x}"));
        let phi = QfFormula::new(f).unwrap();
        let psi = QfFormula::new(renamed).unwrap();
        prop_assert_eq!(count_mc(&phi, &a, phi.size()).unwrap(), count_mc(&psi, &a, psi.size()).unwrap());
    }

    #[test]
    fn hom_gate_rejects_large_patterns(seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=4);
        let universe = r.gen_range(1..=4);
        let b = gen::random_hom_target(&mut r, n, universe);
        for k in 0..n {
            prop_assert!(count_hom_path_star(n, &b, k).unwrap().is_zero());
        }
    }

    #[test]
    fn pdet_low_orders(seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let a = gen::random_matrix(&mut r, n, 0.5);
        prop_assert_eq!(pdet_direct(&a, 0).unwrap(), BigInt::one());
        prop_assert!(pdet_direct(&a, 1).unwrap().is_zero());
        for k in 0..=n {
            prop_assert_eq!(pdet_clow(&a, k, LIMIT).unwrap(), pdet_direct(&a, k).unwrap());
        }
    }

    #[test]
    fn staggered_programs_are_certified(seed: u64) {
        let mut r = rng(seed);
        let (nx, ny, inner) = (r.gen_range(0..=3), r.gen_range(0..=4), r.gen_range(1..=4));
        let p = gen::random_ordered_program(&mut r, nx, ny, inner);
        prop_assert!(check_read_once_certified(&stagger(&p).unwrap()).is_ok());
    }

    #[test]
    fn k_boundedness_matches_its_definition(seed: u64, f in 0u64..4) {
        let mut r = rng(seed);
        let (nx, ny) = (r.gen_range(0..=4), r.gen_range(0..=4));
        let p = gen::random_ordered_program(&mut r, nx, ny, 2);
        let bound = f * ceil_log2(nx as u64);
        prop_assert_eq!(is_k_bounded(&p, f), ny as u64 <= bound);
    }

    #[test]
    fn reach_to_mc_formulas_are_one_local_binary(seed: u64, k in 2usize..7) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let g = gen::random_graph(&mut r, n, 0.4);
        let inst = reduce_reach_to_mc(&g, 0, n - 1, k).unwrap();
        prop_assert_eq!(inst.formula.locality_radius(), 1);
        prop_assert_eq!(inst.formula.max_arity(), 2);
        prop_assert!(inst.k <= 2 * k);
    }

    #[test]
    fn file_formats_round_trip(seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let g = gen::random_graph(&mut r, n, 0.4);
        prop_assert_eq!(GraphFile::from_graph(&g).graph().unwrap(), g);
        let m = gen::random_matrix(&mut r, n, 0.5);
        prop_assert_eq!(MatrixFile::from_matrix(&m).matrix().unwrap(), m);
        let s = gen::random_fo_structure(&mut r, n);
        let back = StructureFile::from_structure(&s).structure().unwrap();
        prop_assert_eq!(StructureFile::from_structure(&back), StructureFile::from_structure(&s));
        let f = gen::random_local_formula(&mut r, 2, 4, 2);
        prop_assert_eq!(formula_from_json(&formula_to_json(&f)).unwrap(), f);
        let p = gen::random_ordered_program(&mut r, 2, 2, 3);
        prop_assert_eq!(ProgramFile::from_program(&p).program().unwrap(), p);
    }
}

fn rename(f: &Formula, to: &dyn Fn(&str) -> String) -> Formula {
    let term = |t: &Term| match t {
        Term::Var(x) => Term::Var(to(x)),
        Term::Const(c) => Term::Const(c.clone()),
    };
    match f {
        Formula::And(c) => Formula::And(c.iter().map(|g| rename(g, to)).collect()),
        Formula::Or(c) => Formula::Or(c.iter().map(|g| rename(g, to)).collect()),
        Formula::Not(g) => Formula::negate(rename(g, to)),
        Formula::Atom { relation, args } => Formula::Atom {
            relation: relation.clone(),
            args: args.iter().map(term).collect(),
        },
        Formula::Eq([x, y]) => Formula::Eq([term(x), term(y)]),
    }
}

#[test]
fn renaming_helper_touches_only_variables() {
    let f = Formula::eq(Term::var("x"), Term::constant("c"));
    let g = rename(&f, &|x| format!("{x}1"));
    assert_eq!(g, Formula::eq(Term::var("x1"), Term::constant("c")));
}
