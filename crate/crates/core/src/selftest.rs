//! Cross-oracle property checks over seeded random instances. Each check
//! reports how many cases it ran and which failed.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bp::{
    bp_count_acc, bp_count_fast, check_read_once_certified, stagger, BranchingProgram,
};
use crate::cnf::{
    count_cycle_cover2_cnf, count_log_reach2_cnf, cycle_cover_gate_passes, enumerate_cycle_covers,
    reach2_cnf_gate, EdgeCnf,
};
use crate::fo::{count_mc, count_mc_local_with_stats, QfFormula};
use crate::gen;
use crate::graph::DirectedGraph;
use crate::hom::{
    count_hom_oracle, count_hom_path_star, enumerate_homs, make_path_star, HomInstance,
    LayeredHomGraph,
};
use crate::pdet::{
    clow_sign, det_cross_check, det_permutation_expansion, enumerate_k_clow_sequences, eta,
    pdet_clow, pdet_direct, ClowSequence, ZeroOneMatrix,
};
use crate::reductions::{
    pdet_target_count, reduce_reach_to_pdet, verify_parsimonious, ColourReachInstance, HomToReach,
    McInstance, ParsimonyReport, PdetInstance, ReachColourToHom, ReachToMc, ReachToPdet,
};
use crate::walk::{
    count_log_reach_b, count_log_walk_b, count_reach, count_reach_colour, log_gate, ReachInstance,
};

/// Enumeration budget for every oracle used here.
pub const LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Smoke,
    Full,
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

struct Tally {
    name: &'static str,
    start: Instant,
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            start: Instant::now(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.check(false, || what);
    }

    fn done(self) -> PropertyResult {
        PropertyResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            elapsed: self.start.elapsed(),
        }
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn big(x: BigUint) -> BigInt {
    BigInt::from(x)
}

/// `pdet_clow = pdet_direct` for every `k` on random matrices with `n <= 5`.
pub fn clow_expansion(seed: u64, matrices: usize) -> PropertyResult {
    let mut t = Tally::new("clow expansion equals pdet");
    let mut rng = rng_for(seed, 1);
    for _ in 0..matrices {
        let n = rng.gen_range(1..=5);
        let p = [0.3, 0.5, 0.7][rng.gen_range(0..3)];
        let a = gen::random_matrix(&mut rng, n, p);
        t.cases += 1;
        for k in 0..=n {
            match (pdet_clow(&a, k, LIMIT), pdet_direct(&a, k)) {
                (Ok(x), Ok(y)) => {
                    t.check(x == y, || format!("{a:?}, k = {k}: clow {x}, direct {y}"))
                }
                (x, y) => t.fail(format!("{a:?}, k = {k}: {x:?} / {y:?}")),
            }
        }
    }
    t.done()
}

fn complete_loopless(n: usize) -> ZeroOneMatrix {
    let mut a = ZeroOneMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, i != j);
        }
    }
    a
}

/// The involution laws on every k-clow sequence of the complete loopless
/// digraph, `n <= max_n`, `k <= max_k`, with the given sign function.
pub fn involution_with(
    max_n: usize,
    max_k: usize,
    sign: &dyn Fn(&ClowSequence) -> BigInt,
) -> PropertyResult {
    let mut t = Tally::new("eta is a sign-reversing involution");
    for n in 1..=max_n {
        let a = complete_loopless(n);
        for k in 0..=max_k {
            let all = match enumerate_k_clow_sequences(&a, k, LIMIT) {
                Ok(all) => all,
                Err(e) => {
                    t.fail(format!("n = {n}, k = {k}: {e}"));
                    continue;
                }
            };
            let set: BTreeSet<&ClowSequence> = all.iter().collect();
            t.check(set.len() == all.len(), || {
                format!("n = {n}, k = {k}: duplicates")
            });
            let (mut fixed_sum, mut moved_sum) = (BigInt::zero(), BigInt::zero());
            for w in &all {
                t.cases += 1;
                let image = match eta(w) {
                    Ok(x) => x,
                    Err(e) => {
                        t.fail(format!("{w:?}: {e}"));
                        continue;
                    }
                };
                t.check(set.contains(&image), || {
                    format!("{w:?} maps outside the set")
                });
                t.check(eta(&image).ok().as_ref() == Some(w), || {
                    format!("{w:?}: not an involution")
                });
                let fixed = &image == w;
                t.check(fixed == w.is_cycle_cover(), || {
                    format!("{w:?}: fixed = {fixed}")
                });
                if fixed {
                    fixed_sum += sign(w);
                } else {
                    moved_sum += sign(w);
                    t.check(sign(&image) == -sign(w), || format!("{w:?}: sign kept"));
                    t.check(image.total_edges() == w.total_edges(), || {
                        format!("{w:?}: edges changed")
                    });
                    t.check(image.edge_multiset() == w.edge_multiset(), || {
                        format!("{w:?}: edge multiset changed")
                    });
                }
            }
            t.check(moved_sum.is_zero(), || {
                format!("n = {n}, k = {k}: moved sum {moved_sum}")
            });
            if k <= n {
                let direct = pdet_direct(&a, k).expect("k <= n");
                t.check(fixed_sum == direct, || {
                    format!("n = {n}, k = {k}: fixed sum {fixed_sum} vs {direct}")
                });
            }
        }
    }
    t.done()
}

pub fn involution(max_n: usize, max_k: usize) -> PropertyResult {
    involution_with(max_n, max_k, &clow_sign)
}

/// `sum_k pdet(A, k) = det(A)` for unit-diagonal matrices with `n <= 5`.
pub fn determinant(seed: u64, matrices: usize) -> PropertyResult {
    let mut t = Tally::new("sum of pdet is the determinant");
    let mut rng = rng_for(seed, 3);
    for _ in 0..matrices {
        let n = rng.gen_range(1..=5);
        let a = gen::random_unit_diagonal_matrix(&mut rng, n, 0.5);
        t.cases += 1;
        let det = det_permutation_expansion(&a);
        match det_cross_check(&a) {
            Ok(s) => t.check(s == det, || format!("{a:?}: {s} vs {det}")),
            Err(e) => t.fail(format!("{a:?}: {e}")),
        }
    }
    t.done()
}

/// `pdet(A', k) = (-1)^(2n-k+1) * #walks` after adding the back edge.
pub fn back_edge(seed: u64, dags: usize) -> PropertyResult {
    let mut t = Tally::new("back-edge identity");
    let mut rng = rng_for(seed, 4);
    for _ in 0..dags {
        let n = rng.gen_range(2..=6);
        let g = gen::random_dag(&mut rng, n, 0.5);
        let s = rng.gen_range(0..n);
        let tt = (s + rng.gen_range(1..n)) % n;
        let k = rng.gen_range(1..=5);
        t.cases += 1;
        let walks = count_reach(&ReachInstance::new(g.clone(), s, tt, k).expect("in range"));
        let inst = match reduce_reach_to_pdet(&g, s, tt, k) {
            Ok(x) => x,
            Err(e) => {
                t.fail(format!("{g:?}: {e}"));
                continue;
            }
        };
        let expected = big(walks) * BigInt::from(inst.recovery_sign);
        let value = if k <= n {
            pdet_direct(&inst.matrix, k)
        } else {
            pdet_clow(&inst.matrix, k, LIMIT)
        };
        match value {
            Ok(v) => t.check(v == expected, || {
                format!("{g:?} s={s} t={tt} k={k}: {v} vs {expected}")
            }),
            Err(e) => t.fail(e.to_string()),
        }
    }
    t.done()
}

fn walks_between(g: &DirectedGraph, s: usize, t: usize, edges: usize) -> Vec<Vec<usize>> {
    g.enumerate_walks(s, t, edges, LIMIT)
        .expect("small instance")
}

/// Every walk counter against walk enumeration, gate-zero cases included.
pub fn walk_counters(seed: u64, instances: usize) -> PropertyResult {
    let mut t = Tally::new("walk counters match enumeration");
    let mut rng = rng_for(seed, 5);
    let mut gated = 0;
    for _ in 0..instances {
        let n = rng.gen_range(1..=6);
        let s = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        t.cases += 1;

        let g = gen::random_graph(&mut rng, n, 0.35);
        let k = rng.gen_range(0..=7);
        let got = count_reach(&ReachInstance::new(g.clone(), s, v, k).expect("in range"));
        let want = if k == 0 {
            0
        } else {
            walks_between(&g, s, v, k - 1).len()
        };
        t.check(got == BigUint::from(want), || {
            format!("reach {g:?} {s}->{v} k={k}: {got} vs {want}")
        });

        let b = rng.gen_range(2..=3);
        let g = gen::random_bounded_graph(&mut rng, n, b);
        let a = rng.gen_range(0..=6);
        let k = rng.gen_range(0..=3);
        let open = log_gate(&g, a, k).passes();
        gated += usize::from(!open);
        let want = if open {
            walks_between(&g, s, v, a).len()
        } else {
            0
        };
        match count_log_reach_b(&g, s, v, a, k, b) {
            Ok(got) => t.check(got == BigUint::from(want), || {
                format!("logreach {g:?} a={a} k={k}: {got} vs {want}")
            }),
            Err(e) => t.fail(e.to_string()),
        }
        let want: usize = if open {
            (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .map(|(x, y)| walks_between(&g, x, y, a).len())
                .sum()
        } else {
            0
        };
        match count_log_walk_b(&g, a, k, b) {
            Ok(got) => t.check(got == BigUint::from(want), || {
                format!("logwalk {g:?} a={a} k={k}: {got} vs {want}")
            }),
            Err(e) => t.fail(e.to_string()),
        }

        let g = gen::random_graph(&mut rng, n, 0.45);
        let m = if s == v { 1 } else { rng.gen_range(2..=4) };
        let vc = gen::random_colouring(&mut rng, g, m, s, v);
        let k = if rng.gen_bool(0.8) {
            m
        } else {
            rng.gen_range(1..=5)
        };
        gated += usize::from(k != m);
        let want = if k != m {
            0
        } else {
            walks_between(vc.graph(), s, v, k - 1)
                .iter()
                .filter(|w| w.iter().enumerate().all(|(i, &x)| vc.colour(x) == i + 1))
                .count()
        };
        match count_reach_colour(&vc, s, v, k) {
            Ok(got) => t.check(got == BigUint::from(want), || {
                format!("colour {vc:?} k={k}: {got} vs {want}")
            }),
            Err(e) => t.fail(e.to_string()),
        }
    }
    t.check(gated > 0, || "no gate-zero case was drawn".into());
    t.done()
}

fn cover_filter(g: &DirectedGraph, cnf: &EdgeCnf, a: usize, k: usize) -> usize {
    if !cycle_cover_gate_passes(g, cnf, a) {
        return 0;
    }
    enumerate_cycle_covers(g, LIMIT)
        .expect("small instance")
        .iter()
        .filter(|c| {
            let (cycles, covered) = c.nontrivial_profile(g);
            cycles <= k && covered == k * a && cnf.satisfied_by(&c.characteristic(g.edge_count()))
        })
        .count()
}

/// CNF counters against enumerate-then-filter, and against the plain
/// counters under the empty CNF.
pub fn cnf_counters(seed: u64, instances: usize) -> PropertyResult {
    let mut t = Tally::new("CNF counters match enumeration");
    let mut rng = rng_for(seed, 6);
    for _ in 0..instances {
        let n = rng.gen_range(1..=6);
        let g = gen::random_bounded_graph(&mut rng, n, 2);
        let cnf = gen::random_cnf(&mut rng, g.edge_count(), 3);
        let (s, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let a = rng.gen_range(0..=4);
        let k = rng.gen_range(0..=2);
        t.cases += 1;

        let want = if reach2_cnf_gate(&g, &cnf, a, k).passes() {
            walks_between(&g, s, v, a)
                .iter()
                .filter(|w| {
                    let mut used = vec![false; g.edge_count()];
                    for pair in w.windows(2) {
                        used[g.edge_id(pair[0], pair[1]).expect("walk edge")] = true;
                    }
                    cnf.satisfied_by(&used)
                })
                .count()
        } else {
            0
        };
        match count_log_reach2_cnf(&g, s, v, &cnf, a, k) {
            Ok(got) => t.check(got == BigUint::from(want), || {
                format!("reach2cnf {g:?} {cnf:?} a={a} k={k}: {got} vs {want}")
            }),
            Err(e) => t.fail(e.to_string()),
        }
        let empty = EdgeCnf::empty();
        let plain = count_log_reach_b(&g, s, v, a, k, 2);
        let constrained = count_log_reach2_cnf(&g, s, v, &empty, a, k);
        t.check(plain.is_ok() && plain == constrained, || {
            format!("empty CNF walk {g:?} a={a} k={k}")
        });

        let ca = rng.gen_range(0..=3);
        let ck = rng.gen_range(0..=2);
        let want = cover_filter(&g, &cnf, ca, ck);
        match count_cycle_cover2_cnf(&g, &cnf, ca, ck) {
            Ok(got) => t.check(got == BigUint::from(want), || {
                format!("cover {g:?} {cnf:?} a={ca} k={ck}: {got} vs {want}")
            }),
            Err(e) => t.fail(e.to_string()),
        }
        let want = cover_filter(&g, &empty, ca, ck);
        match count_cycle_cover2_cnf(&g, &empty, ca, ck) {
            Ok(got) => t.check(got == BigUint::from(want), || {
                format!("empty CNF cover {g:?}: {got} vs {want}")
            }),
            Err(e) => t.fail(e.to_string()),
        }
    }
    t.done()
}

/// The locality sweep against brute force, with its table-width bound.
pub fn mc_local(seed: u64, instances: usize) -> PropertyResult {
    let mut t = Tally::new("local model counting matches brute force");
    let mut rng = rng_for(seed, 7);
    for _ in 0..instances {
        let universe = rng.gen_range(1..=5);
        let r = rng.gen_range(0..=2);
        let arity = rng.gen_range(1..=2);
        let a = gen::random_fo_structure(&mut rng, universe);
        let phi = match QfFormula::new(gen::random_local_formula(&mut rng, r, 4, arity)) {
            Ok(f) => f,
            Err(e) => {
                t.fail(e.to_string());
                continue;
            }
        };
        let k = if rng.gen_bool(0.9) {
            phi.size()
        } else {
            rng.gen_range(1..=12)
        };
        t.cases += 1;
        let brute = count_mc(&phi, &a, k);
        match (count_mc_local_with_stats(&phi, &a, k, r, arity), brute) {
            (Ok(sweep), Ok(want)) => {
                t.check(sweep.count == want, || {
                    format!("{:?} r={r}: {} vs {want}", phi.root(), sweep.count)
                });
                let width_arity = phi.max_arity().max(2) as u32;
                let states = 1u128 << phi.connective_depth().max(1);
                let bound = (universe as u128).pow(width_arity * r as u32) * states;
                t.check(sweep.max_table_width as u128 <= bound, || {
                    format!(
                        "{:?}: width {} over {bound}",
                        phi.root(),
                        sweep.max_table_width
                    )
                });
            }
            (x, y) => t.fail(format!("{:?}: {x:?} / {y:?}", phi.root())),
        }
    }
    t.done()
}

fn merge(name: &'static str, start: Instant, reports: Vec<ParsimonyReport>) -> PropertyResult {
    let mut t = Tally::new(name);
    t.start = start;
    for r in reports {
        t.cases += r.cases;
        for f in r.failures {
            t.fail(format!("{} #{}: {}", r.record.name, f.index, f.reason));
        }
    }
    t.done()
}

/// All four reductions preserve counts and respect their parameter bounds.
pub fn parsimony(seed: u64, per_reduction: usize) -> PropertyResult {
    let start = Instant::now();
    let mut rng = rng_for(seed, 8);
    let mut reports = Vec::new();

    let homs: Vec<HomInstance> = (0..per_reduction)
        .map(|_| {
            let n = rng.gen_range(2..=4);
            let universe = rng.gen_range(1..=5);
            HomInstance {
                n,
                target: gen::random_hom_target(&mut rng, n, universe),
                k: rng.gen_range(n - 1..=n + 1),
            }
        })
        .collect();
    reports.push(verify_parsimonious(
        &HomToReach,
        &homs,
        |h| {
            if h.n > h.k {
                return Ok(BigInt::zero());
            }
            let p = make_path_star(h.n)?;
            count_hom_oracle(p.structure(), &h.target, LIMIT).map(big)
        },
        |r| Ok(big(count_reach(r))),
    ));

    let coloured: Vec<ColourReachInstance> = (0..per_reduction)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            let g = if rng.gen_bool(0.5) {
                gen::random_dag(&mut rng, n, 0.5)
            } else {
                gen::random_graph(&mut rng, n, 0.4)
            };
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            let k = rng.gen_range(2..=4);
            ColourReachInstance {
                colouring: gen::random_colouring(&mut rng, g, k, s, t),
                s,
                t,
                k,
            }
        })
        .collect();
    reports.push(verify_parsimonious(
        &ReachColourToHom,
        &coloured,
        |c| count_reach_colour(&c.colouring, c.s, c.t, c.k).map(big),
        |h| {
            let p = make_path_star(h.n)?;
            count_hom_oracle(p.structure(), &h.target, LIMIT).map(big)
        },
    ));

    let reach: Vec<ReachInstance> = (0..per_reduction)
        .map(|_| {
            let n = rng.gen_range(1..=6);
            let g = gen::random_graph(&mut rng, n, 0.4);
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            ReachInstance::new(g, s, t, rng.gen_range(2..=5)).expect("in range")
        })
        .collect();
    reports.push(verify_parsimonious(
        &ReachToMc,
        &reach,
        |r| Ok(big(count_reach(r))),
        |m: &McInstance| {
            let ok = m.formula.locality_radius() == 1 && m.formula.max_arity() == 2;
            if !ok {
                return Err(crate::Error::PreconditionViolated(
                    "formula not 1-local binary".into(),
                ));
            }
            count_mc(&m.formula, &m.structure, m.k).map(big)
        },
    ));

    let dags: Vec<ReachInstance> = (0..per_reduction)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            let g = gen::random_dag(&mut rng, n, 0.5);
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            ReachInstance::new(g, s, t, rng.gen_range(1..=5)).expect("in range")
        })
        .collect();
    reports.push(verify_parsimonious(
        &ReachToPdet,
        &dags,
        |r| Ok(big(count_reach(r))),
        |p: &PdetInstance| pdet_target_count(p, LIMIT),
    ));

    merge("reductions are parsimonious", start, reports)
}

/// Walks of the layered graph and homomorphisms `P_n* -> B` are in explicit
/// bijection.
pub fn hom_bijection(seed: u64, targets: usize) -> PropertyResult {
    let mut t = Tally::new("walk/homomorphism bijection");
    let mut rng = rng_for(seed, 9);
    for _ in 0..targets {
        let n = rng.gen_range(2..=4);
        let universe = rng.gen_range(1..=5);
        let b = gen::random_hom_target(&mut rng, n, universe);
        t.cases += 1;
        let pattern = make_path_star(n).expect("n >= 2");
        let homs = enumerate_homs(pattern.structure(), &b, LIMIT).expect("small");
        let layered = LayeredHomGraph::build(n, &b).expect("vocabulary matches");
        let walks = walks_between(&layered.graph, layered.s, layered.t, layered.k_prime - 1);
        t.check(walks.len() == homs.len(), || {
            format!("{b:?}: {} walks, {} homs", walks.len(), homs.len())
        });
        let images: BTreeSet<Vec<usize>> = walks
            .iter()
            .filter_map(|w| layered.walk_to_hom(w))
            .collect();
        let expected: BTreeSet<Vec<usize>> = homs.iter().cloned().collect();
        t.check(images == expected, || format!("{b:?}: image sets differ"));
        for h in &homs {
            let back = layered.hom_to_walk(h);
            t.check(back.as_ref().is_some_and(|w| walks.contains(w)), || {
                format!("{b:?}: {h:?} has no walk")
            });
        }
        let k = rng.gen_range(n - 1..=n + 1);
        let got = count_hom_path_star(n, &b, k).expect("valid");
        let want = if n <= k { homs.len() } else { 0 };
        t.check(got == BigUint::from(want), || {
            format!("{b:?} k={k}: {got} vs {want}")
        });
    }
    t.done()
}

fn all_inputs(width: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << width).map(move |bits| (0..width).map(|i| bits >> i & 1 == 1).collect())
}

fn bp_case(t: &mut Tally, p: &BranchingProgram) {
    let staggered = match stagger(p) {
        Ok(q) => q,
        Err(e) => {
            t.fail(format!("stagger: {e}"));
            return;
        }
    };
    t.check(check_read_once_certified(&staggered).is_ok(), || {
        format!("{p:?}: staggered program not certified")
    });
    let certified = check_read_once_certified(p).is_ok();
    if certified {
        t.check(&staggered == p, || {
            format!("{p:?}: certified program changed")
        });
    }
    for x in all_inputs(p.num_x()) {
        let (acc, acc2) = (bp_count_acc(p, &x), bp_count_acc(&staggered, &x));
        t.check(acc.is_ok() && acc == acc2, || {
            format!("{p:?} x={x:?}: {acc:?} vs staggered {acc2:?}")
        });
        let fast = bp_count_fast(&staggered, &x);
        t.check(fast.is_ok() && fast == acc, || {
            format!("{p:?} x={x:?}: fast {fast:?} vs {acc:?}")
        });
        if certified {
            let direct = bp_count_fast(p, &x);
            t.check(direct == acc, || {
                format!("{p:?} x={x:?}: fast on original {direct:?} vs {acc:?}")
            });
        }
    }
}

/// Fast counting and staggering against exhaustive `y` enumeration.
pub fn bp_suite(seed: u64, programs: usize) -> PropertyResult {
    let mut t = Tally::new("branching-program counters and staggering");
    let mut rng = rng_for(seed, 10);
    for _ in 0..programs {
        let num_x = rng.gen_range(0..=4);
        let num_y = rng.gen_range(0..=4);
        let inner = rng.gen_range(1..=4);
        let p = gen::random_ordered_program(&mut rng, num_x, num_y, inner);
        t.cases += 1;
        bp_case(&mut t, &p);
    }
    t.done()
}

/// Homomorphism counter against map enumeration on the module's own scale.
pub fn hom_oracle(seed: u64, targets: usize) -> PropertyResult {
    let mut t = Tally::new("path-star homomorphisms match map enumeration");
    let mut rng = rng_for(seed, 11);
    for _ in 0..targets {
        let n = rng.gen_range(2..=4);
        let universe = rng.gen_range(1..=5);
        let b = gen::random_hom_target(&mut rng, n, universe);
        t.cases += 1;
        let p = make_path_star(n).expect("n >= 2");
        let want = count_hom_oracle(p.structure(), &b, LIMIT).expect("small");
        let got = count_hom_path_star(n, &b, n).expect("valid");
        t.check(got == want, || format!("{b:?}: {got} vs {want}"));
    }
    t.done()
}

/// Case counts per property: the acceptance sizes at full scale.
pub fn run_all(seed: u64, scale: Scale) -> Vec<PropertyResult> {
    let f = |full: usize, smoke: usize| if scale == Scale::Full { full } else { smoke };
    vec![
        clow_expansion(seed, f(500, 60)),
        involution(4, 4),
        determinant(seed, f(200, 30)),
        back_edge(seed, f(200, 30)),
        walk_counters(seed, f(300, 40)),
        cnf_counters(seed, f(200, 30)),
        mc_local(seed, f(200, 30)),
        parsimony(seed, f(100, 15)),
        hom_bijection(seed, f(100, 15)),
        bp_suite(seed, f(300, 40)),
        hom_oracle(seed, f(200, 30)),
    ]
}

/// One line per property plus a summary line.
pub fn format_table(results: &[PropertyResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "{:<4} {:<48} {:>6} cases {:>8.2}s\n",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.elapsed.as_secs_f64()
        ));
        for f in &r.failures {
            out.push_str(&format!("       {f}\n"));
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    out.push_str(&format!("{} properties, {failed} failed\n", results.len()));
    out
}
