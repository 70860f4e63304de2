//! Quantifier-free first-order formulas over finite relational structures,
//! and counting their satisfying assignments.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::WalkCount;

/// Ordered relation symbols with arities, plus constant names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Vocabulary {
    pub fn new(relations: Vec<(String, usize)>, constants: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (name, arity) in &relations {
            if *arity == 0 {
                return Err(Error::InvalidStructure(format!(
                    "relation {name} has arity 0"
                )));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidStructure(format!("duplicate symbol {name}")));
            }
        }
        for name in &constants {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidStructure(format!("duplicate symbol {name}")));
            }
        }
        Ok(Self {
            relations,
            constants,
        })
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.relations
            .iter()
            .find(|(n, _)| n == relation)
            .map(|&(_, a)| a)
    }

    /// Same relation symbols with the same arities and the same constants,
    /// ignoring declaration order.
    pub fn same_symbols(&self, other: &Vocabulary) -> bool {
        let rel = |v: &Vocabulary| v.relations.iter().cloned().collect::<HashSet<_>>();
        let con = |v: &Vocabulary| v.constants.iter().cloned().collect::<HashSet<_>>();
        rel(self) == rel(other) && con(self) == con(other)
    }
}

/// A finite structure with universe `0..universe_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalStructure {
    vocab: Vocabulary,
    universe_size: usize,
    relations: Vec<HashSet<Vec<usize>>>,
    constants: Vec<usize>,
}

impl RelationalStructure {
    /// `relations[i]` interprets `vocab.relations()[i]`; `constants[i]`
    /// interprets `vocab.constants()[i]`.
    pub fn new(
        vocab: Vocabulary,
        universe_size: usize,
        relations: Vec<Vec<Vec<usize>>>,
        constants: Vec<usize>,
    ) -> Result<Self> {
        if universe_size == 0 {
            return Err(Error::InvalidStructure("universe must be nonempty".into()));
        }
        if relations.len() != vocab.relations.len() {
            return Err(Error::InvalidStructure(format!(
                "{} interpretations for {} relation symbols",
                relations.len(),
                vocab.relations.len()
            )));
        }
        if constants.len() != vocab.constants.len() {
            return Err(Error::InvalidStructure(format!(
                "{} values for {} constants",
                constants.len(),
                vocab.constants.len()
            )));
        }
        let mut interp = Vec::with_capacity(relations.len());
        for ((name, arity), tuples) in vocab.relations.iter().zip(relations) {
            let mut set = HashSet::with_capacity(tuples.len());
            for tuple in tuples {
                if tuple.len() != *arity {
                    return Err(Error::InvalidStructure(format!(
                        "tuple {tuple:?} of {name} has width {}, arity is {arity}",
                        tuple.len()
                    )));
                }
                if let Some(&x) = tuple.iter().find(|&&x| x >= universe_size) {
                    return Err(Error::InvalidStructure(format!(
                        "element {x} in {name} outside universe of size {universe_size}"
                    )));
                }
                set.insert(tuple);
            }
            interp.push(set);
        }
        for (name, &c) in vocab.constants.iter().zip(&constants) {
            if c >= universe_size {
                return Err(Error::InvalidStructure(format!(
                    "constant {name} = {c} outside universe of size {universe_size}"
                )));
            }
        }
        Ok(Self {
            vocab,
            universe_size,
            relations: interp,
            constants,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    fn relation_index(&self, name: &str) -> Option<usize> {
        self.vocab.relations.iter().position(|(n, _)| n == name)
    }

    pub fn relation(&self, name: &str) -> Option<&HashSet<Vec<usize>>> {
        self.relation_index(name).map(|i| &self.relations[i])
    }

    /// Tuples of a relation in sorted order.
    pub fn sorted_tuples(&self, name: &str) -> Option<Vec<Vec<usize>>> {
        self.relation(name).map(|set| {
            let mut v: Vec<_> = set.iter().cloned().collect();
            v.sort();
            v
        })
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.vocab
            .constants
            .iter()
            .position(|n| n == name)
            .map(|i| self.constants[i])
    }

    pub fn holds(&self, name: &str, tuple: &[usize]) -> bool {
        self.relation(name).is_some_and(|set| set.contains(tuple))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(name.to_string())
    }
}

/// Syntax tree of a quantifier-free formula. Children are ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Atom { relation: String, args: Vec<Term> },
    Eq([Term; 2]),
}

impl Formula {
    pub fn atom(relation: &str, vars: &[&str]) -> Self {
        Formula::Atom {
            relation: relation.to_string(),
            args: vars.iter().map(|v| Term::var(v)).collect(),
        }
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq([a, b])
    }

    pub fn negate(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    fn children(&self) -> &[Formula] {
        match self {
            Formula::And(c) | Formula::Or(c) => c,
            Formula::Not(c) => std::slice::from_ref(c.as_ref()),
            _ => &[],
        }
    }

    fn leaf_terms(&self) -> Option<&[Term]> {
        match self {
            Formula::Atom { args, .. } => Some(args),
            Formula::Eq(pair) => Some(pair),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Connective {
    And,
    Or,
    Not,
}

#[derive(Debug, Clone)]
enum NodeKind {
    Inner(Connective),
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CompiledTerm {
    Var(usize),
    Const(String),
}

#[derive(Debug, Clone)]
struct CompiledAtom {
    // None for equality
    relation: Option<String>,
    args: Vec<CompiledTerm>,
}

/// A validated quantifier-free formula with its depth-first atom order and
/// free-variable order precomputed.
#[derive(Debug, Clone)]
pub struct QfFormula {
    root: Formula,
    kinds: Vec<NodeKind>,
    atoms: Vec<CompiledAtom>,
    // node ids from the root down to each atom's leaf
    atom_paths: Vec<Vec<usize>>,
    free_vars: Vec<String>,
}

impl QfFormula {
    pub fn new(root: Formula) -> Result<Self> {
        let mut f = Self {
            root: root.clone(),
            kinds: Vec::new(),
            atoms: Vec::new(),
            atom_paths: Vec::new(),
            free_vars: Vec::new(),
        };
        let mut var_index = HashMap::new();
        let mut path = Vec::new();
        f.compile(&root, &mut path, &mut var_index)?;
        if f.atoms.is_empty() {
            return Err(Error::InvalidFormula("formula has no atoms".into()));
        }
        Ok(f)
    }

    fn compile(
        &mut self,
        node: &Formula,
        path: &mut Vec<usize>,
        var_index: &mut HashMap<String, usize>,
    ) -> Result<()> {
        let id = self.kinds.len();
        path.push(id);
        match node {
            Formula::And(c) | Formula::Or(c) if c.is_empty() => {
                return Err(Error::InvalidFormula("connective without arguments".into()));
            }
            Formula::And(_) => self.kinds.push(NodeKind::Inner(Connective::And)),
            Formula::Or(_) => self.kinds.push(NodeKind::Inner(Connective::Or)),
            Formula::Not(_) => self.kinds.push(NodeKind::Inner(Connective::Not)),
            Formula::Atom { .. } | Formula::Eq(_) => {
                let terms = node.leaf_terms().expect("leaf");
                if terms.is_empty() {
                    return Err(Error::InvalidFormula("atom without arguments".into()));
                }
                let args = terms
                    .iter()
                    .map(|t| match t {
                        Term::Var(name) => {
                            let next = var_index.len();
                            let i = *var_index.entry(name.clone()).or_insert(next);
                            if i == self.free_vars.len() {
                                self.free_vars.push(name.clone());
                            }
                            CompiledTerm::Var(i)
                        }
                        Term::Const(name) => CompiledTerm::Const(name.clone()),
                    })
                    .collect();
                let relation = match node {
                    Formula::Atom { relation, .. } => Some(relation.clone()),
                    _ => None,
                };
                self.kinds.push(NodeKind::Leaf);
                self.atoms.push(CompiledAtom { relation, args });
                self.atom_paths.push(path.clone());
            }
        }
        for child in node.children() {
            self.compile(child, path, var_index)?;
        }
        path.pop();
        Ok(())
    }

    pub fn root(&self) -> &Formula {
        &self.root
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> &[String] {
        &self.free_vars
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Number of syntax-tree nodes; every atom counts one.
    pub fn size(&self) -> usize {
        self.kinds.len()
    }

    /// Least `r` such that atoms sharing a variable are at most `r` apart in
    /// depth-first order.
    pub fn locality_radius(&self) -> usize {
        let (first, last) = self.occurrence_span();
        first
            .iter()
            .zip(&last)
            .map(|(f, l)| l - f)
            .max()
            .unwrap_or(0)
    }

    // first and last atom index of each free variable
    fn occurrence_span(&self) -> (Vec<usize>, Vec<usize>) {
        let v = self.free_vars.len();
        let mut first = vec![usize::MAX; v];
        let mut last = vec![0; v];
        for (i, atom) in self.atoms.iter().enumerate() {
            for t in &atom.args {
                if let CompiledTerm::Var(x) = *t {
                    first[x] = first[x].min(i);
                    last[x] = last[x].max(i);
                }
            }
        }
        (first, last)
    }

    /// Largest arity among relation atoms; 0 when only equalities occur.
    pub fn max_arity(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| a.relation.is_some())
            .map(|a| a.args.len())
            .max()
            .unwrap_or(0)
    }

    /// Longest chain of connectives above any atom.
    pub fn connective_depth(&self) -> usize {
        self.atom_paths
            .iter()
            .map(|p| p.len() - 1)
            .max()
            .unwrap_or(0)
    }

    /// Checks that every symbol is interpreted by `a` with the right arity.
    pub fn check_symbols(&self, a: &RelationalStructure) -> Result<()> {
        for atom in &self.atoms {
            if let Some(rel) = &atom.relation {
                match a.vocab().arity(rel) {
                    None => return Err(Error::SymbolNotInterpreted(rel.clone())),
                    Some(ar) if ar != atom.args.len() => {
                        return Err(Error::SymbolNotInterpreted(format!(
                            "{rel} used with {} arguments, interpreted with arity {ar}",
                            atom.args.len()
                        )))
                    }
                    Some(_) => {}
                }
            }
            for t in &atom.args {
                if let CompiledTerm::Const(c) = t {
                    if a.constant(c).is_none() {
                        return Err(Error::SymbolNotInterpreted(c.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    fn eval_atom(&self, i: usize, a: &RelationalStructure, values: &[u32]) -> bool {
        let atom = &self.atoms[i];
        let resolve = |t: &CompiledTerm| -> usize {
            match t {
                CompiledTerm::Var(x) => values[*x] as usize,
                CompiledTerm::Const(c) => a.constant(c).expect("checked constant"),
            }
        };
        let tuple: Vec<usize> = atom.args.iter().map(resolve).collect();
        match &atom.relation {
            Some(rel) => a.holds(rel, &tuple),
            None => tuple[0] == tuple[1],
        }
    }

    /// Truth value under a total assignment to the free variables, by direct
    /// recursion over the syntax tree.
    pub fn satisfied(&self, a: &RelationalStructure, values: &[usize]) -> Result<bool> {
        self.check_symbols(a)?;
        if values.len() != self.free_vars.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} free variables",
                values.len(),
                self.free_vars.len()
            )));
        }
        let names: HashMap<&str, usize> = self
            .free_vars
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), values[i]))
            .collect();
        Ok(eval_tree(&self.root, a, &names))
    }
}

fn eval_tree(f: &Formula, a: &RelationalStructure, env: &HashMap<&str, usize>) -> bool {
    let term = |t: &Term| match t {
        Term::Var(x) => env[x.as_str()],
        Term::Const(c) => a.constant(c).expect("checked constant"),
    };
    match f {
        Formula::And(c) => c.iter().all(|g| eval_tree(g, a, env)),
        Formula::Or(c) => c.iter().any(|g| eval_tree(g, a, env)),
        Formula::Not(g) => !eval_tree(g, a, env),
        Formula::Atom { relation, args } => {
            let tuple: Vec<usize> = args.iter().map(term).collect();
            a.holds(relation, &tuple)
        }
        Formula::Eq([x, y]) => term(x) == term(y),
    }
}

/// `|φ(A)|` if `k = |φ|`, else 0, by enumerating every assignment in
/// `dom(A)^v`.
pub fn count_mc(phi: &QfFormula, a: &RelationalStructure, k: usize) -> Result<WalkCount> {
    phi.check_symbols(a)?;
    if k != phi.size() {
        return Ok(BigUint::zero());
    }
    let v = phi.free_variables().len();
    let u = a.universe_size();
    let names: Vec<&str> = phi.free_variables().iter().map(String::as_str).collect();
    let mut values = vec![0usize; v];
    let mut count = BigUint::zero();
    loop {
        let env: HashMap<&str, usize> = names.iter().copied().zip(values.iter().copied()).collect();
        if eval_tree(phi.root(), a, &env) {
            count += 1u32;
        }
        // odometer over dom(A)^v
        let mut pos = 0;
        loop {
            if pos == v {
                return Ok(count);
            }
            values[pos] += 1;
            if values[pos] < u {
                break;
            }
            values[pos] = 0;
            pos += 1;
        }
    }
}

/// Result of the locality sweep with the largest table it held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutcome {
    pub count: WalkCount,
    pub max_table_width: usize,
}

/// Same value as [`count_mc`], computed by sweeping the atoms in depth-first
/// order with a table keyed by (values of live variables, partial evaluation
/// stack). A variable is bound at its first atom and dropped once `r` further
/// atoms have been processed.
pub fn count_mc_local(
    phi: &QfFormula,
    a: &RelationalStructure,
    k: usize,
    r: usize,
    arity: usize,
) -> Result<WalkCount> {
    count_mc_local_with_stats(phi, a, k, r, arity).map(|o| o.count)
}

pub fn count_mc_local_with_stats(
    phi: &QfFormula,
    a: &RelationalStructure,
    k: usize,
    r: usize,
    arity: usize,
) -> Result<SweepOutcome> {
    let found = phi.locality_radius();
    if found > r {
        return Err(Error::LocalityViolated { found, bound: r });
    }
    let found = phi.max_arity();
    if found > arity {
        return Err(Error::ArityViolated {
            found,
            bound: arity,
        });
    }
    phi.check_symbols(a)?;
    if k != phi.size() {
        return Ok(SweepOutcome {
            count: BigUint::zero(),
            max_table_width: 0,
        });
    }

    const UNBOUND: u32 = u32::MAX;
    let nvars = phi.free_variables().len();
    let (first, _) = phi.occurrence_span();
    let u = a.universe_size() as u32;

    type Key = (Vec<u32>, Vec<bool>);
    let mut table: HashMap<Key, WalkCount> = HashMap::new();
    table.insert((vec![UNBOUND; nvars], Vec::new()), BigUint::one());
    let mut max_width = 1;

    for i in 0..phi.atom_count() {
        let fresh: Vec<usize> = (0..nvars).filter(|&x| first[x] == i).collect();
        let mut next: HashMap<Key, WalkCount> = HashMap::new();
        for ((values, stack), count) in table {
            // bind every variable first seen here, in all ways
            let mut assignments = vec![values];
            for &x in &fresh {
                assignments = assignments
                    .into_iter()
                    .flat_map(|vals| {
                        (0..u).map(move |d| {
                            let mut v = vals.clone();
                            v[x] = d;
                            v
                        })
                    })
                    .collect();
            }
            for mut vals in assignments {
                let bit = phi.eval_atom(i, a, &vals);
                let stack = advance_stack(phi, i, stack.clone(), bit);
                for x in 0..nvars {
                    if vals[x] != UNBOUND && first[x] + r <= i {
                        vals[x] = UNBOUND;
                    }
                }
                *next.entry((vals, stack)).or_default() += &count;
            }
        }
        table = next;
        max_width = max_width.max(table.len());
    }

    let mut total = BigUint::zero();
    for ((_, stack), count) in table {
        if close_all(phi, stack) {
            total += count;
        }
    }
    Ok(SweepOutcome {
        count: total,
        max_table_width: max_width,
    })
}

fn initial_acc(c: Connective) -> bool {
    matches!(c, Connective::And)
}

fn fold(c: Connective, acc: bool, v: bool) -> bool {
    match c {
        Connective::And => acc && v,
        Connective::Or => acc || v,
        Connective::Not => v,
    }
}

fn finish(c: Connective, acc: bool) -> bool {
    match c {
        Connective::Not => !acc,
        _ => acc,
    }
}

fn connective(phi: &QfFormula, node: usize) -> Connective {
    match phi.kinds[node] {
        NodeKind::Inner(c) => c,
        NodeKind::Leaf => unreachable!("leaves never sit on the stack"),
    }
}

// The stack holds one accumulator per open connective on the path to the
// most recent atom. Moving to atom `i` closes the connectives not shared
// with atom `i`'s path, opens the new ones, and folds the atom's bit in.
fn advance_stack(phi: &QfFormula, i: usize, mut stack: Vec<bool>, bit: bool) -> Vec<bool> {
    let path = &phi.atom_paths[i];
    let shared = if i == 0 {
        0
    } else {
        let prev = &phi.atom_paths[i - 1];
        prev.iter().zip(path).take_while(|(a, b)| a == b).count()
    };
    if i > 0 {
        let prev = &phi.atom_paths[i - 1];
        // inner nodes of prev at depths shared..len-1 are closed, deepest first
        for depth in (shared..prev.len() - 1).rev() {
            let acc = stack.pop().expect("open connective");
            let v = finish(connective(phi, prev[depth]), acc);
            let parent = connective(phi, prev[depth - 1]);
            let top = stack.last_mut().expect("parent is open");
            *top = fold(parent, *top, v);
        }
    }
    for &node in &path[shared..path.len() - 1] {
        stack.push(initial_acc(connective(phi, node)));
    }
    if path.len() >= 2 {
        let parent = connective(phi, path[path.len() - 2]);
        let top = stack.last_mut().expect("parent is open");
        *top = fold(parent, *top, bit);
    } else {
        // the whole formula is this one atom
        stack = vec![bit];
    }
    stack
}

fn close_all(phi: &QfFormula, mut stack: Vec<bool>) -> bool {
    let last = phi.atom_paths.last().expect("at least one atom");
    if last.len() == 1 {
        return stack[0];
    }
    for depth in (0..last.len() - 1).rev() {
        let acc = stack.pop().expect("open connective");
        let v = finish(connective(phi, last[depth]), acc);
        match stack.last_mut() {
            Some(top) => *top = fold(connective(phi, last[depth - 1]), *top, v),
            None => return v,
        }
    }
    unreachable!("root closes the loop")
}
