//! JSON file formats for graphs, structures, formulas, matrices, branching
//! programs and reduction records.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bp::{validate_bp, BranchingProgram, NodeLabel, RawProgram};
use crate::cnf::EdgeCnf;
use crate::error::{Error, Result};
use crate::fo::{Formula, RelationalStructure, Term, Vocabulary};
use crate::graph::{DirectedGraph, VertexColouring};
use crate::pdet::ZeroOneMatrix;
use crate::reductions::ReductionRecord;

/// Reads a file, mapping a missing file to `file-not-found`.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.display().to_string()),
        _ => Error::Io(format!("{}: {e}", path.display())),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_json(&read_text(path)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colours: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clauses: Option<Vec<Vec<i64>>>,
}

impl GraphFile {
    pub fn from_graph(g: &DirectedGraph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            colours: None,
            s: None,
            t: None,
            clauses: None,
        }
    }

    pub fn graph(&self) -> Result<DirectedGraph> {
        DirectedGraph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])).collect())
    }

    pub fn colouring(&self) -> Result<VertexColouring> {
        let colours = self
            .colours
            .clone()
            .ok_or_else(|| Error::InvalidColouring("graph file has no \"colours\"".into()))?;
        VertexColouring::new(self.graph()?, colours)
    }

    pub fn cnf(&self) -> Result<Option<EdgeCnf>> {
        self.clauses
            .as_ref()
            .map(|c| EdgeCnf::from_dimacs_clauses(c))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantFile {
    pub name: String,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct StructureFile {
    pub universe_size: usize,
    #[serde(default)]
    pub relations: Vec<RelationFile>,
    #[serde(default)]
    pub constants: Vec<ConstantFile>,
}

impl StructureFile {
    pub fn from_structure(a: &RelationalStructure) -> Self {
        Self {
            universe_size: a.universe_size(),
            relations: a
                .vocab()
                .relations()
                .iter()
                .map(|(name, arity)| RelationFile {
                    name: name.clone(),
                    arity: *arity,
                    tuples: a.sorted_tuples(name).expect("declared"),
                })
                .collect(),
            constants: a
                .vocab()
                .constants()
                .iter()
                .map(|name| ConstantFile {
                    name: name.clone(),
                    value: a.constant(name).expect("declared"),
                })
                .collect(),
        }
    }

    pub fn structure(&self) -> Result<RelationalStructure> {
        let vocab = Vocabulary::new(
            self.relations
                .iter()
                .map(|r| (r.name.clone(), r.arity))
                .collect(),
            self.constants.iter().map(|c| c.name.clone()).collect(),
        )?;
        RelationalStructure::new(
            vocab,
            self.universe_size,
            self.relations.iter().map(|r| r.tuples.clone()).collect(),
            self.constants.iter().map(|c| c.value).collect(),
        )
    }
}

fn formula_error(msg: impl Into<String>) -> Error {
    Error::InvalidFormula(msg.into())
}

fn only_keys(obj: &Map<String, Value>, keys: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !keys.contains(&k.as_str())) {
        Some(k) => Err(formula_error(format!("unexpected field \"{k}\""))),
        None => Ok(()),
    }
}

fn term_from_json(v: &Value) -> Result<Term> {
    let obj = v
        .as_object()
        .ok_or_else(|| formula_error("term must be an object"))?;
    let name = |key: &str| -> Result<String> {
        obj[key]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| formula_error(format!("\"{key}\" must be a string")))
    };
    if obj.contains_key("var") {
        only_keys(obj, &["var"])?;
        Ok(Term::Var(name("var")?))
    } else if obj.contains_key("const") {
        only_keys(obj, &["const"])?;
        Ok(Term::Const(name("const")?))
    } else {
        Err(formula_error("term needs \"var\" or \"const\""))
    }
}

fn args_of(obj: &Map<String, Value>) -> Result<&Vec<Value>> {
    obj.get("args")
        .and_then(Value::as_array)
        .ok_or_else(|| formula_error("\"args\" must be a list"))
}

pub fn formula_from_json(v: &Value) -> Result<Formula> {
    let obj = v
        .as_object()
        .ok_or_else(|| formula_error("node must be an object"))?;
    if let Some(op) = obj.get("op") {
        only_keys(obj, &["op", "args"])?;
        let children = args_of(obj)?
            .iter()
            .map(formula_from_json)
            .collect::<Result<Vec<_>>>()?;
        match op.as_str() {
            Some("and") => Ok(Formula::And(children)),
            Some("or") => Ok(Formula::Or(children)),
            Some("not") => {
                let [child]: [Formula; 1] = children
                    .try_into()
                    .map_err(|_| formula_error("\"not\" takes exactly one argument"))?;
                Ok(Formula::negate(child))
            }
            _ => Err(formula_error(format!("unknown connective {op}"))),
        }
    } else if let Some(rel) = obj.get("atom") {
        only_keys(obj, &["atom", "args"])?;
        let relation = rel
            .as_str()
            .ok_or_else(|| formula_error("\"atom\" must be a string"))?
            .to_string();
        let args = args_of(obj)?
            .iter()
            .map(term_from_json)
            .collect::<Result<Vec<_>>>()?;
        Ok(Formula::Atom { relation, args })
    } else if let Some(pair) = obj.get("eq") {
        only_keys(obj, &["eq"])?;
        let pair = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| formula_error("\"eq\" takes a list of two terms"))?;
        Ok(Formula::eq(
            term_from_json(&pair[0])?,
            term_from_json(&pair[1])?,
        ))
    } else {
        Err(formula_error("node needs \"op\", \"atom\" or \"eq\""))
    }
}

fn term_to_json(t: &Term) -> Value {
    match t {
        Term::Var(x) => json!({ "var": x }),
        Term::Const(c) => json!({ "const": c }),
    }
}

pub fn formula_to_json(f: &Formula) -> Value {
    match f {
        Formula::And(c) => {
            json!({ "op": "and", "args": c.iter().map(formula_to_json).collect::<Vec<_>>() })
        }
        Formula::Or(c) => {
            json!({ "op": "or", "args": c.iter().map(formula_to_json).collect::<Vec<_>>() })
        }
        Formula::Not(c) => json!({ "op": "not", "args": [formula_to_json(c)] }),
        Formula::Atom { relation, args } => {
            json!({ "atom": relation, "args": args.iter().map(term_to_json).collect::<Vec<_>>() })
        }
        Formula::Eq([a, b]) => json!({ "eq": [term_to_json(a), term_to_json(b)] }),
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    formula_from_json(&parse_json::<Value>(text)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub rows: Vec<Vec<i64>>,
}

impl MatrixFile {
    pub fn from_matrix(a: &ZeroOneMatrix) -> Self {
        Self {
            n: a.n(),
            rows: a
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(i64::from).collect())
                .collect(),
        }
    }

    pub fn matrix(&self) -> Result<ZeroOneMatrix> {
        if self.rows.len() != self.n {
            return Err(Error::InvalidMatrix(format!(
                "n = {} but {} rows given",
                self.n,
                self.rows.len()
            )));
        }
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        u8::try_from(x).ok().filter(|b| *b <= 1).ok_or_else(|| {
                            Error::InvalidMatrix(format!("entry ({i}, {j}) is {x}, not a bit"))
                        })
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ZeroOneMatrix::new(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum LabelFile {
    X { x: i64 },
    Y { y: i64 },
    Pass { pass: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ProgramFile {
    pub layers: Vec<Vec<usize>>,
    pub labels: BTreeMap<String, LabelFile>,
    pub edges: Vec<(usize, usize, Option<i64>)>,
    pub num_x: usize,
    pub num_y: usize,
    pub source: usize,
    pub sink: usize,
}

impl ProgramFile {
    pub fn from_program(p: &BranchingProgram) -> Self {
        let raw = p.to_raw();
        let labels = raw
            .labels
            .iter()
            .enumerate()
            .filter_map(|(u, l)| {
                let file = match (*l)? {
                    NodeLabel::X(i) => LabelFile::X { x: i as i64 + 1 },
                    NodeLabel::Y(j) => LabelFile::Y { y: j as i64 + 1 },
                    NodeLabel::Pass => LabelFile::Pass { pass: true },
                };
                Some((u.to_string(), file))
            })
            .collect();
        Self {
            layers: raw.layers,
            labels,
            edges: raw.edges,
            num_x: raw.num_x,
            num_y: raw.num_y,
            source: raw.source,
            sink: raw.sink,
        }
    }

    pub fn program(&self) -> Result<BranchingProgram> {
        let count: usize = self.layers.iter().map(Vec::len).sum();
        let mut labels = vec![None; count];
        for (key, label) in &self.labels {
            let u: usize = key
                .parse()
                .map_err(|_| Error::BadNodeLabel(format!("node id \"{key}\" is not a number")))?;
            if u >= count {
                return Err(Error::BadNodeLabel(format!("label for unknown node {u}")));
            }
            let index = |i: i64, name: &str| {
                usize::try_from(i)
                    .ok()
                    .filter(|&i| i >= 1)
                    .map(|i| i - 1)
                    .ok_or_else(|| Error::BadNodeLabel(format!("{name}_{i} at node {u}")))
            };
            labels[u] = Some(match *label {
                LabelFile::X { x } => NodeLabel::X(index(x, "x")?),
                LabelFile::Y { y } => NodeLabel::Y(index(y, "y")?),
                LabelFile::Pass { pass: true } => NodeLabel::Pass,
                LabelFile::Pass { pass: false } => {
                    return Err(Error::BadNodeLabel(format!("\"pass\": false at node {u}")))
                }
            });
        }
        validate_bp(RawProgram {
            layers: self.layers.clone(),
            labels,
            edges: self.edges.clone(),
            num_x: self.num_x,
            num_y: self.num_y,
            source: self.source,
            sink: self.sink,
        })
    }
}

/// Sidecar written next to a reduced instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RecordFile {
    pub name: String,
    pub source_problem: String,
    pub target_problem: String,
    pub parameter_bound: String,
    pub k_prime: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery_sign: Option<i8>,
}

impl RecordFile {
    pub fn new(record: &ReductionRecord, k_prime: usize) -> Self {
        Self {
            name: record.name.into(),
            source_problem: record.source_problem.into(),
            target_problem: record.target_problem.into(),
            parameter_bound: record.parameter_bound.into(),
            k_prime,
            n: None,
            recovery_sign: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_rejects_unknown_fields() {
        let err = parse_json::<GraphFile>(r#"{"n":2,"edges":[],"weights":[]}"#).unwrap_err();
        assert_eq!(err.name(), "parse-error");
        let g: GraphFile = parse_json(r#"{"n":2,"edges":[[0,1]],"s":0}"#).unwrap();
        assert_eq!(g.graph().unwrap().edge_count(), 1);
        assert_eq!(g.s, Some(0));
    }

    #[test]
    fn formula_round_trip() {
        let text = r#"{"op":"and","args":[{"atom":"E","args":[{"var":"x"},{"var":"y"}]},
            {"op":"not","args":[{"eq":[{"var":"x"},{"const":"s"}]}]}]}"#;
        let f = parse_formula(text).unwrap();
        assert_eq!(formula_from_json(&formula_to_json(&f)).unwrap(), f);
        assert!(parse_formula(r#"{"op":"xor","args":[]}"#).is_err());
        assert!(parse_formula(r#"{"atom":"E","args":[{"var":"x"}],"extra":1}"#).is_err());
    }

    #[test]
    fn structure_round_trip() {
        let text = r#"{"universeSize":3,"relations":[{"name":"E","arity":2,"tuples":[[0,1],[1,2]]}],
            "constants":[{"name":"s","value":0}]}"#;
        let a = parse_json::<StructureFile>(text)
            .unwrap()
            .structure()
            .unwrap();
        assert_eq!(StructureFile::from_structure(&a).structure().unwrap(), a);
    }

    #[test]
    fn matrix_bits() {
        let m: MatrixFile = parse_json(r#"{"n":2,"rows":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(m.matrix().unwrap().n(), 2);
        let bad: MatrixFile = parse_json(r#"{"n":2,"rows":[[0,2],[1,0]]}"#).unwrap();
        assert_eq!(bad.matrix().unwrap_err().name(), "invalid-matrix");
    }

    #[test]
    fn program_round_trip() {
        let text = r#"{"layers":[[0],[1],[2]],"labels":{"0":{"y":1},"1":{"pass":true}},
            "edges":[[0,1,0],[0,1,1],[1,2,null]],"numX":0,"numY":1,"source":0,"sink":2}"#;
        let p = parse_json::<ProgramFile>(text).unwrap().program().unwrap();
        assert_eq!(ProgramFile::from_program(&p).program().unwrap(), p);
        let bad = text.replace(r#"[0,1,1]"#, r#"[0,1,2]"#);
        let err = parse_json::<ProgramFile>(&bad)
            .unwrap()
            .program()
            .unwrap_err();
        assert_eq!(err.name(), "bad-bit-label");
        let extra = text.replace(r#"{"pass":true}"#, r#"{"pass":true,"x":1}"#);
        assert!(parse_json::<ProgramFile>(&extra).is_err());
        let zero = text.replace(r#"{"y":1}"#, r#"{"y":0}"#);
        let err = parse_json::<ProgramFile>(&zero)
            .unwrap()
            .program()
            .unwrap_err();
        assert_eq!(err.name(), "bad-node-label");
    }
}
