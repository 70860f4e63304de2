//! Batch command-line front end. Every counting subcommand prints one JSON
//! report on standard output; errors go to standard error.
//!
//! Exit codes: 0 on success, 1 on a domain error (reported by its stable
//! name), 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bp::{bp_count_acc, bp_count_fast, stagger};
use crate::cnf::{
    count_cycle_cover2_cnf, count_log_reach2_cnf, cycle_cover_gate_passes, reach2_cnf_gate, EdgeCnf,
};
use crate::error::{Error, Result};
use crate::fo::{count_mc, count_mc_local, QfFormula};
use crate::formats::{
    parse_formula, parse_json, read_text, to_json, write_text, GraphFile, MatrixFile, ProgramFile,
    RecordFile, StructureFile,
};
use crate::hom::count_hom_path_star;
use crate::pdet::{pdet_clow, pdet_direct};
use crate::reductions::{
    reduce_hom_to_reach, reduce_reach_colour_to_hom, reduce_reach_to_mc, reduce_reach_to_pdet,
    HomToReach, ReachColourToHom, ReachToMc, ReachToPdet, Reduction,
};
use crate::selftest::{format_table, run_all, Scale};
use crate::walk::{
    count_log_reach_b, count_log_walk_b, count_reach, count_reach_colour, log_gate, ReachInstance,
};

pub const DEFAULT_LIMIT: u64 = 10_000_000;
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "paracount", version, about = "Exact parameterised counting")]
pub struct Cli {
    /// Cap on enumeration states for every exhaustive method
    #[arg(long, global = true, env = "PARACOUNT_LIMIT", default_value_t = DEFAULT_LIMIT)]
    pub limit: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Endpoints {
    /// Start vertex (defaults to the graph file's "s")
    #[arg(long)]
    pub s: Option<usize>,
    /// End vertex (defaults to the graph file's "t")
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Walks from s to t with k vertices
    Reach {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long)]
        k: usize,
    },
    /// Walks from s to t with a edges, out-degree at most b
    Logreach {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
    },
    /// All walks with a edges, out-degree at most b
    Logwalk {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
    },
    /// Colour-respecting walks; colours come from the graph file
    Reachcolour {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long)]
        k: usize,
    },
    /// Walks with a edges whose edge set satisfies a CNF
    Reach2cnf {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ends: Endpoints,
        /// DIMACS file; otherwise the graph file's "clauses", otherwise empty
        #[arg(long)]
        cnf: Option<PathBuf>,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        k: usize,
    },
    /// Cycle covers with at most k nontrivial cycles covering k*a vertices
    Cyclecover2cnf {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cnf: Option<PathBuf>,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        k: usize,
    },
    /// Satisfying assignments of a quantifier-free formula
    Mc {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = McMethod::Brute)]
        method: McMethod,
        /// Locality radius for the local method (defaults to the formula's)
        #[arg(long)]
        r: Option<usize>,
        /// Arity bound for the local method (defaults to the formula's)
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Homomorphisms from the coloured path P_n* into a target structure
    Hom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Parameterised determinant of a 0/1 matrix
    Pdet {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = PdetMethod::Direct)]
        method: PdetMethod,
    },
    /// Accepting y-assignments of a branching program on input x
    Bp {
        #[arg(long)]
        program: PathBuf,
        /// Bits x_1 x_2 ... as a 0/1 string
        #[arg(long, default_value = "")]
        x: String,
        #[arg(long, value_enum, default_value_t = BpMethod::Acc)]
        method: BpMethod,
        /// Stagger the program before counting
        #[arg(long)]
        stagger: bool,
    },
    /// Apply a parsimonious reduction and write the target instance
    Reduce {
        #[arg(long, value_enum)]
        name: ReductionName,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k: usize,
        /// Pattern size for hom-to-reach
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        ends: Endpoints,
    },
    /// Cross-oracle property checks on seeded random instances
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ScaleArg::Smoke)]
        scale: ScaleArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum McMethod {
    Brute,
    Local,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PdetMethod {
    Direct,
    Clow,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BpMethod {
    Acc,
    Fast,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReductionName {
    HomToReach,
    ReachcolourToHom,
    ReachToMc,
    ReachToPdet,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Smoke,
    Full,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub gate_applied: bool,
    pub elapsed_ms: u128,
    pub digest: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ReduceReport {
    name: &'static str,
    k_prime: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovery_sign: Option<i8>,
    outputs: Vec<String>,
    elapsed_ms: u128,
    digest: String,
}

// hashes every input file and parameter that determines the instance
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        Self { hasher }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let text = read_text(path)?;
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn param(&mut self, name: &str, value: impl std::fmt::Display) {
        self.hasher.update(format!("\0{name}={value}").as_bytes());
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

enum Outcome {
    Report(String),
    Usage(String),
}

fn endpoints(ends: &Endpoints, file: &GraphFile) -> std::result::Result<(usize, usize), String> {
    let s = ends
        .s
        .or(file.s)
        .ok_or("missing --s and the graph file has no \"s\"")?;
    let t = ends
        .t
        .or(file.t)
        .ok_or("missing --t and the graph file has no \"t\"")?;
    Ok((s, t))
}

fn load_cnf(inputs: &mut Inputs, path: Option<&Path>, file: &GraphFile) -> Result<EdgeCnf> {
    match path {
        Some(p) => EdgeCnf::parse_dimacs(&inputs.read(p)?),
        None => Ok(file.cnf()?.unwrap_or_else(EdgeCnf::empty)),
    }
}

fn parse_bits(x: &str) -> Result<Vec<bool>> {
    x.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidArgument(format!(
                "--x must be a 0/1 string, found {c:?}"
            ))),
        })
        .collect()
}

fn guard(states: u128, limit: u64) -> Result<()> {
    if states > u128::from(limit) {
        Err(Error::LimitExceeded(limit))
    } else {
        Ok(())
    }
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

fn count_report(
    count: impl ToString,
    gate_applied: bool,
    start: Instant,
    inputs: Inputs,
) -> String {
    to_json(&RunReport {
        count: Some(count.to_string()),
        value: None,
        gate_applied,
        elapsed_ms: start.elapsed().as_millis(),
        digest: inputs.digest(),
    })
}

fn execute(command: Command, limit: u64) -> Result<Outcome> {
    let start = Instant::now();
    let mut inputs;
    macro_rules! usage {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(msg) => return Ok(Outcome::Usage(msg.to_string())),
            }
        };
    }
    let report = match command {
        Command::Reach { graph, ends, k } => {
            inputs = Inputs::new("reach");
            let file: GraphFile = parse_json(&inputs.read(&graph)?)?;
            let (s, t) = usage!(endpoints(&ends, &file));
            inputs.param("s", s);
            inputs.param("t", t);
            inputs.param("k", k);
            let count = count_reach(&ReachInstance::new(file.graph()?, s, t, k)?);
            count_report(count, false, start, inputs)
        }
        Command::Logreach {
            graph,
            ends,
            a,
            k,
            b,
        } => {
            inputs = Inputs::new("logreach");
            let file: GraphFile = parse_json(&inputs.read(&graph)?)?;
            let (s, t) = usage!(endpoints(&ends, &file));
            for (name, v) in [("s", s), ("t", t), ("a", a), ("k", k), ("b", b)] {
                inputs.param(name, v);
            }
            let g = file.graph()?;
            let count = count_log_reach_b(&g, s, t, a, k, b)?;
            count_report(count, !log_gate(&g, a, k).passes(), start, inputs)
        }
        Command::Logwalk { graph, a, k, b } => {
            inputs = Inputs::new("logwalk");
            let file: GraphFile = parse_json(&inputs.read(&graph)?)?;
            for (name, v) in [("a", a), ("k", k), ("b", b)] {
                inputs.param(name, v);
            }
            let g = file.graph()?;
            let count = count_log_walk_b(&g, a, k, b)?;
            count_report(count, !log_gate(&g, a, k).passes(), start, inputs)
        }
        Command::Reachcolour { graph, ends, k } => {
            inputs = Inputs::new("reachcolour");
            let file: GraphFile = parse_json(&inputs.read(&graph)?)?;
            let (s, t) = usage!(endpoints(&ends, &file));
            for (name, v) in [("s", s), ("t", t), ("k", k)] {
                inputs.param(name, v);
            }
            let vc = file.colouring()?;
            let count = count_reach_colour(&vc, s, t, k)?;
            count_report(count, vc.m() != k, start, inputs)
        }
        Command::Reach2cnf {
            graph,
            ends,
            cnf,
            a,
            k,
        } => {
            inputs = Inputs::new("reach2cnf");
            let file: GraphFile = parse_json(&inputs.read(&graph)?)?;
            let (s, t) = usage!(endpoints(&ends, &file));
            let cnf = load_cnf(&mut inputs, cnf.as_deref(), &file)?;
            for (name, v) in [("s", s), ("t", t), ("a", a), ("k", k)] {
                inputs.param(name, v);
            }
            let g = file.graph()?;
            let count = count_log_reach2_cnf(&g, s, t, &cnf, a, k)?;
            count_report(
                count,
                !reach2_cnf_gate(&g, &cnf, a, k).passes(),
                start,
                inputs,
            )
        }
        Command::Cyclecover2cnf { graph, cnf, a, k } => {
            inputs = Inputs::new("cyclecover2cnf");
            let file: GraphFile = parse_json(&inputs.read(&graph)?)?;
            let cnf = load_cnf(&mut inputs, cnf.as_deref(), &file)?;
            inputs.param("a", a);
            inputs.param("k", k);
            let g = file.graph()?;
            let count = count_cycle_cover2_cnf(&g, &cnf, a, k)?;
            count_report(count, !cycle_cover_gate_passes(&g, &cnf, a), start, inputs)
        }
        Command::Mc {
            formula,
            structure,
            k,
            method,
            r,
            arity,
        } => {
            inputs = Inputs::new("mc");
            let phi = QfFormula::new(parse_formula(&inputs.read(&formula)?)?)?;
            let file: StructureFile = parse_json(&inputs.read(&structure)?)?;
            let a = file.structure()?;
            inputs.param("k", k);
            let count = match method {
                McMethod::Brute => {
                    let vars = phi.free_variables().len();
                    guard(saturating_pow(a.universe_size() as u128, vars), limit)?;
                    count_mc(&phi, &a, k)?
                }
                McMethod::Local => {
                    let r = r.unwrap_or_else(|| phi.locality_radius());
                    let arity = arity.unwrap_or_else(|| phi.max_arity());
                    count_mc_local(&phi, &a, k, r, arity)?
                }
            };
            count_report(count, k != phi.size(), start, inputs)
        }
        Command::Hom { n, target, k } => {
            inputs = Inputs::new("hom");
            let file: StructureFile = parse_json(&inputs.read(&target)?)?;
            inputs.param("n", n);
            inputs.param("k", k);
            let count = count_hom_path_star(n, &file.structure()?, k)?;
            count_report(count, n > k, start, inputs)
        }
        Command::Pdet { matrix, k, method } => {
            inputs = Inputs::new("pdet");
            let file: MatrixFile = parse_json(&inputs.read(&matrix)?)?;
            inputs.param("k", k);
            let a = file.matrix()?;
            let value = match method {
                PdetMethod::Direct => {
                    let n = a.n() as u128;
                    let k128 = k.min(a.n()) as u128;
                    // k-subsets times their permutations
                    guard(
                        (n - k128 + 1..=n).fold(1u128, |acc, i| acc.saturating_mul(i)),
                        limit,
                    )?;
                    pdet_direct(&a, k)?
                }
                PdetMethod::Clow => pdet_clow(&a, k, limit)?,
            };
            to_json(&RunReport {
                count: None,
                value: Some(value.to_string()),
                gate_applied: false,
                elapsed_ms: start.elapsed().as_millis(),
                digest: inputs.digest(),
            })
        }
        Command::Bp {
            program,
            x,
            method,
            stagger: restage,
        } => {
            inputs = Inputs::new("bp");
            let file: ProgramFile = parse_json(&inputs.read(&program)?)?;
            inputs.param("x", &x);
            let mut p = file.program()?;
            if restage {
                p = stagger(&p)?;
            }
            let bits = parse_bits(&x)?;
            let count = match method {
                BpMethod::Acc => {
                    guard(saturating_pow(2, p.num_y()), limit)?;
                    bp_count_acc(&p, &bits)?
                }
                BpMethod::Fast => bp_count_fast(&p, &bits)?,
            };
            count_report(count, false, start, inputs)
        }
        Command::Reduce {
            name,
            input,
            out,
            k,
            n,
            ends,
        } => {
            inputs = Inputs::new("reduce");
            let text = inputs.read(&input)?;
            inputs.param("k", k);
            let mut outputs = vec![out.clone()];
            let (record, k_prime, recovery_sign, n_field) = match name {
                ReductionName::HomToReach => {
                    let n = usage!(n.ok_or("hom-to-reach needs --n"));
                    inputs.param("n", n);
                    let file: StructureFile = parse_json(&text)?;
                    let target = reduce_hom_to_reach(n, &file.structure()?, k)?;
                    let mut g = GraphFile::from_graph(&target.graph);
                    g.s = Some(target.s);
                    g.t = Some(target.t);
                    write_text(&out, &to_json(&g))?;
                    (HomToReach.record(), target.k, None, None)
                }
                ReductionName::ReachcolourToHom => {
                    let file: GraphFile = parse_json(&text)?;
                    let (s, t) = usage!(endpoints(&ends, &file));
                    let colouring = file.colouring()?;
                    let target = reduce_reach_colour_to_hom(&colouring, s, t, k)?;
                    let k_prime = ReachColourToHom.target_parameter(&target);
                    write_text(
                        &out,
                        &to_json(&StructureFile::from_structure(&target.target)),
                    )?;
                    (ReachColourToHom.record(), k_prime, None, Some(target.n))
                }
                ReductionName::ReachToMc => {
                    let file: GraphFile = parse_json(&text)?;
                    let (s, t) = usage!(endpoints(&ends, &file));
                    let target = reduce_reach_to_mc(&file.graph()?, s, t, k)?;
                    let formula = crate::formats::formula_to_json(target.formula.root());
                    write_text(&out, &to_json(&formula))?;
                    let side = sidecar(&out, "structure");
                    write_text(
                        &side,
                        &to_json(&StructureFile::from_structure(&target.structure)),
                    )?;
                    outputs.push(side);
                    (ReachToMc.record(), target.k, None, None)
                }
                ReductionName::ReachToPdet => {
                    let file: GraphFile = parse_json(&text)?;
                    let (s, t) = usage!(endpoints(&ends, &file));
                    let target = reduce_reach_to_pdet(&file.graph()?, s, t, k)?;
                    write_text(&out, &to_json(&MatrixFile::from_matrix(&target.matrix)))?;
                    (
                        ReachToPdet.record(),
                        target.k,
                        Some(target.recovery_sign),
                        None,
                    )
                }
            };
            let mut sidecar_record = RecordFile::new(&record, k_prime);
            sidecar_record.n = n_field;
            sidecar_record.recovery_sign = recovery_sign;
            let side = sidecar(&out, "record");
            write_text(&side, &to_json(&sidecar_record))?;
            outputs.push(side);
            to_json(&ReduceReport {
                name: record.name,
                k_prime,
                recovery_sign,
                outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
                elapsed_ms: start.elapsed().as_millis(),
                digest: inputs.digest(),
            })
        }
        Command::Selftest { .. } => unreachable!("handled by run"),
    };
    Ok(Outcome::Report(report))
}

fn sidecar(out: &Path, kind: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(format!(".{kind}.json"));
    PathBuf::from(name)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
                return 0;
            }
            let _ = write!(err, "{rendered}");
            return 2;
        }
    };
    if let Command::Selftest { seed, scale } = cli.command {
        let scale = match scale {
            ScaleArg::Smoke => Scale::Smoke,
            ScaleArg::Full => Scale::Full,
        };
        let results = run_all(seed, scale);
        let _ = write!(out, "{}", format_table(&results));
        return if results.iter().all(|r| r.passed()) {
            0
        } else {
            1
        };
    }
    match execute(cli.command, cli.limit) {
        Ok(Outcome::Report(json)) => {
            let _ = writeln!(out, "{json}");
            0
        }
        Ok(Outcome::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            1
        }
    }
}
