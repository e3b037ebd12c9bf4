//! Command-line front end. Every command writes JSON lines (CSV for
//! `pairing`) and exits with 0 on success, 2 when a verification fails and 1
//! on usage or input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cohomology::{basis_for, multiply, ClassJson, GradedClass};
use crate::error::Error;
use crate::formal::{
    a_from_b, assoc_check, b_from_a, build_b, check_comm, check_maximality, extract_lalgebra, formal_projection,
    glue, glue_series, has_flat_identity,
};
use crate::homology::{check_pairings, check_top_degree, pairing};
use crate::lalgebra::{evaluate_tree_correlator, random_commuting, random_generic, tensor, verify, verify_linear_relations, LAlgebra, LAlgebraJson};
use crate::par::configure_threads;
use crate::rational::{fmt_q, parse_q, Q};
use crate::series::{MatrixSeries, MatrixSeriesJson, VectorFieldJson, VectorFieldSeries};
use crate::trees::{enumerate_stable_partitions, enumerate_trees, GoodFamily, Label, PaintedSet, PartitionJson};

/// Largest painted set and series order accepted without `--override-caps`.
pub const SIZE_CAP: usize = 8;
pub const ORDER_CAP: usize = 8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "painted-operad", version, about = "Painted stable trees, their cohomology, L-algebras and formal solutions")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Allow painted sets above 8 labels and orders above 8.
    #[arg(long, global = true)]
    override_caps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct SetArgs {
    #[arg(long)]
    whites: u32,
    #[arg(long, default_value_t = 0)]
    blacks: u32,
}

#[derive(Args, Debug, Clone)]
struct InArg {
    /// Input file; `-` or absent reads stdin.
    #[arg(long = "in")]
    input: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List or count trees.
    Trees {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        count: bool,
    },
    /// List painted stable 2-partitions.
    Partitions {
        #[command(flatten)]
        set: SetArgs,
    },
    /// Graded dimensions of the cohomology ring.
    Betti {
        #[command(flatten)]
        set: SetArgs,
    },
    /// Normal form of a class.
    Normalform {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        input: InArg,
    },
    /// Product of two classes, given as {"x": class, "y": class}.
    Multiply {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        input: InArg,
    },
    /// Deduplicated standard relations landing in a degree.
    Relations {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        degree: usize,
    },
    /// Pairing matrix between degrees d and top - d, as CSV.
    Pairing {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        degree: usize,
    },
    /// Structural checks of one ring: top degree and nondegenerate pairings.
    RingCheck {
        #[command(flatten)]
        set: SetArgs,
    },
    /// Verify an L-algebra; with a painted set also check the linear relations.
    LalgVerify {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        whites: Option<u32>,
        #[arg(long, default_value_t = 0)]
        blacks: u32,
        #[arg(long, default_value_t = 1)]
        edges: usize,
    },
    /// Evaluate a tree correlator.
    LalgEval {
        #[command(flatten)]
        input: InArg,
        /// Tree and inputs: {"whites", "blacks", "tree": [partitions], "inputs": {label: [q]}}.
        #[arg(long)]
        tree: String,
    },
    /// Check the commutativity equations for a matrix series.
    CommCheck {
        #[command(flatten)]
        input: InArg,
    },
    /// Generating series of an L-algebra.
    CommFromlalg {
        #[command(flatten)]
        input: InArg,
    },
    /// L-algebra read off a matrix series.
    CommTolalg {
        #[command(flatten)]
        input: InArg,
    },
    /// Check oriented associativity of a vector field.
    AssocCheck {
        #[command(flatten)]
        input: InArg,
        /// Also test whether this coordinate index is a flat identity.
        #[arg(long)]
        identity: Option<usize>,
    },
    /// Matrix series of a vector field.
    AssocTocomm {
        #[command(flatten)]
        input: InArg,
    },
    /// Vector field of a matrix series and a primitive vector.
    CommToassoc {
        #[command(flatten)]
        input: InArg,
        /// Comma-separated rationals.
        #[arg(long)]
        h: String,
    },
    /// Glue a T-series with an F-vector field (or F-series).
    Glue {
        #[arg(long)]
        b1: String,
        #[arg(long)]
        a2: Option<String>,
        #[arg(long)]
        b2: Option<String>,
        #[arg(long)]
        h: String,
    },
    /// Formal projection of a total series onto a base series.
    Project {
        #[arg(long)]
        base: String,
        #[arg(long)]
        total: String,
    },
    /// Tensor product of two L-algebras.
    Tensor {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Truncated maximality test.
    Maximality {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        order: usize,
    },
    /// Reproducible random L-algebra.
    GenLalg {
        #[arg(long)]
        dimt: usize,
        #[arg(long)]
        dimf: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `commuting` (valid) or `generic`.
        #[arg(long, default_value = "commuting")]
        kind: String,
    },
}

/// A usage or input error, reported on stderr with exit code 1.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = std::result::Result<bool, Failure>;

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    out: Vec<u8>,
    override_caps: bool,
}

impl Ctx<'_> {
    fn line(&mut self, v: &impl Serialize) {
        let s = serde_json::to_string(v).expect("serializable output");
        self.out.extend_from_slice(s.as_bytes());
        self.out.push(b'\n');
    }

    fn raw(&mut self, s: &str) {
        self.out.extend_from_slice(s.as_bytes());
    }

    fn read_source(&mut self, path: Option<&str>) -> std::result::Result<String, Failure> {
        match path {
            None | Some("-") => {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| Failure(format!("reading stdin: {e}")))?;
                Ok(s)
            }
            Some(p) => std::fs::read_to_string(p).map_err(|e| Failure(format!("reading {p}: {e}"))),
        }
    }

    fn read_json<T: for<'de> Deserialize<'de>>(&mut self, path: Option<&str>) -> std::result::Result<T, Failure> {
        let text = self.read_source(path)?;
        serde_json::from_str(&text).map_err(|e| Failure(format!("malformed JSON: {e}")))
    }

    fn painted(&self, set: SetArgs) -> std::result::Result<PaintedSet, Failure> {
        let s = PaintedSet::new(set.whites, set.blacks)?;
        if s.len() > SIZE_CAP && !self.override_caps {
            return Err(Failure(format!("painted set of size {} exceeds the cap {SIZE_CAP}; pass --override-caps", s.len())));
        }
        Ok(s)
    }

    fn order_cap(&self, order: usize) -> std::result::Result<(), Failure> {
        if order > ORDER_CAP && !self.override_caps {
            return Err(Failure(format!("order {order} exceeds the cap {ORDER_CAP}; pass --override-caps")));
        }
        Ok(())
    }

    fn lalgebra(&mut self, path: Option<&str>) -> std::result::Result<LAlgebra, Failure> {
        let j: LAlgebraJson = self.read_json(path)?;
        self.order_cap(j.order)?;
        Ok(LAlgebra::from_json(&j)?)
    }

    fn matrix_series(&mut self, path: Option<&str>) -> std::result::Result<MatrixSeries, Failure> {
        let j: MatrixSeriesJson = self.read_json(path)?;
        self.order_cap(j.order as usize)?;
        Ok(MatrixSeries::from_json(&j)?)
    }

    fn vector_field(&mut self, path: Option<&str>) -> std::result::Result<VectorFieldSeries, Failure> {
        let j: VectorFieldJson = self.read_json(path)?;
        self.order_cap(j.order as usize)?;
        Ok(VectorFieldSeries::from_json(&j)?)
    }
}

fn parse_vector(s: &str) -> std::result::Result<Vec<Q>, Failure> {
    s.split(',').map(|x| parse_q(x.trim()).map_err(Failure::from)).collect()
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Deserialize)]
struct ProductInput {
    x: ClassJson,
    y: ClassJson,
}

#[derive(Deserialize)]
struct TreeInput {
    whites: u32,
    #[serde(default)]
    blacks: u32,
    tree: Vec<PartitionJson>,
    inputs: BTreeMap<Label, Vec<String>>,
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> Outcome {
    match command {
        Command::Trees { set, edges, count } => {
            let s = ctx.painted(set)?;
            let trees = enumerate_trees(s, edges);
            if count {
                ctx.raw(&format!("{}\n", trees.len()));
            } else {
                for g in trees {
                    ctx.line(&json!({ "edges": g.edges(), "tree": g.to_json() }));
                }
            }
            Ok(true)
        }
        Command::Partitions { set } => {
            let s = ctx.painted(set)?;
            for p in enumerate_stable_partitions(s) {
                ctx.line(&p.to_json());
            }
            Ok(true)
        }
        Command::Betti { set } => {
            let s = ctx.painted(set)?;
            let b = basis_for(s)?;
            ctx.line(&json!({ "dims": b.dims() }));
            Ok(true)
        }
        Command::Normalform { set, input } => {
            let s = ctx.painted(set)?;
            let j: ClassJson = ctx.read_json(input.input.as_deref())?;
            let x = GradedClass::from_json(s, &j)?;
            let nf = basis_for(s)?.normal_form(&x)?;
            ctx.line(&nf.to_json());
            Ok(true)
        }
        Command::Multiply { set, input } => {
            let s = ctx.painted(set)?;
            let j: ProductInput = ctx.read_json(input.input.as_deref())?;
            let x = GradedClass::from_json(s, &j.x)?;
            let y = GradedClass::from_json(s, &j.y)?;
            let b = basis_for(s)?;
            ctx.line(&multiply(&x, &y, &b)?.to_json());
            Ok(true)
        }
        Command::Relations { set, degree } => {
            let s = ctx.painted(set)?;
            for r in basis_for(s)?.relations(degree) {
                ctx.line(&r.to_json());
            }
            Ok(true)
        }
        Command::Pairing { set, degree } => {
            let s = ctx.painted(set)?;
            let b = basis_for(s)?;
            let p = pairing(&b, degree)?;
            ctx.raw(&p.to_csv());
            Ok(true)
        }
        Command::RingCheck { set } => {
            let s = ctx.painted(set)?;
            let b = basis_for(s)?;
            let top = check_top_degree(&b).err().map(|e| e.to_string());
            let pairings = if top.is_none() { check_pairings(&b).err().map(|e| e.to_string()) } else { None };
            let pass = top.is_none() && pairings.is_none();
            ctx.line(&json!({ "status": status(pass), "dims": b.dims(), "top_degree_error": top, "pairing_error": pairings }));
            Ok(pass)
        }
        Command::LalgVerify { input, whites, blacks, edges } => {
            let l = ctx.lalgebra(input.input.as_deref())?;
            let r = verify(&l);
            for v in &r.violations {
                ctx.line(&json!({ "violation": v }));
            }
            for v in &r.f_symmetry_violations {
                ctx.line(&json!({ "symmetry_violation": v }));
            }
            let mut pass = r.passes();
            let mut summary = json!({
                "checked": r.checked,
                "violations": r.violations.len(),
                "fully_symmetric": r.fully_symmetric(),
            });
            if let Some(w) = whites {
                let s = ctx.painted(SetArgs { whites: w, blacks })?;
                let lr = verify_linear_relations(&l, s, edges)?;
                for v in &lr.violations {
                    ctx.line(&json!({ "linear_violation": v }));
                }
                pass &= lr.passes();
                summary["linear_relations_checked"] = json!(lr.relations_checked);
                summary["linear_violations"] = json!(lr.violations.len());
            }
            summary["status"] = json!(status(pass));
            ctx.line(&summary);
            Ok(pass)
        }
        Command::LalgEval { input, tree } => {
            let l = ctx.lalgebra(input.input.as_deref())?;
            let t: TreeInput = ctx.read_json(Some(&tree))?;
            let s = ctx.painted(SetArgs { whites: t.whites, blacks: t.blacks })?;
            let g = GoodFamily::from_json(s, &t.tree)?;
            let mut inputs = BTreeMap::new();
            for (label, v) in &t.inputs {
                inputs.insert(*label, v.iter().map(|x| parse_q(x)).collect::<crate::Result<Vec<Q>>>()?);
            }
            let out = evaluate_tree_correlator(&l, &g, &inputs)?;
            ctx.line(&json!({ "value": out.iter().map(fmt_q).collect::<Vec<_>>() }));
            Ok(true)
        }
        Command::CommCheck { input } => {
            let b = ctx.matrix_series(input.input.as_deref())?;
            let r = check_comm(&b);
            ctx.line(&r);
            Ok(r.passes())
        }
        Command::CommFromlalg { input } => {
            let l = ctx.lalgebra(input.input.as_deref())?;
            ctx.line(&build_b(&l).to_json());
            Ok(true)
        }
        Command::CommTolalg { input } => {
            let b = ctx.matrix_series(input.input.as_deref())?;
            ctx.line(&extract_lalgebra(&b)?.to_json());
            Ok(true)
        }
        Command::AssocCheck { input, identity } => {
            let a = ctx.vector_field(input.input.as_deref())?;
            let r = assoc_check(&a);
            let mut v = serde_json::to_value(&r).expect("serializable report");
            let mut pass = r.passes();
            if let Some(e) = identity {
                if e >= a.dim() {
                    return Err(Failure(format!("identity index {e} out of range")));
                }
                let ok = has_flat_identity(&a, e);
                v["flat_identity"] = json!(ok);
                pass &= ok;
                v["status"] = json!(status(pass));
            }
            ctx.line(&v);
            Ok(pass)
        }
        Command::AssocTocomm { input } => {
            let a = ctx.vector_field(input.input.as_deref())?;
            ctx.line(&b_from_a(&a).to_json());
            Ok(true)
        }
        Command::CommToassoc { input, h } => {
            let b = ctx.matrix_series(input.input.as_deref())?;
            let h = parse_vector(&h)?;
            match a_from_b(&b, &h) {
                Ok(a) => {
                    ctx.line(&a.to_json());
                    Ok(true)
                }
                Err(e @ (Error::NotClosed(_) | Error::NotPrimitive(_))) => {
                    ctx.line(&json!({ "status": "fail", "error": e.to_string() }));
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Glue { b1, a2, b2, h } => {
            let s1 = ctx.matrix_series(Some(&b1))?;
            let h = parse_vector(&h)?;
            let out = match (a2, b2) {
                (Some(a), None) => {
                    let a = ctx.vector_field(Some(&a))?;
                    glue(&s1, &a, &h)?
                }
                (None, Some(b)) => {
                    let b = ctx.matrix_series(Some(&b))?;
                    glue_series(&s1, &b, &h)?
                }
                _ => return Err(Failure("give exactly one of --a2 and --b2".into())),
            };
            ctx.line(&out.to_json());
            Ok(true)
        }
        Command::Project { base, total } => {
            let b = ctx.matrix_series(Some(&base))?;
            let t = ctx.matrix_series(Some(&total))?;
            match formal_projection(&b, &t) {
                Ok(p) => {
                    ctx.line(&p.to_json());
                    Ok(true)
                }
                Err(e @ Error::Inconsistent(_)) => {
                    ctx.line(&json!({ "status": "fail", "error": e.to_string() }));
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Tensor { left, right } => {
            let l1 = ctx.lalgebra(Some(&left))?;
            let l2 = ctx.lalgebra(Some(&right))?;
            ctx.line(&tensor(&l1, &l2)?.to_json());
            Ok(true)
        }
        Command::Maximality { input, order } => {
            ctx.order_cap(order)?;
            let b = ctx.matrix_series(input.input.as_deref())?;
            ctx.line(&check_maximality(&b, order as u32));
            Ok(true)
        }
        Command::GenLalg { dimt, dimf, order, seed, kind } => {
            ctx.order_cap(order)?;
            if dimt + dimf > SIZE_CAP && !ctx.override_caps {
                return Err(Failure(format!("dimT + dimF above {SIZE_CAP}; pass --override-caps")));
            }
            let l = match kind.as_str() {
                "commuting" => random_commuting(seed, dimt, dimf, order),
                "generic" => random_generic(seed, dimt, dimf, order),
                other => return Err(Failure(format!("unknown kind '{other}'"))),
            };
            ctx.line(&l.to_json());
            Ok(true)
        }
    }
}

/// Runs the command line `args` (program name first), reading stdin from
/// `stdin` and writing to `stdout` unless `--out` is given. Returns the exit code.
pub fn run_with<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    if let Some(n) = std::env::var("PAINTED_OPERAD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        configure_threads(n);
    }
    let mut ctx = Ctx { stdin, out: Vec::new(), override_caps: cli.override_caps };
    let result = dispatch(&mut ctx, cli.command);
    let code = match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &ctx.out).map_err(|e| e.to_string()),
        None => stdout.write_all(&ctx.out).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return EXIT_USAGE;
    }
    code
}

/// Runs with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}

/// Convenience for tests: runs and captures stdout as a string.
pub fn run_capture(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut input = stdin.as_bytes();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("painted-operad").chain(args.iter().copied()), &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf-8 output"), String::from_utf8(err).expect("utf-8 output"))
}
