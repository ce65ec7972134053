use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use semilinear::complement::{complement, ResourceLimits};
use semilinear::diophantine::minimal_solutions;
use semilinear::json::{
    matrix_from_json, matrix_to_json, metrics_to_json, report_to_json, set_from_json, set_to_json,
    system_from_json, system_to_json, transcript_from_json, transcript_to_json, vector_from_json,
    vector_to_json, Transcript,
};
use semilinear::ops::{intersect, intersect_many, preimage, union};
use semilinear::oracle::{
    certify_operation, enumerate_box, equal_on_box, OperationKind, Status, DEFAULT_PRECISION,
};
use semilinear::random::{random_matrix, random_set, random_system, rng, SetShape};
use semilinear::{Error, SemilinearSet};
use serde_json::{json, Value};

const EXIT_SEMANTIC: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_VIOLATED: u8 = 3;

/// Exact operations on semilinear subsets of N^k.
///
/// Sets, matrices and transcripts are JSON documents given as a file path,
/// `-` for standard input, or inline text starting with `{`.
#[derive(Debug, Parser)]
#[command(name = "semilinear", version)]
struct Cli {
    /// Compact single-line JSON instead of pretty-printed output.
    #[arg(long, global = true)]
    json: bool,

    /// Starting precision (decimal digits) for bound certification.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize a set and report its metrics.
    Parse { set: String },
    /// Test whether a point belongs to a set.
    Member {
        #[arg(long)]
        point: String,
        set: String,
    },
    Union {
        a: String,
        b: String,
        /// Emit an operation transcript instead of the plain result.
        #[arg(long)]
        transcript: bool,
    },
    Intersect {
        a: String,
        b: String,
        #[arg(long)]
        transcript: bool,
    },
    IntersectMany {
        #[arg(required = true)]
        sets: Vec<String>,
        #[arg(long)]
        transcript: bool,
    },
    Complement {
        set: String,
        #[arg(long, default_value_t = ResourceLimits::default().max_components)]
        max_components: usize,
        #[arg(long, default_value_t = ResourceLimits::default().max_norm_bits)]
        max_norm_bits: u64,
        #[arg(long)]
        transcript: bool,
    },
    /// Inverse image of a set under x -> Hx.
    Preimage {
        /// JSON matrix {"H": [[..]]}.
        #[arg(long)]
        matrix: String,
        set: String,
        #[arg(long)]
        transcript: bool,
    },
    /// Minimal solutions of {"A": [[..]], "b": [..]}; the Hilbert basis when b = 0.
    Hilbert { system: String },
    /// All points of a set inside [0, B]^k.
    Enumerate {
        #[arg(long = "box")]
        bound: u64,
        set: String,
    },
    /// Compare two sets on [0, B]^k.
    Eq {
        #[arg(long = "box")]
        bound: u64,
        a: String,
        b: String,
    },
    /// Check an operation transcript against its size bounds.
    Certify { transcript: String },
    /// Emit a seeded random instance.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Instance::Set)]
        kind: Instance,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Instance {
    Set,
    System,
    Matrix,
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(Value, u8), Failure>;

fn read_source(src: &str) -> Result<String, Failure> {
    if src.trim_start().starts_with('{') || src.trim_start().starts_with('[') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(PathBuf::from(src)).map_err(|e| Failure::Input(format!("{src}: {e}")))
}

fn read_json(src: &str) -> Result<Value, Failure> {
    let text = read_source(src)?;
    serde_json::from_str(&text).map_err(|e| Failure::Lib(Error::Schema(format!("{src}: {e}"))))
}

fn read_set(src: &str) -> Result<SemilinearSet, Failure> {
    Ok(set_from_json(&read_json(src)?)?)
}

fn set_result(s: &SemilinearSet) -> Value {
    json!({ "result": set_to_json(s), "metrics": metrics_to_json(&s.metrics()) })
}

fn operation(
    op: OperationKind,
    inputs: Vec<SemilinearSet>,
    output: SemilinearSet,
    matrix: Option<semilinear::ops::IntegerMatrix>,
    transcript: bool,
) -> Outcome {
    let v = if transcript {
        transcript_to_json(&Transcript {
            op,
            inputs,
            output,
            matrix,
        })
    } else {
        set_result(&output)
    };
    Ok((v, 0))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Parse { set } => Ok((set_result(&read_set(set)?), 0)),
        Command::Member { point, set } => {
            let s = read_set(set)?;
            let p = vector_from_json(&read_json(point)?)?;
            Ok((Value::Bool(s.member(&p)?), 0))
        }
        Command::Union { a, b, transcript } => {
            let (a, b) = (read_set(a)?, read_set(b)?);
            let out = union(&a, &b)?;
            operation(OperationKind::Union, vec![a, b], out, None, *transcript)
        }
        Command::Intersect { a, b, transcript } => {
            let (a, b) = (read_set(a)?, read_set(b)?);
            let out = intersect(&a, &b)?;
            operation(OperationKind::Intersect, vec![a, b], out, None, *transcript)
        }
        Command::IntersectMany { sets, transcript } => {
            let sets = sets
                .iter()
                .map(|s| read_set(s))
                .collect::<Result<Vec<_>, _>>()?;
            let out = intersect_many(&sets)?;
            operation(OperationKind::IntersectMany, sets, out, None, *transcript)
        }
        Command::Complement {
            set,
            max_components,
            max_norm_bits,
            transcript,
        } => {
            let s = read_set(set)?;
            let limits = ResourceLimits::new(*max_components, *max_norm_bits)?;
            let out = complement(&s, &limits)?;
            operation(OperationKind::Complement, vec![s], out, None, *transcript)
        }
        Command::Preimage {
            matrix,
            set,
            transcript,
        } => {
            let h = matrix_from_json(&read_json(matrix)?)?;
            let s = read_set(set)?;
            let out = preimage(&h, &s)?;
            operation(OperationKind::Preimage, vec![s], out, Some(h), *transcript)
        }
        Command::Hilbert { system } => {
            let sys = system_from_json(&read_json(system)?)?;
            let sol = minimal_solutions(&sys, sys.is_homogeneous());
            let v = json!({
                "solutions": sol.solutions.iter().map(vector_to_json).collect::<Vec<_>>(),
                "norm_bound": semilinear::json::nat_to_json(&sol.norm_bound_used),
            });
            Ok((v, 0))
        }
        Command::Enumerate { bound, set } => {
            let s = read_set(set)?;
            let pts: Vec<Value> = enumerate_box(&s, *bound)
                .iter()
                .map(vector_to_json)
                .collect();
            Ok((Value::Array(pts), 0))
        }
        Command::Eq { bound, a, b } => {
            let (a, b) = (read_set(a)?, read_set(b)?);
            let (equal, witness) = equal_on_box(&a, &b, *bound)?;
            let v = json!({ "equal": equal, "witness": witness.as_ref().map(vector_to_json) });
            Ok((v, 0))
        }
        Command::Certify { transcript } => {
            let t = transcript_from_json(&read_json(transcript)?)?;
            let report =
                certify_operation(t.op, &t.inputs, &t.output, t.matrix.as_ref(), cli.precision)?;
            let code = if report.status == Status::Violated {
                EXIT_VIOLATED
            } else {
                0
            };
            Ok((report_to_json(&report), code))
        }
        Command::Random { seed, kind, dim } => {
            let mut r = rng(*seed);
            let dim = (*dim).max(1);
            let v = match kind {
                Instance::Set => {
                    let shape = SetShape {
                        max_dim: dim,
                        ..SetShape::default()
                    };
                    set_to_json(&random_set(&mut r, &shape))
                }
                Instance::System => system_to_json(&random_system(&mut r, dim, dim, 3, 3)),
                Instance::Matrix => matrix_to_json(&random_matrix(&mut r, dim, dim, 2)),
            };
            Ok((v, 0))
        }
    }
}

fn render(v: &Value, compact: bool) -> String {
    if compact {
        v.to_string()
    } else {
        serde_json::to_string_pretty(v).expect("serializable")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "{}",
                json!({ "error": "usage", "message": first.trim_start_matches("error: ") })
            );
            return ExitCode::from(EXIT_SEMANTIC);
        }
    };
    match run(&cli) {
        Ok((v, code)) => {
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "{}", render(&v, cli.json));
            ExitCode::from(code)
        }
        Err(f) => {
            let (kind, message, code) = match f {
                Failure::Lib(e) => {
                    let code = if e.is_resource_limit() {
                        EXIT_RESOURCE
                    } else {
                        EXIT_SEMANTIC
                    };
                    (e.kind(), e.to_string(), code)
                }
                Failure::Input(m) => ("io", m, EXIT_SEMANTIC),
            };
            eprintln!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(code)
        }
    }
}
