use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qspinor::cli::emit::{self, EmitOptions, Format, Kind};
use qspinor::cli::{parse_poly, print_canonical, run_suite, SUITES};
use qspinor::model::{Model, Mutation};
use qspinor::ncalg::{specs, AlgebraSpec};
use qspinor::{repr, sigma, Error};

#[derive(Parser)]
#[command(name = "qspinor", version, about = "Exact q-deformed spinor calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normal-order an expression and print its canonical form.
    Normalize {
        expr: String,
        /// Relation set: sl, slbar, spinor, plane, full, repr, repr2, bispinor.
        #[arg(long, default_value = "full")]
        spec: String,
        /// Also eliminate `a d` pairs using the unit determinant.
        #[arg(long)]
        reduce: bool,
    },
    /// Run an identity suite: epsilon, sldet, spinor, sigma, vectorrep, repr, all.
    Verify {
        suite: String,
        /// Run against a perturbed model: `flip-da` or `eps:ROW,COL`.
        #[arg(long)]
        mutate: Option<String>,
    },
    /// Print an artifact: dmatrix, eta, sigma, barsigma.
    Emit {
        kind: String,
        #[arg(long)]
        j: Option<String>,
        /// Numeric specialization point.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
        /// For eta: print the trace contraction instead of the tabulated metric.
        #[arg(long)]
        derived: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

const USAGE: u8 = 2;

fn spec_by_name(name: &str) -> Option<AlgebraSpec> {
    match name {
        "repr" => Some(repr::repr_spec()),
        "repr2" => Some(repr::doubled_repr_spec()),
        "bispinor" => Some(sigma::bispinor_spec()),
        other => specs::by_name(other),
    }
}

fn parse_mutation(s: &str) -> Option<Mutation> {
    if s == "flip-da" {
        return Some(Mutation::FlipDaRule);
    }
    let (r, c) = s.strip_prefix("eps:")?.split_once(',')?;
    let (row, col) = (r.trim().parse().ok()?, c.trim().parse().ok()?);
    (row < 2 && col < 2).then_some(Mutation::FlipEpsilon { row, col })
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE)
}

fn failure(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn normalize(expr: &str, spec_name: &str, reduce: bool) -> ExitCode {
    let Some(spec) = spec_by_name(spec_name) else {
        return usage(format!("unknown spec `{spec_name}`"));
    };
    let mut p = match parse_poly(&spec, expr) {
        Ok(p) => p,
        Err(e @ (Error::Syntax { .. } | Error::UnknownGenerator(_))) => return usage(e),
        Err(e) => return failure(e),
    };
    if reduce {
        let blocks = [specs::t_block(&spec), specs::tbar_block(&spec)];
        for blk in blocks.into_iter().flatten() {
            p = match spec.reduce_unimodular(&p, &blk) {
                Ok(p) => p,
                Err(e) => return failure(e),
            };
        }
    }
    println!("{}", print_canonical(&spec, &p));
    ExitCode::SUCCESS
}

fn verify(suite: &str, mutate: Option<&str>) -> ExitCode {
    if !SUITES.contains(&suite) {
        return usage(format!("unknown suite `{suite}` (expected one of {})", SUITES.join(", ")));
    }
    let model = match mutate {
        None => Model::standard(),
        Some(m) => match parse_mutation(m) {
            Some(m) => Model::mutated(m),
            None => return usage(format!("unknown mutation `{m}`")),
        },
    };
    match run_suite(suite, &model) {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => failure(e),
    }
}

fn emit_cmd(kind: &str, j: Option<&str>, q: Option<&str>, format: OutFormat, derived: bool) -> ExitCode {
    let kind = match Kind::parse(kind) {
        Ok(k) => k,
        Err(e) => return usage(e),
    };
    let j2 = match j.map(emit::parse_j).transpose() {
        Ok(j) => j,
        Err(e) => return usage(e),
    };
    if kind == Kind::DMatrix && j2.is_none() {
        return usage("dmatrix needs --j");
    }
    let q = match q.map(emit::parse_q).transpose() {
        Ok(q) => q,
        Err(e) => return usage(e),
    };
    let opts = EmitOptions {
        j2,
        q,
        format: match format {
            OutFormat::Text => Format::Text,
            OutFormat::Json => Format::Json,
        },
        derived,
    };
    match emit::emit(kind, &opts) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => failure(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Normalize { expr, spec, reduce } => normalize(&expr, &spec, reduce),
        Command::Verify { suite, mutate } => verify(&suite, mutate.as_deref()),
        Command::Emit {
            kind,
            j,
            q,
            format,
            derived,
        } => emit_cmd(&kind, j.as_deref(), q.as_deref(), format, derived),
    }
}
