use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use saddlenf::dump::{cf_expand, lattice_dump, DumpError};
use saddlenf::job::RatioLiteral;
use saddlenf::{run_job, suite, EXIT_CONFIG, EXIT_OK};
use saddlenf_core::lattice::RatioSpec;

#[derive(Parser)]
#[command(name = "saddlenf", version, about = "Finite-order normal forms of planar saddle families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job file and write its report.
    Run {
        job: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the resonant exponent sets as CSV (`m1,m2,set`).
    Lattice {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long = "N", default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        maxdeg: u32,
        /// CSV path; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Continued fraction quotients and convergents.
    #[command(group(ArgGroup::new("input").required(true).args(["surd", "quotients", "rational", "float"])))]
    Cf {
        /// `a,b,c,d` for `(a + b·√d)/c`.
        #[arg(long, value_parser = parse_surd, allow_hyphen_values = true)]
        surd: Option<[i64; 4]>,
        #[arg(long, value_delimiter = ',')]
        quotients: Option<Vec<u64>>,
        /// `a/b`.
        #[arg(long)]
        rational: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        float: Option<f64>,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Run the verification suite (built-in matrix unless one is given).
    Verify {
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
}

fn parse_surd(s: &str) -> Result<[i64; 4], String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<i64>| format!("expected four integers a,b,c,d, got {}", v.len()))
}

fn lattice(p: u32, q: u32, n: u32, maxdeg: u32, csv: Option<PathBuf>) -> i32 {
    let result = match &csv {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => lattice_dump(p, q, n, maxdeg, f),
            Err(e) => {
                eprintln!("error [Io]: cannot create {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        },
        None => lattice_dump(p, q, n, maxdeg, std::io::stdout().lock()),
    };
    match result {
        Ok(rows) => {
            if csv.is_some() {
                eprintln!("{rows} rows written");
            }
            EXIT_OK
        }
        Err(DumpError::Core(e)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error [Io]: {e}");
            EXIT_CONFIG
        }
    }
}

fn cf(literal: RatioLiteral, terms: usize) -> i32 {
    let spec = match literal.to_spec() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let spec = match spec {
        RatioSpec::Float { value, .. } => RatioSpec::Float {
            value,
            max_terms: terms.min(saddlenf_core::lattice::cfrac::FLOAT_QUOTIENT_LIMIT),
        },
        s => s,
    };
    match cf_expand(&spec, terms) {
        Ok(t) => {
            print!("{}", t.render());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; exit 2 is reserved for findings
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { EXIT_OK as u8 });
        }
    };
    let code = match cli.command {
        Command::Run { job, out } => run_job(&job, out.as_deref()),
        Command::Lattice { p, q, n, maxdeg, csv } => lattice(p, q, n, maxdeg, csv),
        Command::Cf {
            surd,
            quotients,
            rational,
            float,
            terms,
        } => {
            let lit = if let Some(s) = surd {
                RatioLiteral::Surd(s)
            } else if let Some(qs) = quotients {
                RatioLiteral::Quotients(qs)
            } else if let Some(r) = rational {
                RatioLiteral::Rational(r)
            } else {
                RatioLiteral::Float {
                    value: float.expect("clap enforces one input"),
                    max_terms: terms,
                }
            };
            cf(lit, terms)
        }
        Command::Verify { matrix } => suite::run_suite(matrix.as_deref()),
    };
    ExitCode::from(code as u8)
}
