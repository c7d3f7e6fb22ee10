use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use scleq::frontend::{emit_result, exit_code, format_trace, parse_native, parse_term, parse_tptp_cnf};
use scleq::search::{run, Heuristic, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Native,
    TptpCnf,
}

/// Clause learning prover for first-order logic with equality.
///
/// Exit codes: 0 unsatisfiable, 1 bounded model, 2 resource limit, 3 input error.
#[derive(Debug, Parser)]
#[command(name = "scleq", version)]
struct Cli {
    /// Input format.
    #[arg(long, value_enum, default_value_t = Format::Native)]
    format: Format,
    /// Ground bound; overrides the problem's. Default: f(f(c)) for the greatest f and c.
    #[arg(long)]
    beta: Option<String>,
    /// Number of times the bound may grow when the search is stuck.
    #[arg(long, default_value_t = 0)]
    grow: usize,
    /// Maximum number of rule applications.
    #[arg(long, default_value_t = 100_000)]
    max_steps: usize,
    /// Write the rule trace to this file instead of standard output.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Check the soundness conditions after every rule application (also SCLEQ_AUDIT=1).
    #[arg(long)]
    audit: bool,
    /// Use random decisions with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Problem file.
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match go(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("scleq: {e}");
            ExitCode::from(3)
        }
    }
}

fn go(cli: &Cli) -> Result<i32, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(&cli.file).map_err(|e| format!("{}: {e}", cli.file.display()))?;
    let problem = match cli.format {
        Format::Native => parse_native(&text)?,
        Format::TptpCnf => parse_tptp_cnf(&text)?,
    };
    let beta = match &cli.beta {
        Some(b) => {
            let t = parse_term(b, &problem.sig)?;
            if !t.is_ground() {
                return Err("--beta must be a ground term".into());
            }
            Some(t)
        }
        None => None,
    };
    let audit = cli.audit || std::env::var("SCLEQ_AUDIT").map(|v| v == "1").unwrap_or(false);
    let cfg = SearchConfig {
        beta,
        grow_limit: cli.grow,
        max_steps: cli.max_steps,
        heuristic: match cli.seed {
            Some(s) => Heuristic::Random(s),
            None => Heuristic::Default,
        },
        audit,
        record_learning: false,
    };
    let result = run(&problem, &cfg)?;
    if let Some(path) = &cli.trace {
        std::fs::write(path, format_trace(&result)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    print!("{}", emit_result(&result, cli.trace.is_some()));
    if !result.violations.is_empty() {
        eprintln!("scleq: {} audit violations", result.violations.len());
    }
    Ok(exit_code(result.verdict))
}
