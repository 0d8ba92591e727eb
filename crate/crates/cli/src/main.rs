use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use zcycles_cli::commands;
use zcycles_cli::config::Scenario;
use zcycles_cli::error::CliError;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(
    name = "zcycles",
    version,
    about = "Zero-cycle filtrations and Galois symbols over finite models"
)]
struct Cli {
    /// scenario file (TOML); the bundled elliptic scenario when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// bound on the universe size
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true)]
    rmax: Option<usize>,
    /// write output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// record wall time per check (reports are then not byte-stable)
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// run verification suites
    Verify {
        #[arg(long = "suite", num_args = 1..)]
        suites: Vec<String>,
    },
    /// cokernels of the filtrations F, G, R, B on level-1 cycles
    Filtration,
    /// symbol expressions
    Symbols {
        #[command(subcommand)]
        action: SymbolsCommand,
    },
    /// cohomology tables, the Kummer map and s_n
    Cohomology {
        #[arg(long)]
        symbol: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum SymbolsCommand {
    /// parse and resolve an expression such as "{P1,P2}_2"
    Eval { expr: String },
}

fn scenario(cli: &Cli) -> Result<Scenario, CliError> {
    let mut s = match &cli.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::bundled(),
    };
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(cap) = cli.cap {
        s.cap = cap;
    }
    if let Some(r) = cli.rmax {
        s.r_max = r;
    }
    s.validate()?;
    Ok(s)
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let s = scenario(cli)?;
    let value = match &cli.command {
        Command::Verify { suites } => {
            let report = zcycles_cli::verify(&s, suites, cli.timings)?;
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(cli, &text)?;
            for c in report
                .checks
                .iter()
                .filter(|c| c.status == zcycles_cli::report::Status::Fail)
            {
                eprintln!("failed: {} ({})", c.id, c.citation);
            }
            return Ok(if report.summary.fail == 0 { 0 } else { 1 });
        }
        Command::Filtration => commands::filtration(&s, &s.build_model()?)?,
        Command::Symbols {
            action: SymbolsCommand::Eval { expr },
        } => commands::symbols_eval(&s.build_model()?, expr)?,
        Command::Cohomology { symbol } => {
            commands::cohomology(&s, &s.build_model()?, symbol.as_deref())?
        }
    };
    let text = match cli.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&value).expect("value serializes")
        ),
        Format::Text => commands::render_text(&value),
    };
    emit(cli, &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match panic::catch_unwind(AssertUnwindSafe(|| run(&cli))) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            eprintln!("error: internal invariant breach: {msg}");
            ExitCode::from(4)
        }
    }
}
