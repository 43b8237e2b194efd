use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use fraccos_cli::{
    parse_config, run_solve, run_verify, Suite, SuiteParams, EXIT_ERROR, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "fraccos",
    version,
    about = "Fractional cosine families: solve and verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a JSON config and write the trajectory as CSV.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Add nodal values u(x_j) at the collocation points.
        #[arg(long)]
        nodal: bool,
    },
    /// Run a verification suite: specfun, fracalc, families, chenli or all.
    Verify {
        #[arg(long)]
        suite: String,
        /// Takes alpha, T, n_steps and n_modes from this config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = !matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return code(if usage { EXIT_USAGE } else { 0 });
        }
    };
    match cli.command {
        Command::Solve { config, out, nodal } => match parse_config(&config) {
            Ok(cfg) => code(run_solve(&cfg, &out, nodal)),
            Err(e) => {
                eprintln!("error: {e}");
                code(EXIT_ERROR)
            }
        },
        Command::Verify { suite, config, out } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(msg) => {
                    eprintln!("usage error: {msg}");
                    return code(EXIT_USAGE);
                }
            };
            let params = match config.map(|p| parse_config(&p)).transpose() {
                Ok(Some(cfg)) => SuiteParams::from(&cfg),
                Ok(None) => SuiteParams::default(),
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(EXIT_ERROR);
                }
            };
            code(run_verify(suite, &params, &out))
        }
    }
}
