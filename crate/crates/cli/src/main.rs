use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use lndtri::{analyze, parse_problem, render_json, render_text, AnalyzeOptions, Format};

#[derive(Parser)]
#[command(name = "lndtri", version, about = "Triangulability of locally nilpotent derivations of Q[x,y,z]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze the derivation described by a JSON problem file.
    Analyze {
        file: PathBuf,
        /// Iterations per variable for the nilpotency check.
        #[arg(long)]
        bound: Option<usize>,
        /// Iterates above four times this total degree abort the check.
        #[arg(long)]
        degree_cap: Option<u32>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Re-verify positive verdicts before printing.
        #[arg(long, action = ArgAction::Set, default_value_t = true, num_args = 0..=1, default_missing_value = "true")]
        verify: bool,
    },
}

fn main() -> ExitCode {
    let Command::Analyze {
        file,
        bound,
        degree_cap,
        format,
        verify,
    } = Cli::parse().command;
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", file.display());
            return ExitCode::from(1);
        }
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut opts = AnalyzeOptions::from_problem(&problem);
    opts.verify = verify;
    if let Some(b) = bound {
        opts.bounds.iterations = b;
    }
    if let Some(d) = degree_cap {
        opts.bounds.degree_cap = d;
    }
    let format = format.unwrap_or(problem.file.options.format);
    match analyze(&problem, opts) {
        Ok(report) => {
            let text = match format {
                Format::Json => render_json(&report) + "\n",
                Format::Text => render_text(&report),
            };
            // a closed pipe downstream is not our failure
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
