//! Command-line surface: every pipeline stage with JSON in, JSON out.
//!
//! Exit codes: 0 all checks pass, 1 domain-level failure (diagnostics in the
//! JSON output), 2 malformed input or I/O trouble.

use anyhow::Context;
use clap::Parser;
use serde_json::{json, Value};
use std::io::Read;
use std::path::PathBuf;
use wplconn::commands::{eval, CommandError, EvalOptions, COMMANDS};

#[derive(Parser)]
#[command(
    name = "wplconn",
    version,
    about = "Exact sheaf, connection and quiver computations on weighted projective lines",
    after_help = command_list()
)]
struct Cli {
    /// Command name; see the list below.
    command: String,
    /// Input file (defaults to standard input; "-" also means stdin).
    #[arg(long, value_name = "PATH")]
    r#in: Option<PathBuf>,
    /// Output file (defaults to standard output).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for the seeded commands.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Instance count for the seeded commands.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Worker threads for independent instances.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Retry budget for the instance generator.
    #[arg(long, default_value_t = 40)]
    retries: usize,
    /// Also print human-readable summaries to standard error.
    #[arg(long)]
    verbose: bool,
}

fn command_list() -> String {
    format!("Commands:\n  {}", COMMANDS.join("\n  "))
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    if !COMMANDS.contains(&cli.command.as_str()) {
        eprintln!("wplconn: unknown command {:?}\n{}", cli.command, command_list());
        return 2;
    }
    let input = match read_input(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("wplconn: {e:#}");
            return 2;
        }
    };
    let opts = EvalOptions { seed: cli.seed, count: cli.count, jobs: cli.jobs, retries: cli.retries };
    match eval(&cli.command, input.as_ref(), &opts) {
        Ok(outcome) => {
            if cli.command == "selftest" || cli.verbose {
                print_summaries(&outcome.value);
            }
            if write_output(&cli, &outcome.value).is_err() {
                return 2;
            }
            if outcome.ok {
                0
            } else {
                1
            }
        }
        Err(CommandError::Domain(msg, value)) => {
            let v = value.unwrap_or_else(|| json!({ "ok": false, "error": msg }));
            let _ = write_output(&cli, &v);
            if cli.verbose {
                eprintln!("wplconn: {msg}");
            }
            1
        }
        Err(CommandError::Input(msg)) => {
            eprintln!("wplconn: malformed input: {msg}");
            2
        }
        Err(CommandError::UnknownCommand(name)) => {
            eprintln!("wplconn: unknown command {name:?}");
            2
        }
    }
}

fn print_summaries(v: &Value) {
    if let Some(suites) = v.get("suites").and_then(Value::as_array) {
        for s in suites {
            if let Some(line) = s.get("summary").and_then(Value::as_str) {
                eprintln!("{line}");
            }
        }
    }
}

fn read_input(cli: &Cli) -> anyhow::Result<Option<Value>> {
    if cli.command == "selftest" {
        return Ok(None);
    }
    let text = match &cli.r#in {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .with_context(|| format!("reading {}", p.display()))?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
            buf
        }
    };
    let v: Value = serde_json::from_str(&text).context("parsing input JSON")?;
    Ok(Some(v))
}

fn write_output(cli: &Cli, v: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    match &cli.out {
        Some(p) => {
            std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))
                .map_err(|e| {
                    eprintln!("wplconn: {e:#}");
                    e
                })
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
