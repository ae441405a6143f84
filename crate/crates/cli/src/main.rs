mod args;
mod commands;
mod io;
mod record;
mod sweep;

use std::time::Instant;

use clap::{error::ErrorKind, CommandFactory, FromArgMatches};

use args::Cli;
use record::{prng_id, RunRecord};

fn version_line() -> &'static str {
    static LINE: std::sync::OnceLock<String> = std::sync::OnceLock::new();
    LINE.get_or_init(|| format!("{} (prng {})", hypermatch::VERSION, prng_id()))
}

/// Parses `argv` (program name first), or the exit code for a usage problem.
pub fn parse(argv: &[String]) -> Result<Cli, clap::Error> {
    let matches = Cli::command().version(version_line()).try_get_matches_from(argv)?;
    Cli::from_arg_matches(&matches)
}

/// Runs a parsed command and wraps the result in its record.
pub fn execute(cli: Cli, argv: &[String]) -> RunRecord {
    let start = Instant::now();
    let name = cli.command.name();
    let (params, outcome) = commands::dispatch(cli.command);
    let mut record = RunRecord {
        command: name.to_string(),
        argv: argv[1..].to_vec(),
        params,
        seeds: Default::default(),
        prng: prng_id(),
        version: hypermatch::VERSION.to_string(),
        elapsed_ms: 0.0,
        timings: Default::default(),
        result: serde_json::Value::Null,
        outputs: Vec::new(),
        exit_code: 0,
        error: None,
    };
    match outcome {
        Ok(out) => {
            record.result = out.result;
            record.seeds = out.seeds;
            record.outputs = out.outputs;
            record.timings = out.timings;
        }
        Err(e) => {
            record.exit_code = e.exit_code();
            record.error = Some(e.to_string());
        }
    }
    record.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    record
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let record = execute(cli, &argv);
    if let Some(err) = &record.error {
        eprintln!("error: {err}");
    }
    print!("{}", io::to_json(&record));
    std::process::exit(record.exit_code);
}
