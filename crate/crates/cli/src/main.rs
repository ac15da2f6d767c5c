use std::process::ExitCode;

use clap::Parser;
use tetra_bridge_cli::{run, Cli, TOL_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_tol = std::env::var(TOL_ENV).ok();
    match run(&cli, env_tol.as_deref()) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
                );
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
