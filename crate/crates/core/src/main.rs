use std::process::ExitCode;

use clap::Parser;
use dedekind_core::cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let outcome = RunConfig::from_cli(Cli::parse()).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(out) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out.report).expect("report serializes")
            );
            if !out.ok {
                eprintln!("error: one or more checks failed");
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
