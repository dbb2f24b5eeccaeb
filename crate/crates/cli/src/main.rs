mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = cli.out.as_path();
    let result = match &cli.command {
        Command::GenData(a) => commands::gen_data(out, a),
        Command::PackData(a) => commands::pack_data(out, a),
        Command::Prove(a) => commands::prove(out, a),
        Command::Verify(a) => commands::verify(out, a),
        Command::Aggregate(a) => commands::aggregate(out, a),
        Command::Compare(a) => commands::compare(out, a),
        Command::Bench(a) => commands::bench(out, a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
