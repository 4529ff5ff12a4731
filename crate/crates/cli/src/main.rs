mod args;
mod commands;

use std::process::ExitCode;

use cider_eval::par::with_threads;
use cider_eval::Execution;
use clap::Parser;

use args::{Cli, Command};
use commands::Ctx;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Failure classes, each with its own exit status.
pub enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<cider_eval::Error> for Failure {
    fn from(e: cider_eval::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };

    let threads =
        cli.parallelism.map_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()), |n| n as usize);
    let ctx = Ctx { execution: if threads > 1 { Execution::Parallel } else { Execution::Sequential } };

    let result = std::panic::catch_unwind(|| {
        with_threads(threads, || match &cli.command {
            Command::Score(a) => commands::score(a, &ctx),
            Command::TripletEval(a) => commands::triplet_eval(a, &ctx),
            Command::SweepKr(a) => commands::sweep(a, &ctx),
            Command::Stats(a) => commands::stats(a),
            Command::BuildDf(a) => commands::build(a),
        })
    });

    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(e))) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(EXIT_USAGE)
        }
        Ok(Err(Failure::Input(e))) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(EXIT_INPUT)
        }
        Ok(Err(Failure::Internal(e))) => {
            eprintln!("internal error: {}", describe(&e));
            ExitCode::from(EXIT_INTERNAL)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}

/// Joins the error chain, skipping causes already spelled out by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    let mut last = out.clone();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}
