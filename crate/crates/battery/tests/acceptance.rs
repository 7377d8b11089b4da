//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use chabauty_lab_battery::{run, DEFAULT_SEED};

fn main() -> ExitCode {
    let seed = std::env::var("CHABAUTY_LAB_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    println!("acceptance battery, seed {seed}");
    let mut failed = Vec::new();
    for id in 1..=10 {
        let r = run(id, seed);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
