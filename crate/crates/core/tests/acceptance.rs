// SPDX-License-Identifier: Apache-2.0

//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use actlat::acceptance::{Suite, DEFAULT_SEED};

fn main() -> ExitCode {
    let seed = std::env::var("ACTLAT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let suite = Suite::new(seed);
    println!("acceptance seed {seed}");
    let mut failed = Vec::new();
    for id in 1..=10 {
        let r = suite.run(id);
        println!("{r}");
        if !r.passed {
            failed.push(r.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
