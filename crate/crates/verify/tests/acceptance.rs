//! One PASS/FAIL line per acceptance criterion, slow cases included.
//!
//! All comparisons inside the cases are exact (rational arithmetic, integer
//! Smith forms); the only tolerances are the wall-clock budgets below.

use std::process::ExitCode;

use jacobi_core::lmo::GeneratorTable;
use jacobi_core::modules::ModuleCache;
use jacobi_verify::{cases, Context};

/// Wall-clock budget per criterion, in seconds.
const BUDGET_S: [(u32, u64); 14] = [
    (1, 30),
    (2, 30),
    (3, 300),
    (4, 60),
    (5, 300),
    (6, 1800),
    (7, 10),
    (8, 600),
    (9, 1800),
    (10, 120),
    (11, 120),
    (12, 10),
    (13, 300),
    (14, 1800),
];

/// Budget for the fast cases, summed over cold runs.
const FAST_SUITE_S: u64 = 120;

fn main() -> ExitCode {
    let table = GeneratorTable::load().expect("generator table");
    let mut failed = Vec::new();
    let mut fast_ms = 0;
    for case in cases() {
        // a fresh cache per case, so every time below is a cold run
        let cache = ModuleCache::new(None);
        let r = case.run(&Context { cache: &cache, table: &table });
        let ms = r.elapsed_ms.unwrap_or(0);
        if !case.slow {
            fast_ms += ms;
        }
        let budget = BUDGET_S.iter().find(|(c, _)| *c == r.criterion).expect("budget").1;
        let pass = r.pass && ms <= budget * 1000;
        let why: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        println!(
            "criterion {:>2} {} {:<18} {:>8.1} s (budget {} s){}",
            r.criterion,
            if pass { "PASS" } else { "FAIL" },
            r.id,
            ms as f64 / 1000.0,
            budget,
            if why.is_empty() { String::new() } else { format!("  failing: {}", why.join("; ")) }
        );
        if !pass {
            failed.push(r.criterion);
        }
    }
    let fast_in_time = fast_ms <= FAST_SUITE_S * 1000;
    println!(
        "fast cases, sum of cold runs: {:.1} s (budget {FAST_SUITE_S} s) {}",
        fast_ms as f64 / 1000.0,
        if fast_in_time { "within budget" } else { "OVER BUDGET" }
    );
    if failed.is_empty() && fast_in_time {
        println!("all {} criteria pass", cases().len());
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
