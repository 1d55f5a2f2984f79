//! Runs the full verification suite and prints one line per check.

use jost_besov::suite::{run_all, DEFAULT_SEED};

fn main() {
    let checks = run_all(DEFAULT_SEED, |c| println!("{}", c.line()));
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} passed, {} failed", checks.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
