//! Runs the bundled configs through the batch runner and prints the CSV.

use std::path::Path;

use wolffkit::cli::{execute, to_csv, DEFAULT_TOL};
use wolffkit::config::RunConfig;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for (file, command) in [("newtonian.json", "report"), ("criteria.json", "criteria")] {
        let text = std::fs::read_to_string(dir.join(file)).expect("bundled config");
        let cfg = RunConfig::parse(&text).unwrap_or_else(|e| panic!("{file}: {e}"));
        let rows = execute(&cfg, &dir, cfg.tol.unwrap_or(DEFAULT_TOL), None, command).expect("config builds");
        print!("{}", to_csv(&rows, command));
        println!();
    }
}
