//! Runs the full verification suite for a scenario file through the command
//! line front end, writing reports under `target/verify_suite`.
//!
//!     cargo run --release --example verify_suite -- configs/gamma.toml

fn main() {
    let config = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/gamma.toml").to_string());
    let out = concat!(env!("CARGO_MANIFEST_DIR"), "/../../target/verify_suite");
    let code = subordinators::cli::run(["subord", "verify-all", "--config", &config, "--out", out, "--format", "csv"]);
    println!("exit code {code}");
    std::process::exit(code);
}
