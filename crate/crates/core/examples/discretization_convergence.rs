//! `K_n(t)`, the number of level-`n` intervals containing a jump, climbs to
//! the jump count `K(t)`; once `1/n` is below the smallest gap `zeta` the
//! discretization sees every jump exactly.
//!
//!     cargo run --example discretization_convergence

use subordinators::subordination::{discretize, extract_jumps, write_kn_series};
use subordinators::verify::{kn_pgf_limit_check, simulate_subordinated};
use subordinators::{LevyMeasure, LevyTriple, Result, RngState, SubordinatorSampler};

fn main() -> Result<()> {
    let triple = LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 2.0), (3.0, 1.0)])?)?;
    let sampler = SubordinatorSampler::exact(triple.clone())?;
    let paths = simulate_subordinated(&sampler, 1.0, 1.0 / 4096.0, 3, RngState::new(99, 0))?;
    let levels: Vec<u64> = (0..=12).map(|k| 1u64 << k).collect();

    for (i, path) in paths.iter().enumerate() {
        let reports = levels.iter().map(|&n| discretize(path, n)).collect::<Result<Vec<_>>>()?;
        let sizes: Vec<u64> = extract_jumps(path).iter().map(|j| j.size).collect();
        println!("path {i}: K(1) = {}, sizes {:?}, zeta = {:.5}", sizes.len(), sizes, path.min_gap());
        write_kn_series(&reports, std::io::stdout())?;
        if let Some(r) = reports.iter().find(|r| 1.0 / (r.n as f64) < path.min_gap()) {
            println!("exact from n = {}: interval jumps {:?}", r.n, r.interval_jumps);
            assert_eq!(r.interval_jumps, sizes);
        }
        println!("{}", reports.last().expect("levels are nonempty").to_json()?);
    }

    let z: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let report = kn_pgf_limit_check(triple.leading_rate()?, 1.0, &[16, 64, 256, 1024, 4096], &z)?;
    println!("\n{}", report.summary_line());
    Ok(())
}
