//! Sample paths of several subordinators on a common grid, printed as CSV
//! columns `time,drift,gamma,stable,compound,killed`.
//!
//!     cargo run --example simulate_paths > paths.csv

use subordinators::{LevyMeasure, LevyTriple, Result, RngState, SubordinatorSampler};

fn main() -> Result<()> {
    let horizon = 1.0;
    let step = 1.0 / 64.0;
    let killed = LevyTriple::new(std::f64::consts::LN_2, 0.0, Some(LevyMeasure::gamma(1.0, 1.0)?))?;
    let triples = [
        LevyTriple::pure_drift(1.0)?,
        LevyTriple::strict(0.0, LevyMeasure::gamma(1.0, 1.0)?)?,
        LevyTriple::strict(0.0, LevyMeasure::stable(0.5, 1.0)?)?,
        LevyTriple::strict(0.5, LevyMeasure::atomic([(0.5, 2.0), (1.0, 1.0)])?)?,
        killed,
    ];
    let mut columns = Vec::new();
    for (i, t) in triples.into_iter().enumerate() {
        let sampler = SubordinatorSampler::for_triple(t)?;
        let path = sampler.sample(horizon, step, RngState::new(2024, i as u64))?;
        columns.push(path.values_on_grid(step)?);
    }
    println!("time,drift,gamma,stable,compound,killed");
    for k in 0..columns[0].len() {
        let row: Vec<String> = columns.iter().map(|c| format!("{}", c[k])).collect();
        println!("{},{}", k as f64 * step, row.join(","));
    }
    Ok(())
}
