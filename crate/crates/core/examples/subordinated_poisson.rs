//! One path of the Poisson process run on the clock of a gamma
//! subordinator, its jump records, and the identity "jump sizes add up to
//! the final count".
//!
//!     cargo run --example subordinated_poisson

use subordinators::subordination::{extract_jumps, subordinate_poisson_on_grid, POISSON_LANE};
use subordinators::{LevyMeasure, LevyTriple, Result, RngState, SubordinatorSampler};

fn main() -> Result<()> {
    let triple = LevyTriple::strict(0.0, LevyMeasure::gamma(3.0, 0.2)?)?;
    let sampler = SubordinatorSampler::exact(triple.clone())?;
    let horizon = 2.0;
    let step = horizon / 4096.0;
    let rng = RngState::new(7, 0);
    let s = sampler.sample(horizon, step, rng)?;
    let pi = subordinate_poisson_on_grid(&s, step, rng.fork(POISSON_LANE))?;

    println!("S({horizon}) = {:.4}, Pi(S({horizon})) = {}", s.evaluate(horizon)?, pi.final_count());
    println!("jump rate psi = Psi(1) = {:.6}", triple.leading_rate()?);
    let jumps = extract_jumps(&pi);
    println!("{} jumps:", jumps.len());
    for j in &jumps {
        println!("  tau = {:.6}  size = {}", j.tau, j.size);
    }
    let total: u64 = jumps.iter().map(|j| j.size).sum();
    println!("sum of sizes = {total}, final count = {}", pi.final_count());
    assert_eq!(total, pi.final_count());
    println!("smallest gap zeta = {:.6}", pi.min_gap());
    Ok(())
}
