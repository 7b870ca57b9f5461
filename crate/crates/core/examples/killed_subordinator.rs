//! A gamma subordinator killed at rate `ln 2`: half the paths are dead by
//! time 1, and the Laplace transform picks up the killing rate.
//!
//!     cargo run --release --example killed_subordinator

use subordinators::verify::{kill_probability_check, mc_laplace_check};
use subordinators::{LevyMeasure, LevyTriple, Result, RngState, SubordinatorSampler};

fn main() -> Result<()> {
    let triple = LevyTriple::new(std::f64::consts::LN_2, 0.0, Some(LevyMeasure::gamma(1.0, 1.0)?))?;
    let sampler = SubordinatorSampler::exact(triple.clone())?;

    let path = sampler.sample(4.0, 0.5, RngState::new(1, 3))?;
    println!("kill time {:?}; values on a 0.5 grid: {:?}", path.kill_time(), path.values_on_grid(0.5)?);

    for u in [0.0, 1.0, 2.0] {
        println!("Psi({u}) = {:.6}", triple.laplace_exponent(u)?);
    }
    let rng = RngState::new(8, 0);
    println!("{}", kill_probability_check(&sampler, 1.0, 100_000, rng)?.summary_line());
    println!("{}", mc_laplace_check(&triple, &sampler, 1.0, &[0.0, 0.5, 1.0, 2.0], 100_000, rng)?.summary_line());
    Ok(())
}
