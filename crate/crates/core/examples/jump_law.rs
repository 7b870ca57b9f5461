//! Empirical jump-size histogram of the subordinated Poisson process against
//! the atoms `m_j / psi`, followed by the chi-square and generating
//! function checks.
//!
//!     cargo run --release --example jump_law

use std::collections::BTreeMap;

use subordinators::verify::{collect_jump_sizes, jump_law_test, jump_pgf_identity_check, simulate_subordinated};
use subordinators::{LevyMeasure, LevyTriple, Result, RngState, SubordinatorSampler};

fn main() -> Result<()> {
    let triple = LevyTriple::strict(0.0, LevyMeasure::gamma(1.0, 0.25)?)?;
    let sampler = SubordinatorSampler::exact(triple.clone())?;
    let paths = simulate_subordinated(&sampler, 4.0, 4.0 / 4096.0, 2000, RngState::new(5, 0))?;
    let jumps = collect_jump_sizes(&paths);
    let psi = triple.leading_rate()?;

    let mut histogram = BTreeMap::<u64, u64>::new();
    for &j in &jumps {
        *histogram.entry(j).or_default() += 1;
    }
    println!("{} jumps, psi = {psi:.6}", jumps.len());
    println!("{:>4} {:>10} {:>10}", "j", "observed", "expected");
    for j in 1..=12u64 {
        let expected = jumps.len() as f64 * triple.jump_atom_mass(j)? / psi;
        println!("{j:>4} {:>10} {expected:>10.1}", histogram.get(&j).copied().unwrap_or(0));
    }
    println!("tail mass beyond 12: {:.3e}", triple.jump_atom_tail(12)? / psi);

    let z: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    println!("{}", jump_law_test(&jumps, &triple)?.summary_line());
    println!("{}", jump_pgf_identity_check(&jumps, &triple, &z)?.summary_line());
    Ok(())
}
