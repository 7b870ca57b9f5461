//! The jumps of `S` seen by the subordinated Poisson process: jumps of a
//! compound Poisson `S` kept when they exceed an independent unit
//! exponential follow `(1 - e^{-x}) Lambda(dx) / Psi(1)`.
//!
//!     cargo run --example s_jump_acceptance

use subordinators::levy::SJumpContinuous;
use subordinators::verify::s_jump_conditional_check;
use subordinators::{LevyMeasure, LevyTriple, Result, RngState};

fn main() -> Result<()> {
    let triple = LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 1.0), (2.0, 1.0)])?)?;
    let law = triple.s_jump_law()?;
    if let SJumpContinuous::Atoms(atoms) = &law.continuous {
        for a in atoms {
            println!("P[jump of S = {}] = {:.6}", a.location, a.mass);
        }
    }
    let report = s_jump_conditional_check(&triple, 50_000, RngState::new(3, 0))?;
    println!("{}", report.to_json()?);
    Ok(())
}
