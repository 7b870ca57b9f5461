//! Laplace exponents, jump atoms and the jump generating function for the
//! built-in families, with a generic density cross-checked against the
//! gamma closed form.
//!
//!     cargo run --example laplace_exponents

use subordinators::levy::{DensityForm, GenericDensity};
use subordinators::{LevyMeasure, LevyTriple, Result};

fn main() -> Result<()> {
    let families = [
        ("drift 1", LevyTriple::pure_drift(1.0)?),
        ("gamma(1,1)", LevyTriple::strict(0.0, LevyMeasure::gamma(1.0, 1.0)?)?),
        ("stable(1/2)", LevyTriple::strict(0.0, LevyMeasure::stable(0.5, 1.0)?)?),
        ("atom x=1 w=2", LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 2.0)])?)?),
        (
            "gamma as density",
            LevyTriple::strict(
                0.0,
                LevyMeasure::Density(GenericDensity::from_form(
                    DensityForm { coef: 1.0, power: -1.0, rate: 1.0 },
                    1.0,
                )?),
            )?,
        ),
    ];

    println!("{:<18} {:>12} {:>12} {:>12} {:>10}", "family", "Psi(0.5)", "Psi(1)", "Psi(4)", "activity");
    for (name, t) in &families {
        println!(
            "{:<18} {:>12.8} {:>12.8} {:>12.8} {:>10?}",
            name,
            t.laplace_exponent(0.5)?,
            t.laplace_exponent(1.0)?,
            t.laplace_exponent(4.0)?,
            t.activity_class()
        );
    }

    println!("\njump law m_j / psi and f(z) = (Psi(1) - Psi(1-z)) / Psi(1)");
    for (name, t) in &families {
        let psi = t.leading_rate()?;
        let head: Vec<String> =
            (1..=5).map(|j| t.jump_atom_mass(j).map(|m| format!("{:.5}", m / psi))).collect::<Result<_>>()?;
        println!(
            "{:<18} p1..p5 = [{}]  f(0.5) = {:.8}  series(0.5) = {:.8}",
            name,
            head.join(", "),
            t.jump_pgf(0.5)?,
            t.jump_pgf_series(0.5, 200)?
        );
    }

    let gamma = &families[1].1;
    println!("\ntruncated gamma exponent at u = 1:");
    for eps in [1e-2, 1e-4, 1e-6] {
        let full = gamma.laplace_exponent(1.0)?;
        let cut = gamma.truncated_laplace_exponent(1.0, eps)?;
        println!("  eps = {eps:e}: Psi_eps(1) = {cut:.12}, Psi(1) - Psi_eps(1) = {:.3e}", full - cut);
    }
    Ok(())
}
