//! Jump law of `Λ` restricted to `(ε, ∞)` and renormalized.

use crate::error::{domain, Error, Result};
use crate::levy::LevyMeasure;
use crate::quad::{integrate, Tolerance};
use crate::rng::StreamRng;
use crate::special::gamma;
use crate::variates::discrete_index;

use super::JumpLaw;

/// Cells per decade of the tabulated tail.
const CELLS_PER_DECADE: f64 = 64.0;
/// Tabulation stops once this fraction of the tail mass is covered.
const COVERAGE: f64 = 1.0 - 1e-13;
const X_LIMIT: f64 = 1e300;

#[derive(Debug, Clone)]
enum Table {
    Empty,
    Atoms { locations: Vec<f64>, cumulative: Vec<f64> },
    /// `Λ(x, ∞) = coef · x^{-index}` exactly.
    Power { eps: f64, index: f64 },
    Cells { edges: Vec<f64>, exponents: Vec<f64>, cumulative: Vec<f64>, tail_exponent: f64 },
}

/// Inverse-transform sampler for jumps larger than the cutoff, with its
/// total rate `Λ((ε, ∞))`.
#[derive(Debug, Clone)]
pub struct TruncatedJumpLaw {
    cutoff: f64,
    rate: f64,
    small_jump_mean: f64,
    table: Table,
}

impl TruncatedJumpLaw {
    pub fn new(measure: &LevyMeasure, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return domain(format!("truncation cutoff must be positive, got {cutoff}"));
        }
        let small_jump_mean = measure.small_jump_mean(cutoff)?;
        match measure {
            LevyMeasure::FiniteAtomic { atoms } => {
                let kept: Vec<_> = atoms.iter().filter(|a| a.location > cutoff).collect();
                if kept.is_empty() {
                    return Ok(Self { cutoff, rate: 0.0, small_jump_mean, table: Table::Empty });
                }
                let mut acc = 0.0;
                let cumulative = kept
                    .iter()
                    .map(|a| {
                        acc += a.mass;
                        acc
                    })
                    .collect();
                Ok(Self {
                    cutoff,
                    rate: acc,
                    small_jump_mean,
                    table: Table::Atoms { locations: kept.iter().map(|a| a.location).collect(), cumulative },
                })
            }
            LevyMeasure::Stable { index, scale } => Ok(Self {
                cutoff,
                rate: scale * cutoff.powf(-index) / gamma(1.0 - index),
                small_jump_mean,
                table: Table::Power { eps: cutoff, index: *index },
            }),
            _ => Self::tabulate(measure, cutoff, small_jump_mean),
        }
    }

    fn tabulate(measure: &LevyMeasure, cutoff: f64, small_jump_mean: f64) -> Result<Self> {
        let total = measure.tail_mass(cutoff)?;
        if !total.is_finite() {
            return Err(Error::Numerical {
                message: format!("tail mass above {cutoff} is not finite"),
                residual: total,
            });
        }
        if total <= 0.0 {
            return Ok(Self { cutoff, rate: 0.0, small_jump_mean, table: Table::Empty });
        }
        let density = |x: f64| measure.density(x).unwrap_or(0.0);
        let ratio = 10f64.powf(1.0 / CELLS_PER_DECADE);
        let tol = Tolerance::new(1e-300, 1e-12);
        let mut edges = vec![cutoff];
        let mut cumulative = Vec::new();
        let mut exponents = Vec::new();
        let mut acc = 0.0;
        let mut lo = cutoff;
        while acc < COVERAGE * total && lo < X_LIMIT {
            let hi = lo * ratio;
            let est = integrate(|y: f64| density(y.exp()) * y.exp(), lo.ln(), hi.ln(), tol)?;
            acc += est.value;
            cumulative.push(acc);
            let (d0, d1) = (density(lo), density(hi));
            exponents.push(if d0 > 0.0 && d1 > 0.0 { (d1 / d0).ln() / ratio.ln() } else { 0.0 });
            edges.push(hi);
            lo = hi;
        }
        let leftover = total - acc;
        let tail_exponent = *exponents.last().unwrap_or(&-2.0);
        if leftover > 0.0 && tail_exponent < -1.0 {
            acc += leftover;
            cumulative.push(acc);
        }
        Ok(Self {
            cutoff,
            rate: acc,
            small_jump_mean,
            table: Table::Cells { edges, exponents, cumulative, tail_exponent },
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// `Λ((ε, ∞))`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `∫_{(0, ε]} x Λ(dx)`.
    pub fn small_jump_mean(&self) -> f64 {
        self.small_jump_mean
    }
}

/// Draw from density `∝ x^k` on `[lo, hi]`.
fn power_in_cell(lo: f64, hi: f64, k: f64, u: f64) -> f64 {
    let rho = hi / lo;
    let p = k + 1.0;
    let x = if p.abs() < 1e-9 {
        lo * rho.powf(u)
    } else {
        lo * (1.0 + u * (rho.powf(p) - 1.0)).powf(1.0 / p)
    };
    x.clamp(lo, hi)
}

impl JumpLaw for TruncatedJumpLaw {
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        match &self.table {
            Table::Empty => f64::NAN,
            Table::Atoms { locations, cumulative } => locations[discrete_index(cumulative, rng)],
            Table::Power { eps, index } => eps * rng.uniform().powf(-1.0 / index),
            Table::Cells { edges, exponents, cumulative, tail_exponent } => {
                let i = discrete_index(cumulative, rng);
                let u = rng.uniform();
                if i < exponents.len() {
                    power_in_cell(edges[i], edges[i + 1], exponents[i], u)
                } else {
                    // Pareto continuation beyond the last edge
                    edges[edges.len() - 1] * u.powf(1.0 / (tail_exponent + 1.0))
                }
            }
        }
    }
}
