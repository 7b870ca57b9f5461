//! Pooled chi-square goodness of fit for integer-valued observations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::chi_square_pvalue;

/// Minimum expected count per pooled bin.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledBin {
    /// Smallest category in the bin.
    pub first: u64,
    /// Largest category, `None` for the open tail.
    pub last: Option<u64>,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
    pub bins: Vec<PooledBin>,
}

/// Reference law on `first, first+1, …` given by `probs`, with whatever
/// mass is left over assigned to the open tail.
pub struct DiscreteReference {
    pub first: u64,
    pub probs: Vec<f64>,
}

impl DiscreteReference {
    fn tail(&self) -> f64 {
        (1.0 - self.probs.iter().sum::<f64>()).max(0.0)
    }

    /// The category holding all the mass, if the law is a point mass.
    pub fn point_mass(&self) -> Option<u64> {
        let (i, &p) = self.probs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        (1.0 - p < 1e-15).then_some(self.first + i as u64)
    }
}

/// Chi-square test of `observations` against `reference`, pooling
/// neighbouring categories left to right until each bin expects at least
/// [`MIN_EXPECTED`] counts; a short remainder joins the last bin.
pub fn chi_square_gof(observations: &[u64], reference: &DiscreteReference) -> Result<GoodnessOfFit> {
    let n = observations.len();
    let top = reference.first + reference.probs.len() as u64;
    let mut observed = vec![0u64; reference.probs.len() + 1];
    for &x in observations {
        let slot = if x < reference.first {
            return Err(Error::Domain(format!(
                "observation {x} below the support start {}",
                reference.first
            )));
        } else if x >= top {
            reference.probs.len()
        } else {
            (x - reference.first) as usize
        };
        observed[slot] += 1;
    }
    let mut expected: Vec<f64> = reference.probs.iter().map(|p| p * n as f64).collect();
    expected.push(reference.tail() * n as f64);

    let mut bins: Vec<PooledBin> = Vec::new();
    let mut open: Option<PooledBin> = None;
    for (i, (&o, &e)) in observed.iter().zip(&expected).enumerate() {
        let cat = reference.first + i as u64;
        let is_tail = i == reference.probs.len();
        let bin = open.get_or_insert(PooledBin { first: cat, last: Some(cat), observed: 0, expected: 0.0 });
        bin.observed += o;
        bin.expected += e;
        bin.last = if is_tail { None } else { Some(cat) };
        if bin.expected >= MIN_EXPECTED && !is_tail {
            bins.push(open.take().expect("just inserted"));
        }
    }
    if let Some(rest) = open {
        match bins.last_mut() {
            Some(prev) if rest.expected < MIN_EXPECTED => {
                prev.observed += rest.observed;
                prev.expected += rest.expected;
                prev.last = rest.last;
            }
            _ => bins.push(rest),
        }
    } else if let Some(prev) = bins.last_mut() {
        prev.last = None;
    }
    if bins.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{n} observations pool into {} bin(s); need at least 2",
            bins.len()
        )));
    }
    let statistic: f64 = bins
        .iter()
        .map(|b| {
            let d = b.observed as f64 - b.expected;
            d * d / b.expected
        })
        .sum();
    let dof = (bins.len() - 1) as u32;
    let p_value = chi_square_pvalue(statistic, dof)?;
    Ok(GoodnessOfFit { statistic, dof, p_value, bins })
}
