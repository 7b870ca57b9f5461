//! Random paths of subordinators: standard and compound Poisson, gamma and
//! one-sided stable grid paths, small-jump truncation for generic Lévy
//! measures, and killing at an independent exponential time.
//!
//! Samplers are pure functions of an explicit random stream.

mod path;
mod truncated;

pub use path::{PathRepr, SubordinatorPath};
pub(crate) use path::{cell_count, GRID_SLACK};
pub use truncated::TruncatedJumpLaw;

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::levy::{LevyMeasure, LevyTriple};
use crate::rng::{RngState, StreamRng};
use crate::variates::{discrete_index, ln_gamma_variate, positive_stable_variate};

/// Default number of grid cells per path.
pub const DEFAULT_GRID_CELLS: usize = 4096;
/// Default small-jump cutoff for generic Lévy measures.
pub const DEFAULT_TRUNCATION: f64 = 1e-4;

/// Fork label of the kill clock inside one replica.
const KILL_LANE: u64 = 0x6b11;

/// A distribution of positive jump sizes.
pub trait JumpLaw {
    fn sample(&self, rng: &mut StreamRng) -> f64;
}

impl<F: Fn(&mut StreamRng) -> f64> JumpLaw for F {
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        self(rng)
    }
}

/// Jumps drawn from finitely many atoms with the given weights.
#[derive(Debug, Clone)]
pub struct AtomicJumps {
    locations: Vec<f64>,
    cumulative: Vec<f64>,
}

impl AtomicJumps {
    pub fn from_measure(measure: &LevyMeasure) -> Result<Self> {
        match measure {
            LevyMeasure::FiniteAtomic { atoms } => {
                let mut acc = 0.0;
                Ok(Self {
                    locations: atoms.iter().map(|a| a.location).collect(),
                    cumulative: atoms
                        .iter()
                        .map(|a| {
                            acc += a.mass;
                            acc
                        })
                        .collect(),
                })
            }
            other => Err(Error::Unsupported(format!("{} measure is not atomic", other.family_name()))),
        }
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }
}

impl JumpLaw for AtomicJumps {
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        self.locations[discrete_index(&self.cumulative, rng)]
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return domain(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

/// Partial sums `T_n = Y_1 + … + Y_n` of exponential gaps with mean
/// `1/rate`, kept while `T_n <= horizon`.
pub fn sample_poisson_jump_times(rate: f64, horizon: f64, rng: &mut StreamRng) -> Result<Vec<f64>> {
    check_positive("rate", rate)?;
    check_positive("horizon", horizon)?;
    let mut times = Vec::new();
    let mut t = rng.exp1() / rate;
    while t <= horizon {
        if times.last().is_some_and(|&last| t <= last) {
            return Err(Error::Invariant("exponential gap below float resolution".into()));
        }
        times.push(t);
        t += rng.exp1() / rate;
    }
    Ok(times)
}

/// Compound Poisson path: jumps at the points of a rate-`rate` Poisson
/// process, i.i.d. sizes from `jumps`, zero drift.
pub fn sample_compound_poisson<J: JumpLaw + ?Sized>(
    rate: f64,
    jumps: &J,
    horizon: f64,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    compound_with_drift(rate, jumps, 0.0, horizon, rng)
}

fn compound_with_drift<J: JumpLaw + ?Sized>(
    rate: f64,
    jumps: &J,
    drift: f64,
    horizon: f64,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    let times = if rate > 0.0 { sample_poisson_jump_times(rate, horizon, rng)? } else { Vec::new() };
    let mut sizes = Vec::with_capacity(times.len());
    for _ in 0..times.len() {
        let s = jumps.sample(rng);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Invariant(format!("jump law produced nonpositive size {s}")));
        }
        sizes.push(s);
    }
    SubordinatorPath::jump_list(horizon, times, sizes, drift)
}

fn grid_path<F: FnMut(f64) -> f64>(
    grid_step: f64,
    horizon: f64,
    mut increment: F,
) -> Result<SubordinatorPath> {
    check_positive("grid step", grid_step)?;
    check_positive("horizon", horizon)?;
    let cells = cell_count(horizon, grid_step);
    let increments = (1..=cells)
        .map(|i| {
            let right = if i == cells { horizon } else { i as f64 * grid_step };
            let left = (i - 1) as f64 * grid_step;
            increment(right - left)
        })
        .collect();
    SubordinatorPath::grid(horizon, grid_step.min(horizon), increments)
}

/// Gamma subordinator on a grid: independent Gamma(a·h, b) increments over
/// cells of length `h`.
pub fn sample_gamma_path(
    a: f64,
    b: f64,
    grid_step: f64,
    horizon: f64,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    gamma_grid(a, b, 0.0, grid_step, horizon, rng)
}

fn gamma_grid(
    a: f64,
    b: f64,
    drift: f64,
    grid_step: f64,
    horizon: f64,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    check_positive("gamma a", a)?;
    check_positive("gamma b", b)?;
    grid_path(grid_step, horizon, |h| ln_gamma_variate(a * h, rng).exp() / b + drift * h)
}

/// Stable subordinator on a grid: increments `(c·h)^{1/index} · Z` with `Z`
/// exactly one-sided stable.
pub fn sample_stable_path(
    index: f64,
    c: f64,
    grid_step: f64,
    horizon: f64,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    stable_grid(index, c, 0.0, grid_step, horizon, rng)
}

fn stable_grid(
    index: f64,
    c: f64,
    drift: f64,
    grid_step: f64,
    horizon: f64,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    if !(index > 0.0 && index < 1.0) {
        return domain(format!("stable index must lie in (0,1), got {index}"));
    }
    check_positive("stable scale", c)?;
    grid_path(grid_step, horizon, |h| {
        (c * h).powf(1.0 / index) * positive_stable_variate(index, rng) + drift * h
    })
}

/// Compound Poisson approximation keeping the jumps larger than `cutoff`,
/// plus drift, plus `∫_0^ε x Λ(dx)` of extra drift when
/// `compensate_small_jumps` is set.
pub fn sample_generic_truncated(
    measure: &LevyMeasure,
    drift: f64,
    cutoff: f64,
    horizon: f64,
    compensate_small_jumps: bool,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    let law = TruncatedJumpLaw::new(measure, cutoff)?;
    truncated_with_law(&law, drift, horizon, compensate_small_jumps, rng)
}

fn truncated_with_law(
    law: &TruncatedJumpLaw,
    drift: f64,
    horizon: f64,
    compensate_small_jumps: bool,
    rng: &mut StreamRng,
) -> Result<SubordinatorPath> {
    let drift = if compensate_small_jumps { drift + law.small_jump_mean() } else { drift };
    compound_with_drift(law.rate(), law, drift, horizon, rng)
}

/// Sets an independent exponential kill time with mean `1/alpha`.
pub fn apply_kill(path: SubordinatorPath, alpha: f64, rng: &mut StreamRng) -> Result<SubordinatorPath> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("kill rate must be positive, got {alpha}"));
    }
    let kill_time = rng.exp1() / alpha;
    Ok(path.with_kill_time(kill_time))
}

/// How a [`SubordinatorSampler`] generates paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Exact in law at the grid points.
    Exact,
    Truncated { cutoff: f64, compensate_small_jumps: bool },
}

/// A sampler bound to one triple: drift, jumps and killing.
#[derive(Debug, Clone)]
pub struct SubordinatorSampler {
    triple: LevyTriple,
    method: Method,
    truncated: Option<Arc<TruncatedJumpLaw>>,
    atoms: Option<Arc<AtomicJumps>>,
}

impl SubordinatorSampler {
    /// Exact sampler; generic densities are not supported.
    pub fn exact(triple: LevyTriple) -> Result<Self> {
        let atoms = match triple.measure() {
            Some(LevyMeasure::Density(_)) => {
                return Err(Error::Unsupported(
                    "generic densities have no exact sampler; use truncation".into(),
                ))
            }
            Some(m @ LevyMeasure::FiniteAtomic { .. }) => Some(Arc::new(AtomicJumps::from_measure(m)?)),
            _ => None,
        };
        Ok(Self { triple, method: Method::Exact, truncated: None, atoms })
    }

    pub fn truncated(triple: LevyTriple, cutoff: f64, compensate_small_jumps: bool) -> Result<Self> {
        let truncated = match triple.measure() {
            Some(m) => Some(Arc::new(TruncatedJumpLaw::new(m, cutoff)?)),
            None => None,
        };
        Ok(Self {
            triple,
            method: Method::Truncated { cutoff, compensate_small_jumps },
            truncated,
            atoms: None,
        })
    }

    /// Exact when possible, otherwise truncation at [`DEFAULT_TRUNCATION`].
    pub fn for_triple(triple: LevyTriple) -> Result<Self> {
        match triple.measure() {
            Some(LevyMeasure::Density(_)) => Self::truncated(triple, DEFAULT_TRUNCATION, false),
            _ => Self::exact(triple),
        }
    }

    pub fn triple(&self) -> &LevyTriple {
        &self.triple
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// One path on `[0, horizon]`. Grid families use `grid_step`; jump-list
    /// families ignore it. The kill clock uses a stream forked from `rng`.
    pub fn sample(&self, horizon: f64, grid_step: f64, rng: RngState) -> Result<SubordinatorPath> {
        let mut g = rng.generator();
        let drift = self.triple.drift();
        let path = match (self.method, self.triple.measure()) {
            (Method::Truncated { compensate_small_jumps, .. }, Some(_)) => {
                let law = self.truncated.as_ref().expect("built with the sampler");
                truncated_with_law(law, drift, horizon, compensate_small_jumps, &mut g)?
            }
            (_, None) => SubordinatorPath::jump_list(horizon, vec![], vec![], drift)?,
            (Method::Exact, Some(LevyMeasure::Gamma { shape_rate, scale_rate })) => {
                gamma_grid(*shape_rate, *scale_rate, drift, grid_step, horizon, &mut g)?
            }
            (Method::Exact, Some(LevyMeasure::Stable { index, scale })) => {
                stable_grid(*index, *scale, drift, grid_step, horizon, &mut g)?
            }
            (Method::Exact, Some(LevyMeasure::FiniteAtomic { .. })) => {
                let jumps = self.atoms.as_ref().expect("built with the sampler");
                compound_with_drift(jumps.total_mass(), jumps.as_ref(), drift, horizon, &mut g)?
            }
            (Method::Exact, Some(LevyMeasure::Density(_))) => unreachable!("rejected in exact()"),
        };
        if self.triple.kill_rate() > 0.0 {
            let mut clock = rng.fork(KILL_LANE).generator();
            apply_kill(path, self.triple.kill_rate(), &mut clock)
        } else {
            Ok(path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_horizon_has_no_jumps() {
        let mut rng = RngState::new(1, 0).generator();
        assert!(sample_poisson_jump_times(1.0, 1e-12, &mut rng).unwrap().is_empty());
        let p = sample_compound_poisson(1.0, &|_: &mut StreamRng| 1.0, 1e-12, &mut rng).unwrap();
        assert_eq!(p.evaluate(1e-12).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = RngState::new(1, 0).generator();
        assert!(sample_poisson_jump_times(0.0, 1.0, &mut rng).is_err());
        assert!(sample_poisson_jump_times(1.0, -1.0, &mut rng).is_err());
        assert!(sample_gamma_path(1.0, 0.0, 0.1, 1.0, &mut rng).is_err());
        assert!(sample_stable_path(1.0, 1.0, 0.1, 1.0, &mut rng).is_err());
        let p = SubordinatorPath::jump_list(1.0, vec![], vec![], 0.0).unwrap();
        assert!(apply_kill(p, 0.0, &mut rng).is_err());
    }

    #[test]
    fn nonpositive_jump_is_an_invariant_violation() {
        let mut rng = RngState::new(1, 0).generator();
        let r = sample_compound_poisson(50.0, &|_: &mut StreamRng| -1.0, 1.0, &mut rng);
        assert!(matches!(r, Err(Error::Invariant(_))));
    }

    #[test]
    fn unit_jumps_give_standard_poisson() {
        let mut a = RngState::new(5, 2).generator();
        let mut b = RngState::new(5, 2).generator();
        let times = sample_poisson_jump_times(1.0, 10.0, &mut a).unwrap();
        let p = sample_compound_poisson(1.0, &|_: &mut StreamRng| 1.0, 10.0, &mut b).unwrap();
        match p.repr() {
            PathRepr::JumpList { times: t, sizes, .. } => {
                assert_eq!(t, &times);
                assert!(sizes.iter().all(|&s| s == 1.0));
            }
            _ => panic!("expected a jump list"),
        }
    }

    #[test]
    fn coarse_grid_gives_single_increment() {
        let mut rng = RngState::new(3, 0).generator();
        let p = sample_gamma_path(1.0, 1.0, 5.0, 1.0, &mut rng).unwrap();
        match p.repr() {
            PathRepr::GridIncrements { increments, .. } => assert_eq!(increments.len(), 1),
            _ => panic!(),
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let t = LevyTriple::strict(0.0, LevyMeasure::stable(0.5, 1.0).unwrap()).unwrap();
        let s = SubordinatorSampler::exact(t).unwrap();
        let a = s.sample(1.0, 1.0 / 64.0, RngState::new(9, 4)).unwrap();
        let b = s.sample(1.0, 1.0 / 64.0, RngState::new(9, 4)).unwrap();
        assert_eq!(a, b);
        let c = s.sample(1.0, 1.0 / 64.0, RngState::new(9, 5)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn truncation_beyond_support_is_pure_drift() {
        let m = LevyMeasure::atomic([(0.5, 4.0)]).unwrap();
        let mut rng = RngState::new(3, 0).generator();
        let p = sample_generic_truncated(&m, 0.7, 1.0, 2.0, false, &mut rng).unwrap();
        assert!((p.evaluate(2.0).unwrap() - 1.4).abs() < 1e-15);
        let p = sample_generic_truncated(&m, 0.7, 1.0, 2.0, true, &mut rng).unwrap();
        assert!((p.evaluate(2.0).unwrap() - (0.7 + 2.0) * 2.0).abs() < 1e-12);
    }

    #[test]
    fn generic_density_needs_truncation() {
        let m = LevyMeasure::density_fn(|x: f64| (-x).exp() / x, 1.0).unwrap();
        let t = LevyTriple::strict(0.0, m).unwrap();
        assert!(matches!(SubordinatorSampler::exact(t.clone()), Err(Error::Unsupported(_))));
        let s = SubordinatorSampler::for_triple(t).unwrap();
        assert!(matches!(s.method(), Method::Truncated { .. }));
    }

    #[test]
    fn kill_beyond_horizon_leaves_path() {
        let t = LevyTriple::new(1e-9, 1.0, None).unwrap();
        let s = SubordinatorSampler::exact(t).unwrap();
        let p = s.sample(1.0, 1.0, RngState::new(1, 1)).unwrap();
        assert!(!p.is_killed());
        assert_eq!(p.evaluate(1.0).unwrap(), 1.0);
    }
}
