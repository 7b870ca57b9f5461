//! Lévy triples `(α, β, Λ)` and the analytic quantities derived from them:
//! the Laplace exponent `Ψ(u) = α + βu + ∫(1 - e^{-ux}) Λ(dx)`, the rate
//! `ψ = Ψ(1)` of the jump-count process of `Π(S(·))`, the jump-size atoms
//! `m_j`, the jump generating function `f(z)`, and the law of the jumps of
//! `S` at the jump times of `Π(S(·))`.
//!
//! Everything here is immutable after construction and safe to share
//! between threads.

mod document;
mod measure;

pub use document::TripleDocument;
pub use measure::{Atom, DensityFn, DensityForm, GenericDensity, LevyMeasure};

use crate::error::{domain, Result};
use crate::quad::Tolerance;
use crate::special::regularized_gamma_p;

/// Below this value of `Ψ(1)` a strict triple counts as the zero process.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Tolerance used for every quadrature over a generic Lévy density.
pub const QUADRATURE_TOL: Tolerance = Tolerance::new(1e-10, 1e-8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Finite,
    Infinite,
}

/// Killing rate, drift and Lévy measure of a (possibly killed) subordinator.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriple {
    kill_rate: f64,
    drift: f64,
    measure: Option<LevyMeasure>,
}

impl LevyTriple {
    pub fn new(kill_rate: f64, drift: f64, measure: Option<LevyMeasure>) -> Result<Self> {
        if !(kill_rate >= 0.0 && kill_rate.is_finite()) {
            return domain(format!("kill rate must be finite and >= 0, got {kill_rate}"));
        }
        if !(drift >= 0.0 && drift.is_finite()) {
            return domain(format!("drift must be finite and >= 0, got {drift}"));
        }
        if kill_rate == 0.0 && drift == 0.0 && measure.is_none() {
            return domain("the zero process (no killing, drift or jumps) is degenerate");
        }
        Ok(Self { kill_rate, drift, measure })
    }

    pub fn pure_drift(drift: f64) -> Result<Self> {
        Self::new(0.0, drift, None)
    }

    pub fn strict(drift: f64, measure: LevyMeasure) -> Result<Self> {
        Self::new(0.0, drift, Some(measure))
    }

    pub fn kill_rate(&self) -> f64 {
        self.kill_rate
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn measure(&self) -> Option<&LevyMeasure> {
        self.measure.as_ref()
    }

    /// Same drift and measure, different killing rate.
    pub fn with_kill_rate(&self, kill_rate: f64) -> Result<Self> {
        Self::new(kill_rate, self.drift, self.measure.clone())
    }

    pub fn is_strict(&self) -> bool {
        self.kill_rate == 0.0
    }

    pub fn family_name(&self) -> &'static str {
        self.measure.as_ref().map_or("drift", LevyMeasure::family_name)
    }

    /// `Ψ(u) = α + βu + ∫(1 - e^{-ux}) Λ(dx)` for `u >= 0`.
    pub fn laplace_exponent(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) || !u.is_finite() {
            return domain(format!("Laplace exponent needs finite u >= 0, got {u}"));
        }
        let jumps = match &self.measure {
            Some(m) => m.laplace_integral(u, QUADRATURE_TOL)?,
            None => 0.0,
        };
        Ok(self.kill_rate + self.drift * u + jumps)
    }

    fn require_strict(&self, what: &str) -> Result<()> {
        if !self.is_strict() {
            return domain(format!("{what} is defined for strict triples (kill rate 0)"));
        }
        Ok(())
    }

    /// `ψ = Ψ(1)`, the rate of the Poisson process counting jumps of `Π(S(·))`.
    pub fn leading_rate(&self) -> Result<f64> {
        self.require_strict("leading rate")?;
        let psi = self.laplace_exponent(1.0)?;
        if psi < DEGENERACY_THRESHOLD {
            return domain(format!("degenerate triple: Ψ(1) = {psi:e}"));
        }
        Ok(psi)
    }

    /// Atom `m_j` of the Lévy measure of `Π(S(·))` at `j >= 1`.
    pub fn jump_atom_mass(&self, j: u64) -> Result<f64> {
        if j < 1 {
            return domain("jump atoms are indexed from 1");
        }
        self.require_strict("jump atom mass")?;
        let jumps = match &self.measure {
            Some(m) => m.poisson_moment(j, QUADRATURE_TOL)?,
            None => 0.0,
        };
        Ok(if j == 1 { self.drift + jumps } else { jumps })
    }

    /// Upper bound on `Σ_{j > j_max} m_j`.
    ///
    /// Geometric bound for the gamma family, exact Poisson tails for atoms,
    /// and `∫ P[Poisson(x) > j_max] Λ(dx)` by quadrature otherwise.
    pub fn jump_atom_tail(&self, j_max: u64) -> Result<f64> {
        self.require_strict("jump atom tail")?;
        let order = j_max as f64 + 1.0;
        match &self.measure {
            None => Ok(0.0),
            Some(LevyMeasure::Gamma { shape_rate, scale_rate }) => {
                let r = 1.0 + scale_rate;
                Ok(shape_rate / order * (-order * r.ln()).exp() * r / (r - 1.0))
            }
            Some(m) => {
                let tol = Tolerance::new(1e-16, 1e-8);
                let tail = m.integrate(|x| regularized_gamma_p(order, x).unwrap_or(0.0), tol)?;
                Ok(tail.value + tail.error)
            }
        }
    }

    fn check_unit(z: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&z) {
            return domain(format!("generating function argument must lie in [0,1], got {z}"));
        }
        Ok(())
    }

    /// `f(z) = (Ψ(1) - Ψ(1 - z)) / Ψ(1)`, the generating function of a jump
    /// of `Π(S(·))`.
    pub fn jump_pgf(&self, z: f64) -> Result<f64> {
        Self::check_unit(z)?;
        let psi = self.leading_rate()?;
        if z == 0.0 {
            return Ok(0.0);
        }
        if z == 1.0 {
            return Ok(1.0);
        }
        Ok(((psi - self.laplace_exponent(1.0 - z)?) / psi).clamp(0.0, 1.0))
    }

    /// `(1/ψ) Σ_{j=1}^{j_max} z^j m_j`, the truncated atom series for `f(z)`.
    pub fn jump_pgf_series(&self, z: f64, j_max: u64) -> Result<f64> {
        Self::check_unit(z)?;
        if j_max < 1 {
            return domain("series needs at least one term");
        }
        let psi = self.leading_rate()?;
        if z == 0.0 {
            return Ok(0.0);
        }
        let mut sum = 0.0;
        let mut zj = 1.0;
        for j in 1..=j_max {
            zj *= z;
            if zj == 0.0 {
                break;
            }
            sum += zj * self.jump_atom_mass(j)?;
        }
        Ok(sum / psi)
    }

    /// Law of `S(τ_k) - S(τ_k-)` at the jump times of `Π(S(·))`:
    /// `((1 - e^{-x}) Λ(dx) + β δ_0) / Ψ(1)`.
    pub fn s_jump_law(&self) -> Result<SJumpLaw> {
        let psi = self.leading_rate()?;
        let continuous = match &self.measure {
            None => SJumpContinuous::Empty,
            Some(LevyMeasure::FiniteAtomic { atoms }) => SJumpContinuous::Atoms(
                atoms
                    .iter()
                    .map(|a| Atom {
                        location: a.location,
                        mass: -(-a.location).exp_m1() * a.mass / psi,
                    })
                    .collect(),
            ),
            Some(m) => SJumpContinuous::Density { measure: m.clone(), psi },
        };
        Ok(SJumpLaw { atom_at_zero: self.drift / psi, continuous })
    }

    pub fn activity_class(&self) -> Activity {
        match &self.measure {
            None | Some(LevyMeasure::FiniteAtomic { .. }) => Activity::Finite,
            Some(LevyMeasure::Gamma { .. } | LevyMeasure::Stable { .. }) => Activity::Infinite,
            Some(m) => match m.total_mass() {
                Some(_) => Activity::Finite,
                None => Activity::Infinite,
            },
        }
    }

    /// Laplace exponent of the approximation that drops jumps at most
    /// `eps`: `α + βu + ∫_{(eps,∞)} (1 - e^{-ux}) Λ(dx)`.
    pub fn truncated_laplace_exponent(&self, u: f64, eps: f64) -> Result<f64> {
        if !(u >= 0.0) || !(eps > 0.0) {
            return domain(format!("truncated exponent needs u >= 0, eps > 0 (u={u}, eps={eps})"));
        }
        let jumps = match &self.measure {
            Some(m) => {
                m.integrate_range(|x| -(-u * x).exp_m1(), eps, f64::INFINITY, QUADRATURE_TOL)?
                    .value
            }
            None => 0.0,
        };
        Ok(self.kill_rate + self.drift * u + jumps)
    }
}

/// The part of [`SJumpLaw`] on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SJumpContinuous {
    Empty,
    /// Probability masses `(1 - e^{-x_j}) w_j / Ψ(1)`.
    Atoms(Vec<Atom>),
    /// Density `(1 - e^{-x}) λ(x) / psi`.
    Density { measure: LevyMeasure, psi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SJumpLaw {
    pub atom_at_zero: f64,
    pub continuous: SJumpContinuous,
}

impl SJumpLaw {
    /// Density of the part on `(0, ∞)`, if it has one.
    pub fn density(&self, x: f64) -> Option<f64> {
        match &self.continuous {
            SJumpContinuous::Density { measure, psi } => {
                measure.density(x).map(|d| -(-x).exp_m1() * d / psi)
            }
            _ => None,
        }
    }

    /// Mass of `(lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> Result<f64> {
        match &self.continuous {
            SJumpContinuous::Empty => Ok(0.0),
            SJumpContinuous::Atoms(atoms) => Ok(atoms
                .iter()
                .filter(|a| a.location > lo && a.location <= hi)
                .map(|a| a.mass)
                .sum()),
            SJumpContinuous::Density { measure, psi } => Ok(measure
                .integrate_range(|x| -(-x).exp_m1(), lo, hi, Tolerance::new(1e-13, 1e-11))?
                .value
                / psi),
        }
    }

    pub fn continuous_mass(&self) -> Result<f64> {
        self.mass_between(0.0, f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma11() -> LevyTriple {
        LevyTriple::strict(0.0, LevyMeasure::gamma(1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn pure_drift_exponent() {
        let t = LevyTriple::pure_drift(1.0).unwrap();
        assert_eq!(t.laplace_exponent(3.0).unwrap(), 3.0);
        assert_eq!(t.leading_rate().unwrap(), 1.0);
    }

    #[test]
    fn negative_argument_is_rejected() {
        assert!(gamma11().laplace_exponent(-0.1).is_err());
    }

    #[test]
    fn zero_process_is_rejected() {
        assert!(LevyTriple::new(0.0, 0.0, None).is_err());
        assert!(LevyTriple::new(-1.0, 1.0, None).is_err());
        assert!(LevyTriple::new(0.5, 0.0, None).is_ok());
    }

    #[test]
    fn killed_triple_has_no_leading_rate() {
        let t = gamma11().with_kill_rate(0.3).unwrap();
        assert!((t.laplace_exponent(0.0).unwrap() - 0.3).abs() < 1e-15);
        assert!(t.leading_rate().is_err());
        assert!(t.jump_pgf(0.5).is_err());
    }

    #[test]
    fn gamma_and_atomic_leading_rates() {
        assert!((gamma11().leading_rate().unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let atomic = LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 2.0)]).unwrap()).unwrap();
        assert!((atomic.leading_rate().unwrap() - 1.264_241_117_657_115_4).abs() < 1e-14);
    }

    #[test]
    fn atom_masses() {
        let drift = LevyTriple::pure_drift(2.0).unwrap();
        assert_eq!(drift.jump_atom_mass(1).unwrap(), 2.0);
        assert_eq!(drift.jump_atom_mass(2).unwrap(), 0.0);
        assert!(drift.jump_atom_mass(0).is_err());
        let atomic = LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 1.0)]).unwrap()).unwrap();
        assert!((atomic.jump_atom_mass(2).unwrap() - 0.183_939_720_585_721_16).abs() < 1e-15);
        // no overflow far beyond 170!
        let m = atomic.jump_atom_mass(400).unwrap();
        assert!((0.0..1e-300).contains(&m));
    }

    #[test]
    fn pgf_endpoints_and_drift() {
        let g = gamma11();
        assert_eq!(g.jump_pgf(0.0).unwrap(), 0.0);
        assert_eq!(g.jump_pgf(1.0).unwrap(), 1.0);
        assert!(g.jump_pgf(1.5).is_err());
        assert!((g.jump_pgf(0.5).unwrap() - 0.415_037_499_278_843_8).abs() < 1e-14);
        let d = LevyTriple::pure_drift(1.0).unwrap();
        assert!((d.jump_pgf(0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!((d.jump_pgf_series(0.3, 1).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(g.jump_pgf_series(0.0, 7).unwrap(), 0.0);
    }

    #[test]
    fn s_jump_law_examples() {
        let d = LevyTriple::pure_drift(1.0).unwrap().s_jump_law().unwrap();
        assert_eq!(d.atom_at_zero, 1.0);
        assert_eq!(d.continuous, SJumpContinuous::Empty);
        let g = gamma11().s_jump_law().unwrap();
        assert_eq!(g.atom_at_zero, 0.0);
        let mixed = LevyTriple::strict(1.0, LevyMeasure::atomic([(1.0, 1.0)]).unwrap()).unwrap();
        let law = mixed.s_jump_law().unwrap();
        assert!((law.atom_at_zero - 0.612_699_836_780_282).abs() < 1e-14);
        assert!((law.atom_at_zero + law.continuous_mass().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn activity() {
        assert_eq!(gamma11().activity_class(), Activity::Infinite);
        let st = LevyTriple::strict(0.0, LevyMeasure::stable(0.5, 1.0).unwrap()).unwrap();
        assert_eq!(st.activity_class(), Activity::Infinite);
        let at = LevyTriple::strict(0.0, LevyMeasure::atomic([(0.5, 3.0)]).unwrap()).unwrap();
        assert_eq!(at.activity_class(), Activity::Finite);
        let exp_density = LevyMeasure::density_fn(|x: f64| 2.0 * (-x).exp(), 1.0).unwrap();
        let t = LevyTriple::strict(0.0, exp_density).unwrap();
        assert_eq!(t.activity_class(), Activity::Finite);
        let gamma_density = LevyMeasure::density_fn(|x: f64| (-x).exp() / x, 1.0).unwrap();
        let t = LevyTriple::strict(0.0, gamma_density).unwrap();
        assert_eq!(t.activity_class(), Activity::Infinite);
    }

    #[test]
    fn non_integrable_density_is_rejected() {
        assert!(LevyMeasure::density_fn(|x: f64| x.powi(-2), 1.0).is_err());
        assert!(LevyMeasure::density_fn(|x: f64| 1.0 / x, 1.0).is_err());
        assert!(LevyMeasure::stable(1.0, 1.0).is_err());
        assert!(LevyMeasure::gamma(0.0, 1.0).is_err());
        assert!(LevyMeasure::atomic([(1.0, -1.0)]).is_err());
    }

    #[test]
    fn truncated_exponent_gamma() {
        // mpmath: ∫_{1e-4}^∞ (1-e^{-x}) e^{-x}/x dx
        let v = gamma11().truncated_laplace_exponent(1.0, 1e-4).unwrap();
        assert!((v - 0.693_047_188_059_556_4).abs() < 1e-9, "{v}");
        assert!(std::f64::consts::LN_2 - v <= 1e-4);
    }
}
