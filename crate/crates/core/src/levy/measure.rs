use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_positive_axis, Estimate, Tolerance};
use crate::special::{gamma, ln_gamma};

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A point mass of the Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Serializable density shape `coef · x^power · e^{-rate·x}` on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityForm {
    pub coef: f64,
    pub power: f64,
    pub rate: f64,
}

impl DensityForm {
    pub fn eval(&self, x: f64) -> f64 {
        self.ln_eval(x).exp()
    }

    /// `ln λ(x)`; `-∞` off the support.
    pub fn ln_eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.coef.ln() + self.power * x.ln() - self.rate * x
    }
}

/// A Lévy density given as a function, with the quadrature split point.
#[derive(Clone)]
pub struct GenericDensity {
    density: DensityFn,
    support_cut: f64,
    form: Option<DensityForm>,
}

impl fmt::Debug for GenericDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericDensity")
            .field("support_cut", &self.support_cut)
            .field("form", &self.form)
            .finish_non_exhaustive()
    }
}

impl PartialEq for GenericDensity {
    fn eq(&self, other: &Self) -> bool {
        if self.support_cut != other.support_cut {
            return false;
        }
        match (&self.form, &other.form) {
            (Some(a), Some(b)) => a == b,
            _ => Arc::ptr_eq(&self.density, &other.density),
        }
    }
}

/// Tolerance on the estimated error of `∫ min(x, 1) λ(x) dx` at construction.
const INTEGRABILITY_TOL: f64 = 1e-6;

impl GenericDensity {
    /// Wraps `density` after checking `∫ min(x, 1) λ(x) dx < ∞` numerically.
    pub fn new<F>(density: F, support_cut: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(Arc::new(density), support_cut, None)
    }

    pub fn from_form(form: DensityForm, support_cut: f64) -> Result<Self> {
        if !(form.coef > 0.0) || !form.power.is_finite() || !(form.rate >= 0.0) {
            return domain(format!("invalid density form {form:?}"));
        }
        Self::build(Arc::new(move |x| form.eval(x)), support_cut, Some(form))
    }

    fn build(density: DensityFn, support_cut: f64, form: Option<DensityForm>) -> Result<Self> {
        if !(support_cut > 0.0) || !support_cut.is_finite() {
            return domain(format!("support_cut must be positive, got {support_cut}"));
        }
        let d = density.clone();
        let est = integrate_positive_axis(
            move |x| match form {
                Some(f) => (x.min(1.0).ln() + f.ln_eval(x)).exp(),
                None => x.min(1.0) * d(x),
            },
            0.0,
            f64::INFINITY,
            support_cut,
            Tolerance::new(1e-12, 1e-10),
        )
        .map_err(|e| Error::Domain(format!("Lévy density is not integrable against min(x,1): {e}")))?;
        if !(est.error < INTEGRABILITY_TOL) || !est.value.is_finite() || est.value < 0.0 {
            return domain(format!(
                "Lévy density fails the min(x,1) integrability check (value {}, error {:e})",
                est.value, est.error
            ));
        }
        if est.value == 0.0 {
            return domain("Lévy density integrates to zero");
        }
        Ok(Self { density, support_cut, form })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    /// `ln λ(x)`, exact in log space for densities built from a form.
    pub fn ln_eval(&self, x: f64) -> f64 {
        match self.form {
            Some(f) => f.ln_eval(x),
            None => self.eval(x).ln(),
        }
    }

    pub fn support_cut(&self) -> f64 {
        self.support_cut
    }

    pub fn form(&self) -> Option<DensityForm> {
        self.form
    }
}

/// The Lévy measure Λ of a subordinator.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasure {
    /// Density `shape_rate · e^{-scale_rate·x} / x`.
    Gamma { shape_rate: f64, scale_rate: f64 },
    /// Laplace exponent `scale · u^index`, density `scale·index/Γ(1-index) · x^{-1-index}`.
    Stable { index: f64, scale: f64 },
    FiniteAtomic { atoms: Vec<Atom> },
    Density(GenericDensity),
}

impl LevyMeasure {
    pub fn gamma(shape_rate: f64, scale_rate: f64) -> Result<Self> {
        if !(shape_rate > 0.0 && shape_rate.is_finite()) || !(scale_rate > 0.0 && scale_rate.is_finite())
        {
            return domain(format!("gamma family needs a, b > 0, got a={shape_rate}, b={scale_rate}"));
        }
        Ok(Self::Gamma { shape_rate, scale_rate })
    }

    pub fn stable(index: f64, scale: f64) -> Result<Self> {
        if !(index > 0.0 && index < 1.0) {
            return domain(format!("stable index must lie in (0,1), got {index}"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return domain(format!("stable scale must be positive, got {scale}"));
        }
        Ok(Self::Stable { index, scale })
    }

    /// Atoms given as `(location, mass)` pairs.
    pub fn atomic<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(location, mass)| Atom { location, mass })
            .collect();
        if atoms.is_empty() {
            return domain("finite atomic measure needs at least one atom");
        }
        for a in &atoms {
            if !(a.location > 0.0 && a.location.is_finite()) || !(a.mass > 0.0 && a.mass.is_finite()) {
                return domain(format!("atom {a:?} must have positive location and mass"));
            }
        }
        Ok(Self::FiniteAtomic { atoms })
    }

    pub fn density_fn<F>(density: F, support_cut: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Ok(Self::Density(GenericDensity::new(density, support_cut)?))
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Gamma { .. } => "gamma",
            Self::Stable { .. } => "stable",
            Self::FiniteAtomic { .. } => "atomic",
            Self::Density(_) => "density",
        }
    }

    /// Lévy density at `x`, or `None` for a purely atomic measure.
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            Self::Gamma { shape_rate, scale_rate } => {
                Some(if x > 0.0 { shape_rate * (-scale_rate * x).exp() / x } else { 0.0 })
            }
            Self::Stable { index, scale } => Some(if x > 0.0 {
                scale * index / gamma(1.0 - index) * x.powf(-1.0 - index)
            } else {
                0.0
            }),
            Self::FiniteAtomic { .. } => None,
            Self::Density(d) => Some(if x > 0.0 { d.eval(x) } else { 0.0 }),
        }
    }

    /// `ln` of [`Self::density`], without overflow near the origin.
    fn ln_density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self {
            Self::Gamma { shape_rate, scale_rate } => shape_rate.ln() - scale_rate * x - x.ln(),
            Self::Stable { index, scale } => {
                (scale * index).ln() - ln_gamma(1.0 - index) - (1.0 + index) * x.ln()
            }
            Self::FiniteAtomic { .. } => f64::NEG_INFINITY,
            Self::Density(d) => d.ln_eval(x),
        }
    }

    /// Breakpoint used to split quadratures over the measure.
    pub fn support_cut(&self) -> f64 {
        match self {
            Self::Density(d) => d.support_cut(),
            _ => 1.0,
        }
    }

    /// `∫_{(lo, hi]} g(x) Λ(dx)`.
    pub fn integrate_range<G: Fn(f64) -> f64>(
        &self,
        g: G,
        lo: f64,
        hi: f64,
        tol: Tolerance,
    ) -> Result<Estimate> {
        match self {
            Self::FiniteAtomic { atoms } => Ok(Estimate {
                value: atoms
                    .iter()
                    .filter(|a| a.location > lo && a.location <= hi)
                    .map(|a| a.mass * g(a.location))
                    .sum(),
                error: 0.0,
            }),
            _ => integrate_positive_axis(
                |x| {
                    let v = g(x);
                    if v == 0.0 {
                        0.0
                    } else {
                        v.signum() * (v.abs().ln() + self.ln_density(x)).exp()
                    }
                },
                lo,
                hi,
                self.support_cut(),
                tol,
            ),
        }
    }

    /// `∫_{(0, ∞)} g(x) Λ(dx)`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, tol: Tolerance) -> Result<Estimate> {
        self.integrate_range(g, 0.0, f64::INFINITY, tol)
    }

    /// `Λ((eps, ∞))`, finite for every `eps > 0`.
    pub fn tail_mass(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return domain(format!("tail mass needs eps > 0, got {eps}"));
        }
        match self {
            Self::Stable { index, scale } => Ok(scale * eps.powf(-index) / gamma(1.0 - index)),
            _ => Ok(self.integrate_range(|_| 1.0, eps, f64::INFINITY, Tolerance::new(1e-13, 1e-11))?.value),
        }
    }

    /// `∫_{(0, eps]} x Λ(dx)`, the mean rate of jumps at most `eps`.
    pub fn small_jump_mean(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return domain(format!("small jump mean needs eps > 0, got {eps}"));
        }
        match self {
            Self::Stable { index, scale } => {
                Ok(scale * index / gamma(1.0 - index) * eps.powf(1.0 - index) / (1.0 - index))
            }
            Self::Gamma { shape_rate, scale_rate } => {
                Ok(shape_rate * -(-scale_rate * eps).exp_m1() / scale_rate)
            }
            _ => Ok(self.integrate_range(|x| x, 0.0, eps, Tolerance::new(1e-14, 1e-10))?.value),
        }
    }

    /// `∫ (1 - e^{-ux}) Λ(dx)`.
    pub(crate) fn laplace_integral(&self, u: f64, tol: Tolerance) -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        match self {
            Self::Gamma { shape_rate, scale_rate } => Ok(shape_rate * (u / scale_rate).ln_1p()),
            Self::Stable { index, scale } => Ok(scale * u.powf(*index)),
            Self::FiniteAtomic { atoms } => {
                Ok(atoms.iter().map(|a| -a.mass * (-u * a.location).exp_m1()).sum())
            }
            Self::Density(_) => Ok(self.integrate(|x| -(-u * x).exp_m1(), tol)?.value),
        }
    }

    /// `∫ x^j/j! e^{-x} Λ(dx)`, evaluated in log space.
    pub(crate) fn poisson_moment(&self, j: u64, tol: Tolerance) -> Result<f64> {
        let jf = j as f64;
        let ln_jfact = ln_gamma(jf + 1.0);
        match self {
            Self::Gamma { shape_rate, scale_rate } => {
                Ok((shape_rate.ln() - jf.ln() - jf * scale_rate.ln_1p()).exp())
            }
            Self::Stable { index, scale } => Ok((scale.ln() + index.ln() + ln_gamma(jf - index)
                - ln_gamma(1.0 - index)
                - ln_jfact)
                .exp()),
            _ => Ok(self
                .integrate(
                    |x| {
                        if x > 0.0 {
                            (jf * x.ln() - x - ln_jfact).exp()
                        } else {
                            0.0
                        }
                    },
                    tol,
                )?
                .value),
        }
    }

    /// Total mass `Λ((0, ∞))`, or `None` when it diverges.
    pub fn total_mass(&self) -> Option<f64> {
        match self {
            Self::Gamma { .. } | Self::Stable { .. } => None,
            Self::FiniteAtomic { atoms } => Some(atoms.iter().map(|a| a.mass).sum()),
            Self::Density(_) => self
                .integrate(|_| 1.0, Tolerance::new(1e-12, 1e-9))
                .ok()
                .filter(|e| e.value.is_finite())
                .map(|e| e.value),
        }
    }
}
