//! Scalar random variates built on [`StreamRng`].

use crate::rng::StreamRng;
use crate::special::ln_gamma;

/// `ln` of a Gamma(shape, 1) variate.
///
/// Marsaglia-Tsang squeeze for `shape >= 1`; for `shape < 1` the boost
/// `G(shape) = G(shape + 1) · U^{1/shape}` is applied in log space, since
/// `U^{1/shape}` underflows for tiny shapes.
pub fn ln_gamma_variate(shape: f64, rng: &mut StreamRng) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let u = rng.uniform();
        return ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = rng.normal();
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.uniform();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

/// Gamma variate with the given shape and rate.
pub fn gamma_variate(shape: f64, rate: f64, rng: &mut StreamRng) -> f64 {
    ln_gamma_variate(shape, rng).exp() / rate
}

const INVERSION_LIMIT: f64 = 10.0;

/// Poisson variate with mean `lambda >= 0`.
///
/// Sequential inversion below mean 10, otherwise Hörmann's transformed
/// rejection (PTRS).
pub fn poisson_variate(lambda: f64, rng: &mut StreamRng) -> u64 {
    if !(lambda > 0.0) {
        return 0;
    }
    if lambda < INVERSION_LIMIT {
        let u = rng.uniform();
        let mut p = (-lambda).exp();
        let mut cdf = p;
        let mut k = 0u64;
        while u > cdf && p > 0.0 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        return k;
    }
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -lambda + k * loglam - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}

/// One-sided stable variate `Z` with `E[e^{-uZ}] = e^{-u^index}`,
/// `0 < index < 1`, by Kanter's representation from one uniform angle and
/// one unit exponential.
pub fn positive_stable_variate(index: f64, rng: &mut StreamRng) -> f64 {
    let angle = std::f64::consts::PI * rng.uniform();
    let e = rng.exp1();
    let ln_a = (index * angle).sin().ln() - angle.sin().ln() / index;
    let ln_b = ((1.0 - index) * angle).sin().ln() - e.ln();
    (ln_a + (1.0 - index) / index * ln_b).exp()
}

/// Index into `cumulative` (increasing, last entry the total) chosen with
/// probability proportional to the gaps.
pub fn discrete_index(cumulative: &[f64], rng: &mut StreamRng) -> usize {
    let total = *cumulative.last().expect("nonempty weights");
    let target = rng.uniform() * total;
    cumulative.partition_point(|&c| c <= target).min(cumulative.len() - 1)
}
