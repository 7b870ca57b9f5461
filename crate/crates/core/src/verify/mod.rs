//! Monte Carlo and deterministic checks of the identities linking `Ψ`,
//! `Π(S(·))` and its jumps.
//!
//! Monte Carlo comparisons pass when the estimate is within
//! [`MC_SIGMAS`] standard errors of the reference; chi-square tests pass
//! when the p-value exceeds [`SIGNIFICANCE`].

mod gof;
mod report;

pub use gof::{chi_square_gof, DiscreteReference, GoodnessOfFit, PooledBin, MIN_EXPECTED};
pub use report::{write_summary_csv, VerificationReport};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::levy::{LevyMeasure, LevyTriple, SJumpContinuous};
use crate::quad::{integrate_positive_axis, Tolerance};
use crate::rng::RngState;
use crate::samplers::{sample_compound_poisson, AtomicJumps, SubordinatorSampler, GRID_SLACK};
use crate::special::ln_factorial;
use crate::subordination::{subordinate_poisson_on_grid, JumpRecord, SubordinatedPoissonPath, POISSON_LANE};

/// Width of the Monte Carlo acceptance band, in standard errors.
pub const MC_SIGMAS: f64 = 4.0;
/// Level of every chi-square test.
pub const SIGNIFICANCE: f64 = 0.001;
/// Smallest sample a statistical check accepts.
pub const MIN_OBSERVATIONS: usize = 1000;
/// Absolute slack added to `MC_SIGMAS · stderr` so zero-variance estimators
/// survive rounding in the reference.
const ABS_FLOOR: f64 = 1e-12;

const MARGINAL_LANE: u64 = 0x4d41;
const QN_LANE: u64 = 0x714e;
const KILL_CHECK_LANE: u64 = 0x4b49;
const S_JUMP_LANE: u64 = 0x534a;
const ACCEPT_LANE: u64 = 0xacce;

fn require_samples(n: usize) -> Result<()> {
    if n < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{n} observations; at least {MIN_OBSERVATIONS} are needed"
        )));
    }
    Ok(())
}

fn require_match(triple: &LevyTriple, sampler: &SubordinatorSampler) -> Result<()> {
    if sampler.triple() != triple {
        return domain(format!(
            "sampler is bound to a {} triple, check was given a {} triple",
            sampler.triple().family_name(),
            triple.family_name()
        ));
    }
    Ok(())
}

/// Neumaier-compensated sum; plain summation of `10^5` equal terms drifts
/// by more than [`ABS_FLOOR`].
fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        carry += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + carry
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// `|diff|` in standard errors after removing the absolute floor.
fn standardized(diff: f64, stderr: f64) -> f64 {
    let excess = (diff.abs() - ABS_FLOOR).max(0.0);
    if excess == 0.0 {
        0.0
    } else if stderr > 0.0 {
        excess / stderr
    } else {
        f64::INFINITY
    }
}

fn within_band(diff: f64, stderr: f64) -> bool {
    diff.abs() <= MC_SIGMAS * stderr + ABS_FLOOR
}

/// `S(t)` for `n` independent replicas; replica `i` uses stream `i` of
/// `rng`. Killed replicas give `+∞`.
pub fn sample_marginals(sampler: &SubordinatorSampler, t: f64, n: usize, rng: RngState) -> Result<Vec<f64>> {
    (0..n)
        .map(|i| sampler.sample(t, t, rng.with_stream(i as u64))?.evaluate(t))
        .collect()
}

/// `n` independent paths of `Π(S(·))` on `[0, horizon]` with grid
/// `grid_step`. Replica `i` draws `S` from stream `i` of `rng` and the
/// Poisson clock from a fork of it.
pub fn simulate_subordinated(
    sampler: &SubordinatorSampler,
    horizon: f64,
    grid_step: f64,
    n: usize,
    rng: RngState,
) -> Result<Vec<SubordinatedPoissonPath>> {
    if !sampler.triple().is_strict() {
        return Err(Error::Unsupported("subordination needs a strict triple".into()));
    }
    (0..n)
        .map(|i| {
            let r = rng.with_stream(i as u64);
            let s = sampler.sample(horizon, grid_step, r)?;
            subordinate_poisson_on_grid(&s, grid_step, r.fork(POISSON_LANE))
        })
        .collect()
}

/// Sizes of every jump in a batch, in path order.
pub fn collect_jump_sizes(paths: &[SubordinatedPoissonPath]) -> Vec<u64> {
    paths.iter().flat_map(|p| p.jumps().iter().map(|j: &JumpRecord| j.size)).collect()
}

/// One `u` of a Laplace transform comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceRow {
    pub u: f64,
    pub psi: f64,
    pub reference: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub passed: bool,
}

/// Compares the sample mean of `e^{-u S(t)}` with `e^{-t psi(u)}` on
/// `u_grid` for an arbitrary reference exponent. Killed replicas
/// contribute zero at every `u`.
pub fn mc_laplace_check_against<F: Fn(f64) -> Result<f64>>(
    sampler: &SubordinatorSampler,
    t: f64,
    u_grid: &[f64],
    n_samples: usize,
    rng: RngState,
    psi: F,
) -> Result<(VerificationReport, Vec<LaplaceRow>)> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("horizon must be positive, got {t}"));
    }
    if let Some(u) = u_grid.iter().find(|u| !(**u >= 0.0 && u.is_finite())) {
        return domain(format!("u = {u} must be finite and >= 0"));
    }
    require_samples(n_samples)?;
    let marginals = sample_marginals(sampler, t, n_samples, rng.fork(MARGINAL_LANE))?;
    let mut rows = Vec::with_capacity(u_grid.len());
    let mut worst: f64 = 0.0;
    for &u in u_grid {
        let values: Vec<f64> =
            marginals.iter().map(|&s| if s.is_finite() { (-u * s).exp() } else { 0.0 }).collect();
        let (estimate, stderr) = mean_and_stderr(&values);
        let psi_u = psi(u)?;
        let reference = (-t * psi_u).exp();
        let diff = estimate - reference;
        worst = worst.max(standardized(diff, stderr));
        rows.push(LaplaceRow { u, psi: psi_u, reference, estimate, stderr, passed: within_band(diff, stderr) });
    }
    let mut report = VerificationReport::new("mc_laplace_check")
        .detail("family", sampler.triple().family_name())
        .detail("t", t)
        .detail("rows", &rows);
    report.statistic = worst;
    report.tolerance_or_alpha = MC_SIGMAS;
    report.n_samples = n_samples as u64;
    report.passed = rows.iter().all(|r| r.passed);
    Ok((report, rows))
}

/// Monte Carlo check of `E[e^{-u S(t)}] = e^{-t Ψ(u)}`. The statistic is
/// the largest deviation over `u_grid` in standard errors.
pub fn mc_laplace_check(
    triple: &LevyTriple,
    sampler: &SubordinatorSampler,
    t: f64,
    u_grid: &[f64],
    n_samples: usize,
    rng: RngState,
) -> Result<VerificationReport> {
    require_match(triple, sampler)?;
    Ok(mc_laplace_check_against(sampler, t, u_grid, n_samples, rng, |u| triple.laplace_exponent(u))?.0)
}

/// Checks `P[Π(S(1/n)) = 0] = e^{-Ψ(1)/n}` and that the n-th power of the
/// estimate agrees with the estimated `P[Π(S(1)) = 0]`.
pub fn qn_check(
    triple: &LevyTriple,
    sampler: &SubordinatorSampler,
    n: u64,
    n_samples: usize,
    rng: RngState,
) -> Result<VerificationReport> {
    require_match(triple, sampler)?;
    if n == 0 {
        return domain("n must be positive");
    }
    require_samples(n_samples)?;
    let psi = triple.leading_rate()?;
    let paths = simulate_subordinated(sampler, 1.0, 1.0 / n as f64, n_samples, rng.fork(QN_LANE))?;
    let m = n_samples as f64;
    let q_hat = paths.iter().filter(|p| p.count_at(1) == 0).count() as f64 / m;
    let p0_hat = paths.iter().filter(|p| p.final_count() == 0).count() as f64 / m;

    let q = (-psi / n as f64).exp();
    let se_q = (q * (1.0 - q) / m).sqrt();
    let p0 = (-psi).exp();
    let se_p0 = (p0 * (1.0 - p0) / m).sqrt();
    let tol_q = MC_SIGMAS * se_q + ABS_FLOOR;
    let power = q_hat.powf(n as f64);
    let tol_power = MC_SIGMAS * (n as f64 * q.powf(n as f64 - 1.0) * se_q + se_p0) + ABS_FLOOR;
    let single_ok = (q_hat - q).abs() <= tol_q;
    let power_ok = (power - p0_hat).abs() <= tol_power;

    let mut report = VerificationReport::new("qn_check")
        .detail("family", triple.family_name())
        .detail("n", n)
        .detail("stderr", se_q)
        .detail("q_n_pow_n", power)
        .detail("p_zero_at_1", p0_hat)
        .detail("power_tolerance", tol_power)
        .detail("power_consistent", power_ok);
    report.statistic = q_hat;
    report.reference = q;
    report.tolerance_or_alpha = tol_q;
    report.n_samples = n_samples as u64;
    report.passed = single_ok && power_ok;
    Ok(report)
}

/// Constant `C` of the envelope `C / n` on the distance between the
/// binomial and Poisson generating functions of `K_n(t)`.
///
/// `e·ψ·(ψt + 1)`: the `ψ²t` part bounds the binomial-vs-Poisson error,
/// the `ψ` part the effect of `⌊nt⌋ < nt`; the factor `e` is headroom over
/// the worst ratio seen on a sweep of `ψ, t` and `n`.
pub fn kn_envelope_constant(psi: f64, t: f64) -> f64 {
    std::f64::consts::E * psi * (psi * t + 1.0)
}

/// `sup_z |(1 - (1-z)(1-e^{-ψ/n}))^{⌊nt⌋} - e^{-tψ(1-z)}|`.
pub fn kn_pgf_sup_difference(psi: f64, t: f64, n: u64, z_grid: &[f64]) -> f64 {
    let levels = ((n as f64) * t + GRID_SLACK).floor();
    let p_jump = -(-psi / n as f64).exp_m1();
    z_grid
        .iter()
        .map(|&z| {
            let binomial = (levels * (-(1.0 - z) * p_jump).ln_1p()).exp();
            let poisson = (-t * psi * (1.0 - z)).exp();
            (binomial - poisson).abs()
        })
        .fold(0.0, f64::max)
}

/// Deterministic check that the binomial generating function of `K_n(t)`
/// approaches the Poisson one: sups nonincreasing along `n_list` and the
/// last one below [`kn_envelope_constant`]` / n`.
pub fn kn_pgf_limit_check(psi: f64, t: f64, n_list: &[u64], z_grid: &[f64]) -> Result<VerificationReport> {
    if !(psi > 0.0 && psi.is_finite()) || !(t > 0.0 && t.is_finite()) {
        return domain(format!("need psi > 0 and t > 0, got psi={psi}, t={t}"));
    }
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return domain("n_list must be positive and strictly increasing");
    }
    if z_grid.is_empty() || z_grid.iter().any(|z| !(0.0..=1.0).contains(z)) {
        return domain("z_grid must be a nonempty subset of [0,1]");
    }
    let sups: Vec<f64> = n_list.iter().map(|&n| kn_pgf_sup_difference(psi, t, n, z_grid)).collect();
    let monotone = sups.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let c = kn_envelope_constant(psi, t);
    let n_final = *n_list.last().expect("nonempty");
    let bound = c / n_final as f64;
    let last = *sups.last().expect("nonempty");
    let series: Vec<(u64, f64)> = n_list.iter().copied().zip(sups.iter().copied()).collect();
    let mut report = VerificationReport::new("kn_pgf_limit_check")
        .detail("psi", psi)
        .detail("t", t)
        .detail("envelope_constant", c)
        .detail("nonincreasing", monotone)
        .detail("sup_by_n", series);
    report.statistic = last;
    report.reference = bound;
    report.tolerance_or_alpha = c;
    report.passed = monotone && last <= bound;
    Ok(report)
}

fn chi_square_report(name: &str, fit: &GoodnessOfFit, n: usize) -> VerificationReport {
    let mut report = VerificationReport::new(name)
        .detail("p_value", fit.p_value)
        .detail("dof", fit.dof)
        .detail("bins", &fit.bins);
    report.statistic = fit.statistic;
    report.reference = fit.dof as f64;
    report.tolerance_or_alpha = SIGNIFICANCE;
    report.n_samples = n as u64;
    report.passed = fit.p_value > SIGNIFICANCE;
    report
}

fn point_mass_report(name: &str, observations: &[u64], category: u64) -> VerificationReport {
    let misses = observations.iter().filter(|&&x| x != category).count();
    let mut report = VerificationReport::new(name)
        .detail("point_mass", category)
        .detail("p_value", if misses == 0 { 1.0 } else { 0.0 });
    report.statistic = misses as f64;
    report.tolerance_or_alpha = SIGNIFICANCE;
    report.n_samples = observations.len() as u64;
    report.passed = misses == 0;
    report
}

/// Chi-square test of `K(t)`, the number of jumps on `[0, t]`, against
/// Poisson(`tψ`).
pub fn jump_count_poisson_test(
    paths: &[SubordinatedPoissonPath],
    psi: f64,
    t: f64,
) -> Result<VerificationReport> {
    require_samples(paths.len())?;
    if !(psi > 0.0 && psi.is_finite()) || !(t > 0.0) {
        return domain(format!("need psi > 0 and t > 0, got psi={psi}, t={t}"));
    }
    if let Some(p) = paths.iter().find(|p| p.horizon() < t * (1.0 - GRID_SLACK)) {
        return domain(format!("path horizon {} is shorter than t = {t}", p.horizon()));
    }
    let limit = t * (1.0 + GRID_SLACK);
    let counts: Vec<u64> =
        paths.iter().map(|p| p.jumps().iter().filter(|j| j.tau <= limit).count() as u64).collect();
    let mean = t * psi;
    let observed_max = counts.iter().copied().max().unwrap_or(0);
    let k_max = observed_max.max((mean + 12.0 * mean.sqrt() + 12.0).ceil() as u64);
    let probs: Vec<f64> =
        (0..=k_max).map(|k| (k as f64 * mean.ln() - mean - ln_factorial(k)).exp()).collect();
    let fit = chi_square_gof(&counts, &DiscreteReference { first: 0, probs })?;
    let empirical = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
    Ok(chi_square_report("jump_count_poisson_test", &fit, counts.len())
        .detail("poisson_mean", mean)
        .detail("empirical_mean", empirical))
}

/// Largest jump size given its own category; larger sizes share the open
/// tail bin, whose expected mass is the exact complement.
const JUMP_LAW_CATEGORIES: u64 = 4096;

/// Chi-square test of jump sizes against `m_j / Ψ(1)`, `j >= 1`.
pub fn jump_law_test(jumps: &[u64], triple: &LevyTriple) -> Result<VerificationReport> {
    require_samples(jumps.len())?;
    if jumps.contains(&0) {
        return domain("jump sizes are at least 1");
    }
    let psi = triple.leading_rate()?;
    let j_max = jumps.iter().copied().max().unwrap_or(1).clamp(64, JUMP_LAW_CATEGORIES);
    let probs = (1..=j_max).map(|j| Ok(triple.jump_atom_mass(j)? / psi)).collect::<Result<Vec<f64>>>()?;
    let reference = DiscreteReference { first: 1, probs };
    let report = match reference.point_mass() {
        Some(c) => point_mass_report("jump_law_test", jumps, c),
        None => chi_square_report("jump_law_test", &chi_square_gof(jumps, &reference)?, jumps.len()),
    };
    Ok(report.detail("family", triple.family_name()).detail("psi", psi))
}

/// One `z` of the jump generating function comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PgfRow {
    pub z: f64,
    pub reference: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub passed: bool,
}

/// Sample mean of `z^{J}` over the jumps against `f(z) =
/// (Ψ(1) - Ψ(1-z)) / Ψ(1)`, pointwise within [`MC_SIGMAS`] standard errors.
pub fn jump_pgf_identity_check(jumps: &[u64], triple: &LevyTriple, z_grid: &[f64]) -> Result<VerificationReport> {
    require_samples(jumps.len())?;
    let mut rows = Vec::with_capacity(z_grid.len());
    let mut worst: f64 = 0.0;
    for &z in z_grid {
        let reference = triple.jump_pgf(z)?;
        let values: Vec<f64> = jumps.iter().map(|&j| z.powf(j as f64)).collect();
        let (estimate, stderr) = mean_and_stderr(&values);
        let diff = estimate - reference;
        worst = worst.max(standardized(diff, stderr));
        rows.push(PgfRow { z, reference, estimate, stderr, passed: within_band(diff, stderr) });
    }
    let mut report = VerificationReport::new("jump_pgf_identity_check")
        .detail("family", triple.family_name())
        .detail("rows", &rows);
    report.statistic = worst;
    report.tolerance_or_alpha = MC_SIGMAS;
    report.n_samples = jumps.len() as u64;
    report.passed = rows.iter().all(|r| r.passed);
    Ok(report)
}

/// Acceptance sampling of the jumps of `S` at the jump times of `Π(S(·))`
/// for an atomic compound Poisson triple: `n_samples` jumps of `S`, each
/// kept when it exceeds an independent standard exponential. The kept
/// sizes are tested against the S-jump law, and the kept fraction against
/// `Ψ(1) / Λ(0, ∞)`.
pub fn s_jump_conditional_check(cp_triple: &LevyTriple, n_samples: usize, rng: RngState) -> Result<VerificationReport> {
    if !cp_triple.is_strict() || cp_triple.drift() > 0.0 {
        return domain("acceptance check needs a compound Poisson triple without drift or killing");
    }
    let atoms = match cp_triple.measure() {
        Some(LevyMeasure::FiniteAtomic { atoms }) => atoms.clone(),
        _ => return domain("acceptance check needs an atomic Lévy measure"),
    };
    let law = cp_triple.s_jump_law()?;
    let probs: Vec<f64> = match &law.continuous {
        SJumpContinuous::Atoms(a) => a.iter().map(|a| a.mass).collect(),
        _ => unreachable!("atomic measures give atomic S-jump laws"),
    };
    let jumps = AtomicJumps::from_measure(cp_triple.measure().expect("checked above"))?;
    let total = jumps.total_mass();
    // horizon per replica chosen so one replica holds about a hundred jumps
    let horizon = 100.0 / total;
    let base = rng.fork(S_JUMP_LANE);
    let mut sizes: Vec<f64> = Vec::with_capacity(n_samples);
    let mut stream = 0u64;
    while sizes.len() < n_samples {
        let mut g = base.with_stream(stream).generator();
        let path = sample_compound_poisson(total, &jumps, horizon, &mut g)?;
        if let crate::samplers::PathRepr::JumpList { sizes: s, .. } = path.repr() {
            sizes.extend(s.iter().take(n_samples - sizes.len()));
        }
        stream += 1;
    }
    let mut clock = rng.fork(ACCEPT_LANE).generator();
    let mut accepted = Vec::new();
    for &x in &sizes {
        if x > clock.exp1() {
            let idx = atoms.iter().position(|a| a.location == x).expect("sizes are atom locations");
            accepted.push(idx as u64);
        }
    }
    if accepted.len() < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{} accepted jumps; at least {MIN_OBSERVATIONS} are needed",
            accepted.len()
        )));
    }
    let reference = DiscreteReference { first: 0, probs: probs.clone() };
    let law_report = match reference.point_mass() {
        Some(c) => point_mass_report("s_jump_conditional_check", &accepted, c),
        None => chi_square_report("s_jump_conditional_check", &chi_square_gof(&accepted, &reference)?, accepted.len()),
    };
    let p_accept = cp_triple.leading_rate()? / total;
    let frac = accepted.len() as f64 / sizes.len() as f64;
    let se = (p_accept * (1.0 - p_accept) / sizes.len() as f64).sqrt();
    let frac_ok = within_band(frac - p_accept, se);
    let mut report = law_report
        .detail("accepted_fraction", frac)
        .detail("expected_accepted_fraction", p_accept)
        .detail("accepted_fraction_stderr", se)
        .detail("accepted_fraction_ok", frac_ok)
        .detail("atom_locations", atoms.iter().map(|a| a.location).collect::<Vec<_>>())
        .detail("expected_law", probs)
        .detail("s_jumps_drawn", sizes.len());
    report.passed = report.passed && frac_ok;
    Ok(report)
}

/// Fraction of replicas killed by time `t` against `1 - e^{-αt}`.
pub fn kill_probability_check(
    sampler: &SubordinatorSampler,
    t: f64,
    n_samples: usize,
    rng: RngState,
) -> Result<VerificationReport> {
    let alpha = sampler.triple().kill_rate();
    if !(alpha > 0.0) {
        return domain("kill probability check needs a positive kill rate");
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("horizon must be positive, got {t}"));
    }
    require_samples(n_samples)?;
    let killed = sample_marginals(sampler, t, n_samples, rng.fork(KILL_CHECK_LANE))?
        .iter()
        .filter(|s| s.is_infinite())
        .count();
    let estimate = killed as f64 / n_samples as f64;
    let p = -(-alpha * t).exp_m1();
    let se = (p * (1.0 - p) / n_samples as f64).sqrt();
    let mut report = VerificationReport::new("kill_probability_check")
        .detail("kill_rate", alpha)
        .detail("t", t)
        .detail("stderr", se);
    report.statistic = estimate;
    report.reference = p;
    report.tolerance_or_alpha = MC_SIGMAS * se + ABS_FLOOR;
    report.n_samples = n_samples as u64;
    report.passed = within_band(estimate - p, se);
    Ok(report)
}

fn gamma_expectation<G: Fn(f64) -> f64>(a: f64, b: f64, n: u64, g: G) -> Result<f64> {
    let k = a / n as f64;
    let log_norm = k * b.ln() - crate::special::ln_gamma(k);
    let integrand = |x: f64| {
        let v = g(x);
        if v == 0.0 {
            0.0
        } else {
            v * (log_norm + (k - 1.0) * x.ln() - b * x).exp()
        }
    };
    Ok(integrate_positive_axis(integrand, 0.0, f64::INFINITY, k / b, Tolerance::new(1e-15, 1e-12))?.value)
}

fn check_gamma_args(a: f64, b: f64, n: u64, z: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) || n == 0 || !(0.0..=1.0).contains(&z) {
        return domain(format!("bad arguments a={a}, b={b}, n={n}, z={z}"));
    }
    Ok(())
}

/// `E[z^{Π(S(1/n))} | Π(S(1/n)) > 0]` for the gamma subordinator, as
/// `E[e^{(z-1)S} - e^{-S}] / E[1 - e^{-S}]` with `S ~ Gamma(a/n, b)`.
/// Increases to the jump generating function as `n → ∞`.
pub fn gamma_conditional_pgf(a: f64, b: f64, n: u64, z: f64) -> Result<f64> {
    check_gamma_args(a, b, n, z)?;
    let num = gamma_expectation(a, b, n, |x| {
        if x < 1.0 {
            (-x).exp() * (z * x).exp_m1()
        } else {
            ((z - 1.0) * x).exp() - (-x).exp()
        }
    })?;
    let den = gamma_expectation(a, b, n, |x| -(-x).exp_m1())?;
    Ok(num / den)
}

/// `E[(e^{(z-1)S} - e^{-S}) / (1 - e^{-S})]` with `S ~ Gamma(a/n, b)`: the
/// conditional generating function of `Π(s)` given `Π(s) > 0`, averaged
/// over the unconditioned law of `S(1/n)`. Nondecreasing in `n`, with
/// limit `z`.
pub fn gamma_averaged_conditional_pgf(a: f64, b: f64, n: u64, z: f64) -> Result<f64> {
    check_gamma_args(a, b, n, z)?;
    gamma_expectation(a, b, n, |x| {
        if x < 1.0 {
            (-x).exp() * (z * x).exp_m1() / -(-x).exp_m1()
        } else {
            (((z - 1.0) * x).exp() - (-x).exp()) / -(-x).exp_m1()
        }
    })
}

/// Checks that [`gamma_conditional_pgf`] and
/// [`gamma_averaged_conditional_pgf`] are nondecreasing along `n_list` at
/// every `z`. The statistic is the largest drop between consecutive levels.
pub fn conditional_pgf_monotonicity_check(a: f64, b: f64, n_list: &[u64], z_grid: &[f64]) -> Result<VerificationReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return domain("n_list must be nonempty and strictly increasing");
    }
    let mut worst_drop: f64 = 0.0;
    let mut conditional = Vec::new();
    let mut averaged = Vec::new();
    for &z in z_grid {
        let exact = n_list.iter().map(|&n| gamma_conditional_pgf(a, b, n, z)).collect::<Result<Vec<_>>>()?;
        let mean = n_list
            .iter()
            .map(|&n| gamma_averaged_conditional_pgf(a, b, n, z))
            .collect::<Result<Vec<_>>>()?;
        for w in exact.windows(2).chain(mean.windows(2)) {
            worst_drop = worst_drop.max(w[0] - w[1]);
        }
        conditional.push((z, exact));
        averaged.push((z, mean));
    }
    let mut report = VerificationReport::new("conditional_pgf_monotonicity_check")
        .detail("a", a)
        .detail("b", b)
        .detail("n_list", n_list)
        .detail("conditional_by_z", conditional)
        .detail("averaged_by_z", averaged);
    report.statistic = worst_drop;
    report.tolerance_or_alpha = 1e-10;
    report.passed = worst_drop <= 1e-10;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma11() -> LevyTriple {
        LevyTriple::strict(0.0, LevyMeasure::gamma(1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn compensated_sum_of_equal_terms_is_exact_to_rounding() {
        let x = (-0.75f64).exp();
        let mean = compensated_sum(std::iter::repeat_n(x, 100_000)) / 100_000.0;
        assert!((mean - x).abs() <= 2.0 * f64::EPSILON * x);
    }

    #[test]
    fn kn_trivial_points() {
        assert_eq!(kn_pgf_sup_difference(1.0, 1.0, 7, &[1.0]), 0.0);
        let d = kn_pgf_sup_difference(1.0, 1.0, 1, &[0.0]);
        assert!(d < 1e-16, "{d}");
        assert!(kn_pgf_sup_difference(1.0, 1.0, 1024, &[0.5]) <= 1e-3);
    }

    #[test]
    fn kn_check_passes_on_default_grid() {
        let z: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let r = kn_pgf_limit_check(1.0, 1.0, &[16, 64, 256, 1024, 4096], &z).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.statistic <= 1e-3);
    }

    #[test]
    fn kn_check_rejects_unsorted_levels() {
        assert!(kn_pgf_limit_check(1.0, 1.0, &[4, 2], &[0.5]).is_err());
    }

    #[test]
    fn sampler_mismatch_is_domain_error() {
        let s = SubordinatorSampler::exact(LevyTriple::pure_drift(1.0).unwrap()).unwrap();
        let r = mc_laplace_check(&gamma11(), &s, 1.0, &[1.0], 1000, RngState::new(1, 0));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn zero_u_is_exact_for_strict_triples() {
        let t = gamma11();
        let s = SubordinatorSampler::exact(t.clone()).unwrap();
        let r = mc_laplace_check(&t, &s, 1.0, &[0.0], 1000, RngState::new(3, 0)).unwrap();
        assert!(r.passed);
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn too_few_samples_is_insufficient() {
        let t = gamma11();
        let s = SubordinatorSampler::exact(t.clone()).unwrap();
        let r = mc_laplace_check(&t, &s, 1.0, &[1.0], 10, RngState::new(3, 0));
        assert!(matches!(r, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn drift_jumps_are_a_point_mass() {
        let t = LevyTriple::pure_drift(2.0).unwrap();
        let r = jump_law_test(&vec![1; 1000], &t).unwrap();
        assert!(r.passed);
        let mut bad = vec![1; 1000];
        bad[0] = 2;
        assert!(!jump_law_test(&bad, &t).unwrap().passed);
    }

    #[test]
    fn drift_jump_pgf_is_identity() {
        let t = LevyTriple::pure_drift(1.0).unwrap();
        let r = jump_pgf_identity_check(&vec![1; 1000], &t, &[0.1, 0.5, 0.9, 1.0]).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn s_jump_check_rejects_drift() {
        let t = LevyTriple::strict(1.0, LevyMeasure::atomic([(1.0, 1.0)]).unwrap()).unwrap();
        assert!(matches!(s_jump_conditional_check(&t, 1000, RngState::new(1, 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn conditional_pgf_matches_closed_form() {
        // E[e^{-uS(ε)}] = e^{-εΨ(u)} turns the ratio into exponentials of Ψ
        let t = gamma11();
        for &(n, z) in &[(1u64, 0.5), (4, 0.1), (64, 0.9)] {
            let eps = 1.0 / n as f64;
            let (p1, pz) = (t.laplace_exponent(1.0).unwrap(), t.laplace_exponent(1.0 - z).unwrap());
            let want = ((-pz * eps).exp() - (-p1 * eps).exp()) / -(-p1 * eps).exp_m1();
            let got = gamma_conditional_pgf(1.0, 1.0, n, z).unwrap();
            assert!((got - want).abs() < 1e-9, "n={n} z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn conditional_pgf_tends_to_jump_pgf() {
        let f = gamma11().jump_pgf(0.5).unwrap();
        let far = gamma_conditional_pgf(1.0, 1.0, 1 << 14, 0.5).unwrap();
        assert!((far - f).abs() < 1e-4, "{far} vs {f}");
        assert!(gamma_conditional_pgf(1.0, 1.0, 1, 0.5).unwrap() < far);
    }

    #[test]
    fn averaged_pgf_tends_to_z() {
        let far = gamma_averaged_conditional_pgf(1.0, 1.0, 1 << 14, 0.5).unwrap();
        assert!((far - 0.5).abs() < 1e-3, "{far}");
    }

    #[test]
    fn monotonicity_check_passes_for_gamma() {
        let z: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let r = conditional_pgf_monotonicity_check(1.0, 1.0, &[1, 2, 4, 16, 64, 256, 1024], &z).unwrap();
        assert!(r.passed, "{}", r.summary_line());
    }
}
