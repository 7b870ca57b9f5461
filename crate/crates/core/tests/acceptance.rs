//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Built with `harness = false`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use subordinators::levy::{DensityForm, GenericDensity, SJumpContinuous};
use subordinators::subordination::{discretize, extract_jumps};
use subordinators::verify::{
    collect_jump_sizes, jump_count_poisson_test, jump_law_test, jump_pgf_identity_check, kill_probability_check,
    kn_pgf_limit_check, kn_pgf_sup_difference, mc_laplace_check, qn_check, s_jump_conditional_check,
    simulate_subordinated, VerificationReport,
};
use subordinators::{LevyMeasure, LevyTriple, Result, RngState, SubordinatedPoissonPath, SubordinatorSampler};

type Outcome = Result<(bool, String)>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn sampler(triple: &LevyTriple) -> SubordinatorSampler {
    SubordinatorSampler::exact(triple.clone()).expect("exact sampler")
}

fn gamma() -> LevyTriple {
    LevyTriple::strict(0.0, LevyMeasure::gamma(1.0, 1.0).unwrap()).unwrap()
}

fn families() -> Vec<(&'static str, LevyTriple)> {
    vec![
        ("drift", LevyTriple::pure_drift(1.5).unwrap()),
        ("atomic", LevyTriple::strict(0.0, LevyMeasure::atomic([(0.5, 1.0), (2.0, 0.7)]).unwrap()).unwrap()),
        ("gamma", gamma()),
        ("stable", LevyTriple::strict(0.0, LevyMeasure::stable(0.5, 1.0).unwrap()).unwrap()),
    ]
}

fn worst(reports: &[VerificationReport]) -> String {
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.summary_line()).collect();
    if failed.is_empty() {
        format!("{} checks", reports.len())
    } else {
        failed.join("; ")
    }
}

fn all_passed(reports: &[VerificationReport]) -> (bool, String) {
    (reports.iter().all(|r| r.passed), worst(reports))
}

fn c1_quadrature_oracles() -> Outcome {
    let gamma_density = LevyTriple::strict(
        0.0,
        LevyMeasure::Density(GenericDensity::from_form(DensityForm { coef: 1.0, power: -1.0, rate: 1.0 }, 1.0)?),
    )?;
    let coef = 0.5 / std::f64::consts::PI.sqrt();
    let stable_density = LevyTriple::strict(
        0.0,
        LevyMeasure::Density(GenericDensity::from_form(DensityForm { coef, power: -1.5, rate: 0.0 }, 1.0)?),
    )?;
    let e_gamma = (gamma_density.laplace_exponent(1.0)? - 2f64.ln()).abs();
    let mut e_stable: f64 = 0.0;
    for u in [0.25, 1.0, 4.0] {
        e_stable = e_stable.max((stable_density.laplace_exponent(u)? - u.sqrt()).abs());
    }
    Ok((e_gamma <= 1e-8 && e_stable <= 1e-6, format!("gamma err {e_gamma:.2e}, stable err {e_stable:.2e}")))
}

fn c2_laplace_mc(seed: u64) -> Outcome {
    let mut reports = Vec::new();
    for (k, (_, triple)) in families().into_iter().enumerate() {
        let s = sampler(&triple);
        for (j, t) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            let rng = RngState::new(seed, (4 * k + j) as u64);
            reports.push(mc_laplace_check(&triple, &s, t, &[0.5, 1.0, 2.0], 100_000, rng)?);
        }
    }
    Ok(all_passed(&reports))
}

fn c3_qn(seed: u64) -> Outcome {
    let triple = gamma();
    let s = sampler(&triple);
    let mut reports = Vec::new();
    for n in [1, 4, 16, 64] {
        reports.push(qn_check(&triple, &s, n, 100_000, RngState::new(seed, n))?);
    }
    Ok(all_passed(&reports))
}

fn c4_kn_limit() -> Outcome {
    let z_grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let n_list = [16, 64, 256, 1024, 4096];
    let sups: Vec<f64> = n_list.iter().map(|&n| kn_pgf_sup_difference(1.0, 1.0, n, &z_grid)).collect();
    let nonincreasing = sups.windows(2).all(|w| w[1] <= w[0]);
    let last = *sups.last().unwrap();
    let report = kn_pgf_limit_check(1.0, 1.0, &n_list, &z_grid)?;
    let series: Vec<String> = n_list.iter().zip(&sups).map(|(n, s)| format!("{n}:{s:.3e}")).collect();
    Ok((nonincreasing && last <= 1e-3 && report.passed, series.join(" ")))
}

fn gamma_paths(seed: u64) -> Result<Vec<SubordinatedPoissonPath>> {
    simulate_subordinated(&sampler(&gamma()), 2.0, 2.0 / 4096.0, 10_000, RngState::new(seed, 0))
}

fn c5_poissonness(paths: &[SubordinatedPoissonPath]) -> Outcome {
    let r = jump_count_poisson_test(paths, gamma().leading_rate()?, 2.0)?;
    Ok((r.passed, r.summary_line()))
}

fn c6_jump_law(paths: &[SubordinatedPoissonPath], seed: u64) -> Outcome {
    let gamma_jumps = collect_jump_sizes(paths);
    let atom = LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 1.0)]).unwrap())?;
    let atom_paths = simulate_subordinated(&sampler(&atom), 2.0, 2.0 / 4096.0, 10_000, RngState::new(seed, 1))?;
    let atom_jumps = collect_jump_sizes(&atom_paths);
    let enough = gamma_jumps.len() >= 10_000 && atom_jumps.len() >= 10_000;
    let reports = [jump_law_test(&atom_jumps, &atom)?, jump_law_test(&gamma_jumps, &gamma())?];
    let (ok, detail) = all_passed(&reports);
    Ok((ok && enough, format!("{} atom jumps, {} gamma jumps; {detail}", atom_jumps.len(), gamma_jumps.len())))
}

fn c7_jump_pgf(paths: &[SubordinatedPoissonPath]) -> Outcome {
    let z_grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let r = jump_pgf_identity_check(&collect_jump_sizes(paths), &gamma(), &z_grid)?;
    Ok((r.passed, r.summary_line()))
}

fn c8_killing(seed: u64) -> Outcome {
    let alpha = 2f64.ln();
    let pure = LevyTriple::new(alpha, 0.0, None)?;
    let killed_gamma = LevyTriple::new(alpha, 0.0, Some(LevyMeasure::gamma(1.0, 1.0)?))?;
    let mut reports = vec![
        kill_probability_check(&sampler(&pure), 1.0, 100_000, RngState::new(seed, 0))?,
        kill_probability_check(&sampler(&killed_gamma), 1.0, 100_000, RngState::new(seed, 1))?,
    ];
    for (j, t) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let rng = RngState::new(seed, 2 + j as u64);
        reports.push(mc_laplace_check(&killed_gamma, &sampler(&killed_gamma), t, &[0.5, 1.0, 2.0], 100_000, rng)?);
    }
    let reference_ok = reports[..2].iter().all(|r| (r.reference - 0.5).abs() < 1e-15);
    let (ok, detail) = all_passed(&reports);
    Ok((ok && reference_ok, detail))
}

fn c9_s_jump(seed: u64) -> Outcome {
    let triple = LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 1.0), (2.0, 1.0)]).unwrap())?;
    let law = triple.s_jump_law()?;
    let probs: Vec<f64> = match &law.continuous {
        SJumpContinuous::Atoms(a) => a.iter().map(|a| a.mass).collect(),
        _ => unreachable!(),
    };
    let (w1, w2) = (-(-1f64).exp_m1(), -(-2f64).exp_m1());
    let law_ok = (probs[0] - w1 / (w1 + w2)).abs() < 1e-12 && (probs[1] - w2 / (w1 + w2)).abs() < 1e-12;
    let r = s_jump_conditional_check(&triple, 100_000, RngState::new(seed, 0))?;
    Ok((r.passed && law_ok, r.summary_line()))
}

fn c10_discretization_exactness(seed: u64) -> Outcome {
    let triples = [
        LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 2.0)]).unwrap())?,
        LevyTriple::strict(0.0, LevyMeasure::atomic([(0.4, 3.0), (3.0, 0.5)]).unwrap())?,
        LevyTriple::strict(0.5, LevyMeasure::atomic([(0.3, 4.0)]).unwrap())?,
    ];
    let (mut checked, mut resolved, mut violations) = (0, 0, 0);
    for (k, triple) in triples.iter().enumerate() {
        let paths = simulate_subordinated(&sampler(triple), 1.0, 1.0 / 4096.0, 1000, RngState::new(seed, k as u64))?;
        for p in &paths {
            checked += 1;
            let jumps = extract_jumps(p);
            let sizes: Vec<u64> = jumps.iter().map(|j| j.size).collect();
            let zeta = p.min_gap();
            let mut any = false;
            for n in (0..=12).map(|e| 1u64 << e).filter(|&n| 1.0 / (n as f64) < zeta) {
                any = true;
                let d = discretize(p, n)?;
                if d.k_n as usize != jumps.len() || d.interval_jumps != sizes {
                    violations += 1;
                }
            }
            resolved += any as usize;
        }
    }
    Ok((violations == 0, format!("{checked} paths, {resolved} resolved on the grid, {violations} violations")))
}

fn run_verify_all(config: &Path, out: &Path) -> std::result::Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_subord"))
        .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "csv", "verify-all"])
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.code() != Some(0) {
        return Err(format!("exit {:?}", status.status.code()));
    }
    Ok(())
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect()
}

fn c11_determinism() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["gamma.toml", "two_atoms.toml"] {
        let (a, b) = (tempfile::tempdir()?, tempfile::tempdir()?);
        for d in [a.path(), b.path()] {
            if let Err(e) = run_verify_all(&configs.join(name), d) {
                ok = false;
                details.push(format!("{name}: {e}"));
            }
        }
        let (ca, cb) = (dir_contents(a.path()), dir_contents(b.path()));
        let same = !ca.is_empty() && ca == cb;
        ok &= same;
        details.push(format!("{name}: {} files {}", ca.len(), if same { "identical" } else { "differ" }));
    }
    Ok((ok, details.join(", ")))
}

/// Pass counts per check over seeded reruns at reduced sizes.
fn c12_calibration() -> Outcome {
    const RERUNS: u64 = 100;
    let mut passes: BTreeMap<String, u64> = BTreeMap::new();
    let mut tally = |family: &str, r: VerificationReport| {
        *passes.entry(format!("{family}/{}", r.check_name)).or_insert(0) += r.passed as u64;
    };
    let z_grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let killed = LevyTriple::new(2f64.ln(), 0.0, Some(LevyMeasure::gamma(1.0, 1.0)?))?;
    let two_atoms = LevyTriple::strict(0.0, LevyMeasure::atomic([(1.0, 1.0), (2.0, 1.0)]).unwrap())?;
    for seed in 0..RERUNS {
        let base = RngState::new(0xca11_0000 + seed, 0);
        for (k, (family, triple)) in families().into_iter().enumerate() {
            let s = sampler(&triple);
            let rng = base.with_stream(k as u64);
            tally(family, mc_laplace_check(&triple, &s, 1.0, &[0.5, 1.0, 2.0], 4000, rng.fork(1))?);
            tally(family, qn_check(&triple, &s, 4, 4000, rng.fork(2))?);
            let paths = simulate_subordinated(&s, 1.0, 1.0 / 256.0, 2000, rng.fork(3))?;
            let jumps = collect_jump_sizes(&paths);
            tally(family, jump_count_poisson_test(&paths, triple.leading_rate()?, 1.0)?);
            tally(family, jump_law_test(&jumps, &triple)?);
            tally(family, jump_pgf_identity_check(&jumps, &triple, &z_grid)?);
        }
        let s = sampler(&killed);
        tally("killed", kill_probability_check(&s, 1.0, 4000, base.with_stream(10))?);
        tally("killed", mc_laplace_check(&killed, &s, 1.0, &[0.5, 1.0, 2.0], 4000, base.with_stream(11))?);
        tally("two_atoms", s_jump_conditional_check(&two_atoms, 5000, base.with_stream(12))?);
    }
    let weakest = passes.iter().min_by_key(|(_, &v)| v).map(|(k, &v)| (k.clone(), v)).unwrap();
    let calibrated = passes.values().all(|&v| v >= 99);

    let g = gamma();
    let wrong = |u: f64| Ok(1.1 * g.laplace_exponent(u)?);
    let s = sampler(&g);
    let mut detected = 0;
    for seed in 0..RERUNS {
        let rng = RngState::new(0x0b0e_0000 + seed, 0);
        let (r, _) = subordinators::verify::mc_laplace_check_against(&s, 1.0, &[1.0], 100_000, rng, wrong)?;
        detected += !r.passed as u64;
    }
    Ok((
        calibrated && detected == RERUNS,
        format!(
            "{} checks, weakest {} at {}/{RERUNS}; inflated exponent rejected {detected}/{RERUNS}",
            passes.len(),
            weakest.0,
            weakest.1
        ),
    ))
}

fn main() {
    let seed = 20_241_014;
    let started = Instant::now();
    let shared = gamma_paths(seed + 5).expect("gamma paths");
    let criteria: Vec<Criterion> = vec![
        ("laplace exponent quadrature oracles", Box::new(c1_quadrature_oracles)),
        ("Monte Carlo Laplace transform, four families", Box::new(move || c2_laplace_mc(seed + 2))),
        ("q_n = exp(-psi/n), gamma", Box::new(move || c3_qn(seed + 3))),
        ("binomial to Poisson PGF limit", Box::new(c4_kn_limit)),
        ("K(t) is Poisson(t psi), gamma", Box::new(|| c5_poissonness(&shared))),
        ("jump size law, single atom and gamma", Box::new(|| c6_jump_law(&shared, seed + 6))),
        ("jump PGF identity, gamma", Box::new(|| c7_jump_pgf(&shared))),
        ("killed subordinator", Box::new(move || c8_killing(seed + 8))),
        ("S-jump conditional law, two atoms", Box::new(move || c9_s_jump(seed + 9))),
        ("discretization exactness past min gap", Box::new(move || c10_discretization_exactness(seed + 10))),
        ("verify-all determinism", Box::new(c11_determinism)),
        ("calibration and power", Box::new(c12_calibration)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failures += !passed as usize;
        println!(
            "{} [{:>2}] {name} ({:.1}s): {detail}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} criteria passed, seed {seed}, {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
