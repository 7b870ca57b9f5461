//! The `subord` command line: `laplace`, `simulate`, `convergence`, `jumps`
//! and `verify-all`, each driven by a [`RunConfig`] file.
//!
//! Exit codes: 0 when every check passes, 1 when one fails, 2 for usage,
//! configuration or runtime errors. Every output file records the seed and
//! the configuration hash.

mod config;

pub use config::{Format, RunConfig};

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::levy::LevyMeasure;
use crate::rng::RngState;
use crate::subordination::discretize;
use crate::verify::{self, VerificationReport};

#[derive(Debug, Parser)]
#[command(name = "subord", version, about = "Subordinators and subordinated Poisson processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Monte Carlo check of the Laplace transform of S(t) on `u_grid`.
    Laplace,
    /// Writes sample paths of S.
    Simulate,
    /// K_n(t) across `n_list` and the binomial-to-Poisson limit.
    Convergence,
    /// Jump-size law and jump generating function of Π(S(·)).
    Jumps,
    /// Every check applicable to the configured triple.
    VerifyAll,
}

const LAPLACE_LANE: u64 = 1;
const SIMULATE_LANE: u64 = 2;
const PATHS_LANE: u64 = 3;
const QN_LANE: u64 = 4;
const KILL_LANE: u64 = 5;
const S_JUMP_LANE: u64 = 6;

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("subord: {e}");
            2
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_toml_str(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    let ctx = Context::new(cfg)?;
    match cli.command {
        Command::Laplace => cmd_laplace(&ctx),
        Command::Simulate => cmd_simulate(&ctx),
        Command::Convergence => cmd_convergence(&ctx),
        Command::Jumps => cmd_jumps(&ctx),
        Command::VerifyAll => cmd_verify_all(&ctx),
    }
}

/// A validated config plus what every command derives from it.
pub struct Context {
    pub config: RunConfig,
    pub hash: String,
    base: RngState,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let hash = config.hash()?;
        fs::create_dir_all(&config.output_dir)?;
        let base = RngState::new(config.seed, 0);
        Ok(Self { config, hash, base })
    }

    fn provenance(&self) -> String {
        format!("family={},seed={},config_hash={}", self.config.triple.family, self.config.seed, self.hash)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.config.output_dir.join(name)
    }

    fn write_json<T: Serialize>(&self, name: &str, body: T) -> Result<()> {
        let doc = json!({
            "seed": self.config.seed,
            "config_hash": self.hash,
            "family": self.config.triple.family,
            "body": body,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    fn csv_writer(&self, name: &str) -> Result<std::io::BufWriter<fs::File>> {
        let mut w = std::io::BufWriter::new(fs::File::create(self.path(name))?);
        writeln!(w, "# {}", self.provenance())?;
        Ok(w)
    }

    fn write_summary(&self, name: &str, reports: &[VerificationReport]) -> Result<()> {
        let mut w = self.csv_writer(name)?;
        verify::write_summary_csv(reports, &mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn print_reports(reports: &[VerificationReport]) {
    for r in reports {
        println!("{}", r.summary_line());
    }
}

/// Turns a too-small-sample error into a failed report so a suite keeps
/// going.
fn or_failed(name: &str, r: Result<VerificationReport>) -> Result<VerificationReport> {
    match r {
        Err(Error::InsufficientData(msg)) => {
            let mut report = VerificationReport::new(name).detail("error", msg);
            report.passed = false;
            Ok(report)
        }
        other => other,
    }
}

fn laplace_report(ctx: &Context) -> Result<(VerificationReport, Vec<verify::LaplaceRow>)> {
    let cfg = &ctx.config;
    let sampler = cfg.sampler()?;
    let triple = sampler.triple().clone();
    let scale = cfg.psi_scale;
    let (report, rows) = verify::mc_laplace_check_against(
        &sampler,
        cfg.horizon,
        &cfg.u_grid,
        cfg.n_samples,
        ctx.base.fork(LAPLACE_LANE),
        |u| Ok(scale * triple.laplace_exponent(u)?),
    )?;
    Ok((report.detail("psi_scale", scale), rows))
}

/// Table of `(u, Ψ(u), estimate, stderr, passed)` plus the Laplace report.
pub fn cmd_laplace(ctx: &Context) -> Result<bool> {
    let (report, rows) = laplace_report(ctx)?;
    print_reports(std::slice::from_ref(&report));
    match ctx.config.format {
        Format::Json => ctx.write_json("laplace.json", &report)?,
        Format::Csv => {
            let mut w = ctx.csv_writer("laplace.csv")?;
            writeln!(w, "u,psi,reference,estimate,stderr,passed")?;
            for r in &rows {
                writeln!(w, "{},{},{},{},{},{}", r.u, r.psi, r.reference, r.estimate, r.stderr, r.passed)?;
            }
            w.flush()?;
            ctx.write_summary("laplace_summary.csv", std::slice::from_ref(&report))?;
        }
    }
    Ok(report.passed)
}

fn json_number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Writes `simulate_paths` paths of `S`, sampled on the configured grid.
pub fn cmd_simulate(ctx: &Context) -> Result<bool> {
    let cfg = &ctx.config;
    let sampler = cfg.sampler()?;
    let step = cfg.grid_step();
    let base = ctx.base.fork(SIMULATE_LANE);
    for i in 0..cfg.simulate_paths {
        let path = sampler.sample(cfg.horizon, step, base.with_stream(i as u64))?;
        let values = path.values_on_grid(step)?;
        let times: Vec<f64> = (0..values.len())
            .map(|k| if k + 1 == values.len() { cfg.horizon } else { k as f64 * step })
            .collect();
        match cfg.format {
            Format::Json => ctx.write_json(
                &format!("path_{i}.json"),
                json!({
                    "horizon": cfg.horizon,
                    "kill_time": path.kill_time().map_or(Value::Null, json_number),
                    "time": times,
                    "value": values.iter().map(|&v| json_number(v)).collect::<Vec<_>>(),
                }),
            )?,
            Format::Csv => {
                let mut w = ctx.csv_writer(&format!("path_{i}.csv"))?;
                writeln!(w, "time,value")?;
                for (t, v) in times.iter().zip(&values) {
                    if v.is_finite() {
                        writeln!(w, "{t},{v}")?;
                    } else {
                        writeln!(w, "{t},inf")?;
                    }
                }
                w.flush()?;
            }
        }
    }
    println!("wrote {} path(s) to {}", cfg.simulate_paths, cfg.output_dir.display());
    Ok(true)
}

fn subordinated_paths(ctx: &Context) -> Result<Vec<crate::SubordinatedPoissonPath>> {
    let cfg = &ctx.config;
    let sampler = cfg.sampler()?;
    if !sampler.triple().is_strict() {
        return Err(Error::Unsupported("subordination commands need kill_rate = 0".into()));
    }
    verify::simulate_subordinated(&sampler, cfg.horizon, cfg.grid_step(), cfg.n_paths, ctx.base.fork(PATHS_LANE))
}

#[derive(Debug, Serialize)]
struct ConvergenceRow {
    n: u64,
    mean_k_n: f64,
    sup_pgf_difference: f64,
    empirical_sup_difference: f64,
}

/// `(n, mean K_n, sup PGF difference)` over `n_list` on one batch of
/// paths, plus the deterministic limit check.
pub fn cmd_convergence(ctx: &Context) -> Result<bool> {
    let cfg = &ctx.config;
    let psi = cfg.levy_triple()?.leading_rate()?;
    let paths = subordinated_paths(ctx)?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let mut counts = Vec::with_capacity(paths.len());
        for p in &paths {
            let d = discretize(p, n).map_err(|e| Error::Config(format!("n = {n}: {e}")))?;
            counts.push(d.k_n);
        }
        let m = counts.len() as f64;
        let t_eff = ((n as f64) * cfg.horizon + 1e-9).floor() / n as f64;
        let empirical_sup = cfg
            .z_grid
            .iter()
            .map(|&z| {
                let mean = counts.iter().map(|&k| z.powf(k as f64)).sum::<f64>() / m;
                (mean - (-t_eff * psi * (1.0 - z)).exp()).abs()
            })
            .fold(0.0, f64::max);
        rows.push(ConvergenceRow {
            n,
            mean_k_n: counts.iter().sum::<u64>() as f64 / m,
            sup_pgf_difference: verify::kn_pgf_sup_difference(psi, cfg.horizon, n, &cfg.z_grid),
            empirical_sup_difference: empirical_sup,
        });
    }
    let mean_jumps = paths.iter().map(|p| p.jumps().len()).sum::<usize>() as f64 / paths.len() as f64;
    let report = verify::kn_pgf_limit_check(psi, cfg.horizon, &cfg.n_list, &cfg.z_grid)?;
    print_reports(std::slice::from_ref(&report));
    match cfg.format {
        Format::Json => ctx.write_json(
            "convergence.json",
            json!({ "rows": rows, "mean_jump_count": mean_jumps, "report": report }),
        )?,
        Format::Csv => {
            let mut w = ctx.csv_writer("convergence.csv")?;
            writeln!(w, "n,mean_k_n,sup_pgf_difference,empirical_sup_difference")?;
            for r in &rows {
                writeln!(w, "{},{},{},{}", r.n, r.mean_k_n, r.sup_pgf_difference, r.empirical_sup_difference)?;
            }
            w.flush()?;
            ctx.write_summary("convergence_summary.csv", std::slice::from_ref(&report))?;
        }
    }
    Ok(report.passed)
}

fn jump_reports(ctx: &Context, paths: &[crate::SubordinatedPoissonPath]) -> Result<Vec<VerificationReport>> {
    let triple = ctx.config.levy_triple()?;
    let jumps = verify::collect_jump_sizes(paths);
    Ok(vec![
        or_failed("jump_law_test", verify::jump_law_test(&jumps, &triple))?,
        or_failed("jump_pgf_identity_check", verify::jump_pgf_identity_check(&jumps, &triple, &ctx.config.z_grid))?,
    ])
}

/// Jump-size law and generating function tests on one batch of paths.
pub fn cmd_jumps(ctx: &Context) -> Result<bool> {
    let paths = subordinated_paths(ctx)?;
    let reports = jump_reports(ctx, &paths)?;
    let mut histogram = std::collections::BTreeMap::<u64, u64>::new();
    for j in verify::collect_jump_sizes(&paths) {
        *histogram.entry(j).or_default() += 1;
    }
    print_reports(&reports);
    match ctx.config.format {
        Format::Json => ctx.write_json("jumps.json", json!({ "histogram": histogram, "reports": reports }))?,
        Format::Csv => {
            ctx.write_summary("jumps.csv", &reports)?;
            let mut w = ctx.csv_writer("jump_histogram.csv")?;
            writeln!(w, "size,count")?;
            for (size, count) in &histogram {
                writeln!(w, "{size},{count}")?;
            }
            w.flush()?;
        }
    }
    Ok(reports.iter().all(|r| r.passed))
}

/// Runs every applicable check and writes `verify_all.json` (and
/// `verify_all.csv` with `--format csv`).
pub fn cmd_verify_all(ctx: &Context) -> Result<bool> {
    let reports = verify_all_reports(ctx)?;
    print_reports(&reports);
    ctx.write_json("verify_all.json", &reports)?;
    if ctx.config.format == Format::Csv {
        ctx.write_summary("verify_all.csv", &reports)?;
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn verify_all_reports(ctx: &Context) -> Result<Vec<VerificationReport>> {
    let cfg = &ctx.config;
    let triple = cfg.levy_triple()?;
    let sampler = cfg.sampler()?;
    let mut reports = vec![laplace_report(ctx)?.0];
    if !triple.is_strict() {
        reports.push(verify::kill_probability_check(
            &sampler,
            cfg.horizon,
            cfg.n_samples,
            ctx.base.fork(KILL_LANE),
        )?);
        return Ok(reports);
    }
    let psi = triple.leading_rate()?;
    for &n in &cfg.qn_list {
        let r = verify::qn_check(&triple, &sampler, n, cfg.n_samples, ctx.base.fork(QN_LANE).with_stream(n));
        reports.push(or_failed("qn_check", r)?);
    }
    reports.push(verify::kn_pgf_limit_check(psi, cfg.horizon, &cfg.n_list, &cfg.z_grid)?);
    let paths = subordinated_paths(ctx)?;
    reports.push(or_failed(
        "jump_count_poisson_test",
        verify::jump_count_poisson_test(&paths, psi, cfg.horizon),
    )?);
    reports.extend(jump_reports(ctx, &paths)?);
    match triple.measure() {
        Some(LevyMeasure::FiniteAtomic { .. }) if triple.drift() == 0.0 => {
            let r = verify::s_jump_conditional_check(&triple, cfg.n_samples, ctx.base.fork(S_JUMP_LANE));
            reports.push(or_failed("s_jump_conditional_check", r)?);
        }
        Some(LevyMeasure::Gamma { shape_rate, scale_rate }) => {
            reports.push(verify::conditional_pgf_monotonicity_check(
                *shape_rate,
                *scale_rate,
                &cfg.n_list,
                &cfg.z_grid,
            )?);
        }
        _ => {}
    }
    Ok(reports)
}

/// Reads a config file; used by the examples.
pub fn load(path: &Path) -> Result<RunConfig> {
    RunConfig::from_toml_str(&fs::read_to_string(path)?)
}
