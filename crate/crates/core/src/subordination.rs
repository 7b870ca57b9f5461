//! The time-changed Poisson process `Π(S(·))` on a grid, its jump records,
//! and the coarse-interval discretization used to count its jumps.
//!
//! When `S` is a jump list (drift plus finitely many jumps) the composition
//! is exact: drift crosses Poisson points one at a time at rate `β`, and a
//! jump of size `x` crosses Poisson(`x`) of them at once. Jump records then
//! carry exact times. For grid paths a record is one grid cell.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rng::RngState;
use crate::samplers::{cell_count, PathRepr, SubordinatorPath, GRID_SLACK};
use crate::variates::poisson_variate;

/// A jump of `Π(S(·))` and its size. `tau` is the exact jump time for
/// jump-list subordinators and the right endpoint of the grid cell
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpRecord {
    pub tau: f64,
    pub size: u64,
}

/// `Π(S(·))` observed at the grid points `min(i·grid_step, horizon)`.
///
/// Stored sparsely: only the grid cells where the count increases.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatedPoissonPath {
    horizon: f64,
    grid_step: f64,
    cells: usize,
    jump_cells: Vec<usize>,
    cumulative: Vec<u64>,
    jumps: Vec<JumpRecord>,
    exact_times: bool,
}

impl SubordinatedPoissonPath {
    /// Builds the path from grid counts (`counts[0] == 0`, nondecreasing).
    pub fn from_counts(horizon: f64, grid_step: f64, counts: Vec<u64>) -> Result<Self> {
        if !(horizon > 0.0) || !(grid_step > 0.0) {
            return domain("horizon and grid step must be positive");
        }
        let cells = cell_count(horizon, grid_step);
        if counts.len() != cells + 1 {
            return domain(format!(
                "expected {} counts for horizon {horizon} and step {grid_step}, got {}",
                cells + 1,
                counts.len()
            ));
        }
        if counts[0] != 0 {
            return domain("counts must start at 0");
        }
        if counts.windows(2).any(|w| w[1] < w[0]) {
            return domain("counts must be nondecreasing");
        }
        let increments = counts
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(i, w)| (i + 1, w[1] - w[0]));
        Ok(Self::from_increments(horizon, grid_step, cells, increments))
    }

    fn empty(horizon: f64, grid_step: f64, cells: usize, exact_times: bool) -> Self {
        Self {
            horizon,
            grid_step,
            cells,
            jump_cells: Vec::new(),
            cumulative: vec![0],
            jumps: Vec::new(),
            exact_times,
        }
    }

    fn push(&mut self, cell: usize, record: JumpRecord) {
        let acc = self.final_count().saturating_add(record.size);
        self.jump_cells.push(cell);
        self.cumulative.push(acc);
        self.jumps.push(record);
    }

    fn from_increments<I: IntoIterator<Item = (usize, u64)>>(
        horizon: f64,
        grid_step: f64,
        cells: usize,
        increments: I,
    ) -> Self {
        let mut path = Self::empty(horizon, grid_step, cells, false);
        for (cell, size) in increments {
            let tau = path.grid_time(cell);
            path.push(cell, JumpRecord { tau, size });
        }
        path
    }

    /// Grid cell `i` with `tau ∈ ((i-1)·step, i·step]`.
    fn cell_of(&self, tau: f64) -> usize {
        let mut i = (tau / self.grid_step).ceil() as usize;
        if i > 1 && tau <= (i - 1) as f64 * self.grid_step * (1.0 + 1e-15) {
            i -= 1;
        }
        i.clamp(1, self.cells)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    /// Number of grid cells; counts are indexed `0..=cells`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// `Π(S(·))` at grid point `i`.
    pub fn count_at(&self, i: usize) -> u64 {
        self.cumulative[self.jump_cells.partition_point(|&c| c <= i)]
    }

    /// All grid counts `N_0 = 0, N_1, …, N_cells`.
    pub fn counts(&self) -> Vec<u64> {
        (0..=self.cells).map(|i| self.count_at(i)).collect()
    }

    pub fn jumps(&self) -> &[JumpRecord] {
        &self.jumps
    }

    pub fn final_count(&self) -> u64 {
        *self.cumulative.last().expect("starts with 0")
    }

    fn grid_time(&self, i: usize) -> f64 {
        if i == self.cells {
            self.horizon
        } else {
            i as f64 * self.grid_step
        }
    }

    /// Number of grid cells per interval of length `1/n`, if integral.
    fn cells_per_interval(&self, n: u64) -> Result<usize> {
        if n == 0 {
            return domain("discretization level n must be positive");
        }
        let ratio = 1.0 / (n as f64 * self.grid_step);
        let r = ratio.round();
        if r < 1.0 || (ratio - r).abs() > 1e-6 * r {
            return domain(format!(
                "1/n = {} is not a whole number of grid steps ({})",
                1.0 / n as f64,
                self.grid_step
            ));
        }
        Ok(r as usize)
    }

    /// `Π(S(1/n))`.
    pub fn count_at_level(&self, n: u64) -> Result<u64> {
        let r = self.cells_per_interval(n)?;
        if r > self.cells {
            return domain(format!("horizon {} shorter than 1/{n}", self.horizon));
        }
        Ok(self.count_at(r))
    }

    /// Smallest spacing `ζ` among jump times and the boundaries.
    ///
    /// A grid record is only known to lie in its cell, so for grid paths the
    /// gap to the right boundary is measured from the cell's left edge; the
    /// other gaps use the right endpoints. With this convention, `1/n < ζ`
    /// implies that the level-`n` discretization resolves every record.
    pub fn min_gap(&self) -> f64 {
        let (Some(&last_cell), Some(last)) = (self.jump_cells.last(), self.jumps.last()) else {
            return self.horizon;
        };
        let mut gap = self.jumps[0].tau;
        for w in self.jumps.windows(2) {
            gap = gap.min(w[1].tau - w[0].tau);
        }
        let last_left = if self.exact_times { last.tau } else { (last_cell - 1) as f64 * self.grid_step };
        gap.min(self.horizon - last_left)
    }
}

/// Fork label of the Poisson clock inside one replica.
pub const POISSON_LANE: u64 = 0x5011;

/// Composes an independent standard Poisson process with `s_path`, with
/// counts observed on the grid `grid_step`. Jump lists are composed
/// exactly; for grid paths the count increments are Poisson with mean
/// equal to the increments of `S` between grid points.
pub fn subordinate_poisson_on_grid(
    s_path: &SubordinatorPath,
    grid_step: f64,
    rng: RngState,
) -> Result<SubordinatedPoissonPath> {
    if s_path.is_killed() {
        return Err(Error::Unsupported("killed paths cannot be subordinated".into()));
    }
    if !(grid_step > 0.0) {
        return domain(format!("grid step must be positive, got {grid_step}"));
    }
    if let PathRepr::JumpList { times, sizes, drift } = s_path.repr() {
        return Ok(subordinate_jump_list(s_path.horizon(), grid_step, times, sizes, *drift, rng));
    }
    let values = s_path.values_on_grid(grid_step)?;
    let mut g = rng.generator();
    let mut increments = Vec::new();
    for (i, w) in values.windows(2).enumerate() {
        let delta = w[1] - w[0];
        if delta > 0.0 {
            let k = poisson_variate(delta, &mut g);
            if k > 0 {
                increments.push((i + 1, k));
            }
        }
    }
    Ok(SubordinatedPoissonPath::from_increments(
        s_path.horizon(),
        grid_step,
        values.len() - 1,
        increments,
    ))
}

fn subordinate_jump_list(
    horizon: f64,
    grid_step: f64,
    times: &[f64],
    sizes: &[f64],
    drift: f64,
    rng: RngState,
) -> SubordinatedPoissonPath {
    let mut g = rng.generator();
    let mut events: Vec<JumpRecord> = Vec::new();
    for (&tau, &x) in times.iter().zip(sizes) {
        let size = poisson_variate(x, &mut g);
        if size > 0 {
            events.push(JumpRecord { tau, size });
        }
    }
    if drift > 0.0 {
        let mut tau = g.exp1() / drift;
        while tau <= horizon {
            events.push(JumpRecord { tau, size: 1 });
            tau += g.exp1() / drift;
        }
    }
    events.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    let mut path = SubordinatedPoissonPath::empty(horizon, grid_step, cell_count(horizon, grid_step), true);
    for e in events {
        path.push(path.cell_of(e.tau), e);
    }
    path
}

/// [`subordinate_poisson_on_grid`] on the path's own grid (for grid paths)
/// or on `horizon / 4096` (for jump lists).
pub fn subordinate_poisson(s_path: &SubordinatorPath, rng: RngState) -> Result<SubordinatedPoissonPath> {
    let step = match s_path.repr() {
        PathRepr::GridIncrements { step, .. } => *step,
        PathRepr::JumpList { .. } => {
            s_path.horizon() / crate::samplers::DEFAULT_GRID_CELLS as f64
        }
    };
    subordinate_poisson_on_grid(s_path, step, rng)
}

/// The jump records of `path`, in time order.
pub fn extract_jumps(path: &SubordinatedPoissonPath) -> Vec<JumpRecord> {
    path.jumps.clone()
}

/// Level-`n` discretization of one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizationReport {
    pub n: u64,
    /// `I_{n,i}` for the `⌊n·t⌋` full intervals.
    pub indicators: Vec<bool>,
    pub k_n: u64,
    /// Count increments on the intervals with a jump.
    pub interval_jumps: Vec<u64>,
    pub min_gap: f64,
}

#[derive(Serialize)]
struct DiscretizationSummary<'a> {
    n: u64,
    #[serde(rename = "K_n")]
    k_n: u64,
    indicator_density: f64,
    interval_jumps_histogram: &'a BTreeMap<u64, u64>,
}

impl DiscretizationReport {
    pub fn indicator_density(&self) -> f64 {
        if self.indicators.is_empty() {
            0.0
        } else {
            self.k_n as f64 / self.indicators.len() as f64
        }
    }

    pub fn interval_jumps_histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for &j in &self.interval_jumps {
            *h.entry(j).or_insert(0) += 1;
        }
        h
    }

    /// `{n, K_n, indicator_density, interval_jumps_histogram}`.
    pub fn to_json(&self) -> Result<String> {
        let hist = self.interval_jumps_histogram();
        Ok(serde_json::to_string(&DiscretizationSummary {
            n: self.n,
            k_n: self.k_n,
            indicator_density: self.indicator_density(),
            interval_jumps_histogram: &hist,
        })?)
    }
}

/// Indicators, `K_n` and interval jumps over `[(i-1)/n, i/n]`,
/// `i = 1..⌊n·t⌋`; the trailing shorter interval is left out.
pub fn discretize(path: &SubordinatedPoissonPath, n: u64) -> Result<DiscretizationReport> {
    let r = path.cells_per_interval(n)?;
    let full = ((n as f64) * path.horizon + GRID_SLACK).floor() as usize;
    let mut indicators = Vec::with_capacity(full);
    let mut interval_jumps = Vec::new();
    for i in 1..=full {
        let hi = (i * r).min(path.cells);
        let lo = ((i - 1) * r).min(path.cells);
        let inc = path.count_at(hi) - path.count_at(lo);
        indicators.push(inc > 0);
        if inc > 0 {
            interval_jumps.push(inc);
        }
    }
    Ok(DiscretizationReport {
        n,
        k_n: interval_jumps.len() as u64,
        indicators,
        interval_jumps,
        min_gap: path.min_gap(),
    })
}

/// CSV series `n,K_n` for several levels of one path.
pub fn write_kn_series<W: Write>(reports: &[DiscretizationReport], mut w: W) -> Result<()> {
    writeln!(w, "n,K_n")?;
    for r in reports {
        writeln!(w, "{},{}", r.n, r.k_n)?;
    }
    Ok(())
}

/// Estimate of `E[z^{Π(S(1/n))} | Π(S(1/n)) > 0]` at one `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalPgfEstimate {
    pub z: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub conditioned: usize,
}

/// Conditional generating function of `Π(S(1/n))` given at least one jump
/// on `[0, 1/n]`, from a batch of paths.
pub fn empirical_conditional_pgf(
    paths: &[SubordinatedPoissonPath],
    n: u64,
    z_grid: &[f64],
) -> Result<Vec<ConditionalPgfEstimate>> {
    if let Some(z) = z_grid.iter().find(|z| !(0.0..=1.0).contains(*z)) {
        return domain(format!("z = {z} outside [0,1]"));
    }
    let mut hits = Vec::new();
    for p in paths {
        let c = p.count_at_level(n)?;
        if c > 0 {
            hits.push(c);
        }
    }
    if hits.is_empty() {
        return Err(Error::InsufficientData(format!("no path jumps on [0, 1/{n}]")));
    }
    let m = hits.len() as f64;
    Ok(z_grid
        .iter()
        .map(|&z| {
            let vals: Vec<f64> = hits.iter().map(|&c| z.powi(c.min(i32::MAX as u64) as i32)).collect();
            let mean = vals.iter().sum::<f64>() / m;
            let var = if hits.len() > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            ConditionalPgfEstimate { z, estimate: mean, stderr: (var / m).sqrt(), conditioned: hits.len() }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(counts: Vec<u64>) -> SubordinatedPoissonPath {
        let cells = counts.len() - 1;
        SubordinatedPoissonPath::from_counts(1.0, 1.0 / cells as f64, counts).unwrap()
    }

    #[test]
    fn extract_records_from_counts() {
        let p = path(vec![0, 0, 3, 3, 4]);
        assert_eq!(
            p.jumps(),
            &[JumpRecord { tau: 0.5, size: 3 }, JumpRecord { tau: 1.0, size: 1 }]
        );
        assert_eq!(p.jumps().iter().map(|j| j.size).sum::<u64>(), p.final_count());
        assert!(extract_jumps(&path(vec![0, 0, 0])).is_empty());
    }

    #[test]
    fn drift_jumps_stay_unit_on_coarse_grid() {
        let s = SubordinatorPath::jump_list(10.0, vec![2.5], vec![3.0], 20.0).unwrap();
        let p = subordinate_poisson_on_grid(&s, 1.0, RngState::new(1, 0)).unwrap();
        let units = p.jumps().iter().filter(|j| j.tau != 2.5).collect::<Vec<_>>();
        assert!(units.len() > 100);
        assert!(units.iter().all(|j| j.size == 1));
        assert!(p.jumps().windows(2).all(|w| w[0].tau < w[1].tau));
        let counts = p.counts();
        assert_eq!(counts.len(), 11);
        assert_eq!(counts[10], p.final_count());
        let in_first: u64 = p.jumps().iter().filter(|j| j.tau <= 1.0).map(|j| j.size).sum();
        assert_eq!(counts[1], in_first);
    }

    #[test]
    fn rejects_decreasing_counts() {
        assert!(SubordinatedPoissonPath::from_counts(1.0, 0.5, vec![0, 2, 1]).is_err());
        assert!(SubordinatedPoissonPath::from_counts(1.0, 0.5, vec![1, 2, 3]).is_err());
    }

    #[test]
    fn discretize_levels() {
        let p = path(vec![0, 1, 1, 1, 3]);
        let fine = discretize(&p, 4).unwrap();
        assert_eq!(fine.k_n, 2);
        assert_eq!(fine.interval_jumps, vec![1, 2]);
        let coarse = discretize(&p, 1).unwrap();
        assert_eq!(coarse.k_n, 1);
        assert_eq!(coarse.interval_jumps, vec![3]);
        assert!(discretize(&p, 3).is_err());
        assert!(discretize(&p, 8).is_err());
        let empty = discretize(&path(vec![0; 5]), 2).unwrap();
        assert_eq!(empty.k_n, 0);
        assert!(empty.indicators.iter().all(|b| !b));
    }

    #[test]
    fn trailing_interval_is_ignored() {
        // horizon 1.25 on quarter steps, level n = 1 sees only [0,1]
        let p = SubordinatedPoissonPath::from_counts(1.25, 0.25, vec![0, 0, 0, 0, 0, 2]).unwrap();
        let r = discretize(&p, 1).unwrap();
        assert_eq!(r.indicators.len(), 1);
        assert_eq!(r.k_n, 0);
        assert_eq!(p.jumps().len(), 1);
    }

    #[test]
    fn min_gap_convention() {
        let p = path(vec![0, 0, 3, 3, 4]);
        // records at 0.5 and 1.0; last cell starts at 0.75
        assert!((p.min_gap() - 0.25).abs() < 1e-15);
        assert_eq!(path(vec![0, 0]).min_gap(), 1.0);
    }

    #[test]
    fn report_json_schema() {
        let p = path(vec![0, 1, 1, 1, 3]);
        let json = discretize(&p, 4).unwrap().to_json().unwrap();
        assert_eq!(
            json,
            r#"{"n":4,"K_n":2,"indicator_density":0.5,"interval_jumps_histogram":{"1":1,"2":1}}"#
        );
    }

    #[test]
    fn conditional_pgf_endpoints() {
        let paths = vec![path(vec![0, 2, 2, 2, 2]), path(vec![0, 0, 1, 1, 1]), path(vec![0, 1, 1, 1, 1])];
        let est = empirical_conditional_pgf(&paths, 4, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(est[0].estimate, 0.0);
        assert_eq!(est[2].estimate, 1.0);
        assert_eq!(est[1].conditioned, 2);
        assert!((est[1].estimate - (0.25 + 0.5) / 2.0).abs() < 1e-15);
        let none = vec![path(vec![0, 0, 1, 1, 1])];
        assert!(matches!(empirical_conditional_pgf(&none, 4, &[0.5]), Err(Error::InsufficientData(_))));
    }
}
