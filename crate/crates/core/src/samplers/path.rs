use std::io::Write;

use crate::error::{domain, Result};

/// Grid-index slack for floating-point grid arithmetic.
pub(crate) const GRID_SLACK: f64 = 1e-9;

/// Number of grid cells of width `step` covering `[0, horizon]`; the last
/// cell may be shorter.
pub(crate) fn cell_count(horizon: f64, step: f64) -> usize {
    ((horizon / step) - GRID_SLACK).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathRepr {
    /// Drift plus explicit jumps at increasing times in `(0, horizon]`.
    JumpList { times: Vec<f64>, sizes: Vec<f64>, drift: f64 },
    /// Increments over cells `((i-1)·step, min(i·step, horizon)]`, realized
    /// at the right endpoint of each cell.
    GridIncrements { step: f64, increments: Vec<f64> },
}

/// One trajectory of a subordinator on `[0, horizon]`, possibly killed.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorPath {
    horizon: f64,
    repr: PathRepr,
    cumulative: Vec<f64>,
    kill_time: Option<f64>,
}

fn prefix_sums(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for x in xs {
        acc += x;
        out.push(acc);
    }
    out
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return domain(format!("horizon must be positive and finite, got {horizon}"));
    }
    Ok(())
}

impl SubordinatorPath {
    pub fn jump_list(horizon: f64, times: Vec<f64>, sizes: Vec<f64>, drift: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if times.len() != sizes.len() {
            return domain("jump times and sizes differ in length");
        }
        if !(drift >= 0.0 && drift.is_finite()) {
            return domain(format!("drift must be >= 0, got {drift}"));
        }
        let mut prev = 0.0;
        for (&t, &s) in times.iter().zip(&sizes) {
            if !(t > prev && t <= horizon) {
                return domain(format!("jump time {t} out of order or outside (0, {horizon}]"));
            }
            if !(s > 0.0 && s.is_finite()) {
                return domain(format!("jump size {s} must be positive"));
            }
            prev = t;
        }
        let cumulative = prefix_sums(&sizes);
        Ok(Self { horizon, repr: PathRepr::JumpList { times, sizes, drift }, cumulative, kill_time: None })
    }

    pub fn grid(horizon: f64, step: f64, increments: Vec<f64>) -> Result<Self> {
        check_horizon(horizon)?;
        if !(step > 0.0) {
            return domain(format!("grid step must be positive, got {step}"));
        }
        let cells = cell_count(horizon, step);
        if increments.len() != cells {
            return domain(format!("expected {cells} grid increments, got {}", increments.len()));
        }
        if let Some(bad) = increments.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return domain(format!("grid increment {bad} must be finite and >= 0"));
        }
        let cumulative = prefix_sums(&increments);
        Ok(Self {
            horizon,
            repr: PathRepr::GridIncrements { step, increments },
            cumulative,
            kill_time: None,
        })
    }

    pub(crate) fn with_kill_time(mut self, kill_time: f64) -> Self {
        self.kill_time = Some(kill_time);
        self
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn repr(&self) -> &PathRepr {
        &self.repr
    }

    pub fn kill_time(&self) -> Option<f64> {
        self.kill_time
    }

    /// True when the path is sent to `+∞` within `[0, horizon]`.
    pub fn is_killed(&self) -> bool {
        self.kill_time.is_some_and(|k| k <= self.horizon)
    }

    /// Right-continuous value `S(s)` for `s` in `[0, horizon]`; `+∞` from the
    /// kill time on.
    pub fn evaluate(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0 && s <= self.horizon * (1.0 + 1e-12)) {
            return domain(format!("evaluation time {s} outside [0, {}]", self.horizon));
        }
        if self.kill_time.is_some_and(|k| s >= k) {
            return Ok(f64::INFINITY);
        }
        Ok(self.finite_value(s))
    }

    fn finite_value(&self, s: f64) -> f64 {
        match &self.repr {
            PathRepr::JumpList { times, drift, .. } => {
                let k = times.partition_point(|&t| t <= s);
                drift * s + self.cumulative[k]
            }
            PathRepr::GridIncrements { step, increments } => {
                let k = if s >= self.horizon {
                    increments.len()
                } else {
                    ((s / step + GRID_SLACK).floor() as usize).min(increments.len())
                };
                self.cumulative[k]
            }
        }
    }

    /// Values at the grid points `min(i·step, horizon)`, `i = 0..=cells`;
    /// `+∞` from the kill time on.
    pub fn values_on_grid(&self, step: f64) -> Result<Vec<f64>> {
        if !(step > 0.0) {
            return domain(format!("grid step must be positive, got {step}"));
        }
        let cells = cell_count(self.horizon, step);
        let point = |i: usize| if i == cells { self.horizon } else { i as f64 * step };
        let mut out = Vec::with_capacity(cells + 1);
        match &self.repr {
            PathRepr::JumpList { times, drift, .. } => {
                let mut k = 0;
                for i in 0..=cells {
                    let s = point(i);
                    while k < times.len() && times[k] <= s * (1.0 + 1e-15) {
                        k += 1;
                    }
                    out.push(drift * s + self.cumulative[k]);
                }
            }
            PathRepr::GridIncrements { .. } => {
                for i in 0..=cells {
                    out.push(self.finite_value(point(i)));
                }
            }
        }
        if let Some(k) = self.kill_time {
            for (i, v) in out.iter_mut().enumerate() {
                if point(i) >= k {
                    *v = f64::INFINITY;
                }
            }
        }
        Ok(out)
    }

    /// Writes the path as CSV: a `#` provenance line, then `time,value` for
    /// grid paths or `tau,jump` for jump lists.
    pub fn write_csv<W: Write>(&self, mut w: W, provenance: &str) -> Result<()> {
        let kill = self.kill_time.map_or("none".to_string(), |k| k.to_string());
        match &self.repr {
            PathRepr::GridIncrements { step, .. } => {
                writeln!(w, "# {provenance},horizon={},kill_time={kill}", self.horizon)?;
                writeln!(w, "time,value")?;
                let cells = cell_count(self.horizon, *step);
                for i in 0..=cells {
                    let s = if i == cells { self.horizon } else { i as f64 * step };
                    let v = self.evaluate(s)?;
                    writeln!(w, "{s},{}", fmt_value(v))?;
                }
            }
            PathRepr::JumpList { times, sizes, drift } => {
                writeln!(
                    w,
                    "# {provenance},horizon={},drift={drift},kill_time={kill}",
                    self.horizon
                )?;
                writeln!(w, "tau,jump")?;
                for (t, s) in times.iter().zip(sizes) {
                    writeln!(w, "{t},{s}")?;
                }
            }
        }
        Ok(())
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        v.to_string()
    }
}
