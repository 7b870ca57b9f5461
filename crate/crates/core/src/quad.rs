//! Adaptive Gauss-Kronrod quadrature, plus a half-line integrator that works
//! in the variable `y = ln x` so that integrands with a power singularity at
//! the origin or a power-law tail become exponentially decaying.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10, 1e-8)
    }
}

/// An integral value together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kron.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, node) in XGK.iter().take(7).enumerate() {
        let dx = half * node;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kron * half;
    let abs_int = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_int > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_int);
    }
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Numerical {
            message: format!("non-finite integrand on [{a}, {b}]"),
            residual: f64::INFINITY,
        });
    }
    Ok(Segment { a, b, value, error })
}

/// Globally adaptive integration over the union of consecutive intervals
/// defined by `breakpoints` (at least two, increasing).
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if breakpoints.len() < 2 {
        return Err(Error::Domain("need at least two breakpoints".into()));
    }
    let mut segments = Vec::with_capacity(breakpoints.len() * 2);
    for w in breakpoints.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain(format!("breakpoints not increasing: {} {}", w[0], w[1])));
        }
        segments.push(kronrod15(&f, w[0], w[1])?);
    }
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= tol.target(value) {
            return Ok(Estimate { value, error });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::Numerical {
                message: "adaptive quadrature hit the subdivision limit".into(),
                residual: error,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("nonempty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            return Err(Error::Numerical {
                message: "interval cannot be bisected further".into(),
                residual: error,
            });
        }
        segments.push(kronrod15(&f, seg.a, mid)?);
        segments.push(kronrod15(&f, mid, seg.b)?);
    }
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    integrate_pieces(f, &[a, b], tol)
}

/// Working range in `y = ln x`. Outside it `x` under/overflows.
const Y_MIN: f64 = -700.0;
const Y_MAX: f64 = 700.0;
/// Initial piece length in `y`.
const Y_PIECE: f64 = 8.0;

/// Integral beyond the open end of a log-space integrand, extrapolating
/// its local exponential rate. `h1`, `h2` are the values one and two units
/// inside the range. Returns the value and an error estimate from the
/// disagreement of the two rate estimates.
fn exponential_tail(h0: f64, h1: f64, h2: f64, side: &str) -> Result<(f64, f64)> {
    if h0 == 0.0 {
        return Ok((0.0, 0.0));
    }
    if !(h0 > 0.0 && h1 > 0.0 && h2 > 0.0) {
        return Err(Error::Numerical {
            message: format!("integrand changes sign near the {side} end"),
            residual: h0.abs(),
        });
    }
    let near = (h1 / h0).ln();
    let far = (h2 / h1).ln();
    if !(near > 1e-9) {
        return Err(Error::Numerical {
            message: format!("integral diverges at the {side} end"),
            residual: f64::INFINITY,
        });
    }
    let value = h0 / near;
    let alt = if far > 1e-9 { h0 / far } else { f64::INFINITY };
    Ok((value, (alt - value).abs() + 1e-15 * value))
}

/// `∫_lo^hi g(x) dx` for `0 <= lo < hi <= ∞`, using `x = e^y` throughout.
/// `cut` (inside `(lo, hi)` or ignored) is an extra breakpoint.
///
/// The integrand beyond `x = e^{±700}` is accounted for by extrapolating its
/// exponential rate in `y`; a non-decaying rate there is reported as
/// divergence.
pub fn integrate_positive_axis<F: Fn(f64) -> f64>(
    g: F,
    lo: f64,
    hi: f64,
    cut: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    if !(lo >= 0.0) || !(hi > lo) {
        return Err(Error::Domain(format!("bad half-line range ({lo}, {hi})")));
    }
    let h = |y: f64| {
        let x = y.exp();
        let v = g(x);
        if v == 0.0 {
            0.0
        } else {
            v * x
        }
    };
    let y_lo = if lo > 0.0 { lo.ln().max(Y_MIN) } else { Y_MIN };
    let y_hi = if hi.is_finite() { hi.ln().min(Y_MAX) } else { Y_MAX };
    if !(y_hi > y_lo) {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut marks = vec![y_lo, y_hi];
    if cut > lo && cut < hi {
        marks.push(cut.ln());
    }
    marks.push(0.0f64.clamp(y_lo, y_hi));
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let mut breakpoints = vec![marks[0]];
    for w in marks.windows(2) {
        let pieces = ((w[1] - w[0]) / Y_PIECE).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            breakpoints.push(w[0] + (w[1] - w[0]) * k as f64 / pieces as f64);
        }
        *breakpoints.last_mut().unwrap() = w[1];
    }
    breakpoints.dedup();
    let body = integrate_pieces(h, &breakpoints, tol)?;
    let mut value = body.value;
    let mut error = body.error;
    if lo == 0.0 {
        let (t, e) = exponential_tail(h(Y_MIN), h(Y_MIN + 1.0), h(Y_MIN + 2.0), "lower")?;
        value += t;
        error += e;
    }
    if hi == f64::INFINITY {
        let (t, e) = exponential_tail(h(Y_MAX), h(Y_MAX - 1.0), h(Y_MAX - 2.0), "upper")?;
        value += t;
        error += e;
    }
    Ok(Estimate { value, error })
}
