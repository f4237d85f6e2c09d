//! Integrals of a field against `dx dy / y^2` and `dx dy / y`.
//!
//! Rows are integrated in `x` as the exact integral of the piecewise-linear
//! interpolant. In `y` the row integral `G(y)` is taken piecewise linear
//! between levels and integrated exactly against the singular weight, so a
//! field constant in `y` is integrated without error.

use std::io::Write;

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Content, HalfPlaneField};
use crate::funcspace::{abs_pow, check_exponent, Interval};
use crate::numerics::{ordered_max, pairwise_sum};

/// Weights `(w0, w1)` with `∫_{a}^{b} G / y^2 dy = w0 G(a) + w1 G(b)` for `G`
/// linear on `[a, b]`.
fn inverse_square_weights(a: f64, b: f64) -> (f64, f64) {
    let inv = 1.0 / a - 1.0 / b;
    let log = (b / a).ln();
    let slope = (log - a * inv) / (b - a);
    (inv - slope, slope)
}

/// Same for the weight `1 / y`.
fn inverse_weights(a: f64, b: f64) -> (f64, f64) {
    let log = (b / a).ln();
    let slope = ((b - a) - a * log) / (b - a);
    (log - slope, slope)
}

/// `∫ f dx` over the grid row for the piecewise-linear interpolant.
fn row_integral(x: &[f64], f: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let terms: Vec<f64> = x.windows(2).zip(f.windows(2)).map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1])).collect();
    pairwise_sum(&terms)
}

fn row_powers(field: &HalfPlaneField, j: usize, p: f64) -> Vec<f64> {
    field.level(j).iter().map(|&z| abs_pow(z, p)).collect()
}

/// Windowed hyperbolic integral `∬ |μ|^p dx dy / y^2` with tail estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicNorm {
    pub p: f64,
    /// Integral over `[x_min, x_max] × [y_min, y_max]`.
    pub window: f64,
    /// Estimate for `0 < y < y_min`, assuming `|μ| ∝ y` there.
    pub lower_tail: f64,
    /// Estimate for `y > y_max`, assuming `∫ |μ|^p dx ∝ y^(1-p)` there.
    pub upper_tail: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl HyperbolicNorm {
    /// Window plus tails: the estimate of `‖μ‖_p^p`.
    pub fn integral(&self) -> f64 {
        self.window + self.lower_tail + self.upper_tail
    }

    pub fn norm(&self) -> f64 {
        self.integral().powf(1.0 / self.p)
    }

    pub fn window_norm(&self) -> f64 {
        self.window.powf(1.0 / self.p)
    }
}

/// Hyperbolic `p`-norm of a dilatation field.
pub fn hyperbolic_p_norm(field: &HalfPlaneField, p: f64) -> Result<HyperbolicNorm> {
    field.require(Content::Mu)?;
    hyperbolic_integral(field, p)
}

/// [`hyperbolic_p_norm`] without the content check, for difference fields.
pub(crate) fn hyperbolic_integral(field: &HalfPlaneField, p: f64) -> Result<HyperbolicNorm> {
    check_exponent(p)?;
    if field.is_empty() {
        return Err(Error::EmptyField);
    }
    let (x, y) = (field.x(), field.y());
    let rows: Vec<f64> = (0..y.len()).into_par_iter().map(|j| row_integral(x, &row_powers(field, j, p))).collect();
    let mut terms = Vec::with_capacity(2 * y.len());
    for j in 1..y.len() {
        let (w0, w1) = inverse_square_weights(y[j - 1], y[j]);
        terms.push(w0 * rows[j - 1]);
        terms.push(w1 * rows[j]);
    }
    let (y_min, y_max) = (y[0], y[y.len() - 1]);
    Ok(HyperbolicNorm {
        p,
        window: pairwise_sum(&terms),
        lower_tail: rows[0] / ((p - 1.0) * y_min),
        upper_tail: rows[y.len() - 1] / (p * y_max),
        x_range: (x[0], x[x.len() - 1]),
        y_range: (y_min, y_max),
    })
}

/// Cumulative `∫_{x_0}^{x} f` on a grid row, read at arbitrary `x` by
/// integrating the linear interpolant inside the cell.
struct RowPrimitive<'a> {
    x: &'a [f64],
    f: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<'a> RowPrimitive<'a> {
    fn new(x: &'a [f64], f: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(x.len());
        let mut total = 0.0;
        cumulative.push(total);
        for i in 1..x.len() {
            total += 0.5 * (x[i] - x[i - 1]) * (f[i - 1] + f[i]);
            cumulative.push(total);
        }
        RowPrimitive { x, f, cumulative }
    }

    fn at(&self, t: f64) -> f64 {
        let n = self.x.len();
        if n < 2 || t <= self.x[0] {
            return 0.0;
        }
        if t >= self.x[n - 1] {
            return self.cumulative[n - 1];
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let (x0, x1) = (self.x[k], self.x[k + 1]);
        let ft = self.f[k] + (self.f[k + 1] - self.f[k]) * (t - x0) / (x1 - x0);
        self.cumulative[k] + 0.5 * (t - x0) * (self.f[k] + ft)
    }

    fn between(&self, a: f64, b: f64) -> f64 {
        self.at(b) - self.at(a)
    }
}

/// Row primitives of `|μ|^2` at every level.
pub(crate) struct BoxIntegrator<'a> {
    y: &'a [f64],
    rows: Vec<RowPrimitive<'a>>,
}

impl<'a> BoxIntegrator<'a> {
    pub(crate) fn new(field: &'a HalfPlaneField) -> Self {
        let rows = (0..field.y().len()).into_par_iter().map(|j| RowPrimitive::new(field.x(), row_powers(field, j, 2.0))).collect();
        BoxIntegrator { y: field.y(), rows }
    }

    /// `∫_{y_min}^{height} ∫_a^b |μ|^2 / y dx dy`.
    pub(crate) fn mass(&self, a: f64, b: f64, height: f64) -> f64 {
        let y = self.y;
        let g: Vec<f64> = self.rows.iter().map(|r| r.between(a, b)).collect();
        let mut terms = Vec::new();
        for j in 1..y.len() {
            if y[j - 1] >= height {
                break;
            }
            let (lo, hi) = (y[j - 1], y[j].min(height));
            let g_hi = if hi < y[j] { g[j - 1] + (g[j] - g[j - 1]) * (hi - lo) / (y[j] - lo) } else { g[j] };
            let (w0, w1) = inverse_weights(lo, hi);
            terms.push(w0 * g[j - 1] + w1 * g_hi);
        }
        pairwise_sum(&terms)
    }
}

/// `|I|^{-1} ∬_{I × (y_min, |I|)} |μ|^2 / y dx dy` over the domain of the
/// field, with the box's unnormalized mass additive in `I`.
pub fn carleson_box(field: &HalfPlaneField, interval: &Interval) -> f64 {
    BoxIntegrator::new(field).mass(interval.lo(), interval.hi(), interval.length()) / interval.length()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarlesonEntry {
    pub interval: Interval,
    pub measure: f64,
}

/// Box measures of `|μ|^2 / y` over a dyadic family of the field's x-range,
/// coarsest scale first.
#[derive(Clone, Debug, PartialEq)]
pub struct CarlesonProfile {
    pub entries: Vec<CarlesonEntry>,
}

/// Deepest dyadic level visited by [`carleson_profile`].
pub const CARLESON_MAX_LEVEL: u32 = 16;

impl CarlesonProfile {
    pub fn supremum(&self) -> f64 {
        let measures: Vec<f64> = self.entries.iter().map(|e| e.measure).collect();
        ordered_max(&measures).unwrap_or(0.0)
    }

    /// `(|I|, max measure at that length)`, coarsest first.
    pub fn scale_maxima(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for e in &self.entries {
            let len = e.interval.length();
            match out.last_mut() {
                Some((l, m)) if (*l - len).abs() <= 1e-12 * len => *m = m.max(e.measure),
                _ => out.push((len, e.measure)),
            }
        }
        out
    }

    /// Two-column CSV `length,measure` of [`CarlesonProfile::scale_maxima`].
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "length,measure")?;
        for (l, m) in self.scale_maxima() {
            writeln!(out, "{l:.17e},{m:.17e}")?;
        }
        Ok(())
    }
}

pub fn carleson_profile(field: &HalfPlaneField) -> Result<CarlesonProfile> {
    carleson_profile_to(field, CARLESON_MAX_LEVEL)
}

/// Boxes on `[x_min, x_max] / 2^k` for `k ≤ max_level`. Boxes taller than the
/// top level are skipped with a warning; the descent stops once `|I|` drops
/// to the bottom level.
pub fn carleson_profile_to(field: &HalfPlaneField, max_level: u32) -> Result<CarlesonProfile> {
    field.require(Content::Mu)?;
    if field.is_empty() {
        return Err(Error::EmptyField);
    }
    let (x, y) = (field.x(), field.y());
    let (a, b) = (x[0], x[x.len() - 1]);
    let (y_min, y_max) = (y[0], y[y.len() - 1]);
    let integrator = BoxIntegrator::new(field);
    let mut boxes = Vec::new();
    for k in 0..=max_level {
        let count = 1usize << k;
        let len = (b - a) / count as f64;
        if len <= y_min {
            break;
        }
        if len > y_max * (1.0 + 1e-12) {
            warn!("Carleson boxes of length {len} exceed the top level {y_max}; skipped");
            continue;
        }
        boxes.extend((0..count).map(|i| {
            let lo = a + i as f64 * len;
            Interval::new(lo + 0.5 * len, 0.5 * len)
        }));
    }
    let entries = boxes
        .par_iter()
        .map(|iv| CarlesonEntry { interval: *iv, measure: integrator.mass(iv.lo(), iv.hi(), iv.length()) / iv.length() })
        .collect();
    Ok(CarlesonProfile { entries })
}
