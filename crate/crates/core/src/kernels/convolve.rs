//! `(w * K_y)(x) = ∫ K(s) w(x - y s) ds` over `|s| ≤ T`, pointwise by
//! composite Gauss–Legendre quadrature or level by level by FFT.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{Kernel, KernelSet};
use crate::error::{Error, Result};
use crate::field::{Content, Grid, HalfPlane, HalfPlaneField};
use crate::funcspace::{ExtensionPolicy, SampledFunction};
use crate::numerics::{gl_panel, pairwise_sum_c, GL_POINTS};

/// Levels below this many sample steps are always integrated directly: a
/// point-sampled kernel narrower than that aliases.
const FFT_MIN_LEVEL_IN_STEPS: f64 = 2.0;

/// Largest panel in units of the sample step; keeps features of the source
/// between nodes resolved when `y` is large.
const MAX_PANEL_IN_STEPS: f64 = 8.0;

const ALIGN_TOL: f64 = 1e-9;

/// Anything that can be convolved: a function on the line laid out over the
/// sample lattice of `base()`.
pub trait Source: Sync {
    fn value(&self, t: f64) -> Complex64;

    /// Supplies the sample lattice, the extension policy, and smoothness
    /// between nodes (smooth iff `base().has_handle()`).
    fn base(&self) -> &SampledFunction;

    /// For periodic policy: `value(t + P) - value(t) = drift * P`.
    fn drift(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    /// Jumps of `(w', w'', w''')`, right minus left, at `x_min` and `x_max`
    /// for a source that is smooth inside the domain but continued by a
    /// simpler rule outside it. `None` when there is nothing to correct.
    fn end_jumps(&self) -> Option<[[Complex64; 3]; 2]> {
        None
    }
}

/// First three derivatives of `f` at `t` by central differences.
pub(crate) fn jets<F: Fn(f64) -> Complex64>(f: F, t: f64) -> [Complex64; 3] {
    let d = 1e-3 * (1.0 + t.abs());
    let (m2, m1, z, p1, p2) = (f(t - 2.0 * d), f(t - d), f(t), f(t + d), f(t + 2.0 * d));
    [
        (p1 - m1) / (2.0 * d),
        (p1 - z * 2.0 + m1) / (d * d),
        (p2 - p1 * 2.0 + m1 * 2.0 - m2) / (2.0 * d * d * d),
    ]
}

/// Jumps for a function that is constant outside its domain.
pub(crate) fn constant_end_jumps<F: Fn(f64) -> Complex64>(f: F, x_min: f64, x_max: f64) -> [[Complex64; 3]; 2] {
    let left = jets(&f, x_min);
    let right = jets(&f, x_max);
    [left, right.map(|v| -v)]
}

impl Source for SampledFunction {
    fn value(&self, t: f64) -> Complex64 {
        self.eval(t)
    }

    fn base(&self) -> &SampledFunction {
        self
    }

    fn end_jumps(&self) -> Option<[[Complex64; 3]; 2]> {
        let handle = self.handle()?;
        (self.policy() == ExtensionPolicy::ConstantExtend)
            .then(|| constant_end_jumps(|t| handle(t), self.x_min(), self.x_max()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    /// Pointwise truncated quadrature.
    Direct,
    /// Per-level FFT with a point-sampled kernel; direct on the lowest levels.
    #[default]
    Fft,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Direct => "direct",
            Engine::Fft => "fft",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Engine::Direct),
            "fft" => Ok(Engine::Fft),
            other => Err(Error::Parse(format!("unknown engine `{other}`"))),
        }
    }
}

/// `∫ K_y(x - t) w(t) dt` for one kernel.
pub fn convolve_at(w: &SampledFunction, kernel: Kernel, x: f64, y: f64, set: &KernelSet) -> Result<Complex64> {
    let mut out = [Complex64::new(0.0, 0.0)];
    direct_at(w, &[kernel], x, y, set, None, &mut out)?;
    Ok(out[0])
}

/// Several kernels against one source at one point, sharing source values.
pub fn convolve_source_at<S: Source + ?Sized>(
    src: &S,
    kernels: &[Kernel],
    x: f64,
    y: f64,
    set: &KernelSet,
) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); kernels.len()];
    direct_at(src, kernels, x, y, set, None, &mut out)?;
    Ok(out)
}

/// `w * K_y` over a whole grid, as a field on the upper half-plane.
pub fn convolve_grid(
    w: &SampledFunction,
    kernel: Kernel,
    grid: &Grid,
    engine: Engine,
    set: &KernelSet,
) -> Result<HalfPlaneField> {
    let values = convolve_source_grid(w, &[kernel], grid, engine, set)?.pop().expect("one kernel");
    HalfPlaneField::new(grid.clone(), values, HalfPlane::Upper, Content::Convolution)
}

/// Several kernels against one source over a grid. Returns one row-major
/// value vector per kernel.
pub fn convolve_source_grid<S: Source + ?Sized>(
    src: &S,
    kernels: &[Kernel],
    grid: &Grid,
    engine: Engine,
    set: &KernelSet,
) -> Result<Vec<Vec<Complex64>>> {
    let base = src.base();
    let h = base.step();
    let plan = match engine {
        Engine::Direct => None,
        Engine::Fft => Some(Alignment::of(grid, base)?),
    };
    let per_level: Vec<Vec<Vec<Complex64>>> = grid
        .y()
        .par_iter()
        .map(|&y| match &plan {
            Some(align) if y >= FFT_MIN_LEVEL_IN_STEPS * h => {
                check_window(base, grid.x()[0], grid.x()[grid.nx() - 1], y, set)?;
                if base.policy() == ExtensionPolicy::Periodic {
                    fft_level_periodic(src, kernels, grid, align, y, set)
                } else {
                    fft_level(src, kernels, align, y, set)
                }
            }
            _ => direct_level(src, kernels, grid.x(), y, set),
        })
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::with_capacity(grid.len()); kernels.len()];
    for level in per_level {
        for (dst, row) in out.iter_mut().zip(level) {
            dst.extend(row);
        }
    }
    Ok(out)
}

fn direct_level<S: Source + ?Sized>(
    src: &S,
    kernels: &[Kernel],
    xs: &[f64],
    y: f64,
    set: &KernelSet,
) -> Result<Vec<Vec<Complex64>>> {
    let table = NodeTable::new(kernels, set);
    let points: Vec<Vec<Complex64>> = xs
        .par_iter()
        .map(|&x| {
            let mut v = vec![Complex64::new(0.0, 0.0); kernels.len()];
            direct_at(src, kernels, x, y, set, Some(&table), &mut v)?;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok((0..kernels.len()).map(|k| points.iter().map(|p| p[k]).collect()).collect())
}

/// Gauss–Legendre nodes over `[-T, T]` in the kernel variable with the kernel
/// values folded into the weights, for windows free of breakpoints.
struct NodeTable {
    nodes: Vec<f64>,
    /// `kernels.len()` weights per node.
    weights: Vec<Complex64>,
}

impl NodeTable {
    fn new(kernels: &[Kernel], set: &KernelSet) -> Self {
        let (a, b) = (-set.truncation, set.truncation);
        let panels = ((b - a) / set.panel_width()).ceil().max(1.0) as usize;
        let step = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * GL_POINTS);
        let mut weights = Vec::with_capacity(panels * GL_POINTS * kernels.len());
        for p in 0..panels {
            let pa = a + p as f64 * step;
            let pb = if p + 1 == panels { b } else { pa + step };
            for (s, w) in gl_panel(pa, pb) {
                nodes.push(s);
                weights.extend(kernels.iter().map(|k| k.eval(s) * w));
            }
        }
        NodeTable { nodes, weights }
    }

    fn apply<S: Source + ?Sized>(&self, src: &S, x: f64, y: f64, out: &mut [Complex64]) {
        let k = out.len();
        let mut partial: Vec<Vec<Complex64>> = vec![Vec::with_capacity(self.nodes.len() / GL_POINTS); k];
        for (panel, weights) in self.nodes.chunks(GL_POINTS).zip(self.weights.chunks(GL_POINTS * k)) {
            let mut acc = vec![Complex64::new(0.0, 0.0); k];
            for (&s, w) in panel.iter().zip(weights.chunks(k)) {
                let v = src.value(x - y * s);
                for (a, w) in acc.iter_mut().zip(w) {
                    *a += w * v;
                }
            }
            for (parts, a) in partial.iter_mut().zip(acc) {
                parts.push(a);
            }
        }
        for (o, parts) in out.iter_mut().zip(&partial) {
            *o = pairwise_sum_c(parts);
        }
    }
}

fn check_window(base: &SampledFunction, x_lo: f64, x_hi: f64, y: f64, set: &KernelSet) -> Result<()> {
    if y <= 0.0 || y.is_nan() {
        return Err(Error::NonPositiveHeight(y));
    }
    if base.policy() == ExtensionPolicy::ExplicitHandle {
        let (lo, hi) = (x_lo - set.truncation * y, x_hi + set.truncation * y);
        let tol = ALIGN_TOL * base.step();
        if lo < base.x_min() - tol || hi > base.x_max() + tol {
            return Err(Error::OutsideDomain { lo, hi, x_min: base.x_min(), x_max: base.x_max() });
        }
    }
    Ok(())
}

/// Breakpoints of the integrand in `t` inside `(lo, hi)`: the domain ends for
/// constant continuation, and every lattice node when the source is only
/// piecewise smooth.
fn breakpoints(base: &SampledFunction, lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts = vec![lo];
    let (x_min, x_max, h) = (base.x_min(), base.x_max(), base.step());
    let constant = base.policy() == ExtensionPolicy::ConstantExtend;
    if !base.has_handle() {
        let mut k_lo = ((lo - x_min) / h).ceil() as i64;
        let mut k_hi = ((hi - x_min) / h).floor() as i64;
        if constant {
            k_lo = k_lo.max(0);
            k_hi = k_hi.min(base.len() as i64 - 1);
        }
        cuts.extend((k_lo..=k_hi).map(|k| x_min + k as f64 * h).filter(|&t| t > lo && t < hi));
    } else if constant {
        cuts.extend([x_min, x_max].into_iter().filter(|&t| t > lo && t < hi));
    }
    cuts.push(hi);
    cuts
}

fn direct_at<S: Source + ?Sized>(
    src: &S,
    kernels: &[Kernel],
    x: f64,
    y: f64,
    set: &KernelSet,
    table: Option<&NodeTable>,
    out: &mut [Complex64],
) -> Result<()> {
    let base = src.base();
    check_window(base, x, x, y, set)?;
    let t_cuts = breakpoints(base, x - set.truncation * y, x + set.truncation * y);
    // panels live in the kernel variable `s = (x - t) / y`, so kernel values
    // carry no cancellation error from `x`
    let mut cuts: Vec<f64> = t_cuts.iter().rev().map(|&t| (x - t) / y).collect();
    cuts[0] = -set.truncation;
    *cuts.last_mut().expect("two ends") = set.truncation;
    let constant = base.policy() == ExtensionPolicy::ConstantExtend;
    let kernel_width = set.panel_width();
    let fine_width = kernel_width.min(MAX_PANEL_IN_STEPS * base.step() / y);
    if cuts.len() == 2 && fine_width == kernel_width {
        match table {
            Some(t) => t.apply(src, x, y, out),
            None => NodeTable::new(kernels, set).apply(src, x, y, out),
        }
        return Ok(());
    }
    let mut partial: Vec<Vec<Complex64>> = vec![Vec::new(); kernels.len()];
    let mut acc = vec![Complex64::new(0.0, 0.0); kernels.len()];
    for piece in cuts.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        if b - a <= 1e-14 {
            continue;
        }
        let (t_hi, t_lo) = (x - y * a, x - y * b);
        let outside = constant && (t_hi <= base.x_min() || t_lo >= base.x_max());
        let width = if outside { kernel_width } else { fine_width };
        let panels = ((b - a) / width).ceil().max(1.0) as usize;
        let step = (b - a) / panels as f64;
        for p in 0..panels {
            let pa = a + p as f64 * step;
            let pb = if p + 1 == panels { b } else { pa + step };
            acc.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
            for (s, w) in gl_panel(pa, pb) {
                let v = src.value(x - y * s) * w;
                let g = super::phi(s);
                let (d1, d2) = (-2.0 * s * g, (4.0 * s * s - 2.0) * g);
                for (a, kern) in acc.iter_mut().zip(kernels) {
                    *a += (kern.phi * g + kern.psi * d1 + kern.phi2 * d2) * v;
                }
            }
            for (parts, a) in partial.iter_mut().zip(&acc) {
                parts.push(*a);
            }
        }
    }
    for (o, parts) in out.iter_mut().zip(&partial) {
        *o = pairwise_sum_c(parts);
    }
    Ok(())
}

/// Placement of grid x-nodes on the sample lattice: `x_i` is lattice node
/// `first + i * stride`.
#[derive(Clone, Copy, Debug)]
struct Alignment {
    first: i64,
    stride: i64,
    count: usize,
}

impl Alignment {
    fn of(grid: &Grid, base: &SampledFunction) -> Result<Self> {
        let h = base.step();
        let xs = grid.x();
        let index = |x: f64| -> Result<i64> {
            let r = (x - base.x_min()) / h;
            let k = r.round();
            if (r - k).abs() > ALIGN_TOL * (1.0 + r.abs()) {
                return Err(Error::InvalidGrid(format!(
                    "x-node {x} is not on the sample lattice (step {h}); the FFT engine needs aligned uniform nodes"
                )));
            }
            Ok(k as i64)
        };
        let first = index(xs[0])?;
        let stride = if xs.len() > 1 { index(xs[1])? - first } else { 1 };
        if stride < 1 {
            return Err(Error::InvalidGrid("x-nodes must advance along the lattice".into()));
        }
        for (i, &x) in xs.iter().enumerate() {
            if index(x)? != first + i as i64 * stride {
                return Err(Error::InvalidGrid(format!("x-grid is not uniform at node {i}")));
            }
        }
        Ok(Alignment { first, stride, count: xs.len() })
    }

    fn last(&self) -> i64 {
        self.first + (self.count as i64 - 1) * self.stride
    }
}

/// Trapezoid taps `h K_y(d h)` for `|d| ≤ m`, one vector per kernel.
fn taps(kernels: &[Kernel], h: f64, y: f64, m: i64) -> Vec<Vec<Complex64>> {
    let shape: Vec<(f64, f64, f64)> = (-m..=m)
        .map(|d| {
            let s = d as f64 * h / y;
            let g = super::phi(s);
            (g, -2.0 * s * g, (4.0 * s * s - 2.0) * g)
        })
        .collect();
    let scale = h / y;
    kernels
        .iter()
        .map(|k| shape.iter().map(|&(g, d1, d2)| (k.phi * g + k.psi * d1 + k.phi2 * d2) * scale).collect())
        .collect()
}

fn fft_level<S: Source + ?Sized>(
    src: &S,
    kernels: &[Kernel],
    align: &Alignment,
    y: f64,
    set: &KernelSet,
) -> Result<Vec<Vec<Complex64>>> {
    let base = src.base();
    let h = base.step();
    let m = (set.truncation * y / h).floor() as i64;
    let span = align.last() - align.first;
    let start = align.first - m;
    let signal_len = (span + 2 * m + 1) as usize;
    let size = (signal_len + 2 * m as usize).max(2 * (span as usize + 1)).next_power_of_two();
    let mut signal: Vec<Complex64> = (0..signal_len)
        .map(|j| src.value(base.x_min() + (start + j as i64) as f64 * h))
        .collect();
    signal.resize(size, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    forward.process(&mut signal);
    let norm = 1.0 / size as f64;
    let jumps = src.end_jumps();
    let ends = [base.x_min(), base.x_max()];
    Ok(taps(kernels, h, y, m)
        .into_iter()
        .zip(kernels)
        .map(|(mut tap, kernel)| {
            tap.resize(size, Complex64::new(0.0, 0.0));
            forward.process(&mut tap);
            for (t, s) in tap.iter_mut().zip(&signal) {
                *t *= s;
            }
            inverse.process(&mut tap);
            (0..align.count)
                .map(|i| {
                    let mut v = tap[(i as i64 * align.stride + 2 * m) as usize] * norm;
                    if let Some(jumps) = &jumps {
                        let x = base.x_min() + (align.first + i as i64 * align.stride) as f64 * h;
                        for (&t_e, jump) in ends.iter().zip(jumps) {
                            v += kink_correction(kernel, x, y, h, t_e, jump, set.truncation);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect())
}

/// Euler–Maclaurin terms restoring the `h^2` and `h^4` accuracy lost by the
/// trapezoid rule at a lattice node `t_e` where the source has derivative
/// jumps `[w'], [w''], [w''']`.
fn kink_correction(
    kernel: &Kernel,
    x: f64,
    y: f64,
    h: f64,
    t_e: f64,
    jump: &[Complex64; 3],
    truncation: f64,
) -> Complex64 {
    let s = (x - t_e) / y;
    if s.abs() > truncation {
        return Complex64::new(0.0, 0.0);
    }
    // g(t) = K_y(x - t) and its t-derivatives at t_e
    let g0 = kernel.derivative(0, s) / y;
    let g1 = -kernel.derivative(1, s) / (y * y);
    let g2 = kernel.derivative(2, s) / (y * y * y);
    let f1 = g0 * jump[0];
    let f3 = g0 * jump[2] + g1 * jump[1] * 3.0 + g2 * jump[0] * 3.0;
    f1 * (h * h / 12.0) - f3 * (h.powi(4) / 720.0)
}

fn fft_level_periodic<S: Source + ?Sized>(
    src: &S,
    kernels: &[Kernel],
    grid: &Grid,
    align: &Alignment,
    y: f64,
    set: &KernelSet,
) -> Result<Vec<Vec<Complex64>>> {
    let base = src.base();
    let h = base.step();
    let period = base.len() - 1;
    let drift = src.drift();
    let m = (set.truncation * y / h).floor() as i64;
    let mut signal: Vec<Complex64> = (0..period)
        .map(|j| {
            let t = base.x_min() + j as f64 * h;
            src.value(t) - drift * t
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(period);
    let inverse = planner.plan_fft_inverse(period);
    forward.process(&mut signal);
    let norm = 1.0 / period as f64;
    Ok(taps(kernels, h, y, m)
        .into_iter()
        .zip(kernels)
        .map(|(tap, kernel)| {
            let mut folded = vec![Complex64::new(0.0, 0.0); period];
            for (e, v) in tap.into_iter().enumerate() {
                let d = e as i64 - m;
                folded[d.rem_euclid(period as i64) as usize] += v;
            }
            forward.process(&mut folded);
            for (t, s) in folded.iter_mut().zip(&signal) {
                *t *= s;
            }
            inverse.process(&mut folded);
            let (mass, moment) = (kernel.mass(), kernel.first_moment());
            grid.x()
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let lattice = align.first + i as i64 * align.stride;
                    let r = lattice.rem_euclid(period as i64) as usize;
                    folded[r] * norm + drift * (mass * x - moment * y)
                })
                .collect()
        })
        .collect())
}
