use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Closed-form evaluator attached to a sampled function.
pub type Handle = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// How a sampled function is evaluated outside `[x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionPolicy {
    /// Constant continuation of the end values.
    ConstantExtend,
    /// Period `x_max - x_min`; requires matching end samples.
    Periodic,
    /// The closed-form handle is authoritative on all of the real line. Window
    /// operations that rely on node data refuse to leave the sampled domain.
    ExplicitHandle,
}

impl ExtensionPolicy {
    pub fn name(self) -> &'static str {
        match self {
            ExtensionPolicy::ConstantExtend => "constant-extend",
            ExtensionPolicy::Periodic => "periodic",
            ExtensionPolicy::ExplicitHandle => "explicit-handle",
        }
    }
}

const PERIODIC_TOL: f64 = 1e-12;

/// A function on the line given by uniform samples, an extension policy, and
/// optionally a closed-form handle used for evaluation between nodes
/// (piecewise-linear interpolation otherwise).
#[derive(Clone)]
pub struct SampledFunction {
    samples: Vec<Complex64>,
    x_min: f64,
    x_max: f64,
    step: f64,
    policy: ExtensionPolicy,
    handle: Option<Handle>,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("n", &self.samples.len())
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .field("policy", &self.policy)
            .field("handle", &self.handle.is_some())
            .finish()
    }
}

impl SampledFunction {
    pub fn from_samples(
        samples: Vec<Complex64>,
        x_min: f64,
        x_max: f64,
        policy: ExtensionPolicy,
    ) -> Result<Self> {
        Self::build(samples, x_min, x_max, policy, None)
    }

    pub fn from_real_samples(
        samples: &[f64],
        x_min: f64,
        x_max: f64,
        policy: ExtensionPolicy,
    ) -> Result<Self> {
        let samples = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_samples(samples, x_min, x_max, policy)
    }

    /// Samples `f` on `n` uniform nodes and keeps `f` as the closed-form handle.
    pub fn from_fn<F>(f: F, x_min: f64, x_max: f64, n: usize, policy: ExtensionPolicy) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if n < 2 {
            return Err(Error::InvalidFunction(format!("need at least 2 samples, got {n}")));
        }
        let step = (x_max - x_min) / (n - 1) as f64;
        let samples = (0..n)
            .map(|i| f(if i + 1 == n { x_max } else { x_min + i as f64 * step }))
            .collect();
        Self::build(samples, x_min, x_max, policy, Some(Arc::new(f)))
    }

    pub fn from_real_fn<F>(
        f: F,
        x_min: f64,
        x_max: f64,
        n: usize,
        policy: ExtensionPolicy,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_fn(move |x| Complex64::new(f(x), 0.0), x_min, x_max, n, policy)
    }

    fn build(
        samples: Vec<Complex64>,
        x_min: f64,
        x_max: f64,
        policy: ExtensionPolicy,
        handle: Option<Handle>,
    ) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InvalidFunction(format!("need at least 2 samples, got {n}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidFunction(format!(
                "domain [{x_min}, {x_max}] is empty or not finite"
            )));
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidFunction(format!("sample {i} is not finite")));
        }
        if policy == ExtensionPolicy::Periodic && (samples[0] - samples[n - 1]).norm() > PERIODIC_TOL {
            return Err(Error::NonPeriodic(format!(
                "end samples differ by {:e}",
                (samples[0] - samples[n - 1]).norm()
            )));
        }
        if policy == ExtensionPolicy::ExplicitHandle && handle.is_none() {
            return Err(Error::InvalidFunction(
                "explicit-handle policy requires a closed-form handle".into(),
            ));
        }
        Ok(SampledFunction {
            step: (x_max - x_min) / (n - 1) as f64,
            samples,
            x_min,
            x_max,
            policy,
            handle,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn period(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn policy(&self) -> ExtensionPolicy {
        self.policy
    }

    pub fn has_handle(&self) -> bool {
        self.handle.is_some()
    }

    /// Position of node `i`; the last node is `x_max` exactly.
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.samples.len() {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// True when every sample has |Im| <= `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.samples.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn real_samples(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    /// Evaluation at any real point; the extension policy resolves points
    /// outside the sampled domain.
    pub fn eval(&self, x: f64) -> Complex64 {
        match self.policy {
            ExtensionPolicy::ExplicitHandle => (self.handle.as_ref().expect("checked at build"))(x),
            ExtensionPolicy::ConstantExtend => {
                if x <= self.x_min {
                    self.samples[0]
                } else if x >= self.x_max {
                    self.samples[self.samples.len() - 1]
                } else {
                    self.eval_inside(x)
                }
            }
            ExtensionPolicy::Periodic => {
                let t = self.reduce_periodic(x);
                self.eval_inside(t)
            }
        }
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(x).re
    }

    /// Maps `x` into `[x_min, x_max)` by whole periods.
    pub fn reduce_periodic(&self, x: f64) -> f64 {
        let period = self.period();
        let t = self.x_min + (x - self.x_min).rem_euclid(period);
        if t >= self.x_max {
            self.x_min
        } else {
            t
        }
    }

    fn eval_inside(&self, x: f64) -> Complex64 {
        if let Some(h) = &self.handle {
            return h(x);
        }
        self.interpolate(x)
    }

    /// Piecewise-linear interpolation of the node data (ignores the handle).
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let n = self.samples.len();
        let pos = ((x - self.x_min) / self.step).clamp(0.0, (n - 1) as f64);
        let k = (pos.floor() as usize).min(n - 2);
        let frac = pos - k as f64;
        self.samples[k] * (1.0 - frac) + self.samples[k + 1] * frac
    }

    /// Applies `f` to every sample and composes it with the handle.
    pub fn map<F>(&self, f: F) -> SampledFunction
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + Clone + 'static,
    {
        let samples = self.samples.iter().map(|&z| f(z)).collect();
        let handle = self.handle.clone().map(|h| {
            let f = f.clone();
            Arc::new(move |x| f(h(x))) as Handle
        });
        SampledFunction { samples, handle, ..self.clone_shape() }
    }

    fn clone_shape(&self) -> SampledFunction {
        SampledFunction {
            samples: Vec::new(),
            x_min: self.x_min,
            x_max: self.x_max,
            step: self.step,
            policy: self.policy,
            handle: None,
        }
    }

    pub fn add_constant(&self, c: Complex64) -> SampledFunction {
        self.map(move |z| z + c)
    }

    pub fn scale(&self, a: Complex64) -> SampledFunction {
        self.map(move |z| z * a)
    }

    pub fn real_part(&self) -> SampledFunction {
        self.map(|z| Complex64::new(z.re, 0.0))
    }

    pub fn imag_part(&self) -> SampledFunction {
        self.map(|z| Complex64::new(z.im, 0.0))
    }

    /// `x -> u(x + a)`, carried on the shifted domain with identical samples.
    pub fn translate(&self, a: f64) -> SampledFunction {
        let handle = self.handle.clone().map(|h| Arc::new(move |x: f64| h(x + a)) as Handle);
        SampledFunction {
            samples: self.samples.clone(),
            x_min: self.x_min - a,
            x_max: self.x_max - a,
            step: self.step,
            policy: self.policy,
            handle,
        }
    }

    /// `x -> u(lambda x)` for `lambda > 0`, with identical samples.
    pub fn rescale(&self, lambda: f64) -> Result<SampledFunction> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidFunction(format!("rescale factor {lambda} must be positive")));
        }
        let handle = self.handle.clone().map(|h| Arc::new(move |x: f64| h(lambda * x)) as Handle);
        let x_min = self.x_min / lambda;
        let x_max = self.x_max / lambda;
        Ok(SampledFunction {
            samples: self.samples.clone(),
            x_min,
            x_max,
            step: (x_max - x_min) / (self.samples.len() - 1) as f64,
            policy: self.policy,
            handle,
        })
    }

    /// `a u + b v` on a shared grid.
    pub fn combine(&self, a: Complex64, other: &SampledFunction, b: Complex64) -> Result<SampledFunction> {
        if self.len() != other.len()
            || (self.x_min - other.x_min).abs() > 1e-12 * self.step
            || (self.x_max - other.x_max).abs() > 1e-12 * self.step
        {
            return Err(Error::InvalidFunction("combine requires identical sample grids".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        let handle = match (&self.handle, &other.handle) {
            (Some(hu), Some(hv)) => {
                let (hu, hv) = (hu.clone(), hv.clone());
                Some(Arc::new(move |x: f64| a * hu(x) + b * hv(x)) as Handle)
            }
            _ => None,
        };
        let policy = if self.policy == ExtensionPolicy::ExplicitHandle && handle.is_none() {
            ExtensionPolicy::ConstantExtend
        } else {
            self.policy
        };
        Ok(SampledFunction { samples, handle, policy, ..self.clone_shape() })
    }

    /// Replaces the extension policy, revalidating its invariants.
    pub fn with_policy(&self, policy: ExtensionPolicy) -> Result<SampledFunction> {
        Self::build(self.samples.clone(), self.x_min, self.x_max, policy, self.handle.clone())
    }

    /// Drops the closed-form handle so evaluation uses interpolation only.
    pub fn without_handle(&self) -> SampledFunction {
        let policy = match self.policy {
            ExtensionPolicy::ExplicitHandle => ExtensionPolicy::ConstantExtend,
            p => p,
        };
        SampledFunction { samples: self.samples.clone(), policy, ..self.clone_shape() }
    }

    pub(crate) fn handle(&self) -> Option<&Handle> {
        self.handle.as_ref()
    }

    /// Reads a one-line-header CSV with columns `x,value` or `x,re,im`.
    ///
    /// The x column must be uniform to within 1e-9 of the step.
    pub fn read_csv(path: impl AsRef<Path>, policy: ExtensionPolicy) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::parse_csv(std::io::BufReader::new(file), policy)
    }

    pub fn parse_csv<R: BufRead>(reader: R, policy: ExtensionPolicy) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        let mut columns = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if lineno == 0 || trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            match columns {
                None => columns = Some(fields.len()),
                Some(c) if c != fields.len() => {
                    return Err(Error::Parse(format!("line {}: expected {c} columns", lineno + 1)))
                }
                _ => {}
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}: {s:?}", lineno + 1)))
            };
            match fields.len() {
                2 => {
                    xs.push(parse(fields[0])?);
                    values.push(Complex64::new(parse(fields[1])?, 0.0));
                }
                3 => {
                    xs.push(parse(fields[0])?);
                    values.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
                }
                k => return Err(Error::Parse(format!("line {}: {k} columns, expected 2 or 3", lineno + 1))),
            }
        }
        if xs.len() < 2 {
            return Err(Error::Parse("need at least two data rows".into()));
        }
        let (x_min, x_max) = (xs[0], xs[xs.len() - 1]);
        let step = (x_max - x_min) / (xs.len() - 1) as f64;
        for (i, &x) in xs.iter().enumerate() {
            if (x - (x_min + i as f64 * step)).abs() > 1e-9 * step.abs().max(1.0) {
                return Err(Error::Parse(format!("x column is not uniform at row {}", i + 1)));
            }
        }
        Self::from_samples(values, x_min, x_max, policy)
    }

    /// Writes `x,re,im` rows (or `x,value` when real) with a one-line header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let real = self.is_real(0.0);
        if real {
            writeln!(out, "x,value")?;
        } else {
            writeln!(out, "x,re,im")?;
        }
        for (i, z) in self.samples.iter().enumerate() {
            if real {
                writeln!(out, "{:.17e},{:.17e}", self.node(i), z.re)?;
            } else {
                writeln!(out, "{:.17e},{:.17e},{:.17e}", self.node(i), z.re, z.im)?;
            }
        }
        Ok(())
    }
}
