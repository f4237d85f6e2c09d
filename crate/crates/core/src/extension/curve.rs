use std::sync::LazyLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{ExtensionPolicy, SampledFunction};
use crate::kernels::Source;
use crate::numerics::{expm1_c, gl_panel};

/// `γ(x) = γ(0) + c ∫_0^x e^u`, with `c = 1` or, when normalized,
/// `c = (∫_0^1 e^u)^{-1}`.
///
/// For sampled data `e^u` is read as `exp` of the piecewise-linear
/// interpolant of `u`, and its primitive is exact on every segment. When `u`
/// carries a closed-form handle the node primitives are Gauss–Legendre
/// integrals of `exp(u)`; between nodes the primitive is interpolated on each
/// segment at Chebyshev–Lobatto points whose values are such integrals.
#[derive(Clone, Debug)]
pub struct Curve {
    u: SampledFunction,
    /// `R_k = ∫_{x_min}^{x_k} e^u`.
    cumulative: Vec<Complex64>,
    /// Per segment, `∫_{x_k}^{t_j} e^u` at the Chebyshev–Lobatto points `t_j`
    /// (handle only).
    cells: Vec<Complex64>,
    origin: Complex64,
    scale: Complex64,
    base_point: Complex64,
    mass: Complex64,
    normalized: bool,
}

/// Degree of the per-segment interpolant of the primitive.
const CELL_DEGREE: usize = 12;

/// Chebyshev–Lobatto points on `[-1, 1]`, ascending.
static LOBATTO: LazyLock<[f64; CELL_DEGREE + 1]> =
    LazyLock::new(|| std::array::from_fn(|j| -(std::f64::consts::PI * j as f64 / CELL_DEGREE as f64).cos()));

/// Barycentric interpolation at Chebyshev–Lobatto points.
fn lobatto_eval(points: &[f64; CELL_DEGREE + 1], values: &[Complex64], xi: f64) -> Complex64 {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (j, (&p, &v)) in points.iter().zip(values).enumerate() {
        let d = xi - p;
        if d == 0.0 {
            return v;
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == CELL_DEGREE {
            w *= 0.5;
        }
        let c = w / d;
        num += v * c;
        den += c;
    }
    num / den
}

/// `expm1(z) / z`.
fn expm1_ratio(z: Complex64) -> Complex64 {
    if z.norm() < 1e-8 {
        Complex64::new(1.0, 0.0) + z * 0.5
    } else {
        expm1_c(z) / z
    }
}

pub fn gamma(u: &SampledFunction, normalize: bool) -> Result<Curve> {
    Curve::new(u, normalize)
}

impl Curve {
    pub fn new(u: &SampledFunction, normalize: bool) -> Result<Self> {
        let n = u.len();
        let h = u.step();
        let samples = u.samples();
        let mut cumulative = Vec::with_capacity(n);
        let mut total = Complex64::new(0.0, 0.0);
        cumulative.push(total);
        let points = *LOBATTO;
        let mut cells = Vec::new();
        for k in 0..n - 1 {
            let piece = match u.handle() {
                Some(f) => {
                    let a = u.node(k);
                    let piece = gl_panel(a, u.node(k + 1)).iter().map(|&(t, w)| f(t).exp() * w).sum();
                    cells.push(Complex64::new(0.0, 0.0));
                    for &xi in &points[1..CELL_DEGREE] {
                        let b = a + 0.5 * (xi + 1.0) * h;
                        cells.push(gl_panel(a, b).iter().map(|&(t, w)| f(t).exp() * w).sum());
                    }
                    cells.push(piece);
                    piece
                }
                None => {
                    let du = samples[k + 1] - samples[k];
                    samples[k].exp() * h * expm1_ratio(du)
                }
            };
            total += piece;
            cumulative.push(total);
        }
        let mut curve = Curve {
            u: u.clone(),
            cumulative,
            cells,
            origin: Complex64::new(0.0, 0.0),
            scale: Complex64::new(1.0, 0.0),
            base_point: Complex64::new(0.0, 0.0),
            mass: Complex64::new(0.0, 0.0),
            normalized: normalize,
        };
        curve.origin = curve.primitive(0.0);
        curve.mass = curve.primitive(1.0) - curve.origin;
        if normalize {
            let size = samples.iter().map(|z| z.re.exp()).fold(0.0, f64::max);
            if !(curve.mass.norm() > 1e-12 * size) {
                return Err(Error::DegenerateNormalization(curve.mass.norm()));
            }
            curve.scale = curve.mass.inv();
        }
        Ok(curve)
    }

    /// Same curve translated so that `γ(0) = base`.
    pub fn with_base_point(mut self, base: Complex64) -> Self {
        self.base_point = base;
        self
    }

    pub fn base_point(&self) -> Complex64 {
        self.base_point
    }

    /// `∫_0^1 e^u`.
    pub fn mass(&self) -> Complex64 {
        self.mass
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Factor multiplying `∫_0^x e^u`.
    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn driving_function(&self) -> &SampledFunction {
        &self.u
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.base_point + self.scale * (self.primitive(t) - self.origin)
    }

    /// `γ` at the sample nodes of `u`.
    pub fn node_values(&self) -> Vec<Complex64> {
        self.cumulative.iter().map(|&r| self.base_point + self.scale * (r - self.origin)).collect()
    }

    /// `∫_{x_min}^{x_max} e^u`, the raw increment over one period.
    fn period_increment(&self) -> Complex64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// `R(t) = ∫_{x_min}^t e^u` under the extension policy of `u`.
    fn primitive(&self, t: f64) -> Complex64 {
        let (x_min, x_max) = (self.u.x_min(), self.u.x_max());
        let n = self.cumulative.len();
        match self.u.policy() {
            ExtensionPolicy::Periodic => {
                let r = self.u.reduce_periodic(t);
                let periods = ((t - r) / self.u.period()).round();
                self.period_increment() * periods + self.inside(r)
            }
            ExtensionPolicy::ConstantExtend => {
                if t < x_min {
                    self.u.samples()[0].exp() * (t - x_min)
                } else if t > x_max {
                    self.cumulative[n - 1] + self.u.samples()[n - 1].exp() * (t - x_max)
                } else {
                    self.inside(t)
                }
            }
            ExtensionPolicy::ExplicitHandle => {
                if t < x_min {
                    -self.handle_integral(t, x_min)
                } else if t > x_max {
                    self.cumulative[n - 1] + self.handle_integral(x_max, t)
                } else {
                    self.inside(t)
                }
            }
        }
    }

    fn handle_integral(&self, a: f64, b: f64) -> Complex64 {
        let f = self.u.handle().expect("explicit-handle policy has a handle");
        let panels = ((b - a) / self.u.step()).ceil().max(1.0) as usize;
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * width;
                gl_panel(lo, lo + width).iter().map(|&(t, w)| f(t).exp() * w).sum::<Complex64>()
            })
            .sum()
    }

    fn inside(&self, t: f64) -> Complex64 {
        let n = self.cumulative.len();
        let h = self.u.step();
        let pos = ((t - self.u.x_min()) / h).clamp(0.0, (n - 1) as f64);
        let k = (pos.floor() as usize).min(n - 2);
        let frac = pos - k as f64;
        let samples = self.u.samples();
        match self.u.handle() {
            None => {
                let du = samples[k + 1] - samples[k];
                let tau = frac * h;
                self.cumulative[k] + samples[k].exp() * tau * expm1_ratio(du * frac)
            }
            Some(_) => {
                let cell = &self.cells[k * (CELL_DEGREE + 1)..(k + 1) * (CELL_DEGREE + 1)];
                self.cumulative[k] + lobatto_eval(&LOBATTO, cell, 2.0 * frac - 1.0)
            }
        }
    }
}

impl Source for Curve {
    fn value(&self, t: f64) -> Complex64 {
        self.eval(t)
    }

    fn base(&self) -> &SampledFunction {
        &self.u
    }

    fn drift(&self) -> Complex64 {
        if self.u.policy() == ExtensionPolicy::Periodic {
            self.scale * self.period_increment() / self.u.period()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn end_jumps(&self) -> Option<[[Complex64; 3]; 2]> {
        let handle = self.u.handle()?;
        if self.u.policy() != ExtensionPolicy::ConstantExtend {
            return None;
        }
        // γ' = e^u is continuous at the ends; γ'' and γ''' drop to zero outside
        let weight = |t: f64| handle(t).exp() * self.scale;
        let zero = Complex64::new(0.0, 0.0);
        let [left, right] = crate::kernels::constant_end_jumps(weight, self.u.x_min(), self.u.x_max());
        Some([[zero, left[0], left[1]], [zero, right[0], right[1]]])
    }
}

/// `c e^u` as a convolution source.
#[derive(Clone, Copy, Debug)]
pub struct Exponential<'a> {
    u: &'a SampledFunction,
    scale: Complex64,
}

impl<'a> Exponential<'a> {
    pub fn new(u: &'a SampledFunction, scale: Complex64) -> Self {
        Exponential { u, scale }
    }
}

impl Source for Exponential<'_> {
    fn value(&self, t: f64) -> Complex64 {
        self.u.eval(t).exp() * self.scale
    }

    fn base(&self) -> &SampledFunction {
        self.u
    }

    fn end_jumps(&self) -> Option<[[Complex64; 3]; 2]> {
        let handle = self.u.handle()?;
        let scale = self.scale;
        (self.u.policy() == ExtensionPolicy::ConstantExtend)
            .then(|| crate::kernels::constant_end_jumps(|t| handle(t).exp() * scale, self.u.x_min(), self.u.x_max()))
    }
}

impl Curve {
    /// `c e^u` with the same constant `c` as the curve, i.e. `γ'`.
    pub fn derivative_source(&self) -> Exponential<'_> {
        Exponential::new(&self.u, self.scale)
    }
}
