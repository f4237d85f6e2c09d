//! The heat-kernel extension `F = γ * φ_y + i γ * ψ_y` of the curve
//! `γ' = e^u`, its derivatives, and its complex dilatation
//! `μ = (α_y * e^u) / (β_y * e^u)`.
//!
//! On the lower half-plane `F(x, -y) = U(x, y) - i V(x, y)`, which makes the
//! kernels of `F`, `F_z` and `F_z̄` the conjugates of their upper versions.

mod curve;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Content, Grid, HalfPlane, HalfPlaneField, Partial};
use crate::funcspace::SampledFunction;
use crate::kernels::{convolve_source_at, convolve_source_grid, Engine, Kernel, KernelSet};

pub use curve::{gamma, Curve, Exponential};

/// `|β_y * e^u|` below this is treated as a vanishing denominator.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// Settings shared by every extension computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionOptions {
    pub engine: Engine,
    pub kernels: KernelSet,
    /// Normalize `γ` so that `γ(0) = 0`, `γ(1) = 1`.
    pub normalize: bool,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions { engine: Engine::Fft, kernels: KernelSet::default(), normalize: true }
    }
}

impl ExtensionOptions {
    pub fn with_engine(self, engine: Engine) -> Self {
        ExtensionOptions { engine, ..self }
    }
}

fn oriented(kernel: Kernel, half: HalfPlane) -> Kernel {
    match half {
        HalfPlane::Upper => kernel,
        HalfPlane::Lower => kernel.conj(),
    }
}

/// The field `F` on `grid`.
pub fn extend(u: &SampledFunction, grid: &Grid, half: HalfPlane, opts: &ExtensionOptions) -> Result<HalfPlaneField> {
    let curve = gamma(u, opts.normalize)?;
    extend_curve(&curve, grid, half, opts)
}

pub fn extend_curve(curve: &Curve, grid: &Grid, half: HalfPlane, opts: &ExtensionOptions) -> Result<HalfPlaneField> {
    let kernel = oriented(Kernel::extension(), half);
    let values = convolve_source_grid(curve, &[kernel], grid, opts.engine, &opts.kernels)?.pop().expect("one kernel");
    HalfPlaneField::new(grid.clone(), values, half, Content::F)
}

/// `F` at a single point of the upper half-plane by direct quadrature.
pub fn extend_at(u: &SampledFunction, x: f64, y: f64, opts: &ExtensionOptions) -> Result<Complex64> {
    let curve = gamma(u, opts.normalize)?;
    Ok(convolve_source_at(&curve, &[Kernel::extension()], x, y, &opts.kernels)?[0])
}

/// `(U_x, U_y, V_x, V_y)` at a point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials {
    pub ux: Complex64,
    pub uy: Complex64,
    pub vx: Complex64,
    pub vy: Complex64,
}

impl Partials {
    fn from_convolutions(e_phi: Complex64, e_psi: Complex64, e_phi2: Complex64) -> Self {
        Partials { ux: e_phi, uy: e_psi * 0.5, vx: e_psi, vy: e_phi + e_phi2 * 0.5 }
    }

    /// `F_z = (F_x - i F_y) / 2` with `F = U + iV`.
    pub fn f_z(&self) -> Complex64 {
        let i = Complex64::i();
        let fx = self.ux + i * self.vx;
        let fy = self.uy + i * self.vy;
        (fx - i * fy) * 0.5
    }

    /// `F_z̄ = (F_x + i F_y) / 2`.
    pub fn f_zbar(&self) -> Complex64 {
        let i = Complex64::i();
        let fx = self.ux + i * self.vx;
        let fy = self.uy + i * self.vy;
        (fx + i * fy) * 0.5
    }
}

const DERIVATIVE_KERNELS: [Kernel; 3] = [Kernel::phi(), Kernel::psi(), Kernel::phi2()];

/// `U_x = e^u * φ_y`, `V_x = e^u * ψ_y`, `U_y = V_x / 2`,
/// `V_y = U_x + (e^u * φ''_y) / 2`, with `e^u` carrying the curve constant.
pub fn partials(u: &SampledFunction, x: f64, y: f64, opts: &ExtensionOptions) -> Result<Partials> {
    let curve = gamma(u, opts.normalize)?;
    let c = convolve_source_at(&curve.derivative_source(), &DERIVATIVE_KERNELS, x, y, &opts.kernels)?;
    Ok(Partials::from_convolutions(c[0], c[1], c[2]))
}

/// The four partial-derivative fields on the upper half-plane.
pub fn partials_field(u: &SampledFunction, grid: &Grid, opts: &ExtensionOptions) -> Result<[HalfPlaneField; 4]> {
    let curve = gamma(u, opts.normalize)?;
    let c = convolve_source_grid(&curve.derivative_source(), &DERIVATIVE_KERNELS, grid, opts.engine, &opts.kernels)?;
    let make = |p: Partial, v: Vec<Complex64>| HalfPlaneField::new(grid.clone(), v, HalfPlane::Upper, Content::Derivative(p));
    let (phi, psi, phi2) = (&c[0], &c[1], &c[2]);
    let uy = psi.iter().map(|v| v * 0.5).collect();
    let vy = phi.iter().zip(phi2).map(|(a, b)| a + b * 0.5).collect();
    Ok([
        make(Partial::Ux, phi.clone())?,
        make(Partial::Uy, uy)?,
        make(Partial::Vx, psi.clone())?,
        make(Partial::Vy, vy)?,
    ])
}

/// `F_z` and `F_z̄` over a grid.
#[derive(Clone, Debug)]
pub struct ComplexDerivatives {
    pub fz: HalfPlaneField,
    pub fzbar: HalfPlaneField,
}

impl ComplexDerivatives {
    /// `|F_z|^2 - |F_z̄|^2` at every grid point, level by level.
    pub fn jacobian(&self) -> Vec<f64> {
        self.fz.values().iter().zip(self.fzbar.values()).map(|(a, b)| a.norm_sqr() - b.norm_sqr()).collect()
    }
}

/// `F_z = e^u * β_y` and `F_z̄ = e^u * α_y` (conjugated kernels on the lower
/// half-plane), including the curve constant.
pub fn complex_derivatives(
    u: &SampledFunction,
    grid: &Grid,
    half: HalfPlane,
    opts: &ExtensionOptions,
) -> Result<ComplexDerivatives> {
    let curve = gamma(u, opts.normalize)?;
    let kernels = [oriented(Kernel::beta(), half), oriented(Kernel::alpha(), half)];
    let mut c = convolve_source_grid(&curve.derivative_source(), &kernels, grid, opts.engine, &opts.kernels)?;
    let fzbar = c.pop().expect("two kernels");
    let fz = c.pop().expect("two kernels");
    Ok(ComplexDerivatives {
        fz: HalfPlaneField::new(grid.clone(), fz, half, Content::Derivative(Partial::Fz))?,
        fzbar: HalfPlaneField::new(grid.clone(), fzbar, half, Content::Derivative(Partial::Fzbar))?,
    })
}

fn ratio(num: Complex64, den: Complex64, x: f64, y: f64) -> Result<Complex64> {
    let value = den.norm();
    if !(value > DENOMINATOR_GUARD) {
        return Err(Error::DegenerateDenominator { x, y, value });
    }
    Ok(num / den)
}

/// `μ(x, y) = (α_y * e^u)(x) / (β_y * e^u)(x)` on the upper half-plane.
pub fn mu_at(u: &SampledFunction, x: f64, y: f64, set: &KernelSet) -> Result<Complex64> {
    mu_at_in(u, x, y, HalfPlane::Upper, set)
}

/// `μ` at `(x, y)` or, on the lower half-plane, at `(x, -y)`.
pub fn mu_at_in(u: &SampledFunction, x: f64, y: f64, half: HalfPlane, set: &KernelSet) -> Result<Complex64> {
    let src = Exponential::new(u, Complex64::new(1.0, 0.0));
    let kernels = [oriented(Kernel::alpha(), half), oriented(Kernel::beta(), half)];
    let c = convolve_source_at(&src, &kernels, x, y, set)?;
    ratio(c[0], c[1], x, half.sign() * y)
}

/// `μ` over a grid. The denominator guard applies to the unnormalized
/// `β_y * e^u`.
pub fn mu_field(u: &SampledFunction, grid: &Grid, half: HalfPlane, opts: &ExtensionOptions) -> Result<HalfPlaneField> {
    let src = Exponential::new(u, Complex64::new(1.0, 0.0));
    let kernels = [oriented(Kernel::alpha(), half), oriented(Kernel::beta(), half)];
    let c = convolve_source_grid(&src, &kernels, grid, opts.engine, &opts.kernels)?;
    let nx = grid.nx();
    let values = c[0]
        .iter()
        .zip(&c[1])
        .enumerate()
        .map(|(k, (&num, &den))| ratio(num, den, grid.x()[k % nx], half.sign() * grid.y()[k / nx]))
        .collect::<Result<_>>()?;
    HalfPlaneField::new(grid.clone(), values, half, Content::Mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::geometric_levels;
    use crate::funcspace::ExtensionPolicy;

    fn sine(eps: f64) -> SampledFunction {
        SampledFunction::from_real_fn(move |t| eps * t.sin(), -40.0, 40.0, 2049, ExtensionPolicy::ConstantExtend)
            .unwrap()
    }

    fn opts() -> ExtensionOptions {
        ExtensionOptions::default()
    }

    #[test]
    fn zero_driver_is_identity() {
        let u = SampledFunction::from_real_samples(&[0.0; 257], -8.0, 8.0, ExtensionPolicy::ConstantExtend).unwrap();
        let grid = Grid::on_samples_within(&u, -4.0, 4.0, 4, geometric_levels(1e-3, 10.0, 12).unwrap()).unwrap();
        for engine in [Engine::Direct, Engine::Fft] {
            let f = extend(&u, &grid, HalfPlane::Upper, &opts().with_engine(engine)).unwrap();
            for (j, &y) in grid.y().iter().enumerate() {
                for (i, &x) in grid.x().iter().enumerate() {
                    assert!((f.value(i, j) - Complex64::new(x, y)).norm() < 1e-9, "{engine:?} {x} {y}");
                }
            }
            let lower = extend(&u, &grid, HalfPlane::Lower, &opts().with_engine(engine)).unwrap();
            assert!((lower.value(3, 2) - Complex64::new(grid.x()[3], -grid.y()[2])).norm() < 1e-9);
        }
        let p = partials(&u, 0.3, 0.7, &opts()).unwrap();
        for (got, want) in [(p.ux, 1.0), (p.uy, 0.0), (p.vx, 0.0), (p.vy, 1.0)] {
            assert!((got - want).norm() < 1e-12);
        }
        assert!(mu_at(&u, 0.0, 1.0, &opts().kernels).unwrap().norm() < 1e-15);
    }

    #[test]
    fn partials_match_finite_differences() {
        let u = sine(0.1);
        let (x, y) = (0.0, 0.5);
        let p = partials(&u, x, y, &opts()).unwrap();
        let d = 1e-4 * y;
        let f = |x, y| extend_at(&u, x, y, &opts()).unwrap();
        let fx = (f(x + d, y) - f(x - d, y)) / (2.0 * d);
        let fy = (f(x, y + d) - f(x, y - d)) / (2.0 * d);
        let i = Complex64::i();
        assert!((fx - (p.ux + i * p.vx)).norm() < 1e-7);
        assert!((fy - (p.uy + i * p.vy)).norm() < 1e-7);
        let mu = mu_at(&u, x, y, &opts().kernels).unwrap();
        assert!((mu - p.f_zbar() / p.f_z()).norm() < 1e-12);
    }

    #[test]
    fn lower_half_plane_is_reflection_for_real_driver() {
        let u = sine(0.2);
        let set = opts().kernels;
        for &(x, y) in &[(0.3, 0.1), (-1.0, 2.0)] {
            let up = mu_at_in(&u, x, y, HalfPlane::Upper, &set).unwrap();
            let down = mu_at_in(&u, x, y, HalfPlane::Lower, &set).unwrap();
            assert!((up.conj() - down).norm() < 1e-13);
        }
    }

    #[test]
    fn guard_trips_on_vanishing_denominator() {
        let u = SampledFunction::from_real_samples(&[-60.0; 65], -1.0, 1.0, ExtensionPolicy::ConstantExtend).unwrap();
        let err = mu_at(&u, 0.0, 0.5, &opts().kernels).unwrap_err();
        assert_eq!(err.guard_name(), Some("degenerate-denominator"));
    }
}
