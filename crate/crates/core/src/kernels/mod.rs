//! The Gaussian family of convolution kernels and the two convolution engines.
//!
//! Every kernel used by the extension is a complex combination
//! `a φ + b ψ + c φ''` of the Gaussian `φ(x) = π^{-1/2} e^{-x^2}`, its derivative
//! `ψ = φ'` and its second derivative, so a [`Kernel`] stores those three
//! coefficients.

mod convolve;

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) use convolve::constant_end_jumps;
pub use convolve::{convolve_at, convolve_grid, convolve_source_at, convolve_source_grid, Engine, Source};

const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

pub fn phi(x: f64) -> f64 {
    INV_SQRT_PI * (-x * x).exp()
}

pub fn psi(x: f64) -> f64 {
    -2.0 * x * phi(x)
}

pub fn phi2(x: f64) -> f64 {
    (4.0 * x * x - 2.0) * phi(x)
}

/// `-φ''/4 + (3i/4) ψ`: the kernel of `F_z̄`.
pub fn alpha(x: f64) -> Complex64 {
    Kernel::alpha().eval(x)
}

/// `φ + φ''/4 + (i/4) ψ`: the kernel of `F_z`.
pub fn beta(x: f64) -> Complex64 {
    Kernel::beta().eval(x)
}

/// `a φ + b ψ + c φ''` with complex coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel {
    pub phi: Complex64,
    pub psi: Complex64,
    pub phi2: Complex64,
}

impl Kernel {
    pub const fn new(phi: Complex64, psi: Complex64, phi2: Complex64) -> Self {
        Kernel { phi, psi, phi2 }
    }

    const fn real(a: f64, b: f64, c: f64) -> Self {
        Kernel::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0), Complex64::new(c, 0.0))
    }

    pub const fn phi() -> Self {
        Kernel::real(1.0, 0.0, 0.0)
    }

    pub const fn psi() -> Self {
        Kernel::real(0.0, 1.0, 0.0)
    }

    pub const fn phi2() -> Self {
        Kernel::real(0.0, 0.0, 1.0)
    }

    pub const fn alpha() -> Self {
        Kernel::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.75), Complex64::new(-0.25, 0.0))
    }

    pub const fn beta() -> Self {
        Kernel::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.25), Complex64::new(0.25, 0.0))
    }

    /// `φ + i ψ`, so that `γ * K_y = U + iV`.
    pub const fn extension() -> Self {
        Kernel::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0))
    }

    /// Kernel with conjugated coefficients; since `φ, ψ, φ''` are real this is
    /// the pointwise conjugate.
    pub fn conj(self) -> Self {
        Kernel::new(self.phi.conj(), self.psi.conj(), self.phi2.conj())
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let g = phi(x);
        (self.phi + self.psi * (-2.0 * x) + self.phi2 * (4.0 * x * x - 2.0)) * g
    }

    /// `K^{(m)}(x)` for `m ≤ 2`, via `φ^{(n)} = (-1)^n H_n φ`.
    pub fn derivative(&self, m: usize, x: f64) -> Complex64 {
        assert!(m <= 2, "kernel derivatives are provided up to second order");
        let g = phi(x);
        let x2 = x * x;
        let hermite = [
            1.0,
            2.0 * x,
            4.0 * x2 - 2.0,
            8.0 * x2 * x - 12.0 * x,
            16.0 * x2 * x2 - 48.0 * x2 + 12.0,
        ];
        let d = |n: usize| if n % 2 == 0 { hermite[n] * g } else { -hermite[n] * g };
        self.phi * d(m) + self.psi * d(m + 1) + self.phi2 * d(m + 2)
    }

    /// `K_y(x) = K(x / y) / y`.
    pub fn scaled(&self, x: f64, y: f64) -> Complex64 {
        self.eval(x / y) / y
    }

    /// `∫ K`.
    pub fn mass(&self) -> Complex64 {
        self.phi
    }

    /// `∫ s K(s) ds`.
    pub fn first_moment(&self) -> Complex64 {
        -self.psi
    }
}

/// Truncation, quadrature density and decay constant of the kernel family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSet {
    /// Window half-width `T` in units of `y`.
    pub truncation: f64,
    /// Gauss–Legendre nodes per unit of `y`; a multiple of 8.
    pub nodes_per_unit: usize,
    /// `C` in `|α(x)|, |β(x)| ≤ C e^{-|x|}`.
    pub decay_constant: f64,
}

pub const DEFAULT_TRUNCATION: f64 = 10.0;
pub const DEFAULT_NODES_PER_UNIT: usize = 16;

impl Default for KernelSet {
    fn default() -> Self {
        KernelSet::new(DEFAULT_TRUNCATION, DEFAULT_NODES_PER_UNIT).expect("defaults are valid")
    }
}

impl KernelSet {
    pub fn new(truncation: f64, nodes_per_unit: usize) -> Result<Self> {
        if !(truncation >= 6.0 && truncation.is_finite()) {
            return Err(Error::InvalidKernelSet(format!("truncation T = {truncation} must be at least 6")));
        }
        if nodes_per_unit < 8 || nodes_per_unit % 8 != 0 {
            return Err(Error::InvalidKernelSet(format!(
                "nodes per unit = {nodes_per_unit} must be a positive multiple of 8"
            )));
        }
        Ok(KernelSet { truncation, nodes_per_unit, decay_constant: decay_sup(truncation, 100_000) * (1.0 + 1e-9) })
    }

    /// Width of one Gauss–Legendre panel in units of `y`.
    pub fn panel_width(&self) -> f64 {
        8.0 / self.nodes_per_unit as f64
    }

    /// Nodes and weights of the composite rule on `[-T, T]`, symmetric about 0.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let half_panels = (self.truncation / self.panel_width()).ceil() as usize;
        let width = self.truncation / half_panels as f64;
        let mut right: Vec<(f64, f64)> = (0..half_panels)
            .flat_map(|k| crate::numerics::gl_panel(k as f64 * width, (k + 1) as f64 * width))
            .collect();
        right.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut all: Vec<(f64, f64)> = right.iter().rev().map(|&(s, w)| (-s, w)).collect();
        all.extend(right);
        all
    }

    /// Writes `x, re, im` rows of `kernel` on `count` points of `[-T, T]`.
    pub fn write_sweep<W: Write>(&self, kernel: Kernel, count: usize, mut out: W) -> Result<()> {
        writeln!(out, "x,re,im")?;
        let count = count.max(2);
        for k in 0..count {
            let x = -self.truncation + 2.0 * self.truncation * k as f64 / (count - 1) as f64;
            let v = kernel.eval(x);
            writeln!(out, "{:.17e},{:.17e},{:.17e}", x, v.re, v.im)?;
        }
        Ok(())
    }
}

/// `max(|α|, |β|) e^{|x|}` over `count` uniform points of `[-t, t]`.
fn decay_sup(t: f64, count: usize) -> f64 {
    (0..count)
        .map(|k| {
            let x = -t + 2.0 * t * k as f64 / (count - 1) as f64;
            alpha(x).norm().max(beta(x).norm()) * x.abs().exp()
        })
        .fold(0.0, f64::max)
}
