//! The strip `[0, 1) × (0, c]` mapped onto the annulus `r0 ≤ |w| < 1` by
//! `w = e^{2πiz}`, with `c = log(1/r0) / 2π`, and the disk dilatation
//! `ν(w) = -μ(z) w / w̄`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_circle_data, circle_besov_norm, lift};
use crate::diagnostics::{carleson_profile, CarlesonProfile};
use crate::error::{Error, Result};
use crate::extension::{extend, mu_field, ExtensionOptions};
use crate::field::{geometric_levels, Content, Grid, HalfPlane, HalfPlaneField};
use crate::funcspace::{abs_pow, check_exponent, BesovEstimate, SampledFunction};
use crate::numerics::{ordered_max, pairwise_sum};

pub const DEFAULT_R0: f64 = 0.5;

/// Rejects `r0` outside `(e^{-π}, 1)`.
pub fn check_radius(r0: f64) -> Result<()> {
    if r0 > (-PI).exp() && r0 < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r0))
    }
}

/// `c = log(1/r0) / 2π`, the strip height that maps onto `|w| > r0`.
pub fn strip_height(r0: f64) -> Result<f64> {
    check_radius(r0)?;
    Ok((1.0 / r0).ln() / (2.0 * PI))
}

/// Sample nodes of one period as x-nodes and `levels` geometric heights from
/// `y_min` up to the strip height.
pub fn strip_grid(v: &SampledFunction, y_min: f64, levels: usize, r0: f64) -> Result<Grid> {
    check_circle_data(v)?;
    let c = strip_height(r0)?;
    if !(y_min < c) {
        return Err(Error::InvalidGrid(format!("y_min = {y_min} must be below the strip height {c}")));
    }
    let x = (0..v.len() - 1).map(|i| v.node(i)).collect();
    Grid::new(x, geometric_levels(y_min, c, levels)?)
}

/// `ν` on the rings `r_j = e^{-2π y_j}`, angles `θ_k = 2π x_k mod 2π`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskField {
    heights: Vec<f64>,
    radii: Vec<f64>,
    angles: Vec<f64>,
    /// Ring by ring: `values[j * angles.len() + k]`.
    values: Vec<Complex64>,
    r0: f64,
}

impl DiskField {
    /// Radii, outermost ring first.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn ring(&self, j: usize) -> &[Complex64] {
        let n = self.angles.len();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Values used on `|w| ≤ r0`: the innermost ring, continued radially.
    pub fn fill(&self) -> &[Complex64] {
        self.ring(self.radii.len() - 1)
    }

    pub fn sup_modulus(&self) -> f64 {
        let m: Vec<f64> = self.values.iter().map(|z| z.norm()).collect();
        ordered_max(&m).unwrap_or(0.0)
    }

    /// `r,theta,re,im` rows for the annulus.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: Option<&str>) -> Result<()> {
        writeln!(out, "# content=nu r0={}", self.r0)?;
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "r,theta,re,im")?;
        for (j, &r) in self.radii.iter().enumerate() {
            for (k, &t) in self.angles.iter().enumerate() {
                let v = self.ring(j)[k];
                writeln!(out, "{r:.17e},{t:.17e},{:.17e},{:.17e}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Carries a dilatation field on one period of the strip to the annulus.
///
/// The grid must have uniformly spaced x-nodes spanning one period, with a
/// power-of-two count (a repeated endpoint is dropped), and levels reaching
/// the strip height; levels above it are ignored.
pub fn project_disk(mu: &HalfPlaneField, r0: f64) -> Result<DiskField> {
    mu.require(Content::Mu)?;
    if mu.half_plane() != HalfPlane::Upper {
        return Err(Error::InvalidGrid("the strip must lie in the upper half-plane".into()));
    }
    let c = strip_height(r0)?;
    let x = mu.x();
    let mut nx = x.len();
    if nx >= 2 && (x[nx - 1] - x[0] - 1.0).abs() < 1e-9 {
        nx -= 1;
    }
    if nx < 2 || !nx.is_power_of_two() {
        return Err(Error::InvalidGrid(format!("{nx} angular nodes; need a power of two")));
    }
    let h = 1.0 / nx as f64;
    if x[..nx].windows(2).any(|w| (w[1] - w[0] - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidGrid("strip x-nodes must cover one period with uniform spacing".into()));
    }
    let y = mu.y();
    let top = y[y.len() - 1];
    if top < c * (1.0 - 1e-9) {
        return Err(Error::InvalidGrid(format!("strip reaches y = {top}, below the height {c}")));
    }
    let used: Vec<usize> = (0..y.len()).filter(|&j| y[j] <= c * (1.0 + 1e-9)).collect();
    let angles: Vec<f64> = x[..nx].iter().map(|&t| 2.0 * PI * t.rem_euclid(1.0)).collect();
    let values = used
        .par_iter()
        .flat_map_iter(|&j| {
            let level = mu.level(j);
            x[..nx].iter().enumerate().map(move |(k, &t)| {
                let phase = Complex64::from_polar(1.0, 4.0 * PI * t);
                -level[k] * phase
            })
        })
        .collect();
    Ok(DiskField {
        heights: used.iter().map(|&j| y[j]).collect(),
        radii: used.iter().map(|&j| (-2.0 * PI * y[j]).exp()).collect(),
        angles,
        values,
        r0,
    })
}

/// `∬ |ν|^p / (1 - |w|^2)^2 du dv`, split at `|w| = r0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskNorm {
    pub p: f64,
    /// Annulus between the outermost ring and `r0`, computed on the strip.
    pub annulus: f64,
    /// Estimate for the rim outside the outermost ring, assuming `|μ| ∝ y`.
    pub rim_tail: f64,
    /// `π (1 - r0^2)^{-2} sup |ν|^p`, bounding the part inside `r0`.
    pub compact: f64,
}

impl DiskNorm {
    pub fn total(&self) -> f64 {
        self.annulus + self.rim_tail + self.compact
    }
}

/// `W(y) = ∫ ω` and `M(y) = ∫ y ω` for the strip weight
/// `ω(y) = 4π^2 e^{-4πy} / (1 - e^{-4πy})^2`.
fn strip_primitives(y: f64) -> (f64, f64) {
    let s = 4.0 * PI * y;
    let one_minus = -(-s).exp_m1();
    let w = -PI / one_minus;
    let m = 0.25 * (-s / one_minus + s.exp_m1().ln());
    (w, m)
}

/// Weights `(w0, w1)` integrating a linear `G` against `ω` on `[a, b]`.
fn strip_weights(a: f64, b: f64) -> (f64, f64) {
    let (wa, ma) = strip_primitives(a);
    let (wb, mb) = strip_primitives(b);
    let mass = wb - wa;
    let slope = (mb - ma - a * mass) / (b - a);
    (mass - slope, slope)
}

pub fn disk_p_norm(disk: &DiskField, p: f64) -> Result<DiskNorm> {
    check_exponent(p)?;
    let n = disk.angles.len() as f64;
    let rows: Vec<f64> = (0..disk.radii.len())
        .map(|j| pairwise_sum(&disk.ring(j).iter().map(|&z| abs_pow(z, p)).collect::<Vec<_>>()) / n)
        .collect();
    let y = &disk.heights;
    let mut terms = Vec::with_capacity(2 * y.len());
    for j in 1..y.len() {
        let (w0, w1) = strip_weights(y[j - 1], y[j]);
        terms.push(w0 * rows[j - 1]);
        terms.push(w1 * rows[j]);
    }
    let r0 = disk.r0;
    Ok(DiskNorm {
        p,
        annulus: pairwise_sum(&terms),
        rim_tail: rows[0] / (4.0 * (p - 1.0) * y[0]),
        compact: PI / (1.0 - r0 * r0).powi(2) * disk.sup_modulus().powf(p),
    })
}

/// `max |F(x + 1, y) - F(x, y) - 1|` over the grid.
pub fn periodicity_defect(v: &SampledFunction, grid: &Grid, opts: &ExtensionOptions) -> Result<f64> {
    let u = lift(v)?;
    let shifted = Grid::new(grid.x().iter().map(|x| x + 1.0).collect(), grid.y().to_vec())?;
    let f = extend(&u, grid, HalfPlane::Upper, opts)?;
    let g = extend(&u, &shifted, HalfPlane::Upper, opts)?;
    let d: Vec<f64> = f.values().iter().zip(g.values()).map(|(a, b)| (b - a - 1.0).norm()).collect();
    Ok(ordered_max(&d).unwrap_or(0.0))
}

/// Everything computed from circle data `v`.
#[derive(Clone, Debug)]
pub struct CircleAnalysis {
    pub mu: HalfPlaneField,
    pub disk: DiskField,
    pub norm: DiskNorm,
    pub besov: BesovEstimate,
    pub periodicity_defect: f64,
    pub carleson: CarlesonProfile,
}

/// Lift, dilatation on the strip, projection, and the disk norm.
pub fn circle_dilatation(
    v: &SampledFunction,
    p: f64,
    r0: f64,
    y_min: f64,
    levels: usize,
    opts: &ExtensionOptions,
) -> Result<CircleAnalysis> {
    let u = lift(v)?;
    let grid = strip_grid(&u, y_min, levels, r0)?;
    let mu = mu_field(&u, &grid, HalfPlane::Upper, opts)?;
    let disk = project_disk(&mu, r0)?;
    Ok(CircleAnalysis {
        norm: disk_p_norm(&disk, p)?,
        besov: circle_besov_norm(&u, p)?,
        periodicity_defect: periodicity_defect(&u, &grid, opts)?,
        carleson: carleson_profile(&mu)?,
        disk,
        mu,
    })
}
