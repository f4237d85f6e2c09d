//! Measurements on dilatation fields: sup norm, hyperbolic `p`-norm, Carleson
//! boxes, boundary-vanishing profiles, bi-Lipschitz ratios, maximal
//! dilatation and the finite-difference derivative check for `u ↦ μ_u`.

mod gateaux;
mod measure;
mod report;

use std::io::Write;

use crate::error::{Error, Result};
use crate::extension::{complex_derivatives, extend, ExtensionOptions};
use crate::field::{Content, Grid, HalfPlane, HalfPlaneField};
use crate::funcspace::SampledFunction;
use crate::numerics::ordered_max;

pub use gateaux::{gateaux_check, GateauxRow, GateauxTable};
pub use measure::{
    carleson_box, carleson_profile, carleson_profile_to, hyperbolic_p_norm, CarlesonEntry, CarlesonProfile,
    HyperbolicNorm, CARLESON_MAX_LEVEL,
};
pub use report::{diagnose, DiagnosticsReport, FuncspaceSummary};

/// A vanishing profile whose smallest-`t` entry is below this fraction of the
/// global supremum is flagged as vanishing at the boundary.
pub const VANISHING_THRESHOLD: f64 = 0.1;

fn nonempty_mu(field: &HalfPlaneField) -> Result<()> {
    field.require(Content::Mu)?;
    if field.is_empty() {
        return Err(Error::EmptyField);
    }
    Ok(())
}

/// Largest `|μ|` over the grid.
pub fn sup_norm(field: &HalfPlaneField) -> Result<f64> {
    nonempty_mu(field)?;
    let moduli: Vec<f64> = field.values().iter().map(|z| z.norm()).collect();
    Ok(ordered_max(&moduli).unwrap_or(0.0))
}

/// `K = (1 + k) / (1 - k)` for `k = sup |μ| < 1`; `None` when the field is
/// not quasiconformal.
pub fn maximal_dilatation(field: &HalfPlaneField) -> Result<Option<f64>> {
    Ok(dilatation_from_sup(sup_norm(field)?))
}

pub(crate) fn dilatation_from_sup(k: f64) -> Option<f64> {
    (k < 1.0).then(|| (1.0 + k) / (1.0 - k))
}

/// `(y_j, max_{y_i ≤ y_j} max_x |μ|)` from the lowest level upward.
pub fn vanishing_profile(field: &HalfPlaneField) -> Result<Vec<(f64, f64)>> {
    nonempty_mu(field)?;
    let mut running = 0.0f64;
    Ok(field
        .y()
        .iter()
        .enumerate()
        .map(|(j, &y)| {
            let level: Vec<f64> = field.level(j).iter().map(|z| z.norm()).collect();
            let m = ordered_max(&level).unwrap_or(0.0);
            running = if m.is_nan() || running.is_nan() { f64::NAN } else { running.max(m) };
            (y, running)
        })
        .collect())
}

/// Whether the smallest-`t` entry is below [`VANISHING_THRESHOLD`] times the
/// largest.
pub fn is_vanishing(profile: &[(f64, f64)]) -> bool {
    match (profile.first(), profile.last()) {
        (Some(&(_, low)), Some(&(_, high))) => high > 0.0 && low < VANISHING_THRESHOLD * high,
        _ => false,
    }
}

pub fn write_profile_csv<W: Write>(profile: &[(f64, f64)], mut out: W) -> Result<()> {
    writeln!(out, "t,sup")?;
    for (t, s) in profile {
        writeln!(out, "{t:.17e},{s:.17e}")?;
    }
    Ok(())
}

/// Range of `y |F_z| / Im F` over the grid on the upper half-plane.
pub fn bilipschitz_ratio(u: &SampledFunction, grid: &Grid, opts: &ExtensionOptions) -> Result<(f64, f64)> {
    if !u.is_real(0.0) {
        return Err(Error::InvalidFunction("bi-Lipschitz ratio needs a real-valued driver".into()));
    }
    let f = extend(u, grid, HalfPlane::Upper, opts)?;
    let d = complex_derivatives(u, grid, HalfPlane::Upper, opts)?;
    let nx = grid.nx();
    let mut ratios = Vec::with_capacity(grid.len());
    for (k, (fv, fz)) in f.values().iter().zip(d.fz.values()).enumerate() {
        let (x, y) = (grid.x()[k % nx], grid.y()[k / nx]);
        if !(fv.im > 0.0) {
            return Err(Error::NotSelfMap { x, y, value: fv.im });
        }
        ratios.push(y * fz.norm() / fv.im);
    }
    let max = ordered_max(&ratios).unwrap_or(f64::NAN);
    let min = -ordered_max(&ratios.iter().map(|r| -r).collect::<Vec<_>>()).unwrap_or(f64::NAN);
    Ok((min, max))
}
