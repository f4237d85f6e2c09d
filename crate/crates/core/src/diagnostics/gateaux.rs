//! Symmetric difference quotients `(μ_{u+hv} - μ_{u-hv}) / 2h` of the map
//! `u ↦ μ_u`. For a holomorphic map the error is `O(h^2)`, so halving `h`
//! shrinks successive differences by a factor close to 4.

use std::io::Write;

use num_complex::Complex64;

use super::measure::hyperbolic_integral;
use crate::error::{Error, Result};
use crate::extension::{mu_field, ExtensionOptions};
use crate::field::{Grid, HalfPlane, HalfPlaneField};
use crate::funcspace::SampledFunction;
use crate::numerics::ordered_max;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateauxRow {
    pub step: f64,
    /// Grid sup of the difference from the previous row's quotient.
    pub sup_difference: Option<f64>,
    /// Hyperbolic `p`-norm (window only) of the same difference.
    pub p_difference: Option<f64>,
    /// Previous `sup_difference` over this one.
    pub sup_ratio: Option<f64>,
    pub p_ratio: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct GateauxTable {
    pub p: f64,
    pub rows: Vec<GateauxRow>,
    /// Richardson extrapolation of the last two quotients.
    pub limit: HalfPlaneField,
}

impl GateauxTable {
    /// Every defined ratio, sup ratios first.
    pub fn ratios(&self) -> Vec<f64> {
        let sup = self.rows.iter().filter_map(|r| r.sup_ratio);
        let p = self.rows.iter().filter_map(|r| r.p_ratio);
        sup.chain(p).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,sup_difference,p_difference,sup_ratio,p_ratio")?;
        let cell = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.17e}"));
        for r in &self.rows {
            writeln!(
                out,
                "{:.17e},{},{},{},{}",
                r.step,
                cell(r.sup_difference),
                cell(r.p_difference),
                cell(r.sup_ratio),
                cell(r.p_ratio)
            )?;
        }
        Ok(())
    }
}

fn quotient(u: &SampledFunction, v: &SampledFunction, h: f64, grid: &Grid, opts: &ExtensionOptions) -> Result<HalfPlaneField> {
    let one = Complex64::new(1.0, 0.0);
    let plus = mu_field(&u.combine(one, v, Complex64::new(h, 0.0))?, grid, HalfPlane::Upper, opts)?;
    let minus = mu_field(&u.combine(one, v, Complex64::new(-h, 0.0))?, grid, HalfPlane::Upper, opts)?;
    let values = plus.values().iter().zip(minus.values()).map(|(a, b)| (a - b) / (2.0 * h)).collect();
    HalfPlaneField::new(grid.clone(), values, HalfPlane::Upper, plus.content())
}

fn difference(a: &HalfPlaneField, b: &HalfPlaneField) -> HalfPlaneField {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    HalfPlaneField::new(a.grid().clone(), values, a.half_plane(), a.content()).expect("same grid")
}

/// Convergence table of the symmetric quotients over `steps` (decreasing).
pub fn gateaux_check(
    u: &SampledFunction,
    v: &SampledFunction,
    steps: &[f64],
    grid: &Grid,
    p: f64,
    opts: &ExtensionOptions,
) -> Result<GateauxTable> {
    if steps.is_empty() || steps.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidFunction("difference steps must be positive".into()));
    }
    let quotients = steps.iter().map(|&h| quotient(u, v, h, grid, opts)).collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<GateauxRow> = Vec::with_capacity(steps.len());
    for (k, &step) in steps.iter().enumerate() {
        let mut row = GateauxRow { step, sup_difference: None, p_difference: None, sup_ratio: None, p_ratio: None };
        if k > 0 {
            let d = difference(&quotients[k - 1], &quotients[k]);
            let moduli: Vec<f64> = d.values().iter().map(|z| z.norm()).collect();
            row.sup_difference = ordered_max(&moduli);
            row.p_difference = Some(hyperbolic_integral(&d, p)?.window_norm());
            let prev = &rows[k - 1];
            row.sup_ratio = prev.sup_difference.zip(row.sup_difference).map(|(a, b)| a / b);
            row.p_ratio = prev.p_difference.zip(row.p_difference).map(|(a, b)| a / b);
        }
        rows.push(row);
    }
    let n = quotients.len();
    let limit = if n < 2 {
        quotients[0].clone()
    } else {
        let r2 = (steps[n - 2] / steps[n - 1]).powi(2);
        let (coarse, fine) = (&quotients[n - 2], &quotients[n - 1]);
        let values = fine.values().iter().zip(coarse.values()).map(|(f, c)| (f * r2 - c) / (r2 - 1.0)).collect();
        HalfPlaneField::new(grid.clone(), values, HalfPlane::Upper, fine.content())?
    };
    Ok(GateauxTable { p, rows, limit })
}
