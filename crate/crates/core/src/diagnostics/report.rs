//! Scalar summaries of a driver `u` and its dilatation field.

use std::io::Write;

use num_complex::Complex64;

use super::measure::{carleson_profile, hyperbolic_p_norm, HyperbolicNorm};
use super::{bilipschitz_ratio, dilatation_from_sup, is_vanishing, sup_norm, vanishing_profile};
use crate::error::Result;
use crate::extension::{mu_field, ExtensionOptions};
use crate::field::{Grid, HalfPlane, HalfPlaneField};
use crate::funcspace::{
    a2_constant, a_infty_constant, besov_norm, bmo_norm, doubling_constant, exp_oscillation, neighborhood_distance,
    BesovEstimate, IntervalFamily, NeighborhoodDistance, SampledFunction,
};

/// Interval centres kept per dyadic scale in the summaries.
const SUMMARY_CENTERS: usize = 512;

fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn optional(v: Option<f64>, missing: &str) -> String {
    v.map_or_else(|| missing.to_string(), real)
}

/// Norms and weight constants of the driver itself.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncspaceSummary {
    pub p: f64,
    pub bmo: f64,
    pub exp_oscillation: f64,
    pub besov: BesovEstimate,
    /// `A_2`, `A_∞` and doubling constants of `e^u`; real drivers only.
    pub a2: Option<f64>,
    pub a_infty: Option<f64>,
    pub doubling: Option<f64>,
    pub distance: NeighborhoodDistance,
}

impl FuncspaceSummary {
    pub fn compute(u: &SampledFunction, p: f64) -> Result<Self> {
        let family = IntervalFamily::dyadic_strided(u, None, SUMMARY_CENTERS);
        let (a2, a_infty, doubling) = if u.is_real(0.0) {
            let omega = u.map(|z| Complex64::new(z.re.exp(), 0.0));
            (
                Some(a2_constant(&omega, &family)?),
                Some(a_infty_constant(&omega, &family)?),
                Some(doubling_constant(&omega, &family)?),
            )
        } else {
            (None, None, None)
        };
        Ok(FuncspaceSummary {
            p,
            bmo: bmo_norm(u, &family)?,
            exp_oscillation: exp_oscillation(u, &family)?,
            besov: besov_norm(u, p)?,
            a2,
            a_infty,
            doubling,
            distance: neighborhood_distance(u, p)?,
        })
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("bmo", real(self.bmo)),
            ("exp_oscillation", real(self.exp_oscillation)),
            ("besov", optional(self.besov.norm(), "divergent")),
            ("besov_divergent", self.besov.is_divergent().to_string()),
            ("a2", optional(self.a2, "na")),
            ("a_infty", optional(self.a_infty, "na")),
            ("doubling", optional(self.doubling, "na")),
            ("distance", optional(self.distance.value(), "outside")),
        ]
    }
}

/// Every scalar measured on one dilatation field.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsReport {
    pub p: f64,
    pub sup_norm: f64,
    pub p_norm: HyperbolicNorm,
    /// `None` when `sup_norm ≥ 1`.
    pub dilatation: Option<f64>,
    /// `(min, max)` of `y |F_z| / Im F`; real drivers only.
    pub bilipschitz: Option<(f64, f64)>,
    pub carleson_sup: f64,
    pub vanishing_profile: Vec<(f64, f64)>,
    pub in_m: bool,
    pub in_m0: bool,
    pub in_mp: bool,
    pub funcspace: Option<FuncspaceSummary>,
}

impl DiagnosticsReport {
    /// Report on an existing dilatation field; no bi-Lipschitz or driver data.
    pub fn from_field(mu: &HalfPlaneField, p: f64) -> Result<Self> {
        let sup = sup_norm(mu)?;
        let p_norm = hyperbolic_p_norm(mu, p)?;
        let profile = vanishing_profile(mu)?;
        let in_m = sup < 1.0;
        Ok(DiagnosticsReport {
            p,
            sup_norm: sup,
            p_norm,
            dilatation: dilatation_from_sup(sup),
            bilipschitz: None,
            carleson_sup: carleson_profile(mu)?.supremum(),
            in_m,
            in_m0: in_m && is_vanishing(&profile),
            in_mp: in_m && p_norm.integral().is_finite(),
            vanishing_profile: profile,
            funcspace: None,
        })
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("p", real(self.p)),
            ("sup_norm", real(self.sup_norm)),
            ("p_norm", real(self.p_norm.norm())),
            ("p_norm_window", real(self.p_norm.window_norm())),
            ("p_integral_window", real(self.p_norm.window)),
            ("p_integral_lower_tail", real(self.p_norm.lower_tail)),
            ("p_integral_upper_tail", real(self.p_norm.upper_tail)),
            ("x_window", format!("{}:{}", real(self.p_norm.x_range.0), real(self.p_norm.x_range.1))),
            ("y_window", format!("{}:{}", real(self.p_norm.y_range.0), real(self.p_norm.y_range.1))),
            ("K", optional(self.dilatation, "not qc")),
            ("bilip_min", optional(self.bilipschitz.map(|b| b.0), "na")),
            ("bilip_max", optional(self.bilipschitz.map(|b| b.1), "na")),
            ("carleson_sup", real(self.carleson_sup)),
            ("in_M", self.in_m.to_string()),
            ("in_M0", self.in_m0.to_string()),
            ("in_Mp", self.in_mp.to_string()),
        ];
        if let Some(f) = &self.funcspace {
            out.extend(f.entries());
        }
        out
    }

    /// `key=value` lines.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in self.entries() {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }

    /// Header row and one value row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let entries = self.entries();
        let keys: Vec<&str> = entries.iter().map(|(k, _)| *k).collect();
        let values: Vec<&str> = entries.iter().map(|(_, v)| v.as_str()).collect();
        writeln!(out, "{}", keys.join(","))?;
        writeln!(out, "{}", values.join(","))?;
        Ok(())
    }
}

/// `μ_u` on the upper half-plane of `grid`, and its full report.
pub fn diagnose(
    u: &SampledFunction,
    grid: &Grid,
    p: f64,
    opts: &ExtensionOptions,
) -> Result<(HalfPlaneField, DiagnosticsReport)> {
    let mu = mu_field(u, grid, HalfPlane::Upper, opts)?;
    let mut report = DiagnosticsReport::from_field(&mu, p)?;
    if u.is_real(0.0) {
        report.bilipschitz = Some(bilipschitz_ratio(u, grid, opts)?);
    }
    report.funcspace = Some(FuncspaceSummary::compute(u, p)?);
    Ok((mu, report))
}
