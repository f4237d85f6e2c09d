//! Circle maps through their periodic lifts.
//!
//! A circle homeomorphism `g` with `g(e^{2πix}) = e^{2πif(x)}` is driven by
//! `u = log f'`, which is the 1-periodic lift of `v = log |g'|`. The
//! extension of the lift commutes with `z ↦ z + 1` up to the translation, so
//! `w = e^{2πiz}` carries its dilatation to the punctured disk.

mod disk;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{abs_pow, bmo_norm, check_exponent, classify, BesovEstimate, ExtensionPolicy, Interval, IntervalFamily, SampledFunction};
use crate::numerics::{pairwise_sum, zeta};

pub use disk::{
    check_radius, circle_dilatation, disk_p_norm, periodicity_defect, project_disk, strip_grid, strip_height,
    CircleAnalysis, DiskField, DiskNorm, DEFAULT_R0,
};

const PERIOD_TOL: f64 = 1e-12;

/// Checks that `v` is real, periodic, and has period 1.
fn check_circle_data(v: &SampledFunction) -> Result<()> {
    if v.policy() != ExtensionPolicy::Periodic {
        return Err(Error::NonPeriodic(format!("extension policy is {}", v.policy().name())));
    }
    if (v.period() - 1.0).abs() > PERIOD_TOL {
        return Err(Error::NonPeriodic(format!("period is {}, expected 1", v.period())));
    }
    Ok(())
}

/// The lift `u(x) = v(x mod 1)` of real data on the circle.
pub fn lift(v: &SampledFunction) -> Result<SampledFunction> {
    check_circle_data(v)?;
    if !v.is_real(0.0) {
        return Err(Error::InvalidFunction("circle data must be real-valued".into()));
    }
    Ok(v.clone())
}

/// The lift sampled explicitly over `[x_min - k, x_max + k]`.
pub fn lift_over(v: &SampledFunction, k: usize) -> Result<SampledFunction> {
    let u = lift(v)?;
    let periods = 2 * k + 1;
    let n = periods * (u.len() - 1) + 1;
    let w = u.clone();
    SampledFunction::from_fn(move |x| w.eval(x), u.x_min() - k as f64, u.x_max() + k as f64, n, ExtensionPolicy::Periodic)
}

/// Interval centres kept per scale by [`circle_bmo_norm`].
const CIRCLE_BMO_CENTERS: usize = 1024;

/// Supremum of the mean oscillation over arcs centred at the sample nodes
/// with dyadic half-lengths up to half the circle.
pub fn circle_bmo_norm(v: &SampledFunction) -> Result<f64> {
    let tiled = lift_over(v, 1)?;
    let n = v.len() - 1;
    let h = v.step();
    let stride = n.div_ceil(CIRCLE_BMO_CENTERS).max(1);
    let mut arcs = Vec::new();
    let mut half = h;
    while half <= 0.5 + 1e-12 {
        arcs.extend((0..n).step_by(stride).map(|i| Interval::new(v.node(i), half)));
        half *= 2.0;
    }
    bmo_norm(&tiled, &IntervalFamily::new(arcs)?)
}

/// `∬_{[0,1]^2} |v(x) - v(y)|^p / (4 sin^2 π(x - y)) dx dy`, reported as the
/// `p`-th root when finite.
///
/// The integral is `∫_0^1 D(r) / (4 sin^2 πr) dr` with the periodic difference
/// energy `D`. Both ends of `(0, 1)` carry the same `r^(p-2)` singularity and
/// get the same band correction as the line seminorm.
pub fn circle_besov_norm(v: &SampledFunction, p: f64) -> Result<BesovEstimate> {
    check_exponent(p)?;
    check_circle_data(v)?;
    let n = v.len() - 1;
    let values = &v.samples()[..n];
    let h = v.step();
    let integrand: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let terms: Vec<f64> = (0..n).map(|i| abs_pow(values[(i + k) % n] - values[i], p)).collect();
            let energy = h * pairwise_sum(&terms);
            let s = (std::f64::consts::PI * k as f64 * h).sin();
            energy / (4.0 * s * s)
        })
        .collect();
    let band = |m: usize| -> f64 {
        if m >= n {
            return f64::INFINITY;
        }
        let spacing = m as f64 * h;
        let terms: Vec<f64> = (1..n).filter(|k| k % m == 0).map(|k| spacing * integrand[k]).collect();
        // f(r) ≈ A r^(p-2) at each end with A = f(mh) (mh)^(2-p)
        let correction = -zeta(2.0 - p) * integrand[m] * spacing;
        pairwise_sum(&terms) + 2.0 * correction
    };
    if values.iter().all(|z| (z - values[0]).norm() == 0.0) {
        return Ok(BesovEstimate::Finite { norm: 0.0, refinements: [0.0; 3] });
    }
    Ok(classify([band(4), band(2), band(1)], p))
}

/// `e^{2πiz}` for `z = x + iy`.
pub fn exp_map(z: Complex64) -> Complex64 {
    (Complex64::i() * 2.0 * std::f64::consts::PI * z).exp()
}
