//! Pointwise truncation and mollification of driving functions.

use std::sync::Arc;

use num_complex::Complex64;

use super::sampled::SampledFunction;
use crate::error::{Error, Result};
use crate::numerics::gl_panel;

/// `1 / ∫_{-1}^{1} exp(1/(x^2 - 1)) dx`, the normalizer of the bump.
pub const BUMP_NORMALIZER: f64 = 2.252_283_621_043_581_7;

/// The bump `c exp(1/(x^2 - 1))` on `(-1, 1)`, zero elsewhere.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        BUMP_NORMALIZER * (1.0 / (x * x - 1.0)).exp()
    }
}

/// Clamp to `[-n, n]`: `max(min(u, n), -n)`.
pub fn truncate(u: &SampledFunction, n: f64) -> Result<SampledFunction> {
    if !(n > 0.0) {
        return Err(Error::InvalidFunction(format!("truncation level {n} must be positive")));
    }
    if let Some(i) = u.samples().iter().position(|z| z.im != 0.0) {
        return Err(Error::ComplexClamp(i));
    }
    Ok(u.map(move |z| Complex64::new(z.re.clamp(-n, n), 0.0)))
}

/// Fixed quadrature on `[-1, 1]` for the bump, fine enough to resolve the
/// piecewise-linear structure of `u` at width `eps`.
fn bump_rule(eps: f64, step: f64) -> Vec<(f64, f64)> {
    let panels = ((4.0 * eps / step).ceil() as usize).max(64);
    let width = 2.0 / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let a = -1.0 + k as f64 * width;
            gl_panel(a, a + width)
        })
        .map(|(s, w)| (s, w * bump(s)))
        .collect()
}

/// Convolution with `eta_eps(x) = eta(x / eps) / eps`.
///
/// The result keeps the grid and policy of `u` and carries a handle that
/// evaluates the convolution exactly at every point.
pub fn mollify(u: &SampledFunction, eps: f64) -> Result<SampledFunction> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidWidth(eps));
    }
    let rule = Arc::new(bump_rule(eps, u.step()));
    let source = u.clone();
    let smooth = move |x: f64| -> Complex64 {
        rule.iter().map(|&(s, w)| source.eval(x - eps * s) * w).sum()
    };
    SampledFunction::from_fn(smooth, u.x_min(), u.x_max(), u.len(), u.policy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::sampled::ExtensionPolicy;
    use crate::numerics::gl_integrate;

    #[test]
    fn normalizer_matches_quadrature() {
        let mass = gl_integrate(|x| (1.0 / (x * x - 1.0)).exp(), -1.0, 1.0, 400);
        assert!((1.0 / mass - BUMP_NORMALIZER).abs() < 1e-12, "{}", 1.0 / mass);
    }

    #[test]
    fn truncate_clamps() {
        let u = SampledFunction::from_real_fn(|x| x, -4.0, 4.0, 9, ExtensionPolicy::ConstantExtend).unwrap();
        let t = truncate(&u, 2.0).unwrap();
        let expect = [-2.0, -2.0, -2.0, -1.0, 0.0, 1.0, 2.0, 2.0, 2.0];
        for (z, e) in t.samples().iter().zip(expect) {
            assert_eq!(z.re, e);
        }
        assert_eq!(t.eval_real(3.5), 2.0);
    }

    #[test]
    fn truncate_rejects_complex() {
        let u = SampledFunction::from_fn(|x| Complex64::new(x, 0.1), 0.0, 1.0, 5, ExtensionPolicy::ConstantExtend)
            .unwrap();
        assert!(matches!(truncate(&u, 1.0), Err(Error::ComplexClamp(0))));
    }

    #[test]
    fn mollify_keeps_constants() {
        let u = SampledFunction::from_real_samples(&[0.7; 33], -1.0, 1.0, ExtensionPolicy::ConstantExtend).unwrap();
        let m = mollify(&u, 0.3).unwrap();
        for z in m.samples() {
            assert!((z.re - 0.7).abs() < 1e-13);
        }
        assert!(matches!(mollify(&u, 0.0), Err(Error::InvalidWidth(_))));
    }

    #[test]
    fn mollified_step_is_monotone_ramp() {
        let u = SampledFunction::from_real_fn(
            |x| if x >= 0.0 { 1.0 } else { 0.0 },
            -1.0,
            1.0,
            401,
            ExtensionPolicy::ConstantExtend,
        )
        .unwrap()
        .without_handle();
        let m = mollify(&u, 0.1).unwrap();
        let v = m.real_samples();
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-14));
        assert!(m.eval_real(-0.11).abs() < 1e-12);
        assert!((m.eval_real(0.11) - 1.0).abs() < 1e-12);
        // symmetric about the jump midpoint of the interpolant
        assert!((m.eval_real(-0.0025) - 0.5).abs() < 1e-9);
    }
}
