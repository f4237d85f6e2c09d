//! Besov seminorm `(∬ |u(t) - u(s)|^p / |t - s|^2 ds dt)^(1/p)` on the line.
//!
//! The double integral is rewritten as `2 ∫_0^∞ D(r) / r^2 dr` with the
//! difference energy `D(r) = ∫ |u(t + r) - u(t)|^p dt`, evaluated on the sample
//! lattice `r = k h`. The band `|t - s| < h` is excluded from the lattice sum;
//! its contribution is restored by the leading generalized Euler–Maclaurin term
//! for an `r^(p-2)` endpoint singularity, `-ζ(2 - p) c h^(p-1)` with
//! `c = D(h) / h^p`. Coarser bands `2h` and `4h` are evaluated the same way and
//! drive the divergence test.

use num_complex::Complex64;

use super::sampled::{ExtensionPolicy, SampledFunction};
use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, zeta};

/// Relative growth across two band refinements that flags divergence.
pub const DIVERGENCE_GROWTH: f64 = 0.10;

/// Outcome of a Besov quadrature.
#[derive(Clone, Debug, PartialEq)]
pub enum BesovEstimate {
    /// `norm` is the p-th root of the integral; `refinements` holds the
    /// integral estimates at band widths `4h`, `2h`, `h`.
    Finite { norm: f64, refinements: [f64; 3] },
    Divergent { refinements: [f64; 3] },
}

impl BesovEstimate {
    pub fn norm(&self) -> Option<f64> {
        match self {
            BesovEstimate::Finite { norm, .. } => Some(*norm),
            BesovEstimate::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, BesovEstimate::Divergent { .. })
    }

    pub fn refinements(&self) -> [f64; 3] {
        match self {
            BesovEstimate::Finite { refinements, .. } | BesovEstimate::Divergent { refinements } => *refinements,
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

#[inline]
pub(crate) fn abs_pow(z: Complex64, p: f64) -> f64 {
    if p == 2.0 {
        z.norm_sqr()
    } else {
        z.norm_sqr().powf(0.5 * p)
    }
}

/// Decides finite versus divergent from the three band estimates.
pub(crate) fn classify(refinements: [f64; 3], p: f64) -> BesovEstimate {
    let [coarse, mid, fine] = refinements;
    let growing = fine > mid && mid > coarse;
    let divergent = !fine.is_finite() || (growing && fine - coarse > DIVERGENCE_GROWTH * coarse.abs());
    if divergent {
        BesovEstimate::Divergent { refinements }
    } else {
        BesovEstimate::Finite { norm: fine.max(0.0).powf(1.0 / p), refinements }
    }
}

/// Besov seminorm of `u` over the whole line, using the extension policy.
///
/// A constant continuation with different end values, or a nonconstant
/// periodic function, has an infinite integral and is reported divergent.
pub fn besov_norm(u: &SampledFunction, p: f64) -> Result<BesovEstimate> {
    check_exponent(p)?;
    let values = u.samples();
    let n = values.len();
    let scale = values.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let tol = 1e-9 * (1.0 + scale);
    let (left, right) = (values[0], values[n - 1]);
    let infinite = [f64::INFINITY; 3];
    if u.policy() == ExtensionPolicy::Periodic {
        let constant = values.iter().all(|z| (z - left).norm() <= tol);
        return Ok(if constant {
            BesovEstimate::Finite { norm: 0.0, refinements: [0.0; 3] }
        } else {
            BesovEstimate::Divergent { refinements: infinite }
        });
    }
    if (left - right).norm() > tol {
        return Ok(BesovEstimate::Divergent { refinements: infinite });
    }
    let h = u.step();
    let energy = difference_energy(values, p, h);
    let tail = energy[n - 1] / u.period();
    let refinements = [4, 2, 1].map(|m| band_integral(&energy, h, m, p, tail));
    Ok(classify(refinements, p))
}

/// `D(k h)` for `k = 0..n`, with `u` continued by its end values
/// (`D[0] = 0`). Entry `n - 1` equals the large-shift limit.
fn difference_energy(values: &[Complex64], p: f64, h: f64) -> Vec<f64> {
    let n = values.len();
    let (left, right) = (values[0], values[n - 1]);
    // prefix[k] = sum_{j<k} |u_j - left|^p, suffix[k] = sum_{i >= n-k} |right - u_i|^p
    let mut prefix = vec![0.0; n + 1];
    let mut suffix = vec![0.0; n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] + abs_pow(values[k] - left, p);
        suffix[k + 1] = suffix[k] + abs_pow(right - values[n - 1 - k], p);
    }
    let mut energy = vec![0.0; n];
    let mut terms = Vec::with_capacity(n);
    for k in 1..n {
        terms.clear();
        terms.extend((0..n - k).map(|i| abs_pow(values[i + k] - values[i], p)));
        energy[k] = h * (pairwise_sum(&terms) + prefix[k] + suffix[k]);
    }
    energy
}

/// `2 ∫_0^∞ D(r)/r^2 dr` using lattice spacing `m h`.
fn band_integral(energy: &[f64], h: f64, m: usize, p: f64, tail: f64) -> f64 {
    let n = energy.len();
    let spacing = m as f64 * h;
    let last = (n - 1) / m * m;
    let mut terms: Vec<f64> = (1..=last / m)
        .map(|j| {
            let k = j * m;
            let r = k as f64 * h;
            let w = if k == last { 0.5 } else { 1.0 };
            w * spacing * energy[k] / (r * r)
        })
        .collect();
    // fine trapezoid for the stretch between the coarse lattice end and L
    if last < n - 1 {
        for k in last..n - 1 {
            let (r0, r1) = (k as f64 * h, (k + 1) as f64 * h);
            terms.push(0.5 * h * (energy[k] / (r0 * r0) + energy[k + 1] / (r1 * r1)));
        }
    }
    let lattice = pairwise_sum(&terms);
    let c = energy[m] / spacing.powf(p);
    let band = -zeta(2.0 - p) * c * spacing.powf(p - 1.0);
    2.0 * (lattice + band + tail)
}

/// Distance from a complex function to the real Besov functions, measured
/// as the Besov seminorm of its imaginary part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NeighborhoodDistance {
    Finite(f64),
    /// The imaginary part is Besov divergent: outside every neighbourhood.
    Outside,
}

impl NeighborhoodDistance {
    pub fn value(&self) -> Option<f64> {
        match self {
            NeighborhoodDistance::Finite(d) => Some(*d),
            NeighborhoodDistance::Outside => None,
        }
    }

    /// Membership in the neighbourhood of radius `constants.radius(p)`.
    pub fn is_within(&self, constants: &NormConstants, p: f64) -> bool {
        matches!(self, NeighborhoodDistance::Finite(d) if *d < constants.radius(p))
    }
}

pub fn neighborhood_distance(u: &SampledFunction, p: f64) -> Result<NeighborhoodDistance> {
    check_exponent(p)?;
    if u.is_real(0.0) {
        return Ok(NeighborhoodDistance::Finite(0.0));
    }
    Ok(match besov_norm(&u.imag_part(), p)? {
        BesovEstimate::Finite { norm, .. } => NeighborhoodDistance::Finite(norm),
        BesovEstimate::Divergent { .. } => NeighborhoodDistance::Outside,
    })
}

/// John–Nirenberg constants and the neighbourhood radius derived from them.
///
/// The universal values are not known numerically; these are configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormConstants {
    pub c_jn: f64,
    pub c0: f64,
    /// Fixed radius; when `None` the radius is `c_jn / (4 q)` with `1/p + 1/q = 1`.
    pub neighborhood_radius: Option<f64>,
}

impl Default for NormConstants {
    fn default() -> Self {
        NormConstants { c_jn: 0.25, c0: 2.0, neighborhood_radius: None }
    }
}

impl NormConstants {
    pub fn new(c_jn: f64, c0: f64, neighborhood_radius: Option<f64>) -> Result<Self> {
        let constants = NormConstants { c_jn, c0, neighborhood_radius };
        constants.validate()?;
        Ok(constants)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_jn > 0.0 && self.c0 > 0.0) {
            return Err(Error::InvalidConstants(format!(
                "C_JN = {} and C_0 = {} must be positive",
                self.c_jn, self.c0
            )));
        }
        if let Some(r) = self.neighborhood_radius {
            if !(r > 0.0 && r <= self.c_jn) {
                return Err(Error::InvalidConstants(format!(
                    "neighborhood radius {r} must lie in (0, C_JN = {}]",
                    self.c_jn
                )));
            }
        }
        Ok(())
    }

    pub fn radius(&self, p: f64) -> f64 {
        self.neighborhood_radius.unwrap_or_else(|| {
            let q = p / (p - 1.0);
            self.c_jn / (4.0 * q)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(n: usize) -> SampledFunction {
        SampledFunction::from_real_fn(|x| (-x * x).exp(), -8.0, 8.0, n, ExtensionPolicy::ConstantExtend).unwrap()
    }

    #[test]
    fn constant_has_zero_norm() {
        let u = SampledFunction::from_real_fn(|_| 3.0, -2.0, 2.0, 65, ExtensionPolicy::ConstantExtend).unwrap();
        assert_eq!(besov_norm(&u, 2.0).unwrap().norm(), Some(0.0));
    }

    #[test]
    fn exponent_must_exceed_one() {
        let u = gaussian(33);
        assert!(matches!(besov_norm(&u, 1.0), Err(Error::InvalidExponent(_))));
        assert!(matches!(besov_norm(&u, 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn gaussian_h_half_norm() {
        // Plancherel: ∬ |u(t)-u(s)|^2/|t-s|^2 = ∫ |ξ| |û(ξ)|^2 dξ = 2π for e^{-x^2}
        let est = besov_norm(&gaussian(2049), 2.0).unwrap();
        let norm = est.norm().unwrap();
        assert!((norm * norm - 2.0 * PI).abs() < 1e-6 * 2.0 * PI, "{norm}");
    }

    #[test]
    fn indicator_diverges() {
        let u = SampledFunction::from_real_fn(
            |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 },
            -8.0,
            8.0,
            4097,
            ExtensionPolicy::ConstantExtend,
        )
        .unwrap();
        assert!(besov_norm(&u, 2.0).unwrap().is_divergent());
    }

    #[test]
    fn unequal_end_values_diverge() {
        let u = SampledFunction::from_real_fn(|x| x.atan(), -5.0, 5.0, 101, ExtensionPolicy::ConstantExtend).unwrap();
        assert!(besov_norm(&u, 2.0).unwrap().is_divergent());
    }

    #[test]
    fn radius_defaults_to_john_nirenberg_quantity() {
        let c = NormConstants::default();
        // q = 2 at p = 2
        assert!((c.radius(2.0) - 0.25 / 8.0).abs() < 1e-15);
        assert!(NormConstants::new(0.25, 2.0, Some(0.5)).is_err());
        assert!(NormConstants::new(-1.0, 2.0, None).is_err());
    }

    #[test]
    fn real_function_is_at_distance_zero() {
        assert_eq!(neighborhood_distance(&gaussian(65), 2.0).unwrap(), NeighborhoodDistance::Finite(0.0));
    }
}
