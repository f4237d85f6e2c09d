//! Interval families and the supremum-over-intervals functionals: BMO and VMO
//! oscillation, Muckenhoupt A2 and A-infinity constants, doubling constants and
//! exponential oscillation.
//!
//! Integrals over an interval use an 8-point Gauss–Legendre panel per sample
//! segment, evaluated through the function's handle when it has one. Panel
//! values on the sampled domain are cached once per call so that node-aligned
//! intervals (the dyadic families) never re-evaluate the function.

use num_complex::Complex64;
use rayon::prelude::*;

use super::sampled::{ExtensionPolicy, SampledFunction};
use crate::error::{Error, Result};
use crate::numerics::{gl_panel, ordered_max, pairwise_sum, GL_POINTS};

/// An open interval `(center - half, center + half)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub center: f64,
    pub half: f64,
}

impl Interval {
    pub fn new(center: f64, half: f64) -> Self {
        Interval { center, half }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half
    }

    /// Same centre, twice the length.
    pub fn doubled(&self) -> Interval {
        Interval::new(self.center, 2.0 * self.half)
    }
}

#[derive(Clone, Debug, Default)]
pub struct IntervalFamily {
    intervals: Vec<Interval>,
}

impl IntervalFamily {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if let Some(bad) = intervals.iter().find(|i| !(i.half > 0.0 && i.half.is_finite() && i.center.is_finite())) {
            return Err(Error::InvalidFunction(format!(
                "interval half-length must be positive and finite, got {bad:?}"
            )));
        }
        Ok(IntervalFamily { intervals })
    }

    /// Dyadic half-lengths `2^k * step`, `k = 0..=max_level`, centred at every
    /// node whose interval stays inside the sampled domain. `max_level` is
    /// capped so that no half-length exceeds half the domain width.
    pub fn dyadic(u: &SampledFunction, max_level: Option<u32>) -> Self {
        Self::dyadic_strided(u, max_level, usize::MAX)
    }

    /// Like [`IntervalFamily::dyadic`] but keeps at most `max_centers` evenly
    /// strided centres per level.
    pub fn dyadic_strided(u: &SampledFunction, max_level: Option<u32>, max_centers: usize) -> Self {
        let n = u.len();
        let mut intervals = Vec::new();
        let cap = dyadic_cap(n);
        let top = max_level.map_or(cap, |m| m.min(cap));
        for k in 0..=top {
            let span = 1usize << k;
            if 2 * span > n - 1 {
                break;
            }
            let centers = n - 2 * span;
            let stride = centers.div_ceil(max_centers.max(1)).max(1);
            let mut i = span;
            while i + span <= n - 1 {
                intervals.push(Interval::new(u.node(i), span as f64 * u.step()));
                i += stride;
            }
        }
        IntervalFamily { intervals }
    }

    /// Intervals centred at `center` with the given half-lengths.
    pub fn symmetric_about(center: f64, halves: &[f64]) -> Result<Self> {
        Self::new(halves.iter().map(|&h| Interval::new(center, h)).collect())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Distinct half-lengths, largest first.
    pub fn half_lengths(&self) -> Vec<f64> {
        let mut halves: Vec<f64> = self.intervals.iter().map(|i| i.half).collect();
        halves.sort_by(|a, b| b.partial_cmp(a).expect("finite half-lengths"));
        halves.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        halves
    }
}

fn dyadic_cap(n: usize) -> u32 {
    // 2^K * step <= (x_max - x_min) / 2  <=>  2^(K+1) <= n - 1
    let mut k = 0u32;
    while (1usize << (k + 2)) <= n - 1 {
        k += 1;
    }
    k
}

/// Gauss–Legendre panel values of a sampled function over its whole domain.
pub(crate) struct PanelCache<'a> {
    u: &'a SampledFunction,
    weights: Vec<f64>,
    values: Vec<Complex64>,
}

impl<'a> PanelCache<'a> {
    pub(crate) fn new(u: &'a SampledFunction) -> Self {
        let segs = u.len() - 1;
        let mut weights = Vec::with_capacity(segs * GL_POINTS);
        let mut values = Vec::with_capacity(segs * GL_POINTS);
        for k in 0..segs {
            for (t, w) in gl_panel(u.node(k), u.node(k + 1)) {
                weights.push(w);
                values.push(u.eval(t));
            }
        }
        PanelCache { u, weights, values }
    }

    /// Quadrature weights and function values covering `[a, b]`.
    pub(crate) fn points(&self, a: f64, b: f64) -> (Vec<f64>, Vec<Complex64>) {
        if let Some((i, j)) = self.aligned(a, b) {
            let r = i * GL_POINTS..j * GL_POINTS;
            return (self.weights[r.clone()].to_vec(), self.values[r].to_vec());
        }
        let mut w = Vec::new();
        let mut v = Vec::new();
        for (lo, hi) in self.pieces(a, b) {
            for (t, wt) in gl_panel(lo, hi) {
                w.push(wt);
                v.push(self.u.eval(t));
            }
        }
        (w, v)
    }

    /// Borrowed view when `[a, b]` is node aligned inside the domain.
    pub(crate) fn aligned_slices(&self, a: f64, b: f64) -> Option<(&[f64], &[Complex64])> {
        self.aligned(a, b).map(|(i, j)| {
            let r = i * GL_POINTS..j * GL_POINTS;
            (&self.weights[r.clone()], &self.values[r])
        })
    }

    fn aligned(&self, a: f64, b: f64) -> Option<(usize, usize)> {
        let h = self.u.step();
        let fa = (a - self.u.x_min()) / h;
        let fb = (b - self.u.x_min()) / h;
        let (ia, ib) = (fa.round(), fb.round());
        let n = self.u.len() as f64;
        if (fa - ia).abs() < 1e-9 && (fb - ib).abs() < 1e-9 && ia >= 0.0 && ib <= n - 1.0 && ib > ia {
            Some((ia as usize, ib as usize))
        } else {
            None
        }
    }

    /// Splits `[a, b]` at sample nodes and at the domain ends. Outside the
    /// domain a constant continuation needs no further cuts; periodic and
    /// handle-backed continuations are cut on the extended node lattice.
    fn pieces(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let u = self.u;
        let h = u.step();
        let mut k0 = ((a - u.x_min()) / h).floor() as i64 + 1;
        let mut k1 = ((b - u.x_min()) / h).ceil() as i64 - 1;
        if u.policy() == ExtensionPolicy::ConstantExtend {
            k0 = k0.max(0);
            k1 = k1.min(u.len() as i64 - 1);
        }
        let mut cuts = Vec::with_capacity((k1 - k0 + 3).max(2) as usize);
        cuts.push(a);
        for k in k0..=k1 {
            cuts.push(u.x_min() + k as f64 * h);
        }
        cuts.push(b);
        cuts.retain(|&t| t >= a && t <= b);
        cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

fn weighted_sum<F: Fn(Complex64) -> f64>(w: &[f64], v: &[Complex64], f: F) -> f64 {
    let terms: Vec<f64> = w.iter().zip(v).map(|(&wt, &z)| wt * f(z)).collect();
    pairwise_sum(&terms)
}

fn weighted_mean(w: &[f64], v: &[Complex64]) -> Complex64 {
    let re = weighted_sum(w, v, |z| z.re);
    let im = weighted_sum(w, v, |z| z.im);
    let len = pairwise_sum(w);
    Complex64::new(re, im) / len
}

/// Evaluates `per_interval` on every interval and returns the values in family
/// order. Parallel evaluation, ordered collection.
fn over_family<F>(family: &IntervalFamily, per_interval: F) -> Result<Vec<f64>>
where
    F: Fn(&Interval) -> Result<f64> + Sync,
{
    if family.is_empty() {
        return Err(Error::NoIntervals);
    }
    family.intervals.par_iter().map(&per_interval).collect()
}

fn max_of(values: &[f64]) -> f64 {
    ordered_max(values).expect("family is non-empty")
}

fn mean_oscillation(cache: &PanelCache<'_>, iv: &Interval) -> f64 {
    with_points(cache, iv.lo(), iv.hi(), |w, v| {
        let mean = weighted_mean(w, v);
        weighted_sum(w, v, |z| (z - mean).norm()) / pairwise_sum(w)
    })
}

fn with_points<R, F: FnOnce(&[f64], &[Complex64]) -> R>(cache: &PanelCache<'_>, a: f64, b: f64, f: F) -> R {
    if let Some((w, v)) = cache.aligned_slices(a, b) {
        f(w, v)
    } else {
        let (w, v) = cache.points(a, b);
        f(&w, &v)
    }
}

/// Supremum over the family of the mean oscillation `|I|^-1 int_I |u - u_I|`.
///
/// A lower bound of the BMO norm, nondecreasing under family refinement.
pub fn bmo_norm(u: &SampledFunction, family: &IntervalFamily) -> Result<f64> {
    let cache = PanelCache::new(u);
    let values = over_family(family, |iv| Ok(mean_oscillation(&cache, iv)))?;
    Ok(max_of(&values))
}

/// Per-scale maximal mean oscillation, largest half-length first. The last
/// entry is the VMO diagnostic.
pub fn vmo_profile(u: &SampledFunction, family: &IntervalFamily) -> Result<Vec<(f64, f64)>> {
    let cache = PanelCache::new(u);
    let values = over_family(family, |iv| Ok(mean_oscillation(&cache, iv)))?;
    let halves = family.half_lengths();
    Ok(halves
        .iter()
        .map(|&h| {
            let at_scale: Vec<f64> = family
                .intervals
                .iter()
                .zip(&values)
                .filter(|(iv, _)| (iv.half - h).abs() <= 1e-12 * h)
                .map(|(_, &v)| v)
                .collect();
            (h, max_of(&at_scale))
        })
        .collect())
}

/// Supremum over the family of `|I|^-1 int_I exp|u - u_I|`.
pub fn exp_oscillation(u: &SampledFunction, family: &IntervalFamily) -> Result<f64> {
    let cache = PanelCache::new(u);
    let values = over_family(family, |iv| {
        Ok(with_points(&cache, iv.lo(), iv.hi(), |w, v| {
            let mean = weighted_mean(w, v);
            weighted_sum(w, v, |z| (z - mean).norm().exp()) / pairwise_sum(w)
        }))
    })?;
    Ok(max_of(&values))
}

const WEIGHT_IMAG_TOL: f64 = 1e-12;

fn check_weight(omega: &SampledFunction, strict: bool) -> Result<()> {
    for (index, z) in omega.samples().iter().enumerate() {
        if z.im.abs() > WEIGHT_IMAG_TOL * (1.0 + z.re.abs()) || z.re < 0.0 {
            return Err(Error::NotAWeight { index, value: z.re });
        }
        if strict && z.re <= 0.0 {
            return Err(Error::NonPositiveWeight { index, value: z.re });
        }
    }
    Ok(())
}

/// Muckenhoupt A2 constant: supremum of `avg_I(w) * avg_I(1/w)`.
pub fn a2_constant(omega: &SampledFunction, family: &IntervalFamily) -> Result<f64> {
    check_weight(omega, false)?;
    let cache = PanelCache::new(omega);
    let values = over_family(family, |iv| {
        Ok(with_points(&cache, iv.lo(), iv.hi(), |w, v| {
            let len = pairwise_sum(w);
            let avg = weighted_sum(w, v, |z| z.re) / len;
            let avg_inv = weighted_sum(w, v, |z| 1.0 / z.re) / len;
            avg * avg_inv
        }))
    })?;
    Ok(max_of(&values))
}

/// A-infinity constant: supremum of `avg_I(w) / exp(avg_I(log w))`.
pub fn a_infty_constant(omega: &SampledFunction, family: &IntervalFamily) -> Result<f64> {
    check_weight(omega, true)?;
    let cache = PanelCache::new(omega);
    let values = over_family(family, |iv| {
        Ok(with_points(&cache, iv.lo(), iv.hi(), |w, v| {
            let len = pairwise_sum(w);
            let avg = weighted_sum(w, v, |z| z.re) / len;
            let avg_log = weighted_sum(w, v, |z| z.re.ln()) / len;
            avg / avg_log.exp()
        }))
    })?;
    Ok(max_of(&values))
}

/// Doubling constant of the measure `w dx`: supremum of `w(2I) / w(I)`.
pub fn doubling_constant(omega: &SampledFunction, family: &IntervalFamily) -> Result<f64> {
    check_weight(omega, false)?;
    let cache = PanelCache::new(omega);
    let values = over_family(family, |iv| {
        let mass = |i: &Interval| with_points(&cache, i.lo(), i.hi(), |w, v| weighted_sum(w, v, |z| z.re));
        let inner = mass(iv);
        if !(inner > 0.0) {
            return Err(Error::ZeroMass { center: iv.center, half: iv.half });
        }
        Ok(mass(&iv.doubled()) / inner)
    })?;
    Ok(max_of(&values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(c: f64) -> SampledFunction {
        SampledFunction::from_real_fn(move |_| c, -4.0, 4.0, 129, ExtensionPolicy::ConstantExtend).unwrap()
    }

    fn heaviside() -> SampledFunction {
        SampledFunction::from_real_fn(|x| if x >= 0.0 { 1.0 } else { 0.0 }, -4.0, 4.0, 257, ExtensionPolicy::ConstantExtend)
            .unwrap()
    }

    #[test]
    fn dyadic_family_shape() {
        let u = constant(0.0);
        let fam = IntervalFamily::dyadic(&u, None);
        // n - 1 = 128 segments: half-lengths 1..64 segments, the last one the whole domain
        let halves = fam.half_lengths();
        assert_eq!(halves.len(), 7);
        assert!((halves[0] - 64.0 * u.step()).abs() < 1e-12);
        for iv in fam.intervals() {
            assert!(iv.lo() >= u.x_min() - 1e-12 && iv.hi() <= u.x_max() + 1e-12);
        }
    }

    #[test]
    fn empty_family_is_an_error() {
        let u = constant(1.0);
        let fam = IntervalFamily::new(vec![]).unwrap();
        assert!(matches!(bmo_norm(&u, &fam), Err(Error::NoIntervals)));
        assert!(matches!(exp_oscillation(&u, &fam), Err(Error::NoIntervals)));
    }

    #[test]
    fn constant_has_zero_oscillation() {
        let u = constant(7.0);
        let fam = IntervalFamily::dyadic(&u, None);
        assert!(bmo_norm(&u, &fam).unwrap().abs() < 1e-14);
        assert!((exp_oscillation(&u, &fam).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn heaviside_oscillation_is_one_half_on_symmetric_intervals() {
        let u = heaviside();
        let fam = IntervalFamily::symmetric_about(0.0, &[0.5, 1.0, 2.0]).unwrap();
        assert!((bmo_norm(&u, &fam).unwrap() - 0.5).abs() < 1e-13);
        let profile = vmo_profile(&u, &IntervalFamily::dyadic(&u, None)).unwrap();
        let smallest = profile.last().unwrap().1;
        assert!((smallest - 0.5).abs() < 1e-13);
    }

    #[test]
    fn exp_oscillation_of_scaled_heaviside() {
        let c = 0.8;
        let u = heaviside().scale(Complex64::new(c, 0.0));
        let fam = IntervalFamily::symmetric_about(0.0, &[0.25, 1.0]).unwrap();
        assert!((exp_oscillation(&u, &fam).unwrap() - (c / 2.0).exp()).abs() < 1e-13);
    }

    #[test]
    fn weights_are_validated() {
        let neg = SampledFunction::from_real_fn(|x| x, -1.0, 1.0, 9, ExtensionPolicy::ConstantExtend).unwrap();
        let fam = IntervalFamily::dyadic(&neg, None);
        assert!(matches!(a2_constant(&neg, &fam), Err(Error::NotAWeight { .. })));
        let zero_node = SampledFunction::from_real_fn(|x| x.abs(), -1.0, 1.0, 9, ExtensionPolicy::ConstantExtend).unwrap();
        assert!(matches!(a_infty_constant(&zero_node, &fam), Err(Error::NonPositiveWeight { .. })));
    }

    #[test]
    fn uniform_weight_constants() {
        let w = constant(1.0);
        let fam = IntervalFamily::dyadic(&w, None);
        assert!((a2_constant(&w, &fam).unwrap() - 1.0).abs() < 1e-14);
        assert!((doubling_constant(&w, &fam).unwrap() - 2.0).abs() < 1e-13);
        let five = constant(5.0);
        assert!((a_infty_constant(&five, &fam).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_mass_interval_is_an_error() {
        let w = SampledFunction::from_real_fn(|x| if x > 1.0 { 1.0 } else { 0.0 }, -4.0, 4.0, 33, ExtensionPolicy::ConstantExtend)
            .unwrap();
        let fam = IntervalFamily::symmetric_about(-2.0, &[0.5]).unwrap();
        assert!(matches!(doubling_constant(&w, &fam), Err(Error::ZeroMass { .. })));
    }

    #[test]
    fn unaligned_intervals_use_generic_pieces() {
        let u = SampledFunction::from_real_fn(|x| x, -2.0, 2.0, 41, ExtensionPolicy::ConstantExtend).unwrap();
        // interval partly outside the domain: u = -2 on (-2.5, -2)
        let cache = PanelCache::new(&u);
        let (w, v) = cache.points(-2.5, -1.03);
        let integral: f64 = w.iter().zip(&v).map(|(a, b)| a * b.re).sum();
        let exact = -2.0 * 0.5 + (1.03f64.powi(2) - 4.0) / 2.0;
        assert!((integral - exact).abs() < 1e-13, "{integral} vs {exact}");
    }
}
