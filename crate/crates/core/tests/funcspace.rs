//! Property tests for the function-space quantities.

use num_complex::Complex64;
use proptest::prelude::*;

use heatba_core::funcspace::{
    a2_constant, a_infty_constant, besov_norm, bmo_norm, exp_oscillation, mollify, truncate, vmo_profile,
    ExtensionPolicy, IntervalFamily, SampledFunction,
};
use heatba_core::numerics::pairwise_sum;

fn bump_mix(a: f64, b: f64, c: f64) -> SampledFunction {
    SampledFunction::from_fn(
        move |x| Complex64::new(a * (-x * x).exp() + b * (-(x - 1.0).powi(2) / 2.0).exp(), c * (-x * x).exp()),
        -16.0,
        16.0,
        1025,
        ExtensionPolicy::ConstantExtend,
    )
    .unwrap()
}

fn family(u: &SampledFunction) -> IntervalFamily {
    IntervalFamily::dyadic_strided(u, None, 128)
}

fn amplitudes() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64, -0.5..0.5f64)
}

fn trapezoid(u: &SampledFunction) -> f64 {
    let v: Vec<f64> = u.samples().iter().map(|z| z.re).collect();
    u.step() * (pairwise_sum(&v) - 0.5 * (v[0] + v[v.len() - 1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bmo_is_dominated_by_besov((a, b, c) in amplitudes(), p in 1.2..4.0f64) {
        let u = bump_mix(a, b, c);
        let besov = besov_norm(&u, p).unwrap().norm().unwrap();
        prop_assert!(bmo_norm(&u, &family(&u)).unwrap() <= besov * (1.0 + 1e-6));
    }

    #[test]
    fn norms_ignore_constants((a, b, c) in amplitudes(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let u = bump_mix(a, b, c);
        let v = u.add_constant(Complex64::new(re, im));
        let f = family(&u);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs());
        prop_assert!(close(bmo_norm(&u, &f).unwrap(), bmo_norm(&v, &f).unwrap()));
        prop_assert!(close(exp_oscillation(&u, &f).unwrap(), exp_oscillation(&v, &f).unwrap()));
        let (bu, bv) = (besov_norm(&u, 2.0).unwrap().norm().unwrap(), besov_norm(&v, 2.0).unwrap().norm().unwrap());
        prop_assert!(close(bu, bv), "{bu} vs {bv}");
    }

    #[test]
    fn besov_is_dilation_invariant((a, b, c) in amplitudes(), lambda in 0.25..4.0f64, p in 1.5..3.0f64) {
        let u = bump_mix(a, b, c);
        let base = besov_norm(&u, p).unwrap().norm().unwrap();
        let scaled = besov_norm(&u.rescale(lambda).unwrap(), p).unwrap().norm().unwrap();
        prop_assert!((scaled - base).abs() <= 1e-4 * base, "{base} vs {scaled}");
    }

    #[test]
    fn weight_constants_are_ordered((a, b, _c) in amplitudes()) {
        let u = bump_mix(a, b, 0.0);
        let omega = u.map(|z| Complex64::new(z.re.exp(), 0.0));
        let f = family(&omega);
        let (ai, a2) = (a_infty_constant(&omega, &f).unwrap(), a2_constant(&omega, &f).unwrap());
        prop_assert!(ai >= 1.0 - 1e-9 && ai <= a2 + 1e-9, "{ai} {a2}");
    }

    #[test]
    fn vmo_profile_decays((a, b, c) in amplitudes()) {
        prop_assume!(a.abs() + b.abs() + c.abs() > 1e-3);
        let u = bump_mix(a, b, c);
        let profile = vmo_profile(&u, &family(&u)).unwrap();
        prop_assert!(profile.last().unwrap().1 < profile[0].1);
    }

    #[test]
    fn mollify_keeps_the_integral((a, b, _c) in amplitudes(), eps in 0.05..1.0f64) {
        let u = bump_mix(a, b, 0.0);
        let m = mollify(&u, eps).unwrap();
        prop_assert!((trapezoid(&m) - trapezoid(&u)).abs() < 1e-10, "{} vs {}", trapezoid(&m), trapezoid(&u));
    }

    #[test]
    fn truncation_is_monotone((a, b, _c) in amplitudes(), n in 0.05..1.0f64, extra in 0.0..1.0f64) {
        let u = bump_mix(a, b, 0.0);
        let (low, high) = (truncate(&u, n).unwrap(), truncate(&u, n + extra).unwrap());
        for ((l, h), z) in low.samples().iter().zip(high.samples()).zip(u.samples()) {
            prop_assert!(l.re.abs() <= h.re.abs() && h.re.abs() <= z.re.abs());
            prop_assert!(l.re.abs() <= n);
        }
        let f = family(&u);
        prop_assert!(bmo_norm(&low, &f).unwrap() <= 2.0 * bmo_norm(&u, &f).unwrap() + 1e-15);
    }
}
