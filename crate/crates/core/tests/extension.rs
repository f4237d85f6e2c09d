//! Extension and dilatation checks against independent oracles.

use num_complex::Complex64;
use proptest::prelude::*;

use heatba_core::diagnostics::{hyperbolic_p_norm, sup_norm};
use heatba_core::extension::{extend, gamma, mu_at, mu_field, partials, ExtensionOptions};
use heatba_core::field::{geometric_levels, Grid, HalfPlane};
use heatba_core::funcspace::{
    bmo_norm, neighborhood_distance, ExtensionPolicy, IntervalFamily, NormConstants, SampledFunction,
};
use heatba_core::kernels::{alpha, beta, Engine, KernelSet};
use heatba_core::numerics::gl_integrate_c;

fn line(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> SampledFunction {
    SampledFunction::from_fn(f, -32.0, 32.0, 4097, ExtensionPolicy::ConstantExtend).unwrap()
}

fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SampledFunction {
    line(move |x| Complex64::new(f(x), 0.0))
}

fn grid(u: &SampledFunction, stride: usize, ny: usize) -> Grid {
    Grid::on_samples_within(u, -4.0, 4.0, stride, geometric_levels(1e-3, 1e2, ny).unwrap()).unwrap()
}

#[test]
fn partials_of_constant_drivers() {
    let raw = ExtensionOptions { normalize: false, ..ExtensionOptions::default() };
    for (value, scale) in [(0.0, 1.0), (3f64.ln(), 3.0)] {
        let u = real(move |_| value);
        for &(x, y) in &[(0.0, 0.5), (1.3, 0.01), (-2.0, 7.0)] {
            let p = partials(&u, x, y, &raw).unwrap();
            let want = [scale, 0.0, 0.0, scale];
            for (got, w) in [p.ux, p.uy, p.vx, p.vy].into_iter().zip(want) {
                assert!((got - w).norm() < 1e-12, "{got} vs {w} at ({x}, {y})");
            }
        }
    }
}

#[test]
fn boundary_trace_follows_the_curve() {
    let u = real(|x| 0.1 * x.sin());
    let g = Grid::on_samples_within(&u, -4.0, 4.0, 4, vec![1e-3]).unwrap();
    let f = extend(&u, &g, HalfPlane::Upper, &ExtensionOptions::default()).unwrap();
    let curve = gamma(&u, true).unwrap();
    for (x, v) in g.x().iter().zip(f.values()) {
        assert!((v.re - curve.eval(*x).re).abs() < 1e-4);
    }
}

/// `α_y * e^u / β_y * e^u` by plain Gauss–Legendre over `[-14, 14]` at 32
/// nodes per unit, using the closed-form driver.
fn mu_oracle(x: f64, y: f64) -> Complex64 {
    let w = |s: f64| Complex64::new(0.1 * (x - y * s).sin(), 0.0).exp();
    gl_integrate_c(|s| alpha(s) * w(s), -14.0, 14.0, 112) / gl_integrate_c(|s| beta(s) * w(s), -14.0, 14.0, 112)
}

#[test]
fn mu_matches_refined_quadrature() {
    let frozen = Complex64::new(-7.323_099_324_046_991e-5, 3.520_955_906_665_284_4e-2);
    assert!((mu_oracle(0.0, 0.5) - frozen).norm() < 1e-15);
    let u = real(|x| 0.1 * x.sin());
    let got = mu_at(&u, 0.0, 0.5, &KernelSet::default()).unwrap();
    assert!((got - frozen).norm() < 1e-12, "{got}");
}

#[test]
fn mu_field_matches_point_evaluation() {
    let u = real(|x| 0.1 * x.sin());
    let g = grid(&u, 8, 32);
    let field = mu_field(&u, &g, HalfPlane::Upper, &ExtensionOptions::default()).unwrap();
    let set = KernelSet::default();
    let (nx, ny) = (g.nx(), g.ny());
    for k in 0..100 {
        let (i, j) = ((k * 37) % nx, (k * 11) % ny);
        let want = mu_at(&u, g.x()[i], g.y()[j], &set).unwrap();
        assert!((field.value(i, j) - want).norm() < 1e-6);
    }
}

#[test]
fn dilatation_is_controlled_by_bmo() {
    let mut ratios = Vec::new();
    for k in 1..=10 {
        let e = 0.01 * k as f64;
        let u = real(move |x| e * x.sin());
        let mu = mu_field(&u, &grid(&u, 8, 24), HalfPlane::Upper, &ExtensionOptions::default()).unwrap();
        let bmo = bmo_norm(&u, &IntervalFamily::dyadic_strided(&u, None, 256)).unwrap();
        ratios.push(sup_norm(&mu).unwrap() / bmo);
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(lo > 0.0 && hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn neighbourhood_keeps_norms_bounded() {
    let constants = NormConstants::default();
    let p = 2.0;
    for b in [0.0, 0.004, 0.008, 0.012] {
        let u = line(move |x| Complex64::new(0.05 * x.sin(), b * (-x * x).exp()));
        assert!(neighborhood_distance(&u, p).unwrap().is_within(&constants, p));
        let mu = mu_field(&u, &grid(&u, 4, 32), HalfPlane::Upper, &ExtensionOptions::default()).unwrap();
        let total = sup_norm(&mu).unwrap() + hyperbolic_p_norm(&mu, p).unwrap().window_norm();
        assert!(total < 1.0, "b = {b}: {total}");
    }
}

#[test]
fn gaussian_p_norm_is_stable_under_refinement() {
    let u = real(|x| 0.2 * (-x * x).exp());
    let norm = |stride, ny| {
        let g = Grid::on_samples_within(&u, -8.0, 8.0, stride, geometric_levels(1e-3, 1e2, ny).unwrap()).unwrap();
        hyperbolic_p_norm(&mu_field(&u, &g, HalfPlane::Upper, &ExtensionOptions::default()).unwrap(), 2.0)
            .unwrap()
            .integral()
    };
    let (coarse, fine) = (norm(4, 64), norm(2, 127));
    assert!((fine - coarse).abs() < 1e-5 * fine);
    assert!((coarse - 3.170_984_710_344_888e-2).abs() < 1e-9);
}

fn driver() -> impl Strategy<Value = (f64, f64, f64)> {
    (-0.2..0.2f64, -0.3..0.3f64, -0.1..0.1f64)
}

fn mixed(a: f64, b: f64, c: f64) -> SampledFunction {
    line(move |x| Complex64::new(a * x.sin() + b * (-x * x).exp(), c * (-x * x).exp()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn normalized_curve_is_pinned((a, b, c) in driver()) {
        let curve = gamma(&mixed(a, b, c), true).unwrap();
        prop_assert!(curve.eval(0.0).norm() < 1e-10);
        prop_assert!((curve.eval(1.0) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn constant_shift_leaves_mu_unchanged((a, b, c) in driver(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let u = mixed(a, b, c);
        let g = grid(&u, 16, 12);
        let opts = ExtensionOptions::default().with_engine(Engine::Fft);
        let base = mu_field(&u, &g, HalfPlane::Upper, &opts).unwrap();
        let moved = mu_field(&u.add_constant(Complex64::new(re, im)), &g, HalfPlane::Upper, &opts).unwrap();
        for (p, q) in base.values().iter().zip(moved.values()) {
            prop_assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn translation_and_scaling_equivariance(
        (a, b, c) in driver(),
        shift in -2.0..2.0f64,
        lambda in 0.5..2.0f64,
        x in -2.0..2.0f64,
        y in 0.01..3.0f64,
    ) {
        let u = mixed(a, b, c);
        let set = KernelSet::default();
        let m = mu_at(&u.translate(shift), x, y, &set).unwrap();
        prop_assert!((m - mu_at(&u, x + shift, y, &set).unwrap()).norm() < 1e-8);
        let m = mu_at(&u.rescale(lambda).unwrap(), x, y, &set).unwrap();
        prop_assert!((m - mu_at(&u, lambda * x, lambda * y, &set).unwrap()).norm() < 1e-6);
    }
}
