//! Small numerical building blocks shared by every module: fixed Gauss–Legendre
//! panels, deterministic pairwise summation and the Riemann zeta function on
//! the real line (needed for the diagonal-band correction of singular double
//! integrals).

use num_complex::Complex64;

/// Positive abscissae of the 8-point Gauss–Legendre rule on [-1, 1].
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Number of nodes in one Gauss–Legendre panel.
pub const GL_POINTS: usize = 8;

/// Nodes and weights of the 8-point rule mapped onto `[a, b]`.
pub fn gl_panel(a: f64, b: f64) -> [(f64, f64); GL_POINTS] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); GL_POINTS];
    for k in 0..4 {
        out[2 * k] = (mid - half * GL8_X[k], half * GL8_W[k]);
        out[2 * k + 1] = (mid + half * GL8_X[k], half * GL8_W[k]);
    }
    out
}

/// Integral of `f` over `[a, b]` with `panels` equal Gauss–Legendre panels.
pub fn gl_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == panels { b } else { lo + width };
            gl_panel(lo, hi).iter().map(|&(x, w)| w * f(x)).sum()
        })
        .collect();
    pairwise_sum(&parts)
}

/// Complex-valued counterpart of [`gl_integrate`].
pub fn gl_integrate_c<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
) -> Complex64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let parts: Vec<Complex64> = (0..panels)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == panels { b } else { lo + width };
            gl_panel(lo, hi).iter().map(|&(x, w)| f(x) * w).sum()
        })
        .collect();
    pairwise_sum_c(&parts)
}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation in fixed index order.
///
/// The result depends only on the slice contents, never on scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_c(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_c(&values[..mid]) + pairwise_sum_c(&values[mid..])
}

/// Maximum of a slice, scanning in index order. NaN entries propagate.
pub fn ordered_max(values: &[f64]) -> Option<f64> {
    let mut iter = values.iter().copied();
    let first = iter.next()?;
    Some(iter.fold(first, |acc, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else if v > acc {
            v
        } else {
            acc
        }
    }))
}

/// B_{2j} / (2j)! for j = 1..=12.
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
    77_683.0 / 14_101_100_039_391_805_440_000.0,
    -236_364_091.0 / 1_693_824_136_731_743_669_452_800_000.0,
];

/// Riemann zeta function for real `s != 1` via Euler–Maclaurin summation.
///
/// Accurate to roughly 1e-13 for `s` in `[-20, 40]`, which covers every
/// exponent used by the Besov quadrature (`s = 2 - p`).
pub fn zeta(s: f64) -> f64 {
    assert!((s - 1.0).abs() > 1e-12, "zeta has a pole at s = 1");
    if s == 0.0 {
        return -0.5;
    }
    // Trivial zeros at negative even integers.
    if s < 0.0 && s.fract() == 0.0 && (s as i64) % 2 == 0 {
        return 0.0;
    }
    const N: usize = 30;
    let n = N as f64;
    let head: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    let mut total = head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising product s (s+1) ... (s+2j-2) times N^{-s-2j+1}
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = coeff * rising * power;
        total += term;
        let m = (2 * j + 1) as f64;
        rising *= (s + m) * (s + m + 1.0);
        power /= n * n;
    }
    total
}

/// `e^z - 1` for complex `z`, accurate near zero.
pub fn expm1_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        z * (Complex64::new(1.0, 0.0) + z * (0.5 + z / 6.0))
    } else {
        z.exp() - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_panel_integrates_polynomials_exactly() {
        // degree 15 is the limit of the 8-point rule
        let exact = 2.0_f64.powi(16) / 16.0;
        let got: f64 = gl_panel(0.0, 2.0).iter().map(|&(x, w)| w * x.powi(15)).sum();
        assert!((got - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn zeta_known_values() {
        assert!((zeta(0.0) + 0.5).abs() < 1e-15);
        assert!((zeta(-1.0) + 1.0 / 12.0).abs() < 1e-13);
        assert!((zeta(0.5) + 1.460_354_508_809_586_8).abs() < 1e-12);
        assert!((zeta(-0.5) + 0.207_886_224_977_354_57).abs() < 1e-12);
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
        assert!(zeta(-2.0).abs() < 1e-15);
        assert!((zeta(-3.0) - 1.0 / 120.0).abs() < 1e-13);
    }

    #[test]
    fn pairwise_matches_naive_on_short_input() {
        let v: Vec<f64> = (0..10).map(|k| k as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&v), v.iter().sum::<f64>());
    }

    #[test]
    fn ordered_max_handles_empty() {
        assert_eq!(ordered_max(&[]), None);
        assert_eq!(ordered_max(&[1.0, 3.0, 2.0]), Some(3.0));
    }

    #[test]
    fn expm1_small_and_large() {
        let z = Complex64::new(1e-8, -2e-8);
        assert!((expm1_c(z) - z).norm() < 1e-15);
        let z = Complex64::new(0.3, 0.4);
        assert!((expm1_c(z) - (z.exp() - 1.0)).norm() < 1e-15);
    }
}
