//! Acceptance suite: ten numbered criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines print in order;
//! the process fails when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use heatba_cli::fixtures::lattice_grid;
use heatba_cli::{run_suite, Command, GridSpec, RunConfig};
use heatba_core::circle::{check_radius, circle_besov_norm, circle_dilatation, lift, DEFAULT_R0};
use heatba_core::diagnostics::{
    bilipschitz_ratio, diagnose, gateaux_check, hyperbolic_p_norm, sup_norm, vanishing_profile, DiagnosticsReport,
};
use heatba_core::extension::{complex_derivatives, extend, extend_at, mu_at, mu_field, partials, ExtensionOptions};
use heatba_core::field::{geometric_levels, Grid, HalfPlane, HalfPlaneField};
use heatba_core::funcspace::{besov_norm, neighborhood_distance, ExtensionPolicy, NormConstants, SampledFunction};
use heatba_core::kernels::{Engine, Kernel, KernelSet};
use heatba_core::numerics::gl_integrate_c;

type Outcome = Result<(bool, Vec<String>), heatba_core::Error>;

fn opts(engine: Engine) -> ExtensionOptions {
    ExtensionOptions::default().with_engine(engine)
}

fn on_line(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> SampledFunction {
    SampledFunction::from_fn(f, -32.0, 32.0, 4097, ExtensionPolicy::ConstantExtend).unwrap()
}

fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SampledFunction {
    on_line(move |x| Complex64::new(f(x), 0.0))
}

fn sine(e: f64) -> SampledFunction {
    real(move |x| e * x.sin())
}

fn gauss(s: f64) -> SampledFunction {
    real(move |x| s * (-x * x).exp())
}

fn mix() -> SampledFunction {
    on_line(|x| Complex64::new(0.1 * x.sin(), 0.05 * (-x * x).exp()))
}

fn three_fixtures() -> Vec<(&'static str, SampledFunction)> {
    vec![("0.1 sin", sine(0.1)), ("0.2 gauss", gauss(0.2)), ("0.1 sin + 0.05i gauss", mix())]
}

/// The command-line default grid snapped to the lattice of `u`.
fn default_grid(u: &SampledFunction) -> Grid {
    lattice_grid(u, &GridSpec::default()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Low-discrepancy probe points: `x ∈ [-3, 3]`, `y` log-uniform in `[1e-2, 10]`.
fn probes(n: usize) -> Vec<(f64, f64)> {
    let (a1, a2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
    (1..=n)
        .map(|k| {
            let (s, t) = ((k as f64 * a1).fract(), (k as f64 * a2).fract());
            (-3.0 + 6.0 * s, 10f64.powf(-2.0 + 3.0 * t))
        })
        .collect()
}

/// Constant drivers on a 4096 x 64 grid. The FFT run is timed at full size;
/// the direct engine sees the same levels and x-range with every 16th node.
fn identity_suite() -> Outcome {
    let consts = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.7, 0.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(0.3, -1.2),
        Complex64::new(1.0, 1.0),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (engine, stride) in [(Engine::Fft, 1), (Engine::Direct, 16)] {
        let tol = if engine == Engine::Direct { 1e-9 } else { 1e-6 };
        let (mut worst_f, mut worst_mu, mut slowest) = (0.0f64, 0.0f64, Duration::ZERO);
        let mut shape = (0, 0);
        for &c in &consts {
            let u = SampledFunction::from_fn(move |_| c, -32.0, 32.0, 8193, ExtensionPolicy::ConstantExtend)?;
            let h = u.step();
            let grid = Grid::on_samples_within(&u, -16.0, 16.0 - h, stride, geometric_levels(1e-3, 1e2, 64)?)?;
            shape = (grid.nx(), grid.ny());
            let start = Instant::now();
            let f = extend(&u, &grid, HalfPlane::Upper, &opts(engine))?;
            let mu = mu_field(&u, &grid, HalfPlane::Upper, &opts(engine))?;
            slowest = slowest.max(start.elapsed());
            let raw = extend(&u, &grid, HalfPlane::Upper, &ExtensionOptions { normalize: false, ..opts(engine) })?;
            let ec = c.exp();
            for (k, (a, b)) in f.values().iter().zip(raw.values()).enumerate() {
                let z = Complex64::new(grid.x()[k % grid.nx()], grid.y()[k / grid.nx()]);
                let scale = z.norm().max(1.0);
                worst_f = worst_f.max((a - z).norm() / scale).max((b - ec * z).norm() / (ec.norm() * scale));
            }
            worst_mu = worst_mu.max(sup_norm(&mu)?);
        }
        let timed = engine == Engine::Fft;
        let pass = worst_f <= tol && worst_mu <= tol && (!timed || slowest < Duration::from_secs(10));
        ok &= pass;
        lines.push(format!(
            "{} on {}x{}: max relative |F - e^c z| {worst_f:.1e}, sup|μ| {worst_mu:.1e} (tol {tol:.0e}), slowest F + μ {:.2}s{}",
            engine.name(),
            shape.0,
            shape.1,
            slowest.as_secs_f64(),
            if timed { " (limit 10s)" } else { "" }
        ));
    }
    Ok((ok, lines))
}

fn kernel_gate() -> Outcome {
    let moment = |k: Kernel, m: i32| gl_integrate_c(|x| k.eval(x) * x.powi(m), -12.0, 12.0, 96);
    let errs = [
        ("∫α", moment(Kernel::alpha(), 0).norm()),
        ("∫β - 1", (moment(Kernel::beta(), 0) - 1.0).norm()),
        ("∫φ - 1", (moment(Kernel::phi(), 0) - 1.0).norm()),
        ("∫x²φ - 1/2", (moment(Kernel::phi(), 2) - 0.5).norm()),
        ("∫xψ + 1", (moment(Kernel::psi(), 1) + 1.0).norm()),
    ];
    let worst_moment = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let mut ok = worst_moment <= 1e-10;
    let mut lines = vec![format!(
        "moments: {}",
        errs.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect::<Vec<_>>().join(", ")
    )];
    let opts = opts(Engine::Direct);
    for (name, u) in three_fixtures() {
        let mut worst = 0.0f64;
        let mut used = 0;
        for (x, y) in probes(200) {
            let p = partials(&u, x, y, &opts)?;
            let (fz, fzbar) = (p.f_z(), p.f_zbar());
            if fz.norm() <= 1e-3 {
                continue;
            }
            used += 1;
            let d = 1e-4 * y;
            let f = |x, y| extend_at(&u, x, y, &opts);
            let fx = (f(x + d, y)? - f(x - d, y)?) / (2.0 * d);
            let fy = (f(x, y + d)? - f(x, y - d)?) / (2.0 * d);
            let i = Complex64::i();
            let (dz, dzbar) = ((fx - i * fy) / 2.0, (fx + i * fy) / 2.0);
            worst = worst.max((dz - fz).norm() / fz.norm()).max((dzbar - fzbar).norm() / fz.norm());
        }
        ok &= worst <= 1e-4 && used == 200;
        lines.push(format!("{name}: {used} probes, max relative error {worst:.1e}"));
    }
    Ok((ok, lines))
}

fn equivariance_suite() -> Outcome {
    let set = KernelSet::default();
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, u) in three_fixtures() {
        let grid = default_grid(&u);
        let fopts = opts(Engine::Fft);
        let base = mu_field(&u, &grid, HalfPlane::Upper, &fopts)?;
        let mut shift = 0.0f64;
        for c in [Complex64::new(0.3, 0.4), Complex64::new(-1.5, 0.0), Complex64::new(0.0, 2.0)] {
            let moved = mu_field(&u.add_constant(c), &grid, HalfPlane::Upper, &fopts)?;
            shift = base.values().iter().zip(moved.values()).map(|(a, b)| (a - b).norm()).fold(shift, f64::max);
        }
        let (mut trans, mut scale) = (0.0f64, 0.0f64);
        for (x, y) in probes(40) {
            let m = |x, y| mu_at(&u, x, y, &set);
            for a in [-1.0, 0.7] {
                trans = trans.max((mu_at(&u.translate(a), x, y, &set)? - m(x + a, y)?).norm());
            }
            for lambda in [0.5, 2.0] {
                scale = scale.max((mu_at(&u.rescale(lambda)?, x, y, &set)? - m(lambda * x, lambda * y)?).norm());
            }
        }
        ok &= shift <= 1e-10 && trans <= 1e-8 && scale <= 1e-6;
        lines.push(format!("{name}: shift {shift:.1e} (1e-10), translation {trans:.1e} (1e-8), scaling {scale:.1e} (1e-6)"));
    }
    Ok((ok, lines))
}

fn certificate() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let fopts = opts(Engine::Fft);
    for (name, u) in [("0.2 sin", sine(0.2)), ("0.5 gauss", gauss(0.5))] {
        let grid = default_grid(&u);
        let f = extend(&u, &grid, HalfPlane::Upper, &fopts)?;
        let d = complex_derivatives(&u, &grid, HalfPlane::Upper, &fopts)?;
        let min_im = f.values().iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
        let min_jac = d.jacobian().into_iter().fold(f64::INFINITY, f64::min);
        let sup = sup_norm(&mu_field(&u, &grid, HalfPlane::Upper, &fopts)?)?;
        ok &= min_im > 0.0 && min_jac > 0.0 && sup < 1.0;
        lines.push(format!("{name}: min Im F {min_im:.2e}, min Jacobian {min_jac:.2e}, sup|μ| {sup:.4}"));
    }
    let constants = NormConstants::default();
    let p = 2.0;
    let radius = constants.radius(p);
    let complex = [
        ("0.01i gauss", on_line(|x| Complex64::new(0.0, 0.01 * (-x * x).exp()))),
        ("0.012i gauss", on_line(|x| Complex64::new(0.0, 0.012 * (-x * x).exp()))),
        ("0.2 gauss + 0.01i gauss", on_line(|x| Complex64::new(0.2, 0.01) * (-x * x).exp())),
        ("0.1 sin + 0.01i gauss", on_line(|x| Complex64::new(0.1 * x.sin(), 0.01 * (-x * x).exp()))),
    ];
    for (name, u) in complex {
        let distance = neighborhood_distance(&u, p)?;
        let within = distance.is_within(&constants, p);
        let sup = sup_norm(&mu_field(&u, &default_grid(&u), HalfPlane::Upper, &fopts)?)?;
        ok &= within && sup < 1.0;
        lines.push(format!(
            "{name}: distance {:.4} < radius {radius:.4}: {within}, sup|μ| {sup:.4}",
            distance.value().unwrap_or(f64::INFINITY)
        ));
    }
    Ok((ok, lines))
}

fn p_norm_bound() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    let amplitudes = [0.05, 0.1, 0.2, 0.4];
    let fields: Vec<(f64, SampledFunction, HalfPlaneField)> = amplitudes
        .iter()
        .map(|&s| {
            let u = gauss(s);
            let window = GridSpec { x_min: -8.0, x_max: 8.0, nx: 513, ..GridSpec::default() };
            let grid = lattice_grid(&u, &window).unwrap();
            let mu = mu_field(&u, &grid, HalfPlane::Upper, &opts(Engine::Fft))?;
            Ok((s, u, mu))
        })
        .collect::<Result<_, heatba_core::Error>>()?;
    for p in [1.5, 2.0, 3.0] {
        let mut ratios = Vec::new();
        for (_, u, mu) in &fields {
            let norm = hyperbolic_p_norm(mu, p)?.integral();
            let besov = besov_norm(u, p)?.norm().unwrap_or(f64::NAN);
            ratios.push(norm / besov.powf(p));
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        let spread = hi / lo;
        ok &= ratios.iter().all(|r| r.is_finite() && *r > 0.0) && spread < 5.0;
        lines.push(format!(
            "p = {p}: ratios {} (spread {spread:.3})",
            ratios.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>().join(", ")
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    lines.push(format!("amplitudes {amplitudes:?}, runtime {:.1}s (limit 300s)", elapsed.as_secs_f64()));
    Ok((ok, lines))
}

fn vanishing() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let fixtures = [
        ("0.05 gauss", gauss(0.05)),
        ("0.1 gauss", gauss(0.1)),
        ("0.2 gauss", gauss(0.2)),
        ("0.4 gauss", gauss(0.4)),
        ("0.05i gauss", on_line(|x| Complex64::new(0.0, 0.05 * (-x * x).exp()))),
    ];
    for (name, u) in fixtures {
        let mu = mu_field(&u, &default_grid(&u), HalfPlane::Upper, &opts(Engine::Fft))?;
        let profile = vanishing_profile(&mu)?;
        let (first, last) = (profile[0].1, profile[profile.len() - 1].1);
        let factor = last / first;
        ok &= factor >= 10.0;
        lines.push(format!("{name}: sup near boundary {first:.3e}, overall {last:.3e}, decrease {factor:.1}x"));
    }
    Ok((ok, lines))
}

fn bilipschitz() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let dopts = opts(Engine::Direct);
    for (name, u) in [("0", real(|_| 0.0)), ("0.7", real(|_| 0.7)), ("-1.5", real(|_| -1.5))] {
        let (lo, hi) = bilipschitz_ratio(&u, &default_grid(&u), &dopts)?;
        let err = (lo - 1.0).abs().max((hi - 1.0).abs());
        ok &= err <= 1e-9;
        lines.push(format!("u = {name}: range [{lo:.12}, {hi:.12}], deviation {err:.1e} (1e-9)"));
    }
    let u = sine(0.2);
    let (lo, hi) = bilipschitz_ratio(&u, &default_grid(&u), &opts(Engine::Fft))?;
    let l = hi.max(1.0 / lo);
    ok &= lo > 0.0 && hi.is_finite() && lo >= 1.0 / l && hi <= l;
    lines.push(format!("u = 0.2 sin: range [{lo:.6}, {hi:.6}], fitted L = {l:.6}"));
    Ok((ok, lines))
}

fn gateaux() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let steps = [1e-2, 5e-3, 2.5e-3];
    let bases = [("0", real(|_| 0.0)), ("0.1 sin", sine(0.1))];
    let directions = [("sin", real(f64::sin)), ("i gauss", on_line(|x| Complex64::new(0.0, (-x * x).exp())))];
    for (bname, u) in &bases {
        let window = GridSpec { x_min: -3.0, x_max: 3.0, nx: 97, y_min: 1e-2, y_max: 10.0, ny: 16 };
        let grid = lattice_grid(u, &window).unwrap();
        for (dname, v) in &directions {
            let table = gateaux_check(u, v, &steps, &grid, 2.0, &opts(Engine::Fft))?;
            let ratios = table.ratios();
            let pass = !ratios.is_empty() && ratios.iter().all(|r| (3.5..=4.5).contains(r));
            ok &= pass;
            lines.push(format!("u = {bname}, v = {dname}: ratios {}", fmt_list(&ratios, 4)));
        }
    }
    Ok((ok, lines))
}

fn fmt_list(v: &[f64], digits: usize) -> String {
    v.iter().map(|r| format!("{r:.digits$}")).collect::<Vec<_>>().join(", ")
}

fn cosine(a: f64) -> SampledFunction {
    SampledFunction::from_real_fn(move |x| a * (2.0 * PI * x).cos(), 0.0, 1.0, 257, ExtensionPolicy::Periodic).unwrap()
}

fn circle_suite() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let p = 2.0;
    let mut ratios = Vec::new();
    for a in [0.05, 0.1, 0.2] {
        let v = cosine(a);
        let c = circle_dilatation(&v, p, DEFAULT_R0, 1e-3, 32, &opts(Engine::Fft))?;
        let mut transport = 0.0f64;
        for j in 0..c.disk.radii().len() {
            for (n, m) in c.disk.ring(j).iter().zip(c.mu.level(j)) {
                transport = transport.max(rel(n.norm(), m.norm()));
            }
        }
        let total = c.norm.total();
        let besov = circle_besov_norm(&lift(&v)?, p)?.norm().unwrap_or(f64::NAN);
        let ratio = total / besov.powf(p);
        ratios.push(ratio);
        ok &= c.periodicity_defect <= 1e-9 && transport <= 1e-14 && total.is_finite();
        lines.push(format!(
            "a = {a}: |F(z+1) - F(z) - 1| {:.1e} (1e-9), |ν| vs |μ| {transport:.1e}, disk integral {total:.4e}, ratio {ratio:.4e}",
            c.periodicity_defect
        ));
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    ok &= hi / lo < 5.0 && lo > 0.0;
    let edge = (-PI).exp();
    let rejected = [edge, 0.9 * edge, 0.0, -0.5, 1.0].iter().all(|&r| check_radius(r).is_err());
    let accepted = [edge * (1.0 + 1e-9), 0.5, 0.99].iter().all(|&r| check_radius(r).is_ok());
    ok &= rejected && accepted;
    lines.push(format!(
        "ratio spread {:.3}; r0 <= e^-π rejected: {rejected}; interior radii accepted: {accepted}",
        hi / lo
    ));
    Ok((ok, lines))
}

/// Every scalar and profile entry of a report, for engine comparison.
fn report_numbers(r: &DiagnosticsReport) -> Vec<(String, f64)> {
    let mut v = vec![
        ("sup_norm".to_string(), r.sup_norm),
        ("p_norm window".to_string(), r.p_norm.window),
        ("p_norm lower tail".to_string(), r.p_norm.lower_tail),
        ("p_norm upper tail".to_string(), r.p_norm.upper_tail),
        ("carleson_sup".to_string(), r.carleson_sup),
    ];
    if let Some(k) = r.dilatation {
        v.push(("K".into(), k));
    }
    if let Some((lo, hi)) = r.bilipschitz {
        v.push(("bilipschitz min".into(), lo));
        v.push(("bilipschitz max".into(), hi));
    }
    v.extend(r.vanishing_profile.iter().map(|&(t, s)| (format!("profile at {t:.2e}"), s)));
    v
}

fn engine_equivalence() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut fixtures = three_fixtures();
    fixtures.push(("0.5 gauss", gauss(0.5)));
    fixtures.push(("0.2 sin", sine(0.2)));
    for (name, u) in fixtures {
        let grid = default_grid(&u);
        let (_, a) = diagnose(&u, &grid, 2.0, &opts(Engine::Direct))?;
        let (_, b) = diagnose(&u, &grid, 2.0, &opts(Engine::Fft))?;
        let (mut worst, mut at) = (0.0f64, String::new());
        for ((key, x), (_, y)) in report_numbers(&a).into_iter().zip(report_numbers(&b)) {
            if rel(x, y) > worst {
                worst = rel(x, y);
                at = key;
            }
        }
        let flags = (a.in_m, a.in_m0, a.in_mp) == (b.in_m, b.in_m0, b.in_mp);
        ok &= worst <= 1e-6 && flags;
        lines.push(format!("{name}: max relative difference {worst:.1e} ({at}), flags agree: {flags}"));
    }
    let mut config = RunConfig::new(Command::Verify);
    config.inputs = vec![concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures").to_string()];
    let start = Instant::now();
    let suite = run_suite(&config).map_err(|e| heatba_core::Error::InvalidFunction(e.to_string()))?;
    let elapsed = start.elapsed();
    ok &= suite.failures() == 0 && elapsed < Duration::from_secs(600);
    lines.push(format!(
        "verify on shipped fixtures: {} checks, {} failed, {:.1}s (limit 600s)",
        suite.checks.len(),
        suite.failures(),
        elapsed.as_secs_f64()
    ));
    Ok((ok, lines))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("identity suite", identity_suite),
        ("kernel gate", kernel_gate),
        ("equivariance suite", equivariance_suite),
        ("self-map certificate", certificate),
        ("p-norm vs Besov bound shape", p_norm_bound),
        ("boundary vanishing", vanishing),
        ("bi-Lipschitz ratio", bilipschitz),
        ("Gateaux second-order signature", gateaux),
        ("circle suite", circle_suite),
        ("engine equivalence", engine_equivalence),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, lines) = match check() {
            Ok(r) => r,
            Err(e) => (false, vec![format!("error: {e}")]),
        };
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} [{name}] {:.2}s", k + 1, start.elapsed().as_secs_f64());
        for line in lines {
            println!("    {line}");
        }
        if !passed {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
