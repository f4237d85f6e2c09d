//! The invariant suite run by `heatba verify`.
//!
//! Every check builds its own small fixture, so the suite is independent of
//! the configured grid; inputs named in the configuration get an extra sanity
//! check each.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use heatba_core::circle::{check_radius, circle_dilatation, DEFAULT_R0};
use heatba_core::diagnostics::{
    bilipschitz_ratio, carleson_profile, diagnose, gateaux_check, sup_norm, DiagnosticsReport,
};
use heatba_core::extension::{complex_derivatives, extend, extend_at, mu_at, mu_field, partials, ExtensionOptions};
use heatba_core::field::{geometric_levels, Content, Grid, HalfPlane, HalfPlaneField};
use heatba_core::funcspace::{besov_norm, bmo_norm, ExtensionPolicy, IntervalFamily, SampledFunction};
use heatba_core::kernels::{Engine, Kernel, KernelSet};
use heatba_core::numerics::gl_integrate_c;

use crate::config::{GridSpec, RunConfig};
use crate::error::CliResult;
use crate::fixtures::{lattice_grid, load, BUILTIN_PREFIX};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteResult {
    pub checks: Vec<CheckResult>,
}

impl SuiteResult {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                format!("{tag} {:<22} {:>7.2}s  {}", c.name, c.seconds, c.detail)
            })
            .collect();
        out.push(format!("{} checks, {} failed", self.checks.len(), self.failures()));
        out
    }

    pub fn text(&self) -> String {
        self.lines().join("\n") + "\n"
    }
}

type Outcome = heatba_core::Result<(bool, String)>;

struct Context {
    kernels: KernelSet,
}

impl Context {
    fn opts(&self, engine: Engine) -> ExtensionOptions {
        ExtensionOptions { engine, kernels: self.kernels, normalize: true }
    }
}

fn line_fn(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> SampledFunction {
    SampledFunction::from_fn(f, -32.0, 32.0, 2049, ExtensionPolicy::ConstantExtend).expect("valid fixture")
}

fn real_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SampledFunction {
    line_fn(move |x| Complex64::new(f(x), 0.0))
}

fn small_grid(u: &SampledFunction, y_max: f64, levels: usize) -> heatba_core::Result<Grid> {
    Grid::on_samples_within(u, -4.0, 4.0, 8, geometric_levels(1e-3, y_max, levels)?)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn identity(cx: &Context) -> Outcome {
    let mut worst = [0.0f64; 2];
    for c in [Complex64::new(0.0, 0.0), Complex64::new(0.7, 0.0), Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.0)] {
        let u = line_fn(move |_| c);
        let grid = small_grid(&u, 1e2, 16)?;
        for (k, engine) in [Engine::Direct, Engine::Fft].into_iter().enumerate() {
            let opts = cx.opts(engine);
            let f = extend(&u, &grid, HalfPlane::Upper, &opts)?;
            let exact = HalfPlaneField::from_fn(grid.clone(), HalfPlane::Upper, Content::F, |x, y| Complex64::new(x, y));
            let mu = mu_field(&u, &grid, HalfPlane::Upper, &opts)?;
            worst[k] = worst[k].max(max_diff(f.values(), exact.values())).max(sup_norm(&mu)?);
        }
    }
    Ok((worst[0] <= 1e-9 && worst[1] <= 1e-6, format!("direct {:.1e}, fft {:.1e}", worst[0], worst[1])))
}

fn kernel_moments(_: &Context) -> Outcome {
    let integrate = |k: Kernel, m: i32| gl_integrate_c(|x| k.eval(x) * x.powi(m), -12.0, 12.0, 96);
    let errs = [
        integrate(Kernel::alpha(), 0).norm(),
        (integrate(Kernel::beta(), 0) - 1.0).norm(),
        (integrate(Kernel::phi(), 0) - 1.0).norm(),
        (integrate(Kernel::phi(), 2) - 0.5).norm(),
        (integrate(Kernel::psi(), 1) + 1.0).norm(),
        (integrate(Kernel::extension(), 0) - 1.0).norm(),
        (integrate(Kernel::extension(), 1) + Complex64::i()).norm(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok((worst <= 1e-10, format!("max moment error {worst:.1e}")))
}

fn partials_fd(cx: &Context) -> Outcome {
    let u = real_fn(|x| 0.1 * x.sin());
    let opts = cx.opts(Engine::Direct);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let (x, y) = (-2.0 + 0.45 * k as f64, 0.05 + 0.2 * k as f64);
        let p = partials(&u, x, y, &opts)?;
        let d = 1e-4 * y;
        let f = |x, y| extend_at(&u, x, y, &opts);
        let fx = (f(x + d, y)? - f(x - d, y)?) / (2.0 * d);
        let fy = (f(x, y + d)? - f(x, y - d)?) / (2.0 * d);
        let i = Complex64::i();
        let scale = (p.ux + i * p.vx).norm();
        worst = worst.max((fx - (p.ux + i * p.vx)).norm() / scale).max((fy - (p.uy + i * p.vy)).norm() / scale);
    }
    Ok((worst <= 1e-4, format!("max relative error {worst:.1e}")))
}

fn equivariance(cx: &Context) -> Outcome {
    let u = real_fn(|x| 0.2 * (-x * x).exp() + 0.05 * x.sin());
    let opts = cx.opts(Engine::Fft);
    let grid = small_grid(&u, 10.0, 12)?;
    let base = mu_field(&u, &grid, HalfPlane::Upper, &opts)?;
    let shifted = mu_field(&u.add_constant(Complex64::new(0.3, 0.4)), &grid, HalfPlane::Upper, &opts)?;
    let shift = max_diff(base.values(), shifted.values());
    let set = cx.kernels;
    let (mut trans, mut scale) = (0.0f64, 0.0f64);
    for &(x, y) in &[(0.0, 0.5), (-1.3, 0.1), (2.0, 2.0)] {
        let a = 0.7;
        trans = trans.max((mu_at(&u.translate(a), x, y, &set)? - mu_at(&u, x + a, y, &set)?).norm());
        for lambda in [0.5, 2.0] {
            let lhs = mu_at(&u.rescale(lambda)?, x, y, &set)?;
            scale = scale.max((lhs - mu_at(&u, lambda * x, lambda * y, &set)?).norm());
        }
    }
    Ok((
        shift <= 1e-10 && trans <= 1e-8 && scale <= 1e-6,
        format!("shift {shift:.1e}, translation {trans:.1e}, scaling {scale:.1e}"),
    ))
}

fn lower_reflection(cx: &Context) -> Outcome {
    let u = real_fn(|x| 0.1 * x.sin());
    let grid = small_grid(&u, 10.0, 12)?;
    let opts = cx.opts(Engine::Fft);
    let up = mu_field(&u, &grid, HalfPlane::Upper, &opts)?;
    let down = mu_field(&u, &grid, HalfPlane::Lower, &opts)?;
    let err = up.values().iter().zip(down.values()).map(|(a, b)| (a.conj() - b).norm()).fold(0.0, f64::max);
    Ok((err <= 1e-8, format!("max |conj μ_U - μ_L| {err:.1e}")))
}

fn certificate(cx: &Context) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, u) in [("0.2 sin", real_fn(|x| 0.2 * x.sin())), ("0.5 gauss", real_fn(|x| 0.5 * (-x * x).exp()))] {
        let grid = small_grid(&u, 1e2, 24)?;
        let opts = cx.opts(Engine::Fft);
        let f = extend(&u, &grid, HalfPlane::Upper, &opts)?;
        let d = complex_derivatives(&u, &grid, HalfPlane::Upper, &opts)?;
        let min_im = f.values().iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
        let min_jac = d.jacobian().into_iter().fold(f64::INFINITY, f64::min);
        let sup = sup_norm(&mu_field(&u, &grid, HalfPlane::Upper, &opts)?)?;
        ok &= min_im > 0.0 && min_jac > 0.0 && sup < 1.0;
        detail.push(format!("{name}: min Im F {min_im:.1e}, min J {min_jac:.1e}, sup|μ| {sup:.3}"));
    }
    Ok((ok, detail.join("; ")))
}

fn report_invariants(report: &DiagnosticsReport) -> bool {
    let k_ok = report.dilatation.is_none_or(|k| k >= 1.0);
    let flags_ok = !report.in_mp || report.in_m;
    let monotone = report.vanishing_profile.windows(2).all(|w| w[1].1 >= w[0].1);
    k_ok && flags_ok && monotone
}

fn reports(cx: &Context) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, u) in [("0.1 gauss", real_fn(|x| 0.1 * (-x * x).exp())), ("0.1 sin", real_fn(|x| 0.1 * x.sin()))] {
        let grid = small_grid(&u, 1e2, 32)?;
        let (_, r) = diagnose(&u, &grid, 2.0, &cx.opts(Engine::Fft))?;
        ok &= report_invariants(&r);
        detail.push(format!("{name}: K {:.4}", r.dilatation.unwrap_or(f64::INFINITY)));
    }
    Ok((ok, detail.join("; ")))
}

fn carleson_zero(_: &Context) -> Outcome {
    let grid = Grid::uniform(-2.0, 2.0, 65, 1e-3, 10.0, 16)?;
    let zero = HalfPlaneField::from_fn(grid, HalfPlane::Upper, Content::Mu, |_, _| Complex64::new(0.0, 0.0));
    let prof = carleson_profile(&zero)?;
    Ok((prof.entries.iter().all(|e| e.measure == 0.0), format!("{} boxes", prof.entries.len())))
}

fn bilipschitz_identity(cx: &Context) -> Outcome {
    let u = real_fn(|_| 0.0);
    let grid = small_grid(&u, 10.0, 12)?;
    let (lo, hi) = bilipschitz_ratio(&u, &grid, &cx.opts(Engine::Direct))?;
    let err = (lo - 1.0).abs().max((hi - 1.0).abs());
    Ok((err <= 1e-9, format!("range [{lo:.12}, {hi:.12}]")))
}

fn gateaux(cx: &Context) -> Outcome {
    let u = real_fn(|_| 0.0);
    let v = real_fn(f64::sin);
    let grid = Grid::on_samples_within(&u, -3.0, 3.0, 16, geometric_levels(1e-2, 10.0, 12)?)?;
    let table = gateaux_check(&u, &v, &[1e-2, 5e-3, 2.5e-3], &grid, 2.0, &cx.opts(Engine::Fft))?;
    let ratios = table.ratios();
    let ok = !ratios.is_empty() && ratios.iter().all(|r| (3.5..=4.5).contains(r));
    Ok((ok, format!("ratios {ratios:.3?}")))
}

fn circle(cx: &Context) -> Outcome {
    let v = SampledFunction::from_real_fn(
        |x| 0.1 * (2.0 * std::f64::consts::PI * x).cos(),
        0.0,
        1.0,
        257,
        ExtensionPolicy::Periodic,
    )?;
    let a = circle_dilatation(&v, 2.0, DEFAULT_R0, 1e-3, 16, &cx.opts(Engine::Fft))?;
    let transport = rel(a.disk.sup_modulus(), sup_norm(&a.mu)?) <= 1e-12;
    let rejects = check_radius((-std::f64::consts::PI).exp()).is_err() && check_radius(0.02).is_err();
    Ok((
        a.periodicity_defect <= 1e-9 && transport && rejects && a.norm.total().is_finite(),
        format!("defect {:.1e}, disk integral {:.4e}", a.periodicity_defect, a.norm.total()),
    ))
}

/// The report entries compared between engines.
fn comparable(r: &DiagnosticsReport) -> Vec<f64> {
    let mut v = vec![r.sup_norm, r.p_norm.window, r.carleson_sup];
    if let Some((lo, hi)) = r.bilipschitz {
        v.extend([lo, hi]);
    }
    v
}

fn engines(cx: &Context) -> Outcome {
    let mut worst = 0.0f64;
    for u in [real_fn(|x| 0.2 * (-x * x).exp()), real_fn(|x| 0.1 * x.sin())] {
        let grid = small_grid(&u, 1e2, 24)?;
        let (_, a) = diagnose(&u, &grid, 2.0, &cx.opts(Engine::Direct))?;
        let (_, b) = diagnose(&u, &grid, 2.0, &cx.opts(Engine::Fft))?;
        for (x, y) in comparable(&a).into_iter().zip(comparable(&b)) {
            worst = worst.max(rel(x, y));
        }
    }
    Ok((worst <= 1e-6, format!("max relative difference {worst:.1e}")))
}

fn step_norms(_: &Context) -> Outcome {
    let u = real_fn(|x| if x >= 0.0 { 1.0 } else { 0.0 });
    let bmo = bmo_norm(&u, &IntervalFamily::dyadic_strided(&u, None, 512))?;
    let divergent = besov_norm(&u, 2.0)?.is_divergent();
    Ok(((bmo - 0.5).abs() <= 1e-9 && divergent, format!("BMO {bmo:.12}, Besov divergent {divergent}")))
}

fn input_check(input: &str, config: &RunConfig, cx: &Context) -> CliResult<(bool, String)> {
    let periodic = input.ends_with(".periodic.csv") || input.starts_with("builtin:cos") || input == "builtin:circle-step";
    let policy = if periodic { ExtensionPolicy::Periodic } else { ExtensionPolicy::ConstantExtend };
    let u = load(input, config, policy)?;
    if periodic {
        let a = circle_dilatation(&u, config.p, config.r0, 1e-3, 16, &cx.opts(config.engine))?;
        return Ok((a.periodicity_defect <= 1e-9, format!("periodicity defect {:.1e}", a.periodicity_defect)));
    }
    let probe_grid = GridSpec { nx: 65, ny: 24, ..GridSpec::default() };
    let grid = lattice_grid(&u, &probe_grid)?;
    let (_, r) = diagnose(&u, &grid, config.p, &cx.opts(config.engine))?;
    Ok((report_invariants(&r), format!("sup|μ| {:.4e}", r.sup_norm)))
}

type Check = (&'static str, fn(&Context) -> Outcome);

const CHECKS: [Check; 13] = [
    ("identity", identity),
    ("kernel-moments", kernel_moments),
    ("partials-fd", partials_fd),
    ("equivariance", equivariance),
    ("lower-reflection", lower_reflection),
    ("certificate", certificate),
    ("report-invariants", reports),
    ("carleson-zero", carleson_zero),
    ("bilipschitz-identity", bilipschitz_identity),
    ("gateaux", gateaux),
    ("circle", circle),
    ("engine-equivalence", engines),
    ("step-norms", step_norms),
];

fn record<E: std::fmt::Display>(name: String, f: impl FnOnce() -> Result<(bool, String), E>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Expands directory inputs to their `.csv` files, sorted by name.
fn expand_inputs(inputs: &[String]) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    for input in inputs {
        let path = Path::new(input);
        if !input.starts_with(BUILTIN_PREFIX) && path.is_dir() {
            let mut files: Vec<String> = std::fs::read_dir(path)
                .map_err(|e| crate::error::CliError::io(path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .map(|p| p.display().to_string())
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

/// Runs the fixed checks, then one check per configured input.
pub fn run_suite(config: &RunConfig) -> CliResult<SuiteResult> {
    let cx = Context { kernels: config.kernel_set()? };
    let inputs = expand_inputs(&config.inputs)?;
    let mut checks: Vec<CheckResult> =
        CHECKS.par_iter().map(|(name, f)| record(name.to_string(), || f(&cx))).collect();
    checks.extend(inputs.iter().map(|input| record(format!("input {input}"), || input_check(input, config, &cx))));
    Ok(SuiteResult { checks })
}
