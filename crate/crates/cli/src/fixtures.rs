//! Input functions: CSV files or named builtins, and grids snapped to their
//! sample lattice.
//!
//! Builtin names (`builtin:` prefix, parameters after colons):
//!
//! | name | function | domain |
//! |------|----------|--------|
//! | `zero` | `0` | line |
//! | `const:a[:b]` | `a + ib` | line |
//! | `sin:e` | `e sin x` | line |
//! | `gauss:s` | `s e^{-x^2}` | line |
//! | `step` | `1` on `x ≥ 0`, else `0` | line |
//! | `mix:a:b` | `a sin x + i b e^{-x^2}` | line |
//! | `cos:a` | `a cos 2πx` | circle |
//! | `circle-step` | `1` on `[1/4, 3/4)`, else `0` | circle |

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use heatba_core::field::{geometric_levels, Grid};
use heatba_core::funcspace::{ExtensionPolicy, SampledFunction};

use crate::config::{GridSpec, RunConfig};
use crate::error::{CliError, CliResult};

pub const BUILTIN_PREFIX: &str = "builtin:";

fn param(parts: &[&str], i: usize, name: &str) -> CliResult<f64> {
    let raw = parts.get(i).ok_or_else(|| CliError::Config(format!("builtin `{name}` is missing a parameter")))?;
    raw.parse().map_err(|_| CliError::Config(format!("builtin `{name}`: cannot parse `{raw}`")))
}

/// Resolves a builtin name (without the prefix).
pub fn builtin(name: &str, config: &RunConfig) -> CliResult<SampledFunction> {
    let parts: Vec<&str> = name.split(':').collect();
    let name = parts[0];
    let (l, n) = (config.domain, config.samples);
    let line = |f: Box<dyn Fn(f64) -> Complex64 + Send + Sync>| {
        SampledFunction::from_fn(f, -l, l, n, ExtensionPolicy::ConstantExtend).map_err(CliError::from)
    };
    let circle = |f: Box<dyn Fn(f64) -> f64 + Send + Sync>| {
        SampledFunction::from_real_fn(f, 0.0, 1.0, config.circle_samples, ExtensionPolicy::Periodic)
            .map_err(CliError::from)
    };
    match name {
        "zero" => line(Box::new(|_| Complex64::new(0.0, 0.0))),
        "const" => {
            let a = param(&parts, 1, name)?;
            let b = if parts.len() > 2 { param(&parts, 2, name)? } else { 0.0 };
            line(Box::new(move |_| Complex64::new(a, b)))
        }
        "sin" => {
            let e = param(&parts, 1, name)?;
            line(Box::new(move |x| Complex64::new(e * x.sin(), 0.0)))
        }
        "gauss" => {
            let s = param(&parts, 1, name)?;
            line(Box::new(move |x| Complex64::new(s * (-x * x).exp(), 0.0)))
        }
        "step" => line(Box::new(|x| Complex64::new(if x >= 0.0 { 1.0 } else { 0.0 }, 0.0))),
        "mix" => {
            let (a, b) = (param(&parts, 1, name)?, param(&parts, 2, name)?);
            line(Box::new(move |x| Complex64::new(a * x.sin(), b * (-x * x).exp())))
        }
        "cos" => {
            let a = param(&parts, 1, name)?;
            circle(Box::new(move |x| a * (2.0 * PI * x).cos()))
        }
        "circle-step" => circle(Box::new(|x| {
            let t = x.rem_euclid(1.0);
            if (0.25..0.75).contains(&t) {
                1.0
            } else {
                0.0
            }
        })),
        other => Err(CliError::Config(format!("unknown builtin `{other}`"))),
    }
}

/// A builtin or a CSV file. CSV inputs use `policy`, or `fallback` if unset.
pub fn load(input: &str, config: &RunConfig, fallback: ExtensionPolicy) -> CliResult<SampledFunction> {
    if let Some(name) = input.strip_prefix(BUILTIN_PREFIX) {
        return builtin(name, config);
    }
    let path = Path::new(input);
    if !path.is_file() {
        return Err(CliError::Config(format!("input `{input}` is neither a file nor a builtin")));
    }
    Ok(SampledFunction::read_csv(path, config.policy.unwrap_or(fallback))?)
}

/// Lattice points `x_min(u) + k h` in `[x_min, x_max]`, thinned by the
/// smallest stride leaving at most `nx` nodes, and `ny` geometric levels.
pub fn lattice_grid(u: &SampledFunction, window: &GridSpec) -> CliResult<Grid> {
    let h = u.step();
    let tol = 1e-9;
    let first = ((window.x_min - u.x_min()) / h - tol).ceil() as i64;
    let last = ((window.x_max - u.x_min()) / h + tol).floor() as i64;
    if last < first {
        return Err(CliError::Config(format!("no sample node of the input lies in [{}, {}]", window.x_min, window.x_max)));
    }
    let count = (last - first + 1) as usize;
    let stride = count.div_ceil(window.nx).max(1);
    let x: Vec<f64> = (first..=last).step_by(stride).map(|k| u.x_min() + k as f64 * h).collect();
    if x.len() < 2 {
        return Err(CliError::Config(format!("grid [{}, {}] holds fewer than two sample nodes", window.x_min, window.x_max)));
    }
    Ok(Grid::new(x, geometric_levels(window.y_min, window.y_max, window.ny)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn builtins_resolve() {
        let c = RunConfig::new(Command::Extend);
        let u = builtin("sin:0.1", &c).unwrap();
        assert_eq!(u.len(), c.samples);
        assert!((u.eval(1.0).re - 0.1 * 1f64.sin()).abs() < 1e-15);
        let m = builtin("mix:0.1:0.05", &c).unwrap();
        assert!((m.eval(0.0).im - 0.05).abs() < 1e-15);
        let v = builtin("cos:0.1", &c).unwrap();
        assert_eq!(v.policy(), ExtensionPolicy::Periodic);
        assert!(builtin("nope", &c).is_err());
        assert!(builtin("sin", &c).is_err());
        assert!(load("missing.csv", &c, ExtensionPolicy::ConstantExtend).is_err());
    }

    #[test]
    fn grid_is_on_lattice() {
        let c = RunConfig::new(Command::Extend);
        let u = builtin("zero", &c).unwrap();
        let g = lattice_grid(&u, &GridSpec { x_min: -4.0, x_max: 4.0, nx: 100, ..GridSpec::default() }).unwrap();
        assert!(g.nx() <= 100 && g.nx() >= 8);
        let h = u.step();
        for &x in g.x() {
            let k = (x - u.x_min()) / h;
            assert!((k - k.round()).abs() < 1e-9);
        }
    }
}
