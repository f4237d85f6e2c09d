//! Command dispatch and artifact files.

use std::fs;
use std::path::PathBuf;

use log::info;

use heatba_core::circle::circle_dilatation;
use heatba_core::diagnostics::{
    carleson_profile, diagnose, gateaux_check, is_vanishing, vanishing_profile, write_profile_csv, FuncspaceSummary,
};
use heatba_core::extension::{extend, mu_field, ExtensionOptions};
use heatba_core::field::{HalfPlane, HalfPlaneField};
use heatba_core::funcspace::{ExtensionPolicy, SampledFunction};

use crate::config::{Command, HalfPlaneChoice, RunConfig};
use crate::error::{CliError, CliResult};
use crate::fixtures::{lattice_grid, load};
use crate::verify::run_suite;

/// Files written and lines for standard output.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    /// Failed verification checks; zero for other commands.
    pub failures: usize,
}

/// Writes files under the output directory, each led by a comment line with
/// the configuration hash and grid.
struct Artifacts {
    dir: PathBuf,
    header: String,
    summary: RunSummary,
}

impl Artifacts {
    fn new(config: &RunConfig) -> CliResult<Self> {
        fs::create_dir_all(&config.out).map_err(|e| CliError::io(&config.out, e))?;
        Ok(Artifacts {
            dir: config.out.clone(),
            header: format!(
                "# heatba {} config_hash={} grid={} engine={}\n",
                config.command,
                config.hash(),
                config.grid,
                config.engine.name()
            ),
            summary: RunSummary::default(),
        })
    }

    fn write<F>(&mut self, name: &str, body: F) -> CliResult<()>
    where
        F: FnOnce(&mut Vec<u8>) -> heatba_core::Result<()>,
    {
        let mut buf = self.header.clone().into_bytes();
        body(&mut buf)?;
        let path = self.dir.join(name);
        fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
        info!("wrote {}", path.display());
        self.summary.files.push(path);
        Ok(())
    }

    fn say(&mut self, line: impl Into<String>) {
        self.summary.lines.push(line.into());
    }
}

fn options(config: &RunConfig) -> CliResult<ExtensionOptions> {
    Ok(ExtensionOptions { engine: config.engine, kernels: config.kernel_set()?, normalize: config.normalize })
}

fn single_input(config: &RunConfig, fallback: ExtensionPolicy) -> CliResult<SampledFunction> {
    match config.inputs.as_slice() {
        [one] => load(one, config, fallback),
        [] => Err(CliError::Config(format!("`{}` needs an input", config.command))),
        _ => Err(CliError::Config(format!("`{}` takes exactly one input", config.command))),
    }
}

fn halves(choice: HalfPlaneChoice) -> Vec<HalfPlane> {
    match choice {
        HalfPlaneChoice::Upper => vec![HalfPlane::Upper],
        HalfPlaneChoice::Lower => vec![HalfPlane::Lower],
        HalfPlaneChoice::Both => vec![HalfPlane::Upper, HalfPlane::Lower],
    }
}

fn field_csv(field: &HalfPlaneField) -> impl FnOnce(&mut Vec<u8>) -> heatba_core::Result<()> + '_ {
    move |w| field.write_csv(w, None)
}

fn write_lines<'a>(lines: &'a [(&'static str, String)]) -> impl FnOnce(&mut Vec<u8>) -> heatba_core::Result<()> + 'a {
    move |w| {
        for (k, v) in lines {
            w.extend_from_slice(format!("{k}={v}\n").as_bytes());
        }
        Ok(())
    }
}

fn write_row<'a>(lines: &'a [(&'static str, String)]) -> impl FnOnce(&mut Vec<u8>) -> heatba_core::Result<()> + 'a {
    move |w| {
        let keys: Vec<&str> = lines.iter().map(|(k, _)| *k).collect();
        let values: Vec<&str> = lines.iter().map(|(_, v)| v.as_str()).collect();
        w.extend_from_slice(format!("{}\n{}\n", keys.join(","), values.join(",")).as_bytes());
        Ok(())
    }
}

/// Validates `config`, runs its command, and writes its artifacts.
pub fn run(config: &RunConfig) -> CliResult<RunSummary> {
    config.validate()?;
    let mut out = Artifacts::new(config)?;
    info!("{} with config hash {}", config.command, config.hash());
    match config.command {
        Command::Extend => run_extend(config, &mut out)?,
        Command::Dilatation => run_dilatation(config, &mut out)?,
        Command::Norms => run_norms(config, &mut out)?,
        Command::Carleson => run_carleson(config, &mut out)?,
        Command::Circle => run_circle(config, &mut out)?,
        Command::Gateaux => run_gateaux(config, &mut out)?,
        Command::Verify => {
            let suite = run_suite(config)?;
            out.write("verify.txt", |w| {
                w.extend_from_slice(suite.text().as_bytes());
                Ok(())
            })?;
            out.summary.lines.extend(suite.lines());
            out.summary.failures = suite.failures();
        }
    }
    Ok(out.summary)
}

fn run_extend(config: &RunConfig, out: &mut Artifacts) -> CliResult<()> {
    let u = single_input(config, ExtensionPolicy::ConstantExtend)?;
    let grid = lattice_grid(&u, &config.grid)?;
    let opts = options(config)?;
    for half in halves(config.half_plane) {
        let f = extend(&u, &grid, half, &opts)?;
        out.write(&format!("F_{}.csv", half.name()), field_csv(&f))?;
    }
    out.say(format!("extension on {} x {} grid", grid.nx(), grid.ny()));
    Ok(())
}

fn run_dilatation(config: &RunConfig, out: &mut Artifacts) -> CliResult<()> {
    let u = single_input(config, ExtensionPolicy::ConstantExtend)?;
    let grid = lattice_grid(&u, &config.grid)?;
    let opts = options(config)?;
    let (mu, report) = diagnose(&u, &grid, config.p, &opts)?;
    out.write("mu.csv", field_csv(&mu))?;
    if config.half_plane != HalfPlaneChoice::Upper {
        let lower = mu_field(&u, &grid, HalfPlane::Lower, &opts)?;
        out.write("mu_lower.csv", field_csv(&lower))?;
    }
    let entries = report.entries();
    out.write("report.txt", write_lines(&entries))?;
    out.write("report.csv", write_row(&entries))?;
    out.write("vanishing.csv", |w| write_profile_csv(&report.vanishing_profile, w))?;
    for (k, v) in entries {
        out.say(format!("{k}={v}"));
    }
    Ok(())
}

fn run_norms(config: &RunConfig, out: &mut Artifacts) -> CliResult<()> {
    let u = single_input(config, ExtensionPolicy::ConstantExtend)?;
    let summary = FuncspaceSummary::compute(&u, config.p)?;
    let constants = config.constants()?;
    let mut entries = vec![("p", config.p.to_string())];
    entries.extend(summary.entries());
    entries.push(("radius", constants.radius(config.p).to_string()));
    entries.push(("in_neighborhood", summary.distance.is_within(&constants, config.p).to_string()));
    out.write("norms.txt", write_lines(&entries))?;
    out.write("norms.csv", write_row(&entries))?;
    for (k, v) in entries {
        out.say(format!("{k}={v}"));
    }
    Ok(())
}

fn run_carleson(config: &RunConfig, out: &mut Artifacts) -> CliResult<()> {
    let u = single_input(config, ExtensionPolicy::ConstantExtend)?;
    let grid = lattice_grid(&u, &config.grid)?;
    let mu = mu_field(&u, &grid, HalfPlane::Upper, &options(config)?)?;
    let profile = carleson_profile(&mu)?;
    let vanishing = vanishing_profile(&mu)?;
    out.write("carleson.csv", |w| profile.write_csv(w))?;
    out.write("carleson_boxes.csv", |w| {
        w.extend_from_slice(b"center,half,measure\n");
        for e in &profile.entries {
            w.extend_from_slice(
                format!("{:.17e},{:.17e},{:.17e}\n", e.interval.center, e.interval.half, e.measure).as_bytes(),
            );
        }
        Ok(())
    })?;
    out.write("vanishing.csv", |w| write_profile_csv(&vanishing, w))?;
    out.say(format!("carleson_sup={:.12e}", profile.supremum()));
    out.say(format!("in_M0={}", is_vanishing(&vanishing)));
    Ok(())
}

fn run_circle(config: &RunConfig, out: &mut Artifacts) -> CliResult<()> {
    let v = single_input(config, ExtensionPolicy::Periodic)?;
    let a = circle_dilatation(&v, config.p, config.r0, config.grid.y_min, config.grid.ny, &options(config)?)?;
    out.write("nu.csv", |w| a.disk.write_csv(w, None))?;
    out.write("mu_strip.csv", field_csv(&a.mu))?;
    out.write("carleson.csv", |w| a.carleson.write_csv(w))?;
    let besov = a.besov.norm();
    let entries = vec![
        ("p", config.p.to_string()),
        ("r0", config.r0.to_string()),
        ("sup_nu", format!("{:.12e}", a.disk.sup_modulus())),
        ("disk_annulus", format!("{:.12e}", a.norm.annulus)),
        ("disk_rim_tail", format!("{:.12e}", a.norm.rim_tail)),
        ("disk_compact", format!("{:.12e}", a.norm.compact)),
        ("disk_p_integral", format!("{:.12e}", a.norm.total())),
        ("circle_besov", besov.map_or("divergent".into(), |b| format!("{b:.12e}"))),
        (
            "ratio",
            besov.filter(|&b| b > 0.0).map_or("na".into(), |b| format!("{:.12e}", a.norm.total() / b.powf(config.p))),
        ),
        ("periodicity_defect", format!("{:.3e}", a.periodicity_defect)),
    ];
    out.write("circle.txt", write_lines(&entries))?;
    for (k, v) in entries {
        out.say(format!("{k}={v}"));
    }
    Ok(())
}

fn run_gateaux(config: &RunConfig, out: &mut Artifacts) -> CliResult<()> {
    let u = single_input(config, ExtensionPolicy::ConstantExtend)?;
    let v = load(&config.direction, config, ExtensionPolicy::ConstantExtend)?;
    let grid = lattice_grid(&u, &config.grid)?;
    let table = gateaux_check(&u, &v, &config.steps, &grid, config.p, &options(config)?)?;
    out.write("gateaux.csv", |w| table.write_csv(w))?;
    out.write("gateaux_limit.csv", field_csv(&table.limit))?;
    for r in table.ratios() {
        out.say(format!("ratio={r:.6}"));
    }
    Ok(())
}
