//! Run configuration: a flat `key=value` file, overridden key by key from the
//! command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use heatba_core::field::{DEFAULT_LEVELS, DEFAULT_Y_MAX, DEFAULT_Y_MIN};
use heatba_core::funcspace::{ExtensionPolicy, NormConstants};
use heatba_core::kernels::{Engine, KernelSet, DEFAULT_NODES_PER_UNIT, DEFAULT_TRUNCATION};

use crate::error::{CliError, CliResult};

/// Smallest accepted node and level counts.
pub const MIN_GRID_COUNT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Extend,
    Dilatation,
    Norms,
    Carleson,
    Circle,
    Verify,
    Gateaux,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Extend,
        Command::Dilatation,
        Command::Norms,
        Command::Carleson,
        Command::Circle,
        Command::Verify,
        Command::Gateaux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Extend => "extend",
            Command::Dilatation => "dilatation",
            Command::Norms => "norms",
            Command::Carleson => "carleson",
            Command::Circle => "circle",
            Command::Verify => "verify",
            Command::Gateaux => "gateaux",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command `{s}`")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `x_min, x_max, nx, y_min, y_max, ny`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { x_min: -4.0, x_max: 4.0, nx: 257, y_min: DEFAULT_Y_MIN, y_max: DEFAULT_Y_MAX, ny: DEFAULT_LEVELS }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{},{}", self.x_min, self.x_max, self.nx, self.y_min, self.y_max, self.ny)
    }
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(CliError::Config(format!("grid `{s}` needs x_min,x_max,nx,y_min,y_max,ny")));
        }
        Ok(GridSpec {
            x_min: parse_value("grid", parts[0])?,
            x_max: parse_value("grid", parts[1])?,
            nx: parse_value("grid", parts[2])?,
            y_min: parse_value("grid", parts[3])?,
            y_max: parse_value("grid", parts[4])?,
            ny: parse_value("grid", parts[5])?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfPlaneChoice {
    Upper,
    Lower,
    Both,
}

impl HalfPlaneChoice {
    fn name(self) -> &'static str {
        match self {
            HalfPlaneChoice::Upper => "upper",
            HalfPlaneChoice::Lower => "lower",
            HalfPlaneChoice::Both => "both",
        }
    }
}

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Fixture paths or `builtin:` names.
    pub inputs: Vec<String>,
    /// Direction for `gateaux`.
    pub direction: String,
    /// Extension policy for CSV inputs; circle data defaults to periodic.
    pub policy: Option<ExtensionPolicy>,
    pub p: f64,
    pub grid: GridSpec,
    pub truncation: f64,
    pub nodes_per_unit: usize,
    pub c_jn: f64,
    pub c0: f64,
    pub radius: Option<f64>,
    pub r0: f64,
    pub out: PathBuf,
    pub engine: Engine,
    pub half_plane: HalfPlaneChoice,
    pub normalize: bool,
    pub steps: Vec<f64>,
    /// Half-width of the sampled domain of line builtins.
    pub domain: f64,
    /// Sample count of line builtins.
    pub samples: usize,
    /// Samples per period of circle builtins.
    pub circle_samples: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let defaults = NormConstants::default();
        RunConfig {
            command,
            inputs: Vec::new(),
            direction: "builtin:sin:1".into(),
            policy: None,
            p: 2.0,
            grid: GridSpec::default(),
            truncation: DEFAULT_TRUNCATION,
            nodes_per_unit: DEFAULT_NODES_PER_UNIT,
            c_jn: defaults.c_jn,
            c0: defaults.c0,
            radius: defaults.neighborhood_radius,
            r0: heatba_core::circle::DEFAULT_R0,
            out: PathBuf::from("out"),
            engine: Engine::Fft,
            half_plane: HalfPlaneChoice::Upper,
            normalize: true,
            steps: vec![1e-2, 5e-3, 2.5e-3],
            domain: 32.0,
            samples: 4097,
            circle_samples: 257,
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let value = value.trim();
        match key.trim() {
            "command" => self.command = value.parse()?,
            "input" => self.inputs = split_list(value),
            "direction" => self.direction = value.to_string(),
            "policy" => {
                self.policy = Some(match value {
                    "constant" | "constant-extend" => ExtensionPolicy::ConstantExtend,
                    "periodic" => ExtensionPolicy::Periodic,
                    other => return Err(CliError::Config(format!("unknown policy `{other}`"))),
                })
            }
            "p" => self.p = parse_value(key, value)?,
            "grid" => self.grid = value.parse()?,
            "x_min" => self.grid.x_min = parse_value(key, value)?,
            "x_max" => self.grid.x_max = parse_value(key, value)?,
            "nx" => self.grid.nx = parse_value(key, value)?,
            "y_min" => self.grid.y_min = parse_value(key, value)?,
            "y_max" => self.grid.y_max = parse_value(key, value)?,
            "ny" => self.grid.ny = parse_value(key, value)?,
            "kernel" => {
                let (t, n) = value
                    .split_once(',')
                    .ok_or_else(|| CliError::Config(format!("kernel `{value}` needs T,nodes")))?;
                self.truncation = parse_value(key, t.trim())?;
                self.nodes_per_unit = parse_value(key, n.trim())?;
            }
            "truncation" => self.truncation = parse_value(key, value)?,
            "nodes" => self.nodes_per_unit = parse_value(key, value)?,
            "cjn" => self.c_jn = parse_value(key, value)?,
            "c0" => self.c0 = parse_value(key, value)?,
            "radius" => self.radius = if value == "auto" { None } else { Some(parse_value(key, value)?) },
            "r0" => self.r0 = parse_value(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "engine" => self.engine = value.parse().map_err(|_| CliError::Config(format!("unknown engine `{value}`")))?,
            "half_plane" => {
                self.half_plane = match value {
                    "upper" => HalfPlaneChoice::Upper,
                    "lower" => HalfPlaneChoice::Lower,
                    "both" => HalfPlaneChoice::Both,
                    other => return Err(CliError::Config(format!("unknown half-plane `{other}`"))),
                }
            }
            "normalize" => self.normalize = parse_value(key, value)?,
            "steps" => {
                self.steps = split_list(value).iter().map(|s| parse_value(key, s)).collect::<CliResult<_>>()?;
            }
            "domain" => self.domain = parse_value(key, value)?,
            "samples" => self.samples = parse_value(key, value)?,
            "circle_samples" => self.circle_samples = parse_value(key, value)?,
            other => return Err(CliError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> CliResult<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn kernel_set(&self) -> CliResult<KernelSet> {
        Ok(KernelSet::new(self.truncation, self.nodes_per_unit)?)
    }

    pub fn constants(&self) -> CliResult<NormConstants> {
        Ok(NormConstants::new(self.c_jn, self.c0, self.radius)?)
    }

    /// Checks the invariants that do not need the filesystem.
    pub fn validate(&self) -> CliResult<()> {
        let g = &self.grid;
        if g.nx < MIN_GRID_COUNT || g.ny < MIN_GRID_COUNT {
            return Err(CliError::Config(format!("nx = {} and ny = {} must be at least {MIN_GRID_COUNT}", g.nx, g.ny)));
        }
        if !(g.y_min > 0.0 && g.y_max > g.y_min && g.x_max > g.x_min) {
            return Err(CliError::Config(format!("grid {g} needs 0 < y_min < y_max and x_min < x_max")));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(CliError::Config(format!("p = {} must exceed 1", self.p)));
        }
        if self.steps.is_empty() || self.steps.iter().any(|&h| !(h > 0.0)) {
            return Err(CliError::Config("steps must be positive".into()));
        }
        if !(self.domain > 0.0) || self.samples < 2 || self.circle_samples < 3 {
            return Err(CliError::Config("builtin sampling needs domain > 0 and at least 2 samples".into()));
        }
        self.kernel_set()?;
        self.constants()?;
        heatba_core::circle::check_radius(self.r0)?;
        Ok(())
    }

    /// Canonical `key=value` lines of every setting except the output
    /// directory.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let lines = [
            format!("command={}", self.command),
            format!("input={}", self.inputs.join(",")),
            format!("direction={}", self.direction),
            format!("policy={}", self.policy.map_or("default", |p| p.name())),
            format!("p={}", self.p),
            format!("grid={}", self.grid),
            format!("kernel={},{}", self.truncation, self.nodes_per_unit),
            format!("cjn={}", self.c_jn),
            format!("c0={}", self.c0),
            format!("radius={}", self.radius.map_or("auto".into(), |r| r.to_string())),
            format!("r0={}", self.r0),
            format!("engine={}", self.engine.name()),
            format!("half_plane={}", self.half_plane.name()),
            format!("normalize={}", self.normalize),
            format!("steps={}", list(&self.steps)),
            format!("domain={}", self.domain),
            format!("samples={}", self.samples),
            format!("circle_samples={}", self.circle_samples),
        ];
        lines.join("\n") + "\n"
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn split_list(value: &str) -> Vec<String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.parse().map_err(|_| CliError::Config(format!("cannot parse `{value}` for `{key}`")))
}
