//! `heatba`: extensions, dilatation diagnostics and norms from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use heatba_cli::{run, CliError, CliResult, Command, RunConfig};

/// Settings are read from `--config` first; flags and `--set` override them.
#[derive(Debug, Parser)]
#[command(name = "heatba", version, about)]
struct Args {
    /// extend | dilatation | norms | carleson | circle | gateaux | verify
    command: String,
    /// `key=value` settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input CSV, directory (verify) or `builtin:NAME`; repeatable.
    #[arg(long)]
    input: Vec<String>,
    #[arg(long)]
    p: Option<String>,
    /// `x_min,x_max,nx,y_min,y_max,ny`.
    #[arg(long)]
    grid: Option<String>,
    /// `T,nodes_per_unit`.
    #[arg(long)]
    kernel: Option<String>,
    /// fft | direct
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    r0: Option<String>,
    #[arg(long)]
    cjn: Option<String>,
    #[arg(long)]
    c0: Option<String>,
    /// Neighbourhood radius, or `auto`.
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Direction for `gateaux`.
    #[arg(long)]
    direction: Option<String>,
    /// Comma-separated step sizes for `gateaux`.
    #[arg(long)]
    steps: Option<String>,
    /// Extension policy for CSV inputs.
    #[arg(long)]
    policy: Option<String>,
    /// upper | lower | both
    #[arg(long = "half-plane")]
    half_plane: Option<String>,
    #[arg(long)]
    normalize: Option<String>,
    /// Half-width of builtin line domains.
    #[arg(long)]
    domain: Option<String>,
    /// Sample count of builtin line inputs.
    #[arg(long)]
    samples: Option<String>,
    /// Any setting as `key=value`; repeatable.
    #[arg(long = "set")]
    set: Vec<String>,
}

fn configure(args: &Args) -> CliResult<RunConfig> {
    let command: Command = args.command.parse()?;
    let mut config = RunConfig::new(command);
    if let Some(path) = &args.config {
        config.apply_file(path)?;
        config.command = command;
    }
    if !args.input.is_empty() {
        config.set("input", &args.input.join(","))?;
    }
    let flags = [
        ("p", &args.p),
        ("grid", &args.grid),
        ("kernel", &args.kernel),
        ("engine", &args.engine),
        ("r0", &args.r0),
        ("cjn", &args.cjn),
        ("c0", &args.c0),
        ("radius", &args.radius),
        ("out", &args.out),
        ("direction", &args.direction),
        ("steps", &args.steps),
        ("policy", &args.policy),
        ("half_plane", &args.half_plane),
        ("normalize", &args.normalize),
        ("domain", &args.domain),
        ("samples", &args.samples),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    for pair in &args.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{pair}`")))?;
        config.set(k.trim(), v.trim())?;
    }
    Ok(config)
}

fn execute(args: &Args) -> CliResult<()> {
    if let Ok(n) = std::env::var("HEATBA_THREADS") {
        let n: usize = n.parse().map_err(|_| CliError::Config(format!("HEATBA_THREADS: cannot parse `{n}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let config = configure(args)?;
    let summary = run(&config)?;
    for line in &summary.lines {
        println!("{line}");
    }
    if summary.failures > 0 {
        return Err(CliError::VerifyFailed(summary.failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
