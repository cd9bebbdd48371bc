mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bergman_lab::LabError;
use config::{cache_dir, ExperimentConfig, Params};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Lab(#[from] LabError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Lab(e) => match e {
                LabError::Domain(_) => "domain",
                LabError::Parameter(_) => "parameter",
                LabError::Empty(_) => "empty",
                LabError::Numerical(_) => "numerical",
                LabError::Unsupported(_) => "unsupported",
                LabError::Parse(_) => "parse",
                LabError::Construction(_) => "construction",
                LabError::Io(_) => "io",
            },
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "bergman-lab", version, about = "Weighted Bergman and Hardy space operator laboratory")]
struct Cli {
    /// Worker threads for grid, lattice and truncation sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory for reports, profiles, spectra and matrices
    #[arg(long, global = true, default_value = "lab-out")]
    out: PathBuf,
    /// TOML file with parameter defaults; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache directory (overrides BERGMAN_LAB_CACHE)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Recompute even when a cached result exists
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weight diagnostics
    Weights {
        action: WeightsAction,
        #[command(flatten)]
        params: Params,
    },
    /// Disk geometry: lattices, distances, Carleson squares
    Geometry {
        action: GeometryAction,
        #[command(flatten)]
        params: Params,
    },
    /// Bergman-space norms and seminorms
    Norms {
        action: NormsAction,
        #[command(flatten)]
        params: Params,
    },
    /// Operator matrices, spectra and truncation scans
    Operator {
        action: OperatorAction,
        #[command(flatten)]
        params: Params,
    },
    /// Characterization criteria with optional spectral cross-check
    Criteria {
        id: CriterionId,
        #[command(flatten)]
        params: Params,
    },
    /// Hardy-space norms, operators and criteria
    Hardy {
        action: HardyAction,
        #[command(flatten)]
        params: Params,
    },
    /// Run a battery of checks
    Suite { battery: BatteryName },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum WeightsAction {
    Doubling,
    Profile,
    Regular,
    Upsilon,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum GeometryAction {
    Lattice,
    Distance,
    Square,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum NormsAction {
    Bergman,
    LittlewoodPaley,
    Nontangential,
    Bloch,
    Besov,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum OperatorAction {
    Volterra,
    Toeplitz,
    ScanVolterra,
    ScanToeplitz,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CriterionId {
    Thm31,
    Thm32,
    Thm33,
    Thm42,
    Cor43,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum HardyAction {
    Norm,
    Gk,
    LittlewoodPaley,
    Volterra,
    Toeplitz,
    Thm54,
    Cor52,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BatteryName {
    Acceptance,
    Agreement,
    Regression,
}

/// Files and a JSON summary produced by one command.
#[derive(Default)]
pub struct Output {
    pub result: Value,
    pub files: Vec<(String, Vec<u8>)>,
    /// Nonzero exit without an error, e.g. a failing battery.
    pub failed: bool,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

fn load_cached(dir: &Path) -> Option<Output> {
    let result: Value = serde_json::from_slice(&std::fs::read(dir.join("result.json")).ok()?).ok()?;
    let names: Vec<String> = serde_json::from_slice(&std::fs::read(dir.join("files.json")).ok()?).ok()?;
    let mut files = Vec::new();
    for n in names {
        files.push((n.clone(), std::fs::read(dir.join(&n)).ok()?));
    }
    Some(Output {
        result,
        files,
        failed: false,
    })
}

fn store_cached(dir: &Path, out: &Output) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (n, b) in &out.files {
        write_atomic(&dir.join(n), b)?;
    }
    let names: Vec<&String> = out.files.iter().map(|f| &f.0).collect();
    write_atomic(&dir.join("files.json"), &serde_json::to_vec(&names).expect("names serialize"))?;
    // written last: its presence marks a complete entry
    write_atomic(&dir.join("result.json"), &serde_json::to_vec_pretty(&out.result).expect("json"))
}

fn execute(cli: Cli) -> Result<(Value, bool), CliError> {
    let file_params = match &cli.config {
        Some(p) => Params::from_file(p)?,
        None => Params::default(),
    };
    let (command, params, battery) = match &cli.command {
        Command::Weights { action, params } => (vec!["weights".into(), value_name(action)], params, None),
        Command::Geometry { action, params } => (vec!["geometry".into(), value_name(action)], params, None),
        Command::Norms { action, params } => (vec!["norms".into(), value_name(action)], params, None),
        Command::Operator { action, params } => (vec!["operator".into(), value_name(action)], params, None),
        Command::Criteria { id, params } => (vec!["criteria".into(), value_name(id)], params, None),
        Command::Hardy { action, params } => (vec!["hardy".into(), value_name(action)], params, None),
        Command::Suite { battery } => (vec!["suite".into(), value_name(battery)], &Params::default(), Some(*battery)),
    };
    let params = commands::with_defaults(params.clone().merge(&file_params));
    let cfg = ExperimentConfig {
        command,
        params,
        version: env!("CARGO_PKG_VERSION"),
    };
    let key = cfg.cache_key();
    let cache_root = cache_dir(cli.cache_dir.as_ref());
    let use_cache = !cli.no_cache && battery.is_none();
    let entry = cache_root.join(&key);

    let mut cached = false;
    let out = match (use_cache, use_cache.then(|| load_cached(&entry)).flatten()) {
        (_, Some(o)) => {
            cached = true;
            o
        }
        _ => {
            let p = &cfg.params;
            let out = match &cli.command {
                Command::Weights { action, .. } => commands::weights(*action, p)?,
                Command::Geometry { action, .. } => commands::geometry(*action, p)?,
                Command::Norms { action, .. } => commands::norms(*action, p)?,
                Command::Operator { action, .. } => commands::operator(*action, p)?,
                Command::Criteria { id, .. } => commands::criteria(*id, p)?,
                Command::Hardy { action, .. } => commands::hardy(*action, p)?,
                Command::Suite { .. } => {
                    std::fs::create_dir_all(&cache_root)?;
                    commands::suite(match battery.expect("suite battery") {
                        BatteryName::Acceptance => bergman_lab::suite::Battery::Acceptance,
                        BatteryName::Agreement => bergman_lab::suite::Battery::Agreement,
                        BatteryName::Regression => bergman_lab::suite::Battery::Regression,
                    })?
                }
            };
            if use_cache {
                store_cached(&entry, &out)?;
            }
            out
        }
    };

    std::fs::create_dir_all(&cli.out)?;
    let stem = format!("{}-{}", cfg.command.join("-"), &key[..12]);
    let mut written = Vec::new();
    for (name, bytes) in &out.files {
        let path = cli.out.join(format!("{stem}-{name}"));
        write_atomic(&path, bytes)?;
        written.push(path.display().to_string());
    }
    let envelope = json!({
        "config": cfg,
        "cache_key": key,
        "cached": cached,
        "result": out.result,
        "outputs": written,
    });
    Ok((envelope, out.failed))
}

fn emit_error(kind: &str, message: &str) {
    let v = json!({ "error": { "kind": kind, "message": message } });
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error("usage", e.render().to_string().trim());
            return ExitCode::from(2);
        }
    };
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            emit_error("config", &e.to_string());
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok((v, failed)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("json"));
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            emit_error(e.kind(), &e.to_string());
            ExitCode::from(2)
        }
    }
}
