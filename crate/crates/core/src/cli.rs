//! Command-line driver: load a [`RunConfig`], run the selected mode inside a
//! sized thread pool, and write results plus `manifest.json` atomically into
//! the output directory.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::circuit::build_period;
use crate::config::{ManifestInfo, Mode, RunConfig};
use crate::dynamics::{evolve_heisenberg, standard_schedule};
use crate::error::{Error, Result};
use crate::qasm::export_qasm;
use crate::randmeas::{estimate_time_averaged_size, validate_estimators, EstimatorRecord};
use crate::scan::{realizations_csv, run_scan, scan_csv};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Clone, Debug, Parser)]
#[command(
    name = "floqmbl",
    version,
    about = "Floquet MBL order-parameter dynamics"
)]
pub struct Args {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output_dir`.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 1 runs serially.
    #[arg(long, env = "FLOQMBL_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub enum Failure {
    Config(Error),
    Runtime(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Runtime(e) => write!(f, "runtime error: {e}"),
        }
    }
}

/// Reads, overrides and resolves a configuration.
pub fn load_config(args: &Args) -> std::result::Result<RunConfig, Failure> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        Failure::Config(Error::InvalidConfig(format!(
            "{}: {e}",
            args.config.display()
        )))
    })?;
    let mut cfg = RunConfig::from_json(&text).map_err(Failure::Config)?;
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = Some(dir.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if cfg.output_dir.is_none() {
        return Err(Failure::Config(Error::InvalidConfig(
            "no output directory: set `output_dir` or pass --output-dir".into(),
        )));
    }
    cfg.resolve().map_err(Failure::Config)?;
    Ok(cfg)
}

/// Writes `contents` to `dir/name` through a temporary file and rename.
fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name))
        .map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Result files of one run, by file name.
pub type Outputs = Vec<(&'static str, Vec<u8>)>;

fn to_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Computes the result files of a resolved configuration without touching
/// the filesystem.
pub fn execute(cfg: &RunConfig) -> Result<Outputs> {
    let circuit = cfg.circuit.circuit();
    match cfg.mode {
        Mode::Dynamics => {
            let (op, n, extra) = cfg.dynamics()?;
            let period = build_period(&circuit)?;
            let dense = op.to_dense(circuit.num_qubits)?;
            let series = evolve_heisenberg(
                &dense,
                &period,
                n,
                &standard_schedule(n, &extra),
                &op.to_string(),
            )?;
            Ok(vec![("norm_series.csv", series.to_csv().into_bytes())])
        }
        Mode::Scan => {
            let (traj, settings) = cfg.scan_inputs()?;
            let records = run_scan(&traj, &settings)?;
            Ok(vec![
                ("scan.csv", scan_csv(&records, &settings).into_bytes()),
                (
                    "scan_realizations.csv",
                    realizations_csv(&records).into_bytes(),
                ),
            ])
        }
        Mode::Randmeas => {
            let (op, rm) = cfg.estimator_inputs()?;
            let period = build_period(&circuit)?;
            let result = estimate_time_averaged_size(&op, &period, &rm)?;
            Ok(vec![(
                "estimator.json",
                to_json(&EstimatorRecord::new(&rm, &result))?,
            )])
        }
        Mode::Validate => {
            let (op, rm) = cfg.estimator_inputs()?;
            let period = build_period(&circuit)?;
            let report = validate_estimators(&op, &period, &rm)?;
            Ok(vec![("validation_report.json", to_json(&report)?)])
        }
        Mode::ExportQasm => {
            let period = build_period(&circuit)?;
            Ok(vec![(
                "circuit.qasm",
                export_qasm(&period, cfg.qasm_repetitions()?)?.into_bytes(),
            )])
        }
    }
}

/// Runs a resolved configuration on `threads` workers (0: rayon default)
/// and writes every output plus the manifest.
pub fn run_config(cfg: &RunConfig, threads: usize) -> std::result::Result<(), Failure> {
    let dir = cfg
        .output_dir
        .clone()
        .ok_or_else(|| Failure::Config(Error::InvalidConfig("missing output_dir".into())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Runtime(Error::InvalidArgument(e.to_string())))?;
    let started = Instant::now();
    let outputs = pool.install(|| execute(cfg)).map_err(Failure::Runtime)?;
    let elapsed = started.elapsed().as_secs_f64();

    let write = || -> Result<()> {
        fs::create_dir_all(&dir)?;
        for (name, bytes) in &outputs {
            write_atomic(&dir, name, bytes)?;
        }
        let mut manifest = cfg.clone();
        manifest.manifest = Some(ManifestInfo {
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: elapsed,
            threads: pool.current_num_threads(),
            outputs: outputs.iter().map(|(name, _)| name.to_string()).collect(),
        });
        write_atomic(&dir, "manifest.json", &to_json(&manifest)?)
    };
    write().map_err(Failure::Runtime)
}

/// Full entry point; returns the process exit code.
pub fn main_with_args(args: Args) -> ExitCode {
    let result = load_config(&args).and_then(|cfg| run_config(&cfg, args.threads.unwrap_or(0)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("floqmbl: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
