//! Batch command-line front end.
//!
//! Every mode writes into `--out`. Exit status is 0 on success, 1 on usage
//! or configuration errors and 2 when a run fails or completes with listed
//! failures (missing images, failed checks).

mod coverage;
mod denoise;
mod lemma1;
mod lifetime;
pub mod output;
mod timing;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};

use crate::config::NetworkConfig;
use crate::engine::{Protocol, DEFAULT_MAX_ROUNDS};
use crate::error::{Error, Result};
use output::Artifacts;

pub const THREADS_ENV: &str = "CORONA_SIM_THREADS";

pub const DEFAULT_IMAGES: [&str; 8] = [
    "cameraman",
    "lena",
    "barbara",
    "house",
    "peppers",
    "livingroom",
    "boat",
    "mandrill",
];
pub const DEFAULT_SIGMAS: [f64; 7] = [5.0, 10.0, 15.0, 20.0, 25.0, 50.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Lifetime,
    Denoise,
    Coverage,
    Lemma1,
    Timing,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "corona-sim", version, allow_negative_numbers = true, about = "Sensor network lifetime simulation and denoising benchmarks")]
pub struct Args {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Network configuration file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if needed.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated seeds. Defaults to the config seed.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Comma-separated protocols: proposed, leach.
    #[arg(long)]
    pub protocols: Option<String>,
    /// Comma-separated noise standard deviations.
    #[arg(long)]
    pub sigmas: Option<String>,
    /// Comma-separated image names, read as `<image-dir>/<name>.pgm`.
    #[arg(long)]
    pub images: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: u64,
    /// Coverage grid spacing in meters; 0 disables coverage tracking.
    #[arg(long, default_value_t = crate::coverage::DEFAULT_RESOLUTION)]
    pub grid_res: f64,
    /// Comma-separated node counts. Defaults to the config node count.
    #[arg(long)]
    pub nodes: Option<String>,
    /// Noisy copies per denoising cell.
    #[arg(long, default_value_t = 3)]
    pub copies: usize,
    #[arg(long, default_value = "data/images")]
    pub image_dir: PathBuf,
    /// Repetitions per timing cell; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Also dump every hop of every round in lifetime mode.
    #[arg(long)]
    pub hops: bool,
}

/// Fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub config: NetworkConfig,
    pub out: PathBuf,
    pub seeds: Vec<u64>,
    pub protocols: Vec<Protocol>,
    pub sigmas: Vec<f64>,
    pub images: Vec<String>,
    pub node_counts: Vec<usize>,
    pub max_rounds: u64,
    pub grid_res: Option<f64>,
    pub copies: usize,
    pub image_dir: PathBuf,
    pub trials: usize,
    pub hops: bool,
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Error::Usage(format!("--{what} must list at least one value")));
    }
    items
        .into_iter()
        .map(|s| s.parse::<T>().map_err(|e| Error::Usage(format!("--{what}: bad value {s:?}: {e}"))))
        .collect()
}

impl ExperimentSpec {
    pub fn from_args(args: &Args) -> Result<Self> {
        let config = match &args.config {
            Some(path) => NetworkConfig::load(path).map_err(|e| match e {
                Error::File { .. } | Error::Io(_) => Error::Usage(e.to_string()),
                other => other,
            })?,
            None => NetworkConfig::default(),
        };
        config.validate()?;
        let seeds = match &args.seeds {
            Some(s) => parse_list(s, "seeds")?,
            None => vec![config.rng_seed],
        };
        let protocols = match &args.protocols {
            Some(s) => parse_list(s, "protocols")?,
            None => Protocol::ALL.to_vec(),
        };
        let sigmas: Vec<f64> = match &args.sigmas {
            Some(s) => parse_list(s, "sigmas")?,
            None => DEFAULT_SIGMAS.to_vec(),
        };
        if let Some(bad) = sigmas.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::Usage(format!("--sigmas: {bad} is not a finite non-negative value")));
        }
        let images = match &args.images {
            Some(s) => parse_list(s, "images")?,
            None => DEFAULT_IMAGES.iter().map(|s| s.to_string()).collect(),
        };
        if let Some(bad) = images.iter().find(|n: &&String| n.contains(['/', '\\']) || n.starts_with('.')) {
            return Err(Error::Usage(format!("--images: {bad:?} is not a plain image name")));
        }
        let node_counts: Vec<usize> = match &args.nodes {
            Some(s) => parse_list(s, "nodes")?,
            None => vec![config.node_count],
        };
        if node_counts.contains(&0) {
            return Err(Error::Usage("--nodes: node counts must be positive".into()));
        }
        if args.max_rounds == 0 {
            return Err(Error::Usage("--max-rounds must be at least 1".into()));
        }
        let grid_res = if args.grid_res == 0.0 {
            None
        } else if args.grid_res.is_finite() && args.grid_res > 0.0 {
            Some(args.grid_res)
        } else {
            return Err(Error::Usage(format!("--grid-res must be positive or 0, got {}", args.grid_res)));
        };
        if args.copies == 0 {
            return Err(Error::Usage("--copies must be at least 1".into()));
        }
        if args.trials == 0 {
            return Err(Error::Usage("--trials must be at least 1".into()));
        }
        Ok(Self {
            mode: args.mode,
            config,
            out: args.out.clone(),
            seeds,
            protocols,
            sigmas,
            images,
            node_counts,
            max_rounds: args.max_rounds,
            grid_res,
            copies: args.copies,
            image_dir: args.image_dir.clone(),
            trials: args.trials,
            hops: args.hops,
        })
    }

    /// Network configuration for one `(L, seed)` cell.
    pub(crate) fn cell_config(&self, node_count: usize, seed: u64) -> NetworkConfig {
        NetworkConfig {
            node_count,
            rng_seed: seed,
            ..self.config.clone()
        }
    }
}

/// What a successful invocation produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    /// Problems that did not abort the run but make the exit status nonzero.
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            2
        }
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let meta = std::fs::metadata(dir).map_err(|e| Error::Usage(format!("{}: {e}", dir.display())))?;
    if meta.permissions().readonly() {
        return Err(Error::Usage(format!("{} is not writable", dir.display())));
    }
    Ok(())
}

/// Runs one invocation. On error everything written so far is removed.
pub fn run(spec: &ExperimentSpec) -> Result<Outcome> {
    prepare_out(&spec.out)?;
    let artifacts = Artifacts::new();
    let result = match spec.mode {
        Mode::Lifetime => lifetime::run_lifetime(spec, &artifacts),
        Mode::Denoise => denoise::run_denoise(spec, &artifacts),
        Mode::Coverage => coverage::run_coverage(spec, &artifacts),
        Mode::Lemma1 => lemma1::run_lemma1(spec, &artifacts),
        Mode::Timing => timing::run_timing(spec, &artifacts),
    };
    match result {
        Ok(failures) => Ok(Outcome {
            artifacts: artifacts.paths(),
            failures,
        }),
        Err(e) => {
            artifacts.remove_all();
            Err(e)
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

/// Parses `argv`, runs, reports to stderr and returns the exit status.
pub fn main_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).try_init();
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = ExperimentSpec::from_args(&args).and_then(|spec| thread_pool()?.install(|| run(&spec)));
    match outcome {
        Ok(o) => {
            for f in &o.failures {
                eprintln!("failed: {f}");
            }
            log::info!("{} artifact(s) written to {}", o.artifacts.len(), args.out.display());
            o.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
