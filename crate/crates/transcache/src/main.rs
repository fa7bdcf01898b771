//! Thin command-line front end; all behavior lives in the library.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use transcache::engine::write_decision_log;
use transcache::experiment::{
    run_single, run_sweep, ExperimentConfig, Overrides, OUTPUT_DIR_ENV,
};
use transcache::policy::PolicyKind;
use transcache::validate;

#[derive(Parser)]
#[command(
    name = "transcache",
    about = "Collaborative multi-bitrate video caching and transcoding simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// TOML configuration file; omitted keys use the default experiment.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Policies to run (repeatable): jccp, cachepro, cocache, offline.
    #[arg(short, long = "policy")]
    policies: Vec<String>,
    /// Number of edge servers.
    #[arg(long)]
    servers: Option<u32>,
    /// Number of videos in the library.
    #[arg(long)]
    videos: Option<u32>,
    /// Cache size as a fraction of the total library size.
    #[arg(long)]
    cache_fraction: Option<f64>,
    /// Processing capacity in Mb/s-equivalent units.
    #[arg(long)]
    processing_mbps: Option<f64>,
    /// Arrival rate in requests/minute (applied to every server).
    #[arg(long)]
    lambda: Option<f64>,
    /// Requests generated per server.
    #[arg(long)]
    requests: Option<u32>,
    /// Zipf skew of the popularity distribution.
    #[arg(long)]
    alpha: Option<f64>,
    /// Seeds (repeatable).
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    /// Sweep axis: cache_fraction, processing_capacity_mbps,
    /// arrival_rate_per_min, or zipf_alpha.
    #[arg(long)]
    sweep_axis: Option<String>,
    /// Sweep values (repeatable), one run set per value.
    #[arg(long = "sweep-value")]
    sweep_values: Vec<f64>,
    /// Exclude this many initial requests from the metrics.
    #[arg(long)]
    warmup: Option<usize>,
    /// Disable the transcode-at-home placement in the jccp policy.
    #[arg(long)]
    no_home_transcode: bool,
    /// Output directory (default: $TRANSCACHE_OUT_DIR or the working dir).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, String> {
        let overrides = Overrides {
            policies: (!self.policies.is_empty()).then(|| self.policies.clone()),
            servers: self.servers,
            videos: self.videos,
            cache_fraction: self.cache_fraction,
            processing_capacity_mbps: self.processing_mbps,
            arrival_rate_per_min: self.lambda,
            requests_per_server: self.requests,
            zipf_alpha: self.alpha,
            seeds: (!self.seeds.is_empty()).then(|| self.seeds.clone()),
            sweep_axis: self.sweep_axis.clone(),
            sweep_values: (!self.sweep_values.is_empty()).then(|| self.sweep_values.clone()),
            warmup_requests: self.warmup,
            jccp_home_transcode: self.no_home_transcode.then_some(false),
            output_dir: self.output.clone(),
        };
        match &self.config {
            Some(path) => ExperimentConfig::from_file(path, &overrides),
            None => ExperimentConfig::from_str("", &overrides),
        }
        .map_err(|e| e.to_string())
    }

    fn output_dir(&self, config: &ExperimentConfig) -> PathBuf {
        config
            .output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a single (policy, seed) simulation and print its metrics.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the full (policies x seeds x sweep values) grid and write
    /// results.csv and summary.csv.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Worker threads (0 = machine parallelism).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Run the built-in oracle and invariant suites.
    Validate {
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a single simulation and dump its per-request decision log.
    Trace {
        #[command(flatten)]
        config: ConfigArgs,
        /// Write the log here instead of stdout.
        #[arg(long)]
        log_file: Option<PathBuf>,
    },
}

fn first_policy_and_seed(config: &ExperimentConfig) -> (PolicyKind, u64) {
    (config.policies[0], config.seeds[0])
}

fn cmd_run(args: &ConfigArgs) -> Result<ExitCode, String> {
    let config = args.load()?;
    for &policy in &config.policies {
        for &seed in &config.seeds {
            let started = std::time::Instant::now();
            let out = run_single(&config, policy, seed).map_err(|e| e.to_string())?;
            let r = &out.report;
            println!(
                "policy={} seed={} requests={} hit_ratio={:.4} avg_delay_ms={:.2} \
                 external_TB={:.4} backhaul_cost={:.4e} proc_util={:.4} horizon_s={:.1}",
                policy.name(),
                seed,
                r.total_requests,
                r.hit_ratio,
                r.avg_access_delay_ms,
                r.external_traffic_tb(),
                r.total_backhaul_cost,
                r.utilization_mean,
                r.horizon_s
            );
            println!(
                "  local_hit={} local_transcode={} neighbor_fetch={} \
                 neighbor_transcode_at_source={} neighbor_transcode_at_home={} origin_fetch={}",
                r.counts.local_hit,
                r.counts.local_transcode,
                r.counts.neighbor_fetch,
                r.counts.neighbor_transcode_at_source,
                r.counts.neighbor_transcode_at_home,
                r.counts.origin_fetch
            );
            eprintln!(
                "[{} seed {}] wall time {} ms",
                policy.name(),
                seed,
                started.elapsed().as_millis()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: &ConfigArgs, threads: usize) -> Result<ExitCode, String> {
    let config = args.load()?;
    let results = run_sweep(&config, threads).map_err(|e| e.to_string())?;
    let dir = args.output_dir(&config);
    let (data_path, summary_path) = results
        .write_files(&dir)
        .map_err(|e| format!("writing CSV: {e}"))?;
    let total_wall: u128 = results.data.iter().map(|r| r.wall_ms).sum();
    eprintln!(
        "{} data rows, {} summary rows, {} ms total run time",
        results.data.len(),
        results.summary.len(),
        total_wall
    );
    println!("{}", data_path.display());
    println!("{}", summary_path.display());
    if results.any_errors() {
        for row in results.data.iter().filter(|r| r.status != "ok") {
            eprintln!("row policy={} seed={}: {}", row.policy, row.seed, row.status);
        }
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(seed: u64) -> ExitCode {
    let mut all_passed = true;
    for check in validate::run_all(seed) {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_trace(args: &ConfigArgs, log_file: &Option<PathBuf>) -> Result<ExitCode, String> {
    let config = args.load()?;
    let (policy, seed) = first_policy_and_seed(&config);
    let out = run_single(&config, policy, seed).map_err(|e| e.to_string())?;
    let text = write_decision_log(&out.log);
    match log_file {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("writing log: {e}"))?,
        None => print!("{text}"),
    }
    eprintln!(
        "{} decisions logged for policy={} seed={}",
        out.log.len(),
        policy.name(),
        seed
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config),
        Command::Sweep { config, threads } => cmd_sweep(config, *threads),
        Command::Validate { seed } => Ok(cmd_validate(*seed)),
        Command::Trace { config, log_file } => cmd_trace(config, log_file),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
