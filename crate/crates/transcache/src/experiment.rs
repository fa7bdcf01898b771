//! Experiment runner: configuration parsing, single runs, parameter sweeps
//! across policies and seeds, and CSV output with per-point aggregates.
//!
//! Configuration is a flat key/value TOML file; command-line flags override
//! file values. Omitted keys fall back to the default experiment: 3 servers,
//! 1000 videos at 4 bitrate levels (0.45/0.55/0.67/0.82 of a 2 Mb/s base,
//! 600 s long), Zipf skew 0.8, 8 requests/minute and 10,000 requests per
//! server, caches sized to 20% of the library, 10 Mb/s-equivalent processing,
//! and seeds 1..=10.
//!
//! All emitted CSV is byte-deterministic for identical inputs; the
//! `runtime_ms` column reports the simulated horizon (wall-clock time is
//! returned in-memory only, so repeated invocations stay identical).

use crate::engine::{run, MetricsReport, RunOutput, RunSpec};
use crate::model::{Catalog, CostParams, ModelError};
use crate::policy::PolicyKind;
use crate::workload::WorkloadParams;
use rayon::prelude::*;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TRANSCACHE_OUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<ModelError> for ConfigError {
    fn from(e: ModelError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

/// Scalar-or-list field: a single rate applies to every server.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

/// Raw file schema. Every key optional; unknown keys rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    policy: Option<String>,
    policies: Option<Vec<String>>,
    servers: Option<u32>,
    videos: Option<u32>,
    base_bitrate_mbps: Option<f64>,
    relative_bitrates: Option<Vec<f64>>,
    video_length_s: Option<f64>,
    cache_fraction: Option<f64>,
    cache_bytes: Option<u64>,
    processing_capacity_mbps: Option<f64>,
    tau_per_byte: Option<f64>,
    zipf_alpha: Option<f64>,
    arrival_rate_per_min: Option<OneOrMany>,
    requests_per_server: Option<u32>,
    seeds: Option<Vec<u64>>,
    sweep_axis: Option<String>,
    sweep_values: Option<Vec<f64>>,
    warmup_requests: Option<usize>,
    jccp_home_transcode: Option<bool>,
    output_dir: Option<PathBuf>,
    local_delay_range_ms: Option<[f64; 2]>,
    neighbor_delay_range_ms: Option<[f64; 2]>,
    origin_delay_range_ms: Option<[f64; 2]>,
}

/// Command-line overrides; any set field wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub policies: Option<Vec<String>>,
    pub servers: Option<u32>,
    pub videos: Option<u32>,
    pub cache_fraction: Option<f64>,
    pub processing_capacity_mbps: Option<f64>,
    pub arrival_rate_per_min: Option<f64>,
    pub requests_per_server: Option<u32>,
    pub zipf_alpha: Option<f64>,
    pub seeds: Option<Vec<u64>>,
    pub sweep_axis: Option<String>,
    pub sweep_values: Option<Vec<f64>>,
    pub warmup_requests: Option<usize>,
    pub jccp_home_transcode: Option<bool>,
    pub output_dir: Option<PathBuf>,
}

/// Parameter a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    CacheFraction,
    ProcessingCapacityMbps,
    ArrivalRatePerMin,
    ZipfAlpha,
}

impl SweepParam {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "cache_fraction" => Some(Self::CacheFraction),
            "processing_capacity_mbps" => Some(Self::ProcessingCapacityMbps),
            "arrival_rate_per_min" => Some(Self::ArrivalRatePerMin),
            "zipf_alpha" => Some(Self::ZipfAlpha),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CacheFraction => "cache_fraction",
            Self::ProcessingCapacityMbps => "processing_capacity_mbps",
            Self::ArrivalRatePerMin => "arrival_rate_per_min",
            Self::ZipfAlpha => "zipf_alpha",
        }
    }

    pub const NAMES: [&'static str; 4] = [
        "cache_fraction",
        "processing_capacity_mbps",
        "arrival_rate_per_min",
        "zipf_alpha",
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CacheSize {
    /// Fraction of the total library size.
    Fraction(f64),
    Bytes(u64),
}

/// Fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub policies: Vec<PolicyKind>,
    pub servers: u32,
    pub videos: u32,
    pub base_bitrate_mbps: f64,
    pub relative_bitrates: Vec<f64>,
    pub video_length_s: f64,
    pub cache_size: CacheSize,
    pub processing_capacity_mbps: f64,
    pub tau_per_byte: Option<f64>,
    pub zipf_alpha: f64,
    pub arrival_rates_per_min: Vec<f64>,
    pub requests_per_server: u32,
    pub seeds: Vec<u64>,
    pub sweep: Option<SweepAxis>,
    pub warmup_requests: usize,
    pub jccp_home_transcode: bool,
    pub output_dir: Option<PathBuf>,
    pub local_delay_range_ms: (f64, f64),
    pub neighbor_delay_range_ms: (f64, f64),
    pub origin_delay_range_ms: (f64, f64),
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_str("", &Overrides::default()).expect("empty config is the default experiment")
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text, overrides)
    }

    pub fn from_str(text: &str, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            ConfigError::Parse {
                line,
                message: e.message().to_string(),
            }
        })?;
        apply_overrides(&mut raw, overrides);
        resolve(raw)
    }

    pub fn catalog(&self) -> Result<Catalog, ConfigError> {
        let bitrates: Vec<f64> = self
            .relative_bitrates
            .iter()
            .map(|r| r * self.base_bitrate_mbps * 1e6)
            .collect();
        Ok(Catalog::new(self.videos, bitrates, self.video_length_s)?)
    }

    pub fn cost_params(&self, catalog: &Catalog) -> Result<CostParams, ConfigError> {
        match self.tau_per_byte {
            Some(tau) => Ok(CostParams::new(tau)?),
            None => Ok(CostParams::bitrate_equivalent(catalog)),
        }
    }

    /// Resolve one run, with the sweep parameter (if any) set to `value`.
    pub fn run_spec(
        &self,
        policy: PolicyKind,
        seed: u64,
        sweep_value: Option<f64>,
    ) -> Result<RunSpec, ConfigError> {
        let mut cache_size = self.cache_size;
        let mut capacity_mbps = self.processing_capacity_mbps;
        let mut rates = self.arrival_rates_per_min.clone();
        let mut alpha = self.zipf_alpha;
        if let (Some(axis), Some(v)) = (&self.sweep, sweep_value) {
            match axis.param {
                SweepParam::CacheFraction => cache_size = CacheSize::Fraction(v),
                SweepParam::ProcessingCapacityMbps => capacity_mbps = v,
                SweepParam::ArrivalRatePerMin => rates = vec![v; self.servers as usize],
                SweepParam::ZipfAlpha => alpha = v,
            }
        }
        let catalog = self.catalog()?;
        let params = self.cost_params(&catalog)?;
        let cache_capacity_bytes = match cache_size {
            CacheSize::Bytes(b) => b,
            CacheSize::Fraction(f) => (catalog.library_size_bytes() as f64 * f).round() as u64,
        };
        let workload = WorkloadParams {
            num_videos: self.videos,
            num_levels: catalog.num_levels(),
            zipf_alpha: alpha,
            arrival_rates_per_min: rates,
            requests_per_server: self.requests_per_server,
            video_length_s: self.video_length_s,
            local_delay_range_ms: self.local_delay_range_ms,
            neighbor_delay_range_ms: self.neighbor_delay_range_ms,
            origin_delay_range_ms: self.origin_delay_range_ms,
        };
        Ok(RunSpec {
            catalog,
            params,
            workload,
            cache_capacity_bytes,
            processing_capacity: capacity_mbps * 1e6,
            policy,
            seed,
            warmup_requests: self.warmup_requests,
        })
    }

    /// Effective cache fraction of a run spec (for reporting).
    fn effective_cache_fraction(&self, sweep_value: Option<f64>) -> f64 {
        if let (Some(axis), Some(v)) = (&self.sweep, sweep_value) {
            if axis.param == SweepParam::CacheFraction {
                return v;
            }
        }
        match self.cache_size {
            CacheSize::Fraction(f) => f,
            CacheSize::Bytes(b) => {
                let lib = self
                    .catalog()
                    .map(|c| c.library_size_bytes())
                    .unwrap_or(0);
                if lib == 0 {
                    0.0
                } else {
                    b as f64 / lib as f64
                }
            }
        }
    }
}

fn apply_overrides(raw: &mut RawConfig, ov: &Overrides) {
    if let Some(p) = &ov.policies {
        raw.policies = Some(p.clone());
        raw.policy = None;
    }
    if let Some(v) = ov.servers {
        raw.servers = Some(v);
    }
    if let Some(v) = ov.videos {
        raw.videos = Some(v);
    }
    if let Some(v) = ov.cache_fraction {
        raw.cache_fraction = Some(v);
        raw.cache_bytes = None;
    }
    if let Some(v) = ov.processing_capacity_mbps {
        raw.processing_capacity_mbps = Some(v);
    }
    if let Some(v) = ov.arrival_rate_per_min {
        raw.arrival_rate_per_min = Some(OneOrMany::One(v));
    }
    if let Some(v) = ov.requests_per_server {
        raw.requests_per_server = Some(v);
    }
    if let Some(v) = ov.zipf_alpha {
        raw.zipf_alpha = Some(v);
    }
    if let Some(v) = &ov.seeds {
        raw.seeds = Some(v.clone());
    }
    if let Some(v) = &ov.sweep_axis {
        raw.sweep_axis = Some(v.clone());
    }
    if let Some(v) = &ov.sweep_values {
        raw.sweep_values = Some(v.clone());
    }
    if let Some(v) = ov.warmup_requests {
        raw.warmup_requests = Some(v);
    }
    if let Some(v) = ov.jccp_home_transcode {
        raw.jccp_home_transcode = Some(v);
    }
    if let Some(v) = &ov.output_dir {
        raw.output_dir = Some(v.clone());
    }
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig, ConfigError> {
    let invalid = |m: String| Err(ConfigError::Invalid(m));

    let jccp_home_transcode = raw.jccp_home_transcode.unwrap_or(true);
    let policy_names: Vec<String> = match (raw.policy, raw.policies) {
        (Some(_), Some(_)) => {
            return invalid("set either `policy` or `policies`, not both".into())
        }
        (Some(one), None) => vec![one],
        (None, Some(many)) => many,
        (None, None) => PolicyKind::NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let mut policies = Vec::new();
    for name in &policy_names {
        match PolicyKind::parse(name, jccp_home_transcode) {
            Some(p) => policies.push(p),
            None => {
                return invalid(format!(
                    "unknown policy `{name}`; valid policies are {}",
                    PolicyKind::NAMES.join(", ")
                ))
            }
        }
    }
    if policies.is_empty() {
        return invalid("need at least one policy".into());
    }

    let servers = raw.servers.unwrap_or(3);
    if servers == 0 {
        return invalid("servers must be >= 1".into());
    }
    let videos = raw.videos.unwrap_or(1000);
    if videos == 0 {
        return invalid("videos must be >= 1".into());
    }
    let base_bitrate_mbps = raw.base_bitrate_mbps.unwrap_or(2.0);
    if !base_bitrate_mbps.is_finite() || base_bitrate_mbps <= 0.0 {
        return invalid("base_bitrate_mbps must be > 0".into());
    }
    let relative_bitrates = raw
        .relative_bitrates
        .unwrap_or_else(|| vec![0.45, 0.55, 0.67, 0.82]);
    let video_length_s = raw.video_length_s.unwrap_or(600.0);

    let cache_size = match (raw.cache_fraction, raw.cache_bytes) {
        (Some(_), Some(_)) => {
            return invalid("set either `cache_fraction` or `cache_bytes`, not both".into())
        }
        (Some(f), None) => {
            if f < 0.0 {
                return invalid("cache_fraction must be >= 0".into());
            }
            CacheSize::Fraction(f)
        }
        (None, Some(b)) => CacheSize::Bytes(b),
        (None, None) => CacheSize::Fraction(0.2),
    };

    let processing_capacity_mbps = raw.processing_capacity_mbps.unwrap_or(10.0);
    if !processing_capacity_mbps.is_finite() || processing_capacity_mbps <= 0.0 {
        return invalid("processing_capacity_mbps must be > 0".into());
    }
    if let Some(tau) = raw.tau_per_byte {
        if !tau.is_finite() || tau <= 0.0 {
            return invalid("tau_per_byte must be > 0".into());
        }
    }
    let zipf_alpha = raw.zipf_alpha.unwrap_or(0.8);
    if zipf_alpha < 0.0 {
        return invalid("zipf_alpha must be >= 0".into());
    }

    let arrival_rates_per_min = match raw.arrival_rate_per_min {
        None => vec![8.0; servers as usize],
        Some(OneOrMany::One(v)) => vec![v; servers as usize],
        Some(OneOrMany::Many(v)) => {
            if v.len() != servers as usize {
                return invalid(format!(
                    "arrival_rate_per_min list has {} entries for {} servers",
                    v.len(),
                    servers
                ));
            }
            v
        }
    };
    if arrival_rates_per_min.iter().any(|&l| !l.is_finite() || l <= 0.0) {
        return invalid("arrival rates must be positive".into());
    }

    let requests_per_server = raw.requests_per_server.unwrap_or(10_000);
    if requests_per_server == 0 {
        return invalid("requests_per_server must be >= 1".into());
    }

    let seeds = raw.seeds.unwrap_or_else(|| (1..=10).collect());
    if seeds.is_empty() {
        return invalid("need at least one seed".into());
    }

    let sweep = match (raw.sweep_axis, raw.sweep_values) {
        (None, None) => None,
        (Some(axis), Some(values)) => {
            let param = SweepParam::parse(&axis).ok_or_else(|| {
                ConfigError::Invalid(format!(
                    "unknown sweep axis `{axis}`; valid axes are {}",
                    SweepParam::NAMES.join(", ")
                ))
            })?;
            if values.is_empty() {
                return invalid("sweep_values must be non-empty".into());
            }
            Some(SweepAxis { param, values })
        }
        _ => return invalid("sweep_axis and sweep_values must be set together".into()),
    };

    let to_pair = |r: [f64; 2]| (r[0], r[1]);
    Ok(ExperimentConfig {
        policies,
        servers,
        videos,
        base_bitrate_mbps,
        relative_bitrates,
        video_length_s,
        cache_size,
        processing_capacity_mbps,
        tau_per_byte: raw.tau_per_byte,
        zipf_alpha,
        arrival_rates_per_min,
        requests_per_server,
        seeds,
        sweep,
        warmup_requests: raw.warmup_requests.unwrap_or(0),
        jccp_home_transcode,
        output_dir: raw.output_dir,
        local_delay_range_ms: raw.local_delay_range_ms.map(to_pair).unwrap_or((5.0, 10.0)),
        neighbor_delay_range_ms: raw
            .neighbor_delay_range_ms
            .map(to_pair)
            .unwrap_or((20.0, 50.0)),
        origin_delay_range_ms: raw
            .origin_delay_range_ms
            .map(to_pair)
            .unwrap_or((100.0, 200.0)),
    })
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

/// One executed (policy, seed, sweep point) row.
#[derive(Debug, Clone)]
pub struct DataRow {
    pub policy: &'static str,
    pub seed: u64,
    pub cache_fraction: f64,
    pub p_units: f64,
    pub lambda: f64,
    pub sweep_value: Option<f64>,
    /// None when the run failed; the error text goes to `status`.
    pub report: Option<MetricsReport>,
    pub status: String,
    /// Wall-clock execution time; in-memory only (not serialized) so CSV
    /// output stays deterministic.
    pub wall_ms: u128,
}

/// Aggregate over seeds for one (policy, sweep point).
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub policy: &'static str,
    pub sweep_value: Option<f64>,
    pub cache_fraction: f64,
    pub p_units: f64,
    pub lambda: f64,
    pub seeds: usize,
    pub hit_ratio: (f64, f64),
    pub avg_delay_ms: (f64, f64),
    pub external_traffic_tb: (f64, f64),
    pub backhaul_cost: (f64, f64),
    pub proc_util: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct SweepResults {
    pub data: Vec<DataRow>,
    pub summary: Vec<SummaryRow>,
}

pub const DATA_HEADER: &str = "policy,seed,cache_fraction,P_units,lambda,hit_ratio,avg_delay_ms,external_traffic_TB,backhaul_cost,proc_util,runtime_ms,status";

pub const SUMMARY_HEADER: &str = "policy,cache_fraction,P_units,lambda,seeds,hit_ratio_mean,hit_ratio_ci95,avg_delay_ms_mean,avg_delay_ms_ci95,external_traffic_TB_mean,external_traffic_TB_ci95,backhaul_cost_mean,backhaul_cost_ci95,proc_util_mean,proc_util_ci95";

/// Two-sided 95% Student-t quantile for `n` samples (0 when n < 2).
pub fn t_quantile_975(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    use statrs::distribution::{ContinuousCDF, StudentsT};
    StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("valid dof")
        .inverse_cdf(0.975)
}

fn mean_and_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let half_width = t_quantile_975(n) * (var / n as f64).sqrt();
    (mean, half_width)
}

/// Execute every (policy, sweep value, seed) combination of `config` on a
/// worker pool of `threads` (0 = machine parallelism). Row order is the
/// config order regardless of completion order; failures become
/// `status=error` rows without aborting the rest.
pub fn run_sweep(config: &ExperimentConfig, threads: usize) -> Result<SweepResults, ConfigError> {
    let sweep_values: Vec<Option<f64>> = match &config.sweep {
        Some(axis) => axis.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut jobs = Vec::new();
    for &policy in &config.policies {
        for &value in &sweep_values {
            for &seed in &config.seeds {
                jobs.push((policy, value, seed));
            }
        }
    }

    let execute = |&(policy, value, seed): &(PolicyKind, Option<f64>, u64)| -> DataRow {
        let started = std::time::Instant::now();
        let spec = config.run_spec(policy, seed, value);
        let lambda = config.arrival_rates_per_min.iter().sum::<f64>()
            / config.arrival_rates_per_min.len() as f64;
        let (lambda, p_units) = match (&config.sweep, value) {
            (Some(axis), Some(v)) if axis.param == SweepParam::ArrivalRatePerMin => {
                (v, config.processing_capacity_mbps * 1e6)
            }
            (Some(axis), Some(v)) if axis.param == SweepParam::ProcessingCapacityMbps => {
                (lambda, v * 1e6)
            }
            _ => (lambda, config.processing_capacity_mbps * 1e6),
        };
        let cache_fraction = config.effective_cache_fraction(value);
        let (report, status) = match spec.and_then(|s| run(&s).map_err(|e| ConfigError::Invalid(e.to_string()))) {
            Ok(out) => (Some(out.report), "ok".to_string()),
            Err(e) => (None, format!("error: {e}")),
        };
        DataRow {
            policy: policy.name(),
            seed,
            cache_fraction,
            p_units,
            lambda,
            sweep_value: value,
            report,
            status,
            wall_ms: started.elapsed().as_millis(),
        }
    };

    let data: Vec<DataRow> = if threads == 1 {
        jobs.iter().map(execute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| ConfigError::Invalid(format!("worker pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(execute).collect())
    };

    let summary = aggregate(config, &data);
    Ok(SweepResults { data, summary })
}

/// Recompute the per-(policy, sweep point) aggregate block from data rows.
pub fn aggregate(config: &ExperimentConfig, data: &[DataRow]) -> Vec<SummaryRow> {
    let sweep_values: Vec<Option<f64>> = match &config.sweep {
        Some(axis) => axis.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut out = Vec::new();
    for &policy in &config.policies {
        for &value in &sweep_values {
            let rows: Vec<&DataRow> = data
                .iter()
                .filter(|r| r.policy == policy.name() && r.sweep_value == value)
                .collect();
            let ok: Vec<&MetricsReport> =
                rows.iter().filter_map(|r| r.report.as_ref()).collect();
            if rows.is_empty() {
                continue;
            }
            let first = rows[0];
            let collect = |f: fn(&MetricsReport) -> f64| -> Vec<f64> {
                ok.iter().map(|r| f(r)).collect()
            };
            out.push(SummaryRow {
                policy: first.policy,
                sweep_value: value,
                cache_fraction: first.cache_fraction,
                p_units: first.p_units,
                lambda: first.lambda,
                seeds: ok.len(),
                hit_ratio: mean_and_ci(&collect(|r| r.hit_ratio)),
                avg_delay_ms: mean_and_ci(&collect(|r| r.avg_access_delay_ms)),
                external_traffic_tb: mean_and_ci(&collect(|r| r.external_traffic_tb())),
                backhaul_cost: mean_and_ci(&collect(|r| r.total_backhaul_cost)),
                proc_util: mean_and_ci(&collect(|r| r.utilization_mean)),
            });
        }
    }
    out
}

impl SweepResults {
    pub fn data_csv(&self) -> String {
        let mut out = String::from(DATA_HEADER);
        out.push('\n');
        for row in &self.data {
            // status is the last field; keep it free of separators
            let status = row.status.replace([',', '\n'], ";");
            match &row.report {
                Some(r) => out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    row.policy,
                    row.seed,
                    row.cache_fraction,
                    row.p_units,
                    row.lambda,
                    r.hit_ratio,
                    r.avg_access_delay_ms,
                    r.external_traffic_tb(),
                    r.total_backhaul_cost,
                    r.utilization_mean,
                    (r.horizon_s * 1000.0).round(),
                    status
                )),
                None => out.push_str(&format!(
                    "{},{},{},{},{},,,,,,,{}\n",
                    row.policy, row.seed, row.cache_fraction, row.p_units, row.lambda, status
                )),
            }
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for row in &self.summary {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                row.policy,
                row.cache_fraction,
                row.p_units,
                row.lambda,
                row.seeds,
                row.hit_ratio.0,
                row.hit_ratio.1,
                row.avg_delay_ms.0,
                row.avg_delay_ms.1,
                row.external_traffic_tb.0,
                row.external_traffic_tb.1,
                row.backhaul_cost.0,
                row.backhaul_cost.1,
                row.proc_util.0,
                row.proc_util.1
            ));
        }
        out
    }

    /// Write `results.csv` and `summary.csv` under `dir`; returns the paths.
    pub fn write_files(&self, dir: &Path) -> Result<(PathBuf, PathBuf), std::io::Error> {
        std::fs::create_dir_all(dir)?;
        let data_path = dir.join("results.csv");
        let summary_path = dir.join("summary.csv");
        std::fs::write(&data_path, self.data_csv())?;
        std::fs::write(&summary_path, self.summary_csv())?;
        Ok((data_path, summary_path))
    }

    pub fn any_errors(&self) -> bool {
        self.data.iter().any(|r| r.status != "ok")
    }
}

/// Run a single (policy, seed) point of `config` with no sweep applied.
pub fn run_single(
    config: &ExperimentConfig,
    policy: PolicyKind,
    seed: u64,
) -> Result<RunOutput, ConfigError> {
    let spec = config.run_spec(policy, seed, None)?;
    run(&spec).map_err(|e| ConfigError::Invalid(e.to_string()))
}
