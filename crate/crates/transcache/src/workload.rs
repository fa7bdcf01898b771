//! Reproducible workload generation: Zipf-popular videos with per-server
//! popularity permutations, Poisson arrivals, uniform variant choice, and
//! uniformly sampled topology delays.
//!
//! All randomness comes from one master seed split into named ChaCha
//! sub-streams (topology, per-server permutations, arrivals, video and
//! variant choices), so changing one dimension of an experiment never
//! perturbs the draws of another. The same `(params, seed)` always yields a
//! byte-identical trace.

use crate::model::{ModelError, Request, Topology, VariantId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WorkloadError {
    #[error("need at least one video")]
    EmptyCatalog,
    #[error("invalid workload parameters: {0}")]
    InvalidParams(String),
    #[error("trace parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Everything needed to generate one workload: catalog shape, skew, arrival
/// rates, and the delay ranges the topology is sampled from.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadParams {
    pub num_videos: u32,
    pub num_levels: u8,
    pub zipf_alpha: f64,
    /// Requests per minute at each server; length fixes the server count.
    pub arrival_rates_per_min: Vec<f64>,
    /// Requests generated per server.
    pub requests_per_server: u32,
    /// Streaming duration of every request, in seconds.
    pub video_length_s: f64,
    /// Uniform sampling ranges for d_jj, d_jk, d_j0, in milliseconds.
    pub local_delay_range_ms: (f64, f64),
    pub neighbor_delay_range_ms: (f64, f64),
    pub origin_delay_range_ms: (f64, f64),
}

impl WorkloadParams {
    pub fn num_servers(&self) -> u32 {
        self.arrival_rates_per_min.len() as u32
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        if self.num_videos == 0 {
            return Err(WorkloadError::EmptyCatalog);
        }
        if self.num_levels == 0 {
            return Err(WorkloadError::InvalidParams("need at least one level".into()));
        }
        if !self.zipf_alpha.is_finite() || self.zipf_alpha < 0.0 {
            return Err(WorkloadError::InvalidParams("zipf_alpha must be >= 0".into()));
        }
        if self.arrival_rates_per_min.is_empty()
            || self
                .arrival_rates_per_min
                .iter()
                .any(|&l| !l.is_finite() || l <= 0.0)
        {
            return Err(WorkloadError::InvalidParams(
                "arrival rates must be positive".into(),
            ));
        }
        if !self.video_length_s.is_finite() || self.video_length_s <= 0.0 {
            return Err(WorkloadError::InvalidParams(
                "video_length_s must be > 0".into(),
            ));
        }
        let ranges = [
            self.local_delay_range_ms,
            self.neighbor_delay_range_ms,
            self.origin_delay_range_ms,
        ];
        if ranges
            .iter()
            .any(|&(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi <= lo)
        {
            return Err(WorkloadError::InvalidParams("bad delay range".into()));
        }
        if self.local_delay_range_ms.1 > self.neighbor_delay_range_ms.0
            || self.neighbor_delay_range_ms.1 > self.origin_delay_range_ms.0
        {
            return Err(WorkloadError::InvalidParams(
                "delay ranges must be ordered local < neighbor < origin".into(),
            ));
        }
        Ok(())
    }
}

// Sub-stream ids for the master seed; server index is added per stream.
const STREAM_TOPOLOGY: u64 = 0x01;
const STREAM_PERMUTATION: u64 = 0x100;
const STREAM_ARRIVALS: u64 = 0x200;
const STREAM_VIDEO: u64 = 0x300;
const STREAM_VARIANT: u64 = 0x400;

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Zipf probability mass over ranks `1..=num_videos`:
/// `q_i = (1/i^alpha) / sum_j (1/j^alpha)`.
pub fn zipf_pmf(num_videos: u32, alpha: f64) -> Result<Vec<f64>, WorkloadError> {
    if num_videos == 0 {
        return Err(WorkloadError::EmptyCatalog);
    }
    if alpha < 0.0 {
        return Err(WorkloadError::InvalidParams("zipf_alpha must be >= 0".into()));
    }
    let weights: Vec<f64> = (1..=num_videos as u64)
        .map(|i| (i as f64).powf(-alpha))
        .collect();
    let norm: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / norm).collect())
}

/// Cumulative distribution for inverse-transform sampling of ranks.
fn zipf_cdf(pmf: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = pmf
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0; // close the tail against rounding
    }
    cdf
}

fn sample_rank(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u)
}

/// Per-server popularity order: a seeded shuffle of the video ids, so the
/// same title can rank differently at different servers.
pub fn popularity_permutation(params: &WorkloadParams, seed: u64, server: u32) -> Vec<u32> {
    let mut perm: Vec<u32> = (1..=params.num_videos).collect();
    perm.shuffle(&mut substream(seed, STREAM_PERMUTATION + server as u64));
    perm
}

/// Draw `n` popularity ranks (0-based) with the same inverse-CDF sampler the
/// trace generator uses, for distribution-fit testing.
pub fn sample_zipf_ranks(
    num_videos: u32,
    alpha: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<usize>, WorkloadError> {
    let cdf = zipf_cdf(&zipf_pmf(num_videos, alpha)?);
    let mut rng = substream(seed, STREAM_VIDEO);
    Ok((0..n).map(|_| sample_rank(&cdf, rng.gen::<f64>())).collect())
}

/// Generate the merged, time-ordered request trace for all servers.
///
/// Per server: exponential inter-arrival times with mean `60 / lambda`
/// seconds, video drawn by Zipf rank through that server's popularity
/// permutation, variant level uniform. Streams are merged by arrival time
/// with (server, per-server sequence) as the tie-break, and ids numbered in
/// final order.
pub fn generate_trace(params: &WorkloadParams, seed: u64) -> Result<Vec<Request>, WorkloadError> {
    params.validate()?;
    let pmf = zipf_pmf(params.num_videos, params.zipf_alpha)?;
    let cdf = zipf_cdf(&pmf);

    // (arrival, server, seq, variant)
    let mut raw: Vec<(f64, u32, u32, VariantId)> = Vec::new();
    for (idx, &lambda_per_min) in params.arrival_rates_per_min.iter().enumerate() {
        let server = idx as u32 + 1;
        let perm = popularity_permutation(params, seed, server);
        let exp = Exp::new(lambda_per_min / 60.0)
            .map_err(|e| WorkloadError::InvalidParams(e.to_string()))?;
        let mut arrivals = substream(seed, STREAM_ARRIVALS + server as u64);
        let mut videos = substream(seed, STREAM_VIDEO + server as u64);
        let mut variants = substream(seed, STREAM_VARIANT + server as u64);
        let mut t = 0.0;
        for seq in 0..params.requests_per_server {
            t += exp.sample(&mut arrivals);
            let rank = sample_rank(&cdf, videos.gen::<f64>());
            let video = perm[rank];
            let level = variants.gen_range(1..=params.num_levels);
            raw.push((t, server, seq, VariantId::new(video, level)));
        }
    }
    raw.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite arrival times")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(id, (arrival_time, home, _, variant))| Request {
            id: id as u64,
            home,
            variant,
            arrival_time,
            duration: params.video_length_s,
        })
        .collect())
}

/// Sample a valid topology: local delays from the local range, symmetric
/// pair delays from the neighbor range, origin delays from the origin range.
/// Deterministic per `(params, seed)`.
#[allow(clippy::needless_range_loop)] // symmetric matrix fill needs both indices
pub fn sample_topology(
    num_servers: u32,
    params: &WorkloadParams,
    seed: u64,
) -> Result<Topology, WorkloadError> {
    if num_servers == 0 {
        return Err(WorkloadError::InvalidParams("need at least one server".into()));
    }
    let mut rng = substream(seed, STREAM_TOPOLOGY);
    let k = num_servers as usize;
    let mut pair = vec![vec![0.0; k]; k];
    // draw order is fixed: all locals, then pairs by (j, k), then origins
    let (lo, hi) = params.local_delay_range_ms;
    for (j, row) in pair.iter_mut().enumerate() {
        row[j] = rng.gen_range(lo..hi);
    }
    let (lo, hi) = params.neighbor_delay_range_ms;
    for j in 0..k {
        for col in j + 1..k {
            let d = rng.gen_range(lo..hi);
            pair[j][col] = d;
            pair[col][j] = d;
        }
    }
    let (lo, hi) = params.origin_delay_range_ms;
    let origin: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..hi)).collect();
    Ok(Topology::new(pair, origin)?)
}

/// Write a trace in the line-oriented exchange form:
/// `arrival_time_s,server,video,level`, one request per line.
pub fn write_trace(trace: &[Request]) -> String {
    let mut out = String::from("arrival_time_s,server,video,level\n");
    for r in trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.arrival_time, r.home, r.variant.video, r.variant.level
        ));
    }
    out
}

/// Parse a trace written by [`write_trace`]. Requests are re-sorted by
/// (time, server, line order), re-numbered, and given `video_length_s` as
/// their duration.
pub fn read_trace(text: &str, video_length_s: f64) -> Result<Vec<Request>, WorkloadError> {
    let err = |line: usize, message: &str| WorkloadError::Parse {
        line,
        message: message.into(),
    };
    let mut raw: Vec<(f64, u32, u32, VariantId)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && line.starts_with("arrival_time_s") {
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(lineno + 1, "expected 4 comma-separated fields"));
        }
        let arrival: f64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| err(lineno + 1, "bad arrival time"))?;
        let server: u32 = fields[1]
            .trim()
            .parse()
            .map_err(|_| err(lineno + 1, "bad server"))?;
        let video: u32 = fields[2]
            .trim()
            .parse()
            .map_err(|_| err(lineno + 1, "bad video"))?;
        let level: u8 = fields[3]
            .trim()
            .parse()
            .map_err(|_| err(lineno + 1, "bad level"))?;
        raw.push((arrival, server, lineno as u32, VariantId::new(video, level)));
    }
    raw.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite arrival times")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(id, (arrival_time, home, _, variant))| Request {
            id: id as u64,
            home,
            variant,
            arrival_time,
            duration: video_length_s,
        })
        .collect())
}
