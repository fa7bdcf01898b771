//! Domain types shared by every module: catalog, topology, requests, serving
//! decisions, and the size/cost arithmetic they imply.
//!
//! Conventions: servers are indexed `1..=K` (0 names the origin server in
//! logs only), videos `1..=V`, bitrate levels `1..=L` with a strictly higher
//! bitrate at a higher level. A variant can only be transcoded downward:
//! `(v, h)` can produce `(v, l)` iff `l <= h`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("level {level} out of range 1..={max}")]
    LevelOutOfRange { level: u8, max: u8 },
    #[error("catalog invalid: {0}")]
    InvalidCatalog(String),
    #[error("topology invalid: {0}")]
    InvalidTopology(String),
}

/// One bitrate version of one video.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariantId {
    /// Video index, `1..=V`.
    pub video: u32,
    /// Bitrate level, `1..=L`; higher level means higher bitrate.
    pub level: u8,
}

impl VariantId {
    pub fn new(video: u32, level: u8) -> Self {
        Self { video, level }
    }

    /// True when `self` can be produced by transcoding `source` downward:
    /// same video and `source.level >= self.level`.
    pub fn transcodable_from(&self, source: &VariantId) -> bool {
        self.video == source.video && self.level <= source.level
    }
}

impl std::fmt::Display for VariantId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}l{}", self.video, self.level)
    }
}

/// The video library: `V` titles, each available at `L` bitrate levels, all
/// with the same play length.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    num_videos: u32,
    /// Bits per second for each level, strictly increasing, index `level-1`.
    level_bitrates_bps: Vec<f64>,
    video_length_s: f64,
}

impl Catalog {
    pub fn new(
        num_videos: u32,
        level_bitrates_bps: Vec<f64>,
        video_length_s: f64,
    ) -> Result<Self, ModelError> {
        if num_videos == 0 {
            return Err(ModelError::InvalidCatalog("num_videos must be >= 1".into()));
        }
        if level_bitrates_bps.is_empty() || level_bitrates_bps.len() > u8::MAX as usize {
            return Err(ModelError::InvalidCatalog(format!(
                "need 1..=255 bitrate levels, got {}",
                level_bitrates_bps.len()
            )));
        }
        if !video_length_s.is_finite() || video_length_s <= 0.0 {
            return Err(ModelError::InvalidCatalog("video_length_s must be > 0".into()));
        }
        let mut prev = 0.0;
        for (i, &b) in level_bitrates_bps.iter().enumerate() {
            if !b.is_finite() || b <= prev {
                return Err(ModelError::InvalidCatalog(format!(
                    "level bitrates must be strictly increasing and positive (level {})",
                    i + 1
                )));
            }
            prev = b;
        }
        Ok(Self {
            num_videos,
            level_bitrates_bps,
            video_length_s,
        })
    }

    pub fn num_videos(&self) -> u32 {
        self.num_videos
    }

    pub fn num_levels(&self) -> u8 {
        self.level_bitrates_bps.len() as u8
    }

    pub fn video_length_s(&self) -> f64 {
        self.video_length_s
    }

    pub fn bitrate_bps(&self, level: u8) -> Result<f64, ModelError> {
        self.check_level(level)?;
        Ok(self.level_bitrates_bps[level as usize - 1])
    }

    /// Size in whole bytes of one level-`level` variant: bitrate x length / 8,
    /// rounded half up.
    pub fn variant_size(&self, level: u8) -> Result<u64, ModelError> {
        let bitrate = self.bitrate_bps(level)?;
        Ok((bitrate * self.video_length_s / 8.0).round() as u64)
    }

    /// Per-level variant sizes, index `level-1`.
    pub fn variant_sizes(&self) -> Vec<u64> {
        (1..=self.num_levels())
            .map(|l| self.variant_size(l).expect("level in range"))
            .collect()
    }

    /// Total bytes needed to store every variant of every video.
    pub fn library_size_bytes(&self) -> u64 {
        let per_video: u64 = self.variant_sizes().iter().sum();
        per_video * self.num_videos as u64
    }

    fn check_level(&self, level: u8) -> Result<(), ModelError> {
        if level == 0 || level > self.num_levels() {
            Err(ModelError::LevelOutOfRange {
                level,
                max: self.num_levels(),
            })
        } else {
            Ok(())
        }
    }
}

/// Transcode cost coefficient: processing units consumed per output byte.
///
/// The cost of producing a level-`l` variant is `p_l = tau * r_l` regardless
/// of the source level. With [`CostParams::bitrate_equivalent`] the load of a
/// transcode, in units, equals the output bitrate in bits/second, so a server
/// capacity stated as "bits processed per second" can be used directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub tau: f64,
}

impl CostParams {
    pub fn new(tau: f64) -> Result<Self, ModelError> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(ModelError::InvalidCatalog("tau must be > 0".into()));
        }
        Ok(Self { tau })
    }

    /// The default coefficient: `tau = 8 / video_length`, which makes
    /// `p_l = r_l * 8 / length` equal to the level bitrate in bits/second.
    pub fn bitrate_equivalent(catalog: &Catalog) -> Self {
        Self {
            tau: 8.0 / catalog.video_length_s(),
        }
    }

    /// Processing load `p_l` of transcoding any higher variant down to
    /// `level`. Independent of the source level.
    pub fn transcode_cost(&self, catalog: &Catalog, level: u8) -> Result<f64, ModelError> {
        Ok(self.tau * catalog.variant_size(level)? as f64)
    }
}

/// Per-pair backhaul costs and delays, in milliseconds, for `K` servers plus
/// the origin. Cost and delay share units: retrieving one byte over a path
/// costs its delay value.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    /// `pair[j-1][k-1]` = d_jk for j != k; diagonal holds d_jj (local delay).
    pair_ms: Vec<Vec<f64>>,
    /// `origin[j-1]` = d_j0.
    origin_ms: Vec<f64>,
}

impl Topology {
    /// Build and validate: symmetric pair costs with
    /// `d_j0 > d_jk > d_jj > 0` for every pair.
    pub fn new(pair_ms: Vec<Vec<f64>>, origin_ms: Vec<f64>) -> Result<Self, ModelError> {
        let k = pair_ms.len();
        if k == 0 {
            return Err(ModelError::InvalidTopology("need at least one server".into()));
        }
        if origin_ms.len() != k || pair_ms.iter().any(|row| row.len() != k) {
            return Err(ModelError::InvalidTopology("matrix shape mismatch".into()));
        }
        let all_finite = pair_ms.iter().flatten().all(|d| d.is_finite())
            && origin_ms.iter().all(|d| d.is_finite());
        if !all_finite {
            return Err(ModelError::InvalidTopology("costs must be finite".into()));
        }
        for j in 0..k {
            if pair_ms[j][j] <= 0.0 {
                return Err(ModelError::InvalidTopology(format!(
                    "local delay d[{}][{}] must be > 0",
                    j + 1,
                    j + 1
                )));
            }
            for col in 0..k {
                if col == j {
                    continue;
                }
                if pair_ms[j][col] != pair_ms[col][j] {
                    return Err(ModelError::InvalidTopology(format!(
                        "pair cost not symmetric at ({}, {})",
                        j + 1,
                        col + 1
                    )));
                }
                if pair_ms[j][col] <= pair_ms[j][j] || origin_ms[j] <= pair_ms[j][col] {
                    return Err(ModelError::InvalidTopology(format!(
                        "need d_j0 > d_jk > d_jj at ({}, {})",
                        j + 1,
                        col + 1
                    )));
                }
            }
        }
        Ok(Self { pair_ms, origin_ms })
    }

    pub fn num_servers(&self) -> u32 {
        self.pair_ms.len() as u32
    }

    /// d_jj: delay of serving from the local cache.
    pub fn local_delay(&self, server: u32) -> f64 {
        self.pair_ms[server as usize - 1][server as usize - 1]
    }

    /// d_jk: backhaul cost/delay between two distinct servers.
    pub fn neighbor_cost(&self, j: u32, k: u32) -> f64 {
        debug_assert_ne!(j, k);
        self.pair_ms[j as usize - 1][k as usize - 1]
    }

    /// d_j0: backhaul cost/delay from the origin content server.
    pub fn origin_cost(&self, server: u32) -> f64 {
        self.origin_ms[server as usize - 1]
    }

    /// Servers other than `j`, ascending.
    pub fn neighbors(&self, j: u32) -> impl Iterator<Item = u32> + '_ {
        (1..=self.num_servers()).filter(move |&k| k != j)
    }
}

/// One user request: a variant wanted at a home server at a point in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Request {
    pub id: u64,
    /// Home server, `1..=K`.
    pub home: u32,
    pub variant: VariantId,
    pub arrival_time: f64,
    /// Streaming duration in seconds; equals the catalog video length.
    pub duration: f64,
}

impl Request {
    pub fn departure_time(&self) -> f64 {
        self.arrival_time + self.duration
    }
}

/// The six mutually exclusive ways a request can be served.
///
/// `source` is always a neighbor of the request's home server, and
/// `from_level` is always strictly above the requested level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServingDecision {
    /// Exact variant streamed from the home cache.
    LocalHit,
    /// Higher variant in the home cache transcoded down at home.
    LocalTranscode { from_level: u8 },
    /// Exact variant fetched from a neighbor's cache.
    NeighborFetch { source: u32 },
    /// Higher variant at a neighbor, transcoded there, result fetched.
    NeighborTranscodeAtSource { source: u32, from_level: u8 },
    /// Higher variant fetched from a neighbor, transcoded at home.
    NeighborTranscodeAtHome { source: u32, from_level: u8 },
    /// Exact variant fetched from the origin content server.
    OriginFetch,
}

impl ServingDecision {
    /// Stable name used in decision logs and reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ServingDecision::LocalHit => "local_hit",
            ServingDecision::LocalTranscode { .. } => "local_transcode",
            ServingDecision::NeighborFetch { .. } => "neighbor_fetch",
            ServingDecision::NeighborTranscodeAtSource { .. } => "neighbor_transcode_at_source",
            ServingDecision::NeighborTranscodeAtHome { .. } => "neighbor_transcode_at_home",
            ServingDecision::OriginFetch => "origin_fetch",
        }
    }

    /// Server the content is read from; 0 names the origin.
    pub fn source_server(&self, home: u32) -> u32 {
        match self {
            ServingDecision::LocalHit | ServingDecision::LocalTranscode { .. } => home,
            ServingDecision::NeighborFetch { source }
            | ServingDecision::NeighborTranscodeAtSource { source, .. }
            | ServingDecision::NeighborTranscodeAtHome { source, .. } => *source,
            ServingDecision::OriginFetch => 0,
        }
    }

    /// Server that runs the transcode, if any.
    pub fn transcode_site(&self, home: u32) -> Option<u32> {
        match self {
            ServingDecision::LocalTranscode { .. }
            | ServingDecision::NeighborTranscodeAtHome { .. } => Some(home),
            ServingDecision::NeighborTranscodeAtSource { source, .. } => Some(*source),
            _ => None,
        }
    }

    /// Level of the cached variant the transcode reads, if any.
    pub fn transcode_from(&self) -> Option<u8> {
        match self {
            ServingDecision::LocalTranscode { from_level }
            | ServingDecision::NeighborTranscodeAtSource { from_level, .. }
            | ServingDecision::NeighborTranscodeAtHome { from_level, .. } => Some(*from_level),
            _ => None,
        }
    }

    pub fn is_origin(&self) -> bool {
        matches!(self, ServingDecision::OriginFetch)
    }
}

/// Backhaul cost D_j(v_l) of serving `request` with `decision`: zero for both
/// local paths, `r_l * d_jk` for all three neighbor paths (the fetch-higher-
/// then-transcode-at-home path is charged at the requested size by
/// definition, even though the bytes on the wire are the larger source), and
/// `r_l * d_j0` for an origin fetch.
pub fn decision_cost(
    decision: &ServingDecision,
    request: &Request,
    catalog: &Catalog,
    topology: &Topology,
) -> f64 {
    let r_l = catalog
        .variant_size(request.variant.level)
        .expect("request level in catalog range") as f64;
    match decision {
        ServingDecision::LocalHit | ServingDecision::LocalTranscode { .. } => 0.0,
        ServingDecision::NeighborFetch { source }
        | ServingDecision::NeighborTranscodeAtSource { source, .. }
        | ServingDecision::NeighborTranscodeAtHome { source, .. } => {
            r_l * topology.neighbor_cost(request.home, *source)
        }
        ServingDecision::OriginFetch => r_l * topology.origin_cost(request.home),
    }
}

/// Access delay of the chosen path: the static delay of the source link.
pub fn decision_delay_ms(decision: &ServingDecision, home: u32, topology: &Topology) -> f64 {
    match decision {
        ServingDecision::LocalHit | ServingDecision::LocalTranscode { .. } => {
            topology.local_delay(home)
        }
        ServingDecision::NeighborFetch { source }
        | ServingDecision::NeighborTranscodeAtSource { source, .. }
        | ServingDecision::NeighborTranscodeAtHome { source, .. } => {
            topology.neighbor_cost(home, *source)
        }
        ServingDecision::OriginFetch => topology.origin_cost(home),
    }
}
