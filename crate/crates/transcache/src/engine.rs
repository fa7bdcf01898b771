//! Discrete-event simulation loop: arrivals and departures in time order,
//! policy dispatch, state updates, and metric accumulation.
//!
//! A run is fully determined by its [`RunSpec`]: topology and trace are
//! derived from the seed, caches start empty, and events are processed in
//! (time, kind, id) order with departures winning ties so capacity frees
//! before a simultaneous arrival schedules. Cache and processing invariants
//! are checked after every event; a violation aborts the run.

use crate::model::{Catalog, CostParams, Request, ServingDecision, Topology};
use crate::offline::{solve_bnb, SchedulingInstance};
use crate::policy::{
    apply_cache_updates, apply_decision, decision_outcome, schedule, ApplyError, PathOutcome,
    PolicyKind, SystemState,
};
use crate::workload::{generate_trace, sample_topology, WorkloadError, WorkloadParams};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error("internal consistency: {0}")]
    Apply(#[from] ApplyError),
    #[error("invariant violated at t={time}: {message}")]
    InvariantViolation { time: f64, message: String },
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("decision log parse error at line {line}: {message}")]
    LogParse { line: usize, message: String },
}

/// Resolved parameters of one simulation run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub catalog: Catalog,
    pub params: CostParams,
    pub workload: WorkloadParams,
    /// Cache bytes M_j, identical at every server.
    pub cache_capacity_bytes: u64,
    /// Processing units P_j, identical at every server.
    pub processing_capacity: f64,
    pub policy: PolicyKind,
    pub seed: u64,
    /// Exclude this many initial requests from the metrics (the decision log
    /// still records them).
    pub warmup_requests: usize,
}

/// Per-decision-type request counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecisionCounts {
    pub local_hit: usize,
    pub local_transcode: usize,
    pub neighbor_fetch: usize,
    pub neighbor_transcode_at_source: usize,
    pub neighbor_transcode_at_home: usize,
    pub origin_fetch: usize,
}

impl DecisionCounts {
    fn bump(&mut self, decision: &ServingDecision) {
        match decision {
            ServingDecision::LocalHit => self.local_hit += 1,
            ServingDecision::LocalTranscode { .. } => self.local_transcode += 1,
            ServingDecision::NeighborFetch { .. } => self.neighbor_fetch += 1,
            ServingDecision::NeighborTranscodeAtSource { .. } => {
                self.neighbor_transcode_at_source += 1
            }
            ServingDecision::NeighborTranscodeAtHome { .. } => {
                self.neighbor_transcode_at_home += 1
            }
            ServingDecision::OriginFetch => self.origin_fetch += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.local_hit
            + self.local_transcode
            + self.neighbor_fetch
            + self.neighbor_transcode_at_source
            + self.neighbor_transcode_at_home
            + self.origin_fetch
    }
}

/// Aggregated outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Requests counted toward the metrics (total minus warmup).
    pub total_requests: usize,
    /// Fraction of counted requests served without contacting the origin.
    pub hit_ratio: f64,
    pub avg_access_delay_ms: f64,
    /// Bytes downloaded from the origin server.
    pub external_traffic_bytes: u64,
    /// Actual bytes moved between edge servers over the backhaul.
    pub inter_server_traffic_bytes: u64,
    /// Sum of per-request backhaul costs.
    pub total_backhaul_cost: f64,
    pub counts: DecisionCounts,
    pub utilization_per_server: Vec<f64>,
    pub utilization_mean: f64,
    /// Simulated span `[0, last departure]`, in seconds.
    pub horizon_s: f64,
}

impl MetricsReport {
    pub fn external_traffic_tb(&self) -> f64 {
        self.external_traffic_bytes as f64 / 1e12
    }
}

/// One line of the decision log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub request_id: u64,
    pub time: f64,
    pub server: u32,
    pub video: u32,
    pub level: u8,
    pub decision: ServingDecision,
    pub cost: f64,
    pub delay_ms: f64,
    pub origin_bytes: u64,
}

/// Metrics plus the full per-request decision log.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: MetricsReport,
    pub log: Vec<DecisionRecord>,
}

#[derive(Debug, PartialEq)]
struct DepartureEvent {
    time: f64,
    id: u64,
}

impl Eq for DepartureEvent {}

impl PartialOrd for DepartureEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DepartureEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .partial_cmp(&other.time)
            .expect("finite event times")
            .then(self.id.cmp(&other.id))
    }
}

/// Run one simulation to completion.
pub fn run(spec: &RunSpec) -> Result<RunOutput, EngineError> {
    check_spec(spec)?;
    let num_servers = spec.workload.num_servers();
    let topology = sample_topology(num_servers, &spec.workload, spec.seed)?;
    let trace = generate_trace(&spec.workload, spec.seed)?;
    run_trace(spec, topology, &trace)
}

/// Run against an externally supplied topology and trace (shared across
/// policies for common-random-number comparisons).
pub fn run_trace(
    spec: &RunSpec,
    topology: Topology,
    trace: &[Request],
) -> Result<RunOutput, EngineError> {
    check_spec(spec)?;
    let mut sim = Simulation::new(spec, topology);
    for (seq, request) in trace.iter().enumerate() {
        sim.drain_departures_until(request.arrival_time)?;
        sim.arrival(request, seq)?;
    }
    sim.drain_departures_until(f64::INFINITY)?;
    Ok(sim.finish())
}

fn check_spec(spec: &RunSpec) -> Result<(), EngineError> {
    if spec.catalog.num_levels() != spec.workload.num_levels {
        return Err(EngineError::SpecMismatch(
            "catalog and workload level counts differ".into(),
        ));
    }
    if spec.catalog.num_videos() != spec.workload.num_videos {
        return Err(EngineError::SpecMismatch(
            "catalog and workload video counts differ".into(),
        ));
    }
    if spec.catalog.video_length_s() != spec.workload.video_length_s {
        return Err(EngineError::SpecMismatch(
            "catalog and workload video lengths differ".into(),
        ));
    }
    Ok(())
}

struct Simulation<'a> {
    spec: &'a RunSpec,
    state: SystemState,
    departures: BinaryHeap<Reverse<DepartureEvent>>,
    /// In-flight requests by id (ascending id = ascending arrival).
    in_flight: BTreeMap<u64, Request>,
    capacities: Vec<f64>,
    sizes: Vec<u64>,
    proc_costs: Vec<f64>,
    log: Vec<DecisionRecord>,
    // accumulators over counted (post-warmup) requests
    counted: usize,
    delay_sum: f64,
    cost_sum: f64,
    origin_bytes: u64,
    inter_server_bytes: u64,
    counts: DecisionCounts,
    last_departure: f64,
    events_processed: u64,
}

impl<'a> Simulation<'a> {
    fn new(spec: &'a RunSpec, topology: Topology) -> Self {
        let state = SystemState::new(
            spec.catalog.clone(),
            topology,
            spec.params,
            spec.cache_capacity_bytes,
            spec.processing_capacity,
        );
        let num_servers = state.num_servers();
        let sizes = spec.catalog.variant_sizes();
        let proc_costs: Vec<f64> = (1..=spec.catalog.num_levels())
            .map(|l| {
                spec.params
                    .transcode_cost(&spec.catalog, l)
                    .expect("level in range")
            })
            .collect();
        Self {
            spec,
            state,
            departures: BinaryHeap::new(),
            in_flight: BTreeMap::new(),
            capacities: vec![spec.processing_capacity; num_servers as usize],
            sizes,
            proc_costs,
            log: Vec::new(),
            counted: 0,
            delay_sum: 0.0,
            cost_sum: 0.0,
            origin_bytes: 0,
            inter_server_bytes: 0,
            counts: DecisionCounts::default(),
            last_departure: 0.0,
            events_processed: 0,
        }
    }

    /// Process all departures at or before `t` (departures win ties).
    fn drain_departures_until(&mut self, t: f64) -> Result<(), EngineError> {
        while let Some(Reverse(next)) = self.departures.peek() {
            if next.time > t {
                break;
            }
            let Reverse(event) = self.departures.pop().expect("peeked");
            self.state.ledger.advance_to(event.time);
            self.in_flight.remove(&event.id);
            // only transcode-path requests hold capacity; under the offline
            // policy a re-solve may already have reassigned it away
            self.state.ledger.release(event.id);
            self.last_departure = event.time;
            self.check_invariants(event.time)?;
        }
        Ok(())
    }

    fn arrival(&mut self, request: &Request, seq: usize) -> Result<(), EngineError> {
        self.state.ledger.advance_to(request.arrival_time);
        let (decision, path) = match self.spec.policy {
            PolicyKind::OfflineOptimal => self.offline_arrival(request)?,
            policy => {
                let decision = schedule(policy, request, &self.state);
                let applied = apply_decision(request, &decision, &mut self.state)?;
                (
                    decision,
                    PathOutcome {
                        cost: applied.cost,
                        delay_ms: applied.delay_ms,
                        origin_bytes: applied.origin_bytes,
                        inter_server_bytes: applied.inter_server_bytes,
                    },
                )
            }
        };

        self.in_flight.insert(request.id, *request);
        self.departures.push(Reverse(DepartureEvent {
            time: request.departure_time(),
            id: request.id,
        }));

        if seq >= self.spec.warmup_requests {
            self.counted += 1;
            self.delay_sum += path.delay_ms;
            self.cost_sum += path.cost;
            self.origin_bytes += path.origin_bytes;
            self.inter_server_bytes += path.inter_server_bytes;
            self.counts.bump(&decision);
        }
        self.log.push(DecisionRecord {
            request_id: request.id,
            time: request.arrival_time,
            server: request.home,
            video: request.variant.video,
            level: request.variant.level,
            decision,
            cost: path.cost,
            delay_ms: path.delay_ms,
            origin_bytes: path.origin_bytes,
        });
        self.check_invariants(request.arrival_time)
    }

    /// Offline policy: re-solve the scheduling problem over every in-flight
    /// request plus the newcomer, rebuild the processing assignment from the
    /// result, and record metrics for the newcomer only.
    fn offline_arrival(
        &mut self,
        request: &Request,
    ) -> Result<(ServingDecision, PathOutcome), EngineError> {
        let mut requests: Vec<Request> = self.in_flight.values().copied().collect();
        requests.push(*request);
        let instance = SchedulingInstance {
            requests,
            caches: &self.state.caches,
            topology: &self.state.topology,
            capacities: &self.capacities,
            sizes: &self.sizes,
            proc_costs: &self.proc_costs,
        };
        let schedule = solve_bnb(&instance);
        let assigned: Vec<(Request, ServingDecision)> = instance
            .requests
            .iter()
            .copied()
            .zip(schedule.decisions.iter().copied())
            .collect();

        // the in-flight set may be reassigned wholesale; metrics for those
        // requests were charged at their own arrivals and stay untouched
        self.state.ledger.clear_active();
        for (req, decision) in &assigned {
            if let Some(site) = decision.transcode_site(req.home) {
                let p = self.proc_costs[req.variant.level as usize - 1];
                self.state
                    .ledger
                    .admit(site, req.id, p, req.departure_time())
                    .map_err(|e| ApplyError::AdmissionFailed(e.to_string()))?;
            }
        }

        let decision = *schedule.decisions.last().expect("newcomer present");
        apply_cache_updates(request, &decision, &mut self.state.caches, &self.spec.catalog)?;
        let outcome = decision_outcome(request, &decision, &self.spec.catalog, &self.state.topology);
        Ok((decision, outcome))
    }

    fn check_invariants(&mut self, time: f64) -> Result<(), EngineError> {
        self.events_processed += 1;
        for (idx, cache) in self.state.caches.iter().enumerate() {
            if cache.used_bytes() > cache.capacity() {
                return Err(EngineError::InvariantViolation {
                    time,
                    message: format!("cache {} over capacity", idx + 1),
                });
            }
        }
        if !self.state.ledger.verify_accounting() {
            return Err(EngineError::InvariantViolation {
                time,
                message: "processing load exceeds capacity or drifted".into(),
            });
        }
        // deep cache re-summations are O(entries); sample them
        if self.events_processed.is_multiple_of(4096) {
            self.deep_check(time)?;
        }
        Ok(())
    }

    fn deep_check(&self, time: f64) -> Result<(), EngineError> {
        for (idx, cache) in self.state.caches.iter().enumerate() {
            if !cache.verify_accounting() {
                return Err(EngineError::InvariantViolation {
                    time,
                    message: format!("cache {} byte accounting drifted", idx + 1),
                });
            }
        }
        Ok(())
    }

    fn finish(mut self) -> RunOutput {
        self.deep_check(self.last_departure).expect("final accounting");
        let horizon = self.last_departure;
        self.state.ledger.advance_to(horizon);
        let utilization = self.state.ledger.utilization(horizon);
        let utilization_mean = if utilization.is_empty() {
            0.0
        } else {
            utilization.iter().sum::<f64>() / utilization.len() as f64
        };
        let report = MetricsReport {
            total_requests: self.counted,
            hit_ratio: if self.counted == 0 {
                0.0
            } else {
                1.0 - self.counts.origin_fetch as f64 / self.counted as f64
            },
            avg_access_delay_ms: if self.counted == 0 {
                0.0
            } else {
                self.delay_sum / self.counted as f64
            },
            external_traffic_bytes: self.origin_bytes,
            inter_server_traffic_bytes: self.inter_server_bytes,
            total_backhaul_cost: self.cost_sum,
            counts: self.counts,
            utilization_per_server: utilization,
            utilization_mean,
            horizon_s: horizon,
        };
        RunOutput {
            report,
            log: self.log,
        }
    }
}

// ---------------------------------------------------------------------------
// Decision log text form
// ---------------------------------------------------------------------------

pub const DECISION_LOG_HEADER: &str =
    "request_id,time,server,video,level,decision_type,source,transcode_site,cost,delay_ms,origin_bytes";

/// Render the decision log, one line per request.
pub fn write_decision_log(log: &[DecisionRecord]) -> String {
    let mut out = String::from(DECISION_LOG_HEADER);
    out.push('\n');
    for r in log {
        let site = match r.decision.transcode_site(r.server) {
            Some(s) => s.to_string(),
            None => "-".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.request_id,
            r.time,
            r.server,
            r.video,
            r.level,
            r.decision.kind_name(),
            r.decision.source_server(r.server),
            site,
            r.cost,
            r.delay_ms,
            r.origin_bytes
        ));
    }
    out
}

/// One parsed decision-log line; enough to recompute costs independently.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLogRecord {
    pub request_id: u64,
    pub time: f64,
    pub server: u32,
    pub video: u32,
    pub level: u8,
    pub decision_type: String,
    /// Serving server; 0 is the origin.
    pub source: u32,
    pub transcode_site: Option<u32>,
    pub cost: f64,
    pub delay_ms: f64,
    pub origin_bytes: u64,
}

impl ParsedLogRecord {
    /// Recompute the backhaul cost of this record from first principles:
    /// zero when served at home, `r_l * d_jk` from a neighbor, `r_l * d_j0`
    /// from the origin.
    pub fn recompute_cost(&self, catalog: &Catalog, topology: &Topology) -> f64 {
        let r_l = catalog
            .variant_size(self.level)
            .expect("logged level in catalog range") as f64;
        if self.source == self.server {
            0.0
        } else if self.source == 0 {
            r_l * topology.origin_cost(self.server)
        } else {
            r_l * topology.neighbor_cost(self.server, self.source)
        }
    }
}

/// Parse a log produced by [`write_decision_log`].
pub fn read_decision_log(text: &str) -> Result<Vec<ParsedLogRecord>, EngineError> {
    let err = |line: usize, message: &str| EngineError::LogParse {
        line,
        message: message.into(),
    };
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && line.starts_with("request_id") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(err(lineno + 1, "expected 11 fields"));
        }
        let parse_u64 =
            |s: &str, what: &str| s.parse::<u64>().map_err(|_| err(lineno + 1, what));
        let parse_f64 =
            |s: &str, what: &str| s.parse::<f64>().map_err(|_| err(lineno + 1, what));
        out.push(ParsedLogRecord {
            request_id: parse_u64(f[0], "bad request id")?,
            time: parse_f64(f[1], "bad time")?,
            server: f[2].parse().map_err(|_| err(lineno + 1, "bad server"))?,
            video: f[3].parse().map_err(|_| err(lineno + 1, "bad video"))?,
            level: f[4].parse().map_err(|_| err(lineno + 1, "bad level"))?,
            decision_type: f[5].to_string(),
            source: f[6].parse().map_err(|_| err(lineno + 1, "bad source"))?,
            transcode_site: match f[7] {
                "-" => None,
                s => Some(s.parse().map_err(|_| err(lineno + 1, "bad transcode site"))?),
            },
            cost: parse_f64(f[8], "bad cost")?,
            delay_ms: parse_f64(f[9], "bad delay")?,
            origin_bytes: parse_u64(f[10], "bad origin bytes")?,
        });
    }
    Ok(out)
}
