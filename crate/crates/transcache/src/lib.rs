//! Discrete-event simulator and policy library for collaborative caching and
//! transcoding of multi-bitrate video across a pool of edge servers.
//!
//! Each edge server pairs a byte-capacity LRU cache with a transcoding
//! capacity budget. A request for a bitrate variant is served by exactly one
//! of six paths: local cache hit, local transcode from a higher cached
//! variant, fetch from a neighbor, transcode at a neighbor, fetch a higher
//! variant and transcode at home, or origin fetch. A scheduling policy picks
//! the path; the engine replays a generated workload trace, enforces cache
//! and processing constraints after every event, and accumulates hit ratio,
//! access delay, backhaul cost/traffic, and processing utilization.
//!
//! # Architecture
//!
//! ```text
//! ┌──────────┐   trace   ┌──────────┐  decisions  ┌──────────────┐
//! │ workload │──────────▶│  engine  │◀───────────▶│    policy    │
//! │ (Zipf +  │           │ (events, │             │ jccp / base- │
//! │ Poisson) │           │ metrics) │             │ lines/offline│
//! └──────────┘           └────┬─────┘             └──────────────┘
//!                             │ owns
//!                  ┌──────────┴──────────┐
//!                  ▼                     ▼
//!             ┌─────────┐          ┌────────────┐
//!             │  cache  │          │ processing │
//!             │ (LRU/M) │          │ (ledger/P) │
//!             └─────────┘          └────────────┘
//! ```
//!
//! # Policies
//!
//! - `jccp`: online joint collaborative caching and processing: local hit,
//!   then local transcode, then cheapest neighbor fetch, then the neighbor
//!   transcode placement with the most headroom, then origin.
//! - `cachepro`: local caching and transcoding only, no collaboration.
//! - `cocache`: collaborative caching only, no transcoding.
//! - `offline`: exact re-solve of the request-scheduling ILP over all
//!   in-flight requests at every arrival (branch-and-bound).
//!
//! See the `examples/` directory for runnable entry points covering each
//! capability, and the `transcache` binary for the `run`, `sweep`,
//! `validate`, and `trace` subcommands.

pub mod cache;
pub mod engine;
pub mod experiment;
pub mod model;
pub mod offline;
pub mod policy;
pub mod processing;
pub mod validate;
pub mod workload;

pub use cache::{InsertOutcome, LruCache};
pub use engine::{run, DecisionRecord, MetricsReport, RunOutput, RunSpec};
pub use experiment::{ExperimentConfig, SweepAxis, SweepResults};
pub use model::{decision_cost, Catalog, CostParams, Request, ServingDecision, Topology, VariantId};
pub use offline::{solve_bnb, solve_exhaustive, Schedule, SchedulingInstance};
pub use policy::{apply_decision, PolicyKind, SystemState};
pub use processing::ProcessingLedger;
pub use workload::{generate_trace, sample_topology, zipf_pmf, WorkloadParams};
