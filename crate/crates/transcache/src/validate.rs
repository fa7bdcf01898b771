//! Self-contained oracle and invariant suites, runnable from the CLI
//! (`transcache validate`) and reused by the acceptance tests.
//!
//! Each check pits an implementation against an independent reference: the
//! LRU cache against a naive list, the branch-and-bound solver against full
//! enumeration, maintained processing loads against re-summation, generated
//! workloads against their target distributions, and engine metrics against
//! a recomputation from the exported decision log.

use crate::cache::{InsertOutcome, LruCache};
use crate::engine::{read_decision_log, run, write_decision_log, RunSpec};
use crate::model::{Catalog, CostParams, Request, Topology, VariantId};
use crate::offline::{
    root_lower_bound, schedule_is_feasible, solve_bnb_options, solve_exhaustive_options,
    SchedulingInstance, SolverInput,
};
use crate::policy::PolicyKind;
use crate::workload::{generate_trace, sample_topology, zipf_pmf, WorkloadParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one validation check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: false,
            detail,
        }
    }
}

/// Run every suite; all must pass for a clean exit.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    vec![
        lru_matches_naive_oracle(10_000, seed),
        ledger_load_resummation(seed),
        solver_exactness(50, seed),
        zipf_pmf_properties(),
        workload_statistics(seed),
        engine_replay_determinism(seed),
        decision_log_cost_replay(seed),
    ]
}

// ---------------------------------------------------------------------------
// LRU vs naive list
// ---------------------------------------------------------------------------

struct NaiveLru {
    capacity: u64,
    items: Vec<(VariantId, u64)>,
}

impl NaiveLru {
    fn used(&self) -> u64 {
        self.items.iter().map(|(_, s)| s).sum()
    }

    fn touch(&mut self, variant: &VariantId) -> bool {
        if let Some(pos) = self.items.iter().position(|(i, _)| i == variant) {
            let item = self.items.remove(pos);
            self.items.insert(0, item);
            true
        } else {
            false
        }
    }

    fn insert(&mut self, variant: VariantId, size: u64) -> Option<Vec<VariantId>> {
        if self.items.iter().any(|(i, _)| i == &variant) {
            self.touch(&variant);
            return Some(vec![]);
        }
        if size > self.capacity {
            return None;
        }
        let mut evicted = vec![];
        while self.used() + size > self.capacity {
            evicted.push(self.items.pop().expect("non-empty").0);
        }
        self.items.insert(0, (variant, size));
        Some(evicted)
    }
}

/// Random mixed operations must produce identical contents, order, and
/// eviction sequences on both implementations.
pub fn lru_matches_naive_oracle(operations: usize, seed: u64) -> CheckResult {
    const NAME: &str = "lru-oracle";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let capacity = 30u64;
    let mut real = LruCache::new(capacity);
    let mut naive = NaiveLru {
        capacity,
        items: vec![],
    };
    for step in 0..operations {
        let variant = VariantId::new(rng.gen_range(1..25), rng.gen_range(1..5));
        match rng.gen_range(0..3) {
            0 => {
                let size = rng.gen_range(1..12);
                let got = real.insert(variant, size);
                let want = naive.insert(variant, size);
                let matches = match (got, want) {
                    (InsertOutcome::Stored { evicted }, Some(expected)) => evicted == expected,
                    (InsertOutcome::Uncacheable, None) => true,
                    _ => false,
                };
                if !matches {
                    return CheckResult::fail(NAME, format!("insert diverged at step {step}"));
                }
            }
            1 => {
                if real.touch(&variant) != naive.touch(&variant) {
                    return CheckResult::fail(NAME, format!("touch diverged at step {step}"));
                }
            }
            _ => {
                if real.contains(&variant) != naive.items.iter().any(|(i, _)| i == &variant) {
                    return CheckResult::fail(NAME, format!("contains diverged at step {step}"));
                }
            }
        }
        if real.used_bytes() > capacity || !real.verify_accounting() {
            return CheckResult::fail(NAME, format!("capacity accounting broke at step {step}"));
        }
        let real_order: Vec<(VariantId, u64)> = real.iter_mru().collect();
        if real_order != naive.items {
            return CheckResult::fail(NAME, format!("recency order diverged at step {step}"));
        }
    }
    CheckResult::pass(NAME, format!("{operations} mixed operations identical"))
}

// ---------------------------------------------------------------------------
// Processing ledger re-summation
// ---------------------------------------------------------------------------

pub fn ledger_load_resummation(seed: u64) -> CheckResult {
    const NAME: &str = "ledger-resummation";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1ed6e4);
    let mut ledger = crate::processing::ProcessingLedger::uniform(3, 40.0);
    for step in 0..5000u64 {
        if rng.gen_bool(0.6) {
            let _ = ledger.admit(
                rng.gen_range(1..=3),
                step,
                rng.gen_range(0.1..9.0),
                step as f64 + 60.0,
            );
        } else if step > 0 {
            ledger.release(rng.gen_range(0..step));
        }
        if !ledger.verify_accounting() {
            return CheckResult::fail(NAME, format!("drift detected at step {step}"));
        }
    }
    CheckResult::pass(NAME, "5000 admit/release steps, loads exact".into())
}

// ---------------------------------------------------------------------------
// Solver exactness on random instances
// ---------------------------------------------------------------------------

/// Build a random small scheduling instance (at most 3 servers, 3 levels,
/// 6 requests) in its detached option-table form.
#[allow(clippy::needless_range_loop)] // symmetric matrix fill needs both indices
pub fn random_solver_input(seed: u64) -> SolverInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let servers = rng.gen_range(1..=3u32);
    let levels = rng.gen_range(1..=3u8);
    let videos = rng.gen_range(1..=4u32);

    let mut bitrates = Vec::new();
    let mut b = rng.gen_range(8.0..40.0);
    for _ in 0..levels {
        bitrates.push(b);
        b += rng.gen_range(4.0..30.0);
    }
    let catalog = Catalog::new(videos, bitrates, 8.0).expect("valid random catalog");
    let params = CostParams::new(rng.gen_range(0.2..2.0)).expect("positive tau");
    let sizes = catalog.variant_sizes();
    let proc_costs: Vec<f64> = (1..=levels)
        .map(|l| params.transcode_cost(&catalog, l).expect("level in range"))
        .collect();

    let k = servers as usize;
    let mut pair = vec![vec![0.0; k]; k];
    for (j, row) in pair.iter_mut().enumerate() {
        row[j] = rng.gen_range(5.0..10.0);
    }
    for j in 0..k {
        for col in j + 1..k {
            let d = rng.gen_range(20.0..50.0);
            pair[j][col] = d;
            pair[col][j] = d;
        }
    }
    let origin: Vec<f64> = (0..k).map(|_| rng.gen_range(100.0..200.0)).collect();
    let topology = Topology::new(pair, origin).expect("valid random topology");

    let mut caches: Vec<LruCache> = (0..servers).map(|_| LruCache::new(u64::MAX)).collect();
    for cache in &mut caches {
        for video in 1..=videos {
            for level in 1..=levels {
                if rng.gen_bool(0.35) {
                    cache.insert(
                        VariantId::new(video, level),
                        sizes[level as usize - 1],
                    );
                }
            }
        }
    }

    let max_p = proc_costs.iter().cloned().fold(0.0, f64::max);
    let capacities: Vec<f64> = (0..servers)
        .map(|_| {
            if rng.gen_bool(0.4) {
                rng.gen_range(0.0..2.0 * max_p) // scarce: conflicts likely
            } else {
                rng.gen_range(2.0 * max_p..6.0 * max_p)
            }
        })
        .collect();

    let n = rng.gen_range(0..=6);
    let requests: Vec<Request> = (0..n)
        .map(|i| Request {
            id: i,
            home: rng.gen_range(1..=servers),
            variant: VariantId::new(rng.gen_range(1..=videos), rng.gen_range(1..=levels)),
            arrival_time: i as f64,
            duration: 60.0,
        })
        .collect();

    let instance = SchedulingInstance {
        requests,
        caches: &caches,
        topology: &topology,
        capacities: &capacities,
        sizes: &sizes,
        proc_costs: &proc_costs,
    };
    SolverInput::from_instance(&instance)
}

/// Branch-and-bound must reproduce the exhaustive objective exactly, and
/// both schedules must be feasible with an admissible root bound.
pub fn solver_exactness(instances: usize, seed: u64) -> CheckResult {
    const NAME: &str = "solver-exactness";
    for i in 0..instances {
        let input = random_solver_input(seed.wrapping_add(i as u64).wrapping_mul(0x9e3779b9));
        let exhaustive = match solve_exhaustive_options(&input) {
            Ok(s) => s,
            Err(e) => return CheckResult::fail(NAME, format!("oracle failed on {i}: {e}")),
        };
        let bnb = solve_bnb_options(&input);
        if bnb.objective != exhaustive.objective {
            return CheckResult::fail(
                NAME,
                format!(
                    "objective mismatch on instance {i}: bnb {} vs exhaustive {}",
                    bnb.objective, exhaustive.objective
                ),
            );
        }
        if !schedule_is_feasible(&input, &bnb) || !schedule_is_feasible(&input, &exhaustive) {
            return CheckResult::fail(NAME, format!("infeasible schedule on instance {i}"));
        }
        if root_lower_bound(&input) > exhaustive.objective {
            return CheckResult::fail(NAME, format!("inadmissible bound on instance {i}"));
        }
    }
    CheckResult::pass(NAME, format!("{instances} random instances, zero mismatches"))
}

// ---------------------------------------------------------------------------
// Workload fidelity
// ---------------------------------------------------------------------------

pub fn zipf_pmf_properties() -> CheckResult {
    const NAME: &str = "zipf-pmf";
    for &(v, alpha) in &[(3u32, 1.0f64), (100, 0.8), (1000, 0.8), (50, 0.0)] {
        let pmf = match zipf_pmf(v, alpha) {
            Ok(p) => p,
            Err(e) => return CheckResult::fail(NAME, e.to_string()),
        };
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return CheckResult::fail(NAME, format!("sum {sum} at V={v} alpha={alpha}"));
        }
        if !pmf.windows(2).all(|w| w[0] >= w[1]) {
            return CheckResult::fail(NAME, format!("not non-increasing at V={v}"));
        }
    }
    CheckResult::pass(NAME, "normalized and non-increasing".into())
}

fn default_workload(servers: u32, requests: u32) -> WorkloadParams {
    WorkloadParams {
        num_videos: 100,
        num_levels: 4,
        zipf_alpha: 0.8,
        arrival_rates_per_min: vec![8.0; servers as usize],
        requests_per_server: requests,
        video_length_s: 600.0,
        local_delay_range_ms: (5.0, 10.0),
        neighbor_delay_range_ms: (20.0, 50.0),
        origin_delay_range_ms: (100.0, 200.0),
    }
}

/// Chi-square fit of sampled videos against the Zipf pmf (V=100, 50k samples,
/// significance 0.01), variant-level uniformity within one percentage point,
/// and pooled inter-arrival mean within 2% of 60/lambda.
pub fn workload_statistics(seed: u64) -> CheckResult {
    const NAME: &str = "workload-statistics";
    let params = default_workload(3, 10_000);
    let trace = match generate_trace(&params, seed) {
        Ok(t) => t,
        Err(e) => return CheckResult::fail(NAME, e.to_string()),
    };

    // chi-square fit of 50k sampled popularity ranks against the target pmf,
    // drawn through the same inverse-CDF path the trace generator uses
    let samples = 50_000usize;
    let pmf = zipf_pmf(params.num_videos, params.zipf_alpha).expect("valid pmf");
    let ranks = crate::workload::sample_zipf_ranks(params.num_videos, params.zipf_alpha, samples, seed)
        .expect("valid params");
    let mut counts = vec![0usize; params.num_videos as usize];
    for rank in ranks {
        counts[rank] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(&pmf)
        .map(|(&obs, &q)| {
            let expected = samples as f64 * q;
            let d = obs as f64 - expected;
            d * d / expected
        })
        .sum();
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let critical = ChiSquared::new((params.num_videos - 1) as f64)
        .expect("valid dof")
        .inverse_cdf(0.99);
    if chi2 >= critical {
        return CheckResult::fail(
            NAME,
            format!("chi-square {chi2:.1} >= critical {critical:.1} on {samples} samples"),
        );
    }

    // variant uniformity within +-1% absolute over 30k requests
    let mut level_counts = [0usize; 4];
    for r in &trace {
        level_counts[r.variant.level as usize - 1] += 1;
    }
    for (level, &count) in level_counts.iter().enumerate() {
        let share = count as f64 / trace.len() as f64;
        if (share - 0.25).abs() > 0.01 {
            return CheckResult::fail(
                NAME,
                format!("level {} share {share:.4} strays from 0.25", level + 1),
            );
        }
    }

    // pooled per-server inter-arrival mean within 2% of 60/lambda
    let mut total = 0.0;
    let mut n = 0usize;
    for server in 1..=3u32 {
        let mut prev = 0.0;
        for r in trace.iter().filter(|r| r.home == server) {
            total += r.arrival_time - prev;
            prev = r.arrival_time;
            n += 1;
        }
    }
    let mean = total / n as f64;
    let expected = 60.0 / 8.0;
    if (mean - expected).abs() / expected > 0.02 {
        return CheckResult::fail(
            NAME,
            format!("inter-arrival mean {mean:.3} strays from {expected:.3}"),
        );
    }
    CheckResult::pass(
        NAME,
        format!("chi2 {chi2:.1} < {critical:.1}, levels uniform, inter-arrival mean {mean:.3}"),
    )
}

// ---------------------------------------------------------------------------
// Engine end-to-end checks
// ---------------------------------------------------------------------------

fn small_engine_spec(seed: u64) -> RunSpec {
    let catalog = Catalog::new(50, vec![1e5, 2e5, 3e5, 4e5], 120.0).expect("valid catalog");
    let params = CostParams::bitrate_equivalent(&catalog);
    RunSpec {
        params,
        workload: WorkloadParams {
            num_videos: 50,
            num_levels: 4,
            zipf_alpha: 0.8,
            arrival_rates_per_min: vec![12.0; 3],
            requests_per_server: 600,
            video_length_s: 120.0,
            local_delay_range_ms: (5.0, 10.0),
            neighbor_delay_range_ms: (20.0, 50.0),
            origin_delay_range_ms: (100.0, 200.0),
        },
        cache_capacity_bytes: catalog.library_size_bytes() / 10,
        catalog,
        processing_capacity: 5e5,
        policy: PolicyKind::Jccp {
            home_transcode: true,
        },
        seed,
        warmup_requests: 0,
    }
}

pub fn engine_replay_determinism(seed: u64) -> CheckResult {
    const NAME: &str = "engine-replay";
    let spec = small_engine_spec(seed);
    let a = match run(&spec) {
        Ok(out) => out,
        Err(e) => return CheckResult::fail(NAME, e.to_string()),
    };
    let b = run(&spec).expect("second run of identical spec");
    if a.report != b.report || a.log != b.log {
        return CheckResult::fail(NAME, "identical specs produced different outputs".into());
    }
    CheckResult::pass(NAME, format!("{} requests replayed identically", a.log.len()))
}

/// The report's total backhaul cost must equal a recomputation from the
/// exported decision log, exactly.
pub fn decision_log_cost_replay(seed: u64) -> CheckResult {
    const NAME: &str = "cost-replay";
    let spec = small_engine_spec(seed);
    let out = match run(&spec) {
        Ok(out) => out,
        Err(e) => return CheckResult::fail(NAME, e.to_string()),
    };
    let text = write_decision_log(&out.log);
    let parsed = match read_decision_log(&text) {
        Ok(p) => p,
        Err(e) => return CheckResult::fail(NAME, e.to_string()),
    };
    let topology = sample_topology(3, &spec.workload, spec.seed).expect("valid workload");
    let recomputed: f64 = parsed
        .iter()
        .map(|r| r.recompute_cost(&spec.catalog, &topology))
        .sum();
    if recomputed != out.report.total_backhaul_cost {
        return CheckResult::fail(
            NAME,
            format!(
                "log recomputation {} != report {}",
                recomputed, out.report.total_backhaul_cost
            ),
        );
    }
    CheckResult::pass(
        NAME,
        format!("cost {} reproduced from the log", out.report.total_backhaul_cost),
    )
}
