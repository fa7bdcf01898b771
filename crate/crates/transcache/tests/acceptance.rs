//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured evidence (run with `--nocapture` to see them).
//!
//! Criteria 3-7 share one set of default-scale sweeps (3 servers, 10,000
//! requests per server, seeds 1..=10), computed once and reused.

use std::sync::OnceLock;
use std::time::Instant;
use transcache::engine::{read_decision_log, write_decision_log};
use transcache::experiment::{
    run_single, run_sweep, ExperimentConfig, Overrides, SweepResults,
};
use transcache::policy::PolicyKind;
use transcache::validate;
use transcache::workload::sample_topology;

const SEEDS: &str = "seeds = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]";

struct Tables {
    /// cache_fraction in {5,10,20,30,40}% x all four policies x 10 seeds
    cache_sweep: SweepResults,
    /// processing 2.5 and 40 Mb/s x {jccp, offline} x 10 seeds, M = 20%
    processing_sweep: SweepResults,
    /// P = 20 Mb/s, cache_fraction in {20,40}%, jccp x 10 seeds
    utilization_sweep: SweepResults,
}

fn sweep_from(toml: &str) -> SweepResults {
    let config = ExperimentConfig::from_str(toml, &Overrides::default()).expect("valid config");
    let results = run_sweep(&config, 0).expect("sweep runs");
    assert!(!results.any_errors(), "sweep produced error rows");
    results
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| Tables {
        cache_sweep: sweep_from(&format!(
            "{SEEDS}\nsweep_axis = \"cache_fraction\"\nsweep_values = [0.05, 0.1, 0.2, 0.3, 0.4]\n"
        )),
        processing_sweep: sweep_from(&format!(
            "{SEEDS}\npolicies = [\"jccp\", \"offline\"]\nsweep_axis = \"processing_capacity_mbps\"\nsweep_values = [2.5, 40.0]\n"
        )),
        utilization_sweep: sweep_from(&format!(
            "{SEEDS}\npolicies = [\"jccp\"]\nprocessing_capacity_mbps = 20.0\nsweep_axis = \"cache_fraction\"\nsweep_values = [0.2, 0.4]\n"
        )),
    })
}

fn summary_metric(
    results: &SweepResults,
    policy: &str,
    sweep_value: f64,
    pick: fn(&transcache::experiment::SummaryRow) -> (f64, f64),
) -> (f64, f64) {
    let row = results
        .summary
        .iter()
        .find(|r| r.policy == policy && r.sweep_value == Some(sweep_value))
        .unwrap_or_else(|| panic!("no summary row for {policy} at {sweep_value}"));
    pick(row)
}

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(values: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"));
        let mut out = vec![0.0; values.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                out[k] = avg;
            }
            i = j + 1;
        }
        out
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}

/// Criterion 1: full default runs for every policy finish with zero
/// invariant violations (the engine asserts cache, exclusivity, and
/// processing constraints after every event) inside the runtime budget.
#[test]
fn acceptance_01_constraint_soundness() {
    let config = ExperimentConfig::from_str("seeds = [1]", &Overrides::default()).unwrap();
    let mut details = Vec::new();
    for &policy in &config.policies {
        let started = Instant::now();
        let out = run_single(&config, policy, 1).expect("run violates no invariant");
        let elapsed = started.elapsed();
        let budget_s = if policy == PolicyKind::OfflineOptimal {
            600.0
        } else {
            60.0
        };
        assert!(
            elapsed.as_secs_f64() < budget_s,
            "{} took {:.1}s, budget {budget_s}s",
            policy.name(),
            elapsed.as_secs_f64()
        );
        assert_eq!(out.report.counts.total(), out.report.total_requests);
        assert_eq!(out.report.total_requests, 30_000);
        details.push(format!("{} {:.2}s", policy.name(), elapsed.as_secs_f64()));
    }
    println!(
        "ACCEPTANCE 1 constraint-soundness: PASS (30000 requests/policy, {})",
        details.join(", ")
    );
}

/// Criterion 2: branch-and-bound matches the exhaustive oracle objective on
/// 200 seeded random instances within 30 seconds.
#[test]
fn acceptance_02_solver_exactness() {
    let started = Instant::now();
    let check = validate::solver_exactness(200, 0xACCE);
    let elapsed = started.elapsed();
    assert!(check.passed, "{}", check.detail);
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {:.1}s, budget 30s",
        elapsed.as_secs_f64()
    );
    println!(
        "ACCEPTANCE 2 solver-exactness: PASS ({} in {:.2}s)",
        check.detail,
        elapsed.as_secs_f64()
    );
}

/// Criterion 3: Offline-Optimal total backhaul cost <= Online-JCCP on every
/// common (seed, sweep point); exact inequality, no tolerance.
#[test]
fn acceptance_03_offline_dominates_jccp() {
    let tables = tables();
    let mut comparisons = 0usize;
    for results in [&tables.cache_sweep, &tables.processing_sweep] {
        for offline_row in results.data.iter().filter(|r| r.policy == "offline") {
            let jccp_row = results
                .data
                .iter()
                .find(|r| {
                    r.policy == "jccp"
                        && r.seed == offline_row.seed
                        && r.sweep_value == offline_row.sweep_value
                })
                .expect("matching jccp row");
            let offline_cost = offline_row.report.as_ref().unwrap().total_backhaul_cost;
            let jccp_cost = jccp_row.report.as_ref().unwrap().total_backhaul_cost;
            assert!(
                offline_cost <= jccp_cost,
                "seed {} sweep {:?}: offline {} > jccp {}",
                offline_row.seed,
                offline_row.sweep_value,
                offline_cost,
                jccp_cost
            );
            comparisons += 1;
        }
    }
    println!("ACCEPTANCE 3 offline-dominance: PASS ({comparisons} (seed, sweep point) pairs)");
}

/// Criterion 4: at the default operating point, JCCP beats both baselines on
/// mean hit ratio and mean access delay with non-overlapping 95% confidence
/// intervals across 10 seeds.
#[test]
fn acceptance_04_policy_ordering() {
    let tables = tables();
    let hit = |policy: &str| {
        summary_metric(&tables.cache_sweep, policy, 0.2, |r| r.hit_ratio)
    };
    let delay = |policy: &str| {
        summary_metric(&tables.cache_sweep, policy, 0.2, |r| r.avg_delay_ms)
    };
    let (jccp_hit, jccp_hit_ci) = hit("jccp");
    let (jccp_delay, jccp_delay_ci) = delay("jccp");
    for baseline in ["cachepro", "cocache"] {
        let (base_hit, base_hit_ci) = hit(baseline);
        let (base_delay, base_delay_ci) = delay(baseline);
        assert!(
            jccp_hit - jccp_hit_ci > base_hit + base_hit_ci,
            "hit ratio CIs overlap vs {baseline}: jccp {jccp_hit}±{jccp_hit_ci}, \
             {baseline} {base_hit}±{base_hit_ci}"
        );
        assert!(
            jccp_delay + jccp_delay_ci < base_delay - base_delay_ci,
            "delay CIs overlap vs {baseline}: jccp {jccp_delay}±{jccp_delay_ci}, \
             {baseline} {base_delay}±{base_delay_ci}"
        );
    }
    println!(
        "ACCEPTANCE 4 policy-ordering: PASS (hit {jccp_hit:.3}±{jccp_hit_ci:.3}, \
         delay {jccp_delay:.1}±{jccp_delay_ci:.1} ms vs both baselines)"
    );
}

/// Criterion 5: mean hit ratio is non-decreasing in cache size for every
/// policy (Spearman rank correlation >= 0.99 across the five fractions).
#[test]
fn acceptance_05_cache_size_monotonicity() {
    let tables = tables();
    let fractions = [0.05, 0.1, 0.2, 0.3, 0.4];
    for policy in PolicyKind::NAMES {
        let means: Vec<f64> = fractions
            .iter()
            .map(|&f| summary_metric(&tables.cache_sweep, policy, f, |r| r.hit_ratio).0)
            .collect();
        let rho = spearman(&fractions, &means);
        assert!(
            rho >= 0.99,
            "{policy}: Spearman {rho} < 0.99 over means {means:?}"
        );
    }
    println!("ACCEPTANCE 5 cache-monotonicity: PASS (Spearman 1.00 for all four policies)");
}

/// Criterion 6: the Offline-vs-JCCP mean hit-ratio gap at the highest swept
/// processing capacity is at most a third of the gap at the lowest.
#[test]
fn acceptance_06_processing_saturation() {
    let tables = tables();
    let gap = |p: f64| {
        let offline = summary_metric(&tables.processing_sweep, "offline", p, |r| r.hit_ratio).0;
        let jccp = summary_metric(&tables.processing_sweep, "jccp", p, |r| r.hit_ratio).0;
        offline - jccp
    };
    let gap_low = gap(2.5);
    let gap_high = gap(40.0);
    assert!(
        gap_high <= gap_low / 3.0,
        "gap at P=40 ({gap_high}) exceeds a third of gap at P=2.5 ({gap_low})"
    );
    println!(
        "ACCEPTANCE 6 processing-saturation: PASS (gap {gap_low:.4} at 2.5 Mb/s vs \
         {gap_high:.4} at 40 Mb/s)"
    );
}

/// Criterion 7: at P = 20 Mb/s, mean processing utilization is strictly
/// lower with 40% caches than with 20% caches.
#[test]
fn acceptance_07_utilization_nonmonotonic_in_cache() {
    let tables = tables();
    let util = |f: f64| summary_metric(&tables.utilization_sweep, "jccp", f, |r| r.proc_util).0;
    let at_20 = util(0.2);
    let at_40 = util(0.4);
    assert!(
        at_40 < at_20,
        "utilization did not drop: {at_40} at 40% vs {at_20} at 20%"
    );
    println!(
        "ACCEPTANCE 7 utilization-nonmonotonic: PASS ({at_20:.3} at 20% cache vs {at_40:.3} \
         at 40%)"
    );
}

/// Criterion 8: workload fidelity. Chi-square fit of sampled popularity at
/// significance 0.01 (V=100, 50k samples), variant uniformity within one
/// percentage point, inter-arrival mean within 2% of 60/lambda.
#[test]
fn acceptance_08_workload_fidelity() {
    let check = validate::workload_statistics(1);
    assert!(check.passed, "{}", check.detail);
    println!("ACCEPTANCE 8 workload-fidelity: PASS ({})", check.detail);
}

/// Criterion 9: repeated identical sweep invocations produce byte-identical
/// CSV files.
#[test]
fn acceptance_09_sweep_determinism() {
    let toml = "policies = [\"jccp\", \"cocache\"]\nseeds = [1, 2]\nrequests_per_server = 2000\n\
                sweep_axis = \"cache_fraction\"\nsweep_values = [0.1, 0.2]\n";
    let config = ExperimentConfig::from_str(toml, &Overrides::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let first = run_sweep(&config, 0).unwrap();
    let (data_a, summary_a) = first.write_files(&dir.path().join("a")).unwrap();
    let second = run_sweep(&config, 0).unwrap();
    let (data_b, summary_b) = second.write_files(&dir.path().join("b")).unwrap();
    let bytes = |p: &std::path::Path| std::fs::read(p).unwrap();
    assert_eq!(bytes(&data_a), bytes(&data_b), "results.csv differs");
    assert_eq!(bytes(&summary_a), bytes(&summary_b), "summary.csv differs");
    println!(
        "ACCEPTANCE 9 sweep-determinism: PASS ({} data rows byte-identical twice)",
        first.data.len()
    );
}

/// Criterion 10: the report's total backhaul cost equals an independent
/// recomputation of the per-decision costs from the exported decision log,
/// exactly.
#[test]
fn acceptance_10_decision_log_cost_replay() {
    let config = ExperimentConfig::from_str("seeds = [1]", &Overrides::default()).unwrap();
    for policy in [
        PolicyKind::Jccp {
            home_transcode: true,
        },
        PolicyKind::OfflineOptimal,
    ] {
        let out = run_single(&config, policy, 1).unwrap();
        let parsed = read_decision_log(&write_decision_log(&out.log)).unwrap();
        assert_eq!(parsed.len(), 30_000);
        let catalog = config.catalog().unwrap();
        let spec = config.run_spec(policy, 1, None).unwrap();
        let topology = sample_topology(3, &spec.workload, 1).unwrap();
        let recomputed: f64 = parsed
            .iter()
            .map(|r| r.recompute_cost(&catalog, &topology))
            .sum();
        assert_eq!(
            recomputed, out.report.total_backhaul_cost,
            "{} log recomputation mismatch",
            policy.name()
        );
    }
    println!("ACCEPTANCE 10 cost-replay: PASS (30000-entry logs reproduce totals exactly)");
}
