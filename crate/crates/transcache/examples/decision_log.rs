//! Export the per-request decision log of a run and recompute the report's
//! backhaul cost from it, independently and exactly.
//!
//! ```bash
//! cargo run --example decision_log
//! ```

use transcache::engine::{read_decision_log, write_decision_log};
use transcache::experiment::{run_single, ExperimentConfig, Overrides};
use transcache::policy::PolicyKind;
use transcache::workload::sample_topology;

fn main() {
    let config = ExperimentConfig::from_str(
        "videos = 100\nrequests_per_server = 1000\n",
        &Overrides::default(),
    )
    .expect("valid config");
    let policy = PolicyKind::Jccp {
        home_transcode: true,
    };
    let seed = 1;
    let out = run_single(&config, policy, seed).expect("run succeeds");

    let text = write_decision_log(&out.log);
    println!("decision log: {} lines; first ten:", out.log.len());
    for line in text.lines().take(11) {
        println!("  {line}");
    }

    // independent replay: parse the log and recompute each cost from the
    // topology and variant sizes
    let parsed = read_decision_log(&text).expect("own output parses");
    let catalog = config.catalog().expect("valid catalog");
    let spec = config.run_spec(policy, seed, None).expect("valid spec");
    let topology = sample_topology(config.servers, &spec.workload, seed).expect("valid workload");
    let recomputed: f64 = parsed
        .iter()
        .map(|r| r.recompute_cost(&catalog, &topology))
        .sum();

    println!("\nreport total backhaul cost: {}", out.report.total_backhaul_cost);
    println!("recomputed from the log:    {recomputed}");
    assert_eq!(recomputed, out.report.total_backhaul_cost);
    println!("exact match");
}
