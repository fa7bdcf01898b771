//! Compare all four policies on identical workloads (common random numbers:
//! every policy sees the same trace and topology per seed).
//!
//! ```bash
//! cargo run --example compare_policies
//! ```

use transcache::experiment::{run_sweep, ExperimentConfig, Overrides};

fn main() {
    let config = ExperimentConfig::from_str(
        "videos = 300\nrequests_per_server = 3000\nseeds = [1, 2, 3]\n",
        &Overrides::default(),
    )
    .expect("valid config");

    let results = run_sweep(&config, 0).expect("sweep runs");

    println!(
        "{:<10} {:>10} {:>14} {:>14} {:>12}",
        "policy", "hit ratio", "delay [ms]", "origin [TB]", "proc util"
    );
    for row in &results.summary {
        println!(
            "{:<10} {:>6.4}±{:.4} {:>9.2}±{:.2} {:>9.4}±{:.4} {:>12.4}",
            row.policy,
            row.hit_ratio.0,
            row.hit_ratio.1,
            row.avg_delay_ms.0,
            row.avg_delay_ms.1,
            row.external_traffic_tb.0,
            row.external_traffic_tb.1,
            row.proc_util.0,
        );
    }
    println!("\n(mean ± 95% half-width over {} seeds)", config.seeds.len());
}
