//! Sweep the per-server transcoding capacity and watch the online policy
//! close the gap to the offline optimum as capacity grows.
//!
//! ```bash
//! cargo run --example processing_sweep
//! ```

use transcache::experiment::{run_sweep, ExperimentConfig, Overrides};

fn main() {
    let config = ExperimentConfig::from_str(
        r#"
policies = ["jccp", "offline"]
videos = 300
requests_per_server = 3000
seeds = [1, 2]
sweep_axis = "processing_capacity_mbps"
sweep_values = [2.5, 5.0, 10.0, 20.0, 40.0]
"#,
        &Overrides::default(),
    )
    .expect("valid config");

    let results = run_sweep(&config, 0).expect("sweep runs");

    println!(
        "{:>10} {:>12} {:>12} {:>10}",
        "P [Mb/s]", "jccp hit", "offline hit", "gap"
    );
    for &p in &[2.5, 5.0, 10.0, 20.0, 40.0] {
        let hit = |policy: &str| {
            results
                .summary
                .iter()
                .find(|r| r.policy == policy && r.sweep_value == Some(p))
                .map(|r| r.hit_ratio.0)
                .expect("summary row")
        };
        let jccp = hit("jccp");
        let offline = hit("offline");
        println!(
            "{:>10} {:>12.4} {:>12.4} {:>10.4}",
            p,
            jccp,
            offline,
            offline - jccp
        );
    }
}
