//! Processing utilization against cache size: utilization rises while
//! transcoding substitutes for misses, then falls once large caches hold
//! enough exact variants that fewer requests need transcoding at all.
//!
//! ```bash
//! cargo run --example utilization_vs_cache
//! ```

use transcache::experiment::{run_sweep, ExperimentConfig, Overrides};

fn main() {
    let config = ExperimentConfig::from_str(
        r#"
policies = ["jccp"]
videos = 300
requests_per_server = 3000
processing_capacity_mbps = 20.0
seeds = [1, 2, 3]
sweep_axis = "cache_fraction"
sweep_values = [0.05, 0.1, 0.2, 0.3, 0.4, 0.6]
"#,
        &Overrides::default(),
    )
    .expect("valid config");

    let results = run_sweep(&config, 0).expect("sweep runs");

    println!("{:>10} {:>12} {:>12}", "cache", "hit ratio", "proc util");
    for row in &results.summary {
        println!(
            "{:>9.0}% {:>12.4} {:>12.4}",
            row.cache_fraction * 100.0,
            row.hit_ratio.0,
            row.proc_util.0
        );
    }
}
