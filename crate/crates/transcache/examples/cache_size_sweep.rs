//! Sweep the per-server cache size (as a fraction of the library) across
//! all four policies and print the resulting summary CSV; the hit-ratio
//! column grows monotonically with cache size for every policy.
//!
//! ```bash
//! cargo run --example cache_size_sweep
//! ```

use transcache::experiment::{run_sweep, ExperimentConfig, Overrides};

fn main() {
    let config = ExperimentConfig::from_str(
        r#"
videos = 300
requests_per_server = 3000
seeds = [1, 2, 3]
sweep_axis = "cache_fraction"
sweep_values = [0.05, 0.1, 0.2, 0.3, 0.4]
"#,
        &Overrides::default(),
    )
    .expect("valid config");

    let results = run_sweep(&config, 0).expect("sweep runs");
    print!("{}", results.summary_csv());

    eprintln!(
        "\n{} runs total; re-run with identical inputs for byte-identical output",
        results.data.len()
    );
}
