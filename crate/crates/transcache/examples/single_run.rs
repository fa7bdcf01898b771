//! Run one policy once and print its metrics report.
//!
//! ```bash
//! cargo run --example single_run
//! ```

use transcache::experiment::{run_single, ExperimentConfig, Overrides};
use transcache::policy::PolicyKind;

fn main() {
    // the default experiment, scaled down for a quick demo
    let config = ExperimentConfig::from_str(
        "videos = 200\nrequests_per_server = 3000\n",
        &Overrides::default(),
    )
    .expect("valid config");

    let policy = PolicyKind::Jccp {
        home_transcode: true,
    };
    let out = run_single(&config, policy, 1).expect("run succeeds");
    let r = &out.report;

    println!("policy            {}", policy.name());
    println!("requests          {}", r.total_requests);
    println!("hit ratio         {:.4}", r.hit_ratio);
    println!("avg access delay  {:.2} ms", r.avg_access_delay_ms);
    println!("origin traffic    {:.4} TB", r.external_traffic_tb());
    println!(
        "inter-server      {:.4} TB",
        r.inter_server_traffic_bytes as f64 / 1e12
    );
    println!("backhaul cost     {:.4e}", r.total_backhaul_cost);
    println!("simulated span    {:.0} s", r.horizon_s);
    println!();
    println!("decision mix:");
    println!("  local hit                    {}", r.counts.local_hit);
    println!("  local transcode              {}", r.counts.local_transcode);
    println!("  neighbor fetch               {}", r.counts.neighbor_fetch);
    println!(
        "  neighbor transcode at source {}",
        r.counts.neighbor_transcode_at_source
    );
    println!(
        "  neighbor transcode at home   {}",
        r.counts.neighbor_transcode_at_home
    );
    println!("  origin fetch                 {}", r.counts.origin_fetch);
    println!();
    println!("per-server processing utilization:");
    for (i, u) in r.utilization_per_server.iter().enumerate() {
        println!("  server {}: {:.4}", i + 1, u);
    }
}
