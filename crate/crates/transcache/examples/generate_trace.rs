//! Generate a workload trace, export it to its text form, read it back, and
//! print distribution statistics.
//!
//! ```bash
//! cargo run --example generate_trace
//! ```

use transcache::workload::{
    generate_trace, popularity_permutation, read_trace, write_trace, zipf_pmf, WorkloadParams,
};

fn main() {
    let params = WorkloadParams {
        num_videos: 100,
        num_levels: 4,
        zipf_alpha: 0.8,
        arrival_rates_per_min: vec![8.0, 8.0, 8.0],
        requests_per_server: 5000,
        video_length_s: 600.0,
        local_delay_range_ms: (5.0, 10.0),
        neighbor_delay_range_ms: (20.0, 50.0),
        origin_delay_range_ms: (100.0, 200.0),
    };
    let seed = 42;
    let trace = generate_trace(&params, seed).expect("valid params");

    println!("generated {} requests over {:.0} s", trace.len(),
        trace.last().map(|r| r.arrival_time).unwrap_or(0.0));

    // per-server inter-arrival means (target: 60/8 = 7.5 s)
    for server in 1..=3u32 {
        let (mut prev, mut total, mut n) = (0.0, 0.0, 0usize);
        for r in trace.iter().filter(|r| r.home == server) {
            total += r.arrival_time - prev;
            prev = r.arrival_time;
            n += 1;
        }
        println!("server {server}: mean inter-arrival {:.3} s over {n} requests", total / n as f64);
    }

    // the permutation shuffles popularity per server; rank 1 should dominate
    let pmf = zipf_pmf(params.num_videos, params.zipf_alpha).expect("valid pmf");
    println!("\nzipf q_1 = {:.4}, q_2 = {:.4}, q_100 = {:.6}", pmf[0], pmf[1], pmf[99]);
    for server in 1..=3u32 {
        let perm = popularity_permutation(&params, seed, server);
        let top = trace
            .iter()
            .filter(|r| r.home == server)
            .fold(std::collections::HashMap::new(), |mut acc, r| {
                *acc.entry(r.variant.video).or_insert(0usize) += 1;
                acc
            })
            .into_iter()
            .max_by_key(|&(_, c)| c)
            .expect("non-empty");
        println!(
            "server {server}: rank-1 title is video {}, most-requested was video {} ({} times)",
            perm[0], top.0, top.1
        );
    }

    // round-trip through the line-oriented exchange form
    let text = write_trace(&trace);
    let back = read_trace(&text, params.video_length_s).expect("own output parses");
    assert_eq!(trace, back);
    println!("\nround-trip through text form: {} bytes, identical", text.len());
    println!("first lines:");
    for line in text.lines().take(4) {
        println!("  {line}");
    }
}
