//! Drive the exact offline scheduler directly: build a snapshot, enumerate
//! each request's serving options, solve with both the exhaustive oracle
//! and branch-and-bound, and print the schedule in its text form.
//!
//! ```bash
//! cargo run --example offline_solver
//! ```

use transcache::cache::LruCache;
use transcache::model::{Catalog, CostParams, Request, Topology, VariantId};
use transcache::offline::{
    enumerate_options, solve_bnb, solve_exhaustive, SchedulingInstance, SolverInput,
};

fn main() {
    // three servers; r = [1, 2, 3, 4] MB per level, p = level bitrate
    let catalog = Catalog::new(10, vec![1e5, 2e5, 3e5, 4e5], 80.0).expect("valid catalog");
    let params = CostParams::bitrate_equivalent(&catalog);
    let topology = Topology::new(
        vec![
            vec![5.0, 30.0, 40.0],
            vec![30.0, 6.0, 25.0],
            vec![40.0, 25.0, 7.0],
        ],
        vec![150.0, 160.0, 170.0],
    )
    .expect("valid topology");

    let mut caches: Vec<LruCache> = (0..3).map(|_| LruCache::new(u64::MAX)).collect();
    let mut seed_cache = |server: usize, video: u32, level: u8| {
        let size = catalog.variant_size(level).expect("level in range");
        caches[server - 1].insert(VariantId::new(video, level), size);
    };
    seed_cache(1, 1, 4); // home of request 0 holds a higher variant
    seed_cache(2, 1, 2); // neighbor holds the exact variant
    seed_cache(2, 2, 3);
    seed_cache(3, 2, 4);

    let requests: Vec<Request> = vec![
        Request {
            id: 0,
            home: 1,
            variant: VariantId::new(1, 2),
            arrival_time: 0.0,
            duration: 80.0,
        },
        Request {
            id: 1,
            home: 1,
            variant: VariantId::new(2, 1),
            arrival_time: 1.0,
            duration: 80.0,
        },
        Request {
            id: 2,
            home: 3,
            variant: VariantId::new(3, 3),
            arrival_time: 2.0,
            duration: 80.0,
        },
    ];

    let sizes = catalog.variant_sizes();
    let proc_costs: Vec<f64> = (1..=4)
        .map(|l| params.transcode_cost(&catalog, l).expect("level in range"))
        .collect();
    // tight capacity: roughly one transcode per server
    let capacities = vec![2.5e5; 3];
    let instance = SchedulingInstance {
        requests,
        caches: &caches,
        topology: &topology,
        capacities: &capacities,
        sizes: &sizes,
        proc_costs: &proc_costs,
    };

    println!("== per-request option tables ==");
    for request in &instance.requests {
        println!("request {} at server {}:", request.id, request.home);
        for opt in enumerate_options(request, &instance) {
            let load = match opt.load {
                Some((server, p)) => format!("load {p:.0} @ server {server}"),
                None => "no processing".into(),
            };
            println!(
                "  {:<40} cost {:>12.0}  ({load})",
                format!("{:?}", opt.decision),
                opt.cost
            );
        }
    }

    let oracle = solve_exhaustive(&instance).expect("small instance");
    let fast = solve_bnb(&instance);
    assert_eq!(oracle.objective, fast.objective);

    println!("\n== optimal schedule (objective {}) ==", fast.objective);
    let input = SolverInput::from_instance(&instance);
    print!("{}", fast.to_text(&input));

    println!("\n== instance in fixture form ==");
    print!("{}", input.to_text());
}
