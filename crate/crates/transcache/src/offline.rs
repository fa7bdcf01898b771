//! Exact solver for the offline request-scheduling problem: pick one serving
//! path per in-flight request so that per-server processing capacity holds
//! and total backhaul cost is minimal, for a fixed cache snapshot.
//!
//! Two routes are provided. `solve_exhaustive` enumerates the full Cartesian
//! product of per-request options and serves as the validation oracle;
//! `solve_bnb` is a depth-first branch-and-bound over the same option tables
//! that scales to the active sets a simulation produces. The branch-and-bound
//! lower bound is the accumulated cost plus each unassigned request's
//! cheapest option ignoring processing, which never overestimates the true
//! completion cost.

use crate::cache::LruCache;
use crate::model::{Request, ServingDecision, Topology};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("option product {product:.3e} exceeds the exhaustive guard {limit:.1e}")]
    TooLarge { product: f64, limit: f64 },
    #[error("no feasible schedule")]
    Infeasible,
    #[error("fixture parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A snapshot of the system at one instant: the in-flight requests, what each
/// server caches, and the per-level size/processing tables.
#[derive(Debug, Clone)]
pub struct SchedulingInstance<'a> {
    pub requests: Vec<Request>,
    pub caches: &'a [LruCache],
    pub topology: &'a Topology,
    /// Processing capacity per server, index `server-1`.
    pub capacities: &'a [f64],
    /// Variant size r_l per level, index `level-1`.
    pub sizes: &'a [u64],
    /// Transcode load p_l per level, index `level-1`.
    pub proc_costs: &'a [f64],
}

/// One admissible way to serve one request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleOption {
    pub decision: ServingDecision,
    pub cost: f64,
    /// `(server, p_l)` consumed while streaming, for transcode paths.
    pub load: Option<(u32, f64)>,
}

/// Option table for one request, the solver's working form.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestOptions {
    pub request_id: u64,
    pub home: u32,
    pub options: Vec<ScheduleOption>,
}

/// Owned, serializable solver input: per-request option tables plus
/// capacities. Detached from cache/topology state so instances can be kept
/// as regression fixtures.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverInput {
    pub capacities: Vec<f64>,
    pub requests: Vec<RequestOptions>,
}

/// One decision per request (aligned with the input order) and the total
/// backhaul cost, summed in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub decisions: Vec<ServingDecision>,
    pub objective: f64,
}

/// Every serving path the snapshot admits for `request`, in a fixed order:
/// local hit, local transcode, neighbor fetches (ascending server), neighbor
/// transcodes at the source, neighbor transcodes at home, origin. The origin
/// option is always present, so no request is ever infeasible.
pub fn enumerate_options(request: &Request, inst: &SchedulingInstance) -> Vec<ScheduleOption> {
    let j = request.home;
    let v = request.variant;
    let r_l = inst.sizes[v.level as usize - 1] as f64;
    let p_l = inst.proc_costs[v.level as usize - 1];
    let cache = |k: u32| &inst.caches[k as usize - 1];
    let mut options = Vec::new();

    if cache(j).contains(&v) {
        options.push(ScheduleOption {
            decision: ServingDecision::LocalHit,
            cost: 0.0,
            load: None,
        });
    }
    if let Some(from_level) = cache(j).closest_transcodable(&v) {
        options.push(ScheduleOption {
            decision: ServingDecision::LocalTranscode { from_level },
            cost: 0.0,
            load: Some((j, p_l)),
        });
    }
    for k in inst.topology.neighbors(j) {
        if cache(k).contains(&v) {
            options.push(ScheduleOption {
                decision: ServingDecision::NeighborFetch { source: k },
                cost: r_l * inst.topology.neighbor_cost(j, k),
                load: None,
            });
        }
    }
    for k in inst.topology.neighbors(j) {
        if let Some(from_level) = cache(k).closest_transcodable(&v) {
            options.push(ScheduleOption {
                decision: ServingDecision::NeighborTranscodeAtSource {
                    source: k,
                    from_level,
                },
                cost: r_l * inst.topology.neighbor_cost(j, k),
                load: Some((k, p_l)),
            });
        }
    }
    for k in inst.topology.neighbors(j) {
        if let Some(from_level) = cache(k).closest_transcodable(&v) {
            options.push(ScheduleOption {
                decision: ServingDecision::NeighborTranscodeAtHome {
                    source: k,
                    from_level,
                },
                cost: r_l * inst.topology.neighbor_cost(j, k),
                load: Some((j, p_l)),
            });
        }
    }
    options.push(ScheduleOption {
        decision: ServingDecision::OriginFetch,
        cost: r_l * inst.topology.origin_cost(j),
        load: None,
    });
    options
}

impl SolverInput {
    pub fn from_instance(inst: &SchedulingInstance) -> Self {
        Self {
            capacities: inst.capacities.to_vec(),
            requests: inst
                .requests
                .iter()
                .map(|r| RequestOptions {
                    request_id: r.id,
                    home: r.home,
                    options: enumerate_options(r, inst),
                })
                .collect(),
        }
    }
}

/// Objective summed canonically (input order), so both solvers agree exactly.
fn canonical_objective(requests: &[RequestOptions], chosen: &[usize]) -> f64 {
    requests
        .iter()
        .zip(chosen)
        .map(|(r, &idx)| r.options[idx].cost)
        .sum()
}

fn schedule_from(input: &SolverInput, chosen: &[usize]) -> Schedule {
    Schedule {
        decisions: input
            .requests
            .iter()
            .zip(chosen)
            .map(|(r, &idx)| r.options[idx].decision)
            .collect(),
        objective: canonical_objective(&input.requests, chosen),
    }
}

const EXHAUSTIVE_GUARD: f64 = 1e7;

/// Enumerate the full Cartesian product of options, filtered by per-server
/// processing feasibility, and return a minimum-cost schedule (ties broken by
/// lexicographic option index). Guarded to instances with at most 1e7
/// combinations.
pub fn solve_exhaustive(inst: &SchedulingInstance) -> Result<Schedule, SolveError> {
    solve_exhaustive_options(&SolverInput::from_instance(inst))
}

pub fn solve_exhaustive_options(input: &SolverInput) -> Result<Schedule, SolveError> {
    let product: f64 = input
        .requests
        .iter()
        .map(|r| r.options.len() as f64)
        .product();
    if product > EXHAUSTIVE_GUARD {
        return Err(SolveError::TooLarge {
            product,
            limit: EXHAUSTIVE_GUARD,
        });
    }

    let n = input.requests.len();
    let mut loads = vec![0.0; input.capacities.len()];
    let mut chosen = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;

    fn dfs(
        depth: usize,
        acc: f64,
        input: &SolverInput,
        loads: &mut [f64],
        chosen: &mut [usize],
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        if depth == input.requests.len() {
            if best.as_ref().is_none_or(|(b, _)| acc < *b) {
                *best = Some((acc, chosen.to_vec()));
            }
            return;
        }
        for (idx, opt) in input.requests[depth].options.iter().enumerate() {
            if let Some((server, p)) = opt.load {
                let s = server as usize - 1;
                if loads[s] + p > input.capacities[s] {
                    continue;
                }
                loads[s] += p;
                chosen[depth] = idx;
                dfs(depth + 1, acc + opt.cost, input, loads, chosen, best);
                loads[s] -= p;
            } else {
                chosen[depth] = idx;
                dfs(depth + 1, acc + opt.cost, input, loads, chosen, best);
            }
        }
    }

    dfs(0, 0.0, input, &mut loads, &mut chosen, &mut best);
    match best {
        Some((_, chosen)) => Ok(schedule_from(input, &chosen)),
        None => Err(SolveError::Infeasible),
    }
}

/// Depth-first branch-and-bound. Requests whose cheapest option consumes no
/// processing are fixed outright (always part of some optimum); the rest are
/// searched in descending regret order (origin cost minus cheapest cost),
/// seeded with a greedy feasible incumbent, pruning nodes whose lower bound
/// cannot beat it. Always returns a schedule: the origin option keeps every
/// instance feasible.
pub fn solve_bnb(inst: &SchedulingInstance) -> Schedule {
    solve_bnb_options(&SolverInput::from_instance(inst))
}

pub fn solve_bnb_options(input: &SolverInput) -> Schedule {
    let n = input.requests.len();
    let mut chosen = vec![usize::MAX; n];
    let mut loads = vec![0.0; input.capacities.len()];

    // Fix requests whose cheapest option is load-free: taking it can neither
    // raise the objective nor consume capacity.
    let mut open = Vec::new();
    for (i, req) in input.requests.iter().enumerate() {
        let min_cost = req
            .options
            .iter()
            .map(|o| o.cost)
            .fold(f64::INFINITY, f64::min);
        if let Some(idx) = req
            .options
            .iter()
            .position(|o| o.cost == min_cost && o.load.is_none())
        {
            chosen[i] = idx;
        } else {
            open.push(i);
        }
    }

    if !open.is_empty() {
        // Option order within a request: cheapest first, original index on
        // ties. Search order across requests: largest regret first.
        let sorted_options: Vec<Vec<usize>> = open
            .iter()
            .map(|&i| {
                let opts = &input.requests[i].options;
                let mut order: Vec<usize> = (0..opts.len()).collect();
                order.sort_by(|&a, &b| {
                    opts[a]
                        .cost
                        .partial_cmp(&opts[b].cost)
                        .expect("finite costs")
                        .then(a.cmp(&b))
                });
                order
            })
            .collect();
        let min_cost: Vec<f64> = open
            .iter()
            .zip(&sorted_options)
            .map(|(&i, order)| input.requests[i].options[order[0]].cost)
            .collect();
        let regret: Vec<f64> = open
            .iter()
            .zip(&min_cost)
            .map(|(&i, &mc)| {
                let origin = input.requests[i]
                    .options
                    .last()
                    .expect("origin option always present")
                    .cost;
                origin - mc
            })
            .collect();
        let mut order: Vec<usize> = (0..open.len()).collect();
        order.sort_by(|&a, &b| {
            regret[b]
                .partial_cmp(&regret[a])
                .expect("finite costs")
                .then(open[a].cmp(&open[b]))
        });

        // suffix[d] = sum of cheapest costs of requests at search depths >= d
        let mut suffix = vec![0.0; order.len() + 1];
        for d in (0..order.len()).rev() {
            suffix[d] = suffix[d + 1] + min_cost[order[d]];
        }

        // Greedy incumbent: cheapest feasible option in search order.
        let mut greedy = vec![0usize; order.len()];
        let mut greedy_cost = 0.0;
        {
            let mut g_loads = loads.clone();
            for (d, &oi) in order.iter().enumerate() {
                let req = &input.requests[open[oi]];
                let idx = sorted_options[oi]
                    .iter()
                    .copied()
                    .find(|&idx| match req.options[idx].load {
                        None => true,
                        Some((server, p)) => {
                            let s = server as usize - 1;
                            g_loads[s] + p <= input.capacities[s]
                        }
                    })
                    .expect("origin option is always feasible");
                if let Some((server, p)) = req.options[idx].load {
                    g_loads[server as usize - 1] += p;
                }
                greedy[d] = idx;
                greedy_cost += req.options[idx].cost;
            }
        }

        struct Search<'a> {
            input: &'a SolverInput,
            open: &'a [usize],
            order: &'a [usize],
            sorted_options: &'a [Vec<usize>],
            suffix: &'a [f64],
            assignment: Vec<usize>,
            best_assignment: Vec<usize>,
            best_cost: f64,
        }

        impl Search<'_> {
            fn dfs(&mut self, depth: usize, acc: f64, loads: &mut [f64]) {
                if acc + self.suffix[depth] >= self.best_cost {
                    return;
                }
                if depth == self.order.len() {
                    self.best_cost = acc;
                    self.best_assignment.copy_from_slice(&self.assignment);
                    return;
                }
                let oi = self.order[depth];
                let req = &self.input.requests[self.open[oi]];
                for &idx in &self.sorted_options[oi] {
                    let opt = &req.options[idx];
                    // options are cost-sorted: once one busts the bound, all
                    // later ones do too
                    if acc + opt.cost + self.suffix[depth + 1] >= self.best_cost {
                        break;
                    }
                    match opt.load {
                        Some((server, p)) => {
                            let s = server as usize - 1;
                            if loads[s] + p > self.input.capacities[s] {
                                continue;
                            }
                            loads[s] += p;
                            self.assignment[oi] = idx;
                            self.dfs(depth + 1, acc + opt.cost, loads);
                            loads[s] -= p;
                        }
                        None => {
                            self.assignment[oi] = idx;
                            self.dfs(depth + 1, acc + opt.cost, loads);
                        }
                    }
                }
            }
        }

        let mut search = Search {
            input,
            open: &open,
            order: &order,
            sorted_options: &sorted_options,
            suffix: &suffix,
            assignment: vec![0; open.len()],
            best_assignment: {
                // greedy stored in search order; convert to per-open indexing
                let mut by_open = vec![0usize; open.len()];
                for (d, &oi) in order.iter().enumerate() {
                    by_open[oi] = greedy[d];
                }
                by_open
            },
            best_cost: greedy_cost,
        };
        search.dfs(0, 0.0, &mut loads);
        for (oi, &i) in open.iter().enumerate() {
            chosen[i] = search.best_assignment[oi];
        }
    }

    schedule_from(input, &chosen)
}

/// Check exclusivity (structural) and per-server processing feasibility of a
/// schedule against its input.
pub fn schedule_is_feasible(input: &SolverInput, schedule: &Schedule) -> bool {
    if schedule.decisions.len() != input.requests.len() {
        return false;
    }
    let mut loads = vec![0.0; input.capacities.len()];
    for (req, decision) in input.requests.iter().zip(&schedule.decisions) {
        let Some(opt) = req.options.iter().find(|o| o.decision == *decision) else {
            return false;
        };
        if let Some((server, p)) = opt.load {
            loads[server as usize - 1] += p;
        }
    }
    loads
        .iter()
        .zip(&input.capacities)
        .all(|(load, cap)| load <= cap)
}

/// Root lower bound of the branch-and-bound: the sum of each request's
/// cheapest option, ignoring processing.
pub fn root_lower_bound(input: &SolverInput) -> f64 {
    input
        .requests
        .iter()
        .map(|r| {
            r.options
                .iter()
                .map(|o| o.cost)
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Line-oriented fixture format
// ---------------------------------------------------------------------------

fn format_decision(decision: &ServingDecision) -> String {
    match decision {
        ServingDecision::LocalHit => "local_hit".into(),
        ServingDecision::LocalTranscode { from_level } => {
            format!("local_transcode from {from_level}")
        }
        ServingDecision::NeighborFetch { source } => format!("neighbor_fetch source {source}"),
        ServingDecision::NeighborTranscodeAtSource { source, from_level } => {
            format!("neighbor_transcode_at_source source {source} from {from_level}")
        }
        ServingDecision::NeighborTranscodeAtHome { source, from_level } => {
            format!("neighbor_transcode_at_home source {source} from {from_level}")
        }
        ServingDecision::OriginFetch => "origin_fetch".into(),
    }
}

fn parse_decision(tokens: &[&str], line: usize) -> Result<ServingDecision, SolveError> {
    let err = |message: &str| SolveError::Parse {
        line,
        message: message.into(),
    };
    let field = |key: &str| -> Option<&str> {
        tokens
            .iter()
            .position(|&t| t == key)
            .and_then(|i| tokens.get(i + 1).copied())
    };
    let source = || -> Result<u32, SolveError> {
        field("source")
            .ok_or_else(|| err("missing source"))?
            .parse()
            .map_err(|_| err("bad source"))
    };
    let from = || -> Result<u8, SolveError> {
        field("from")
            .ok_or_else(|| err("missing from level"))?
            .parse()
            .map_err(|_| err("bad from level"))
    };
    match *tokens.first().ok_or_else(|| err("empty decision"))? {
        "local_hit" => Ok(ServingDecision::LocalHit),
        "local_transcode" => Ok(ServingDecision::LocalTranscode { from_level: from()? }),
        "neighbor_fetch" => Ok(ServingDecision::NeighborFetch { source: source()? }),
        "neighbor_transcode_at_source" => Ok(ServingDecision::NeighborTranscodeAtSource {
            source: source()?,
            from_level: from()?,
        }),
        "neighbor_transcode_at_home" => Ok(ServingDecision::NeighborTranscodeAtHome {
            source: source()?,
            from_level: from()?,
        }),
        "origin_fetch" => Ok(ServingDecision::OriginFetch),
        other => Err(err(&format!("unknown decision kind {other}"))),
    }
}

impl SolverInput {
    /// Serialize to the line-oriented fixture form: capacities, then one
    /// option table per request.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("servers {}\n", self.capacities.len()));
        for (i, cap) in self.capacities.iter().enumerate() {
            out.push_str(&format!("capacity {} {}\n", i + 1, cap));
        }
        for req in &self.requests {
            out.push_str(&format!("request {} home {}\n", req.request_id, req.home));
            for opt in &req.options {
                out.push_str(&format!(
                    "option {} cost {}",
                    format_decision(&opt.decision),
                    opt.cost
                ));
                if let Some((server, p)) = opt.load {
                    out.push_str(&format!(" load {server} {p}"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SolveError> {
        let err = |line: usize, message: &str| SolveError::Parse {
            line,
            message: message.into(),
        };
        let mut capacities: Vec<f64> = Vec::new();
        let mut requests: Vec<RequestOptions> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            match tokens.as_slice() {
                [] => continue,
                [word, ..] if word.starts_with('#') => continue,
                ["servers", n] => {
                    let n: usize = n.parse().map_err(|_| err(line, "bad server count"))?;
                    capacities = vec![0.0; n];
                }
                ["capacity", server, value] => {
                    let s: usize = server.parse().map_err(|_| err(line, "bad server"))?;
                    if s == 0 || s > capacities.len() {
                        return Err(err(line, "capacity server out of range"));
                    }
                    capacities[s - 1] =
                        value.parse().map_err(|_| err(line, "bad capacity value"))?;
                }
                ["request", id, "home", home] => {
                    requests.push(RequestOptions {
                        request_id: id.parse().map_err(|_| err(line, "bad request id"))?,
                        home: home.parse().map_err(|_| err(line, "bad home server"))?,
                        options: vec![],
                    });
                }
                ["option", rest @ ..] => {
                    let req = requests
                        .last_mut()
                        .ok_or_else(|| err(line, "option before any request"))?;
                    let cost_pos = rest
                        .iter()
                        .position(|&t| t == "cost")
                        .ok_or_else(|| err(line, "option missing cost"))?;
                    let decision = parse_decision(&rest[..cost_pos], line)?;
                    let cost: f64 = rest
                        .get(cost_pos + 1)
                        .ok_or_else(|| err(line, "option missing cost value"))?
                        .parse()
                        .map_err(|_| err(line, "bad cost"))?;
                    let load = match rest.iter().position(|&t| t == "load") {
                        Some(pos) => {
                            let server: u32 = rest
                                .get(pos + 1)
                                .ok_or_else(|| err(line, "load missing server"))?
                                .parse()
                                .map_err(|_| err(line, "bad load server"))?;
                            let p: f64 = rest
                                .get(pos + 2)
                                .ok_or_else(|| err(line, "load missing value"))?
                                .parse()
                                .map_err(|_| err(line, "bad load value"))?;
                            Some((server, p))
                        }
                        None => None,
                    };
                    req.options.push(ScheduleOption {
                        decision,
                        cost,
                        load,
                    });
                }
                _ => return Err(err(line, &format!("unrecognized line: {raw}"))),
            }
        }
        Ok(Self {
            capacities,
            requests,
        })
    }
}

impl Schedule {
    /// One `decision` line per request, preceded by the objective.
    pub fn to_text(&self, input: &SolverInput) -> String {
        let mut out = format!("objective {}\n", self.objective);
        for (req, decision) in input.requests.iter().zip(&self.decisions) {
            out.push_str(&format!(
                "decision {} {}\n",
                req.request_id,
                format_decision(decision)
            ));
        }
        out
    }

    /// Parse a schedule for `input` (decisions matched back by request id).
    pub fn parse(text: &str, input: &SolverInput) -> Result<Self, SolveError> {
        let err = |line: usize, message: &str| SolveError::Parse {
            line,
            message: message.into(),
        };
        let mut objective = None;
        let mut by_id = std::collections::HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            match tokens.as_slice() {
                [] => continue,
                [word, ..] if word.starts_with('#') => continue,
                ["objective", value] => {
                    objective =
                        Some(value.parse().map_err(|_| err(line, "bad objective"))?);
                }
                ["decision", id, rest @ ..] => {
                    let id: u64 = id.parse().map_err(|_| err(line, "bad request id"))?;
                    by_id.insert(id, parse_decision(rest, line)?);
                }
                _ => return Err(err(line, &format!("unrecognized line: {raw}"))),
            }
        }
        let decisions = input
            .requests
            .iter()
            .map(|r| {
                by_id
                    .get(&r.request_id)
                    .copied()
                    .ok_or_else(|| err(0, &format!("missing decision for request {}", r.request_id)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            decisions,
            objective: objective.ok_or_else(|| err(0, "missing objective"))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Catalog, VariantId};

    fn topology3() -> Topology {
        Topology::new(
            vec![
                vec![5.0, 30.0, 40.0],
                vec![30.0, 6.0, 25.0],
                vec![40.0, 25.0, 7.0],
            ],
            vec![150.0, 160.0, 170.0],
        )
        .unwrap()
    }

    fn catalog4() -> Catalog {
        // r = [1, 2, 3, 4] bytes
        Catalog::new(10, vec![1.0, 2.0, 3.0, 4.0], 8.0).unwrap()
    }

    struct Fixture {
        caches: Vec<LruCache>,
        topology: Topology,
        capacities: Vec<f64>,
        sizes: Vec<u64>,
        proc_costs: Vec<f64>,
    }

    impl Fixture {
        fn new(capacity: f64) -> Self {
            let catalog = catalog4();
            Self {
                caches: (0..3).map(|_| LruCache::new(u64::MAX)).collect(),
                topology: topology3(),
                capacities: vec![capacity; 3],
                sizes: catalog.variant_sizes(),
                // p_l = 2 * r_l
                proc_costs: catalog.variant_sizes().iter().map(|&r| 2.0 * r as f64).collect(),
            }
        }

        fn cache(&mut self, server: u32, video: u32, level: u8) {
            let size = self.sizes[level as usize - 1];
            self.caches[server as usize - 1].insert(VariantId::new(video, level), size);
        }

        fn instance(&self, requests: Vec<Request>) -> SchedulingInstance<'_> {
            SchedulingInstance {
                requests,
                caches: &self.caches,
                topology: &self.topology,
                capacities: &self.capacities,
                sizes: &self.sizes,
                proc_costs: &self.proc_costs,
            }
        }
    }

    fn request(id: u64, home: u32, video: u32, level: u8) -> Request {
        Request {
            id,
            home,
            variant: VariantId::new(video, level),
            arrival_time: 0.0,
            duration: 8.0,
        }
    }

    #[test]
    fn empty_snapshot_only_offers_origin() {
        let fixture = Fixture::new(100.0);
        let inst = fixture.instance(vec![request(1, 1, 5, 2)]);
        let options = enumerate_options(&inst.requests[0], &inst);
        assert_eq!(options.len(), 1);
        assert_eq!(options[0].decision, ServingDecision::OriginFetch);
        assert_eq!(options[0].cost, 2.0 * 150.0);
        assert_eq!(options[0].load, None);
    }

    #[test]
    fn full_snapshot_offers_every_family() {
        let mut fixture = Fixture::new(100.0);
        fixture.cache(1, 5, 2); // home exact
        fixture.cache(2, 5, 2); // neighbor exact
        fixture.cache(2, 5, 4); // neighbor higher
        let inst = fixture.instance(vec![request(1, 1, 5, 2)]);
        let kinds: Vec<&str> = enumerate_options(&inst.requests[0], &inst)
            .iter()
            .map(|o| o.decision.kind_name())
            .collect();
        assert_eq!(
            kinds,
            vec![
                "local_hit",
                "neighbor_fetch",
                "neighbor_transcode_at_source",
                "neighbor_transcode_at_home",
                "origin_fetch"
            ]
        );
    }

    #[test]
    fn lower_level_entries_yield_no_option() {
        let mut fixture = Fixture::new(100.0);
        fixture.cache(1, 5, 1); // below the requested level: transcoding only goes down
        let inst = fixture.instance(vec![request(1, 1, 5, 2)]);
        let options = enumerate_options(&inst.requests[0], &inst);
        assert_eq!(options.len(), 1);
        assert_eq!(options[0].decision, ServingDecision::OriginFetch);
    }

    #[test]
    fn exhaustive_picks_cheaper_neighbor_over_origin() {
        let mut fixture = Fixture::new(100.0);
        fixture.cache(2, 5, 2);
        let inst = fixture.instance(vec![request(1, 1, 5, 2)]);
        let schedule = solve_exhaustive(&inst).unwrap();
        // neighbor fetch at 2*30 = 60 beats origin at 2*150 = 300
        assert_eq!(schedule.objective, 60.0);
        assert_eq!(
            schedule.decisions,
            vec![ServingDecision::NeighborFetch { source: 2 }]
        );
    }

    #[test]
    fn exhaustive_zero_requests_is_empty_schedule() {
        let fixture = Fixture::new(100.0);
        let inst = fixture.instance(vec![]);
        let schedule = solve_exhaustive(&inst).unwrap();
        assert!(schedule.decisions.is_empty());
        assert_eq!(schedule.objective, 0.0);
        assert_eq!(solve_bnb(&inst).objective, 0.0);
    }

    #[test]
    fn capacity_conflict_resolved_by_enumeration() {
        // two requests both want a local transcode of p = 6 at server 1 with
        // P = 10: only one fits; the other's next-cheapest option wins
        let mut fixture = Fixture::new(10.0);
        fixture.proc_costs = vec![2.0, 6.0, 6.0, 8.0];
        fixture.cache(1, 5, 4);
        fixture.cache(1, 6, 4);
        let inst = fixture.instance(vec![request(1, 1, 5, 2), request(2, 1, 6, 2)]);
        let input = SolverInput::from_instance(&inst);

        // independent oracle: enumerate the 2x2 local-transcode/origin grid
        let origin_cost = 2.0 * 150.0;
        let mut best = f64::INFINITY;
        for a_transcodes in [true, false] {
            for b_transcodes in [true, false] {
                if a_transcodes && b_transcodes {
                    continue; // 6 + 6 > 10
                }
                let cost = if a_transcodes { 0.0 } else { origin_cost }
                    + if b_transcodes { 0.0 } else { origin_cost };
                best = best.min(cost);
            }
        }
        assert_eq!(best, origin_cost);

        let exhaustive = solve_exhaustive_options(&input).unwrap();
        let bnb = solve_bnb_options(&input);
        assert_eq!(exhaustive.objective, best);
        assert_eq!(bnb.objective, best);
        assert!(schedule_is_feasible(&input, &exhaustive));
        assert!(schedule_is_feasible(&input, &bnb));
    }

    #[test]
    fn greedy_per_request_minimum_is_beaten_by_search() {
        // Request A can transcode at server 1 (cost 0) or fetch from a
        // neighbor (cost 60). Request B can only transcode at server 1 (cost
        // 0) or go to origin (cost 300). Greedy gives A the capacity first
        // and forces B to origin (total 300); optimal diverts A to the
        // neighbor fetch (total 60).
        let mut fixture = Fixture::new(6.0);
        fixture.proc_costs = vec![2.0, 6.0, 6.0, 8.0];
        fixture.cache(1, 5, 4); // A local transcode source
        fixture.cache(2, 5, 2); // A neighbor exact
        fixture.cache(1, 6, 4); // B local transcode source
        let inst = fixture.instance(vec![request(1, 1, 5, 2), request(2, 1, 6, 2)]);
        let input = SolverInput::from_instance(&inst);

        let exhaustive = solve_exhaustive_options(&input).unwrap();
        let bnb = solve_bnb_options(&input);
        assert_eq!(exhaustive.objective, 60.0);
        assert_eq!(bnb.objective, 60.0);
        assert_eq!(
            bnb.decisions[0],
            ServingDecision::NeighborFetch { source: 2 }
        );
        assert_eq!(
            bnb.decisions[1],
            ServingDecision::LocalTranscode { from_level: 4 }
        );
    }

    #[test]
    fn all_empty_caches_means_all_origin() {
        let fixture = Fixture::new(100.0);
        let requests = vec![request(1, 1, 5, 2), request(2, 2, 6, 1), request(3, 3, 7, 4)];
        let inst = fixture.instance(requests);
        let schedule = solve_bnb(&inst);
        assert!(schedule
            .decisions
            .iter()
            .all(|d| *d == ServingDecision::OriginFetch));
        // sum of r_l * d_j0
        assert_eq!(schedule.objective, 2.0 * 150.0 + 1.0 * 160.0 + 4.0 * 170.0);
    }

    #[test]
    fn exhaustive_guard_refuses_huge_products() {
        let mut fixture = Fixture::new(1e9);
        for video in 1..=9 {
            for server in 1..=3 {
                fixture.cache(server, video, 2);
                fixture.cache(server, video, 3);
                fixture.cache(server, video, 4);
            }
        }
        // 25 requests x ~10 options each > 1e7 combinations
        let requests: Vec<Request> = (0..25)
            .map(|i| request(i, (i % 3 + 1) as u32, (i % 9 + 1) as u32, 1))
            .collect();
        let inst = fixture.instance(requests);
        assert!(matches!(
            solve_exhaustive(&inst),
            Err(SolveError::TooLarge { .. })
        ));
        // branch-and-bound still solves it
        let schedule = solve_bnb(&inst);
        assert!(schedule_is_feasible(
            &SolverInput::from_instance(&inst),
            &schedule
        ));
    }

    #[test]
    fn root_bound_never_exceeds_optimum() {
        let mut fixture = Fixture::new(10.0);
        fixture.proc_costs = vec![2.0, 6.0, 6.0, 8.0];
        fixture.cache(1, 5, 4);
        fixture.cache(1, 6, 4);
        let inst = fixture.instance(vec![request(1, 1, 5, 2), request(2, 1, 6, 2)]);
        let input = SolverInput::from_instance(&inst);
        let optimum = solve_exhaustive_options(&input).unwrap().objective;
        assert!(root_lower_bound(&input) <= optimum);
    }

    #[test]
    fn fixture_text_round_trips() {
        let mut fixture = Fixture::new(10.0);
        fixture.cache(1, 5, 4);
        fixture.cache(2, 5, 2);
        let inst = fixture.instance(vec![request(7, 1, 5, 2), request(8, 3, 5, 1)]);
        let input = SolverInput::from_instance(&inst);
        let text = input.to_text();
        let parsed = SolverInput::parse(&text).unwrap();
        assert_eq!(parsed, input);

        let schedule = solve_bnb_options(&input);
        let schedule_text = schedule.to_text(&input);
        let parsed_schedule = Schedule::parse(&schedule_text, &input).unwrap();
        assert_eq!(parsed_schedule, schedule);
    }

    #[test]
    fn fixture_parse_reports_line_numbers() {
        let err = SolverInput::parse("servers 1\ncapacity 1 10\nbogus line\n").unwrap_err();
        assert_eq!(
            err,
            SolveError::Parse {
                line: 3,
                message: "unrecognized line: bogus line".into()
            }
        );
    }

    mod random_equivalence {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn bnb_matches_exhaustive_on_random_instances(seed in 0u64..1_000_000) {
                let input = crate::validate::random_solver_input(seed);
                let exhaustive = solve_exhaustive_options(&input).expect("within guard");
                let bnb = solve_bnb_options(&input);
                prop_assert_eq!(bnb.objective, exhaustive.objective);
                prop_assert!(schedule_is_feasible(&input, &bnb));
            }
        }
    }
}
