//! Online request-scheduling policies and the post-decision state update.
//!
//! Schedulers are pure functions of `(request, state)`; `apply_decision` is
//! the only mutator. Branch order for the collaborative policy is strict:
//! local hit, local transcode, cheapest neighbor holding the exact variant,
//! best-headroom neighbor transcode placement, origin.

use crate::cache::{InsertOutcome, LruCache};
use crate::model::{
    decision_cost, decision_delay_ms, Catalog, CostParams, Request, ServingDecision, Topology,
};
use crate::processing::ProcessingLedger;
use thiserror::Error;

/// Scheduling policy selected by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// Joint collaborative caching and processing. With `home_transcode` the
    /// candidate set for a neighbor-sourced transcode includes running it at
    /// the requesting server; without it, only at the source.
    Jccp { home_transcode: bool },
    /// Local caching + transcoding, no collaboration.
    CachePro,
    /// Collaborative caching, no transcoding.
    CoCache,
    /// Exact re-solve of the scheduling problem on every arrival.
    OfflineOptimal,
}

impl PolicyKind {
    pub fn parse(name: &str, home_transcode: bool) -> Option<Self> {
        match name {
            "jccp" => Some(PolicyKind::Jccp { home_transcode }),
            "cachepro" => Some(PolicyKind::CachePro),
            "cocache" => Some(PolicyKind::CoCache),
            "offline" => Some(PolicyKind::OfflineOptimal),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Jccp { .. } => "jccp",
            PolicyKind::CachePro => "cachepro",
            PolicyKind::CoCache => "cocache",
            PolicyKind::OfflineOptimal => "offline",
        }
    }

    pub const NAMES: [&'static str; 4] = ["jccp", "cachepro", "cocache", "offline"];
}

/// Everything a scheduler reads and `apply_decision` mutates: one LRU cache
/// per server, the shared processing ledger, and the immutable parameters.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub caches: Vec<LruCache>,
    pub ledger: ProcessingLedger,
    pub topology: Topology,
    pub catalog: Catalog,
    pub params: CostParams,
}

impl SystemState {
    pub fn new(
        catalog: Catalog,
        topology: Topology,
        params: CostParams,
        cache_capacity_bytes: u64,
        processing_capacity: f64,
    ) -> Self {
        let k = topology.num_servers();
        Self {
            caches: (0..k).map(|_| LruCache::new(cache_capacity_bytes)).collect(),
            ledger: ProcessingLedger::uniform(k, processing_capacity),
            topology,
            catalog,
            params,
        }
    }

    pub fn cache(&self, server: u32) -> &LruCache {
        &self.caches[server as usize - 1]
    }

    pub fn cache_mut(&mut self, server: u32) -> &mut LruCache {
        &mut self.caches[server as usize - 1]
    }

    pub fn num_servers(&self) -> u32 {
        self.topology.num_servers()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ApplyError {
    #[error("decision references entry {0} missing from cache of server {1}")]
    MissingCacheEntry(String, u32),
    #[error("admission failed after scheduler approval: {0}")]
    AdmissionFailed(String),
}

/// Cost and traffic of one serving path, independent of cache effects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    /// Backhaul cost of the serving path.
    pub cost: f64,
    /// Access delay of the serving path in milliseconds.
    pub delay_ms: f64,
    /// Bytes drawn from the origin server (the requested size, for origin
    /// fetches only).
    pub origin_bytes: u64,
    /// Actual bytes moved between edge servers: the requested size for fetch
    /// and transcode-at-source paths, the larger source size when a higher
    /// variant is hauled home for transcoding.
    pub inter_server_bytes: u64,
}

/// What applying one decision did and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppliedOutcome {
    pub cost: f64,
    pub delay_ms: f64,
    pub origin_bytes: u64,
    pub inter_server_bytes: u64,
    /// False when the requested variant was too large for the home cache.
    pub cached: bool,
}

/// The collaborative scheduler: first applicable branch wins.
///
/// 1. exact variant in the home cache;
/// 2. higher variant at home and headroom for the transcode;
/// 3. exact variant at a neighbor: cheapest backhaul, lowest index on ties;
/// 4. higher variant at some neighbor: among placements (at the source, or
///    at home when `home_transcode`) with non-negative headroom, pick the
///    most headroom; ties prefer at-source, then lower backhaul cost, then
///    lower server index;
/// 5. origin fetch.
pub fn schedule_jccp(
    request: &Request,
    state: &SystemState,
    home_transcode: bool,
) -> ServingDecision {
    let j = request.home;
    let v = request.variant;

    if state.cache(j).contains(&v) {
        return ServingDecision::LocalHit;
    }

    let p = state
        .params
        .transcode_cost(&state.catalog, v.level)
        .expect("request level in catalog range");

    if let Some(from_level) = state.cache(j).closest_transcodable(&v) {
        if state.ledger.headroom(j, p) >= 0.0 {
            return ServingDecision::LocalTranscode { from_level };
        }
    }

    if let Some(source) = cheapest_neighbor_with_exact(request, state) {
        return ServingDecision::NeighborFetch { source };
    }

    // candidate transcode placements: (headroom, at_source, backhaul, source)
    let mut best: Option<(f64, bool, f64, u32, ServingDecision)> = None;
    for k in state.topology.neighbors(j) {
        let Some(from_level) = state.cache(k).closest_transcodable(&v) else {
            continue;
        };
        let d_jk = state.topology.neighbor_cost(j, k);
        let mut candidates = vec![(
            state.ledger.headroom(k, p),
            true,
            ServingDecision::NeighborTranscodeAtSource {
                source: k,
                from_level,
            },
        )];
        if home_transcode {
            candidates.push((
                state.ledger.headroom(j, p),
                false,
                ServingDecision::NeighborTranscodeAtHome {
                    source: k,
                    from_level,
                },
            ));
        }
        for (q, at_source, decision) in candidates {
            if q < 0.0 {
                continue;
            }
            let better = match &best {
                None => true,
                Some((best_q, best_at_source, best_d, best_k, _)) => {
                    (q, at_source, -d_jk, std::cmp::Reverse(k))
                        > (*best_q, *best_at_source, -*best_d, std::cmp::Reverse(*best_k))
                }
            };
            if better {
                best = Some((q, at_source, d_jk, k, decision));
            }
        }
    }
    if let Some((_, _, _, _, decision)) = best {
        return decision;
    }

    ServingDecision::OriginFetch
}

/// Local-only baseline: local hit, local transcode, origin. Never inspects
/// neighbor caches.
pub fn schedule_cachepro(request: &Request, state: &SystemState) -> ServingDecision {
    let j = request.home;
    let v = request.variant;
    if state.cache(j).contains(&v) {
        return ServingDecision::LocalHit;
    }
    if let Some(from_level) = state.cache(j).closest_transcodable(&v) {
        let p = state
            .params
            .transcode_cost(&state.catalog, v.level)
            .expect("request level in catalog range");
        if state.ledger.headroom(j, p) >= 0.0 {
            return ServingDecision::LocalTranscode { from_level };
        }
    }
    ServingDecision::OriginFetch
}

/// Collaboration-only baseline: local hit, cheapest neighbor with the exact
/// variant, origin. Never transcodes.
pub fn schedule_cocache(request: &Request, state: &SystemState) -> ServingDecision {
    if state.cache(request.home).contains(&request.variant) {
        return ServingDecision::LocalHit;
    }
    if let Some(source) = cheapest_neighbor_with_exact(request, state) {
        return ServingDecision::NeighborFetch { source };
    }
    ServingDecision::OriginFetch
}

fn cheapest_neighbor_with_exact(request: &Request, state: &SystemState) -> Option<u32> {
    let j = request.home;
    state
        .topology
        .neighbors(j)
        .filter(|&k| state.cache(k).contains(&request.variant))
        .min_by(|&a, &b| {
            state
                .topology
                .neighbor_cost(j, a)
                .partial_cmp(&state.topology.neighbor_cost(j, b))
                .expect("finite costs")
                .then(a.cmp(&b))
        })
}

/// Dispatch to the named online scheduler. `OfflineOptimal` is driven by the
/// engine's re-solve path, not by a per-request scheduler.
pub fn schedule(policy: PolicyKind, request: &Request, state: &SystemState) -> ServingDecision {
    match policy {
        PolicyKind::Jccp { home_transcode } => schedule_jccp(request, state, home_transcode),
        PolicyKind::CachePro => schedule_cachepro(request, state),
        PolicyKind::CoCache => schedule_cocache(request, state),
        PolicyKind::OfflineOptimal => {
            unreachable!("offline policy is scheduled by the engine re-solve")
        }
    }
}

/// Cost, delay, and byte movement of a decision, without touching any state.
pub fn decision_outcome(
    request: &Request,
    decision: &ServingDecision,
    catalog: &Catalog,
    topology: &Topology,
) -> PathOutcome {
    let cost = decision_cost(decision, request, catalog, topology);
    let delay_ms = decision_delay_ms(decision, request.home, topology);
    let r_l = catalog
        .variant_size(request.variant.level)
        .expect("request level in catalog range");
    let origin_bytes = if decision.is_origin() { r_l } else { 0 };
    let inter_server_bytes = match decision {
        ServingDecision::NeighborFetch { .. }
        | ServingDecision::NeighborTranscodeAtSource { .. } => r_l,
        ServingDecision::NeighborTranscodeAtHome { from_level, .. } => catalog
            .variant_size(*from_level)
            .expect("source level in catalog range"),
        _ => 0,
    };
    PathOutcome {
        cost,
        delay_ms,
        origin_bytes,
        inter_server_bytes,
    }
}

/// Refresh the recency of the entry a decision reads, then insert the
/// requested variant into the home cache. Returns whether the variant ended
/// up cached (false only when it exceeds the whole cache capacity).
pub fn apply_cache_updates(
    request: &Request,
    decision: &ServingDecision,
    caches: &mut [LruCache],
    catalog: &Catalog,
) -> Result<bool, ApplyError> {
    let j = request.home;
    let v = request.variant;
    let read = match decision {
        ServingDecision::LocalHit => Some((j, v)),
        ServingDecision::LocalTranscode { from_level } => {
            Some((j, crate::model::VariantId::new(v.video, *from_level)))
        }
        ServingDecision::NeighborFetch { source } => Some((*source, v)),
        ServingDecision::NeighborTranscodeAtSource { source, from_level }
        | ServingDecision::NeighborTranscodeAtHome { source, from_level } => {
            Some((*source, crate::model::VariantId::new(v.video, *from_level)))
        }
        ServingDecision::OriginFetch => None,
    };
    if let Some((holder, entry)) = read {
        if !caches[holder as usize - 1].touch(&entry) {
            return Err(ApplyError::MissingCacheEntry(entry.to_string(), holder));
        }
    }
    let size = catalog
        .variant_size(v.level)
        .expect("request level in catalog range");
    let outcome = caches[j as usize - 1].insert(v, size);
    Ok(!matches!(outcome, InsertOutcome::Uncacheable))
}

/// Apply a scheduler's decision to the state: admit the transcode (if any)
/// until the stream's departure, refresh the recency of the entry actually
/// read, insert the requested variant into the home cache, and report the
/// realized cost/delay/traffic.
///
/// The scheduler verified headroom against this exact state, so admission
/// failure is an internal consistency error.
pub fn apply_decision(
    request: &Request,
    decision: &ServingDecision,
    state: &mut SystemState,
) -> Result<AppliedOutcome, ApplyError> {
    if let Some(site) = decision.transcode_site(request.home) {
        let p = state
            .params
            .transcode_cost(&state.catalog, request.variant.level)
            .expect("request level in catalog range");
        state
            .ledger
            .admit(site, request.id, p, request.departure_time())
            .map_err(|e| ApplyError::AdmissionFailed(e.to_string()))?;
    }
    let cached = apply_cache_updates(request, decision, &mut state.caches, &state.catalog)?;
    let path = decision_outcome(request, decision, &state.catalog, &state.topology);
    Ok(AppliedOutcome {
        cost: path.cost,
        delay_ms: path.delay_ms,
        origin_bytes: path.origin_bytes,
        inter_server_bytes: path.inter_server_bytes,
        cached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariantId;

    // length 8 s, tau 2: r = [1,2,3,4] bytes, p = [2,4,6,8] units
    fn small_catalog() -> Catalog {
        Catalog::new(10, vec![1.0, 2.0, 3.0, 4.0], 8.0).unwrap()
    }

    fn three_server_topology() -> Topology {
        // d_12 = 30, d_13 = 40, d_23 = 25
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

    fn state_with(cache_bytes: u64, capacity: f64) -> SystemState {
        SystemState::new(
            small_catalog(),
            three_server_topology(),
            CostParams::new(2.0).unwrap(),
            cache_bytes,
            capacity,
        )
    }

    fn request(home: u32, video: u32, level: u8) -> Request {
        Request {
            id: 0,
            home,
            variant: VariantId::new(video, level),
            arrival_time: 0.0,
            duration: 8.0,
        }
    }

    fn insert(state: &mut SystemState, server: u32, video: u32, level: u8) {
        let size = state.catalog.variant_size(level).unwrap();
        state.cache_mut(server).insert(VariantId::new(video, level), size);
    }

    #[test]
    fn local_hit_beats_everything() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 1, 5, 2);
        insert(&mut state, 2, 5, 2); // cheaper-than-origin neighbor also holds it
        let d = schedule_jccp(&request(1, 5, 2), &state, true);
        assert_eq!(d, ServingDecision::LocalHit);
    }

    #[test]
    fn local_transcode_when_higher_level_cached_and_headroom() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 1, 5, 4);
        let d = schedule_jccp(&request(1, 5, 2), &state, true);
        assert_eq!(d, ServingDecision::LocalTranscode { from_level: 4 });
    }

    #[test]
    fn local_transcode_skipped_without_headroom() {
        let mut state = state_with(100, 10.0);
        insert(&mut state, 1, 5, 4);
        // occupy 8 of 10 units; p_2 = 4 does not fit at home
        state.ledger.admit(1, 900, 8.0, 60.0).unwrap();
        let d = schedule_jccp(&request(1, 5, 2), &state, true);
        // neighbor caches are empty -> origin
        assert_eq!(d, ServingDecision::OriginFetch);
    }

    #[test]
    fn neighbor_fetch_prefers_cheapest_backhaul() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 2, 5, 2); // d_12 = 30
        insert(&mut state, 3, 5, 2); // d_13 = 40
        let d = schedule_jccp(&request(1, 5, 2), &state, true);
        assert_eq!(d, ServingDecision::NeighborFetch { source: 2 });
    }

    #[test]
    fn empty_caches_fall_through_to_origin() {
        let state = state_with(100, 100.0);
        assert_eq!(
            schedule_jccp(&request(1, 5, 2), &state, true),
            ServingDecision::OriginFetch
        );
    }

    #[test]
    fn neighbor_transcode_picks_max_headroom_placement() {
        // k1 = server 2 holds (v,3) with P-U = 2; k2 = server 3 holds (v,4)
        // with P-U = 5; home has P-U = 1. Request (v,1), p_1 = 2.
        let mut state = state_with(100, 10.0);
        insert(&mut state, 2, 5, 3);
        insert(&mut state, 3, 5, 4);
        state.ledger.admit(1, 900, 9.0, 60.0).unwrap();
        state.ledger.admit(2, 901, 8.0, 60.0).unwrap();
        state.ledger.admit(3, 902, 5.0, 60.0).unwrap();
        let d = schedule_jccp(&request(1, 5, 1), &state, true);
        // Q: 2@2 -> 0, 3@3 -> 3, @home -> -1 (dropped). argmax is server 3.
        assert_eq!(
            d,
            ServingDecision::NeighborTranscodeAtSource {
                source: 3,
                from_level: 4
            }
        );
    }

    #[test]
    fn home_transcode_candidate_wins_when_home_has_most_headroom() {
        let mut state = state_with(100, 10.0);
        insert(&mut state, 2, 5, 4);
        state.ledger.admit(2, 900, 9.0, 60.0).unwrap(); // source nearly full
        let with_home = schedule_jccp(&request(1, 5, 1), &state, true);
        assert_eq!(
            with_home,
            ServingDecision::NeighborTranscodeAtHome {
                source: 2,
                from_level: 4
            }
        );
        // with the flag off, the infeasible source placement falls to origin
        let without_home = schedule_jccp(&request(1, 5, 1), &state, false);
        assert_eq!(without_home, ServingDecision::OriginFetch);
    }

    #[test]
    fn headroom_ties_prefer_at_source() {
        // equal headroom everywhere: at-source beats at-home
        let mut state = state_with(100, 10.0);
        insert(&mut state, 2, 5, 4);
        let d = schedule_jccp(&request(1, 5, 1), &state, true);
        assert_eq!(
            d,
            ServingDecision::NeighborTranscodeAtSource {
                source: 2,
                from_level: 4
            }
        );
    }

    #[test]
    fn headroom_ties_across_sources_prefer_cheaper_link() {
        // servers 2 and 3 both hold (v,4) with equal headroom; home server 2's
        // cheaper neighbor is 3 (d_23 = 25 < d_12 = 30)
        let mut state = state_with(100, 10.0);
        insert(&mut state, 1, 5, 4);
        insert(&mut state, 3, 5, 4);
        state.ledger.admit(2, 900, 10.0, 60.0).unwrap(); // no home placement
        let d = schedule_jccp(&request(2, 5, 1), &state, true);
        assert_eq!(
            d,
            ServingDecision::NeighborTranscodeAtSource {
                source: 3,
                from_level: 4
            }
        );
    }

    #[test]
    fn cachepro_never_looks_at_neighbors() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 2, 5, 2); // exact variant next door
        assert_eq!(
            schedule_cachepro(&request(1, 5, 2), &state),
            ServingDecision::OriginFetch
        );
        insert(&mut state, 1, 5, 2);
        assert_eq!(
            schedule_cachepro(&request(1, 5, 2), &state),
            ServingDecision::LocalHit
        );
    }

    #[test]
    fn cachepro_transcodes_locally() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 1, 5, 4);
        assert_eq!(
            schedule_cachepro(&request(1, 5, 1), &state),
            ServingDecision::LocalTranscode { from_level: 4 }
        );
    }

    #[test]
    fn cocache_never_transcodes() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 1, 5, 4); // higher level cached locally
        assert_eq!(
            schedule_cocache(&request(1, 5, 1), &state),
            ServingDecision::OriginFetch
        );
    }

    #[test]
    fn cocache_picks_min_cost_neighbor() {
        // neighbors of server 1: k=2 (d=30), k=3 (d=40); both hold it
        let mut state = state_with(100, 100.0);
        insert(&mut state, 2, 5, 2);
        insert(&mut state, 3, 5, 2);
        assert_eq!(
            schedule_cocache(&request(1, 5, 2), &state),
            ServingDecision::NeighborFetch { source: 2 }
        );
    }

    #[test]
    fn apply_origin_fetch_counts_bytes_and_caches_result() {
        let mut state = state_with(100, 100.0);
        let req = request(1, 5, 2);
        let out = apply_decision(&req, &ServingDecision::OriginFetch, &mut state).unwrap();
        assert_eq!(out.origin_bytes, 2);
        assert_eq!(out.delay_ms, 150.0);
        assert_eq!(out.cost, 2.0 * 150.0);
        assert_eq!(out.inter_server_bytes, 0);
        assert!(out.cached);
        assert!(state.cache(1).contains(&VariantId::new(5, 2)));
    }

    #[test]
    fn apply_local_hit_is_free_and_refreshes_recency() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 1, 9, 1); // older entry
        insert(&mut state, 1, 5, 2);
        state.cache_mut(1).touch(&VariantId::new(9, 1)); // make (5,2) the LRU
        let req = request(1, 5, 2);
        let out = apply_decision(&req, &ServingDecision::LocalHit, &mut state).unwrap();
        assert_eq!(out.cost, 0.0);
        assert_eq!(out.delay_ms, 5.0);
        assert_eq!(out.origin_bytes, 0);
        let order: Vec<VariantId> = state.cache(1).iter_mru().map(|(v, _)| v).collect();
        assert_eq!(order[0], VariantId::new(5, 2));
    }

    #[test]
    fn apply_neighbor_transcode_at_home_updates_all_three_ledgers() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 2, 5, 4);
        let req = request(1, 5, 2);
        let decision = ServingDecision::NeighborTranscodeAtHome {
            source: 2,
            from_level: 4,
        };
        let out = apply_decision(&req, &decision, &mut state).unwrap();
        // p_2 = 4 admitted at the home server
        assert_eq!(state.ledger.load(1), 4.0);
        assert_eq!(state.ledger.load(2), 0.0);
        // home gained the transcoded output
        assert!(state.cache(1).contains(&VariantId::new(5, 2)));
        // neighbor source entry was touched, not copied
        assert!(state.cache(2).contains(&VariantId::new(5, 4)));
        assert!(!state.cache(1).contains(&VariantId::new(5, 4)));
        // the wire carried the source variant's bytes
        assert_eq!(out.inter_server_bytes, 4);
        assert_eq!(out.cost, 2.0 * 30.0);
    }

    #[test]
    fn apply_transcode_releases_at_departure() {
        let mut state = state_with(100, 100.0);
        insert(&mut state, 1, 5, 4);
        let req = request(1, 5, 2);
        apply_decision(
            &req,
            &ServingDecision::LocalTranscode { from_level: 4 },
            &mut state,
        )
        .unwrap();
        assert_eq!(state.ledger.release_time(req.id), Some(req.departure_time()));
    }

    #[test]
    fn apply_uncacheable_variant_still_serves() {
        let mut state = state_with(1, 100.0); // capacity 1 byte < r_2 = 2
        let req = request(1, 5, 2);
        let out = apply_decision(&req, &ServingDecision::OriginFetch, &mut state).unwrap();
        assert!(!out.cached);
        assert!(state.cache(1).is_empty());
    }

    #[test]
    fn apply_detects_missing_source_entry() {
        let mut state = state_with(100, 100.0);
        let req = request(1, 5, 2);
        let err = apply_decision(
            &req,
            &ServingDecision::NeighborFetch { source: 2 },
            &mut state,
        )
        .unwrap_err();
        assert!(matches!(err, ApplyError::MissingCacheEntry(_, 2)));
    }

    #[test]
    fn apply_detects_admission_failure() {
        let mut state = state_with(100, 3.0); // p_2 = 4 never fits
        insert(&mut state, 1, 5, 4);
        let req = request(1, 5, 2);
        let err = apply_decision(
            &req,
            &ServingDecision::LocalTranscode { from_level: 4 },
            &mut state,
        )
        .unwrap_err();
        assert!(matches!(err, ApplyError::AdmissionFailed(_)));
    }

    #[test]
    fn policy_names_round_trip() {
        for name in PolicyKind::NAMES {
            assert_eq!(PolicyKind::parse(name, true).unwrap().name(), name);
        }
        assert_eq!(PolicyKind::parse("nosuch", true), None);
    }

    #[test]
    fn jccp_transcodes_only_where_headroom_exists() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..500 {
            let mut state = state_with(1000, rng.gen_range(0.0..20.0));
            for server in 1..=3u32 {
                for video in 1..=4 {
                    for level in 1..=4u8 {
                        if rng.gen_bool(0.3) {
                            insert(&mut state, server, video, level);
                        }
                    }
                }
                if rng.gen_bool(0.5) {
                    let _ = state.ledger.admit(
                        server,
                        900 + server as u64,
                        rng.gen_range(0.0..20.0),
                        60.0,
                    );
                }
            }
            let req = request(rng.gen_range(1..=3), rng.gen_range(1..=4), rng.gen_range(1..=4));
            for home_transcode in [true, false] {
                let decision = schedule_jccp(&req, &state, home_transcode);
                if let Some(site) = decision.transcode_site(req.home) {
                    let p = state
                        .params
                        .transcode_cost(&state.catalog, req.variant.level)
                        .unwrap();
                    assert!(
                        state.ledger.headroom(site, p) >= 0.0,
                        "{decision:?} placed without headroom"
                    );
                }
            }
        }
    }
}
