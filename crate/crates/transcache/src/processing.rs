//! Per-server transcoding-capacity ledger.
//!
//! A transcode occupies its load `p_l` at the server that runs it from
//! admission until the stream ends. The ledger keeps per-server loads equal
//! to an exact re-summation of the active set (deterministic order), and
//! integrates busy time for the utilization metric.

use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AdmitError {
    #[error("request {0} already holds an active transcode")]
    DuplicateRequest(u64),
    #[error("server {server} over capacity: load {load} + {p} > {capacity}")]
    OverCapacity {
        server: u32,
        load: f64,
        p: f64,
        capacity: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct ActiveTranscode {
    load: f64,
    release_time: f64,
}

/// Tracks which requests are transcoding where, and how much capacity that
/// consumes per server.
#[derive(Debug, Clone)]
pub struct ProcessingLedger {
    capacities: Vec<f64>,
    /// Active transcodes per server, keyed by request id (deterministic
    /// iteration for exact load re-summation).
    active: Vec<BTreeMap<u64, ActiveTranscode>>,
    by_request: HashMap<u64, u32>,
    loads: Vec<f64>,
    /// Integral of load over time per server, for utilization.
    busy_integral: Vec<f64>,
    clock: f64,
}

impl ProcessingLedger {
    /// One capacity value per server; index 0 of the slice is server 1.
    pub fn new(capacities: Vec<f64>) -> Self {
        let k = capacities.len();
        Self {
            capacities,
            active: vec![BTreeMap::new(); k],
            by_request: HashMap::new(),
            loads: vec![0.0; k],
            busy_integral: vec![0.0; k],
            clock: 0.0,
        }
    }

    pub fn uniform(num_servers: u32, capacity: f64) -> Self {
        Self::new(vec![capacity; num_servers as usize])
    }

    pub fn num_servers(&self) -> u32 {
        self.capacities.len() as u32
    }

    pub fn capacity(&self, server: u32) -> f64 {
        self.capacities[server as usize - 1]
    }

    /// Current transcoding load U_j at `server`: the sum of active loads
    /// hosted there, regardless of which home server they stream toward.
    pub fn load(&self, server: u32) -> f64 {
        self.loads[server as usize - 1]
    }

    /// Headroom Q = P - U - p left at `server` if a transcode of load `p`
    /// were placed there. Negative means it does not fit.
    pub fn headroom(&self, server: u32, p: f64) -> f64 {
        self.capacity(server) - self.load(server) - p
    }

    pub fn is_active(&self, request_id: u64) -> bool {
        self.by_request.contains_key(&request_id)
    }

    pub fn active_count(&self) -> usize {
        self.by_request.len()
    }

    /// Record a transcode of load `p` at `server` until `release_time`.
    /// Rejects without mutation when the load does not fit.
    pub fn admit(
        &mut self,
        server: u32,
        request_id: u64,
        p: f64,
        release_time: f64,
    ) -> Result<(), AdmitError> {
        if self.by_request.contains_key(&request_id) {
            return Err(AdmitError::DuplicateRequest(request_id));
        }
        let idx = server as usize - 1;
        if self.loads[idx] + p > self.capacities[idx] {
            return Err(AdmitError::OverCapacity {
                server,
                load: self.loads[idx],
                p,
                capacity: self.capacities[idx],
            });
        }
        self.active[idx].insert(request_id, ActiveTranscode {
            load: p,
            release_time,
        });
        self.resum(idx);
        // the maintained load is the id-ordered re-summation, which can land
        // an ulp above the incremental check; judge admission by the value
        // the invariant will see
        if self.loads[idx] > self.capacities[idx] {
            self.active[idx].remove(&request_id);
            self.resum(idx);
            return Err(AdmitError::OverCapacity {
                server,
                load: self.loads[idx],
                p,
                capacity: self.capacities[idx],
            });
        }
        self.by_request.insert(request_id, server);
        Ok(())
    }

    /// Free the capacity held by `request_id`. Returns false (no-op) when
    /// the id has no active transcode.
    pub fn release(&mut self, request_id: u64) -> bool {
        let Some(server) = self.by_request.remove(&request_id) else {
            return false;
        };
        let idx = server as usize - 1;
        self.active[idx].remove(&request_id);
        self.resum(idx);
        true
    }

    /// Drop every active transcode while keeping capacities, the clock, and
    /// the accumulated busy integrals. Used when a re-solve reassigns the
    /// whole in-flight set.
    pub fn clear_active(&mut self) {
        for set in &mut self.active {
            set.clear();
        }
        self.by_request.clear();
        self.loads.iter_mut().for_each(|l| *l = 0.0);
    }

    fn resum(&mut self, idx: usize) {
        self.loads[idx] = self.active[idx].values().map(|t| t.load).sum();
    }

    /// Advance the ledger clock, accumulating load-time area per server.
    pub fn advance_to(&mut self, t: f64) {
        debug_assert!(t >= self.clock, "time must not run backwards");
        let dt = t - self.clock;
        if dt > 0.0 {
            for (acc, load) in self.busy_integral.iter_mut().zip(&self.loads) {
                *acc += load * dt;
            }
        }
        self.clock = t;
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// Time-weighted utilization per server over `[0, horizon]`:
    /// integral of load/P. Zero-capacity (or zero-horizon) servers report 0.
    pub fn utilization(&self, horizon: f64) -> Vec<f64> {
        self.busy_integral
            .iter()
            .zip(&self.capacities)
            .map(|(&busy, &p)| {
                if p > 0.0 && p.is_finite() && horizon > 0.0 {
                    busy / (p * horizon)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Release time of the transcode held by `request_id`, if any.
    pub fn release_time(&self, request_id: u64) -> Option<f64> {
        let server = *self.by_request.get(&request_id)?;
        self.active[server as usize - 1]
            .get(&request_id)
            .map(|t| t.release_time)
    }

    /// Exact re-summation check: maintained loads equal the active sets and
    /// never exceed capacity.
    pub fn verify_accounting(&self) -> bool {
        self.active.iter().enumerate().all(|(idx, set)| {
            let total: f64 = set.values().map(|t| t.load).sum();
            total == self.loads[idx] && self.loads[idx] <= self.capacities[idx]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_ledger_has_zero_load() {
        let ledger = ProcessingLedger::uniform(2, 10.0);
        assert_eq!(ledger.load(1), 0.0);
        assert_eq!(ledger.load(2), 0.0);
    }

    #[test]
    fn loads_add_up_per_server() {
        let mut ledger = ProcessingLedger::uniform(2, 10.0);
        ledger.admit(1, 100, 3.0, 60.0).unwrap();
        ledger.admit(1, 101, 4.0, 60.0).unwrap();
        assert_eq!(ledger.load(1), 7.0);
        assert_eq!(ledger.load(2), 0.0);
    }

    #[test]
    fn load_is_attributed_to_the_transcoding_server() {
        // a transcode admitted at server 2 on behalf of a request homed at 1
        // contributes to load(2), not load(1)
        let mut ledger = ProcessingLedger::uniform(2, 10.0);
        ledger.admit(2, 100, 5.0, 60.0).unwrap();
        assert_eq!(ledger.load(1), 0.0);
        assert_eq!(ledger.load(2), 5.0);
    }

    #[test]
    fn headroom_arithmetic() {
        let mut ledger = ProcessingLedger::uniform(1, 10.0);
        assert_eq!(ledger.headroom(1, 4.0), 6.0);
        ledger.admit(1, 1, 8.0, 60.0).unwrap();
        assert_eq!(ledger.headroom(1, 4.0), -2.0);
        ledger.release(1);
        ledger.admit(1, 2, 6.0, 60.0).unwrap();
        // feasible boundary: Q = 0 still admits
        assert_eq!(ledger.headroom(1, 4.0), 0.0);
    }

    #[test]
    fn admit_at_exact_boundary_succeeds() {
        let mut ledger = ProcessingLedger::uniform(1, 10.0);
        ledger.admit(1, 1, 6.0, 60.0).unwrap();
        assert!(ledger.admit(1, 2, 4.0, 60.0).is_ok());
        assert_eq!(ledger.load(1), 10.0);
    }

    #[test]
    fn admit_over_capacity_rejects_without_mutation() {
        let mut ledger = ProcessingLedger::uniform(1, 10.0);
        ledger.admit(1, 1, 6.0, 60.0).unwrap();
        let err = ledger.admit(1, 2, 5.0, 60.0).unwrap_err();
        assert!(matches!(err, AdmitError::OverCapacity { .. }));
        assert_eq!(ledger.load(1), 6.0);
        assert!(!ledger.is_active(2));
    }

    #[test]
    fn duplicate_request_id_is_a_usage_error() {
        let mut ledger = ProcessingLedger::uniform(2, 10.0);
        ledger.admit(1, 7, 2.0, 60.0).unwrap();
        assert_eq!(
            ledger.admit(2, 7, 2.0, 60.0),
            Err(AdmitError::DuplicateRequest(7))
        );
    }

    #[test]
    fn admit_release_are_inverses() {
        let mut ledger = ProcessingLedger::uniform(1, 10.0);
        ledger.admit(1, 1, 3.5, 60.0).unwrap();
        let before = ledger.load(1);
        ledger.admit(1, 2, 4.25, 60.0).unwrap();
        assert!(ledger.release(2));
        assert_eq!(ledger.load(1), before);
        // release A after B: only p_B remains
        ledger.admit(1, 3, 2.0, 60.0).unwrap();
        assert!(ledger.release(1));
        assert_eq!(ledger.load(1), 2.0);
    }

    #[test]
    fn release_unknown_id_is_a_noop_failure() {
        let mut ledger = ProcessingLedger::uniform(1, 10.0);
        assert!(!ledger.release(99));
        assert_eq!(ledger.load(1), 0.0);
    }

    #[test]
    fn utilization_is_rectangle_area() {
        let mut ledger = ProcessingLedger::uniform(1, 10.0);
        // p = P/2 active for exactly half of a 100 s horizon -> 0.25
        ledger.advance_to(25.0);
        ledger.admit(1, 1, 5.0, 75.0).unwrap();
        ledger.advance_to(75.0);
        ledger.release(1);
        ledger.advance_to(100.0);
        assert_eq!(ledger.utilization(100.0), vec![0.25]);
    }

    #[test]
    fn utilization_handles_degenerate_capacity() {
        let mut ledger = ProcessingLedger::new(vec![0.0, f64::INFINITY]);
        ledger.advance_to(10.0);
        assert_eq!(ledger.utilization(10.0), vec![0.0, 0.0]);
    }

    #[test]
    fn infinite_capacity_always_has_headroom() {
        let mut ledger = ProcessingLedger::uniform(1, f64::INFINITY);
        for id in 0..100 {
            ledger.admit(1, id, 1e9, 60.0).unwrap();
        }
        assert!(ledger.headroom(1, 1e12) > 0.0);
    }

    #[test]
    fn clear_active_keeps_busy_history() {
        let mut ledger = ProcessingLedger::uniform(1, 10.0);
        ledger.admit(1, 1, 10.0, 60.0).unwrap();
        ledger.advance_to(50.0);
        ledger.clear_active();
        assert_eq!(ledger.load(1), 0.0);
        ledger.advance_to(100.0);
        assert_eq!(ledger.utilization(100.0), vec![0.5]);
    }

    proptest! {
        #[test]
        fn recomputed_load_matches_incremental(ops in proptest::collection::vec(
            (0u8..2, 1u32..4, 0u64..40, 1u32..100), 1..200))
        {
            let mut ledger = ProcessingLedger::uniform(3, 50.0);
            for (kind, server, id, p) in ops {
                match kind {
                    0 => {
                        let _ = ledger.admit(server, id, p as f64 / 7.0, 60.0);
                    }
                    _ => {
                        ledger.release(id);
                    }
                }
                prop_assert!(ledger.verify_accounting());
            }
        }
    }
}
