//! Per-server LRU cache with byte-capacity enforcement and the
//! closest-transcodable-version lookup.
//!
//! Recency is only refreshed by operations that actually read or store
//! content (`touch`, `insert`); membership probes (`contains`,
//! `closest_transcodable`) leave the order untouched.

use crate::model::VariantId;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Result of an insert attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertOutcome {
    /// Variant is now cached and most-recently-used. Lists entries evicted to
    /// make room, in eviction order; empty when the variant was already
    /// present (a plain recency refresh).
    Stored { evicted: Vec<VariantId> },
    /// Variant is larger than the whole cache; nothing changed.
    Uncacheable,
}

impl InsertOutcome {
    pub fn evicted(&self) -> &[VariantId] {
        match self {
            InsertOutcome::Stored { evicted } => evicted,
            InsertOutcome::Uncacheable => &[],
        }
    }
}

/// Byte-bounded LRU cache over video variants.
#[derive(Debug, Clone, Default)]
pub struct LruCache {
    capacity: u64,
    used: u64,
    /// Monotone counter; larger stamp = more recently used.
    stamp: u64,
    entries: HashMap<VariantId, Entry>,
    by_recency: BTreeMap<u64, VariantId>,
    /// Levels cached per video, for transcodable-version lookups.
    by_video: HashMap<u32, BTreeSet<u8>>,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    stamp: u64,
    size: u64,
}

impl LruCache {
    pub fn new(capacity: u64) -> Self {
        Self {
            capacity,
            ..Self::default()
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn used_bytes(&self) -> u64 {
        self.used
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Membership probe; does not refresh recency.
    pub fn contains(&self, variant: &VariantId) -> bool {
        self.entries.contains_key(variant)
    }

    /// Smallest cached level strictly above `variant.level` for the same
    /// video, if any. Does not refresh recency.
    pub fn closest_transcodable(&self, variant: &VariantId) -> Option<u8> {
        self.by_video
            .get(&variant.video)?
            .range(variant.level + 1..)
            .next()
            .copied()
    }

    /// Make `variant` the most-recently-used entry. Returns false (and
    /// changes nothing) when it is not cached.
    pub fn touch(&mut self, variant: &VariantId) -> bool {
        let Some(entry) = self.entries.get_mut(variant) else {
            return false;
        };
        self.by_recency.remove(&entry.stamp);
        self.stamp += 1;
        entry.stamp = self.stamp;
        self.by_recency.insert(self.stamp, *variant);
        true
    }

    /// Insert `variant`, evicting least-recently-used entries until it fits.
    /// Re-inserting a cached variant only refreshes its recency. The newly
    /// inserted entry is never among the evictions.
    pub fn insert(&mut self, variant: VariantId, size: u64) -> InsertOutcome {
        if self.contains(&variant) {
            self.touch(&variant);
            return InsertOutcome::Stored { evicted: vec![] };
        }
        if size > self.capacity {
            return InsertOutcome::Uncacheable;
        }
        let mut evicted = Vec::new();
        while self.used + size > self.capacity {
            let (&oldest, &victim) = self.by_recency.iter().next().expect("used > 0");
            self.by_recency.remove(&oldest);
            let entry = self.entries.remove(&victim).expect("indexed entry");
            self.used -= entry.size;
            self.remove_level_index(&victim);
            evicted.push(victim);
        }
        self.stamp += 1;
        self.entries.insert(
            variant,
            Entry {
                stamp: self.stamp,
                size,
            },
        );
        self.by_recency.insert(self.stamp, variant);
        self.by_video
            .entry(variant.video)
            .or_default()
            .insert(variant.level);
        self.used += size;
        InsertOutcome::Stored { evicted }
    }

    fn remove_level_index(&mut self, variant: &VariantId) {
        if let Some(levels) = self.by_video.get_mut(&variant.video) {
            levels.remove(&variant.level);
            if levels.is_empty() {
                self.by_video.remove(&variant.video);
            }
        }
    }

    /// Entries from most- to least-recently-used.
    pub fn iter_mru(&self) -> impl Iterator<Item = (VariantId, u64)> + '_ {
        self.by_recency
            .iter()
            .rev()
            .map(|(_, v)| (*v, self.entries[v].size))
    }

    /// Plain-text dump for trace inspection: one `video level size` line per
    /// entry, most-recently-used first.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (v, size) in self.iter_mru() {
            out.push_str(&format!("{} {} {}\n", v.video, v.level, size));
        }
        out
    }

    /// Recompute the byte total from scratch and compare against the
    /// maintained counter; also check the capacity bound. Used by the engine
    /// as a periodic self-check.
    pub fn verify_accounting(&self) -> bool {
        let total: u64 = self.entries.values().map(|e| e.size).sum();
        total == self.used && self.used <= self.capacity
    }
}
