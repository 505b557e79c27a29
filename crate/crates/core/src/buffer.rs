use std::collections::VecDeque;

use crate::{ActionId, StateId};

/// One step of experience: the transition observed at some step t, plus the
/// successor-state utility recorded at that same step. The stored utility is
/// captured when the record is the newest and never refreshed afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperienceRecord {
    pub state: StateId,
    pub action: ActionId,
    pub reward: f64,
    pub stored_utility: f64,
    /// Per-step recency factor for the iterative engine (adaptive lambda);
    /// `None` means the configured lambda applies.
    pub lambda_override: Option<f64>,
}

impl ExperienceRecord {
    pub fn new(state: StateId, action: ActionId, reward: f64, stored_utility: f64) -> Self {
        ExperienceRecord {
            state,
            action,
            reward,
            stored_utility,
            lambda_override: None,
        }
    }
}

/// Sliding window of the last `m` experience records. Index 0 is the newest
/// record, index `m - 1` the oldest; indices shift by one on every insertion
/// and inserting at capacity evicts the oldest.
#[derive(Debug, Clone)]
pub struct ExperienceBuffer {
    capacity: usize,
    records: VecDeque<ExperienceRecord>,
}

impl ExperienceBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "buffer capacity must be at least 1");
        ExperienceBuffer {
            capacity,
            records: VecDeque::with_capacity(capacity),
        }
    }

    /// Insert the newest record, returning the evicted oldest one when the
    /// buffer was already full.
    pub fn push(&mut self, record: ExperienceRecord) -> Option<ExperienceRecord> {
        let evicted = if self.records.len() == self.capacity {
            self.records.pop_back()
        } else {
            None
        };
        self.records.push_front(record);
        evicted
    }

    /// The record `k` ticks ago; `get(0)` is the newest.
    pub fn get(&self, k: usize) -> Option<&ExperienceRecord> {
        self.records.get(k)
    }

    pub fn newest(&self) -> Option<&ExperienceRecord> {
        self.records.front()
    }

    pub fn oldest(&self) -> Option<&ExperienceRecord> {
        self.records.back()
    }

    /// Overwrite the newest record's stored utility (the reset operation
    /// assigns 0 to the fictitious successor of a terminal step).
    pub fn set_newest_utility(&mut self, utility: f64) {
        if let Some(front) = self.records.front_mut() {
            front.stored_utility = utility;
        }
    }

    /// Newest to oldest.
    pub fn iter(&self) -> impl Iterator<Item = &ExperienceRecord> {
        self.records.iter()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.records.len() == self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }
}
