//! Bounded FIFO replay storage for MDP transitions.

/// One MDP step. `reward` and `delta_u` satisfy the semi-sparse rule:
/// reward = delta_u when delta_u ≥ ε, else 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub delta_u: f64,
}

/// Ring buffer with strictly FIFO eviction.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    storage: Vec<Transition>,
    capacity: usize,
    cursor: usize,
    total_inserted: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay buffer needs positive capacity");
        Self { storage: Vec::with_capacity(capacity), capacity, cursor: 0, total_inserted: 0 }
    }

    pub fn push(&mut self, t: Transition) {
        if self.storage.len() < self.capacity {
            self.storage.push(t);
        } else {
            self.storage[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
        self.total_inserted += 1;
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn total_inserted(&self) -> usize {
        self.total_inserted
    }

    /// Random access in ring order (index 0 = oldest surviving transition).
    pub fn get(&self, index: usize) -> &Transition {
        let start = if self.storage.len() < self.capacity { 0 } else { self.cursor };
        &self.storage[(start + index) % self.storage.len()]
    }

    /// Iterate oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        (0..self.len()).map(|i| self.get(i))
    }
}
