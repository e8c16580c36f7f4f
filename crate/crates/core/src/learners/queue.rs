use std::collections::VecDeque;

use super::tracker::ClassSizeTracker;
use super::LearnerError;
use crate::Label;

/// FIFO queue with a mutable capacity. Appending past capacity, or shrinking
/// the capacity below the current length, discards the oldest items.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedQueue<T> {
    items: VecDeque<T>,
    cap: usize,
}

impl<T> BoundedQueue<T> {
    /// # Panics
    ///
    /// If `cap` is zero.
    pub fn new(cap: usize) -> Self {
        assert!(cap >= 1, "queue capacity must be at least 1");
        BoundedQueue {
            items: VecDeque::with_capacity(cap),
            cap,
        }
    }

    pub fn push(&mut self, item: T) {
        self.items.push_back(item);
        self.evict();
    }

    /// # Panics
    ///
    /// If `cap` is zero.
    pub fn set_capacity(&mut self, cap: usize) {
        assert!(cap >= 1, "queue capacity must be at least 1");
        self.cap = cap;
        self.evict();
    }

    fn evict(&mut self) {
        while self.items.len() > self.cap {
            self.items.pop_front();
        }
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.items.len() == self.cap
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }

    pub fn newest(&self) -> Option<&T> {
        self.items.back()
    }
}

/// A positive and a negative [`BoundedQueue`] sharing a total budget `memory`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedQueues<T> {
    positive: BoundedQueue<T>,
    negative: BoundedQueue<T>,
    memory: usize,
}

impl<T> BalancedQueues<T> {
    /// Both capacities start at 1. `memory` must be even and at least 2.
    pub fn new(memory: usize) -> Result<Self, LearnerError> {
        if memory < 2 || !memory.is_multiple_of(2) {
            return Err(LearnerError::InvalidMemory(memory));
        }
        Ok(BalancedQueues {
            positive: BoundedQueue::new(1),
            negative: BoundedQueue::new(1),
            memory,
        })
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn half(&self) -> usize {
        self.memory / 2
    }

    pub fn queue(&self, label: Label) -> &BoundedQueue<T> {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }

    fn queue_mut(&mut self, label: Label) -> &mut BoundedQueue<T> {
        match label {
            Label::Positive => &mut self.positive,
            Label::Negative => &mut self.negative,
        }
    }

    pub fn push(&mut self, label: Label, item: T) {
        self.queue_mut(label).push(item);
    }

    pub fn capacity(&self, label: Label) -> usize {
        self.queue(label).capacity()
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The training set: positives then negatives, each oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.positive.iter().chain(self.negative.iter())
    }

    /// One queue-based resampling step: append, then grow every full queue
    /// whose capacity is below `memory / 2`.
    pub fn observe_fixed(&mut self, label: Label, item: T) {
        self.push(label, item);
        let half = self.half();
        for queue in [&mut self.positive, &mut self.negative] {
            if queue.is_full() && queue.capacity() < half {
                queue.set_capacity(queue.capacity() + 1);
            }
        }
    }

    /// One adaptive-rebalancing step: append, then adjust capacities using the
    /// (already updated) class sizes in `tracker`.
    pub fn observe_adaptive(&mut self, label: Label, item: T, tracker: &ClassSizeTracker) {
        self.push(label, item);
        self.rebalance(tracker);
    }

    /// Capacity adjustment after an append.
    ///
    /// While one queue is empty the other grows towards `memory`. Once both
    /// hold examples, capacities are first capped at `memory / 2`; then, if
    /// the minority queue is full, it grows by one (majority set to one less)
    /// or, at `memory / 2`, the majority is equalised to it. A tie in class
    /// sizes counts the negative class as the minority. Finally a capacity
    /// more than one below the other is raised to within one, which only
    /// happens when the tracker names the queue that grew alone as the
    /// minority before it has filled.
    pub fn rebalance(&mut self, tracker: &ClassSizeTracker) {
        let memory = self.memory;
        let half = self.half();
        if self.positive.is_empty() || self.negative.is_empty() {
            let only = if self.positive.is_empty() {
                &mut self.negative
            } else {
                &mut self.positive
            };
            if !only.is_empty() && only.capacity() < memory {
                only.set_capacity(only.capacity() + 1);
            }
            return;
        }

        // growth while the other queue was empty can leave a capacity above
        // memory / 2 (only possible at memory = 2); cap it before rebalancing
        for queue in [&mut self.positive, &mut self.negative] {
            if queue.capacity() > half {
                queue.set_capacity(half);
            }
        }

        let (minority, majority) = if tracker.negative() > tracker.positive() {
            (&mut self.positive, &mut self.negative)
        } else {
            (&mut self.negative, &mut self.positive)
        };
        if minority.is_full() {
            if minority.capacity() < half {
                minority.set_capacity(minority.capacity() + 1);
                majority.set_capacity(minority.capacity() - 1);
            } else if majority.capacity() != minority.capacity() {
                majority.set_capacity(minority.capacity());
            }
        }

        let (low, high) = if self.positive.capacity() < self.negative.capacity() {
            (&mut self.positive, &self.negative)
        } else {
            (&mut self.negative, &self.positive)
        };
        if low.capacity() + 1 < high.capacity() {
            low.set_capacity(high.capacity() - 1);
        }
    }
}

/// Queue-based resampling: per-class queues capped at `memory / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueResampler<T> {
    queues: BalancedQueues<T>,
}

impl<T> QueueResampler<T> {
    pub fn new(memory: usize) -> Result<Self, LearnerError> {
        Ok(QueueResampler {
            queues: BalancedQueues::new(memory)?,
        })
    }

    pub fn observe(&mut self, label: Label, item: T) {
        self.queues.observe_fixed(label, item);
    }

    pub fn queues(&self) -> &BalancedQueues<T> {
        &self.queues
    }
}

/// Adaptive rebalancing: per-class queues whose capacities follow the
/// time-decayed class sizes so the two queues stay balanced.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRebalancer<T> {
    queues: BalancedQueues<T>,
    tracker: ClassSizeTracker,
}

impl<T> AdaptiveRebalancer<T> {
    pub fn new(memory: usize, theta: f64) -> Result<Self, LearnerError> {
        super::check_theta(theta)?;
        Ok(AdaptiveRebalancer {
            queues: BalancedQueues::new(memory)?,
            tracker: ClassSizeTracker::new(theta),
        })
    }

    pub fn observe(&mut self, label: Label, item: T) {
        self.tracker.update(label);
        self.queues.observe_adaptive(label, item, &self.tracker);
    }

    pub fn queues(&self) -> &BalancedQueues<T> {
        &self.queues
    }

    pub fn tracker(&self) -> &ClassSizeTracker {
        &self.tracker
    }
}
