//! Max-priority queues of pixels keyed by gray level.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::sort::SORT_SWITCH_BITS;

/// Which structure backs the flooding front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueueBackend {
    /// One FIFO bucket per gray level.
    Bucketed,
    /// Binary heap on (level, insertion order).
    Heap,
}

impl QueueBackend {
    pub fn for_bits(bit_depth: u32) -> Self {
        if bit_depth < SORT_SWITCH_BITS {
            QueueBackend::Bucketed
        } else {
            QueueBackend::Heap
        }
    }
}

pub(crate) trait MaxQueue {
    fn push(&mut self, p: usize, level: u32);
    /// A pixel of maximal level; the earliest pushed among equals.
    fn top(&self) -> Option<usize>;
    fn pop(&mut self) -> Option<usize>;
    fn counters(&self) -> (usize, usize);
}

/// Per-level FIFO buckets carved out of a single buffer.
///
/// Bucket capacities come from the image histogram, so the whole queue
/// takes `n + 2k` words and never reallocates. Each pixel may be pushed at
/// most once.
#[derive(Debug)]
pub struct HierarchicalQueue {
    buf: Vec<usize>,
    head: Vec<usize>,
    tail: Vec<usize>,
    end: Vec<usize>,
    top: Option<usize>,
    pushes: usize,
    pops: usize,
}

impl HierarchicalQueue {
    pub fn with_histogram(values: &[u32], bits: u32) -> Self {
        let levels = 1usize << bits;
        let mut start = vec![0usize; levels + 1];
        for &v in values {
            start[v as usize + 1] += 1;
        }
        for i in 1..start.len() {
            start[i] += start[i - 1];
        }
        let end = start[1..].to_vec();
        start.pop();
        HierarchicalQueue {
            buf: vec![0; values.len()],
            tail: start.clone(),
            head: start,
            end,
            top: None,
            pushes: 0,
            pops: 0,
        }
    }

    #[inline]
    pub fn push_level(&mut self, level: usize, p: usize) {
        debug_assert!(self.tail[level] < self.end[level], "bucket {level} overflow");
        self.buf[self.tail[level]] = p;
        self.tail[level] += 1;
        self.pushes += 1;
        if self.top.is_none_or(|t| level > t) {
            self.top = Some(level);
        }
    }

    #[inline]
    pub fn is_level_empty(&self, level: usize) -> bool {
        self.head[level] == self.tail[level]
    }

    /// Pops the oldest pixel of `level`. Does not maintain the highest-level
    /// cursor; mix with [`MaxQueue::pop`] only through `pop`.
    #[inline]
    pub fn pop_level(&mut self, level: usize) -> Option<usize> {
        if self.is_level_empty(level) {
            return None;
        }
        let p = self.buf[self.head[level]];
        self.head[level] += 1;
        self.pops += 1;
        Some(p)
    }
}

impl MaxQueue for HierarchicalQueue {
    #[inline]
    fn push(&mut self, p: usize, level: u32) {
        self.push_level(level as usize, p);
    }

    #[inline]
    fn top(&self) -> Option<usize> {
        self.top.map(|t| self.buf[self.head[t]])
    }

    #[inline]
    fn pop(&mut self) -> Option<usize> {
        let t = self.top?;
        let p = self.pop_level(t);
        if self.is_level_empty(t) {
            self.top = (0..t).rev().find(|&l| !self.is_level_empty(l));
        }
        p
    }

    fn counters(&self) -> (usize, usize) {
        (self.pushes, self.pops)
    }
}

/// Comparison-based max-heap with FIFO order among equal levels.
#[derive(Debug, Default)]
pub struct HeapQueue {
    heap: BinaryHeap<(u32, Reverse<u64>, usize)>,
    seq: u64,
    pushes: usize,
    pops: usize,
}

impl HeapQueue {
    pub fn with_capacity(n: usize) -> Self {
        HeapQueue { heap: BinaryHeap::with_capacity(n), ..Default::default() }
    }
}

impl MaxQueue for HeapQueue {
    #[inline]
    fn push(&mut self, p: usize, level: u32) {
        self.heap.push((level, Reverse(self.seq), p));
        self.seq += 1;
        self.pushes += 1;
    }

    #[inline]
    fn top(&self) -> Option<usize> {
        self.heap.peek().map(|e| e.2)
    }

    #[inline]
    fn pop(&mut self) -> Option<usize> {
        let e = self.heap.pop()?;
        self.pops += 1;
        Some(e.2)
    }

    fn counters(&self) -> (usize, usize) {
        (self.pushes, self.pops)
    }
}
