//! Tail-drop FIFO queue, packet-granular, as deployed at the access point.

use alloc::collections::VecDeque;

use crate::packet::Packet;

/// Bounded FIFO. Arrivals to a full queue are dropped, never enqueued;
/// dequeue order equals enqueue order.
pub struct FifoQueue {
    capacity_packets: usize,
    backlog: VecDeque<Packet>,
    drop_count: u64,
    max_backlog: usize,
}

impl FifoQueue {
    pub fn new(capacity_packets: usize) -> Self {
        FifoQueue {
            capacity_packets,
            backlog: VecDeque::new(),
            drop_count: 0,
            max_backlog: 0,
        }
    }

    /// Appends the packet if there is room. Returns whether it was accepted;
    /// a rejected packet counts as a drop.
    pub fn enqueue(&mut self, packet: Packet) -> bool {
        if self.backlog.len() >= self.capacity_packets {
            self.drop_count += 1;
            return false;
        }
        self.backlog.push_back(packet);
        self.max_backlog = self.max_backlog.max(self.backlog.len());
        true
    }

    pub fn dequeue(&mut self) -> Option<Packet> {
        self.backlog.pop_front()
    }

    pub fn len(&self) -> usize {
        self.backlog.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backlog.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity_packets
    }

    pub fn drop_count(&self) -> u64 {
        self.drop_count
    }

    /// Largest backlog observed over the queue's lifetime.
    pub fn max_backlog(&self) -> usize {
        self.max_backlog
    }
}
