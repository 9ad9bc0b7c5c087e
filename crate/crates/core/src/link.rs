//! Fixed-rate point-to-point link with serialization and propagation delay.

use crate::time::{tx_time, SimTime};

/// One direction of a wired link. Packets serialize back to back at the link
/// rate and then propagate for a fixed one-way delay, so
/// `delivery = departure + serialization + one_way_delay`.
pub struct WiredLink {
    rate_bps: u64,
    one_way_delay: SimTime,
    next_free: SimTime,
}

impl WiredLink {
    pub fn new(rate_bps: u64, one_way_delay: SimTime) -> Self {
        assert!(rate_bps > 0);
        WiredLink {
            rate_bps,
            one_way_delay,
            next_free: SimTime::ZERO,
        }
    }

    /// Accepts a packet for transmission at `now` and returns its arrival
    /// time at the far end. The sender side queues implicitly: a packet
    /// handed over while the link is busy departs when the line frees up.
    pub fn transmit(&mut self, now: SimTime, size_bytes: u32) -> SimTime {
        let start = self.next_free.max(now);
        let done = start + tx_time(size_bytes as u64, self.rate_bps);
        self.next_free = done;
        done + self.one_way_delay
    }

    pub fn one_way_delay(&self) -> SimTime {
        self.one_way_delay
    }

    pub fn rate_bps(&self) -> u64 {
        self.rate_bps
    }
}
