//! Integer-nanosecond simulation time.
//!
//! All event timestamps and delays are unsigned 64-bit nanosecond counts, so
//! two runs of the same scenario produce bit-identical schedules. The same
//! type doubles as a span (RTTs, timeouts, intervals).

use core::fmt;
use core::ops::{Add, AddAssign, Sub};

/// Nanoseconds since simulation start, or a nonnegative span.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_nanos(ns: u64) -> Self {
        SimTime(ns)
    }

    pub const fn from_micros(us: u64) -> Self {
        SimTime(us * 1_000)
    }

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms * 1_000_000)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * 1_000_000_000)
    }

    /// Rounds to the nearest nanosecond; negative values clamp to zero.
    pub fn from_secs_f64(s: f64) -> Self {
        if s <= 0.0 {
            return SimTime::ZERO;
        }
        SimTime(libm::round(s * 1e9) as u64)
    }

    pub const fn as_nanos(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e9
    }

    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    pub fn checked_sub(self, rhs: SimTime) -> Option<SimTime> {
        self.0.checked_sub(rhs.0).map(SimTime)
    }

    pub fn min(self, rhs: SimTime) -> SimTime {
        if self <= rhs {
            self
        } else {
            rhs
        }
    }

    pub fn max(self, rhs: SimTime) -> SimTime {
        if self >= rhs {
            self
        } else {
            rhs
        }
    }

    /// Doubles the span, saturating at the numeric limit.
    pub fn saturating_double(self) -> SimTime {
        SimTime(self.0.saturating_mul(2))
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        self.0 += rhs.0;
    }
}

impl Sub for SimTime {
    type Output = SimTime;

    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ns", self.0)
    }
}

/// Serialization delay of `size_bytes` at `rate_bps`, rounded up to a whole
/// nanosecond so that a nonempty packet never transmits in zero time.
///
/// Panics if `rate_bps` is zero; a stalled link must be handled by the caller
/// rather than by an infinite delay.
pub fn tx_time(size_bytes: u64, rate_bps: u64) -> SimTime {
    assert!(rate_bps > 0, "tx_time on a zero-rate link");
    let bits = size_bytes as u128 * 8 * 1_000_000_000;
    let ns = bits.div_ceil(rate_bps as u128);
    SimTime::from_nanos(ns as u64)
}
