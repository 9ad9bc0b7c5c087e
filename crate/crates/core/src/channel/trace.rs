use alloc::vec::Vec;
use core::fmt;

use crate::channel::grid::{BeamGrid, OUTAGE_DBM};
use crate::time::SimTime;

/// Domain for element-wise interpolation between snapshots.
///
/// Blockage attenuation composes additively in dB, so dB is the default;
/// linear milliwatt interpolation is available for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpDomain {
    Db,
    MilliWatt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceError {
    Empty,
    /// Timestamps must be strictly increasing; carries the offending time.
    NonMonotonicTimestamp { at: SimTime },
    /// All snapshots must share one grid shape and the same angle lists.
    ShapeMismatch { snapshot: usize },
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceError::Empty => write!(f, "trace has no snapshots"),
            TraceError::NonMonotonicTimestamp { at } => {
                write!(f, "duplicate or decreasing timestamp at {at}")
            }
            TraceError::ShapeMismatch { snapshot } => {
                write!(f, "snapshot {snapshot} has a different grid shape")
            }
        }
    }
}

impl core::error::Error for TraceError {}

/// Time-ordered beam-power snapshots with a common grid shape.
#[derive(Debug, Clone)]
pub struct ChannelTrace {
    snapshots: Vec<(SimTime, BeamGrid)>,
}

impl ChannelTrace {
    pub fn new(snapshots: Vec<(SimTime, BeamGrid)>) -> Result<Self, TraceError> {
        if snapshots.is_empty() {
            return Err(TraceError::Empty);
        }
        for i in 1..snapshots.len() {
            if snapshots[i].0 <= snapshots[i - 1].0 {
                return Err(TraceError::NonMonotonicTimestamp {
                    at: snapshots[i].0,
                });
            }
        }
        let first = &snapshots[0].1;
        for (i, (_, g)) in snapshots.iter().enumerate().skip(1) {
            if g.dims() != first.dims()
                || g.tx_angles_deg() != first.tx_angles_deg()
                || g.rx_angles_deg() != first.rx_angles_deg()
            {
                return Err(TraceError::ShapeMismatch { snapshot: i });
            }
        }
        Ok(ChannelTrace { snapshots })
    }

    pub fn snapshots(&self) -> &[(SimTime, BeamGrid)] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start_time(&self) -> SimTime {
        self.snapshots[0].0
    }

    pub fn end_time(&self) -> SimTime {
        self.snapshots[self.snapshots.len() - 1].0
    }

    /// Grid at time `t`: element-wise linear interpolation between the
    /// bracketing snapshots, clamped to the first/last snapshot outside the
    /// covered range. A cell that is an outage on either side interpolates
    /// to an outage strictly between snapshots.
    pub fn sample_grid(&self, t: SimTime, domain: InterpDomain) -> BeamGrid {
        match self
            .snapshots
            .binary_search_by(|(st, _)| st.cmp(&t))
        {
            Ok(i) => self.snapshots[i].1.clone(),
            Err(0) => self.snapshots[0].1.clone(),
            Err(i) if i == self.snapshots.len() => self.snapshots[i - 1].1.clone(),
            Err(i) => {
                let (t0, ref g0) = self.snapshots[i - 1];
                let (t1, ref g1) = self.snapshots[i];
                let alpha = (t - t0).as_nanos() as f64 / (t1 - t0).as_nanos() as f64;
                let mut out = g0.clone();
                let values = out.values_mut();
                for (idx, v) in values.iter_mut().enumerate() {
                    let a = g1.values()[idx];
                    *v = lerp_dbm(*v, a, alpha, domain);
                }
                out
            }
        }
    }
}

fn lerp_dbm(v0: f64, v1: f64, alpha: f64, domain: InterpDomain) -> f64 {
    if v0 == OUTAGE_DBM || v1 == OUTAGE_DBM {
        return OUTAGE_DBM;
    }
    match domain {
        InterpDomain::Db => v0 + alpha * (v1 - v0),
        InterpDomain::MilliWatt => {
            let p0 = libm::pow(10.0, v0 / 10.0);
            let p1 = libm::pow(10.0, v1 / 10.0);
            10.0 * libm::log10((1.0 - alpha) * p0 + alpha * p1)
        }
    }
}
