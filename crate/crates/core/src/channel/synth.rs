//! Synthetic blockage traces: a static multipath field with moving-obstacle
//! attenuation events layered on top.
//!
//! Stands in for measured traces. An unblocked base grid (one dominant
//! line-of-sight pair plus weaker reflected pairs) is sampled periodically;
//! each blockage event attenuates a chosen set of beam pairs by a trapezoidal
//! or stepped profile, so the best-beam selection walks down to reflections
//! as the obstacle crosses the direct path.

use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::grid::BeamGrid;
use crate::channel::trace::{ChannelTrace, TraceError};
use crate::time::SimTime;

/// Attenuation envelope of a blockage event over its duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RampShape {
    /// Full attenuation for the whole event.
    Step,
    /// Linear rise to the peak over `ramp_time`, hold, linear fall over the
    /// trailing `ramp_time`. Clamped to half the event duration.
    Trapezoid { ramp_time: SimTime },
}

#[derive(Debug, Clone)]
pub struct BlockageEvent {
    pub start: SimTime,
    pub duration: SimTime,
    /// `(tx_angle_deg, rx_angle_deg)` pairs attenuated by this event;
    /// `None` hits every pair.
    pub affected_pairs: Option<Vec<(f64, f64)>>,
    pub peak_attenuation_db: f64,
    pub ramp: RampShape,
}

impl BlockageEvent {
    fn attenuation_at(&self, t: SimTime) -> f64 {
        if t < self.start || t >= self.start + self.duration {
            return 0.0;
        }
        match self.ramp {
            RampShape::Step => self.peak_attenuation_db,
            RampShape::Trapezoid { ramp_time } => {
                let half = SimTime::from_nanos(self.duration.as_nanos() / 2);
                let ramp = ramp_time.min(half).max(SimTime::from_nanos(1));
                let since_start = (t - self.start).as_nanos() as f64;
                let until_end = (self.start + self.duration - t).as_nanos() as f64;
                let r = ramp.as_nanos() as f64;
                let frac = (since_start / r).min(until_end / r).min(1.0);
                self.peak_attenuation_db * frac
            }
        }
    }
}

/// Everything needed to generate one deterministic synthetic trace.
#[derive(Debug, Clone)]
pub struct SyntheticScenarioSpec {
    pub base_grid: BeamGrid,
    pub blockage_events: Vec<BlockageEvent>,
    /// Per-cell, per-snapshot Gaussian power jitter (dB standard deviation).
    pub noise_jitter_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    /// Peak attenuation outside [0, 60] dB.
    AttenuationOutOfRange { event: usize },
    ZeroDuration { event: usize },
    NegativeJitter,
    /// An affected pair names angles absent from the base grid.
    UnknownPair { event: usize, tx_angle_deg: f64, rx_angle_deg: f64 },
    Trace(TraceError),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::AttenuationOutOfRange { event } => {
                write!(f, "event {event}: peak attenuation must be in [0, 60] dB")
            }
            SynthError::ZeroDuration { event } => write!(f, "event {event}: duration must be > 0"),
            SynthError::NegativeJitter => write!(f, "noise jitter must be >= 0"),
            SynthError::UnknownPair {
                event,
                tx_angle_deg,
                rx_angle_deg,
            } => write!(
                f,
                "event {event}: pair ({tx_angle_deg}, {rx_angle_deg}) not in the base grid"
            ),
            SynthError::Trace(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SynthError {}

/// Samples the scenario every `sample_period` from zero through `horizon`,
/// inclusive. Identical specs produce identical traces.
pub fn generate_synthetic_trace(
    spec: &SyntheticScenarioSpec,
    horizon: SimTime,
    sample_period: SimTime,
) -> Result<ChannelTrace, SynthError> {
    assert!(sample_period > SimTime::ZERO);
    if spec.noise_jitter_db < 0.0 {
        return Err(SynthError::NegativeJitter);
    }

    // Resolve each event's affected pairs to a cell mask up front.
    let (rows, cols) = spec.base_grid.dims();
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(spec.blockage_events.len());
    for (i, ev) in spec.blockage_events.iter().enumerate() {
        if !(0.0..=60.0).contains(&ev.peak_attenuation_db) {
            return Err(SynthError::AttenuationOutOfRange { event: i });
        }
        if ev.duration == SimTime::ZERO {
            return Err(SynthError::ZeroDuration { event: i });
        }
        let mut mask = alloc::vec![false; rows * cols];
        match &ev.affected_pairs {
            None => mask.fill(true),
            Some(pairs) => {
                for &(tx, rx) in pairs {
                    let (ti, ri) = spec.base_grid.cell_index(tx, rx).ok_or(
                        SynthError::UnknownPair {
                            event: i,
                            tx_angle_deg: tx,
                            rx_angle_deg: rx,
                        },
                    )?;
                    mask[ti * cols + ri] = true;
                }
            }
        }
        masks.push(mask);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let steps = horizon.as_nanos().div_ceil(sample_period.as_nanos());
    let mut snapshots = Vec::with_capacity(steps as usize + 1);
    for k in 0..=steps {
        let t = SimTime::from_nanos(k * sample_period.as_nanos());
        let mut grid = spec.base_grid.clone();
        for v in grid.values_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += z * spec.noise_jitter_db;
        }
        for (ev, mask) in spec.blockage_events.iter().zip(&masks) {
            let att = ev.attenuation_at(t);
            if att == 0.0 {
                continue;
            }
            for (idx, v) in grid.values_mut().iter_mut().enumerate() {
                if mask[idx] {
                    *v -= att;
                }
            }
        }
        snapshots.push((t, grid));
    }
    ChannelTrace::new(snapshots).map_err(SynthError::Trace)
}
