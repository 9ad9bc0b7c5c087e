//! Time-varying beam-pair power matrices.
//!
//! A [`BeamGrid`] holds the received continuous-wave power for every
//! (transmit direction, receive direction) pair of the angular scan. A
//! [`ChannelTrace`] is a time-ordered sequence of such grids, sampled either
//! from measurement files or from the synthetic blockage generator, and
//! interpolated between snapshots at query time.

mod grid;
mod synth;
mod trace;

pub use grid::{BeamChoice, BeamGrid, GridError, OUTAGE_DBM};
pub use synth::{generate_synthetic_trace, BlockageEvent, RampShape, SyntheticScenarioSpec, SynthError};
pub use trace::{ChannelTrace, InterpDomain, TraceError};
