//! Deterministic discrete-event simulation of a single TCP flow crossing a
//! wired backhaul and a trace-driven 60 GHz wireless hop.
//!
//! The crate is organized around the data path of the simulated network:
//!
//! - [`engine`]: the event queue with a total (time, sequence) order.
//! - [`channel`]: beam-pair power grids, trace interpolation, and synthetic
//!   blockage traces.
//! - [`phy`]: link-to-system mapping from received CW power to SNR, MER,
//!   MMIB, BLER, MCS selection, and offered rate.
//! - [`tcp`]: a simplified TCP sender (slow start, CUBIC, fast retransmit,
//!   RTO) with an external congestion-window override hook.
//! - [`proxy`]: the cross-layer controller that turns AP rate reports into
//!   congestion-window commands (reactive or proactive policy).
//! - [`sim`]: the wiring of all of the above into a runnable scenario.
//!
//! Everything is pure computation over integer-nanosecond time; file formats,
//! configuration parsing, and CSV output live in the companion `mmwsim`
//! crate. The crate is `no_std`-compatible (with `alloc`) when built with
//! `default-features = false`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod engine;
pub mod link;
pub mod metrics;
pub mod packet;
pub mod phy;
pub mod proxy;
pub mod queue;
pub mod sim;
pub mod tcp;
pub mod time;

pub use time::SimTime;
