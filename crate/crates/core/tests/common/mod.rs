//! Shared fixtures for the simulation-level tests.

use mmwsim_core::channel::{
    generate_synthetic_trace, BeamGrid, BlockageEvent, ChannelTrace, RampShape,
    SyntheticScenarioSpec,
};
use mmwsim_core::phy::{LinkAbstractionConfig, McsEntry, McsTable, Modulation};
use mmwsim_core::proxy::PolicyKind;
use mmwsim_core::sim::{SimConfig, TopologyConfig};
use mmwsim_core::tcp::TcpConfig;
use mmwsim_core::SimTime;

/// The 12-entry single-carrier ladder (mirrors the shipped data file).
pub fn mcs_table() -> McsTable {
    let rows: [(u8, Modulation, f64); 12] = [
        (1, Modulation::Bpsk, 0.25),
        (2, Modulation::Bpsk, 0.5),
        (3, Modulation::Bpsk, 0.625),
        (4, Modulation::Bpsk, 0.75),
        (5, Modulation::Bpsk, 0.8125),
        (6, Modulation::Qpsk, 0.5),
        (7, Modulation::Qpsk, 0.625),
        (8, Modulation::Qpsk, 0.75),
        (9, Modulation::Qpsk, 0.8125),
        (10, Modulation::Qam16, 0.5),
        (11, Modulation::Qam16, 0.625),
        (12, Modulation::Qam16, 0.75),
    ];
    let entries = rows
        .iter()
        .map(|&(index, modulation, r)| McsEntry {
            index,
            modulation,
            code_rate: r,
            spectral_efficiency: modulation.bits_per_symbol() as f64 * r,
            x1: r,
            x2: 0.05,
        })
        .collect();
    McsTable::new(entries).unwrap()
}

pub fn link_config() -> LinkAbstractionConfig {
    LinkAbstractionConfig::with_table(mcs_table())
}

/// 1x1 grid pinned at `p_dbm` for `secs` seconds.
pub fn constant_trace(p_dbm: f64, secs: u64) -> ChannelTrace {
    ChannelTrace::new(vec![
        (
            SimTime::ZERO,
            BeamGrid::uniform(vec![0.0], vec![0.0], p_dbm).unwrap(),
        ),
        (
            SimTime::from_secs(secs),
            BeamGrid::uniform(vec![0.0], vec![0.0], p_dbm).unwrap(),
        ),
    ])
    .unwrap()
}

/// LOS at -55 dBm with two reflections; a 35 dB trapezoidal blockage sweeps
/// the LOS pair mid-run, forcing the best beam down the reflection ladder.
pub fn blockage_trace(secs: u64, seed: u64) -> ChannelTrace {
    let tx = vec![-10.0, 0.0, 10.0];
    let rx = vec![-10.0, 0.0, 10.0];
    let mut base = BeamGrid::uniform(tx, rx, -92.0).unwrap();
    base.set_value(1, 1, -55.0); // LOS -> MCS 12
    base.set_value(0, 2, -72.5); // reflection -> MCS 10
    base.set_value(2, 0, -79.0); // reflection -> MCS 3
    let spec = SyntheticScenarioSpec {
        base_grid: base,
        blockage_events: vec![
            BlockageEvent {
                start: SimTime::from_millis(800),
                duration: SimTime::from_millis(1400),
                affected_pairs: Some(vec![(0.0, 0.0)]),
                peak_attenuation_db: 35.0,
                ramp: RampShape::Trapezoid {
                    ramp_time: SimTime::from_millis(400),
                },
            },
            BlockageEvent {
                start: SimTime::from_millis(1100),
                duration: SimTime::from_millis(800),
                affected_pairs: Some(vec![(-10.0, 10.0)]),
                peak_attenuation_db: 25.0,
                ramp: RampShape::Trapezoid {
                    ramp_time: SimTime::from_millis(250),
                },
            },
        ],
        noise_jitter_db: 0.2,
        seed,
    };
    generate_synthetic_trace(&spec, SimTime::from_secs(secs), SimTime::from_millis(10)).unwrap()
}

pub fn sim_config(policy: PolicyKind, duration_secs: u64, seed: u64) -> SimConfig {
    SimConfig::new(
        TopologyConfig::default(),
        link_config(),
        TcpConfig::default(),
        policy,
        SimTime::from_secs(duration_secs),
        seed,
    )
}
