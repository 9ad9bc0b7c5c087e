//! End-to-end properties of the wired + wireless scenario.

mod common;

use common::{blockage_trace, constant_trace, sim_config};
use mmwsim_core::proxy::{PolicyKind, ProxyEvent};
use mmwsim_core::sim::{RunOutput, Simulation};
use mmwsim_core::SimTime;

fn run(policy: PolicyKind, trace_seed: u64, secs: u64, blocked: bool) -> RunOutput {
    let cfg = sim_config(policy, secs, trace_seed);
    let trace = if blocked {
        blockage_trace(secs, trace_seed)
    } else {
        constant_trace(-55.0, secs)
    };
    Simulation::new(cfg, trace).unwrap().run()
}

#[test]
fn no_traffic_delivers_nothing() {
    let mut cfg = sim_config(PolicyKind::Baseline, 1, 1);
    cfg.app_start = SimTime::from_secs(2); // past the horizon
    let out = Simulation::new(cfg, constant_trace(-55.0, 1)).unwrap().run();
    assert_eq!(out.metrics.delivered_bytes(), 0);
    assert_eq!(out.counters.data_packets_sent, 0);
    assert!(out.counters.conservation_holds());
}

#[test]
fn rtt_floor_matches_propagation_plus_serialization() {
    let out = run(PolicyKind::Reactive, 1, 3, false);
    assert!(!out.metrics.rtt_samples.is_empty());
    // Two wired one-way delays plus serialization on every hop: strictly
    // above 40 ms, below 41 ms when the queue stays empty at least once.
    let floor = SimTime::from_millis(40);
    let min = out.metrics.rtt_samples.iter().map(|&(_, r)| r).min().unwrap();
    assert!(min > floor, "min rtt {min} not above the propagation floor");
    assert!(
        min < SimTime::from_micros(40_200),
        "min rtt {min} unexpectedly high"
    );
}

#[test]
fn conservation_and_queue_bound_hold_across_policies() {
    for policy in [PolicyKind::Baseline, PolicyKind::Reactive, PolicyKind::Proactive] {
        for seed in [1u64, 7] {
            let out = run(policy, seed, 4, true);
            assert!(
                out.counters.conservation_holds(),
                "{policy} seed {seed}: {:?}",
                out.counters
            );
            assert!(out.counters.max_queue_backlog <= 500);
            assert!(out.counters.data_packets_sent > 0);
            assert!(out.metrics.delivered_bytes() > 0);
        }
    }
}

#[test]
fn identical_seeds_replay_identically() {
    let make = || {
        let mut cfg = sim_config(PolicyKind::Reactive, 3, 42);
        cfg.record_event_log = true;
        Simulation::new(cfg, blockage_trace(3, 42)).unwrap().run()
    };
    let a = make();
    let b = make();
    assert_eq!(a.event_log.as_ref().unwrap(), b.event_log.as_ref().unwrap());
    assert_eq!(a.metrics.rtt_samples, b.metrics.rtt_samples);
    assert_eq!(a.metrics.delivered_bytes(), b.metrics.delivered_bytes());
    assert_eq!(a.counters.data_packets_sent, b.counters.data_packets_sent);
    assert_eq!(a.counters.channel_drops, b.counters.channel_drops);
}

// Delivered application bytes cannot exceed what the channel could carry
// plus one queue's worth of buffered packets.
#[test]
fn throughput_bounded_by_channel_integral() {
    let out = run(PolicyKind::Baseline, 3, 4, true);
    let series = &out.metrics.channel_series;
    let tick = SimTime::from_millis(10).as_secs_f64();
    let capacity_bits: f64 = series.iter().map(|s| s.rate_bps as f64 * tick).sum();
    let queue_slack_bits = 500.0 * 8200.0 * 8.0;
    let delivered_bits = out.metrics.delivered_bytes() as f64 * 8.0;
    assert!(
        delivered_bits <= capacity_bits + queue_slack_bits,
        "delivered {delivered_bits} > channel capacity {capacity_bits}"
    );
}

#[test]
fn bulk_run_produces_cwnd_series_within_horizon() {
    let out = run(PolicyKind::Baseline, 5, 7, false);
    assert!(!out.metrics.cwnd_series.is_empty());
    let last = out.metrics.cwnd_series.last().unwrap();
    assert!(last.time <= SimTime::from_secs(7));
    assert!(out.metrics.delivered_bytes() > 0);
}

// Once steered, the sender's window equals the latest proxy command at
// every observation (RTO re-clamps within the same event).
#[test]
fn steered_window_tracks_commands() {
    let out = run(PolicyKind::Reactive, 3, 4, true);
    let commands: Vec<(SimTime, u64)> = out
        .proxy_log
        .iter()
        .filter(|e| e.event == ProxyEvent::Command)
        .map(|e| (e.time, e.cwnd_bytes))
        .collect();
    assert!(!commands.is_empty());
    let first_cmd = commands[0].0;
    for sample in out.metrics.cwnd_series.iter().filter(|s| s.time >= first_cmd) {
        let commanded = commands
            .iter()
            .take_while(|&&(t, _)| t <= sample.time)
            .last()
            .map(|&(_, c)| c)
            .unwrap();
        assert_eq!(
            sample.cwnd_bytes, commanded,
            "window diverged from command at {}",
            sample.time
        );
    }
}

// With a constant channel, reactive and proactive settle on the same window.
#[test]
fn policies_converge_on_a_constant_channel() {
    let reactive = run(PolicyKind::Reactive, 3, 3, false);
    let proactive = run(PolicyKind::Proactive, 3, 3, false);
    let last = |out: &RunOutput| out.metrics.cwnd_series.last().unwrap().cwnd_bytes;
    assert_eq!(last(&reactive), last(&proactive));
    // 1.5 Gbps x ~40 ms: just above 7.5 MB once the measured min-RTT lands.
    let w = last(&reactive);
    assert!((7_400_000..7_600_000).contains(&w), "window {w}");
}
