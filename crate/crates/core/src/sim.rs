//! Scenario wiring: bulk sender, wired backhaul, access-point queue,
//! trace-driven wireless hop, sink, and the proxy control path, all driven by
//! one deterministic event loop.
//!
//! Topology (fixed, single flow):
//!
//! ```text
//! sender/proxy --- wired (rate, one-way delay) --- AP [pfifo] --- wireless --- sink
//! ```
//!
//! Data packets cross the wired link, wait in the AP's tail-drop queue, and
//! serialize over the wireless hop at the offered rate of the currently
//! selected MCS, with an independent per-packet loss draw at the current
//! BLER. The sink acknowledges every data packet; ACKs return over the
//! wireless uplink (same rate, no loss) and the wired link. The channel is
//! re-evaluated on a fixed tick; when the offered rate changes, the AP sends
//! the proxy a report after a short control-path delay, and the proxy may
//! override the sender's congestion window.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelTrace, InterpDomain};
use crate::engine::EventQueue;
use crate::link::WiredLink;
use crate::metrics::FlowMetrics;
use crate::packet::Packet;
use crate::phy::{update_link, LinkAbstractionConfig, LinkState};
use crate::proxy::{
    emit_report_if_bdp_changed, ApReport, PolicyKind, Proxy, ProxyConfig, ProxyDecision,
    ProxyLogEntry,
};
use crate::queue::FifoQueue;
use crate::tcp::{TcpConfig, TcpSender};
use crate::time::{tx_time, SimTime};

const FLOW_ID: u32 = 1;

#[derive(Debug, Clone)]
pub struct TopologyConfig {
    pub wired_rate_bps: u64,
    pub wired_one_way_delay: SimTime,
    /// AP queue size in packets.
    pub queue_capacity: usize,
    /// Fixed per-data-packet overhead on top of the payload.
    pub header_bytes: u32,
    /// On-wire size of an ACK.
    pub ack_bytes: u32,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            wired_rate_bps: 10_000_000_000,
            wired_one_way_delay: SimTime::from_millis(20),
            queue_capacity: 500,
            header_bytes: 60,
            ack_bytes: 60,
        }
    }
}

#[derive(Clone)]
pub struct SimConfig {
    pub topology: TopologyConfig,
    pub link: LinkAbstractionConfig,
    pub tcp: TcpConfig,
    pub proxy: ProxyConfig,
    /// Channel re-evaluation (and beam re-selection) period.
    pub channel_update_interval: SimTime,
    pub interp: InterpDomain,
    pub duration: SimTime,
    /// When the bulk source starts.
    pub app_start: SimTime,
    /// Throughput-series window.
    pub metrics_interval: SimTime,
    pub seed: u64,
    pub record_event_log: bool,
}

impl SimConfig {
    /// Assembles a config with consistent cross-module derived fields (the
    /// min-RTT priors follow the wired delay; the proxy's minimum rate
    /// follows the MCS table).
    pub fn new(
        topology: TopologyConfig,
        link: LinkAbstractionConfig,
        tcp: TcpConfig,
        policy: PolicyKind,
        duration: SimTime,
        seed: u64,
    ) -> Self {
        let min_rate = crate::phy::offered_rate_bps(link.mcs_table.lowest(), link.bandwidth_hz);
        let prior = topology.wired_one_way_delay + topology.wired_one_way_delay;
        let mut tcp = tcp;
        tcp.min_rtt_prior = prior;
        let mut proxy = ProxyConfig::new(policy, min_rate, tcp.mss_bytes);
        proxy.min_rtt_prior = prior;
        SimConfig {
            topology,
            link,
            tcp,
            proxy,
            channel_update_interval: SimTime::from_millis(10),
            interp: InterpDomain::Db,
            duration,
            app_start: SimTime::from_millis(200),
            metrics_interval: SimTime::from_millis(100),
            seed,
            record_event_log: false,
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        self.link.validate()?;
        self.proxy.validate()?;
        if self.duration == SimTime::ZERO {
            return Err("duration must be > 0");
        }
        if self.channel_update_interval == SimTime::ZERO {
            return Err("channel_update_interval must be > 0");
        }
        if self.metrics_interval == SimTime::ZERO {
            return Err("metrics_interval must be > 0");
        }
        if self.tcp.mss_bytes == 0 {
            return Err("mss must be > 0");
        }
        if self.topology.queue_capacity == 0 {
            return Err("queue capacity must be > 0");
        }
        if self.topology.wired_rate_bps == 0 {
            return Err("wired rate must be > 0");
        }
        Ok(())
    }
}

/// Packet bookkeeping for the conservation identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counters {
    pub data_packets_sent: u64,
    /// Data packets handed to the sink, duplicates included.
    pub data_packets_delivered: u64,
    pub queue_drops: u64,
    pub channel_drops: u64,
    /// Data packets still in the wired pipe, the AP queue, or on the air
    /// when the run ended.
    pub in_flight_at_end: u64,
    pub acks_sent: u64,
    pub acks_delivered: u64,
    pub rto_count: u64,
    pub fast_retx_count: u64,
    pub max_queue_backlog: usize,
}

impl Counters {
    /// `sent = delivered + dropped_at_queue + dropped_by_channel + in_flight`.
    pub fn conservation_holds(&self) -> bool {
        self.data_packets_sent
            == self.data_packets_delivered
                + self.queue_drops
                + self.channel_drops
                + self.in_flight_at_end
    }
}

/// Everything a run produces.
pub struct RunOutput {
    pub metrics: FlowMetrics,
    pub counters: Counters,
    pub proxy_log: Vec<ProxyLogEntry>,
    pub event_log: Option<Vec<String>>,
}

enum SimEvent {
    AppStart,
    ChannelTick,
    /// Data packet reaches the AP.
    WiredDownArrive(Packet),
    /// Wireless serialization of the in-service packet completes.
    WirelessTxDone,
    /// Head-of-line ACK finishes crossing the wireless uplink.
    UplinkTxDone,
    /// ACK reaches the sender.
    WiredUpArrive(Packet),
    ReportArrive(ApReport),
    RtoTimer,
    TtrTimer { gen: u64 },
    RampTimer { gen: u64 },
}

/// In-order reassembly at the sink.
struct Receiver {
    rcv_nxt: u64,
    /// Out-of-order segments: start byte -> length.
    ooo: alloc::collections::BTreeMap<u64, u32>,
}

impl Receiver {
    fn new() -> Self {
        Receiver {
            rcv_nxt: 0,
            ooo: alloc::collections::BTreeMap::new(),
        }
    }

    /// Accepts a data segment, advancing the in-order point and draining any
    /// newly contiguous buffered segments. Stale duplicates are ignored.
    fn on_data(&mut self, seq: u64, len: u32) {
        if seq == self.rcv_nxt {
            self.rcv_nxt += len as u64;
            while let Some((&s, &l)) = self.ooo.first_key_value() {
                if s > self.rcv_nxt {
                    break;
                }
                self.ooo.pop_first();
                let end = s + l as u64;
                if end > self.rcv_nxt {
                    self.rcv_nxt = end;
                }
            }
        } else if seq > self.rcv_nxt {
            self.ooo.insert(seq, len);
        }
    }
}

pub struct Simulation {
    cfg: SimConfig,
    trace: ChannelTrace,
    queue: EventQueue<SimEvent>,
    sender: TcpSender,
    receiver: Receiver,
    proxy: Proxy,
    wired_down: WiredLink,
    wired_up: WiredLink,
    ap_queue: FifoQueue,
    link_state: LinkState,
    last_reported_rate: Option<u64>,
    /// Data packet on the air, with its pre-drawn loss outcome.
    in_service: Option<(Packet, bool)>,
    uplink: alloc::collections::VecDeque<Packet>,
    uplink_busy: bool,
    wired_down_in_transit: u64,
    /// Earliest pending RTO event, a lower bound that avoids rescheduling on
    /// every ACK; events revalidate the live deadline when they fire.
    rto_event_time: Option<SimTime>,
    loss_rng: ChaCha8Rng,
    metrics: FlowMetrics,
    counters: Counters,
    last_cwnd_sample: (u64, u64),
    event_log: Option<Vec<String>>,
}

impl Simulation {
    pub fn new(cfg: SimConfig, trace: ChannelTrace) -> Result<Self, &'static str> {
        cfg.validate()?;
        let sender = TcpSender::new(cfg.tcp.clone());
        let proxy = Proxy::new(cfg.proxy.clone());
        let wired_down = WiredLink::new(cfg.topology.wired_rate_bps, cfg.topology.wired_one_way_delay);
        let wired_up = WiredLink::new(cfg.topology.wired_rate_bps, cfg.topology.wired_one_way_delay);
        let ap_queue = FifoQueue::new(cfg.topology.queue_capacity);
        // Stream 1 is the per-packet loss draw; stream 0 belongs to the
        // synthetic trace generator.
        let mut loss_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        loss_rng.set_stream(1);
        let metrics = FlowMetrics::new(cfg.metrics_interval);
        let event_log = cfg.record_event_log.then(Vec::new);
        Ok(Simulation {
            trace,
            queue: EventQueue::new(),
            sender,
            receiver: Receiver::new(),
            proxy,
            wired_down,
            wired_up,
            ap_queue,
            link_state: LinkState::outage_at(SimTime::ZERO),
            last_reported_rate: None,
            in_service: None,
            uplink: alloc::collections::VecDeque::new(),
            uplink_busy: false,
            wired_down_in_transit: 0,
            rto_event_time: None,
            loss_rng,
            metrics,
            counters: Counters::default(),
            last_cwnd_sample: (0, 0),
            event_log,
            cfg,
        })
    }

    /// Runs the scenario to its configured duration.
    pub fn run(mut self) -> RunOutput {
        self.queue.schedule(SimTime::ZERO, SimEvent::ChannelTick);
        let app_start = self.cfg.app_start;
        if app_start <= self.cfg.duration {
            self.queue.schedule(app_start, SimEvent::AppStart);
        }

        while let Some(next) = self.queue.peek_time() {
            if next > self.cfg.duration {
                break;
            }
            let (now, id, event) = self.queue.pop().expect("peeked event");
            if let Some(log) = &mut self.event_log {
                log.push(format!("{} {} {}", now.as_nanos(), id.raw(), describe(&event)));
            }
            self.dispatch(now, event);
            self.sample_cwnd(now);
        }
        self.finalize()
    }

    fn dispatch(&mut self, now: SimTime, event: SimEvent) {
        match event {
            SimEvent::AppStart => {
                self.sender.start_app(now, None);
                self.flush_sender(now);
            }
            SimEvent::ChannelTick => self.on_channel_tick(now),
            SimEvent::WiredDownArrive(packet) => {
                self.wired_down_in_transit -= 1;
                if self.ap_queue.enqueue(packet) {
                    self.try_start_wireless(now);
                }
            }
            SimEvent::WirelessTxDone => self.on_wireless_done(now),
            SimEvent::UplinkTxDone => self.on_uplink_done(now),
            SimEvent::WiredUpArrive(ack) => self.on_ack_arrival(now, ack),
            SimEvent::ReportArrive(report) => {
                let decision = self.proxy.on_report(now, &report);
                self.apply_proxy_decision(now, decision);
            }
            SimEvent::RtoTimer => {
                if self.rto_event_time == Some(now) {
                    self.rto_event_time = None;
                }
                match self.sender.rto_deadline() {
                    None => {}
                    Some(d) if d > now => self.schedule_rto_event(now, d),
                    Some(_) => {
                        self.sender.on_rto_timer(now);
                        self.flush_sender(now);
                    }
                }
            }
            SimEvent::TtrTimer { gen } => {
                let decision = self.proxy.on_ttr_expired(now, gen);
                self.apply_proxy_decision(now, decision);
            }
            SimEvent::RampTimer { gen } => {
                let decision = self.proxy.on_ramp_tick(now, gen);
                self.apply_proxy_decision(now, decision);
            }
        }
    }

    fn on_channel_tick(&mut self, now: SimTime) {
        self.link_state = update_link(&self.trace, now, &self.cfg.link, self.cfg.interp);
        self.metrics
            .record_channel(now, self.link_state.mcs_index(), self.link_state.rate_bps);

        if self.cfg.proxy.policy != PolicyKind::Baseline {
            if let Some(report) = emit_report_if_bdp_changed(&self.link_state, self.last_reported_rate)
            {
                self.last_reported_rate = Some(report.rate_bps);
                self.queue
                    .schedule(now + self.cfg.proxy.report_latency, SimEvent::ReportArrive(report));
            }
        }

        // A rate recovery may unblock stalled service in either direction.
        self.try_start_wireless(now);
        self.try_start_uplink(now);

        let next = now + self.cfg.channel_update_interval;
        if next <= self.cfg.duration {
            self.queue.schedule(next, SimEvent::ChannelTick);
        }
    }

    fn try_start_wireless(&mut self, now: SimTime) {
        if self.in_service.is_some() || self.link_state.rate_bps == 0 {
            return;
        }
        let Some(packet) = self.ap_queue.dequeue() else {
            return;
        };
        // Rate and BLER are committed at transmission start.
        let lost = self.loss_rng.gen_bool(self.link_state.bler.clamp(0.0, 1.0));
        let done = now + tx_time(packet.size_bytes as u64, self.link_state.rate_bps);
        self.in_service = Some((packet, lost));
        self.queue.schedule(done, SimEvent::WirelessTxDone);
    }

    fn on_wireless_done(&mut self, now: SimTime) {
        let (packet, lost) = self.in_service.take().expect("wireless service state");
        if lost {
            self.counters.channel_drops += 1;
        } else {
            self.deliver_to_sink(now, packet);
        }
        self.try_start_wireless(now);
    }

    fn deliver_to_sink(&mut self, now: SimTime, packet: Packet) {
        self.counters.data_packets_delivered += 1;
        let before = self.receiver.rcv_nxt;
        self.receiver.on_data(packet.seq, packet.payload_bytes);
        let advanced = self.receiver.rcv_nxt - before;
        if advanced > 0 {
            self.metrics.record_delivery(now, advanced);
        }
        let ack = Packet::ack(
            FLOW_ID,
            self.receiver.rcv_nxt,
            self.cfg.topology.ack_bytes,
            now,
            packet.send_timestamp,
            packet.retx,
        );
        self.counters.acks_sent += 1;
        self.uplink.push_back(ack);
        self.try_start_uplink(now);
    }

    fn try_start_uplink(&mut self, now: SimTime) {
        if self.uplink_busy || self.link_state.rate_bps == 0 || self.uplink.is_empty() {
            return;
        }
        let size = self.uplink.front().expect("uplink head").size_bytes;
        let done = now + tx_time(size as u64, self.link_state.rate_bps);
        self.uplink_busy = true;
        self.queue.schedule(done, SimEvent::UplinkTxDone);
    }

    fn on_uplink_done(&mut self, now: SimTime) {
        let ack = self.uplink.pop_front().expect("uplink service state");
        self.uplink_busy = false;
        let arrival = self.wired_up.transmit(now, ack.size_bytes);
        self.queue.schedule(arrival, SimEvent::WiredUpArrive(ack));
        self.try_start_uplink(now);
    }

    fn on_ack_arrival(&mut self, now: SimTime, ack: Packet) {
        self.counters.acks_delivered += 1;
        let echo = Some((ack.echo_timestamp, ack.echo_retx));
        if let Some(rtt) = self.sender.on_ack(now, ack.ack_seq, echo) {
            self.metrics.record_rtt(now, rtt);
            self.proxy.track_min_rtt(rtt);
        }
        self.flush_sender(now);
    }

    fn apply_proxy_decision(&mut self, now: SimTime, decision: ProxyDecision) {
        if let Some((at, gen)) = decision.arm_ttr {
            self.queue.schedule(at, SimEvent::TtrTimer { gen });
        }
        if let Some((at, gen)) = decision.arm_ramp {
            self.queue.schedule(at, SimEvent::RampTimer { gen });
        }
        if let Some(cwnd) = decision.cwnd_bytes {
            self.sender.set_cwnd_override(now, cwnd);
            self.flush_sender(now);
        }
    }

    /// Puts every segment the sender queued onto the wired link and keeps the
    /// RTO event in sync.
    fn flush_sender(&mut self, now: SimTime) {
        for seg in self.sender.take_segments() {
            let packet = Packet::data(
                FLOW_ID,
                seg.seq,
                seg.len,
                self.cfg.topology.header_bytes,
                now,
                seg.retx,
            );
            self.counters.data_packets_sent += 1;
            let arrival = self.wired_down.transmit(now, packet.size_bytes);
            self.wired_down_in_transit += 1;
            self.queue.schedule(arrival, SimEvent::WiredDownArrive(packet));
        }
        if let Some(deadline) = self.sender.rto_deadline() {
            self.schedule_rto_event(now, deadline);
        }
    }

    /// Keeps at least one RTO event pending at or before the live deadline.
    fn schedule_rto_event(&mut self, now: SimTime, deadline: SimTime) {
        let fire = deadline.max(now);
        if self.rto_event_time.is_none_or(|t| fire < t) {
            self.queue.schedule(fire, SimEvent::RtoTimer);
            self.rto_event_time = Some(fire);
        }
    }

    fn sample_cwnd(&mut self, now: SimTime) {
        let current = (self.sender.cwnd_bytes(), self.sender.ssthresh_bytes());
        if current != self.last_cwnd_sample {
            self.last_cwnd_sample = current;
            self.metrics.record_cwnd(now, current.0, current.1);
        }
    }

    fn finalize(mut self) -> RunOutput {
        self.counters.queue_drops = self.ap_queue.drop_count();
        self.counters.max_queue_backlog = self.ap_queue.max_backlog();
        self.counters.rto_count = self.sender.rto_count();
        self.counters.fast_retx_count = self.sender.fast_retx_count();
        self.counters.in_flight_at_end = self.wired_down_in_transit
            + self.ap_queue.len() as u64
            + self.in_service.is_some() as u64;
        debug_assert!(
            self.counters.conservation_holds(),
            "packet conservation violated: {:?}",
            self.counters
        );
        RunOutput {
            metrics: self.metrics,
            counters: self.counters,
            proxy_log: self.proxy.take_log(),
            event_log: self.event_log,
        }
    }
}

fn describe(event: &SimEvent) -> String {
    match event {
        SimEvent::AppStart => format!("app-start"),
        SimEvent::ChannelTick => format!("channel-tick"),
        SimEvent::WiredDownArrive(p) => format!("wired-down-arrive seq={} retx={}", p.seq, p.retx),
        SimEvent::WirelessTxDone => format!("wireless-tx-done"),
        SimEvent::UplinkTxDone => format!("uplink-tx-done"),
        SimEvent::WiredUpArrive(a) => format!("wired-up-arrive ack={}", a.ack_seq),
        SimEvent::ReportArrive(r) => format!("report-arrive mcs={} rate={}", r.mcs_index, r.rate_bps),
        SimEvent::RtoTimer => format!("rto-timer"),
        SimEvent::TtrTimer { gen } => format!("ttr-timer gen={gen}"),
        SimEvent::RampTimer { gen } => format!("ramp-timer gen={gen}"),
    }
}
