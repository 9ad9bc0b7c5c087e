//! Cross-layer congestion-window controller.
//!
//! The access point reports the offered rate whenever the bandwidth-delay
//! product estimate changes (equivalently, whenever the MCS changes). The
//! proxy tracks the flow's minimum RTT and turns each report into a window
//! command:
//!
//! - **Reactive**: pin the window to the current bandwidth-delay product,
//!   `C = R * t_min`.
//! - **Proactive**: same tracking, but an MCS drop of two or more levels
//!   within the detection window switches to a conservative mode that pins
//!   the window to the minimum BDP (lowest MCS rate) for a fixed
//!   time-to-recover, then ramps back up gradually.
//!
//! An offered rate of zero (outage) floors the command at one MSS so a probe
//! segment can detect recovery.

use alloc::vec::Vec;
use alloc::collections::VecDeque;
use core::fmt;

use crate::channel::BeamGrid;
use crate::phy::LinkState;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// No proxy; the sender's own congestion control runs untouched.
    Baseline,
    Reactive,
    Proactive,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Baseline => write!(f, "baseline"),
            PolicyKind::Reactive => write!(f, "reactive"),
            PolicyKind::Proactive => write!(f, "proactive"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProxyConfig {
    pub policy: PolicyKind,
    /// Trailing window for MCS-drop detection.
    pub detection_window: SimTime,
    /// Drop (in MCS levels) within the window that triggers conservatism.
    pub mcs_drop_threshold: u8,
    /// Time-to-recover: how long conservative mode holds.
    pub ttr: SimTime,
    /// Fraction of the remaining gap recovered per RTT while ramping.
    pub ramp_fraction: f64,
    /// AP-to-proxy control-path delay.
    pub report_latency: SimTime,
    /// Min-RTT estimate before any sample exists.
    pub min_rtt_prior: SimTime,
    /// Offered rate of the lowest MCS, for the minimum-BDP clamp.
    pub min_rate_bps: u64,
    pub mss_bytes: u32,
}

impl ProxyConfig {
    pub fn new(policy: PolicyKind, min_rate_bps: u64, mss_bytes: u32) -> Self {
        ProxyConfig {
            policy,
            detection_window: SimTime::from_millis(150),
            mcs_drop_threshold: 2,
            ttr: SimTime::from_millis(800),
            ramp_fraction: 0.25,
            report_latency: SimTime::from_millis(1),
            min_rtt_prior: SimTime::from_millis(40),
            min_rate_bps,
            mss_bytes,
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if self.detection_window == SimTime::ZERO {
            return Err("detection_window must be > 0");
        }
        if self.ttr == SimTime::ZERO {
            return Err("ttr must be > 0");
        }
        if !(self.ramp_fraction > 0.0 && self.ramp_fraction <= 1.0) {
            return Err("ramp_fraction must be in (0, 1]");
        }
        Ok(())
    }
}

/// What the AP tells the proxy when the BDP estimate changes.
#[derive(Debug, Clone)]
pub struct ApReport {
    pub time: SimTime,
    /// Selected MCS index; 0 means outage.
    pub mcs_index: u8,
    pub rate_bps: u64,
    /// `(tx_angle, rx_angle)` of the selected beam pair.
    pub beam_pair: Option<(f64, f64)>,
    /// Full power matrix, when the AP chooses to attach it.
    pub grid: Option<BeamGrid>,
}

/// Emits a report iff the offered rate differs from the last reported one.
pub fn emit_report_if_bdp_changed(link: &LinkState, last_reported_rate: Option<u64>) -> Option<ApReport> {
    if last_reported_rate == Some(link.rate_bps) {
        return None;
    }
    Some(ApReport {
        time: link.time,
        mcs_index: link.mcs_index(),
        rate_bps: link.rate_bps,
        beam_pair: link.beam.map(|b| (b.tx_angle_deg, b.rx_angle_deg)),
        grid: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProactiveMode {
    Normal,
    Conservative,
    Ramping,
}

/// One line of the proxy's decision log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxyEvent {
    Report,
    Command,
    EnterConservative,
    EnterRamping,
    EnterNormal,
}

impl fmt::Display for ProxyEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProxyEvent::Report => write!(f, "report"),
            ProxyEvent::Command => write!(f, "command"),
            ProxyEvent::EnterConservative => write!(f, "conservative"),
            ProxyEvent::EnterRamping => write!(f, "ramping"),
            ProxyEvent::EnterNormal => write!(f, "normal"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProxyLogEntry {
    pub time: SimTime,
    pub event: ProxyEvent,
    pub mcs_index: u8,
    pub cwnd_bytes: u64,
}

/// Timers the caller must schedule on the proxy's behalf. Generations
/// invalidate stale expirations after a re-trigger.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProxyDecision {
    /// New congestion-window command, if any.
    pub cwnd_bytes: Option<u64>,
    pub arm_ttr: Option<(SimTime, u64)>,
    pub arm_ramp: Option<(SimTime, u64)>,
}

/// Policy state plus the min-RTT tracker.
pub struct Proxy {
    cfg: ProxyConfig,
    min_rtt: Option<SimTime>,
    mode: ProactiveMode,
    /// `(report time, mcs)` ring spanning at least the detection window,
    /// plus one pre-window entry to anchor the window start value.
    mcs_history: VecDeque<(SimTime, u8)>,
    ttr_deadline: SimTime,
    ttr_gen: u64,
    ramp_gen: u64,
    ramp_cwnd: f64,
    last_rate_bps: u64,
    last_mcs: u8,
    commanded: Option<u64>,
    log: Vec<ProxyLogEntry>,
}

impl Proxy {
    pub fn new(cfg: ProxyConfig) -> Self {
        Proxy {
            cfg,
            min_rtt: None,
            mode: ProactiveMode::Normal,
            mcs_history: VecDeque::new(),
            ttr_deadline: SimTime::ZERO,
            ttr_gen: 0,
            ramp_gen: 0,
            ramp_cwnd: 0.0,
            last_rate_bps: 0,
            last_mcs: 0,
            commanded: None,
            log: Vec::new(),
        }
    }

    pub fn config(&self) -> &ProxyConfig {
        &self.cfg
    }

    pub fn mode(&self) -> ProactiveMode {
        self.mode
    }

    /// Last commanded congestion window, if any.
    pub fn commanded_cwnd(&self) -> Option<u64> {
        self.commanded
    }

    pub fn log(&self) -> &[ProxyLogEntry] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<ProxyLogEntry> {
        core::mem::take(&mut self.log)
    }

    /// Minimum observed RTT, or the configured prior before any sample.
    pub fn t_min(&self) -> SimTime {
        self.min_rtt.unwrap_or(self.cfg.min_rtt_prior)
    }

    /// Feeds one RTT observation of the steered flow.
    pub fn track_min_rtt(&mut self, sample: SimTime) {
        debug_assert!(sample > SimTime::ZERO);
        self.min_rtt = Some(match self.min_rtt {
            Some(m) => m.min(sample),
            None => sample,
        });
    }

    /// Bandwidth-delay product in bytes at the tracked min-RTT, floored at
    /// one MSS.
    pub fn bdp_bytes(&self, rate_bps: u64) -> u64 {
        let bytes = rate_bps as u128 * self.t_min().as_nanos() as u128 / 8_000_000_000u128;
        (bytes as u64).max(self.cfg.mss_bytes as u64)
    }

    fn min_bdp_bytes(&self) -> u64 {
        self.bdp_bytes(self.cfg.min_rate_bps)
    }

    fn push_log(&mut self, time: SimTime, event: ProxyEvent, cwnd: u64) {
        self.log.push(ProxyLogEntry {
            time,
            event,
            mcs_index: self.last_mcs,
            cwnd_bytes: cwnd,
        });
    }

    fn command(&mut self, now: SimTime, cwnd: u64) -> Option<u64> {
        self.commanded = Some(cwnd);
        self.push_log(now, ProxyEvent::Command, cwnd);
        Some(cwnd)
    }

    /// Records the report in the MCS history and returns the largest MCS
    /// visible in the trailing detection window (including the value that
    /// held at the window start).
    fn history_max(&mut self, report_time: SimTime) -> u8 {
        let window_start = report_time.saturating_sub(self.cfg.detection_window);
        // Keep the most recent entry at or before the window start; it
        // defines the MCS at the window boundary.
        while self.mcs_history.len() >= 2 && self.mcs_history[1].0 <= window_start {
            self.mcs_history.pop_front();
        }
        self.mcs_history.iter().map(|&(_, m)| m).max().unwrap_or(0)
    }

    /// Handles a report at its arrival time `now` (report latency included by
    /// the caller).
    pub fn on_report(&mut self, now: SimTime, report: &ApReport) -> ProxyDecision {
        debug_assert!(self.cfg.policy != PolicyKind::Baseline);
        self.last_rate_bps = report.rate_bps;
        self.last_mcs = report.mcs_index;
        self.push_log(now, ProxyEvent::Report, self.commanded.unwrap_or(0));

        let mut decision = ProxyDecision::default();
        match self.cfg.policy {
            PolicyKind::Baseline => {}
            PolicyKind::Reactive => {
                decision.cwnd_bytes = self.command(now, self.bdp_bytes(report.rate_bps));
            }
            PolicyKind::Proactive => {
                self.mcs_history.push_back((report.time, report.mcs_index));
                let max_in_window = self.history_max(report.time);
                let dropped = max_in_window.saturating_sub(report.mcs_index)
                    >= self.cfg.mcs_drop_threshold;
                let outage = report.rate_bps == 0;
                match self.mode {
                    ProactiveMode::Normal | ProactiveMode::Ramping if dropped => {
                        if self.mode == ProactiveMode::Ramping {
                            self.ramp_gen += 1;
                        }
                        self.mode = ProactiveMode::Conservative;
                        self.ttr_gen += 1;
                        self.ttr_deadline = now + self.cfg.ttr;
                        self.push_log(now, ProxyEvent::EnterConservative, self.commanded.unwrap_or(0));
                        let target = if outage { 0 } else { self.min_bdp_bytes() };
                        decision.cwnd_bytes = self.command(now, target.max(self.cfg.mss_bytes as u64));
                        decision.arm_ttr = Some((self.ttr_deadline, self.ttr_gen));
                    }
                    ProactiveMode::Normal => {
                        decision.cwnd_bytes = self.command(now, self.bdp_bytes(report.rate_bps));
                    }
                    ProactiveMode::Conservative => {
                        // Pinned until the TTR expires, regardless of what the
                        // channel does; outage still floors to one MSS.
                        let target = if outage {
                            self.cfg.mss_bytes as u64
                        } else {
                            self.min_bdp_bytes()
                        };
                        if self.commanded != Some(target) {
                            decision.cwnd_bytes = self.command(now, target);
                        }
                    }
                    ProactiveMode::Ramping => {
                        // Rate moved without a qualifying drop. Never exceed
                        // what the reactive policy would command: follow the
                        // target down immediately, but keep climbing only via
                        // ramp ticks.
                        let target = self.bdp_bytes(report.rate_bps);
                        if outage {
                            decision.cwnd_bytes = self.command(now, self.cfg.mss_bytes as u64);
                        } else if (target as f64) < self.ramp_cwnd {
                            self.ramp_cwnd = target as f64;
                            decision.cwnd_bytes = self.command(now, target);
                        }
                    }
                }
            }
        }
        decision
    }

    /// Conservative-mode expiry: switch to ramping and schedule the first
    /// ramp step one RTT out.
    pub fn on_ttr_expired(&mut self, now: SimTime, gen: u64) -> ProxyDecision {
        let mut decision = ProxyDecision::default();
        if gen != self.ttr_gen || self.mode != ProactiveMode::Conservative {
            return decision;
        }
        self.mode = ProactiveMode::Ramping;
        self.ramp_gen += 1;
        self.ramp_cwnd = self.commanded.unwrap_or(self.min_bdp_bytes()) as f64;
        self.push_log(now, ProxyEvent::EnterRamping, self.commanded.unwrap_or(0));
        decision.arm_ramp = Some((now + self.t_min(), self.ramp_gen));
        decision
    }

    /// One ramp step: close a fixed fraction of the gap to the live BDP
    /// target; within one MSS of it, snap to the target and return to normal.
    pub fn on_ramp_tick(&mut self, now: SimTime, gen: u64) -> ProxyDecision {
        let mut decision = ProxyDecision::default();
        if gen != self.ramp_gen || self.mode != ProactiveMode::Ramping {
            return decision;
        }
        if self.last_rate_bps == 0 {
            // Outage persists: hold the floor and keep the ramp alive.
            decision.cwnd_bytes = self.command(now, self.cfg.mss_bytes as u64);
            decision.arm_ramp = Some((now + self.t_min(), self.ramp_gen));
            return decision;
        }
        let target = self.bdp_bytes(self.last_rate_bps);
        let gap = target as f64 - self.ramp_cwnd;
        if libm::fabs(gap) <= self.cfg.mss_bytes as f64 {
            self.ramp_cwnd = target as f64;
            self.mode = ProactiveMode::Normal;
            decision.cwnd_bytes = self.command(now, target);
            self.push_log(now, ProxyEvent::EnterNormal, target);
        } else {
            self.ramp_cwnd += self.cfg.ramp_fraction * gap;
            let cwnd = (self.ramp_cwnd as u64).max(self.cfg.mss_bytes as u64);
            decision.cwnd_bytes = self.command(now, cwnd);
            decision.arm_ramp = Some((now + self.t_min(), self.ramp_gen));
        }
        decision
    }
}
