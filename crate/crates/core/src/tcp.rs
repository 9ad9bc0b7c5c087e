//! Simplified TCP sender: slow start, CUBIC congestion avoidance, fast
//! retransmit on three duplicate ACKs, RTO with go-back-N, and an external
//! congestion-window override hook.
//!
//! The sender never touches the event queue directly. It exposes the segments
//! it wants on the wire through [`TcpSender::take_segments`] and its RTO
//! deadline through [`TcpSender::rto_deadline`]; the simulation wiring turns
//! both into events. With the override hook engaged the window is owned by
//! the proxy: loss recovery still retransmits, but congestion-window growth
//! and reductions are suppressed.

use alloc::vec::Vec;

use crate::time::SimTime;

#[derive(Debug, Clone)]
pub struct TcpConfig {
    /// Segment payload size.
    pub mss_bytes: u32,
    pub initial_cwnd_mss: u32,
    pub initial_ssthresh_bytes: u64,
    pub rto_min: SimTime,
    pub rto_max: SimTime,
    /// CUBIC aggressiveness, MSS per cubic second.
    pub cubic_c: f64,
    /// CUBIC multiplicative-decrease factor.
    pub cubic_beta: f64,
    /// Min-RTT estimate before any sample exists.
    pub min_rtt_prior: SimTime,
    /// Receiver window cap; `None` models an unbounded sink.
    pub receiver_window: Option<u64>,
}

impl Default for TcpConfig {
    fn default() -> Self {
        TcpConfig {
            mss_bytes: 8140,
            initial_cwnd_mss: 10,
            initial_ssthresh_bytes: u64::MAX / 2,
            rto_min: SimTime::from_millis(200),
            rto_max: SimTime::from_secs(8),
            cubic_c: 0.4,
            cubic_beta: 0.7,
            min_rtt_prior: SimTime::from_millis(40),
            receiver_window: None,
        }
    }
}

/// Sender mode as observed from the outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcpMode {
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
    RtoRecovery,
    /// Congestion window owned by the proxy.
    ProxySteered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
    RtoRecovery,
}

/// CUBIC window state. `W(t) = c (t - epoch - K)^3 + w_max`, in MSS units
/// internally, floored at one MSS.
#[derive(Debug, Clone)]
pub struct CubicState {
    c: f64,
    beta: f64,
    mss: f64,
    w_max_bytes: f64,
    k_seconds: f64,
    epoch_start: Option<SimTime>,
}

impl CubicState {
    pub fn new(c: f64, beta: f64, mss_bytes: u32) -> Self {
        CubicState {
            c,
            beta,
            mss: mss_bytes as f64,
            w_max_bytes: 0.0,
            k_seconds: 0.0,
            epoch_start: None,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn w_max_bytes(&self) -> f64 {
        self.w_max_bytes
    }

    pub fn k_seconds(&self) -> f64 {
        self.k_seconds
    }

    pub fn epoch_start(&self) -> Option<SimTime> {
        self.epoch_start
    }

    /// Registers a congestion event at window `cwnd_bytes`: the window cubic
    /// origin becomes the pre-loss window and `K = cbrt(w_max (1 - beta) / c)`.
    pub fn on_congestion_event(&mut self, cwnd_bytes: u64, now: SimTime) {
        self.w_max_bytes = cwnd_bytes as f64;
        let w_max_mss = self.w_max_bytes / self.mss;
        self.k_seconds = libm::cbrt(w_max_mss * (1.0 - self.beta) / self.c);
        self.epoch_start = Some(now);
    }

    /// Starts an epoch when avoidance is (re)entered from slow start. Below
    /// the remembered origin the curve resumes toward it with the general
    /// `K = cbrt((w_max - cwnd) / c)`, so the window re-converges to its
    /// pre-loss level; above it the current window becomes the new origin.
    pub fn on_enter_avoidance(&mut self, cwnd_bytes: u64, now: SimTime) {
        let cwnd = cwnd_bytes as f64;
        if cwnd < self.w_max_bytes {
            let gap_mss = (self.w_max_bytes - cwnd) / self.mss;
            self.k_seconds = libm::cbrt(gap_mss / self.c);
        } else {
            self.w_max_bytes = cwnd;
            self.k_seconds = 0.0;
        }
        self.epoch_start = Some(now);
    }

    /// Exact cubic window in bytes at time `t`, before flooring to MSS.
    pub fn window_bytes_f64(&self, t: SimTime) -> f64 {
        let Some(epoch) = self.epoch_start else {
            return self.w_max_bytes.max(self.mss);
        };
        debug_assert!(t >= epoch);
        let dt = (t - epoch).as_secs_f64() - self.k_seconds;
        let w_mss = self.c * dt * dt * dt + self.w_max_bytes / self.mss;
        (w_mss * self.mss).max(self.mss)
    }

    pub fn window_bytes(&self, t: SimTime) -> u64 {
        self.window_bytes_f64(t) as u64
    }
}

/// A segment the sender wants on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentTx {
    pub seq: u64,
    pub len: u32,
    pub retx: bool,
}

/// Sender-side connection state for one bulk flow.
pub struct TcpSender {
    cfg: TcpConfig,
    cwnd_bytes: u64,
    ssthresh_bytes: u64,
    snd_una: u64,
    snd_nxt: u64,
    /// Highest sequence ever sent; anything below it re-sent is a retx.
    high_tx_mark: u64,
    phase: Phase,
    steered: bool,
    steer_cwnd: u64,
    dupack_count: u32,
    /// Fast-recovery exit point.
    recover: u64,
    /// Impatient partial-ACK handling: only the first partial ACK of a
    /// recovery episode restarts the RTO timer, so a window with many holes
    /// falls back to the timeout instead of grinding one hole per RTT.
    fr_timer_restarted: bool,
    srtt: Option<SimTime>,
    rttvar: SimTime,
    rto: SimTime,
    min_rtt: Option<SimTime>,
    cubic: CubicState,
    rto_deadline: Option<SimTime>,
    /// Application bytes available; `None` = unlimited bulk source.
    app_limit: Option<u64>,
    app_running: bool,
    out: Vec<SegmentTx>,
    rto_count: u64,
    fast_retx_count: u64,
}

impl TcpSender {
    pub fn new(cfg: TcpConfig) -> Self {
        let cwnd = cfg.initial_cwnd_mss as u64 * cfg.mss_bytes as u64;
        let cubic = CubicState::new(cfg.cubic_c, cfg.cubic_beta, cfg.mss_bytes);
        TcpSender {
            cwnd_bytes: cwnd,
            ssthresh_bytes: cfg.initial_ssthresh_bytes,
            snd_una: 0,
            snd_nxt: 0,
            high_tx_mark: 0,
            phase: Phase::SlowStart,
            steered: false,
            steer_cwnd: cwnd,
            dupack_count: 0,
            recover: 0,
            fr_timer_restarted: false,
            srtt: None,
            rttvar: SimTime::ZERO,
            rto: cfg.rto_min.max(SimTime::from_secs(1)),
            min_rtt: None,
            cubic,
            rto_deadline: None,
            app_limit: None,
            app_running: false,
            out: Vec::new(),
            rto_count: 0,
            fast_retx_count: 0,
            cfg,
        }
    }

    pub fn cwnd_bytes(&self) -> u64 {
        self.cwnd_bytes
    }

    pub fn ssthresh_bytes(&self) -> u64 {
        self.ssthresh_bytes
    }

    pub fn snd_una(&self) -> u64 {
        self.snd_una
    }

    pub fn snd_nxt(&self) -> u64 {
        self.snd_nxt
    }

    pub fn bytes_in_flight(&self) -> u64 {
        self.snd_nxt - self.snd_una
    }

    pub fn mss(&self) -> u32 {
        self.cfg.mss_bytes
    }

    pub fn rto_count(&self) -> u64 {
        self.rto_count
    }

    pub fn fast_retx_count(&self) -> u64 {
        self.fast_retx_count
    }

    pub fn srtt(&self) -> Option<SimTime> {
        self.srtt
    }

    pub fn rto(&self) -> SimTime {
        self.rto
    }

    pub fn cubic(&self) -> &CubicState {
        &self.cubic
    }

    pub fn mode(&self) -> TcpMode {
        if self.steered {
            return TcpMode::ProxySteered;
        }
        match self.phase {
            Phase::SlowStart => TcpMode::SlowStart,
            Phase::CongestionAvoidance => TcpMode::CongestionAvoidance,
            Phase::FastRecovery => TcpMode::FastRecovery,
            Phase::RtoRecovery => TcpMode::RtoRecovery,
        }
    }

    /// Running minimum RTT, or the configured prior before any sample.
    pub fn min_rtt(&self) -> SimTime {
        self.min_rtt.unwrap_or(self.cfg.min_rtt_prior)
    }

    /// Starts the application: bulk data from byte zero, optionally bounded.
    pub fn start_app(&mut self, now: SimTime, limit: Option<u64>) {
        self.app_running = true;
        self.app_limit = limit;
        self.fill_window(now);
    }

    /// Pending RTO expiry, if any data is outstanding.
    pub fn rto_deadline(&self) -> Option<SimTime> {
        self.rto_deadline
    }

    /// Drains the segments queued for transmission.
    pub fn take_segments(&mut self) -> Vec<SegmentTx> {
        core::mem::take(&mut self.out)
    }

    /// External congestion-window override: enters proxy-steered mode and
    /// pins the window. Loss recovery stays active. Last write wins.
    pub fn set_cwnd_override(&mut self, now: SimTime, cwnd_bytes: u64) {
        let floored = cwnd_bytes.max(self.cfg.mss_bytes as u64);
        self.steered = true;
        self.steer_cwnd = floored;
        self.cwnd_bytes = floored;
        self.fill_window(now);
    }

    fn effective_window(&self) -> u64 {
        match self.cfg.receiver_window {
            Some(rwnd) => self.cwnd_bytes.min(rwnd),
            None => self.cwnd_bytes,
        }
    }

    /// Emits new segments while the window has room and the application has
    /// data. The in-flight total never exceeds the window at a send decision.
    pub fn fill_window(&mut self, now: SimTime) {
        if !self.app_running {
            return;
        }
        let window = self.effective_window();
        let mss = self.cfg.mss_bytes as u64;
        loop {
            let remaining = match self.app_limit {
                Some(limit) => limit.saturating_sub(self.snd_nxt),
                None => u64::MAX,
            };
            if remaining == 0 {
                break;
            }
            let len = remaining.min(mss);
            if self.bytes_in_flight() + len > window {
                break;
            }
            let retx = self.snd_nxt < self.high_tx_mark;
            self.out.push(SegmentTx {
                seq: self.snd_nxt,
                len: len as u32,
                retx,
            });
            self.snd_nxt += len;
            self.high_tx_mark = self.high_tx_mark.max(self.snd_nxt);
            if self.rto_deadline.is_none() {
                self.rto_deadline = Some(now + self.rto);
            }
        }
    }

    fn update_rtt_estimators(&mut self, sample: SimTime) {
        match self.srtt {
            None => {
                self.srtt = Some(sample);
                self.rttvar = SimTime::from_nanos(sample.as_nanos() / 2);
            }
            Some(srtt) => {
                let err = if srtt >= sample { srtt - sample } else { sample - srtt };
                self.rttvar = SimTime::from_nanos(
                    (3 * self.rttvar.as_nanos() + err.as_nanos()) / 4,
                );
                self.srtt = Some(SimTime::from_nanos(
                    (7 * srtt.as_nanos() + sample.as_nanos()) / 8,
                ));
            }
        }
        let base = self.srtt.unwrap() + SimTime::from_nanos(4 * self.rttvar.as_nanos());
        self.rto = base.max(self.cfg.rto_min).min(self.cfg.rto_max);
        self.min_rtt = Some(match self.min_rtt {
            Some(m) => m.min(sample),
            None => sample,
        });
    }

    /// Processes a cumulative ACK. `echo` carries the send timestamp of the
    /// data packet that triggered it plus its retransmission flag; samples
    /// from retransmitted packets are discarded. Returns the RTT sample
    /// taken, if any.
    pub fn on_ack(&mut self, now: SimTime, ack_seq: u64, echo: Option<(SimTime, bool)>) -> Option<SimTime> {
        let mut rtt = None;
        if let Some((sent_at, was_retx)) = echo {
            if !was_retx {
                let sample = now - sent_at;
                self.update_rtt_estimators(sample);
                rtt = Some(sample);
            }
        }

        if ack_seq > self.snd_una {
            self.snd_una = ack_seq;
            // A late ACK for data sent before an RTO rollback can overtake
            // the rolled-back send point.
            if self.snd_nxt < self.snd_una {
                self.snd_nxt = self.snd_una;
            }
            self.dupack_count = 0;
            let mut restart_timer = true;
            if self.phase == Phase::FastRecovery {
                if ack_seq >= self.recover {
                    // The congestion event was registered at recovery entry;
                    // resuming avoidance picks the cubic curve back up there.
                    self.phase = Phase::CongestionAvoidance;
                } else {
                    // Partial ACK: the flight holds more holes. Retransmit
                    // the next one right away, with no further reduction;
                    // only the first partial ACK restarts the timer.
                    self.retransmit_head();
                    restart_timer = !self.fr_timer_restarted;
                    self.fr_timer_restarted = true;
                }
            }
            if !self.steered {
                self.grow_window(now);
            }
            if self.snd_una == self.snd_nxt {
                self.rto_deadline = None;
            } else if restart_timer {
                self.rto_deadline = Some(now + self.rto);
            }
            self.fill_window(now);
        } else if self.bytes_in_flight() > 0 {
            self.on_dupack(now);
        }
        rtt
    }

    fn grow_window(&mut self, now: SimTime) {
        let mss = self.cfg.mss_bytes as u64;
        match self.phase {
            Phase::SlowStart | Phase::RtoRecovery => {
                self.cwnd_bytes += mss;
                if self.cwnd_bytes >= self.ssthresh_bytes {
                    self.phase = Phase::CongestionAvoidance;
                    self.cubic.on_enter_avoidance(self.cwnd_bytes, now);
                }
            }
            Phase::CongestionAvoidance => {
                self.cwnd_bytes = self.cubic.window_bytes(now).max(mss);
            }
            Phase::FastRecovery => {}
        }
    }

    /// Duplicate-ACK accounting; the third duplicate triggers a fast
    /// retransmission of the first unacknowledged segment. While the
    /// cumulative ACK is still below the high-water mark of the previous
    /// loss episode, duplicates are echoes of that episode (go-back-N
    /// resends land as duplicates at the receiver) and must not start
    /// another reduction.
    pub fn on_dupack(&mut self, now: SimTime) {
        self.dupack_count += 1;
        if self.dupack_count == 3 && self.phase != Phase::FastRecovery && self.snd_una > self.recover
        {
            self.fast_retx_count += 1;
            self.retransmit_head();
            if !self.steered {
                let prior = self.cwnd_bytes;
                self.cubic.on_congestion_event(prior, now);
                let reduced = (prior as f64 * self.cfg.cubic_beta) as u64;
                self.ssthresh_bytes = reduced.max(2 * self.cfg.mss_bytes as u64);
                self.cwnd_bytes = self.ssthresh_bytes;
            }
            self.phase = Phase::FastRecovery;
            self.recover = self.snd_nxt;
            self.fr_timer_restarted = false;
            self.fill_window(now);
        }
    }

    fn retransmit_head(&mut self) {
        let len = match self.app_limit {
            Some(limit) => (limit - self.snd_una).min(self.cfg.mss_bytes as u64) as u32,
            None => self.cfg.mss_bytes,
        };
        self.out.push(SegmentTx {
            seq: self.snd_una,
            len,
            retx: true,
        });
    }

    /// Fires the retransmission timeout if it is due: halve ssthresh, roll
    /// snd_nxt back to snd_una (go-back-N), collapse the window to one MSS
    /// (baseline) or re-clamp it to the proxy target (steered), and double
    /// the RTO.
    pub fn on_rto_timer(&mut self, now: SimTime) {
        let Some(deadline) = self.rto_deadline else {
            return;
        };
        if now < deadline || self.snd_una == self.snd_nxt {
            return;
        }
        self.rto_count += 1;
        let mss = self.cfg.mss_bytes as u64;
        self.ssthresh_bytes = (self.cwnd_bytes / 2).max(2 * mss);
        self.snd_nxt = self.snd_una;
        self.dupack_count = 0;
        // Go-back-N resends arrive as duplicates for data the receiver
        // already buffered; gate fast retransmit until past the high mark.
        self.recover = self.high_tx_mark;
        self.phase = Phase::RtoRecovery;
        self.cwnd_bytes = mss;
        self.fill_window(now);
        if self.steered {
            self.cwnd_bytes = self.steer_cwnd;
            self.fill_window(now);
        }
        self.rto = self.rto.saturating_double().min(self.cfg.rto_max);
        self.rto_deadline = Some(now + self.rto);
    }
}
