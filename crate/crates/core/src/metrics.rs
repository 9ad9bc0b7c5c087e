//! Per-flow measurement collection: RTT samples, cwnd/ssthresh and channel
//! series, windowed application throughput.

use alloc::vec::Vec;
use core::fmt;

use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricsError {
    /// No packets were delivered, so a percentile cannot be computed.
    EmptySamples,
    /// Percentile fraction outside (0, 1].
    InvalidFraction,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::EmptySamples => write!(f, "no samples to take a percentile of"),
            MetricsError::InvalidFraction => write!(f, "percentile fraction must be in (0, 1]"),
        }
    }
}

impl core::error::Error for MetricsError {}

/// Nearest-rank percentile: the value at index `ceil(p * N)` (1-based) of the
/// ascending-sorted samples.
pub fn percentile(samples: &[SimTime], p: f64) -> Result<SimTime, MetricsError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(MetricsError::InvalidFraction);
    }
    if samples.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    let mut sorted: Vec<SimTime> = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let rank = libm::ceil(p * n as f64) as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

#[derive(Debug, Clone, Copy)]
pub struct CwndSample {
    pub time: SimTime,
    pub cwnd_bytes: u64,
    pub ssthresh_bytes: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct ChannelSample {
    pub time: SimTime,
    /// Selected MCS index; 0 means outage (no feasible MCS).
    pub mcs_index: u8,
    pub rate_bps: u64,
}

/// Everything recorded during one run.
pub struct FlowMetrics {
    /// `(receive time at the sender, round-trip time)` per delivered packet.
    pub rtt_samples: Vec<(SimTime, SimTime)>,
    pub cwnd_series: Vec<CwndSample>,
    pub channel_series: Vec<ChannelSample>,
    /// In-order application bytes delivered per throughput window.
    throughput_bins: Vec<u64>,
    interval: SimTime,
    delivered_bytes: u64,
}

impl FlowMetrics {
    pub fn new(interval: SimTime) -> Self {
        assert!(interval > SimTime::ZERO);
        FlowMetrics {
            rtt_samples: Vec::new(),
            cwnd_series: Vec::new(),
            channel_series: Vec::new(),
            throughput_bins: Vec::new(),
            interval,
            delivered_bytes: 0,
        }
    }

    pub fn record_rtt(&mut self, received_at: SimTime, rtt: SimTime) {
        self.rtt_samples.push((received_at, rtt));
    }

    pub fn record_cwnd(&mut self, time: SimTime, cwnd_bytes: u64, ssthresh_bytes: u64) {
        self.cwnd_series.push(CwndSample {
            time,
            cwnd_bytes,
            ssthresh_bytes,
        });
    }

    pub fn record_channel(&mut self, time: SimTime, mcs_index: u8, rate_bps: u64) {
        self.channel_series.push(ChannelSample {
            time,
            mcs_index,
            rate_bps,
        });
    }

    /// Credits `bytes` of new in-order application data delivered at `time`.
    pub fn record_delivery(&mut self, time: SimTime, bytes: u64) {
        self.delivered_bytes += bytes;
        let bin = (time.as_nanos() / self.interval.as_nanos()) as usize;
        if self.throughput_bins.len() <= bin {
            self.throughput_bins.resize(bin + 1, 0);
        }
        self.throughput_bins[bin] += bytes;
    }

    /// Cumulative in-order application bytes delivered to the sink.
    pub fn delivered_bytes(&self) -> u64 {
        self.delivered_bytes
    }

    pub fn throughput_interval(&self) -> SimTime {
        self.interval
    }

    /// `(window start, Mbps)` for each throughput window.
    pub fn throughput_series(&self) -> Vec<(SimTime, f64)> {
        let secs = self.interval.as_secs_f64();
        self.throughput_bins
            .iter()
            .enumerate()
            .map(|(i, &bytes)| {
                let start = SimTime::from_nanos(i as u64 * self.interval.as_nanos());
                (start, bytes as f64 * 8.0 / secs / 1e6)
            })
            .collect()
    }

    pub fn rtt_percentile(&self, p: f64) -> Result<SimTime, MetricsError> {
        let rtts: Vec<SimTime> = self.rtt_samples.iter().map(|&(_, rtt)| rtt).collect();
        percentile(&rtts, p)
    }

    /// Average application throughput in Mbps over `span`.
    pub fn avg_throughput_mbps(&self, span: SimTime) -> f64 {
        if span == SimTime::ZERO {
            return 0.0;
        }
        self.delivered_bytes as f64 * 8.0 / span.as_secs_f64() / 1e6
    }
}
