//! Link-to-system mapping for the 60 GHz hop.
//!
//! Received CW power is turned into an SNR against a fixed noise floor, then
//! into a modulation error ratio by subtracting the demodulation-chain offset,
//! then into mean mutual information per coded bit (MMIB), and finally into a
//! block error rate through a Gaussian-cdf fit. The adaptive modulation and
//! coding step scans the MCS table for the highest entry whose BLER meets the
//! target; the offered rate is spectral efficiency times bandwidth.

use alloc::vec::Vec;
use core::fmt;

use crate::channel::{BeamChoice, ChannelTrace, InterpDomain};
use crate::time::SimTime;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Thermal noise power over bandwidth `b_hz` at temperature `t_kelvin`,
/// in dBm: `10 log10(k T B) + 30`.
pub fn noise_power_dbm(b_hz: f64, t_kelvin: f64) -> f64 {
    debug_assert!(b_hz > 0.0 && t_kelvin > 0.0);
    10.0 * libm::log10(BOLTZMANN * t_kelvin * b_hz) + 30.0
}

/// SNR at the receiver input from received CW power and the noise floor.
pub fn snr_from_cw(p_rx_dbm: f64, p_noise_dbm: f64) -> f64 {
    p_rx_dbm - p_noise_dbm
}

/// Modulation error ratio: SNR minus the demodulation-chain offset.
pub fn mer_from_snr(snr_db: f64, delta_db: f64) -> f64 {
    debug_assert!(delta_db >= 0.0);
    snr_db - delta_db
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Bpsk => write!(f, "BPSK"),
            Modulation::Qpsk => write!(f, "QPSK"),
            Modulation::Qam16 => write!(f, "16QAM"),
        }
    }
}

// Two-branch fit of the J function (mutual information of a binary-input
// AWGN channel vs. the LLR standard deviation).
const J_SPLIT: f64 = 1.6363;
const J_A1: f64 = -0.042_106_61;
const J_B1: f64 = 0.209_252;
const J_C1: f64 = -0.006_400_81;
const J_A2: f64 = 0.001_814_91;
const J_B2: f64 = -0.142_675;
const J_C2: f64 = -0.082_205_4;
const J_D2: f64 = 0.054_960_8;
// Beyond this sigma the exponential branch has saturated to 1 within f64
// resolution (and the cubic term of the fit would eventually misbehave).
const J_SAT: f64 = 18.0;

/// J-function approximation, clamped to [0, 1] with J(0) = 0 and J(inf) = 1.
pub fn j_function(sigma: f64) -> f64 {
    if sigma <= 0.0 {
        0.0
    } else if sigma < J_SPLIT {
        let v = J_A1 * sigma * sigma * sigma + J_B1 * sigma * sigma + J_C1 * sigma;
        v.clamp(0.0, 1.0)
    } else if sigma < J_SAT {
        let e = J_A2 * sigma * sigma * sigma + J_B2 * sigma * sigma + J_C2 * sigma + J_D2;
        (1.0 - libm::exp(e)).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Per-constellation mixture for the 16-QAM MMIB curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qam16MmibCoeffs {
    pub weights: [f64; 3],
    pub scales: [f64; 3],
}

impl Default for Qam16MmibCoeffs {
    fn default() -> Self {
        Qam16MmibCoeffs {
            weights: [0.5, 0.25, 0.25],
            scales: [0.8, 2.17, 0.965],
        }
    }
}

/// Mean mutual information per coded bit with the standard coefficients.
pub fn mmib_from_mer(mer_db: f64, modulation: Modulation) -> f64 {
    mmib_from_mer_with(mer_db, modulation, &Qam16MmibCoeffs::default())
}

/// Mean mutual information per coded bit at the given MER.
///
/// BPSK maps to `J(sqrt(8 gamma))`, QPSK to `J(sqrt(4 gamma))`, and 16-QAM to
/// a three-term J mixture, with `gamma` the linear-scale MER.
pub fn mmib_from_mer_with(mer_db: f64, modulation: Modulation, qam16: &Qam16MmibCoeffs) -> f64 {
    let gamma = libm::pow(10.0, mer_db / 10.0);
    match modulation {
        Modulation::Bpsk => j_function(libm::sqrt(8.0 * gamma)),
        Modulation::Qpsk => j_function(libm::sqrt(4.0 * gamma)),
        Modulation::Qam16 => {
            let root = libm::sqrt(gamma);
            let mut acc = 0.0;
            for i in 0..3 {
                acc += qam16.weights[i] * j_function(qam16.scales[i] * root);
            }
            acc.clamp(0.0, 1.0)
        }
    }
}

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Block error rate from MMIB: `(1 - erf((mmib - x1) / (sqrt(2) x2))) / 2`.
pub fn bler_from_mmib(mmib: f64, x1: f64, x2: f64) -> f64 {
    debug_assert!(x2 > 0.0, "x2 must be positive");
    0.5 * (1.0 - libm::erf((mmib - x1) / (SQRT_2 * x2)))
}

/// One modulation-and-coding scheme of the single-carrier table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub index: u8,
    pub modulation: Modulation,
    /// Effective code rate; repetition counts as coding.
    pub code_rate: f64,
    /// Bits per second per hertz; equals `bits_per_symbol * code_rate`.
    pub spectral_efficiency: f64,
    /// BLER-curve center in MMIB.
    pub x1: f64,
    /// BLER-curve transition width in MMIB.
    pub x2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum McsTableError {
    Empty,
    /// Indices must be >= 1 and strictly increasing.
    BadIndexOrder { position: usize },
    /// Spectral efficiencies must increase strictly with the index.
    EfficiencyNotIncreasing { index: u8 },
    /// Code rate outside (0, 1].
    BadCodeRate { index: u8 },
    /// `spectral_efficiency != bits_per_symbol * code_rate`.
    EfficiencyMismatch { index: u8 },
    /// X2 must be positive.
    BadX2 { index: u8 },
}

impl fmt::Display for McsTableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McsTableError::Empty => write!(f, "MCS table is empty"),
            McsTableError::BadIndexOrder { position } => {
                write!(f, "entry {position}: indices must be >= 1 and strictly increasing")
            }
            McsTableError::EfficiencyNotIncreasing { index } => {
                write!(f, "MCS {index}: spectral efficiency must increase with index")
            }
            McsTableError::BadCodeRate { index } => {
                write!(f, "MCS {index}: code rate must be in (0, 1]")
            }
            McsTableError::EfficiencyMismatch { index } => write!(
                f,
                "MCS {index}: spectral efficiency != bits per symbol * code rate"
            ),
            McsTableError::BadX2 { index } => write!(f, "MCS {index}: x2 must be > 0"),
        }
    }
}

impl core::error::Error for McsTableError {}

/// Validated MCS table, sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

impl McsTable {
    pub fn new(entries: Vec<McsEntry>) -> Result<Self, McsTableError> {
        if entries.is_empty() {
            return Err(McsTableError::Empty);
        }
        let mut prev_index = 0u8;
        let mut prev_s = 0.0;
        for (pos, e) in entries.iter().enumerate() {
            if e.index == 0 || e.index <= prev_index {
                return Err(McsTableError::BadIndexOrder { position: pos });
            }
            if !(e.code_rate > 0.0 && e.code_rate <= 1.0) {
                return Err(McsTableError::BadCodeRate { index: e.index });
            }
            if e.spectral_efficiency <= prev_s {
                return Err(McsTableError::EfficiencyNotIncreasing { index: e.index });
            }
            let expected = e.modulation.bits_per_symbol() as f64 * e.code_rate;
            if libm::fabs(e.spectral_efficiency - expected) > 1e-9 {
                return Err(McsTableError::EfficiencyMismatch { index: e.index });
            }
            if e.x2 <= 0.0 {
                return Err(McsTableError::BadX2 { index: e.index });
            }
            prev_index = e.index;
            prev_s = e.spectral_efficiency;
        }
        Ok(McsTable { entries })
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn lowest(&self) -> &McsEntry {
        &self.entries[0]
    }

    pub fn highest(&self) -> &McsEntry {
        &self.entries[self.entries.len() - 1]
    }

    pub fn by_index(&self, index: u8) -> Option<&McsEntry> {
        self.entries.iter().find(|e| e.index == index)
    }
}

/// Offered data rate `R = s * B` in bits per second.
pub fn offered_rate_bps(entry: &McsEntry, bandwidth_hz: f64) -> u64 {
    debug_assert!(bandwidth_hz > 0.0);
    libm::round(entry.spectral_efficiency * bandwidth_hz) as u64
}

/// Parameters of the PHY abstraction.
#[derive(Debug, Clone)]
pub struct LinkAbstractionConfig {
    /// Allocated bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Noise floor over that bandwidth, dBm.
    pub noise_power_dbm: f64,
    /// SNR-to-MER offset of the demodulation chain, dB.
    pub delta_db: f64,
    /// Largest tolerable BLER for MCS selection.
    pub bler_target: f64,
    pub qam16_coeffs: Qam16MmibCoeffs,
    pub mcs_table: McsTable,
}

pub const DEFAULT_BANDWIDTH_HZ: f64 = 5e8;
pub const DEFAULT_NOISE_POWER_DBM: f64 = -87.01;
pub const DEFAULT_DELTA_DB: f64 = 6.5;
pub const DEFAULT_BLER_TARGET: f64 = 1e-2;

impl LinkAbstractionConfig {
    /// Paper-calibrated defaults around the supplied table.
    pub fn with_table(mcs_table: McsTable) -> Self {
        LinkAbstractionConfig {
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
            noise_power_dbm: DEFAULT_NOISE_POWER_DBM,
            delta_db: DEFAULT_DELTA_DB,
            bler_target: DEFAULT_BLER_TARGET,
            qam16_coeffs: Qam16MmibCoeffs::default(),
            mcs_table,
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.bandwidth_hz > 0.0) {
            return Err("bandwidth must be > 0");
        }
        if !(self.bler_target > 0.0 && self.bler_target < 1.0) {
            return Err("bler_target must be in (0, 1)");
        }
        if self.delta_db < 0.0 {
            return Err("delta_db must be >= 0");
        }
        Ok(())
    }
}

/// Highest-index entry whose BLER at this MER meets the target; `None` when
/// even the lowest entry misses it (outage).
pub fn select_mcs<'a>(mer_db: f64, cfg: &'a LinkAbstractionConfig) -> Option<&'a McsEntry> {
    let mut selected: Option<&McsEntry> = None;
    for e in cfg.mcs_table.entries() {
        let mmib = mmib_from_mer_with(mer_db, e.modulation, &cfg.qam16_coeffs);
        if bler_from_mmib(mmib, e.x1, e.x2) <= cfg.bler_target {
            selected = Some(e);
        }
    }
    if let Some(e) = selected {
        let mmib = mmib_from_mer_with(mer_db, e.modulation, &cfg.qam16_coeffs);
        debug_assert!(bler_from_mmib(mmib, e.x1, e.x2) <= cfg.bler_target);
    }
    selected
}

/// AP-side truth about the wireless hop at one instant.
#[derive(Debug, Clone)]
pub struct LinkState {
    pub time: SimTime,
    /// Best beam pair, absent when every cell of the grid is an outage.
    pub beam: Option<BeamChoice>,
    pub snr_db: f64,
    pub mer_db: f64,
    /// Selected MCS; absent means outage (no feasible entry).
    pub mcs: Option<McsEntry>,
    /// Offered rate `s * B`; zero during outage.
    pub rate_bps: u64,
    /// BLER of the selected MCS; 1.0 during outage.
    pub bler: f64,
}

impl LinkState {
    pub fn outage_at(time: SimTime) -> Self {
        LinkState {
            time,
            beam: None,
            snr_db: f64::NEG_INFINITY,
            mer_db: f64::NEG_INFINITY,
            mcs: None,
            rate_bps: 0,
            bler: 1.0,
        }
    }

    pub fn mcs_index(&self) -> u8 {
        self.mcs.map(|m| m.index).unwrap_or(0)
    }

    pub fn is_outage(&self) -> bool {
        self.mcs.is_none()
    }
}

/// Full pipeline at time `t`: sample the trace, pick the best beam, map power
/// to SNR/MER, select the MCS, and compute the offered rate.
pub fn update_link(
    trace: &ChannelTrace,
    t: SimTime,
    cfg: &LinkAbstractionConfig,
    interp: InterpDomain,
) -> LinkState {
    let grid = trace.sample_grid(t, interp);
    let Some(beam) = grid.select_best_beam() else {
        return LinkState::outage_at(t);
    };
    let snr_db = snr_from_cw(beam.p_rx_dbm, cfg.noise_power_dbm);
    let mer_db = mer_from_snr(snr_db, cfg.delta_db);
    match select_mcs(mer_db, cfg) {
        Some(&entry) => {
            let mmib = mmib_from_mer_with(mer_db, entry.modulation, &cfg.qam16_coeffs);
            LinkState {
                time: t,
                beam: Some(beam),
                snr_db,
                mer_db,
                mcs: Some(entry),
                rate_bps: offered_rate_bps(&entry, cfg.bandwidth_hz),
                bler: bler_from_mmib(mmib, entry.x1, entry.x2),
            }
        }
        None => LinkState {
            beam: Some(beam),
            snr_db,
            mer_db,
            ..LinkState::outage_at(t)
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::BeamGrid;
    use alloc::vec;

    // The 12-entry single-carrier ladder used as a test fixture; the
    // shipping copy lives in the companion crate's data file.
    pub(crate) fn fixture_table() -> McsTable {
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

    pub(crate) fn fixture_config() -> LinkAbstractionConfig {
        LinkAbstractionConfig::with_table(fixture_table())
    }

    #[test]
    fn noise_power_matches_hand_computation() {
        // k * 290 K * 500 MHz = 2.0019e-12 W -> -86.99 dBm.
        let p = noise_power_dbm(5e8, 290.0);
        assert!((p - (-86.99)).abs() < 0.01, "got {p}");
        // Halving the bandwidth subtracts 10 log10(2).
        let half = noise_power_dbm(2.5e8, 290.0);
        assert!((p - half - 10.0 * libm::log10(2.0)).abs() < 1e-9);
        // The configured default keeps the published constant.
        assert_eq!(DEFAULT_NOISE_POWER_DBM, -87.01);
    }

    #[test]
    fn snr_and_mer_are_plain_offsets() {
        assert!((snr_from_cw(-60.0, -87.01) - 27.01).abs() < 1e-12);
        assert_eq!(snr_from_cw(-87.01, -87.01), 0.0);
        assert_eq!(snr_from_cw(-87.01, -97.01), 10.0);
        assert!((mer_from_snr(27.01, 6.5) - 20.51).abs() < 1e-12);
        assert_eq!(mer_from_snr(5.0, 0.0), 5.0);
        assert_eq!(mer_from_snr(6.5, 6.5), 0.0);
    }

    #[test]
    fn mmib_limits() {
        for m in [Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16] {
            assert_eq!(mmib_from_mer(-200.0, m), 0.0, "{m}");
            assert_eq!(mmib_from_mer(80.0, m), 1.0, "{m}");
        }
    }

    // Grid scan over [-20, 40] dB in 0.1 dB steps: MMIB must be
    // nondecreasing in MER for every modulation.
    #[test]
    fn mmib_monotone_in_mer() {
        for m in [Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16] {
            let mut prev = -1.0;
            for k in 0..=600 {
                let mer = -20.0 + 0.1 * k as f64;
                let v = mmib_from_mer(mer, m);
                assert!(v >= prev, "{m} decreased at {mer} dB: {v} < {prev}");
                assert!((0.0..=1.0).contains(&v));
                prev = v;
            }
        }
    }

    #[test]
    fn bler_midpoint_and_limits() {
        // erf(0) = 0 at mmib == x1.
        assert_eq!(bler_from_mmib(0.5, 0.5, 0.05), 0.5);
        // One transition width above the center: (1 - erf(1)) / 2.
        let one_sigma = bler_from_mmib(0.5 + SQRT_2 * 0.05, 0.5, 0.05);
        assert!((one_sigma - 0.078_649_603_525_143).abs() < 1e-12);
        assert!(bler_from_mmib(1.0, 0.5, 0.01) < 1e-12);
        assert!(bler_from_mmib(0.0, 0.5, 0.01) > 1.0 - 1e-12);
    }

    #[test]
    fn bler_strictly_decreasing_in_mmib() {
        let mut prev = 1.1;
        for k in 0..=100 {
            let mmib = k as f64 / 100.0;
            let b = bler_from_mmib(mmib, 0.6, 0.05);
            assert!(b <= prev);
            // Strict outside the two erf tails, where f64 saturates.
            if prev > 1e-12 && prev < 1.0 - 1e-12 {
                assert!(b < prev, "not strict at mmib={mmib}");
            }
            assert!((0.0..=1.0).contains(&b));
            prev = b;
        }
    }

    #[test]
    fn select_mcs_extremes() {
        let cfg = fixture_config();
        assert_eq!(select_mcs(40.0, &cfg).unwrap().index, 12);
        assert!(select_mcs(-20.0, &cfg).is_none());
    }

    // Exhaustive-scan oracle: at every MER on a fine grid the selected index
    // equals the max over individually feasible entries, and the selection
    // is monotone in MER.
    #[test]
    fn select_mcs_matches_brute_force_and_is_monotone() {
        let cfg = fixture_config();
        let mut prev_idx = 0u8;
        for k in 0..=1000 {
            let mer = -10.0 + 0.05 * k as f64;
            let got = select_mcs(mer, &cfg).map(|e| e.index).unwrap_or(0);

            let mut brute = 0u8;
            for e in cfg.mcs_table.entries() {
                let mmib = mmib_from_mer(mer, e.modulation);
                if bler_from_mmib(mmib, e.x1, e.x2) <= cfg.bler_target && e.index > brute {
                    brute = e.index;
                }
            }
            assert_eq!(got, brute, "mismatch at {mer} dB");
            assert!(got >= prev_idx, "selection dropped at {mer} dB");
            prev_idx = got;
        }
    }

    #[test]
    fn offered_rate_is_linear_in_bandwidth() {
        let table = fixture_table();
        let top = table.highest();
        assert_eq!(offered_rate_bps(top, 5e8), 1_500_000_000);
        assert_eq!(offered_rate_bps(top, 1e9), 3_000_000_000);
        let bottom = table.lowest();
        assert_eq!(offered_rate_bps(bottom, 5e8), 125_000_000);
    }

    #[test]
    fn rates_increase_with_index() {
        let table = fixture_table();
        let mut prev = 0;
        for e in table.entries() {
            let r = offered_rate_bps(e, 5e8);
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn table_validation_rejects_bad_entries() {
        let good = fixture_table().entries().to_vec();
        let mut dup = good.clone();
        dup[1].index = 1;
        assert!(matches!(
            McsTable::new(dup),
            Err(McsTableError::BadIndexOrder { position: 1 })
        ));
        let mut bad_s = good.clone();
        bad_s[0].spectral_efficiency = 0.3;
        assert!(matches!(
            McsTable::new(bad_s),
            Err(McsTableError::EfficiencyMismatch { index: 1 })
        ));
        let mut bad_x2 = good;
        bad_x2[3].x2 = 0.0;
        assert!(matches!(
            McsTable::new(bad_x2),
            Err(McsTableError::BadX2 { index: 4 })
        ));
    }

    fn single_cell_trace(p_dbm: f64) -> ChannelTrace {
        ChannelTrace::new(vec![
            (SimTime::ZERO, BeamGrid::uniform(vec![0.0], vec![0.0], p_dbm).unwrap()),
            (
                SimTime::from_secs(10),
                BeamGrid::uniform(vec![0.0], vec![0.0], p_dbm).unwrap(),
            ),
        ])
        .unwrap()
    }

    #[test]
    fn update_link_composes_the_pipeline() {
        let cfg = fixture_config();
        // -55 dBm -> SNR 32.01 -> MER 25.51 -> MCS 12 -> 1.5 Gbps.
        let state = update_link(&single_cell_trace(-55.0), SimTime::from_secs(1), &cfg, InterpDomain::Db);
        assert_eq!(state.mcs_index(), 12);
        assert_eq!(state.rate_bps, 1_500_000_000);
        assert!(state.bler <= cfg.bler_target);

        // 35 dB deeper: MER -9.49, below the lowest entry -> outage.
        let blocked = update_link(&single_cell_trace(-90.0), SimTime::from_secs(1), &cfg, InterpDomain::Db);
        assert!(blocked.is_outage());
        assert_eq!(blocked.rate_bps, 0);
        assert_eq!(blocked.mcs_index(), 0);
    }

    #[test]
    fn constant_trace_gives_time_invariant_state() {
        let cfg = fixture_config();
        let trace = single_cell_trace(-60.0);
        let a = update_link(&trace, SimTime::from_millis(100), &cfg, InterpDomain::Db);
        let b = update_link(&trace, SimTime::from_secs(9), &cfg, InterpDomain::Db);
        assert_eq!(a.mcs_index(), b.mcs_index());
        assert_eq!(a.rate_bps, b.rate_bps);
        assert_eq!(a.mer_db, b.mer_db);
    }
}
