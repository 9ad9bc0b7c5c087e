use alloc::vec::Vec;
use core::fmt;

/// Sentinel for a beam pair with no measurable signal. Finite values, however
/// low, are usable; whether they support any MCS is decided downstream.
pub const OUTAGE_DBM: f64 = f64::NEG_INFINITY;

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    EmptyAxis,
    /// `values` rows/cols do not match the angle lists.
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
    },
    /// Angle lists must be strictly increasing.
    AnglesNotIncreasing,
    /// NaN or +inf power value.
    InvalidPower {
        tx_idx: usize,
        rx_idx: usize,
    },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::EmptyAxis => write!(f, "grid needs at least one angle per axis"),
            GridError::ShapeMismatch {
                expected_rows,
                expected_cols,
            } => write!(f, "value matrix is not {expected_rows}x{expected_cols}"),
            GridError::AnglesNotIncreasing => write!(f, "angle lists must be strictly increasing"),
            GridError::InvalidPower { tx_idx, rx_idx } => {
                write!(f, "power at cell ({tx_idx},{rx_idx}) is NaN or +inf")
            }
        }
    }
}

impl core::error::Error for GridError {}

/// The best cell of a grid: beam directions plus received power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamChoice {
    pub tx_idx: usize,
    pub rx_idx: usize,
    pub tx_angle_deg: f64,
    pub rx_angle_deg: f64,
    pub p_rx_dbm: f64,
}

/// Received CW power over all beam-direction pairs, rows = tx directions,
/// cols = rx directions, in dBm.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGrid {
    tx_angles_deg: Vec<f64>,
    rx_angles_deg: Vec<f64>,
    /// Row-major, `tx_angles.len() * rx_angles.len()` entries.
    values_dbm: Vec<f64>,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl BeamGrid {
    pub fn new(
        tx_angles_deg: Vec<f64>,
        rx_angles_deg: Vec<f64>,
        values_dbm: Vec<f64>,
    ) -> Result<Self, GridError> {
        if tx_angles_deg.is_empty() || rx_angles_deg.is_empty() {
            return Err(GridError::EmptyAxis);
        }
        if !strictly_increasing(&tx_angles_deg) || !strictly_increasing(&rx_angles_deg) {
            return Err(GridError::AnglesNotIncreasing);
        }
        if values_dbm.len() != tx_angles_deg.len() * rx_angles_deg.len() {
            return Err(GridError::ShapeMismatch {
                expected_rows: tx_angles_deg.len(),
                expected_cols: rx_angles_deg.len(),
            });
        }
        for (i, v) in values_dbm.iter().enumerate() {
            if v.is_nan() || *v == f64::INFINITY {
                return Err(GridError::InvalidPower {
                    tx_idx: i / rx_angles_deg.len(),
                    rx_idx: i % rx_angles_deg.len(),
                });
            }
        }
        Ok(BeamGrid {
            tx_angles_deg,
            rx_angles_deg,
            values_dbm,
        })
    }

    /// Grid with every cell at `value_dbm`.
    pub fn uniform(
        tx_angles_deg: Vec<f64>,
        rx_angles_deg: Vec<f64>,
        value_dbm: f64,
    ) -> Result<Self, GridError> {
        let n = tx_angles_deg.len() * rx_angles_deg.len();
        Self::new(tx_angles_deg, rx_angles_deg, alloc::vec![value_dbm; n])
    }

    pub fn tx_angles_deg(&self) -> &[f64] {
        &self.tx_angles_deg
    }

    pub fn rx_angles_deg(&self) -> &[f64] {
        &self.rx_angles_deg
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.tx_angles_deg.len(), self.rx_angles_deg.len())
    }

    pub fn value(&self, tx_idx: usize, rx_idx: usize) -> f64 {
        self.values_dbm[tx_idx * self.rx_angles_deg.len() + rx_idx]
    }

    pub fn set_value(&mut self, tx_idx: usize, rx_idx: usize, v_dbm: f64) {
        debug_assert!(!v_dbm.is_nan() && v_dbm != f64::INFINITY);
        self.values_dbm[tx_idx * self.rx_angles_deg.len() + rx_idx] = v_dbm;
    }

    pub fn values(&self) -> &[f64] {
        &self.values_dbm
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values_dbm
    }

    /// Index of the cell for a `(tx_angle, rx_angle)` pair, matched within
    /// 1e-9 degrees.
    pub fn cell_index(&self, tx_angle_deg: f64, rx_angle_deg: f64) -> Option<(usize, usize)> {
        let tx = self
            .tx_angles_deg
            .iter()
            .position(|a| libm::fabs(a - tx_angle_deg) < 1e-9)?;
        let rx = self
            .rx_angles_deg
            .iter()
            .position(|a| libm::fabs(a - rx_angle_deg) < 1e-9)?;
        Some((tx, rx))
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let cols = self.rx_angles_deg.len();
        self.values_dbm
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i / cols, i % cols, v))
    }

    /// Argmax over all cells, skipping outage sentinels. Ties break toward
    /// the lowest `(tx_idx, rx_idx)` in lexicographic order. Returns `None`
    /// only when every cell is an outage.
    pub fn select_best_beam(&self) -> Option<BeamChoice> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (tx, rx, v) in self.iter_cells() {
            if v == OUTAGE_DBM {
                continue;
            }
            match best {
                Some((_, _, b)) if v <= b => {}
                _ => best = Some((tx, rx, v)),
            }
        }
        best.map(|(tx_idx, rx_idx, p_rx_dbm)| BeamChoice {
            tx_idx,
            rx_idx,
            tx_angle_deg: self.tx_angles_deg[tx_idx],
            rx_angle_deg: self.rx_angles_deg[rx_idx],
            p_rx_dbm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn angles(n: usize) -> Vec<f64> {
        (0..n).map(|i| -30.0 + 10.0 * i as f64).collect()
    }

    #[test]
    fn singleton_grid_selects_its_cell() {
        let g = BeamGrid::new(vec![0.0], vec![0.0], vec![-55.0]).unwrap();
        let c = g.select_best_beam().unwrap();
        assert_eq!((c.tx_idx, c.rx_idx), (0, 0));
        assert_eq!(c.p_rx_dbm, -55.0);
    }

    #[test]
    fn constant_offset_keeps_selection() {
        let mut values = vec![-70.0; 9];
        values[5] = -60.0;
        let g = BeamGrid::new(angles(3), angles(3), values.clone()).unwrap();
        let before = g.select_best_beam().unwrap();
        let shifted: Vec<f64> = values.iter().map(|v| v + 3.0).collect();
        let g2 = BeamGrid::new(angles(3), angles(3), shifted).unwrap();
        let after = g2.select_best_beam().unwrap();
        assert_eq!((before.tx_idx, before.rx_idx), (after.tx_idx, after.rx_idx));
    }

    #[test]
    fn all_outage_grid_has_no_beam() {
        let g = BeamGrid::uniform(angles(2), angles(2), OUTAGE_DBM).unwrap();
        assert!(g.select_best_beam().is_none());
    }

    #[test]
    fn ties_break_lexicographically() {
        let g = BeamGrid::new(angles(2), angles(2), vec![-60.0, -60.0, -60.0, -60.0]).unwrap();
        let c = g.select_best_beam().unwrap();
        assert_eq!((c.tx_idx, c.rx_idx), (0, 0));
    }

    #[test]
    fn shape_and_angle_validation() {
        assert!(matches!(
            BeamGrid::new(vec![0.0, 1.0], vec![0.0], vec![-1.0]),
            Err(GridError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            BeamGrid::new(vec![1.0, 0.0], vec![0.0], vec![-1.0, -2.0]),
            Err(GridError::AnglesNotIncreasing)
        ));
        assert!(matches!(
            BeamGrid::new(vec![0.0], vec![0.0], vec![f64::NAN]),
            Err(GridError::InvalidPower { .. })
        ));
    }

    proptest! {
        // Brute-force argmax oracle over random 7x7 grids.
        #[test]
        fn matches_exhaustive_scan(values in proptest::collection::vec(-95.0f64..-40.0, 49)) {
            let g = BeamGrid::new(angles(7), angles(7), values.clone()).unwrap();
            let got = g.select_best_beam().unwrap();

            let mut best_idx = 0;
            for (i, v) in values.iter().enumerate() {
                if *v > values[best_idx] {
                    best_idx = i;
                }
            }
            prop_assert_eq!((got.tx_idx, got.rx_idx), (best_idx / 7, best_idx % 7));
            prop_assert_eq!(got.p_rx_dbm, values[best_idx]);
        }

        // Argmax is invariant under any uniform strictly increasing transform;
        // affine maps with positive slope stand in for the family.
        #[test]
        fn argmax_invariant_under_monotone_transform(
            values in proptest::collection::vec(-95.0f64..-40.0, 9),
            scale in 0.1f64..4.0,
            shift in -20.0f64..20.0,
        ) {
            let g = BeamGrid::new(angles(3), angles(3), values.clone()).unwrap();
            let mapped: Vec<f64> = values.iter().map(|v| v * scale + shift).collect();
            let g2 = BeamGrid::new(angles(3), angles(3), mapped).unwrap();
            let a = g.select_best_beam().unwrap();
            let b = g2.select_best_beam().unwrap();
            prop_assert_eq!((a.tx_idx, a.rx_idx), (b.tx_idx, b.rx_idx));
        }
    }
}
