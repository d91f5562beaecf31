//! Dose-volume indices over sampled calculation points.
//!
//! `V_d` is the percentage of points at or above a dose level; `D_v` is the
//! dose received by the hottest fraction `v` of points, defined as the
//! descending order statistic at 0-based index `ceil(v*n) - 1` with no
//! interpolation.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::patient::RoiName;

#[derive(Debug, Clone, PartialEq)]
pub enum DviError {
    EmptyDoseVector,
    FractionOutOfRange { v: f64 },
    NonPositiveVolume { volume_cm3: f64 },
    NegativeVolume { v_cm3: f64 },
}

impl core::fmt::Display for DviError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DviError::EmptyDoseVector => write!(f, "dose vector is empty"),
            DviError::FractionOutOfRange { v } => {
                write!(f, "volume fraction must be in (0, 1], got {v}")
            }
            DviError::NonPositiveVolume { volume_cm3 } => {
                write!(f, "ROI volume must be positive, got {volume_cm3} cm3")
            }
            DviError::NegativeVolume { v_cm3 } => {
                write!(f, "absolute volume must be non-negative, got {v_cm3} cm3")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DviError {}

/// `V_d`: percentage of calculation points receiving at least `d` (percent
/// of prescribed dose).
pub fn compute_v_d(doses: &[f64], d: f64) -> Result<f64, DviError> {
    if doses.is_empty() {
        return Err(DviError::EmptyDoseVector);
    }
    let count = doses.iter().filter(|&&x| x >= d).count();
    Ok(100.0 * count as f64 / doses.len() as f64)
}

/// `D_v`: minimum dose within the hottest fraction `v` of points; the
/// descending order statistic at 0-based index `ceil(v*n) - 1`.
pub fn compute_d_v(doses: &[f64], v: f64) -> Result<f64, DviError> {
    let mut scratch = Vec::new();
    compute_d_v_with_scratch(doses, v, &mut scratch)
}

/// `D_v` with a reusable scratch buffer for the selection.
pub fn compute_d_v_with_scratch(
    doses: &[f64],
    v: f64,
    scratch: &mut Vec<f64>,
) -> Result<f64, DviError> {
    if doses.is_empty() {
        return Err(DviError::EmptyDoseVector);
    }
    if !(v > 0.0 && v <= 1.0) {
        return Err(DviError::FractionOutOfRange { v });
    }
    let n = doses.len();
    // k-th largest (1-based), k = ceil(v*n); as an ascending index: n - k.
    let k = math::ceil(v * n as f64) as usize;
    let k = k.clamp(1, n);
    scratch.clear();
    scratch.extend_from_slice(doses);
    let idx = n - k;
    let (_, val, _) = scratch.select_nth_unstable_by(idx, |a, b| a.total_cmp(b));
    Ok(*val)
}

/// Converts an absolute hot volume (e.g. 2 cm^3) into the fraction of an
/// ROI's volume, saturating at 1.
pub fn absolute_to_fraction(v_cm3: f64, roi_volume_cm3: f64) -> Result<f64, DviError> {
    if !(roi_volume_cm3 > 0.0) {
        return Err(DviError::NonPositiveVolume {
            volume_cm3: roi_volume_cm3,
        });
    }
    if v_cm3 < 0.0 {
        return Err(DviError::NegativeVolume { v_cm3 });
    }
    Ok((v_cm3 / roi_volume_cm3).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Maximize,
    Minimize,
}

/// Which ROI or reference point a DVI measures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DviTarget {
    Roi(RoiName),
    Point(String),
}

impl DviTarget {
    pub fn slug(&self) -> String {
        match self {
            DviTarget::Roi(r) => String::from(r.slug()),
            DviTarget::Point(p) => p.clone(),
        }
    }
}

/// DVI family plus its parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DviKind {
    /// `V_d` at `dose_pct` percent of the prescribed dose.
    VDose { dose_pct: f64 },
    /// `D_v` for a hot volume fraction in (0, 1].
    DVolumeFraction { fraction: f64 },
    /// `D_v` for an absolute hot volume in cm^3.
    DVolumeAbsolute { cm3: f64 },
    /// Dose at a named reference point.
    DPoint,
}

/// A single dose-volume index measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DviSpec {
    pub target: DviTarget,
    pub kind: DviKind,
    pub direction: Direction,
}

impl DviSpec {
    /// Stable identifier such as `d90_ctv_hr`, `d2cm3_bladder`,
    /// `v100_mid_nt` or `dpoint_icru_rectovaginal`. Does not encode the
    /// direction; see [`crate::protocol::AimSpec::id`].
    pub fn slug(&self) -> String {
        let target = self.target.slug();
        match &self.kind {
            DviKind::VDose { dose_pct } => alloc::format!("v{dose_pct}_{target}"),
            DviKind::DVolumeFraction { fraction } => {
                alloc::format!("d{}_{target}", fraction * 100.0)
            }
            DviKind::DVolumeAbsolute { cm3 } => alloc::format!("d{cm3}cm3_{target}"),
            DviKind::DPoint => alloc::format!("dpoint_{target}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_d_counts_points_at_or_above_threshold() {
        let doses = [100.0, 90.0, 80.0, 70.0, 60.0];
        assert_eq!(compute_v_d(&doses, 80.0).unwrap(), 60.0);
        assert_eq!(compute_v_d(&doses, 100.0).unwrap(), 20.0);
        assert_eq!(compute_v_d(&doses, 100.1).unwrap(), 0.0);
        assert_eq!(compute_v_d(&doses, 0.0).unwrap(), 100.0);
    }

    #[test]
    fn d_v_is_the_pinned_order_statistic() {
        let doses = [100.0, 90.0, 80.0, 70.0, 60.0];
        // ceil(0.9 * 5) - 1 = 4 -> 60.
        assert_eq!(compute_d_v(&doses, 0.9).unwrap(), 60.0);
        // ceil(0.2 * 5) - 1 = 0 -> hottest point.
        assert_eq!(compute_d_v(&doses, 0.2).unwrap(), 100.0);
        // v = 1 -> coldest point.
        assert_eq!(compute_d_v(&doses, 1.0).unwrap(), 60.0);
        // Order must not matter.
        let shuffled = [70.0, 100.0, 60.0, 90.0, 80.0];
        assert_eq!(compute_d_v(&shuffled, 0.9).unwrap(), 60.0);
    }

    #[test]
    fn d_v_matches_counting_oracle_on_random_vectors() {
        use rand::Rng;
        let mut rng = crate::seed::rng(5150, &[]);
        for _ in 0..200 {
            let n = rng.gen_range(1..200);
            let doses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..150.0)).collect();
            let v: f64 = rng.gen_range(0.001..=1.0);
            let got = compute_d_v(&doses, v).unwrap();
            // Oracle: largest dose x in the vector such that at least v*n
            // points receive >= x.
            let need = v * n as f64;
            let oracle = doses
                .iter()
                .copied()
                .filter(|x| doses.iter().filter(|y| **y >= *x).count() as f64 >= need)
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(got, oracle, "n={n} v={v}");
        }
    }

    #[test]
    fn fraction_conversion_saturates() {
        assert_eq!(absolute_to_fraction(2.0, 40.0).unwrap(), 0.05);
        assert_eq!(absolute_to_fraction(80.0, 40.0).unwrap(), 1.0);
        assert!(absolute_to_fraction(2.0, 0.0).is_err());
        assert!(absolute_to_fraction(-1.0, 40.0).is_err());
    }

    #[test]
    fn errors_on_degenerate_input() {
        assert!(matches!(
            compute_v_d(&[], 10.0),
            Err(DviError::EmptyDoseVector)
        ));
        assert!(matches!(
            compute_d_v(&[1.0], 0.0),
            Err(DviError::FractionOutOfRange { .. })
        ));
        assert!(matches!(
            compute_d_v(&[1.0], 1.5),
            Err(DviError::FractionOutOfRange { .. })
        ));
    }

    #[test]
    fn slugs_are_stable() {
        use crate::patient::RoiName;
        let v100 = DviSpec {
            target: DviTarget::Roi(RoiName::MidNormalTissue),
            kind: DviKind::VDose { dose_pct: 100.0 },
            direction: Direction::Minimize,
        };
        assert_eq!(v100.slug(), "v100_mid_nt");
        let d90 = DviSpec {
            target: DviTarget::Roi(RoiName::CtvHr),
            kind: DviKind::DVolumeFraction { fraction: 0.90 },
            direction: Direction::Maximize,
        };
        assert_eq!(d90.slug(), "d90_ctv_hr");
        let d2 = DviSpec {
            target: DviTarget::Roi(RoiName::Bladder),
            kind: DviKind::DVolumeAbsolute { cm3: 2.0 },
            direction: Direction::Minimize,
        };
        assert_eq!(d2.slug(), "d2cm3_bladder");
        let dp = DviSpec {
            target: DviTarget::Point("icru_rectovaginal".into()),
            kind: DviKind::DPoint,
            direction: Direction::Minimize,
        };
        assert_eq!(dp.slug(), "dpoint_icru_rectovaginal");
    }
}
