//! Point-source dose engine.
//!
//! Dose rate falls off with the inverse square of the distance to a dwell
//! position; a single lumped constant absorbs source strength and medium
//! factors. Matrix entries are expressed in percent of the prescribed dose
//! per second of dwell time, so dose vectors are directly comparable to
//! aspiration values.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{dist2, Vec3};
use crate::patient::{DcPointSet, PatientCase, RoiName};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct DoseKernelConfig {
    /// Lumped dose-rate constant, Gy*mm^2 per second of dwell time.
    pub dose_rate_constant: f64,
    /// Reference distance r0, mm; a point at r0 from a unit dwell receives
    /// `dose_rate_constant / r0^2` Gy/s.
    pub reference_distance_mm: f64,
    /// Distances are clamped from below to avoid singular entries, mm.
    pub min_distance_mm: f64,
}

impl Default for DoseKernelConfig {
    fn default() -> Self {
        DoseKernelConfig {
            dose_rate_constant: 12.5,
            reference_distance_mm: 10.0,
            min_distance_mm: 1.0,
        }
    }
}

impl DoseKernelConfig {
    /// Kernel value in percent of `prescribed_gy` per second for a squared
    /// distance `r2` (mm^2). Equals `C * (r0 / max(r, eps))^2` with `C` the
    /// percent-per-second rate at the reference distance.
    #[inline]
    pub fn entry_pct_per_s(&self, prescribed_gy: f64, r2: f64) -> f64 {
        let eps2 = self.min_distance_mm * self.min_distance_mm;
        self.dose_rate_constant * 100.0 / (prescribed_gy * r2.max(eps2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DoseError {
    LengthMismatch { expected: usize, got: usize },
    IndexOutOfRange { index: usize, len: usize },
    NegativeTime { index: usize },
    NonFiniteTime { index: usize },
}

impl core::fmt::Display for DoseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DoseError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} dwell times, got {got}")
            }
            DoseError::IndexOutOfRange { index, len } => {
                write!(f, "dwell index {index} out of range for {len} dwells")
            }
            DoseError::NegativeTime { index } => {
                write!(f, "dwell time at index {index} is negative")
            }
            DoseError::NonFiniteTime { index } => {
                write!(f, "dwell time at index {index} is not finite")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DoseError {}

/// Dense dose-rate table, one column per dwell position (column-major so a
/// dwell's contributions are contiguous for partial updates).
#[derive(Debug, Clone, PartialEq)]
pub struct DoseRateTable {
    pub n_points: usize,
    pub n_dwells: usize,
    entries: Vec<f64>,
}

impl DoseRateTable {
    pub fn build(
        points: &[Vec3],
        dwell_positions: &[Vec3],
        kernel: &DoseKernelConfig,
        prescribed_gy: f64,
    ) -> Self {
        let n_points = points.len();
        let n_dwells = dwell_positions.len();
        let mut entries = Vec::with_capacity(n_points * n_dwells);
        for dp in dwell_positions {
            for p in points {
                entries.push(kernel.entry_pct_per_s(prescribed_gy, dist2(*p, *dp)));
            }
        }
        DoseRateTable {
            n_points,
            n_dwells,
            entries,
        }
    }

    #[inline]
    pub fn column(&self, dwell: usize) -> &[f64] {
        &self.entries[dwell * self.n_points..(dwell + 1) * self.n_points]
    }

    #[inline]
    pub fn entry(&self, point: usize, dwell: usize) -> f64 {
        self.entries[dwell * self.n_points + point]
    }

    fn check_times(&self, times: &[f64]) -> Result<(), DoseError> {
        if times.len() != self.n_dwells {
            return Err(DoseError::LengthMismatch {
                expected: self.n_dwells,
                got: times.len(),
            });
        }
        for (i, t) in times.iter().enumerate() {
            if !t.is_finite() {
                return Err(DoseError::NonFiniteTime { index: i });
            }
            if *t < 0.0 {
                return Err(DoseError::NegativeTime { index: i });
            }
        }
        Ok(())
    }

    /// Full dose computation: percent of prescribed dose at every point.
    pub fn compute_dose(&self, times: &[f64]) -> Result<Vec<f64>, DoseError> {
        self.check_times(times)?;
        let mut dose = vec![0.0; self.n_points];
        self.compute_dose_into(times, &mut dose);
        Ok(dose)
    }

    /// Full dose computation into a caller-provided buffer. The summation
    /// order (per-dwell axpy) matches the partial-update path.
    pub fn compute_dose_into(&self, times: &[f64], dose: &mut [f64]) {
        debug_assert_eq!(times.len(), self.n_dwells);
        debug_assert_eq!(dose.len(), self.n_points);
        dose.fill(0.0);
        for (j, &t) in times.iter().enumerate() {
            if t != 0.0 {
                axpy(dose, self.column(j), t);
            }
        }
    }

    /// Applies dwell-time changes incrementally. `changed`, `old_times` and
    /// `new_times` are parallel: dwell `changed[k]` moves from `old_times[k]`
    /// to `new_times[k]`.
    pub fn partial_update_dose(
        &self,
        dose: &mut [f64],
        changed: &[usize],
        old_times: &[f64],
        new_times: &[f64],
    ) -> Result<(), DoseError> {
        if changed.len() != old_times.len() || changed.len() != new_times.len() {
            return Err(DoseError::LengthMismatch {
                expected: changed.len(),
                got: old_times.len().max(new_times.len()),
            });
        }
        if dose.len() != self.n_points {
            return Err(DoseError::LengthMismatch {
                expected: self.n_points,
                got: dose.len(),
            });
        }
        for (k, &j) in changed.iter().enumerate() {
            if j >= self.n_dwells {
                return Err(DoseError::IndexOutOfRange {
                    index: j,
                    len: self.n_dwells,
                });
            }
            if !new_times[k].is_finite() {
                return Err(DoseError::NonFiniteTime { index: j });
            }
            if new_times[k] < 0.0 {
                return Err(DoseError::NegativeTime { index: j });
            }
        }
        self.partial_update_unchecked(dose, changed, old_times, new_times);
        Ok(())
    }

    /// Hot-path variant without validation; inputs come from the optimizer
    /// which already keeps times clamped and indices in range.
    #[inline]
    pub fn partial_update_unchecked(
        &self,
        dose: &mut [f64],
        changed: &[usize],
        old_times: &[f64],
        new_times: &[f64],
    ) {
        for (k, &j) in changed.iter().enumerate() {
            let dt = new_times[k] - old_times[k];
            if dt != 0.0 {
                axpy(dose, self.column(j), dt);
            }
        }
    }
}

#[inline]
fn axpy(dose: &mut [f64], col: &[f64], a: f64) {
    for (d, m) in dose.iter_mut().zip(col.iter()) {
        *d += a * *m;
    }
}

/// Dose-rate table for one ROI's calculation points.
#[derive(Debug, Clone, PartialEq)]
pub struct DoseRateMatrix {
    pub roi_name: RoiName,
    pub table: DoseRateTable,
}

/// Builds the dose-rate matrix mapping the case's dwell vector to the given
/// calculation points.
pub fn build_dose_rate_matrix(
    case: &PatientCase,
    dc_points: &DcPointSet,
    kernel: &DoseKernelConfig,
) -> DoseRateMatrix {
    let dwell_positions: Vec<Vec3> = case.dwell_positions.iter().map(|d| d.position).collect();
    DoseRateMatrix {
        roi_name: dc_points.roi_name,
        table: DoseRateTable::build(
            &dc_points.points,
            &dwell_positions,
            kernel,
            case.prescribed_dose_gy,
        ),
    }
}

/// Dose at arbitrary points (reference points) for a full dwell-time vector.
pub fn dose_at_points(
    points: &[Vec3],
    case: &PatientCase,
    kernel: &DoseKernelConfig,
    times: &[f64],
) -> Result<Vec<f64>, DoseError> {
    let dwell_positions: Vec<Vec3> = case.dwell_positions.iter().map(|d| d.position).collect();
    DoseRateTable::build(points, &dwell_positions, kernel, case.prescribed_dose_gy)
        .compute_dose(times)
}
