//! Patient case model: applicator channels, dwell positions, regions of
//! interest, and dose calculation point sampling.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{self, Primitive, Shape, Slab, Vec3};
use crate::seed;

/// Canonical region-of-interest names. The three `mid_*`/`top_*` regions are
/// derived from the others by [`split_mid_top`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoiName {
    CtvHr,
    CtvIr,
    GtvRes,
    Bladder,
    Rectum,
    Sigmoid,
    Bowel,
    MidCtvIr,
    MidNormalTissue,
    TopNormalTissue,
}

impl RoiName {
    pub const ALL: [RoiName; 10] = [
        RoiName::CtvHr,
        RoiName::CtvIr,
        RoiName::GtvRes,
        RoiName::Bladder,
        RoiName::Rectum,
        RoiName::Sigmoid,
        RoiName::Bowel,
        RoiName::MidCtvIr,
        RoiName::MidNormalTissue,
        RoiName::TopNormalTissue,
    ];

    /// Stable lower-case identifier, used in file columns and log lines.
    pub fn slug(self) -> &'static str {
        match self {
            RoiName::CtvHr => "ctv_hr",
            RoiName::CtvIr => "ctv_ir",
            RoiName::GtvRes => "gtv_res",
            RoiName::Bladder => "bladder",
            RoiName::Rectum => "rectum",
            RoiName::Sigmoid => "sigmoid",
            RoiName::Bowel => "bowel",
            RoiName::MidCtvIr => "mid_ctv_ir",
            RoiName::MidNormalTissue => "mid_nt",
            RoiName::TopNormalTissue => "top_nt",
        }
    }

    /// True for regions derived by [`split_mid_top`] rather than delineated.
    pub fn is_derived(self) -> bool {
        matches!(
            self,
            RoiName::MidCtvIr | RoiName::MidNormalTissue | RoiName::TopNormalTissue
        )
    }
}

impl core::fmt::Display for RoiName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoiKind {
    Target,
    Oar,
    NormalTissue,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Roi {
    pub name: RoiName,
    pub kind: RoiKind,
    pub shape: Shape,
    pub volume_cm3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    IntracavitaryTandem,
    Ovoid,
    Needle,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Channel {
    pub id: u32,
    pub kind: ChannelKind,
    pub dwell_ids: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DwellPosition {
    pub id: u32,
    pub position: Vec3,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReferencePoint {
    pub name: String,
    pub position: Vec3,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ApplicatorAxis {
    pub origin: Vec3,
    pub direction: Vec3,
}

/// A complete synthetic patient case. Dwell times are indexed by position in
/// `dwell_positions`; that order is the plan-vector order everywhere.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PatientCase {
    pub prescribed_dose_gy: f64,
    pub channels: Vec<Channel>,
    pub dwell_positions: Vec<DwellPosition>,
    pub rois: Vec<Roi>,
    pub reference_points: Vec<ReferencePoint>,
    pub applicator_axis: ApplicatorAxis,
}

/// Minimum clearance between any dwell position and any ROI shape, mm.
pub const EPS_GEOM_MM: f64 = 1.0;

/// Relative tolerance for stored-vs-recomputed analytic volumes.
const VOLUME_TOL_ANALYTIC: f64 = 1e-6;
/// Relative tolerance for stored-vs-recomputed Monte-Carlo volumes; loose
/// enough to accept volumes computed by an external tool.
const VOLUME_TOL_MC: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub enum CaseError {
    NonPositivePrescribedDose(f64),
    NoChannels,
    EmptyChannel { channel_id: u32 },
    DuplicateDwellId { id: u32 },
    UnknownDwellId { channel_id: u32, dwell_id: u32 },
    OrphanDwell { id: u32 },
    DwellInMultipleChannels { id: u32 },
    NonFinitePosition { dwell_id: u32 },
    DuplicateRoi { name: RoiName },
    VolumeMismatch { name: RoiName, stored_cm3: f64, computed_cm3: f64 },
    DwellTooClose { roi: RoiName, dwell_id: u32, clearance_mm: f64 },
    DuplicateReferencePoint { name: String },
    AxisNotUnit { norm: f64 },
    MissingRois { names: Vec<RoiName> },
    EmptyRegion { roi: RoiName },
    SamplingFailed { roi: RoiName },
    OverlappingRois { a: RoiName, b: RoiName },
}

impl core::fmt::Display for CaseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CaseError::NonPositivePrescribedDose(d) => {
                write!(f, "prescribed dose must be positive, got {d}")
            }
            CaseError::NoChannels => write!(f, "case has no channels"),
            CaseError::EmptyChannel { channel_id } => {
                write!(f, "channel {channel_id} has no dwell positions")
            }
            CaseError::DuplicateDwellId { id } => write!(f, "duplicate dwell id {id}"),
            CaseError::UnknownDwellId { channel_id, dwell_id } => {
                write!(f, "channel {channel_id} references unknown dwell id {dwell_id}")
            }
            CaseError::OrphanDwell { id } => {
                write!(f, "dwell {id} is not referenced by any channel")
            }
            CaseError::DwellInMultipleChannels { id } => {
                write!(f, "dwell {id} is referenced by more than one channel")
            }
            CaseError::NonFinitePosition { dwell_id } => {
                write!(f, "dwell {dwell_id} has a non-finite coordinate")
            }
            CaseError::DuplicateRoi { name } => write!(f, "duplicate ROI {name}"),
            CaseError::VolumeMismatch { name, stored_cm3, computed_cm3 } => write!(
                f,
                "ROI {name} stored volume {stored_cm3} cm3 disagrees with shape volume {computed_cm3} cm3"
            ),
            CaseError::DwellTooClose { roi, dwell_id, clearance_mm } => write!(
                f,
                "dwell {dwell_id} is within {clearance_mm} mm of ROI {roi} (minimum {EPS_GEOM_MM} mm)"
            ),
            CaseError::DuplicateReferencePoint { name } => {
                write!(f, "duplicate reference point {name}")
            }
            CaseError::AxisNotUnit { norm } => {
                write!(f, "applicator axis direction must be unit length, norm is {norm}")
            }
            CaseError::MissingRois { names } => {
                write!(f, "case is missing required ROIs:")?;
                for n in names {
                    write!(f, " {n}")?;
                }
                Ok(())
            }
            CaseError::EmptyRegion { roi } => write!(f, "ROI {roi} has an empty region"),
            CaseError::SamplingFailed { roi } => {
                write!(f, "could not sample calculation points inside ROI {roi}")
            }
            CaseError::OverlappingRois { a, b } => write!(f, "ROIs {a} and {b} overlap"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CaseError {}

impl PatientCase {
    pub fn n_dwells(&self) -> usize {
        self.dwell_positions.len()
    }

    pub fn roi(&self, name: RoiName) -> Option<&Roi> {
        self.rois.iter().find(|r| r.name == name)
    }

    pub fn roi_index(&self, name: RoiName) -> Option<usize> {
        self.rois.iter().position(|r| r.name == name)
    }

    pub fn reference_point(&self, name: &str) -> Option<&ReferencePoint> {
        self.reference_points.iter().find(|r| r.name == name)
    }

    /// Dwell-vector index for each dwell id.
    pub fn dwell_index_by_id(&self) -> BTreeMap<u32, usize> {
        self.dwell_positions
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id, i))
            .collect()
    }

    /// For each dwell-vector index, the channel vector index that owns it.
    /// Requires a valid case (every dwell in exactly one channel).
    pub fn channel_of_dwell(&self) -> Vec<usize> {
        let by_id = self.dwell_index_by_id();
        let mut owner = alloc::vec![usize::MAX; self.dwell_positions.len()];
        for (ci, ch) in self.channels.iter().enumerate() {
            for id in &ch.dwell_ids {
                if let Some(&di) = by_id.get(id) {
                    owner[di] = ci;
                }
            }
        }
        owner
    }

    /// Validates structural invariants with the default geometric clearance.
    pub fn validate(&self) -> Result<(), CaseError> {
        self.validate_with(EPS_GEOM_MM)
    }

    pub fn validate_with(&self, eps_geom_mm: f64) -> Result<(), CaseError> {
        if !(self.prescribed_dose_gy > 0.0) || !self.prescribed_dose_gy.is_finite() {
            return Err(CaseError::NonPositivePrescribedDose(self.prescribed_dose_gy));
        }
        if self.channels.is_empty() {
            return Err(CaseError::NoChannels);
        }

        let mut seen = BTreeMap::new();
        for d in &self.dwell_positions {
            if d.position.iter().any(|c| !c.is_finite()) {
                return Err(CaseError::NonFinitePosition { dwell_id: d.id });
            }
            if seen.insert(d.id, ()).is_some() {
                return Err(CaseError::DuplicateDwellId { id: d.id });
            }
        }

        let by_id = self.dwell_index_by_id();
        let mut refs = alloc::vec![0u8; self.dwell_positions.len()];
        for ch in &self.channels {
            if ch.dwell_ids.is_empty() {
                return Err(CaseError::EmptyChannel { channel_id: ch.id });
            }
            for id in &ch.dwell_ids {
                match by_id.get(id) {
                    None => {
                        return Err(CaseError::UnknownDwellId {
                            channel_id: ch.id,
                            dwell_id: *id,
                        })
                    }
                    Some(&di) => {
                        refs[di] += 1;
                        if refs[di] > 1 {
                            return Err(CaseError::DwellInMultipleChannels { id: *id });
                        }
                    }
                }
            }
        }
        for (di, n) in refs.iter().enumerate() {
            if *n == 0 {
                return Err(CaseError::OrphanDwell {
                    id: self.dwell_positions[di].id,
                });
            }
        }

        let mut names = BTreeMap::new();
        for roi in &self.rois {
            if names.insert(roi.name, ()).is_some() {
                return Err(CaseError::DuplicateRoi { name: roi.name });
            }
            let computed_cm3 = roi.shape.volume_mm3() / 1000.0;
            let tol = if roi.shape.is_analytic() {
                VOLUME_TOL_ANALYTIC
            } else {
                VOLUME_TOL_MC
            };
            if computed_cm3 <= 0.0 {
                return Err(CaseError::EmptyRegion { roi: roi.name });
            }
            if (roi.volume_cm3 - computed_cm3).abs() > tol * computed_cm3 {
                return Err(CaseError::VolumeMismatch {
                    name: roi.name,
                    stored_cm3: roi.volume_cm3,
                    computed_cm3,
                });
            }
            for d in &self.dwell_positions {
                let clearance = roi.shape.clearance_lb(d.position);
                if clearance < eps_geom_mm {
                    return Err(CaseError::DwellTooClose {
                        roi: roi.name,
                        dwell_id: d.id,
                        clearance_mm: clearance,
                    });
                }
            }
        }

        let mut ref_names = BTreeMap::new();
        for rp in &self.reference_points {
            if ref_names.insert(rp.name.clone(), ()).is_some() {
                return Err(CaseError::DuplicateReferencePoint {
                    name: rp.name.clone(),
                });
            }
        }

        let n = geometry::norm(self.applicator_axis.direction);
        if (n - 1.0).abs() > 1e-9 {
            return Err(CaseError::AxisNotUnit { norm: n });
        }
        Ok(())
    }
}

/// Uniformly sampled dose calculation points inside one ROI.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DcPointSet {
    pub roi_name: RoiName,
    pub seed: u64,
    pub points: Vec<Vec3>,
}

/// Samples `n` dose calculation points uniformly inside the named ROI.
///
/// Deterministic in `(roi, n, seed)`: the stream is derived from the seed,
/// the ROI slug, and `n`, so different ROIs and fidelities never share draws.
pub fn sample_dc_points(
    case: &PatientCase,
    roi_name: RoiName,
    n: usize,
    dc_seed: u64,
) -> Result<DcPointSet, CaseError> {
    let roi = case.roi(roi_name).ok_or(CaseError::MissingRois {
        names: alloc::vec![roi_name],
    })?;
    let mut rng = seed::rng(
        dc_seed,
        &[seed::tag("dc_points"), seed::tag(roi_name.slug()), n as u64],
    );
    let points = geometry::sample_in_shape(&roi.shape, n, &mut rng)
        .ok_or(CaseError::SamplingFailed { roi: roi_name })?;
    Ok(DcPointSet {
        roi_name,
        seed: dc_seed,
        points,
    })
}

/// Axial extent `(lo, hi)` of an ROI's include primitives along `axis`.
pub fn roi_axial_extent(roi: &Roi, axis: Vec3) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for prim in &roi.shape.include {
        let (a, b) = prim.axial_extent(axis);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    (lo, hi)
}

/// Recomputes the derived `mid_ctv_ir`, `mid_nt` and `top_nt` regions.
///
/// The mid slab spans from the lower axial extent of `ctv_ir` up to the upper
/// axial extent of `ctv_hr` (half-open at the top); the top slab continues
/// from there past the upper extent of the normal-tissue envelope. The
/// normal-tissue parent region is recovered from the stored `mid_nt`/`top_nt`
/// entries (their include primitives without the slab); normal tissue
/// excludes every delineated ROI and every applicator clearance cut found on
/// `ctv_ir`. Volumes of the three derived ROIs are recomputed.
pub fn split_mid_top(case: &PatientCase) -> Result<PatientCase, CaseError> {
    let required = [
        RoiName::CtvIr,
        RoiName::CtvHr,
        RoiName::MidNormalTissue,
        RoiName::TopNormalTissue,
    ];
    let missing: Vec<RoiName> = required
        .iter()
        .copied()
        .filter(|n| case.roi(*n).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(CaseError::MissingRois { names: missing });
    }

    let axis = case.applicator_axis.direction;
    let ctv_ir = case.roi(RoiName::CtvIr).unwrap();
    let ctv_hr = case.roi(RoiName::CtvHr).unwrap();
    let (ir_lo, _) = roi_axial_extent(ctv_ir, axis);
    let (_, hr_hi) = roi_axial_extent(ctv_hr, axis);

    let envelope_include = case.roi(RoiName::MidNormalTissue).unwrap().shape.include.clone();
    let mut env_hi = f64::NEG_INFINITY;
    for prim in &envelope_include {
        env_hi = env_hi.max(prim.axial_extent(axis).1);
    }

    let mid_slab = Slab { axis, lo: ir_lo, hi: hr_hi };
    let top_slab = Slab { axis, lo: hr_hi, hi: env_hi + 1.0 };

    // Normal tissue excludes all delineated regions plus the applicator
    // clearance capsules, which all appear on ctv_ir because every channel
    // passes through it.
    let mut nt_exclude: Vec<Primitive> = Vec::new();
    for roi in &case.rois {
        if !roi.name.is_derived() {
            nt_exclude.extend(roi.shape.include.iter().cloned());
        }
    }
    for prim in &ctv_ir.shape.exclude {
        if matches!(prim, Primitive::Capsule { .. }) && !nt_exclude.contains(prim) {
            nt_exclude.push(prim.clone());
        }
    }

    let mid_ctv_ir_shape = Shape {
        include: ctv_ir.shape.include.clone(),
        exclude: ctv_ir.shape.exclude.clone(),
        slab: Some(mid_slab.clone()),
    };
    let mid_nt_shape = Shape {
        include: envelope_include.clone(),
        exclude: nt_exclude.clone(),
        slab: Some(mid_slab),
    };
    let top_nt_shape = Shape {
        include: envelope_include,
        exclude: nt_exclude,
        slab: Some(top_slab),
    };

    let mut out = case.clone();
    for (name, kind, shape) in [
        (RoiName::MidCtvIr, RoiKind::Target, mid_ctv_ir_shape),
        (RoiName::MidNormalTissue, RoiKind::NormalTissue, mid_nt_shape),
        (RoiName::TopNormalTissue, RoiKind::NormalTissue, top_nt_shape),
    ] {
        let volume_cm3 = shape.volume_mm3() / 1000.0;
        if volume_cm3 <= 0.0 {
            return Err(CaseError::EmptyRegion { roi: name });
        }
        let entry = Roi { name, kind, shape, volume_cm3 };
        match out.rois.iter().position(|r| r.name == name) {
            Some(i) => out.rois[i] = entry,
            None => out.rois.push(entry),
        }
    }
    Ok(out)
}
