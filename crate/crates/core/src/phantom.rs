//! Synthetic patient phantom generation.
//!
//! A phantom is built from axis-aligned ellipsoids around a straight
//! applicator axis (+z): nested target volumes around the tandem, four
//! organs at risk placed around them, and a large normal-tissue envelope.
//! Interstitial needles are placed on a ring with seed-dependent jitter;
//! all ROI shapes are independent of the seed. Every ROI carves out
//! clearance capsules around the channels it touches so that dwell
//! positions keep a guaranteed distance to every region.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Primitive, Shape, Vec3};
use crate::patient::{
    split_mid_top, ApplicatorAxis, CaseError, Channel, ChannelKind, DwellPosition, PatientCase,
    ReferencePoint, Roi, RoiKind, RoiName,
};
use crate::seed;

/// Difficulty presets for the phantom generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomPreset {
    /// Generous target-to-organ gaps; all aims reachable at strict values.
    Easy,
    /// Larger targets and closer organs; aims compete.
    Medium,
    /// Organs nearly abutting the targets and few needles; the mandatory
    /// aims themselves are a stretch.
    Hard,
}

/// Full parameterization of a synthetic phantom.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhantomSpec {
    pub prescribed_dose_gy: f64,

    pub tandem_dwells: usize,
    pub tandem_start_mm: f64,
    pub tandem_step_mm: f64,
    pub ovoid_dwells: usize,
    pub ovoid_start_mm: f64,
    pub ovoid_step_mm: f64,
    pub ovoid_offset_mm: f64,
    pub needle_count: usize,
    pub needle_dwells: usize,
    pub needle_start_mm: f64,
    pub needle_step_mm: f64,
    pub needle_ring_radius_mm: f64,
    pub needle_radial_jitter_mm: f64,
    pub needle_angle_jitter_deg: f64,
    pub needle_axial_jitter_mm: f64,
    /// Radius of the clearance capsule carved around every channel.
    pub clearance_radius_mm: f64,

    pub gtv_center: Vec3,
    pub gtv_semi_axes: Vec3,
    pub ctv_hr_center: Vec3,
    pub ctv_hr_semi_axes: Vec3,
    pub ctv_ir_center: Vec3,
    pub ctv_ir_semi_axes: Vec3,
    pub bladder_center: Vec3,
    pub bladder_semi_axes: Vec3,
    pub rectum_center: Vec3,
    pub rectum_semi_axes: Vec3,
    pub sigmoid_center: Vec3,
    pub sigmoid_semi_axes: Vec3,
    pub bowel_center: Vec3,
    pub bowel_semi_axes: Vec3,
    pub envelope_center: Vec3,
    pub envelope_semi_axes: Vec3,

    pub rectovaginal_point: Vec3,
}

impl PhantomSpec {
    pub fn preset(preset: PhantomPreset) -> Self {
        match preset {
            PhantomPreset::Easy => Self::easy(),
            PhantomPreset::Medium => Self::medium(),
            PhantomPreset::Hard => Self::hard(),
        }
    }

    /// Comfortable geometry: organs sit several millimetres away from the
    /// intermediate-risk target and six needles support lateral coverage.
    pub fn easy() -> Self {
        PhantomSpec {
            prescribed_dose_gy: 7.0,
            tandem_dwells: 20,
            tandem_start_mm: 6.0,
            tandem_step_mm: 2.0,
            ovoid_dwells: 6,
            ovoid_start_mm: 2.0,
            ovoid_step_mm: 2.0,
            ovoid_offset_mm: 13.0,
            needle_count: 6,
            needle_dwells: 8,
            needle_start_mm: 8.0,
            needle_step_mm: 4.0,
            needle_ring_radius_mm: 16.0,
            needle_radial_jitter_mm: 1.0,
            needle_angle_jitter_deg: 4.0,
            needle_axial_jitter_mm: 1.0,
            clearance_radius_mm: 2.5,
            gtv_center: [0.0, 0.0, 20.0],
            gtv_semi_axes: [9.0, 8.0, 11.0],
            ctv_hr_center: [0.0, 0.0, 26.0],
            ctv_hr_semi_axes: [16.0, 14.0, 22.0],
            ctv_ir_center: [0.0, 0.0, 26.0],
            ctv_ir_semi_axes: [23.0, 21.0, 28.0],
            bladder_center: [0.0, 40.0, 30.0],
            bladder_semi_axes: [24.0, 16.0, 24.0],
            rectum_center: [0.0, -34.0, 20.0],
            rectum_semi_axes: [12.0, 10.0, 28.0],
            sigmoid_center: [0.0, -26.0, 62.0],
            sigmoid_semi_axes: [13.0, 11.0, 14.0],
            bowel_center: [0.0, 18.0, 66.0],
            bowel_semi_axes: [26.0, 20.0, 13.0],
            envelope_center: [0.0, 0.0, 30.0],
            envelope_semi_axes: [60.0, 60.0, 65.0],
            rectovaginal_point: [0.0, -25.0, 6.0],
        }
    }

    /// Larger targets with organs one millimetre off the intermediate-risk
    /// surface; sparing and coverage pull against each other.
    pub fn medium() -> Self {
        PhantomSpec {
            prescribed_dose_gy: 7.0,
            tandem_dwells: 20,
            tandem_start_mm: 6.0,
            tandem_step_mm: 2.4,
            ovoid_dwells: 6,
            ovoid_start_mm: 2.0,
            ovoid_step_mm: 2.0,
            ovoid_offset_mm: 13.0,
            needle_count: 6,
            needle_dwells: 8,
            needle_start_mm: 8.0,
            needle_step_mm: 4.5,
            needle_ring_radius_mm: 17.0,
            needle_radial_jitter_mm: 1.0,
            needle_angle_jitter_deg: 4.0,
            needle_axial_jitter_mm: 1.0,
            clearance_radius_mm: 2.5,
            gtv_center: [0.0, 0.0, 24.0],
            gtv_semi_axes: [10.0, 9.0, 12.0],
            ctv_hr_center: [0.0, 0.0, 30.0],
            ctv_hr_semi_axes: [19.0, 17.0, 26.0],
            ctv_ir_center: [0.0, 0.0, 30.0],
            ctv_ir_semi_axes: [24.0, 22.0, 32.0],
            bladder_center: [0.0, 39.0, 34.0],
            bladder_semi_axes: [24.0, 16.0, 24.0],
            rectum_center: [0.0, -33.0, 22.0],
            rectum_semi_axes: [12.0, 10.0, 30.0],
            sigmoid_center: [0.0, -24.0, 68.0],
            sigmoid_semi_axes: [13.0, 11.0, 14.0],
            bowel_center: [0.0, 16.0, 72.0],
            bowel_semi_axes: [26.0, 20.0, 13.0],
            envelope_center: [0.0, 0.0, 32.0],
            envelope_semi_axes: [62.0, 62.0, 70.0],
            rectovaginal_point: [0.0, -21.0, 6.0],
        }
    }

    /// Organs nearly abutting the targets, only two needles; mandatory aims
    /// are hard to reach simultaneously.
    pub fn hard() -> Self {
        PhantomSpec {
            prescribed_dose_gy: 7.0,
            tandem_dwells: 20,
            tandem_start_mm: 6.0,
            tandem_step_mm: 2.6,
            ovoid_dwells: 6,
            ovoid_start_mm: 2.0,
            ovoid_step_mm: 2.0,
            ovoid_offset_mm: 13.0,
            needle_count: 2,
            needle_dwells: 8,
            needle_start_mm: 8.0,
            needle_step_mm: 5.0,
            needle_ring_radius_mm: 17.0,
            needle_radial_jitter_mm: 1.0,
            needle_angle_jitter_deg: 4.0,
            needle_axial_jitter_mm: 1.0,
            clearance_radius_mm: 2.5,
            gtv_center: [0.0, 0.0, 26.0],
            gtv_semi_axes: [11.0, 10.0, 13.0],
            ctv_hr_center: [0.0, 0.0, 32.0],
            ctv_hr_semi_axes: [21.0, 19.0, 28.0],
            ctv_ir_center: [0.0, 0.0, 32.0],
            ctv_ir_semi_axes: [26.0, 24.0, 34.0],
            bladder_center: [0.0, 41.0, 36.0],
            bladder_semi_axes: [24.0, 16.0, 24.0],
            rectum_center: [0.0, -35.0, 24.0],
            rectum_semi_axes: [12.0, 10.0, 30.0],
            sigmoid_center: [0.0, -26.0, 72.0],
            sigmoid_semi_axes: [13.0, 11.0, 14.0],
            bowel_center: [0.0, 18.0, 76.0],
            bowel_semi_axes: [26.0, 20.0, 13.0],
            envelope_center: [0.0, 0.0, 34.0],
            envelope_semi_axes: [64.0, 64.0, 74.0],
            rectovaginal_point: [0.0, -18.0, 6.0],
        }
    }
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self::easy()
    }
}

/// Pairs of ROIs probed for accidental overlap. Nested targets are legal,
/// and the envelope deliberately contains everything.
const DISJOINT_PAIRS: [(RoiName, RoiName); 15] = [
    (RoiName::CtvIr, RoiName::Bladder),
    (RoiName::CtvIr, RoiName::Rectum),
    (RoiName::CtvIr, RoiName::Sigmoid),
    (RoiName::CtvIr, RoiName::Bowel),
    (RoiName::CtvHr, RoiName::Bladder),
    (RoiName::CtvHr, RoiName::Rectum),
    (RoiName::CtvHr, RoiName::Sigmoid),
    (RoiName::CtvHr, RoiName::Bowel),
    (RoiName::GtvRes, RoiName::Bladder),
    (RoiName::GtvRes, RoiName::Rectum),
    (RoiName::GtvRes, RoiName::Sigmoid),
    (RoiName::GtvRes, RoiName::Bowel),
    (RoiName::Bladder, RoiName::Rectum),
    (RoiName::Bladder, RoiName::Bowel),
    (RoiName::Rectum, RoiName::Sigmoid),
];

const OVERLAP_PROBE_SAMPLES: usize = 20_000;

/// Generates a validated patient case from a phantom spec.
///
/// The ROI shapes depend only on the spec; the seed moves the needle ring
/// (angle, radius and axial jitter) and nothing else. Dwell positions along
/// a channel are uniformly spaced.
pub fn generate_phantom(spec: &PhantomSpec, master_seed: u64) -> Result<PatientCase, CaseError> {
    let mut rng = seed::rng(master_seed, &[seed::tag("phantom_needles")]);

    let mut channels = Vec::new();
    let mut dwells: Vec<DwellPosition> = Vec::new();
    let mut next_dwell = 0u32;
    let mut add_channel = |kind: ChannelKind,
                           base: Vec3,
                           start: f64,
                           step: f64,
                           count: usize,
                           channels: &mut Vec<Channel>,
                           dwells: &mut Vec<DwellPosition>| {
        let id = channels.len() as u32;
        let mut dwell_ids = Vec::with_capacity(count);
        for k in 0..count {
            let z = start + step * (k as f64);
            dwells.push(DwellPosition {
                id: next_dwell,
                position: [base[0], base[1], base[2] + z],
            });
            dwell_ids.push(next_dwell);
            next_dwell += 1;
        }
        channels.push(Channel { id, kind, dwell_ids });
    };

    add_channel(
        ChannelKind::IntracavitaryTandem,
        [0.0, 0.0, 0.0],
        spec.tandem_start_mm,
        spec.tandem_step_mm,
        spec.tandem_dwells,
        &mut channels,
        &mut dwells,
    );
    for side in [-1.0, 1.0] {
        add_channel(
            ChannelKind::Ovoid,
            [side * spec.ovoid_offset_mm, 0.0, 0.0],
            spec.ovoid_start_mm,
            spec.ovoid_step_mm,
            spec.ovoid_dwells,
            &mut channels,
            &mut dwells,
        );
    }
    for i in 0..spec.needle_count {
        let base_angle = 360.0 * (i as f64) / (spec.needle_count as f64);
        let d_angle = rng.gen_range(-spec.needle_angle_jitter_deg..=spec.needle_angle_jitter_deg);
        let d_radius =
            rng.gen_range(-spec.needle_radial_jitter_mm..=spec.needle_radial_jitter_mm);
        let d_axial = rng.gen_range(-spec.needle_axial_jitter_mm..=spec.needle_axial_jitter_mm);
        let angle = (base_angle + d_angle).to_radians();
        let radius = spec.needle_ring_radius_mm + d_radius;
        let base = [
            radius * crate::math::cos(angle),
            radius * crate::math::sin(angle),
            d_axial,
        ];
        add_channel(
            ChannelKind::Needle,
            base,
            spec.needle_start_mm,
            spec.needle_step_mm,
            spec.needle_dwells,
            &mut channels,
            &mut dwells,
        );
    }

    // Clearance capsule around each channel, extended past both end dwells.
    let capsule_margin = 4.0;
    let mut capsules = Vec::with_capacity(channels.len());
    for ch in &channels {
        let first = dwells[ch.dwell_ids[0] as usize].position;
        let last = dwells[*ch.dwell_ids.last().unwrap() as usize].position;
        capsules.push(Primitive::Capsule {
            start: [first[0], first[1], first[2] - capsule_margin],
            end: [last[0], last[1], last[2] + capsule_margin],
            radius: spec.clearance_radius_mm,
        });
    }

    let roi_defs: [(RoiName, RoiKind, Vec3, Vec3); 7] = [
        (RoiName::GtvRes, RoiKind::Target, spec.gtv_center, spec.gtv_semi_axes),
        (RoiName::CtvHr, RoiKind::Target, spec.ctv_hr_center, spec.ctv_hr_semi_axes),
        (RoiName::CtvIr, RoiKind::Target, spec.ctv_ir_center, spec.ctv_ir_semi_axes),
        (RoiName::Bladder, RoiKind::Oar, spec.bladder_center, spec.bladder_semi_axes),
        (RoiName::Rectum, RoiKind::Oar, spec.rectum_center, spec.rectum_semi_axes),
        (RoiName::Sigmoid, RoiKind::Oar, spec.sigmoid_center, spec.sigmoid_semi_axes),
        (RoiName::Bowel, RoiKind::Oar, spec.bowel_center, spec.bowel_semi_axes),
    ];

    let mut rois = Vec::new();
    for (name, kind, center, semi_axes) in roi_defs {
        let body = Primitive::Ellipsoid { center, semi_axes };
        let bb = body.aabb();
        // Keep only capsules that can actually touch the body, so distant
        // organs stay single-primitive and keep analytic volumes.
        let exclude: Vec<Primitive> = capsules
            .iter()
            .filter(|c| c.aabb().intersects(&bb))
            .cloned()
            .collect();
        let shape = Shape {
            include: vec![body],
            exclude,
            slab: None,
        };
        let volume_cm3 = shape.volume_mm3() / 1000.0;
        rois.push(Roi { name, kind, shape, volume_cm3 });
    }

    // Provisional normal-tissue entries carrying the envelope; the real
    // slabs, cuts and volumes come from split_mid_top below.
    let envelope = Primitive::Ellipsoid {
        center: spec.envelope_center,
        semi_axes: spec.envelope_semi_axes,
    };
    for name in [RoiName::MidNormalTissue, RoiName::TopNormalTissue] {
        rois.push(Roi {
            name,
            kind: RoiKind::NormalTissue,
            shape: Shape::primitive(envelope.clone()),
            volume_cm3: envelope.volume_mm3() / 1000.0,
        });
    }

    let case = PatientCase {
        prescribed_dose_gy: spec.prescribed_dose_gy,
        channels,
        dwell_positions: dwells,
        rois,
        reference_points: vec![ReferencePoint {
            name: "icru_rectovaginal".into(),
            position: spec.rectovaginal_point,
        }],
        applicator_axis: ApplicatorAxis {
            origin: [0.0, 0.0, 0.0],
            direction: [0.0, 0.0, 1.0],
        },
    };

    let case = split_mid_top(&case)?;
    check_disjoint(&case)?;
    case.validate()?;
    Ok(case)
}

/// Probes mandatory ROI pairs for overlap with a fixed-seed point cloud.
fn check_disjoint(case: &PatientCase) -> Result<(), CaseError> {
    for (a, b) in DISJOINT_PAIRS {
        let (ra, rb) = match (case.roi(a), case.roi(b)) {
            (Some(ra), Some(rb)) => (ra, rb),
            _ => continue,
        };
        if !ra.shape.aabb().intersects(&rb.shape.aabb()) {
            continue;
        }
        let mut rng = seed::rng(0x0D15_70CC, &[seed::tag(a.slug()), seed::tag(b.slug())]);
        if let Some(points) =
            crate::geometry::sample_in_shape(&ra.shape, OVERLAP_PROBE_SAMPLES, &mut rng)
        {
            if points.iter().any(|&p| rb.shape.contains(p)) {
                return Err(CaseError::OverlappingRois { a, b });
            }
        }
    }
    Ok(())
}
