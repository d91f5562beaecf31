//! Clinical protocol: mandatory aims with fixed aspirations plus an added
//! set of prioritized aims whose aspirations may be adjusted between strict
//! and loose bounds, or eliminated entirely.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dvi::{Direction, DviKind, DviSpec, DviTarget};
use crate::patient::{PatientCase, RoiName};

/// Which objective an aim contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AimGroup {
    Coverage,
    Sparing,
}

/// Whether an aim belongs to the mandatory base protocol or the added set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AimTier {
    Embrace,
    Added,
}

/// One aim: a DVI with an aspiration value (percent of prescribed dose for
/// `D` indices, percent of ROI volume for `V` indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AimSpec {
    pub dvi: DviSpec,
    pub group: AimGroup,
    pub tier: AimTier,
    /// 1 is the highest priority (the mandatory tier); larger numbers are
    /// adjusted in coarser steps and eliminated earlier.
    pub priority: u8,
    /// The aspiration the adaptive loop starts from.
    pub aspiration_strict: f64,
    /// The farthest the aspiration may be relaxed. Equals the strict value
    /// for mandatory aims.
    pub aspiration_loose: f64,
    /// Whether the adaptive loop may move this aim's aspiration.
    pub adjustable: bool,
}

impl AimSpec {
    /// Stable identifier: the DVI slug plus the aspiration direction, e.g.
    /// `d90_ctv_hr_gt` (value should exceed the aspiration) vs
    /// `d90_ctv_hr_lt`.
    pub fn id(&self) -> String {
        let suffix = match self.dvi.direction {
            Direction::Maximize => "gt",
            Direction::Minimize => "lt",
        };
        alloc::format!("{}_{suffix}", self.dvi.slug())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolError {
    NoAims,
    BadPriority { aim: String, priority: u8 },
    NotAdjustable { aim: String },
    BadRange { aim: String },
    UnknownRoi { aim: String, roi: RoiName },
    UnknownPoint { aim: String, point: String },
    DuplicateAim { aim: String },
}

impl core::fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProtocolError::NoAims => write!(f, "protocol has no aims"),
            ProtocolError::BadPriority { aim, priority } => {
                write!(f, "aim {aim} has invalid priority {priority}")
            }
            ProtocolError::NotAdjustable { aim } => write!(
                f,
                "aim {aim} mixes tier and adjustability inconsistently"
            ),
            ProtocolError::BadRange { aim } => write!(
                f,
                "aim {aim} has loose aspiration on the strict side of strict"
            ),
            ProtocolError::UnknownRoi { aim, roi } => {
                write!(f, "aim {aim} references ROI {roi} absent from the case")
            }
            ProtocolError::UnknownPoint { aim, point } => {
                write!(f, "aim {aim} references unknown reference point {point}")
            }
            ProtocolError::DuplicateAim { aim } => write!(f, "duplicate aim {aim}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProtocolError {}

/// The full set of aims optimized for a case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub aims: Vec<AimSpec>,
}

fn aim(
    target: RoiName,
    kind: DviKind,
    direction: Direction,
    group: AimGroup,
    tier: AimTier,
    priority: u8,
    strict: f64,
    loose: f64,
) -> AimSpec {
    AimSpec {
        dvi: DviSpec {
            target: DviTarget::Roi(target),
            kind,
            direction,
        },
        group,
        tier,
        priority,
        aspiration_strict: strict,
        aspiration_loose: loose,
        adjustable: tier == AimTier::Added,
    }
}

impl ProtocolConfig {
    /// The default protocol: the mandatory base aims (all priority 1, fixed)
    /// plus the added set with aim ranges and priorities 2 to 4. Aspirations
    /// are percentages of the prescribed dose (for `D`) or ROI volume
    /// (for `V`).
    pub fn default_protocol() -> Self {
        use AimGroup::{Coverage, Sparing};
        use AimTier::{Added, Embrace};
        use Direction::{Maximize, Minimize};

        let d = |fraction| DviKind::DVolumeFraction { fraction };
        let v = |dose_pct| DviKind::VDose { dose_pct };
        let d2 = DviKind::DVolumeAbsolute { cm3: 2.0 };

        let aims = vec![
            // Mandatory coverage.
            aim(RoiName::CtvHr, d(0.90), Maximize, Coverage, Embrace, 1, 111.0, 111.0),
            aim(RoiName::CtvHr, d(0.98), Maximize, Coverage, Embrace, 1, 83.0, 83.0),
            aim(RoiName::GtvRes, d(0.98), Maximize, Coverage, Embrace, 1, 119.0, 119.0),
            aim(RoiName::CtvIr, d(0.98), Maximize, Coverage, Embrace, 1, 50.0, 50.0),
            // Mandatory sparing.
            aim(RoiName::CtvHr, d(0.90), Minimize, Sparing, Embrace, 1, 119.0, 119.0),
            aim(RoiName::Bladder, d2.clone(), Minimize, Sparing, Embrace, 1, 78.0, 78.0),
            aim(RoiName::Rectum, d2.clone(), Minimize, Sparing, Embrace, 1, 56.0, 56.0),
            AimSpec {
                dvi: DviSpec {
                    target: DviTarget::Point("icru_rectovaginal".into()),
                    kind: DviKind::DPoint,
                    direction: Minimize,
                },
                group: Sparing,
                tier: Embrace,
                priority: 1,
                aspiration_strict: 56.0,
                aspiration_loose: 56.0,
                adjustable: false,
            },
            aim(RoiName::Sigmoid, d2.clone(), Minimize, Sparing, Embrace, 1, 64.0, 64.0),
            aim(RoiName::Bowel, d2, Minimize, Sparing, Embrace, 1, 64.0, 64.0),
            // Added coverage.
            aim(RoiName::CtvHr, v(100.0), Maximize, Coverage, Added, 2, 99.9, 90.0),
            aim(RoiName::CtvIr, v(50.0), Maximize, Coverage, Added, 3, 99.9, 90.0),
            // Added sparing.
            aim(RoiName::MidCtvIr, v(100.0), Minimize, Sparing, Added, 3, 25.0, 35.0),
            aim(RoiName::MidNormalTissue, v(100.0), Minimize, Sparing, Added, 4, 0.1, 1.5),
            aim(RoiName::TopNormalTissue, v(100.0), Minimize, Sparing, Added, 4, 0.2, 7.0),
        ];
        ProtocolConfig { aims }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.aims.is_empty() {
            return Err(ProtocolError::NoAims);
        }
        let mut ids: Vec<String> = Vec::new();
        for a in &self.aims {
            let id = a.id();
            if ids.contains(&id) {
                return Err(ProtocolError::DuplicateAim { aim: id });
            }
            ids.push(id.clone());
            match a.tier {
                AimTier::Embrace => {
                    if a.priority != 1 {
                        return Err(ProtocolError::BadPriority {
                            aim: id,
                            priority: a.priority,
                        });
                    }
                    if a.adjustable || a.aspiration_loose != a.aspiration_strict {
                        return Err(ProtocolError::NotAdjustable { aim: id });
                    }
                }
                AimTier::Added => {
                    if a.priority < 2 {
                        return Err(ProtocolError::BadPriority {
                            aim: id,
                            priority: a.priority,
                        });
                    }
                    if !a.adjustable {
                        return Err(ProtocolError::NotAdjustable { aim: id });
                    }
                    // Loosening must move against the optimization direction.
                    let ok = match a.dvi.direction {
                        Direction::Maximize => a.aspiration_loose <= a.aspiration_strict,
                        Direction::Minimize => a.aspiration_loose >= a.aspiration_strict,
                    };
                    if !ok {
                        return Err(ProtocolError::BadRange { aim: id });
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that every referenced ROI and reference point exists.
    pub fn validate_against_case(&self, case: &PatientCase) -> Result<(), ProtocolError> {
        for a in &self.aims {
            match &a.dvi.target {
                DviTarget::Roi(r) => {
                    if case.roi(*r).is_none() {
                        return Err(ProtocolError::UnknownRoi {
                            aim: a.id(),
                            roi: *r,
                        });
                    }
                }
                DviTarget::Point(p) => {
                    if case.reference_point(p).is_none() {
                        return Err(ProtocolError::UnknownPoint {
                            aim: a.id(),
                            point: p.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Free-function alias for [`ProtocolConfig::default_protocol`].
pub fn default_protocol() -> ProtocolConfig {
    ProtocolConfig::default_protocol()
}

/// Runtime state of one adjustable aim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AimState {
    pub current_aspiration: f64,
    pub eliminated: bool,
    pub steps_taken: u32,
}

/// Per-aim runtime states, indexed like `ProtocolConfig::aims`. Mandatory
/// aims carry `None`; their aspirations never move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AimStates(pub Vec<Option<AimState>>);

impl AimStates {
    /// Initial states: adjustable aims start at their strict aspiration.
    pub fn initial(protocol: &ProtocolConfig) -> Self {
        AimStates(
            protocol
                .aims
                .iter()
                .map(|a| {
                    a.adjustable.then_some(AimState {
                        current_aspiration: a.aspiration_strict,
                        eliminated: false,
                        steps_taken: 0,
                    })
                })
                .collect(),
        )
    }

    /// Effective aspiration of aim `i`, `None` when eliminated.
    pub fn aspiration(&self, protocol: &ProtocolConfig, i: usize) -> Option<f64> {
        match &self.0[i] {
            None => Some(protocol.aims[i].aspiration_strict),
            Some(st) if st.eliminated => None,
            Some(st) => Some(st.current_aspiration),
        }
    }

    /// Lowest active priority (largest number) over non-eliminated
    /// adjustable aims; `None` when every adjustable aim is eliminated.
    pub fn lowest_active_priority(&self, protocol: &ProtocolConfig) -> Option<u8> {
        self.0
            .iter()
            .zip(&protocol.aims)
            .filter_map(|(st, a)| match st {
                Some(s) if !s.eliminated => Some(a.priority),
                _ => None,
            })
            .max()
    }
}
