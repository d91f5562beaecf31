//! Plan evaluator: owns dose-rate matrices for all measured regions and
//! turns dwell-time vectors into DVI values and objective pairs, with a
//! partial-update fast path for the optimizer's variation loop.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dose::{DoseError, DoseKernelConfig, DoseRateTable};
use crate::dvi::{self, DviError, DviKind, DviTarget};
use crate::geometry::Vec3;
use crate::objective::{
    self, ConstraintConfig, ObjectiveError, ObjectiveMode, ObjectivePair,
};
use crate::patient::{self, CaseError, PatientCase, RoiName};
use crate::protocol::{AimGroup, AimStates, AimTier, ProtocolConfig, ProtocolError};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    Case(CaseError),
    Protocol(ProtocolError),
    Dose(DoseError),
    Dvi(DviError),
    Objective(ObjectiveError),
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::Case(e) => write!(f, "case: {e}"),
            EvalError::Protocol(e) => write!(f, "protocol: {e}"),
            EvalError::Dose(e) => write!(f, "dose: {e}"),
            EvalError::Dvi(e) => write!(f, "dvi: {e}"),
            EvalError::Objective(e) => write!(f, "objective: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

impl From<CaseError> for EvalError {
    fn from(e: CaseError) -> Self {
        EvalError::Case(e)
    }
}
impl From<ProtocolError> for EvalError {
    fn from(e: ProtocolError) -> Self {
        EvalError::Protocol(e)
    }
}
impl From<DoseError> for EvalError {
    fn from(e: DoseError) -> Self {
        EvalError::Dose(e)
    }
}
impl From<DviError> for EvalError {
    fn from(e: DviError) -> Self {
        EvalError::Dvi(e)
    }
}
impl From<ObjectiveError> for EvalError {
    fn from(e: ObjectiveError) -> Self {
        EvalError::Objective(e)
    }
}

/// One resolved measurement over the evaluator's dose state.
#[derive(Debug, Clone, PartialEq)]
enum MeasKind {
    /// Percent of points at or above a dose threshold.
    VDose { roi: usize, threshold_pct: f64 },
    /// Descending order statistic; `select_idx` is the ascending selection
    /// index `n - ceil(v*n)` precomputed for the evaluator's fidelity.
    DVolume { roi: usize, select_idx: usize },
    /// Dose at a reference point.
    Point { point: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub slug: String,
    kind: MeasKind,
}

/// Protocol measurements resolved against a case at one fidelity: unique
/// DVIs (deduplicated by slug), the ROIs and reference points they touch,
/// and the measurement feeding each aim.
#[derive(Debug, Clone)]
struct MeasurementPlan {
    rois: Vec<RoiName>,
    ref_names: Vec<String>,
    measurements: Vec<Measurement>,
    aim_measurement: Vec<usize>,
}

fn resolve_measurements(
    case: &PatientCase,
    protocol: &ProtocolConfig,
    n_dc: usize,
) -> Result<MeasurementPlan, EvalError> {
    let mut rois: Vec<RoiName> = Vec::new();
    let mut ref_names: Vec<String> = Vec::new();
    let mut measurements: Vec<Measurement> = Vec::new();
    let mut aim_measurement = Vec::with_capacity(protocol.aims.len());

    for aim in &protocol.aims {
        let slug = aim.dvi.slug();
        if let Some(idx) = measurements.iter().position(|m| m.slug == slug) {
            aim_measurement.push(idx);
            continue;
        }
        let kind = match (&aim.dvi.target, &aim.dvi.kind) {
            (DviTarget::Roi(r), k) => {
                let roi = match rois.iter().position(|x| x == r) {
                    Some(i) => i,
                    None => {
                        rois.push(*r);
                        rois.len() - 1
                    }
                };
                match k {
                    DviKind::VDose { dose_pct } => MeasKind::VDose {
                        roi,
                        threshold_pct: *dose_pct,
                    },
                    DviKind::DVolumeFraction { fraction } => MeasKind::DVolume {
                        roi,
                        select_idx: select_index(*fraction, n_dc)?,
                    },
                    DviKind::DVolumeAbsolute { cm3 } => {
                        let vol = case.roi(*r).expect("validated").volume_cm3;
                        let fraction = dvi::absolute_to_fraction(*cm3, vol)?;
                        MeasKind::DVolume {
                            roi,
                            select_idx: select_index(fraction, n_dc)?,
                        }
                    }
                    DviKind::DPoint => {
                        return Err(EvalError::Protocol(ProtocolError::UnknownPoint {
                            aim: aim.id(),
                            point: r.slug().into(),
                        }))
                    }
                }
            }
            (DviTarget::Point(p), DviKind::DPoint) => {
                let point = match ref_names.iter().position(|x| x == p) {
                    Some(i) => i,
                    None => {
                        ref_names.push(p.clone());
                        ref_names.len() - 1
                    }
                };
                MeasKind::Point { point }
            }
            (DviTarget::Point(p), _) => {
                return Err(EvalError::Protocol(ProtocolError::UnknownPoint {
                    aim: aim.id(),
                    point: p.clone(),
                }))
            }
        };
        measurements.push(Measurement { slug, kind });
        aim_measurement.push(measurements.len() - 1);
    }
    Ok(MeasurementPlan {
        rois,
        ref_names,
        measurements,
        aim_measurement,
    })
}

/// One plan with cached evaluation state.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub dwell_times: Vec<f64>,
    /// Dose per calculation point, parallel to the evaluator's ROI list.
    pub roi_dose: Vec<Vec<f64>>,
    /// Dose at the evaluator's reference points.
    pub ref_dose: Vec<f64>,
    /// One value per measurement (see [`Evaluator::measurements`]).
    pub dvi_values: Vec<f64>,
    pub objectives: ObjectivePair,
    pub cr_feasible: bool,
}

/// Reusable buffers for DVI selection and objective aggregation.
#[derive(Debug, Default, Clone)]
pub struct EvalScratch {
    select: Vec<f64>,
    order: Vec<usize>,
    coverage: Vec<f64>,
    sparing: Vec<f64>,
}

/// Reusable buffers holding one uncommitted trial evaluation; see
/// [`Evaluator::evaluate_trial`].
#[derive(Debug, Default, Clone)]
pub struct TrialBuffers {
    dwell_times: Vec<f64>,
    roi_dose: Vec<Vec<f64>>,
    ref_dose: Vec<f64>,
    dvi_values: Vec<f64>,
    deltas: Vec<(usize, f64)>,
}

impl TrialBuffers {
    pub fn dwell_times(&self) -> &[f64] {
        &self.dwell_times
    }
    pub fn dvi_values(&self) -> &[f64] {
        &self.dvi_values
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatorConfig {
    pub kernel: DoseKernelConfig,
    pub constraint: ConstraintConfig,
    /// Calculation points per ROI.
    pub n_dc: usize,
    /// Master seed for calculation point sampling.
    pub dc_seed: u64,
}

/// Evaluates dwell-time plans against a protocol on one patient case.
#[derive(Debug, Clone)]
pub struct Evaluator {
    n_dwells: usize,
    mode: ObjectiveMode,
    protocol: ProtocolConfig,
    states: AimStates,
    config: EvaluatorConfig,
    plan: MeasurementPlan,
    tables: Vec<DoseRateTable>,
    ref_table: Option<DoseRateTable>,
    neighbor: Vec<Option<usize>>,
    needle_dwells: Vec<Vec<usize>>,
}

impl Evaluator {
    /// Builds matrices and measurement plumbing for a case and protocol.
    /// All DVIs are measured in both modes; the mode only controls which
    /// aims enter the objectives.
    pub fn new(
        case: &PatientCase,
        protocol: &ProtocolConfig,
        mode: ObjectiveMode,
        config: EvaluatorConfig,
    ) -> Result<Self, EvalError> {
        protocol.validate()?;
        protocol.validate_against_case(case)?;
        let plan = resolve_measurements(case, protocol, config.n_dc)?;

        let dwell_positions: Vec<Vec3> =
            case.dwell_positions.iter().map(|d| d.position).collect();
        let mut tables = Vec::with_capacity(plan.rois.len());
        for r in &plan.rois {
            let dc = patient::sample_dc_points(case, *r, config.n_dc, config.dc_seed)?;
            tables.push(DoseRateTable::build(
                &dc.points,
                &dwell_positions,
                &config.kernel,
                case.prescribed_dose_gy,
            ));
        }
        let ref_table = if plan.ref_names.is_empty() {
            None
        } else {
            let pts: Vec<Vec3> = plan
                .ref_names
                .iter()
                .map(|p| case.reference_point(p).expect("validated").position)
                .collect();
            Some(DoseRateTable::build(
                &pts,
                &dwell_positions,
                &config.kernel,
                case.prescribed_dose_gy,
            ))
        };

        Ok(Evaluator {
            n_dwells: case.n_dwells(),
            mode,
            protocol: protocol.clone(),
            states: AimStates::initial(protocol),
            config,
            plan,
            tables,
            ref_table,
            neighbor: objective::build_neighbor_map(case),
            needle_dwells: objective::needle_channel_dwells(case),
        })
    }

    pub fn n_dwells(&self) -> usize {
        self.n_dwells
    }
    pub fn mode(&self) -> ObjectiveMode {
        self.mode
    }
    pub fn protocol(&self) -> &ProtocolConfig {
        &self.protocol
    }
    pub fn states(&self) -> &AimStates {
        &self.states
    }
    pub fn set_states(&mut self, states: AimStates) {
        self.states = states;
    }
    pub fn constraint_config(&self) -> &ConstraintConfig {
        &self.config.constraint
    }
    pub fn config(&self) -> &EvaluatorConfig {
        &self.config
    }
    pub fn measurements(&self) -> &[Measurement] {
        &self.plan.measurements
    }
    pub fn rois(&self) -> &[RoiName] {
        &self.plan.rois
    }
    /// Measurement index feeding aim `i`.
    pub fn aim_measurement(&self, i: usize) -> usize {
        self.plan.aim_measurement[i]
    }
    pub fn needle_dwells(&self) -> &[Vec<usize>] {
        &self.needle_dwells
    }

    /// Full evaluation of a dwell-time vector.
    pub fn evaluate(
        &self,
        times: &[f64],
        scratch: &mut EvalScratch,
    ) -> Result<Solution, EvalError> {
        if times.len() != self.n_dwells {
            return Err(EvalError::Dose(DoseError::LengthMismatch {
                expected: self.n_dwells,
                got: times.len(),
            }));
        }
        let mut roi_dose = Vec::with_capacity(self.tables.len());
        for table in &self.tables {
            roi_dose.push(table.compute_dose(times)?);
        }
        let ref_dose = match &self.ref_table {
            Some(t) => t.compute_dose(times)?,
            None => Vec::new(),
        };
        let mut sol = Solution {
            dwell_times: times.to_vec(),
            roi_dose,
            ref_dose,
            dvi_values: vec![0.0; self.plan.measurements.len()],
            objectives: ObjectivePair::default(),
            cr_feasible: false,
        };
        self.refresh_derived(&mut sol, scratch);
        Ok(sol)
    }

    /// Applies new values to the given dwell indices: dose caches and the
    /// stored times are updated incrementally. Changes apply in order, so a
    /// repeated index behaves as last-write-wins. Derived values (DVIs,
    /// objectives) are left stale; call [`Self::refresh_derived`].
    pub fn partial_update_solution(&self, sol: &mut Solution, changed: &[usize], new_vals: &[f64]) {
        debug_assert_eq!(changed.len(), new_vals.len());
        // Record deltas in order (a repeated index stays last-write-wins),
        // then fold them into each dose vector in one fused pass; the update
        // is memory-bound, so revisiting a vector once per column roughly
        // doubles the traffic.
        let mut deltas: Vec<(usize, f64)> = Vec::with_capacity(changed.len());
        for (k, &j) in changed.iter().enumerate() {
            let dt = new_vals[k] - sol.dwell_times[j];
            if dt != 0.0 {
                deltas.push((j, dt));
            }
            sol.dwell_times[j] = new_vals[k];
        }
        if deltas.is_empty() {
            return;
        }
        for (dose, table) in sol.roi_dose.iter_mut().zip(&self.tables) {
            fused_axpy(dose, table, &deltas);
        }
        if let Some(t) = &self.ref_table {
            fused_axpy(&mut sol.ref_dose, t, &deltas);
        }
    }

    /// Recomputes DVI values, objectives and CR feasibility from the
    /// solution's cached dose state.
    pub fn refresh_derived(&self, sol: &mut Solution, scratch: &mut EvalScratch) {
        compute_dvis(
            &self.plan.measurements,
            &sol.roi_dose,
            &sol.ref_dose,
            &mut sol.dvi_values,
            scratch,
        );
        self.refresh_objectives(sol, scratch);
    }

    /// Evaluates `sol` with `new_vals` applied at `changed`, into `trial`,
    /// leaving `sol` untouched: each dose vector is recomputed in one fused
    /// pass, then measurements and objectives follow from the trial state.
    /// Adopt the result with [`Self::commit_trial`]; discarding a trial
    /// costs nothing. The stale DVI entries of `sol` serve as selection
    /// hints, so trial evaluation is cheapest near the current state.
    pub fn evaluate_trial(
        &self,
        sol: &Solution,
        changed: &[usize],
        new_vals: &[f64],
        trial: &mut TrialBuffers,
        scratch: &mut EvalScratch,
    ) -> ObjectivePair {
        debug_assert_eq!(changed.len(), new_vals.len());
        trial.dwell_times.clear();
        trial.dwell_times.extend_from_slice(&sol.dwell_times);
        trial.deltas.clear();
        for (k, &j) in changed.iter().enumerate() {
            let dt = new_vals[k] - trial.dwell_times[j];
            if dt != 0.0 {
                trial.deltas.push((j, dt));
            }
            trial.dwell_times[j] = new_vals[k];
        }
        trial.roi_dose.resize(self.tables.len(), Vec::new());
        for ((dst, src), table) in trial
            .roi_dose
            .iter_mut()
            .zip(&sol.roi_dose)
            .zip(&self.tables)
        {
            dst.resize(src.len(), 0.0);
            fused_axpy_into(dst, src, table, &trial.deltas);
        }
        if let Some(t) = &self.ref_table {
            trial.ref_dose.resize(sol.ref_dose.len(), 0.0);
            fused_axpy_into(&mut trial.ref_dose, &sol.ref_dose, t, &trial.deltas);
        }
        trial.dvi_values.clear();
        trial.dvi_values.extend_from_slice(&sol.dvi_values);
        compute_dvis(
            &self.plan.measurements,
            &trial.roi_dose,
            &trial.ref_dose,
            &mut trial.dvi_values,
            scratch,
        );
        score_objectives(
            &self.protocol,
            &self.states,
            self.mode,
            &self.plan.aim_measurement,
            &trial.dvi_values,
            &trial.dwell_times,
            &self.neighbor,
            &self.config.constraint,
            scratch,
        )
    }

    /// Adopts a trial prepared by [`Self::evaluate_trial`] as the solution's
    /// state. Buffers are swapped, so afterwards `trial` holds the replaced
    /// state and is ready for reuse.
    pub fn commit_trial(
        &self,
        sol: &mut Solution,
        trial: &mut TrialBuffers,
        objectives: ObjectivePair,
    ) {
        core::mem::swap(&mut sol.dwell_times, &mut trial.dwell_times);
        core::mem::swap(&mut sol.roi_dose, &mut trial.roi_dose);
        core::mem::swap(&mut sol.ref_dose, &mut trial.ref_dose);
        core::mem::swap(&mut sol.dvi_values, &mut trial.dvi_values);
        sol.objectives = objectives;
        sol.cr_feasible = objective::check_catheter_contribution(
            &sol.dwell_times,
            &self.needle_dwells,
            &self.config.constraint,
        );
    }

    /// Recomputes objectives and CR feasibility from cached DVI values and
    /// times; used directly after aspiration changes (DVIs are unaffected).
    pub fn refresh_objectives(&self, sol: &mut Solution, scratch: &mut EvalScratch) {
        sol.objectives = score_objectives(
            &self.protocol,
            &self.states,
            self.mode,
            &self.plan.aim_measurement,
            &sol.dvi_values,
            &sol.dwell_times,
            &self.neighbor,
            &self.config.constraint,
            scratch,
        );
        sol.cr_feasible = objective::check_catheter_contribution(
            &sol.dwell_times,
            &self.needle_dwells,
            &self.config.constraint,
        );
    }

    /// Objectives for an arbitrary DVI/time pair outside a cached solution,
    /// as used when re-scoring archive entries after an aspiration change.
    pub fn objectives_for(
        &self,
        dvi_values: &[f64],
        times: &[f64],
        scratch: &mut EvalScratch,
    ) -> ObjectivePair {
        score_objectives(
            &self.protocol,
            &self.states,
            self.mode,
            &self.plan.aim_measurement,
            dvi_values,
            times,
            &self.neighbor,
            &self.config.constraint,
            scratch,
        )
    }

    /// CR feasibility of a candidate time vector.
    pub fn cr_feasible(&self, times: &[f64]) -> bool {
        objective::check_catheter_contribution(
            times,
            &self.needle_dwells,
            &self.config.constraint,
        )
    }

    /// Margin of aim `i` given measured DVI values; `None` if eliminated.
    pub fn aim_delta(&self, i: usize, dvi_values: &[f64]) -> Option<f64> {
        let aspiration = self.states.aspiration(&self.protocol, i)?;
        let aim = &self.protocol.aims[i];
        Some(objective::delta(
            aim.dvi.direction,
            aspiration,
            dvi_values[self.plan.aim_measurement[i]],
        ))
    }

    /// True when every mandatory aim is satisfied (margin > 0).
    pub fn embrace_satisfied(&self, dvi_values: &[f64]) -> bool {
        embrace_satisfied(&self.protocol, &self.plan.aim_measurement, dvi_values)
    }

    /// Maximum relative deviation between the solution's cached state and a
    /// fresh full evaluation; drives the debug validation mode.
    pub fn full_recompute_deviation(
        &self,
        sol: &Solution,
        scratch: &mut EvalScratch,
    ) -> Result<f64, EvalError> {
        let fresh = self.evaluate(&sol.dwell_times, scratch)?;
        let mut max_dev = 0.0f64;
        let mut upd = |a: f64, b: f64| {
            let dev = (a - b).abs() / b.abs().max(1.0);
            if dev > max_dev {
                max_dev = dev;
            }
        };
        for (ca, cb) in sol.roi_dose.iter().zip(&fresh.roi_dose) {
            for (a, b) in ca.iter().zip(cb) {
                upd(*a, *b);
            }
        }
        for (a, b) in sol.ref_dose.iter().zip(&fresh.ref_dose) {
            upd(*a, *b);
        }
        for (a, b) in sol.dvi_values.iter().zip(&fresh.dvi_values) {
            upd(*a, *b);
        }
        upd(sol.objectives.lci, fresh.objectives.lci);
        upd(sol.objectives.lsi, fresh.objectives.lsi);
        Ok(max_dev)
    }
}

/// True when every mandatory aim's margin is strictly positive.
pub fn embrace_satisfied(
    protocol: &ProtocolConfig,
    aim_measurement: &[usize],
    dvi_values: &[f64],
) -> bool {
    protocol.aims.iter().enumerate().all(|(i, a)| {
        if a.tier != AimTier::Embrace {
            return true;
        }
        let value = dvi_values[aim_measurement[i]];
        objective::delta(a.dvi.direction, a.aspiration_strict, value) > 0.0
    })
}

/// Measurement slugs and the aim-to-measurement index map for a protocol on
/// a case, without building dose tables. The layout is fidelity independent;
/// `n_dc` only participates in validation.
pub fn measurement_layout(
    case: &PatientCase,
    protocol: &ProtocolConfig,
    n_dc: usize,
) -> Result<(Vec<Measurement>, Vec<usize>), EvalError> {
    protocol.validate()?;
    protocol.validate_against_case(case)?;
    let plan = resolve_measurements(case, protocol, n_dc)?;
    Ok((plan.measurements, plan.aim_measurement))
}

/// Re-scored plan after a full reevaluation at a new fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct ReevaluatedPlan {
    pub dvi_values: Vec<f64>,
    pub objectives: ObjectivePair,
}

/// Fully reevaluates a list of plans at the given fidelity without holding
/// all dose-rate matrices at once: matrices are built and dropped one ROI at
/// a time, so the peak footprint is a single ROI table.
pub fn reevaluate_plans(
    case: &PatientCase,
    protocol: &ProtocolConfig,
    mode: ObjectiveMode,
    states: &AimStates,
    plans: &[Vec<f64>],
    config: &EvaluatorConfig,
) -> Result<Vec<ReevaluatedPlan>, EvalError> {
    protocol.validate()?;
    protocol.validate_against_case(case)?;
    let plan = resolve_measurements(case, protocol, config.n_dc)?;
    let n_dwells = case.n_dwells();
    for t in plans {
        if t.len() != n_dwells {
            return Err(EvalError::Dose(DoseError::LengthMismatch {
                expected: n_dwells,
                got: t.len(),
            }));
        }
    }
    let dwell_positions: Vec<Vec3> = case.dwell_positions.iter().map(|d| d.position).collect();
    let mut scratch = EvalScratch::default();
    let mut dvis = vec![vec![0.0f64; plan.measurements.len()]; plans.len()];

    for (ri, roi) in plan.rois.iter().enumerate() {
        let dc = patient::sample_dc_points(case, *roi, config.n_dc, config.dc_seed)?;
        let table = DoseRateTable::build(
            &dc.points,
            &dwell_positions,
            &config.kernel,
            case.prescribed_dose_gy,
        );
        let mut dose = vec![0.0f64; config.n_dc];
        for (pi, times) in plans.iter().enumerate() {
            table.compute_dose_into(times, &mut dose);
            for (mi, m) in plan.measurements.iter().enumerate() {
                match &m.kind {
                    MeasKind::VDose { roi, threshold_pct } if *roi == ri => {
                        dvis[pi][mi] = v_dose_value(&dose, *threshold_pct);
                    }
                    MeasKind::DVolume { roi, select_idx } if *roi == ri => {
                        // Archive neighbours have similar DVIs; the previous
                        // plan's value is a serviceable selection hint.
                        let hint = if pi > 0 { dvis[pi - 1][mi] } else { 0.0 };
                        dvis[pi][mi] = d_volume_value(&dose, *select_idx, hint, &mut scratch);
                    }
                    _ => {}
                }
            }
        }
    }
    if !plan.ref_names.is_empty() {
        let pts: Vec<Vec3> = plan
            .ref_names
            .iter()
            .map(|p| case.reference_point(p).expect("validated").position)
            .collect();
        let table = DoseRateTable::build(
            &pts,
            &dwell_positions,
            &config.kernel,
            case.prescribed_dose_gy,
        );
        let mut dose = vec![0.0f64; pts.len()];
        for (pi, times) in plans.iter().enumerate() {
            table.compute_dose_into(times, &mut dose);
            for (mi, m) in plan.measurements.iter().enumerate() {
                if let MeasKind::Point { point } = &m.kind {
                    dvis[pi][mi] = dose[*point];
                }
            }
        }
    }

    let neighbor = objective::build_neighbor_map(case);
    Ok(plans
        .iter()
        .zip(dvis)
        .map(|(times, dvi_values)| {
            let objectives = score_objectives(
                protocol,
                states,
                mode,
                &plan.aim_measurement,
                &dvi_values,
                times,
                &neighbor,
                &config.constraint,
                &mut scratch,
            );
            ReevaluatedPlan {
                dvi_values,
                objectives,
            }
        })
        .collect())
}

/// Aggregates per-aim deltas into the DTMR-adjusted objective pair.
#[allow(clippy::too_many_arguments)]
fn score_objectives(
    protocol: &ProtocolConfig,
    states: &AimStates,
    mode: ObjectiveMode,
    aim_measurement: &[usize],
    dvi_values: &[f64],
    times: &[f64],
    neighbor: &[Option<usize>],
    cons: &ConstraintConfig,
    scratch: &mut EvalScratch,
) -> ObjectivePair {
    scratch.coverage.clear();
    scratch.sparing.clear();
    for (i, aim) in protocol.aims.iter().enumerate() {
        if mode == ObjectiveMode::EmbraceOnly && aim.tier == AimTier::Added {
            continue;
        }
        let Some(aspiration) = states.aspiration(protocol, i) else {
            continue;
        };
        let value = dvi_values[aim_measurement[i]];
        let d = objective::delta(aim.dvi.direction, aspiration, value);
        match aim.group {
            AimGroup::Coverage => scratch.coverage.push(d),
            AimGroup::Sparing => scratch.sparing.push(d),
        }
    }
    let mut pair = ObjectivePair {
        lci: objective::weighted_group_objective(&scratch.coverage, &mut scratch.order),
        lsi: objective::weighted_group_objective(&scratch.sparing, &mut scratch.order),
        constraint: 0.0,
    };
    let cons_violation = objective::dtmr_violation(times, neighbor, cons.dtmr_epsilon_s);
    objective::apply_soft_constraint(&mut pair, cons_violation, cons.dtmr_alpha);
    pair
}

/// Fills `out` with measurement values from the given dose state. Entries
/// must hold the previous values on entry; they seed the selection hints.
fn compute_dvis(
    measurements: &[Measurement],
    roi_dose: &[Vec<f64>],
    ref_dose: &[f64],
    out: &mut [f64],
    scratch: &mut EvalScratch,
) {
    for (out, m) in out.iter_mut().zip(measurements) {
        *out = match &m.kind {
            MeasKind::VDose { roi, threshold_pct } => {
                v_dose_value(&roi_dose[*roi], *threshold_pct)
            }
            MeasKind::DVolume { roi, select_idx } => {
                d_volume_value(&roi_dose[*roi], *select_idx, *out, scratch)
            }
            MeasKind::Point { point } => ref_dose[*point],
        };
    }
}

fn v_dose_value(doses: &[f64], threshold_pct: f64) -> f64 {
    // Branchless count; the predicate maps to a vector compare.
    let count: usize = doses.iter().map(|&x| (x >= threshold_pct) as usize).sum();
    100.0 * count as f64 / doses.len() as f64
}

/// Exact ascending order statistic at `select_idx`. `hint` is the previous
/// value of the same measurement: after an incremental dose update the new
/// statistic sits near it, so the selection can run on the short tail cut
/// off by a pivot a few percent past the hint. Everything below the pivot
/// precedes everything at or above it, so the tail statistic equals the
/// global one whenever the index lands in the tail; a stale hint only costs
/// a full-array fallback, never exactness.
fn d_volume_value(doses: &[f64], select_idx: usize, hint: f64, scratch: &mut EvalScratch) -> f64 {
    let margin = 0.04 * hint.abs() + 1e-9;
    scratch.select.clear();
    let idx = if 2 * select_idx < doses.len() {
        // Bottom-tail statistic: keep everything below an inflated pivot.
        let pivot = hint + margin;
        scratch
            .select
            .extend(doses.iter().copied().filter(|&x| x < pivot));
        if select_idx < scratch.select.len() {
            select_idx
        } else {
            scratch.select.clear();
            scratch.select.extend_from_slice(doses);
            select_idx
        }
    } else {
        // Top-tail statistic: keep everything at or above a deflated pivot.
        let pivot = hint - margin;
        scratch
            .select
            .extend(doses.iter().copied().filter(|&x| x >= pivot));
        let c_less = doses.len() - scratch.select.len();
        if select_idx >= c_less {
            select_idx - c_less
        } else {
            scratch.select.clear();
            scratch.select.extend_from_slice(doses);
            select_idx
        }
    };
    let (_, v, _) = scratch
        .select
        .select_nth_unstable_by(idx, |a, b| a.total_cmp(b));
    *v
}

/// Ascending selection index for `D_v` at fidelity `n`.
fn select_index(fraction: f64, n: usize) -> Result<usize, DviError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(DviError::FractionOutOfRange { v: fraction });
    }
    let k = (crate::math::ceil(fraction * n as f64) as usize).clamp(1, n);
    Ok(n - k)
}

#[inline]
fn axpy(dose: &mut [f64], col: &[f64], a: f64) {
    for (d, m) in dose.iter_mut().zip(col.iter()) {
        *d += a * *m;
    }
}

/// Writes `dst = src + Σ aⱼ · column(j)` without touching `src`. The first
/// up-to-four columns ride along with the seeding pass; any rest continues
/// in place.
fn fused_axpy_into(dst: &mut [f64], src: &[f64], table: &DoseRateTable, deltas: &[(usize, f64)]) {
    let n = src.len();
    let dst = &mut dst[..n];
    let head = deltas.len().min(4);
    match head {
        0 => dst.copy_from_slice(src),
        1 => {
            let c0 = &table.column(deltas[0].0)[..n];
            let a0 = deltas[0].1;
            for i in 0..n {
                dst[i] = src[i] + a0 * c0[i];
            }
        }
        2 => {
            let c0 = &table.column(deltas[0].0)[..n];
            let c1 = &table.column(deltas[1].0)[..n];
            let (a0, a1) = (deltas[0].1, deltas[1].1);
            for i in 0..n {
                dst[i] = src[i] + a0 * c0[i] + a1 * c1[i];
            }
        }
        3 => {
            let c0 = &table.column(deltas[0].0)[..n];
            let c1 = &table.column(deltas[1].0)[..n];
            let c2 = &table.column(deltas[2].0)[..n];
            let (a0, a1, a2) = (deltas[0].1, deltas[1].1, deltas[2].1);
            for i in 0..n {
                dst[i] = src[i] + a0 * c0[i] + a1 * c1[i] + a2 * c2[i];
            }
        }
        _ => {
            let c0 = &table.column(deltas[0].0)[..n];
            let c1 = &table.column(deltas[1].0)[..n];
            let c2 = &table.column(deltas[2].0)[..n];
            let c3 = &table.column(deltas[3].0)[..n];
            let (a0, a1, a2, a3) = (deltas[0].1, deltas[1].1, deltas[2].1, deltas[3].1);
            for i in 0..n {
                dst[i] = src[i] + a0 * c0[i] + a1 * c1[i] + a2 * c2[i] + a3 * c3[i];
            }
        }
    }
    fused_axpy(dst, table, &deltas[head..]);
}

/// Adds `Σ aⱼ · column(j)` into `dose`, four columns per sweep so the dose
/// vector is read and written a quarter as often as with one axpy per column.
fn fused_axpy(dose: &mut [f64], table: &DoseRateTable, deltas: &[(usize, f64)]) {
    let n = dose.len();
    let mut quads = deltas.chunks_exact(4);
    for q in quads.by_ref() {
        let c0 = &table.column(q[0].0)[..n];
        let c1 = &table.column(q[1].0)[..n];
        let c2 = &table.column(q[2].0)[..n];
        let c3 = &table.column(q[3].0)[..n];
        let (a0, a1, a2, a3) = (q[0].1, q[1].1, q[2].1, q[3].1);
        for i in 0..n {
            dose[i] += a0 * c0[i] + a1 * c1[i] + a2 * c2[i] + a3 * c3[i];
        }
    }
    for &(j, a) in quads.remainder() {
        axpy(dose, table.column(j), a);
    }
}
