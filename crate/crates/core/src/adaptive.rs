//! Adaptive configuration of added planning aims.
//!
//! Interleaves low-fidelity optimization rounds with stepwise loosening of
//! violated added aims: after each round, the most balanced archive plan
//! decides which aspirations move one step toward their loose value (or are
//! eliminated once there). When a round passes without any adjustment, a
//! fresh high-fidelity run finishes the plan set, and the final archive is
//! reevaluated at the highest point count.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::evaluator::{
    reevaluate_plans, EvalError, Evaluator, EvaluatorConfig, ReevaluatedPlan,
};
use crate::moea::{
    ArchiveEntry, ElitistArchive, Optimizer, OptimizerConfig, OptimizerError, OptimizerSnapshot,
    Traces,
};
use crate::objective::{self, ObjectiveMode, ObjectivePair};
use crate::patient::PatientCase;
use crate::protocol::{AimSpec, AimState, AimStates, ProtocolConfig};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveRunConfig {
    /// Minimum adjustment steps from strict to loose for the lowest
    /// priority tier.
    pub min_steps: u32,
    /// Calculation points per ROI during adjustment rounds.
    pub n_dc_min: usize,
    /// Calculation points per ROI for the final run.
    pub n_dc_max: usize,
    /// Generations per adjustment round.
    pub g_min: usize,
    /// Generations of the final high-fidelity run.
    pub g_max: usize,
    /// Calculation points per ROI for the final reevaluation.
    pub n_dc_reeval: usize,
    /// Also stop the adjustment loop once the balanced-best plan satisfies
    /// every mandatory aim. Off by default.
    #[serde(default)]
    pub stop_on_embrace: bool,
}

impl Default for AdaptiveRunConfig {
    fn default() -> Self {
        AdaptiveRunConfig {
            min_steps: 4,
            n_dc_min: 2500,
            n_dc_max: 20_000,
            g_min: 350,
            g_max: 490,
            n_dc_reeval: 50_000,
            stop_on_embrace: false,
        }
    }
}

impl AdaptiveRunConfig {
    pub fn validate(&self) -> Result<(), AdaptiveError> {
        let fail = |reason: &str| {
            Err(AdaptiveError::InvalidConfig {
                reason: reason.into(),
            })
        };
        if self.min_steps == 0 {
            return fail("min_steps must be positive");
        }
        if self.n_dc_min == 0 || self.g_min == 0 || self.g_max == 0 {
            return fail("point counts and generation counts must be positive");
        }
        if !(self.n_dc_min <= self.n_dc_max && self.n_dc_max <= self.n_dc_reeval) {
            return fail("fidelities must satisfy n_dc_min <= n_dc_max <= n_dc_reeval");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdaptiveError {
    InvalidConfig { reason: String },
    EmptyArchive,
    /// `adjust_aim` called outside its contract.
    AdjustContract { aim: String, reason: &'static str },
    Optimizer(OptimizerError),
    Eval(EvalError),
}

impl core::fmt::Display for AdaptiveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AdaptiveError::InvalidConfig { reason } => {
                write!(f, "invalid adaptive config: {reason}")
            }
            AdaptiveError::EmptyArchive => write!(f, "archive is empty"),
            AdaptiveError::AdjustContract { aim, reason } => {
                write!(f, "adjust_aim contract violated for {aim}: {reason}")
            }
            AdaptiveError::Optimizer(e) => write!(f, "{e}"),
            AdaptiveError::Eval(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AdaptiveError {}

impl From<OptimizerError> for AdaptiveError {
    fn from(e: OptimizerError) -> Self {
        AdaptiveError::Optimizer(e)
    }
}
impl From<EvalError> for AdaptiveError {
    fn from(e: EvalError) -> Self {
        AdaptiveError::Eval(e)
    }
}

/// The archive member maximizing `min(lci, lsi)`; ties prefer the larger
/// `lci + lsi`, then earlier insertion.
pub fn select_best_balanced(archive: &ElitistArchive) -> Result<&ArchiveEntry, AdaptiveError> {
    let mut best: Option<&ArchiveEntry> = None;
    for m in archive.members() {
        let better = match best {
            None => true,
            Some(b) => {
                let (mv, bv) = (balanced_value(m), balanced_value(b));
                let (ms, bs) = (
                    m.objectives.lci + m.objectives.lsi,
                    b.objectives.lci + b.objectives.lsi,
                );
                mv > bv || (mv == bv && (ms > bs || (ms == bs && m.insertion < b.insertion)))
            }
        };
        if better {
            best = Some(m);
        }
    }
    best.ok_or(AdaptiveError::EmptyArchive)
}

fn balanced_value(m: &ArchiveEntry) -> f64 {
    m.objectives.lci.min(m.objectives.lsi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdjustOutcome {
    Adjusted { old: f64, new: f64 },
    Eliminated { old: f64 },
}

/// Relative tolerance for snapping a stepped aspiration onto the loose value
/// so the elimination equality test is robust to accumulated rounding.
const LOOSE_SNAP_TOL: f64 = 1e-9;

/// One adjustment step for a violated added aim: move the aspiration by
/// `(loose - strict) / (min_steps * (p_low - p + 1))` toward the loose value
/// (clamping there), or eliminate the aim if it already sits at loose.
pub fn adjust_aim(
    spec: &AimSpec,
    state: &mut AimState,
    p_low: u8,
    min_steps: u32,
) -> Result<AdjustOutcome, AdaptiveError> {
    if !spec.adjustable {
        return Err(AdaptiveError::AdjustContract {
            aim: spec.id(),
            reason: "aim is not adjustable",
        });
    }
    if state.eliminated {
        return Err(AdaptiveError::AdjustContract {
            aim: spec.id(),
            reason: "aim is already eliminated",
        });
    }
    if p_low < spec.priority {
        return Err(AdaptiveError::AdjustContract {
            aim: spec.id(),
            reason: "p_low below this aim's priority",
        });
    }
    let old = state.current_aspiration;
    if old == spec.aspiration_loose {
        state.eliminated = true;
        return Ok(AdjustOutcome::Eliminated { old });
    }
    let span = spec.aspiration_loose - spec.aspiration_strict;
    let step = span / (min_steps as f64 * (p_low - spec.priority + 1) as f64);
    let mut new = old + step;
    // Clamp toward loose, orientation aware.
    if span >= 0.0 {
        new = new.min(spec.aspiration_loose);
    } else {
        new = new.max(spec.aspiration_loose);
    }
    if (new - spec.aspiration_loose).abs() <= LOOSE_SNAP_TOL * spec.aspiration_loose.abs().max(1.0)
    {
        new = spec.aspiration_loose;
    }
    state.current_aspiration = new;
    state.steps_taken += 1;
    Ok(AdjustOutcome::Adjusted { old, new })
}

/// One audit record per aspiration adjustment or elimination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub round: usize,
    pub aim_id: String,
    pub old_aspiration: f64,
    /// `None` records an elimination.
    pub new_aspiration: Option<f64>,
    pub p_low: u8,
    pub s_star: ObjectivePair,
}

impl AuditRecord {
    /// Canonical line format; run logs concatenate these verbatim.
    pub fn to_line(&self) -> String {
        let new = match self.new_aspiration {
            Some(v) => format!("{v}"),
            None => "ELIMINATED".into(),
        };
        format!(
            "round {}: {} {} -> {} (p_low {}, s* lci {} lsi {})",
            self.round,
            self.aim_id,
            self.old_aspiration,
            new,
            self.p_low,
            self.s_star.lci,
            self.s_star.lsi
        )
    }
}

/// Propagates changed aspirations: evaluator states, population objectives,
/// archive re-scoring and pruning, then population re-insertion.
pub fn recompute_after_adjustment(optimizer: &mut Optimizer, states: &AimStates) {
    optimizer.evaluator_mut().set_states(states.clone());
    optimizer.refresh_population_objectives();
    optimizer.rescore_archive();
    optimizer.reoffer_population();
}

/// Everything a finished adaptive run reports.
#[derive(Debug, Clone)]
pub struct AdaptiveOutcome {
    /// Archive of the final high-fidelity run (values at `n_dc_max`).
    pub archive: ElitistArchive,
    /// Per-member reevaluation at `n_dc_reeval`, parallel to
    /// `archive.members()`.
    pub reevaluated: Vec<ReevaluatedPlan>,
    pub aim_states: AimStates,
    pub audit: Vec<AuditRecord>,
    /// Low-fidelity rounds executed (including the final round without
    /// adjustments).
    pub rounds: usize,
    /// Concatenated traces of the low-fidelity rounds.
    pub low_traces: Traces,
    /// Traces of the final high-fidelity run.
    pub final_traces: Traces,
    /// Resumable end state of the final high-fidelity run.
    pub snapshot: OptimizerSnapshot,
}

/// Runs the full adaptive loop on one case.
///
/// Round loop: `g_min` generations at `n_dc_min` (the optimizer state is
/// resumed between rounds), pick the balanced-best plan, loosen every
/// violated, non-eliminated added aim one step, propagate; stop once a round
/// adjusts nothing. Then a fresh run of `g_max` generations at `n_dc_max`
/// under the final aim states, and a reevaluation of its archive at
/// `n_dc_reeval`. DC points are re-sampled with fresh seeds at each fidelity
/// switch.
pub fn run_adaptive(
    case: &PatientCase,
    protocol: &ProtocolConfig,
    opt_config: &OptimizerConfig,
    cfg: &AdaptiveRunConfig,
    master_seed: u64,
) -> Result<AdaptiveOutcome, AdaptiveError> {
    cfg.validate()?;
    let eval_cfg = |n_dc: usize, label: &str| EvaluatorConfig {
        kernel: Default::default(),
        constraint: Default::default(),
        n_dc,
        dc_seed: seed::derive(master_seed, &[seed::tag("dc"), seed::tag(label)]),
    };

    let mut states = AimStates::initial(protocol);
    let mut audit: Vec<AuditRecord> = Vec::new();

    let low_eval = Evaluator::new(
        case,
        protocol,
        ObjectiveMode::Full,
        eval_cfg(cfg.n_dc_min, "low"),
    )?;
    let low_opt_config = OptimizerConfig {
        seed: seed::derive(master_seed, &[seed::tag("opt"), seed::tag("low")]),
        ..*opt_config
    };
    let mut opt = Optimizer::new(case, low_eval, low_opt_config)?;

    let mut rounds = 0usize;
    loop {
        rounds += 1;
        opt.run_generations(cfg.g_min)?;

        let (s_dvis, s_obj) = {
            let s = select_best_balanced(opt.archive())?;
            (s.dvi_values.clone(), s.objectives)
        };
        if cfg.stop_on_embrace && opt.evaluator().embrace_satisfied(&s_dvis) {
            break;
        }
        let Some(p_low) = states.lowest_active_priority(protocol) else {
            break;
        };

        let mut adjusted_any = false;
        for (i, aim) in protocol.aims.iter().enumerate() {
            if !aim.adjustable {
                continue;
            }
            let mi = opt.evaluator().aim_measurement(i);
            let Some(st) = states.0[i].as_mut() else {
                continue;
            };
            if st.eliminated {
                continue;
            }
            let delta = objective::delta(aim.dvi.direction, st.current_aspiration, s_dvis[mi]);
            if delta >= 0.0 {
                continue;
            }
            let outcome = adjust_aim(aim, st, p_low, cfg.min_steps)?;
            let (old, new) = match outcome {
                AdjustOutcome::Adjusted { old, new } => (old, Some(new)),
                AdjustOutcome::Eliminated { old } => (old, None),
            };
            audit.push(AuditRecord {
                round: rounds,
                aim_id: aim.id(),
                old_aspiration: old,
                new_aspiration: new,
                p_low,
                s_star: s_obj,
            });
            adjusted_any = true;
        }
        if !adjusted_any {
            break;
        }
        recompute_after_adjustment(&mut opt, &states);
    }
    let low_traces = opt.traces().clone();
    drop(opt);

    let mut high_eval = Evaluator::new(
        case,
        protocol,
        ObjectiveMode::Full,
        eval_cfg(cfg.n_dc_max, "high"),
    )?;
    high_eval.set_states(states.clone());
    let high_opt_config = OptimizerConfig {
        seed: seed::derive(master_seed, &[seed::tag("opt"), seed::tag("high")]),
        ..*opt_config
    };
    let mut final_opt = Optimizer::new(case, high_eval, high_opt_config)?;
    final_opt.run_generations(cfg.g_max)?;
    let final_traces = final_opt.traces().clone();
    let archive = final_opt.archive().clone();
    let snapshot = final_opt.snapshot();
    drop(final_opt);

    let times: Vec<Vec<f64>> = archive
        .members()
        .iter()
        .map(|m| m.dwell_times.clone())
        .collect();
    let reevaluated = reevaluate_plans(
        case,
        protocol,
        ObjectiveMode::Full,
        &states,
        &times,
        &eval_cfg(cfg.n_dc_reeval, "reeval"),
    )?;

    Ok(AdaptiveOutcome {
        archive,
        reevaluated,
        aim_states: states,
        audit,
        rounds,
        low_traces,
        final_traces,
        snapshot,
    })
}

/// Upper bound on adjustment rounds implied by the stepping scheme: each
/// round advances at least one aim, and aim `p` can take at most
/// `min_steps * (p_low_max - p + 1)` steps plus one eliminating call.
pub fn max_adjustment_rounds(protocol: &ProtocolConfig, min_steps: u32) -> usize {
    let p_low_max = protocol
        .aims
        .iter()
        .filter(|a| a.adjustable)
        .map(|a| a.priority)
        .max();
    let Some(p_low_max) = p_low_max else {
        return 0;
    };
    protocol
        .aims
        .iter()
        .filter(|a| a.adjustable)
        .map(|a| min_steps as usize * (p_low_max - a.priority + 1) as usize + 1)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvi::Direction;
    use crate::protocol::default_protocol;

    fn make_archive(pairs: &[(f64, f64)]) -> ElitistArchive {
        let mut a = ElitistArchive::new(100);
        for &(lci, lsi) in pairs {
            a.insert(
                &[0.0],
                &[0.0],
                ObjectivePair {
                    lci,
                    lsi,
                    constraint: 0.0,
                },
            );
        }
        a
    }

    #[test]
    fn best_balanced_worked_example() {
        let a = make_archive(&[(0.5, -1.0), (-0.2, 0.3), (0.1, 0.05)]);
        let s = select_best_balanced(&a).unwrap();
        assert_eq!((s.objectives.lci, s.objectives.lsi), (0.1, 0.05));
    }

    #[test]
    fn best_balanced_single_and_empty() {
        let a = make_archive(&[(1.0, -2.0)]);
        assert_eq!(select_best_balanced(&a).unwrap().objectives.lci, 1.0);
        let empty = ElitistArchive::new(10);
        assert!(matches!(
            select_best_balanced(&empty),
            Err(AdaptiveError::EmptyArchive)
        ));
    }

    #[test]
    fn best_balanced_tie_breaks_on_sum_then_insertion() {
        // Equal mins (0.0), sums 0.6 vs 0.7: larger sum wins.
        let a = make_archive(&[(0.6, 0.0), (0.0, 0.7)]);
        let s = select_best_balanced(&a).unwrap();
        assert_eq!((s.objectives.lci, s.objectives.lsi), (0.0, 0.7));
        // Equal mins and sums: earlier insertion wins.
        let b = make_archive(&[(1.0, 0.0), (0.0, 1.0)]);
        let s = select_best_balanced(&b).unwrap();
        assert_eq!((s.objectives.lci, s.objectives.lsi), (1.0, 0.0));
    }

    #[test]
    fn best_balanced_matches_scan_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let pairs: Vec<(f64, f64)> = (0..1000)
            .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            .collect();
        let a = make_archive(&pairs);
        let s = select_best_balanced(&a).unwrap();
        let oracle = a
            .members()
            .iter()
            .map(|m| m.objectives.lci.min(m.objectives.lsi))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(s.objectives.lci.min(s.objectives.lsi), oracle);
    }

    fn added_aim(id_slug: &str) -> (AimSpec, usize) {
        let protocol = default_protocol();
        let i = protocol
            .aims
            .iter()
            .position(|a| a.id().starts_with(id_slug))
            .unwrap();
        (protocol.aims[i].clone(), i)
    }

    #[test]
    fn v100_mid_nt_trajectory() {
        // Strict 0.1, loose 1.5, p = p_low = 4: four steps of 0.35.
        let (aim, _) = added_aim("v100_mid_nt");
        let mut st = AimState {
            current_aspiration: aim.aspiration_strict,
            eliminated: false,
            steps_taken: 0,
        };
        let expect = [0.45, 0.8, 1.15, 1.5];
        for e in expect {
            match adjust_aim(&aim, &mut st, 4, 4).unwrap() {
                AdjustOutcome::Adjusted { new, .. } => {
                    assert!((new - e).abs() < 1e-12, "{new} vs {e}")
                }
                other => panic!("unexpected {other:?}"),
            }
        }
        assert_eq!(st.current_aspiration, 1.5);
        assert!(matches!(
            adjust_aim(&aim, &mut st, 4, 4).unwrap(),
            AdjustOutcome::Eliminated { .. }
        ));
        assert!(st.eliminated);
    }

    #[test]
    fn v100_ctv_hr_negative_step() {
        // Maximize aim: strict 99.9, loose 90, p=2, p_low=4:
        // step = (90 - 99.9) / (4 * 3) = -0.825.
        let (aim, _) = added_aim("v100_ctv_hr");
        assert_eq!(aim.dvi.direction, Direction::Maximize);
        let mut st = AimState {
            current_aspiration: aim.aspiration_strict,
            eliminated: false,
            steps_taken: 0,
        };
        match adjust_aim(&aim, &mut st, 4, 4).unwrap() {
            AdjustOutcome::Adjusted { old, new } => {
                assert_eq!(old, 99.9);
                assert!((new - 99.075).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn aspiration_stays_in_interval_until_elimination() {
        let (aim, _) = added_aim("v50_ctv_ir");
        let lo = aim.aspiration_strict.min(aim.aspiration_loose);
        let hi = aim.aspiration_strict.max(aim.aspiration_loose);
        let mut st = AimState {
            current_aspiration: aim.aspiration_strict,
            eliminated: false,
            steps_taken: 0,
        };
        // p_low = 4 with p = 3 halves the step; drive until eliminated.
        for _ in 0..200 {
            match adjust_aim(&aim, &mut st, 4, 4).unwrap() {
                AdjustOutcome::Adjusted { new, .. } => {
                    assert!((lo..=hi).contains(&new));
                }
                AdjustOutcome::Eliminated { .. } => break,
            }
        }
        assert!(st.eliminated);
        assert!(st.steps_taken as usize <= 4 * 2 + 1);
    }

    #[test]
    fn contract_errors() {
        let protocol = default_protocol();
        let embrace = protocol.aims.iter().find(|a| !a.adjustable).unwrap();
        let mut st = AimState {
            current_aspiration: embrace.aspiration_strict,
            eliminated: false,
            steps_taken: 0,
        };
        assert!(matches!(
            adjust_aim(embrace, &mut st, 4, 4),
            Err(AdaptiveError::AdjustContract { .. })
        ));

        let (aim, _) = added_aim("v100_mid_nt");
        let mut st = AimState {
            current_aspiration: aim.aspiration_loose,
            eliminated: true,
            steps_taken: 0,
        };
        assert!(matches!(
            adjust_aim(&aim, &mut st, 4, 4),
            Err(AdaptiveError::AdjustContract { .. })
        ));
    }

    #[test]
    fn audit_line_format_stable() {
        let rec = AuditRecord {
            round: 3,
            aim_id: "v100_mid_nt_lt".into(),
            old_aspiration: 0.45,
            new_aspiration: Some(0.8),
            p_low: 4,
            s_star: ObjectivePair {
                lci: -0.5,
                lsi: 0.25,
                constraint: 0.0,
            },
        };
        assert_eq!(
            rec.to_line(),
            "round 3: v100_mid_nt_lt 0.45 -> 0.8 (p_low 4, s* lci -0.5 lsi 0.25)"
        );
        let elim = AuditRecord {
            new_aspiration: None,
            ..rec
        };
        assert_eq!(
            elim.to_line(),
            "round 3: v100_mid_nt_lt 0.45 -> ELIMINATED (p_low 4, s* lci -0.5 lsi 0.25)"
        );
    }

    #[test]
    fn round_bound_formula() {
        let protocol = default_protocol();
        // Added aims: p2, p3, p3, p4, p4 with p_low_max = 4.
        // Bound: (4*3+1) + 2*(4*2+1) + 2*(4*1+1) = 13 + 18 + 10 = 41.
        assert_eq!(max_adjustment_rounds(&protocol, 4), 41);
    }
}
