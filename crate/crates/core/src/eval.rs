//! Run-level harness: single runs in both modes, front reevaluation with
//! fallback metrics, and the aggregated E-vs-F comparison.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::adaptive::{self, AdaptiveError, AdaptiveRunConfig, AuditRecord};
use crate::evaluator::{
    self, embrace_satisfied, EvalError, Evaluator, EvaluatorConfig, ReevaluatedPlan,
};
use crate::moea::{ElitistArchive, Optimizer, OptimizerConfig, OptimizerSnapshot, Traces};
use crate::objective::ObjectiveMode;
use crate::patient::PatientCase;
use crate::protocol::{AimStates, AimTier, ProtocolConfig};
use crate::seed;

/// Which optimization pipeline a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Mandatory aims only, one fresh run at the high fidelity.
    EmbraceOnly,
    /// Full protocol with adaptive aspiration configuration.
    FullAdaptive,
}

/// Everything one finished run reports, regardless of mode.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub mode: RunMode,
    pub master_seed: u64,
    /// Final archive, scored at the optimization fidelity.
    pub archive: ElitistArchive,
    /// Per-member reevaluation at the reevaluation fidelity, parallel to
    /// `archive.members()`.
    pub reevaluated: Vec<ReevaluatedPlan>,
    pub aim_states: AimStates,
    /// Empty in embrace-only mode.
    pub audit: Vec<AuditRecord>,
    /// Adjustment rounds run; 0 in embrace-only mode.
    pub rounds: usize,
    /// Low-fidelity adjustment-phase traces; empty in embrace-only mode.
    pub low_traces: Traces,
    /// Traces of the final (or only) run.
    pub final_traces: Traces,
    /// Resumable end state of the final (or only) run.
    pub snapshot: OptimizerSnapshot,
    /// Wall-clock duration; 0 when no clock is available.
    pub runtime_seconds: f64,
}

/// Per-run summary row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: RunMode,
    pub master_seed: u64,
    pub archive_len: usize,
    /// At least one reevaluated plan satisfies every mandatory aim.
    pub embrace_all_satisfied: bool,
    pub n_plans_satisfying_embrace: usize,
    /// One row per satisfying plan: the DVI value of each adjustable aim,
    /// in protocol order.
    pub satisfying_dvi_values: Vec<Vec<f64>>,
    pub runtime_seconds: f64,
}

fn now_seconds() -> f64 {
    #[cfg(feature = "std")]
    {
        use std::time::{SystemTime, UNIX_EPOCH};
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0)
    }
    #[cfg(not(feature = "std"))]
    {
        0.0
    }
}

/// One run in the requested mode, reevaluated at the reevaluation fidelity.
///
/// Embrace-only mode mirrors the adaptive pipeline with zero adjustment
/// rounds: a fresh run of `g_max` generations at `n_dc_max` under the
/// mandatory objectives, using the same derived seeds as the adaptive final
/// run, so mode comparisons share structure.
pub fn run_mode(
    mode: RunMode,
    case: &PatientCase,
    protocol: &ProtocolConfig,
    opt_config: &OptimizerConfig,
    cfg: &AdaptiveRunConfig,
    master_seed: u64,
) -> Result<RunOutcome, AdaptiveError> {
    let start = now_seconds();
    match mode {
        RunMode::FullAdaptive => {
            let out = adaptive::run_adaptive(case, protocol, opt_config, cfg, master_seed)?;
            Ok(RunOutcome {
                mode,
                master_seed,
                archive: out.archive,
                reevaluated: out.reevaluated,
                aim_states: out.aim_states,
                audit: out.audit,
                rounds: out.rounds,
                low_traces: out.low_traces,
                final_traces: out.final_traces,
                snapshot: out.snapshot,
                runtime_seconds: now_seconds() - start,
            })
        }
        RunMode::EmbraceOnly => {
            cfg.validate()?;
            let states = AimStates::initial(protocol);
            let eval = Evaluator::new(
                case,
                protocol,
                ObjectiveMode::EmbraceOnly,
                EvaluatorConfig {
                    kernel: Default::default(),
                    constraint: Default::default(),
                    n_dc: cfg.n_dc_max,
                    dc_seed: seed::derive(master_seed, &[seed::tag("dc"), seed::tag("high")]),
                },
            )?;
            let opt_config = OptimizerConfig {
                seed: seed::derive(master_seed, &[seed::tag("opt"), seed::tag("high")]),
                ..*opt_config
            };
            let mut opt = Optimizer::new(case, eval, opt_config)?;
            opt.run_generations(cfg.g_max)?;
            let final_traces = opt.traces().clone();
            let archive = opt.archive().clone();
            let snapshot = opt.snapshot();
            drop(opt);

            let times: Vec<Vec<f64>> = archive
                .members()
                .iter()
                .map(|m| m.dwell_times.clone())
                .collect();
            let reevaluated = evaluator::reevaluate_plans(
                case,
                protocol,
                ObjectiveMode::EmbraceOnly,
                &states,
                &times,
                &EvaluatorConfig {
                    kernel: Default::default(),
                    constraint: Default::default(),
                    n_dc: cfg.n_dc_reeval,
                    dc_seed: seed::derive(master_seed, &[seed::tag("dc"), seed::tag("reeval")]),
                },
            )?;
            Ok(RunOutcome {
                mode,
                master_seed,
                archive,
                reevaluated,
                aim_states: states,
                audit: Vec::new(),
                rounds: 0,
                low_traces: Traces::default(),
                final_traces,
                snapshot,
                runtime_seconds: now_seconds() - start,
            })
        }
    }
}

/// Condenses a run into its report row: satisfaction is judged on the
/// reevaluated DVI values, and the adjustable-aim DVIs of every satisfying
/// plan are extracted in protocol order.
pub fn summarize_run(
    outcome: &RunOutcome,
    case: &PatientCase,
    protocol: &ProtocolConfig,
) -> Result<RunReport, EvalError> {
    let (_, aim_measurement) = evaluator::measurement_layout(case, protocol, 1)?;
    let adjustable: Vec<usize> = protocol
        .aims
        .iter()
        .enumerate()
        .filter(|(_, a)| a.adjustable)
        .map(|(i, _)| aim_measurement[i])
        .collect();
    let mut rows = Vec::new();
    for plan in &outcome.reevaluated {
        if embrace_satisfied(protocol, &aim_measurement, &plan.dvi_values) {
            rows.push(adjustable.iter().map(|&mi| plan.dvi_values[mi]).collect());
        }
    }
    Ok(RunReport {
        mode: outcome.mode,
        master_seed: outcome.master_seed,
        archive_len: outcome.archive.len(),
        embrace_all_satisfied: !rows.is_empty(),
        n_plans_satisfying_embrace: rows.len(),
        satisfying_dvi_values: rows,
        runtime_seconds: outcome.runtime_seconds,
    })
}

/// Per-member objective drop after reevaluation: previous minus refreshed
/// LCI and LSI. Positive values mean the plan looked better at the lower
/// fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fallback {
    pub lci: f64,
    pub lsi: f64,
}

/// Reevaluation of an archive front at a chosen fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontReevaluation {
    pub plans: Vec<ReevaluatedPlan>,
    pub fallback: Vec<Fallback>,
}

/// Reevaluates every archive member on freshly sampled calculation points
/// and reports the per-member objective fallback.
pub fn reevaluate_front(
    archive: &ElitistArchive,
    case: &PatientCase,
    protocol: &ProtocolConfig,
    mode: ObjectiveMode,
    states: &AimStates,
    n_dc: usize,
    dc_seed: u64,
) -> Result<FrontReevaluation, EvalError> {
    let times: Vec<Vec<f64>> = archive
        .members()
        .iter()
        .map(|m| m.dwell_times.clone())
        .collect();
    let plans = evaluator::reevaluate_plans(
        case,
        protocol,
        mode,
        states,
        &times,
        &EvaluatorConfig {
            kernel: Default::default(),
            constraint: Default::default(),
            n_dc,
            dc_seed,
        },
    )?;
    let fallback = archive
        .members()
        .iter()
        .zip(&plans)
        .map(|(old, new)| Fallback {
            lci: old.objectives.lci - new.objectives.lci,
            lsi: old.objectives.lsi - new.objectives.lsi,
        })
        .collect();
    Ok(FrontReevaluation { plans, fallback })
}

/// Pooled per-mode aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: RunMode,
    /// Percentage of runs with at least one satisfying plan.
    pub pct_embrace_satisfied: f64,
    /// Mean number of satisfying plans per run.
    pub mean_plans: f64,
    /// Per adjustable aim, in protocol order: (median, sample stdev) over
    /// the satisfying plans pooled across runs; `None` when no plan
    /// satisfied the mandatory aims in any run.
    pub dvi_summary: Vec<Option<(f64, f64)>>,
    pub reports: Vec<RunReport>,
}

/// E-vs-F comparison outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutcome {
    /// DVI slug of each adjustable aim, in protocol order (column labels).
    pub adjustable_slugs: Vec<String>,
    pub embrace_only: ModeSummary,
    pub full_adaptive: ModeSummary,
}

/// Shared optimizer and schedule configuration for a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub opt: OptimizerConfig,
    pub adaptive: AdaptiveRunConfig,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn sample_stdev(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    crate::math::sqrt(ss / (n - 1) as f64)
}

/// Aggregates per-run reports into a mode summary. Satisfying-plan DVI rows
/// are pooled across runs before the medians are taken, so runs with more
/// satisfying plans weigh proportionally more.
pub fn summarize_mode(mode: RunMode, reports: Vec<RunReport>, n_adjustable: usize) -> ModeSummary {
    let n_runs = reports.len() as f64;
    let satisfied_runs = reports.iter().filter(|r| r.embrace_all_satisfied).count();
    let total_plans: usize = reports.iter().map(|r| r.n_plans_satisfying_embrace).sum();
    let dvi_summary = (0..n_adjustable)
        .map(|col| {
            let mut vals: Vec<f64> = reports
                .iter()
                .flat_map(|r| r.satisfying_dvi_values.iter().map(move |row| row[col]))
                .collect();
            if vals.is_empty() {
                return None;
            }
            vals.sort_unstable_by(f64::total_cmp);
            Some((median(&vals), sample_stdev(&vals)))
        })
        .collect();
    ModeSummary {
        mode,
        pct_embrace_satisfied: 100.0 * satisfied_runs as f64 / n_runs,
        mean_plans: total_plans as f64 / n_runs,
        dvi_summary,
        reports,
    }
}

/// Runs both modes `n_runs` times (one master seed per run, shared between
/// modes so runs pair up) and aggregates satisfaction rates, plan counts,
/// and adjustable-DVI medians over the satisfying plans.
pub fn compare_approaches(
    case: &PatientCase,
    protocol: &ProtocolConfig,
    n_runs: usize,
    seeds: &[u64],
    config: &CompareConfig,
) -> Result<CompareOutcome, AdaptiveError> {
    if n_runs == 0 || seeds.len() != n_runs {
        return Err(AdaptiveError::InvalidConfig {
            reason: "need one master seed per run and n_runs >= 1".into(),
        });
    }
    let adjustable_slugs: Vec<String> = protocol
        .aims
        .iter()
        .filter(|a| a.adjustable)
        .map(|a| a.dvi.slug())
        .collect();

    let run_and_report = |mode: RunMode| -> Result<Vec<RunReport>, AdaptiveError> {
        seeds
            .iter()
            .map(|&s| {
                let outcome = run_mode(mode, case, protocol, &config.opt, &config.adaptive, s)?;
                Ok(summarize_run(&outcome, case, protocol)?)
            })
            .collect()
    };
    let e_reports = run_and_report(RunMode::EmbraceOnly)?;
    let f_reports = run_and_report(RunMode::FullAdaptive)?;

    let n = adjustable_slugs.len();
    Ok(CompareOutcome {
        adjustable_slugs,
        embrace_only: summarize_mode(RunMode::EmbraceOnly, e_reports, n),
        full_adaptive: summarize_mode(RunMode::FullAdaptive, f_reports, n),
    })
}

/// The mandatory-aim measurement indices are shared between modes, so a
/// plan's satisfaction status does not depend on the mode that produced it.
pub fn n_adjustable_aims(protocol: &ProtocolConfig) -> usize {
    protocol
        .aims
        .iter()
        .filter(|a| a.tier == AimTier::Added)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures;

    fn tiny_config() -> CompareConfig {
        CompareConfig {
            opt: OptimizerConfig {
                population_size: 16,
                n_clusters: 4,
                archive_capacity: 200,
                generations: 0,
                ..OptimizerConfig::default()
            },
            adaptive: AdaptiveRunConfig {
                min_steps: 2,
                n_dc_min: 220,
                n_dc_max: 300,
                g_min: 3,
                g_max: 4,
                n_dc_reeval: 500,
                stop_on_embrace: false,
            },
        }
    }

    #[test]
    fn embrace_only_run_has_no_audit_and_pairs_reevaluations() {
        let case = test_fixtures::easy_case();
        let protocol = ProtocolConfig::default_protocol();
        let cfg = tiny_config();
        let out = run_mode(
            RunMode::EmbraceOnly,
            case,
            &protocol,
            &cfg.opt,
            &cfg.adaptive,
            41,
        )
        .unwrap();
        assert!(out.audit.is_empty());
        assert_eq!(out.rounds, 0);
        assert!(out.low_traces.best_lci.is_empty());
        assert!(!out.archive.is_empty());
        assert_eq!(out.reevaluated.len(), out.archive.len());
        assert_eq!(out.final_traces.best_lci.len(), cfg.adaptive.g_max);
    }

    #[test]
    fn full_adaptive_final_round_adjusts_nothing() {
        let case = test_fixtures::easy_case();
        let protocol = ProtocolConfig::default_protocol();
        let cfg = tiny_config();
        let out = run_mode(
            RunMode::FullAdaptive,
            case,
            &protocol,
            &cfg.opt,
            &cfg.adaptive,
            42,
        )
        .unwrap();
        assert!(out.rounds >= 1);
        assert!(out.audit.iter().all(|r| r.round < out.rounds));
        assert!(out.rounds <= adaptive::max_adjustment_rounds(&protocol, 2) + 1);
        assert_eq!(out.reevaluated.len(), out.archive.len());
    }

    // Archive objectives come from incrementally updated dose caches, so
    // identity reevaluation agrees to the partial-update drift bound, not
    // bitwise.
    #[test]
    fn reevaluate_front_at_same_fidelity_has_zero_fallback() {
        let case = test_fixtures::easy_case();
        let protocol = ProtocolConfig::default_protocol();
        let cfg = tiny_config();
        let out = run_mode(
            RunMode::EmbraceOnly,
            case,
            &protocol,
            &cfg.opt,
            &cfg.adaptive,
            43,
        )
        .unwrap();
        let states = AimStates::initial(&protocol);
        let re = reevaluate_front(
            &out.archive,
            case,
            &protocol,
            ObjectiveMode::EmbraceOnly,
            &states,
            cfg.adaptive.n_dc_max,
            seed::derive(43, &[seed::tag("dc"), seed::tag("high")]),
        )
        .unwrap();
        assert!(re
            .fallback
            .iter()
            .all(|f| f.lci.abs() <= 1e-9 && f.lsi.abs() <= 1e-9));
    }

    #[test]
    fn summarize_counts_are_bounded_by_archive() {
        let case = test_fixtures::easy_case();
        let protocol = ProtocolConfig::default_protocol();
        let cfg = tiny_config();
        let out = run_mode(
            RunMode::FullAdaptive,
            case,
            &protocol,
            &cfg.opt,
            &cfg.adaptive,
            44,
        )
        .unwrap();
        let report = summarize_run(&out, case, &protocol).unwrap();
        assert!(report.n_plans_satisfying_embrace <= report.archive_len);
        assert_eq!(
            report.embrace_all_satisfied,
            report.n_plans_satisfying_embrace > 0
        );
        for row in &report.satisfying_dvi_values {
            assert_eq!(row.len(), n_adjustable_aims(&protocol));
        }
    }

    #[test]
    fn compare_is_deterministic_and_validates_seeds() {
        let case = test_fixtures::easy_case();
        let protocol = ProtocolConfig::default_protocol();
        let cfg = tiny_config();
        assert!(compare_approaches(case, &protocol, 2, &[1], &cfg).is_err());
        let mut a = compare_approaches(case, &protocol, 1, &[7], &cfg).unwrap();
        let mut b = compare_approaches(case, &protocol, 1, &[7], &cfg).unwrap();
        // Wall-clock runtime is the one intentionally nondeterministic field.
        for out in [&mut a, &mut b] {
            for summary in [&mut out.embrace_only, &mut out.full_adaptive] {
                for report in &mut summary.reports {
                    report.runtime_seconds = 0.0;
                }
            }
        }
        assert_eq!(a, b);
        assert_eq!(a.adjustable_slugs.len(), n_adjustable_aims(&protocol));
        assert_eq!(a.embrace_only.reports.len(), 1);
        assert_eq!(a.full_adaptive.reports.len(), 1);
    }

    #[test]
    fn median_and_stdev_helpers() {
        assert_eq!(median(&[1.0, 2.0, 4.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 4.0, 10.0]), 3.0);
        assert_eq!(sample_stdev(&[5.0]), 0.0);
        // Two points: stdev = |a - b| / sqrt(2).
        let s = sample_stdev(&[1.0, 3.0]);
        assert!((s - core::f64::consts::SQRT_2).abs() < 1e-12);
    }
}
