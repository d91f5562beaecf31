//! MO-RV-GOMEA engine: truncation selection by non-dominated sorting,
//! objective-space clustering, factorized normal models over an offline
//! linkage tree, and gene-pool optimal mixing with partial evaluations.

pub mod archive;
pub mod cluster;
pub mod linkage;
pub mod model;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use archive::{ArchiveEntry, ElitistArchive, DUPLICATE_TOL};
pub use cluster::{cluster_selection, ClusterAssignment, ClusterRole};
pub use linkage::build_linkage_tree;
pub use model::{estimate_distributions, ClusterModel};

use crate::evaluator::{EvalError, EvalScratch, Evaluator, Solution, TrialBuffers};
use crate::math;
use crate::patient::PatientCase;
use crate::seed;

const INIT_RETRY_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub population_size: usize,
    pub selection_fraction: f64,
    pub n_clusters: usize,
    pub archive_capacity: usize,
    /// Uniform initialization range for dwell times, seconds.
    pub init_range: [f64; 2],
    /// Upper clamp for sampled dwell times, seconds.
    pub t_max: f64,
    pub seed: u64,
    /// Default run length for standalone (non-adaptive) runs.
    pub generations: usize,
    /// When set, every generation asserts that cached solution state matches
    /// a full recomputation within 1e-9 (slow; for validation runs).
    #[serde(default)]
    pub debug_validate: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            population_size: 96,
            selection_fraction: 0.35,
            n_clusters: 5,
            archive_capacity: 1000,
            init_range: [0.0, 2.0],
            t_max: 60.0,
            seed: 0,
            generations: 350,
            debug_validate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerError {
    InvalidConfig { reason: String },
    /// Initial population could not be repaired to CR feasibility.
    InfeasibleInit,
    Eval(EvalError),
}

impl core::fmt::Display for OptimizerError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OptimizerError::InvalidConfig { reason } => {
                write!(f, "invalid optimizer config: {reason}")
            }
            OptimizerError::InfeasibleInit => {
                write!(f, "initial population cannot satisfy the catheter contribution bounds")
            }
            OptimizerError::Eval(e) => write!(f, "evaluation failed: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OptimizerError {}

impl From<EvalError> for OptimizerError {
    fn from(e: EvalError) -> Self {
        OptimizerError::Eval(e)
    }
}

/// Per-generation archive headline values, appended after each generation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Traces {
    pub best_lci: Vec<f64>,
    pub best_lsi: Vec<f64>,
    pub best_min: Vec<f64>,
}

#[derive(Debug, Default)]
struct GomScratch {
    candidate: Vec<f64>,
    new_vals: Vec<f64>,
    z: Vec<f64>,
    trial: TrialBuffers,
}

/// Serializable optimizer state sufficient to resume a run. Dose caches are
/// rebuilt by full re-evaluation on restore.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerSnapshot {
    pub config: OptimizerConfig,
    pub generation: usize,
    pub rng: ChaCha8Rng,
    pub population_times: Vec<Vec<f64>>,
    pub archive: ElitistArchive,
    pub traces: Traces,
}

pub struct Optimizer {
    config: OptimizerConfig,
    evaluator: Evaluator,
    rng: ChaCha8Rng,
    population: Vec<Solution>,
    archive: ElitistArchive,
    linkage_sets: Vec<Vec<usize>>,
    generation: usize,
    traces: Traces,
    scratch: EvalScratch,
    gom: GomScratch,
}

impl Optimizer {
    /// Validates the config, builds the linkage tree, initializes and
    /// evaluates the population, and seeds the archive with the feasible
    /// initial members.
    pub fn new(
        case: &PatientCase,
        evaluator: Evaluator,
        config: OptimizerConfig,
    ) -> Result<Self, OptimizerError> {
        validate_config(&config)?;
        if evaluator.n_dwells() != case.n_dwells() {
            return Err(OptimizerError::InvalidConfig {
                reason: "evaluator and case disagree on dwell count".into(),
            });
        }
        let positions: Vec<_> = case.dwell_positions.iter().map(|d| d.position).collect();
        let linkage_sets = build_linkage_tree(&positions);

        let mut opt = Optimizer {
            rng: seed::rng(config.seed, &[seed::tag("moea")]),
            population: Vec::with_capacity(config.population_size),
            archive: ElitistArchive::new(config.archive_capacity),
            linkage_sets,
            generation: 0,
            traces: Traces::default(),
            scratch: EvalScratch::default(),
            gom: GomScratch::default(),
            evaluator,
            config,
        };
        opt.init_population()?;
        Ok(opt)
    }

    fn init_population(&mut self) -> Result<(), OptimizerError> {
        let n = self.evaluator.n_dwells();
        let [lo, hi] = self.config.init_range;
        let mut rng = seed::rng(self.config.seed, &[seed::tag("init")]);
        let mut times = vec![0.0f64; n];
        for _ in 0..self.config.population_size {
            let mut feasible = false;
            for _ in 0..INIT_RETRY_CAP {
                for t in times.iter_mut() {
                    *t = lo + rng.gen::<f64>() * (hi - lo);
                }
                if self.evaluator.cr_feasible(&times) {
                    feasible = true;
                    break;
                }
            }
            if !feasible {
                scale_needles_to_feasibility(&mut times, &self.evaluator)?;
            }
            let sol = self.evaluator.evaluate(&times, &mut self.scratch)?;
            debug_assert!(sol.cr_feasible);
            self.archive
                .insert(&sol.dwell_times, &sol.dvi_values, sol.objectives);
            self.population.push(sol);
        }
        Ok(())
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }
    pub fn generation(&self) -> usize {
        self.generation
    }
    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }
    pub fn evaluator_mut(&mut self) -> &mut Evaluator {
        &mut self.evaluator
    }
    pub fn archive(&self) -> &ElitistArchive {
        &self.archive
    }
    pub fn archive_mut(&mut self) -> &mut ElitistArchive {
        &mut self.archive
    }
    pub fn population(&self) -> &[Solution] {
        &self.population
    }
    pub fn traces(&self) -> &Traces {
        &self.traces
    }
    pub fn linkage_sets(&self) -> &[Vec<usize>] {
        &self.linkage_sets
    }

    /// Runs `g` generations; resumable, so `run(a)` then `run(b)` equals
    /// `run(a+b)` for a fixed seed.
    pub fn run_generations(&mut self, g: usize) -> Result<(), OptimizerError> {
        for _ in 0..g {
            self.run_one_generation()?;
        }
        Ok(())
    }

    fn run_one_generation(&mut self) -> Result<(), OptimizerError> {
        let sel = self.select_indices();
        let objs: Vec<[f64; 2]> = sel.iter().map(|&i| objective_point(&self.population[i])).collect();
        let assignment = cluster_selection(&objs, self.config.n_clusters);
        let models: Vec<ClusterModel> = assignment
            .clusters
            .iter()
            .zip(&assignment.roles)
            .map(|(cl, &role)| {
                let ids: Vec<usize> = cl.iter().map(|&l| sel[l]).collect();
                estimate_distributions(&self.population, &ids, &self.linkage_sets, role)
            })
            .collect();

        for i in 0..self.population.len() {
            let c = assignment.nearest_cluster(objective_point(&self.population[i]));
            gom_variation(
                &mut self.population[i],
                &models[c],
                &self.linkage_sets,
                &self.evaluator,
                &mut self.archive,
                &mut self.rng,
                self.config.t_max,
                &mut self.scratch,
                &mut self.gom,
            );
        }

        self.generation += 1;
        self.traces
            .best_lci
            .push(self.archive.best_lci().expect("archive never empty"));
        self.traces
            .best_lsi
            .push(self.archive.best_lsi().expect("archive never empty"));
        self.traces
            .best_min
            .push(self.archive.best_min().expect("archive never empty"));

        if self.config.debug_validate {
            let dev = self.max_cached_deviation()?;
            assert!(
                dev <= 1e-9,
                "cached state deviates from full recomputation by {dev:e}"
            );
            self.archive.debug_check_invariants();
        }
        Ok(())
    }

    /// Truncation selection: whole fronts in order; the cut front is ranked
    /// by crowding distance (descending) then stable index.
    fn select_indices(&self) -> Vec<usize> {
        let target = selection_size(self.config.population_size, self.config.selection_fraction);
        let pairs: Vec<[f64; 2]> = self.population.iter().map(objective_point).collect();
        let fronts = non_dominated_fronts(&pairs);
        let mut selected = Vec::with_capacity(target);
        for front in fronts {
            if selected.len() >= target {
                break;
            }
            let remaining = target - selected.len();
            if front.len() <= remaining {
                selected.extend_from_slice(&front);
                continue;
            }
            let crowd = crowding_distances(&front, &pairs);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_unstable_by(|&a, &b| {
                crowd[b].total_cmp(&crowd[a]).then(front[a].cmp(&front[b]))
            });
            selected.extend(order[..remaining].iter().map(|&k| front[k]));
        }
        selected
    }

    /// Max relative deviation between any member's cached state and a fresh
    /// full evaluation.
    pub fn max_cached_deviation(&mut self) -> Result<f64, EvalError> {
        let mut max_dev = 0.0f64;
        for sol in &self.population {
            let dev = self.evaluator.full_recompute_deviation(sol, &mut self.scratch)?;
            max_dev = max_dev.max(dev);
        }
        Ok(max_dev)
    }

    /// Re-derives population objectives from cached DVIs after the
    /// evaluator's aim states changed, then re-offers members to the archive.
    pub fn refresh_population_objectives(&mut self) {
        for sol in self.population.iter_mut() {
            self.evaluator.refresh_objectives(sol, &mut self.scratch);
        }
    }

    /// Re-scores archive members under the evaluator's current aim states
    /// (stored DVI values are reused) and drops newly dominated members.
    pub fn rescore_archive(&mut self) {
        let evaluator = &self.evaluator;
        let scratch = &mut self.scratch;
        self.archive.recompute_and_filter(|e| {
            evaluator.objectives_for(&e.dvi_values, &e.dwell_times, scratch)
        });
    }

    /// Offers every CR-feasible population member to the archive.
    pub fn reoffer_population(&mut self) {
        for sol in &self.population {
            if sol.cr_feasible {
                self.archive
                    .insert(&sol.dwell_times, &sol.dvi_values, sol.objectives);
            }
        }
    }

    pub fn snapshot(&self) -> OptimizerSnapshot {
        OptimizerSnapshot {
            config: self.config,
            generation: self.generation,
            rng: self.rng.clone(),
            population_times: self
                .population
                .iter()
                .map(|s| s.dwell_times.clone())
                .collect(),
            archive: self.archive.clone(),
            traces: self.traces.clone(),
        }
    }

    /// Rebuilds a resumable optimizer from a snapshot. Dose caches are
    /// recomputed in full, so resumed trajectories are deterministic given
    /// the snapshot rather than bit-identical to the uninterrupted run.
    pub fn restore(
        case: &PatientCase,
        evaluator: Evaluator,
        snapshot: OptimizerSnapshot,
    ) -> Result<Self, OptimizerError> {
        validate_config(&snapshot.config)?;
        if evaluator.n_dwells() != case.n_dwells() {
            return Err(OptimizerError::InvalidConfig {
                reason: "evaluator and case disagree on dwell count".into(),
            });
        }
        let positions: Vec<_> = case.dwell_positions.iter().map(|d| d.position).collect();
        let mut opt = Optimizer {
            rng: snapshot.rng,
            population: Vec::with_capacity(snapshot.population_times.len()),
            archive: snapshot.archive,
            linkage_sets: build_linkage_tree(&positions),
            generation: snapshot.generation,
            traces: snapshot.traces,
            scratch: EvalScratch::default(),
            gom: GomScratch::default(),
            evaluator,
            config: snapshot.config,
        };
        for times in &snapshot.population_times {
            let sol = opt.evaluator.evaluate(times, &mut opt.scratch)?;
            opt.population.push(sol);
        }
        Ok(opt)
    }
}

fn validate_config(c: &OptimizerConfig) -> Result<(), OptimizerError> {
    let fail = |reason: &str| {
        Err(OptimizerError::InvalidConfig {
            reason: reason.into(),
        })
    };
    if c.population_size < 2 {
        return fail("population_size must be at least 2");
    }
    if c.n_clusters < 1 {
        return fail("n_clusters must be at least 1");
    }
    if c.population_size < c.n_clusters {
        return fail("population_size must be at least n_clusters");
    }
    if !(c.selection_fraction > 0.0 && c.selection_fraction <= 1.0) {
        return fail("selection_fraction must be in (0, 1]");
    }
    if ((c.selection_fraction * c.population_size as f64) as usize) < c.n_clusters {
        return fail("selection must be at least as large as n_clusters");
    }
    if c.archive_capacity < 1 {
        return fail("archive_capacity must be at least 1");
    }
    if !(c.t_max > 0.0 && c.t_max.is_finite()) {
        return fail("t_max must be positive and finite");
    }
    if !(c.init_range[0] >= 0.0 && c.init_range[1] > c.init_range[0]) {
        return fail("init_range must satisfy 0 <= lo < hi");
    }
    if c.init_range[1] > c.t_max {
        return fail("init_range must lie within [0, t_max]");
    }
    Ok(())
}

fn objective_point(sol: &Solution) -> [f64; 2] {
    [sol.objectives.lci, sol.objectives.lsi]
}

/// Scales needle-channel times down until the catheter contribution bounds
/// hold; non-needle channels are untouched. Used when resampling fails.
fn scale_needles_to_feasibility(
    times: &mut [f64],
    evaluator: &Evaluator,
) -> Result<(), OptimizerError> {
    let needle_dwells = evaluator.needle_dwells();
    if needle_dwells.is_empty() {
        return Err(OptimizerError::InfeasibleInit);
    }
    let cons = evaluator.constraint_config();
    let needle_sum: f64 = needle_dwells
        .iter()
        .flat_map(|ch| ch.iter())
        .map(|&j| times[j])
        .sum();
    let total: f64 = times.iter().sum();
    let others = total - needle_sum;

    let mut s = 1.0f64;
    if needle_sum > 0.0 {
        let tot_f = cons.needles_total_max_fraction;
        s = s.min(tot_f * others / ((1.0 - tot_f) * needle_sum));
        let max_f = cons.needle_max_fraction;
        for ch in needle_dwells {
            let ch_sum: f64 = ch.iter().map(|&j| times[j]).sum();
            let denom = ch_sum - max_f * needle_sum;
            if denom > 0.0 {
                s = s.min(max_f * others / denom);
            }
        }
    }
    // Back off from the exact boundary so rounding cannot tip it over.
    let s = (s * (1.0 - 1e-12)).clamp(0.0, 1.0);
    for ch in needle_dwells {
        for &j in ch {
            times[j] *= s;
        }
    }
    if evaluator.cr_feasible(times) {
        return Ok(());
    }
    for ch in needle_dwells {
        for &j in ch {
            times[j] = 0.0;
        }
    }
    if evaluator.cr_feasible(times) {
        Ok(())
    } else {
        Err(OptimizerError::InfeasibleInit)
    }
}

/// One gene-pool optimal mixing pass over all linkage sets.
///
/// Per set: sample from the set's normal model, clamp to [0, t_max],
/// evaluate as an uncommitted trial, and adopt the trial only if the
/// cluster role's acceptance test passes; a discarded trial leaves the
/// member bit-identical.
#[allow(clippy::too_many_arguments)]
fn gom_variation(
    sol: &mut Solution,
    model: &ClusterModel,
    linkage_sets: &[Vec<usize>],
    evaluator: &Evaluator,
    archive: &mut ElitistArchive,
    rng: &mut ChaCha8Rng,
    t_max: f64,
    scratch: &mut EvalScratch,
    gom: &mut GomScratch,
) {
    gom.candidate.clear();
    gom.candidate.extend_from_slice(&sol.dwell_times);

    for (set, set_model) in linkage_sets.iter().zip(&model.sets) {
        set_model.sample_into(rng, &mut gom.z, &mut gom.new_vals);
        for v in gom.new_vals.iter_mut() {
            *v = v.clamp(0.0, t_max);
        }
        // A no-op sample cannot strictly improve: treat as discarded.
        if set
            .iter()
            .zip(&gom.new_vals)
            .all(|(&j, &v)| v == sol.dwell_times[j])
        {
            continue;
        }

        // Hard constraint pre-check on times alone; violating samples are
        // rejected before any dose work.
        for (&j, &v) in set.iter().zip(&gom.new_vals) {
            gom.candidate[j] = v;
        }
        if !evaluator.cr_feasible(&gom.candidate) {
            for &j in set {
                gom.candidate[j] = sol.dwell_times[j];
            }
            continue;
        }

        let objectives = evaluator.evaluate_trial(sol, set, &gom.new_vals, &mut gom.trial, scratch);

        let accepted = match model.role {
            ClusterRole::ExtremeLci => objectives.lci > sol.objectives.lci,
            ClusterRole::ExtremeLsi => objectives.lsi > sol.objectives.lsi,
            ClusterRole::Middle => {
                if objectives.dominates(&sol.objectives) {
                    true
                } else if sol.objectives.dominates(&objectives) {
                    false
                } else {
                    // Mutually non-dominated: keep only if the archive
                    // accepts the new trade-off.
                    archive.insert(gom.trial.dwell_times(), gom.trial.dvi_values(), objectives)
                }
            }
        };

        if accepted {
            evaluator.commit_trial(sol, &mut gom.trial, objectives);
            debug_assert!(sol.cr_feasible);
            if model.role != ClusterRole::Middle {
                archive.insert(&sol.dwell_times, &sol.dvi_values, sol.objectives);
            }
        } else {
            for &j in set {
                gom.candidate[j] = sol.dwell_times[j];
            }
        }
    }
}

/// Fast non-dominated sorting (maximization in both dimensions). Fronts and
/// their members are in stable index order.
fn non_dominated_fronts(pairs: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = pairs.len();
    let dom = |a: usize, b: usize| {
        pairs[a][0] >= pairs[b][0]
            && pairs[a][1] >= pairs[b][1]
            && (pairs[a][0] > pairs[b][0] || pairs[a][1] > pairs[b][1])
    };
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut first = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if dom(i, j) {
                dominated_by[i].push(j);
            } else if dom(j, i) {
                count[i] += 1;
            }
        }
        if count[i] == 0 {
            first.push(i);
        }
    }
    let mut current = first;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(core::mem::replace(&mut current, next));
    }
    fronts
}

/// NSGA-II crowding distance within one front. Degenerate dimensions (zero
/// range) contribute nothing, so fully duplicated fronts stay tied at 0.
fn crowding_distances(front: &[usize], pairs: &[[f64; 2]]) -> Vec<f64> {
    let m = front.len();
    let mut crowd = vec![0.0f64; m];
    for dim in 0..2 {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_unstable_by(|&a, &b| {
            pairs[front[a]][dim]
                .total_cmp(&pairs[front[b]][dim])
                .then(front[a].cmp(&front[b]))
        });
        let lo = pairs[front[order[0]]][dim];
        let hi = pairs[front[order[m - 1]]][dim];
        let range = hi - lo;
        if !(range > 0.0) {
            continue;
        }
        crowd[order[0]] = f64::INFINITY;
        crowd[order[m - 1]] = f64::INFINITY;
        for k in 1..m - 1 {
            crowd[order[k]] +=
                (pairs[front[order[k + 1]]][dim] - pairs[front[order[k - 1]]][dim]) / range;
        }
    }
    crowd
}

fn selection_size(population_size: usize, fraction: f64) -> usize {
    math::floor(fraction * population_size as f64) as usize
}
