//! Bi-objective model: least coverage index (LCI) and least sparing index
//! (LSI), plus the dwell-time soft constraint and catheter contribution
//! hard constraint.
//!
//! Each aim contributes a signed margin `delta` to its group (positive once
//! satisfied). Group objectives are weighted sums where weights grow by a
//! factor of ten from the least to the most violated aim, then normalize to
//! sum one, so improving the worst aim dominates the objective.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dvi::Direction;
use crate::math;
use crate::patient::{ChannelKind, PatientCase};
use crate::protocol::{AimGroup, AimStates, AimTier, ProtocolConfig};

/// Whether the added aims participate in the objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Mandatory aims only.
    EmbraceOnly,
    /// Mandatory plus non-eliminated added aims.
    Full,
}

/// Objective values of one plan. `lci`/`lsi` include the soft-constraint
/// adjustment; `constraint` is the raw violation magnitude before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectivePair {
    pub lci: f64,
    pub lsi: f64,
    pub constraint: f64,
}

impl ObjectivePair {
    /// True when every participating aim is satisfied (both weighted
    /// margins strictly positive).
    pub fn all_aims_met(&self) -> bool {
        self.lci > 0.0 && self.lsi > 0.0
    }

    /// Pareto domination with both objectives maximized.
    pub fn dominates(&self, other: &ObjectivePair) -> bool {
        self.lci >= other.lci
            && self.lsi >= other.lsi
            && (self.lci > other.lci || self.lsi > other.lsi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveError {
    LengthMismatch { expected: usize, got: usize },
    ValueNotFinite { aim: String },
    EliminatedAim { aim: String },
}

impl core::fmt::Display for ObjectiveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ObjectiveError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} DVI values, got {got}")
            }
            ObjectiveError::ValueNotFinite { aim } => {
                write!(f, "DVI value for aim {aim} is not finite")
            }
            ObjectiveError::EliminatedAim { aim } => {
                write!(f, "aim {aim} is eliminated and has no margin")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ObjectiveError {}

/// Signed margin of a DVI value against an aspiration: positive when the
/// aim is satisfied, regardless of direction.
#[inline]
pub fn delta(direction: Direction, aspiration: f64, value: f64) -> f64 {
    match direction {
        Direction::Maximize => value - aspiration,
        Direction::Minimize => aspiration - value,
    }
}

/// Margin of aim `i` for the given per-aim DVI values under the current
/// states; `None` when the aim is eliminated.
pub fn aim_delta(
    protocol: &ProtocolConfig,
    states: &AimStates,
    i: usize,
    value: f64,
) -> Option<f64> {
    let aspiration = states.aspiration(protocol, i)?;
    Some(delta(protocol.aims[i].dvi.direction, aspiration, value))
}

/// Normalized exponential weights over a group of margins. The largest
/// margin (least violated) gets raw weight 1; each step towards the most
/// violated multiplies by 10; ties keep their original order. Weights are
/// returned in input order and sum to one.
pub fn compute_weights(deltas: &[f64]) -> Vec<f64> {
    let n = deltas.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort by descending margin; equal margins stay in aim order.
    order.sort_by(|&a, &b| deltas[b].total_cmp(&deltas[a]));
    let mut weights = alloc::vec![0.0; n];
    let mut sum = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        let w = math::pow10(rank as u32);
        weights[i] = w;
        sum += w;
    }
    for w in &mut weights {
        *w /= sum;
    }
    weights
}

/// Weighted group objective without allocating: sorts an index scratch
/// buffer and accumulates `sum(w_i * delta_i) / sum(w_i)`.
pub fn weighted_group_objective(deltas: &[f64], order_scratch: &mut Vec<usize>) -> f64 {
    let n = deltas.len();
    if n == 0 {
        return 0.0;
    }
    order_scratch.clear();
    order_scratch.extend(0..n);
    order_scratch.sort_by(|&a, &b| deltas[b].total_cmp(&deltas[a]));
    let mut num = 0.0;
    let mut den = 0.0;
    let mut w = 1.0;
    for &i in order_scratch.iter() {
        num += w * deltas[i];
        den += w;
        w *= 10.0;
    }
    num / den
}

/// Computes raw objectives (no soft-constraint adjustment) from per-aim DVI
/// values. `values` is indexed like `protocol.aims`; entries for eliminated
/// aims and, in mandatory-only mode, added aims are ignored.
pub fn compute_objectives(
    values: &[f64],
    protocol: &ProtocolConfig,
    states: &AimStates,
    mode: ObjectiveMode,
) -> Result<ObjectivePair, ObjectiveError> {
    if values.len() != protocol.aims.len() {
        return Err(ObjectiveError::LengthMismatch {
            expected: protocol.aims.len(),
            got: values.len(),
        });
    }
    let mut coverage: Vec<f64> = Vec::new();
    let mut sparing: Vec<f64> = Vec::new();
    for (i, a) in protocol.aims.iter().enumerate() {
        if mode == ObjectiveMode::EmbraceOnly && a.tier == AimTier::Added {
            continue;
        }
        let Some(aspiration) = states.aspiration(protocol, i) else {
            continue;
        };
        if !values[i].is_finite() {
            return Err(ObjectiveError::ValueNotFinite { aim: a.id() });
        }
        let d = delta(a.dvi.direction, aspiration, values[i]);
        match a.group {
            AimGroup::Coverage => coverage.push(d),
            AimGroup::Sparing => sparing.push(d),
        }
    }
    let mut scratch = Vec::new();
    Ok(ObjectivePair {
        lci: weighted_group_objective(&coverage, &mut scratch),
        lsi: weighted_group_objective(&sparing, &mut scratch),
        constraint: 0.0,
    })
}

/// True when all participating margins are strictly positive.
pub fn all_aims_met(
    values: &[f64],
    protocol: &ProtocolConfig,
    states: &AimStates,
    mode: ObjectiveMode,
) -> bool {
    protocol.aims.iter().enumerate().all(|(i, a)| {
        if mode == ObjectiveMode::EmbraceOnly && a.tier == AimTier::Added {
            return true;
        }
        match states.aspiration(protocol, i) {
            None => true,
            Some(asp) => delta(a.dvi.direction, asp, values[i]) > 0.0,
        }
    })
}

/// Soft and hard constraint parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintConfig {
    /// Scale of the soft-constraint objective adjustment.
    pub dtmr_alpha: f64,
    /// Floor for the smaller dwell time in the ratio, seconds.
    pub dtmr_epsilon_s: f64,
    /// Hard cap on any single needle channel's share of total dwell time.
    pub needle_max_fraction: f64,
    /// Hard cap on the combined share of all needle channels.
    pub needles_total_max_fraction: f64,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig {
            dtmr_alpha: 0.01,
            dtmr_epsilon_s: 0.01,
            needle_max_fraction: 0.20,
            needles_total_max_fraction: 0.30,
        }
    }
}

/// Allowed dwell-time ratio headroom at the smaller time `t`: `f(t) = 2 / (5 + t)`.
#[inline]
pub fn dtmr_allowed_excess(t_lo: f64) -> f64 {
    2.0 / (5.0 + t_lo)
}

/// Soft-constraint contribution of one dwell given its nearest same-channel
/// neighbor's time. Zero when the ratio stays within the allowed band.
#[inline]
pub fn dtmr_dwell_contribution(t: f64, t_neighbor: f64, n_dwells: usize, eps_s: f64) -> f64 {
    let t_lo = t.min(t_neighbor).max(eps_s);
    let t_hi = t.max(t_neighbor);
    let r = t_hi / t_lo;
    let allowed = dtmr_allowed_excess(t_lo);
    if r - 1.0 > allowed {
        (r - allowed) / n_dwells as f64
    } else {
        0.0
    }
}

/// Total dwell-time modulation violation over all dwells. `neighbor[i]` is
/// the index of dwell `i`'s nearest neighbor within the same channel.
pub fn dtmr_violation(times: &[f64], neighbor: &[Option<usize>], eps_s: f64) -> f64 {
    let n = times.len();
    let mut total = 0.0;
    for (i, nb) in neighbor.iter().enumerate() {
        if let Some(j) = nb {
            total += dtmr_dwell_contribution(times[i], times[*j], n, eps_s);
        }
    }
    total
}

/// Subtracts the scaled soft-constraint violation from both objectives and
/// records the raw magnitude.
#[inline]
pub fn apply_soft_constraint(pair: &mut ObjectivePair, cons_total: f64, alpha: f64) {
    pair.lci -= alpha * cons_total;
    pair.lsi -= alpha * cons_total;
    pair.constraint = cons_total;
}

/// For each dwell, the nearest other dwell of the same channel (Euclidean;
/// ties resolve to the lower dwell index). Single-dwell channels get `None`.
pub fn build_neighbor_map(case: &PatientCase) -> Vec<Option<usize>> {
    let by_id = case.dwell_index_by_id();
    let mut neighbor = alloc::vec![None; case.dwell_positions.len()];
    for ch in &case.channels {
        let idxs: Vec<usize> = ch.dwell_ids.iter().map(|id| by_id[id]).collect();
        for &i in &idxs {
            let mut best: Option<(f64, usize)> = None;
            for &j in &idxs {
                if j == i {
                    continue;
                }
                let d2 = crate::geometry::dist2(
                    case.dwell_positions[i].position,
                    case.dwell_positions[j].position,
                );
                let better = match best {
                    None => true,
                    Some((bd, bj)) => d2 < bd || (d2 == bd && j < bj),
                };
                if better {
                    best = Some((d2, j));
                }
            }
            neighbor[i] = best.map(|(_, j)| j);
        }
    }
    neighbor
}

/// Dwell indices of each needle channel, for the catheter contribution caps.
pub fn needle_channel_dwells(case: &PatientCase) -> Vec<Vec<usize>> {
    let by_id = case.dwell_index_by_id();
    case.channels
        .iter()
        .filter(|ch| ch.kind == ChannelKind::Needle)
        .map(|ch| ch.dwell_ids.iter().map(|id| by_id[id]).collect())
        .collect()
}

/// Hard catheter contribution check: every needle channel delivers at most
/// `needle_max_fraction` of the total dwell time and all needles together at
/// most `needles_total_max_fraction`. A plan with zero total time is
/// feasible.
pub fn check_catheter_contribution(
    times: &[f64],
    needle_dwells: &[Vec<usize>],
    cfg: &ConstraintConfig,
) -> bool {
    let total: f64 = times.iter().sum();
    if total <= 0.0 {
        return true;
    }
    let mut needles_sum = 0.0;
    for dwells in needle_dwells {
        let s: f64 = dwells.iter().map(|&i| times[i]).sum();
        if s > cfg.needle_max_fraction * total {
            return false;
        }
        needles_sum += s;
    }
    needles_sum <= cfg.needles_total_max_fraction * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ProtocolConfig;

    #[test]
    fn weights_follow_the_worked_example() {
        // Margins [2, -1, -5]: raw weights 1, 10, 100 -> sum 111.
        let deltas = [2.0, -1.0, -5.0];
        let w = compute_weights(&deltas);
        assert!((w[0] - 1.0 / 111.0).abs() < 1e-15);
        assert!((w[1] - 10.0 / 111.0).abs() < 1e-15);
        assert!((w[2] - 100.0 / 111.0).abs() < 1e-15);
        let mut scratch = Vec::new();
        let obj = weighted_group_objective(&deltas, &mut scratch);
        assert!((obj - (-508.0 / 111.0)).abs() < 1e-12, "obj = {obj}");
    }

    #[test]
    fn weights_tie_break_is_stable() {
        let deltas = [1.0, 1.0, 0.0];
        let w = compute_weights(&deltas);
        // First of the tied pair keeps the smaller (less violated) weight.
        assert!(w[0] < w[1]);
        assert!(w[1] < w[2]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_sign_follows_direction() {
        assert_eq!(delta(Direction::Maximize, 111.0, 113.0), 2.0);
        assert_eq!(delta(Direction::Maximize, 111.0, 110.0), -1.0);
        assert_eq!(delta(Direction::Minimize, 78.0, 70.0), 8.0);
        assert_eq!(delta(Direction::Minimize, 78.0, 80.0), -2.0);
    }

    #[test]
    fn objectives_positive_iff_all_margins_positive() {
        let p = ProtocolConfig::default_protocol();
        let st = crate::protocol::AimStates::initial(&p);
        // Values that satisfy every aim by one unit.
        let values: Vec<f64> = p
            .aims
            .iter()
            .map(|a| match a.dvi.direction {
                Direction::Maximize => a.aspiration_strict + 1.0,
                Direction::Minimize => a.aspiration_strict - 1.0,
            })
            .collect();
        let pair = compute_objectives(&values, &p, &st, ObjectiveMode::Full).unwrap();
        assert!(pair.lci > 0.0 && pair.lsi > 0.0);
        assert!(pair.all_aims_met());
        assert!(all_aims_met(&values, &p, &st, ObjectiveMode::Full));

        // Breaking one sparing aim drags LSI negative.
        let mut bad = values.clone();
        let i = p.aims.iter().position(|a| a.id() == "d2cm3_bladder_lt").unwrap();
        bad[i] = 120.0;
        let pair = compute_objectives(&bad, &p, &st, ObjectiveMode::Full).unwrap();
        assert!(pair.lci > 0.0);
        assert!(pair.lsi < 0.0);
        assert!(!all_aims_met(&bad, &p, &st, ObjectiveMode::Full));
    }

    #[test]
    fn embrace_only_mode_ignores_added_aims() {
        let p = ProtocolConfig::default_protocol();
        let st = crate::protocol::AimStates::initial(&p);
        let mut values: Vec<f64> = p
            .aims
            .iter()
            .map(|a| match a.dvi.direction {
                Direction::Maximize => a.aspiration_strict + 1.0,
                Direction::Minimize => a.aspiration_strict - 1.0,
            })
            .collect();
        // Violate every added aim badly.
        for (i, a) in p.aims.iter().enumerate() {
            if a.tier == AimTier::Added {
                values[i] = match a.dvi.direction {
                    Direction::Maximize => 0.0,
                    Direction::Minimize => 100.0,
                };
            }
        }
        let pair = compute_objectives(&values, &p, &st, ObjectiveMode::EmbraceOnly).unwrap();
        assert!(pair.lci > 0.0 && pair.lsi > 0.0);
        let full = compute_objectives(&values, &p, &st, ObjectiveMode::Full).unwrap();
        assert!(full.lci < 0.0 && full.lsi < 0.0);
    }

    #[test]
    fn eliminated_aims_drop_out() {
        let p = ProtocolConfig::default_protocol();
        let mut st = crate::protocol::AimStates::initial(&p);
        let i = p.aims.iter().position(|a| a.id() == "v100_mid_nt_lt").unwrap();
        let mut values: Vec<f64> = p
            .aims
            .iter()
            .map(|a| match a.dvi.direction {
                Direction::Maximize => a.aspiration_strict + 1.0,
                Direction::Minimize => a.aspiration_strict - 1.0,
            })
            .collect();
        values[i] = 99.0; // would be a massive violation
        let before = compute_objectives(&values, &p, &st, ObjectiveMode::Full).unwrap();
        assert!(before.lsi < 0.0);
        st.0[i].as_mut().unwrap().eliminated = true;
        let after = compute_objectives(&values, &p, &st, ObjectiveMode::Full).unwrap();
        assert!(after.lsi > 0.0);
        assert_eq!(st.lowest_active_priority(&p), Some(4)); // top_nt still active
    }

    #[test]
    fn dtmr_worked_example() {
        // t = 1.0 s against neighbor 0.5 s in a 10-dwell plan:
        // r = 2, f(0.5) = 2/5.5, contribution (2 - 2/5.5) / 10.
        let c = dtmr_dwell_contribution(1.0, 0.5, 10, 0.01);
        assert!((c - (2.0 - 2.0 / 5.5) / 10.0).abs() < 1e-12);
        assert!((c - 0.16364).abs() < 1e-3, "c = {c}");
        // Within the allowed band: no contribution.
        assert_eq!(dtmr_dwell_contribution(1.0, 0.95, 10, 0.01), 0.0);
        // Zero against zero: no contribution.
        assert_eq!(dtmr_dwell_contribution(0.0, 0.0, 10, 0.01), 0.0);
        // Zero neighbor floors at eps.
        let c = dtmr_dwell_contribution(1.0, 0.0, 10, 0.01);
        let expected = (1.0 / 0.01 - 2.0 / 5.01) / 10.0;
        assert!((c - expected).abs() < 1e-12);
    }

    #[test]
    fn soft_constraint_shifts_both_objectives() {
        let mut pair = ObjectivePair {
            lci: 1.0,
            lsi: 2.0,
            constraint: 0.0,
        };
        apply_soft_constraint(&mut pair, 3.0, 0.01);
        assert!((pair.lci - 0.97).abs() < 1e-15);
        assert!((pair.lsi - 1.97).abs() < 1e-15);
        assert_eq!(pair.constraint, 3.0);
    }

    #[test]
    fn catheter_caps_enforced() {
        let cfg = ConstraintConfig::default();
        let needles = alloc::vec![alloc::vec![0usize, 1], alloc::vec![2usize]];
        // Total 10 s; needle 0 delivers 2 s (20%), needle 1 delivers 1 s.
        let ok = [1.0, 1.0, 1.0, 7.0];
        assert!(check_catheter_contribution(&ok, &needles, &cfg));
        // Single-channel cap exceeded.
        let bad = [2.0, 0.5, 0.0, 7.5];
        assert!(!check_catheter_contribution(&bad, &needles, &cfg));
        // Combined cap exceeded: 1.5 + 1.6 = 3.1 of 10.
        let bad2 = [1.0, 0.5, 1.6, 6.9];
        assert!(!check_catheter_contribution(&bad2, &needles, &cfg));
        // Zero plan is feasible.
        assert!(check_catheter_contribution(&[0.0, 0.0, 0.0, 0.0], &needles, &cfg));
    }
}
