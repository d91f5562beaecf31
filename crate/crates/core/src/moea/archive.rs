//! Bounded elitist archive of CR-feasible, mutually non-dominated plans.
//!
//! Members are kept sorted by LCI descending; mutual non-domination then
//! forces LSI strictly ascending, which makes domination checks and pruning
//! O(log n + removed). Overflow beyond capacity is resolved on an adaptive
//! objective-space grid: the oldest unprotected member of the most crowded
//! cell is evicted. The best-LCI, best-LSI and best-min members are
//! protected so headline metrics never regress through eviction.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::objective::ObjectivePair;

/// Objective-space tolerance below which two plans count as duplicates.
pub const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub dwell_times: Vec<f64>,
    pub dvi_values: Vec<f64>,
    pub objectives: ObjectivePair,
    /// Monotone insertion id; stable tie-break and age for eviction.
    pub insertion: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElitistArchive {
    members: Vec<ArchiveEntry>,
    capacity: usize,
    next_id: u64,
}

impl ElitistArchive {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1);
        ElitistArchive {
            members: Vec::new(),
            capacity,
            next_id: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn capacity(&self) -> usize {
        self.capacity
    }
    /// Members sorted by LCI descending (LSI ascending).
    pub fn members(&self) -> &[ArchiveEntry] {
        &self.members
    }

    pub fn best_lci(&self) -> Option<f64> {
        self.members.first().map(|m| m.objectives.lci)
    }
    pub fn best_lsi(&self) -> Option<f64> {
        self.members.last().map(|m| m.objectives.lsi)
    }
    /// Best balanced value max over members of min(lci, lsi).
    pub fn best_min(&self) -> Option<f64> {
        self.members
            .iter()
            .map(|m| m.objectives.lci.min(m.objectives.lsi))
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.max(v)))
            })
    }

    /// Offers a CR-feasible evaluated solution. Returns true when the
    /// solution is a member after the update (false: dominated, duplicate,
    /// or evicted straight back out by the overflow rule).
    pub fn insert(&mut self, times: &[f64], dvis: &[f64], objectives: ObjectivePair) -> bool {
        let (lci, lsi) = (objectives.lci, objectives.lsi);
        debug_assert!(lci.is_finite() && lsi.is_finite());

        // Prefix [0..p) holds members with lci >= incoming (none equal can
        // coexist with it post-update, see below); their max lsi is at p-1.
        let p = self
            .members
            .partition_point(|m| m.objectives.lci >= lci);
        if p > 0 && self.members[p - 1].objectives.lsi >= lsi {
            return false; // dominated or exact duplicate
        }

        // Duplicate within tolerance: only members in an lci window can match.
        let w_lo = self
            .members
            .partition_point(|m| m.objectives.lci > lci + DUPLICATE_TOL);
        let w_hi = self
            .members
            .partition_point(|m| m.objectives.lci >= lci - DUPLICATE_TOL);
        for m in &self.members[w_lo..w_hi] {
            if (m.objectives.lsi - lsi).abs() <= DUPLICATE_TOL {
                return false;
            }
        }

        // Members dominated by the incoming solution form a contiguous run:
        // lci <= incoming from p on, lsi ascending.
        let q = p + self.members[p..]
            .iter()
            .position(|m| m.objectives.lsi > lsi)
            .unwrap_or(self.members.len() - p);
        self.members.drain(p..q);

        let id = self.next_id;
        self.next_id += 1;
        self.members.insert(
            p,
            ArchiveEntry {
                dwell_times: times.to_vec(),
                dvi_values: dvis.to_vec(),
                objectives,
                insertion: id,
            },
        );

        if self.members.len() > self.capacity {
            let evicted = self.evict_most_crowded();
            return evicted != id;
        }
        true
    }

    /// Evicts the oldest unprotected member of the most crowded grid cell
    /// and returns its insertion id.
    fn evict_most_crowded(&mut self) -> u64 {
        let protected = self.protected_ids();
        let g = grid_dim(self.capacity);

        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for m in &self.members {
            let o = [m.objectives.lci, m.objectives.lsi];
            for d in 0..2 {
                lo[d] = lo[d].min(o[d]);
                hi[d] = hi[d].max(o[d]);
            }
        }
        let cell_of = |m: &ArchiveEntry| -> usize {
            let mut c = [0usize; 2];
            let o = [m.objectives.lci, m.objectives.lsi];
            for d in 0..2 {
                let r = hi[d] - lo[d];
                c[d] = if r > 0.0 {
                    (((o[d] - lo[d]) / r * g as f64) as usize).min(g - 1)
                } else {
                    0
                };
            }
            c[0] * g + c[1]
        };

        let mut counts = vec![0u32; g * g];
        for m in &self.members {
            counts[cell_of(m)] += 1;
        }
        let mut cells: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] > 0).collect();
        cells.sort_unstable_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));

        for cell in cells {
            let victim = self
                .members
                .iter()
                .enumerate()
                .filter(|(_, m)| cell_of(m) == cell && !protected.contains(&m.insertion))
                .min_by_key(|(_, m)| m.insertion)
                .map(|(i, _)| i);
            if let Some(i) = victim {
                let id = self.members[i].insertion;
                self.members.remove(i);
                return id;
            }
        }
        // Everything protected (tiny capacities): drop the newest member.
        let i = self
            .members
            .iter()
            .enumerate()
            .max_by_key(|(_, m)| m.insertion)
            .map(|(i, _)| i)
            .expect("archive non-empty on eviction");
        let id = self.members[i].insertion;
        self.members.remove(i);
        id
    }

    fn protected_ids(&self) -> [u64; 3] {
        let best_lci = self.members.first().map_or(u64::MAX, |m| m.insertion);
        let best_lsi = self.members.last().map_or(u64::MAX, |m| m.insertion);
        let mut best_min_id = u64::MAX;
        let mut best_min = f64::NEG_INFINITY;
        for m in &self.members {
            let v = m.objectives.lci.min(m.objectives.lsi);
            if v > best_min {
                best_min = v;
                best_min_id = m.insertion;
            }
        }
        [best_lci, best_lsi, best_min_id]
    }

    /// Re-scores every member and drops newly dominated or duplicate ones.
    /// Used after aspiration adjustments; DVI values and times are kept.
    /// Returns the number of removed members.
    pub fn recompute_and_filter(
        &mut self,
        mut rescore: impl FnMut(&ArchiveEntry) -> ObjectivePair,
    ) -> usize {
        let before = self.members.len();
        for m in self.members.iter_mut() {
            m.objectives = rescore(m);
        }
        self.members.sort_unstable_by(|a, b| {
            b.objectives
                .lci
                .total_cmp(&a.objectives.lci)
                .then(b.objectives.lsi.total_cmp(&a.objectives.lsi))
                .then(a.insertion.cmp(&b.insertion))
        });
        let mut kept: Vec<ArchiveEntry> = Vec::with_capacity(before);
        let mut max_lsi = f64::NEG_INFINITY;
        'outer: for m in self.members.drain(..) {
            if m.objectives.lsi <= max_lsi {
                continue;
            }
            // Near-duplicates only hide among recently kept members.
            for k in kept.iter().rev() {
                if k.objectives.lci - m.objectives.lci > DUPLICATE_TOL {
                    break;
                }
                if (k.objectives.lsi - m.objectives.lsi).abs() <= DUPLICATE_TOL {
                    continue 'outer;
                }
            }
            max_lsi = m.objectives.lsi;
            kept.push(m);
        }
        self.members = kept;
        before - self.members.len()
    }

    /// Panics unless members are sorted, mutually non-dominated, within
    /// capacity, and distinct beyond the duplicate tolerance.
    pub fn debug_check_invariants(&self) {
        assert!(self.members.len() <= self.capacity);
        for w in self.members.windows(2) {
            assert!(w[0].objectives.lci > w[1].objectives.lci);
            assert!(w[0].objectives.lsi < w[1].objectives.lsi);
            let dup = (w[0].objectives.lci - w[1].objectives.lci).abs() <= DUPLICATE_TOL
                && (w[0].objectives.lsi - w[1].objectives.lsi).abs() <= DUPLICATE_TOL;
            assert!(!dup);
        }
    }
}

fn grid_dim(capacity: usize) -> usize {
    let g = math::floor(math::sqrt(capacity as f64 / 4.0)) as usize;
    g.max(2)
}
