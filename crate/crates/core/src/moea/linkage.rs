//! Offline linkage tree: UPGMA agglomerative clustering of dwell positions.
//!
//! The tree is built once per case from pairwise Euclidean distances and
//! reused for every generation. Linkage sets are all tree nodes except the
//! root: the leaf singletons plus every internal merge.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{self, Vec3};

/// Builds the linkage sets for gene-pool optimal mixing.
///
/// UPGMA average linkage with deterministic tie-breaking: among pairs at the
/// minimal distance the lexicographically smallest (creation-order) pair
/// merges first. Each returned set is sorted ascending; singletons come
/// first, then merge sets in merge order. The root (all variables) is
/// excluded, except in the degenerate one-dwell case where the single leaf
/// is kept.
pub fn build_linkage_tree(positions: &[Vec3]) -> Vec<Vec<usize>> {
    let n = positions.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    if n == 1 {
        return sets;
    }

    // Slot-indexed distance matrix; merged clusters get fresh slots so the
    // Lance-Williams update never aliases a live entry.
    let n_slots = 2 * n - 1;
    let mut dist = vec![0.0f64; n_slots * n_slots];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = geometry::dist(positions[i], positions[j]);
            dist[i * n_slots + j] = d;
            dist[j * n_slots + i] = d;
        }
    }

    let mut slot_sets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    // Active slots stay sorted ascending: merges remove two and append the
    // newest slot id, so creation order and slot order agree.
    let mut active: Vec<usize> = (0..n).collect();

    while active.len() > 1 {
        let mut best = (f64::INFINITY, 0usize, 1usize);
        for a_pos in 0..active.len() {
            for b_pos in (a_pos + 1)..active.len() {
                let d = dist[active[a_pos] * n_slots + active[b_pos]];
                if d < best.0 {
                    best = (d, a_pos, b_pos);
                }
            }
        }
        let (_, a_pos, b_pos) = best;
        let slot_a = active[a_pos];
        let slot_b = active[b_pos];
        let size_a = slot_sets[slot_a].len() as f64;
        let size_b = slot_sets[slot_b].len() as f64;

        let mut merged = slot_sets[slot_a].clone();
        merged.extend_from_slice(&slot_sets[slot_b]);
        merged.sort_unstable();

        let new_slot = slot_sets.len();
        for &other in &active {
            if other == slot_a || other == slot_b {
                continue;
            }
            let d = (size_a * dist[slot_a * n_slots + other]
                + size_b * dist[slot_b * n_slots + other])
                / (size_a + size_b);
            dist[new_slot * n_slots + other] = d;
            dist[other * n_slots + new_slot] = d;
        }
        slot_sets.push(merged.clone());
        active.remove(b_pos);
        active.remove(a_pos);
        active.push(new_slot);

        // The final merge is the root and carries no linkage set.
        if active.len() > 1 {
            sets.push(merged);
        }
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_dwell_is_one_singleton() {
        assert_eq!(build_linkage_tree(&[[0.0, 0.0, 0.0]]), vec![vec![0]]);
    }

    #[test]
    fn two_dwells_root_excluded() {
        let sets = build_linkage_tree(&[[0.0; 3], [1.0, 0.0, 0.0]]);
        assert_eq!(sets, vec![vec![0], vec![1]]);
    }

    #[test]
    fn collinear_pairs_merge_first() {
        let pos: Vec<_> = [0.0, 1.0, 10.0, 11.0]
            .iter()
            .map(|&x| [x, 0.0, 0.0])
            .collect();
        let sets = build_linkage_tree(&pos);
        assert_eq!(sets[..4], [vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(sets[4], vec![0, 1]);
        assert_eq!(sets[5], vec![2, 3]);
        // Root {0,1,2,3} excluded.
        assert_eq!(sets.len(), 6);
    }

    #[test]
    fn set_count_and_contents() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pos: Vec<Vec3> = (0..30)
            .map(|_| {
                [
                    rng.gen_range(-40.0..40.0),
                    rng.gen_range(-40.0..40.0),
                    rng.gen_range(0.0..60.0),
                ]
            })
            .collect();
        let sets = build_linkage_tree(&pos);
        // n singletons + n-2 internal non-root merges.
        assert_eq!(sets.len(), 2 * pos.len() - 2);
        for s in &sets {
            assert!(!s.is_empty());
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.len() < pos.len());
        }
    }

    /// Cross-checks the merge hierarchy against an independent average
    /// linkage implementation on the same distance matrix.
    #[test]
    fn matches_reference_upgma() {
        for seed in [1u64, 2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pos: Vec<Vec3> = (0..25)
                .map(|_| {
                    [
                        rng.gen_range(-30.0..30.0),
                        rng.gen_range(-30.0..30.0),
                        rng.gen_range(0.0..50.0),
                    ]
                })
                .collect();
            let n = pos.len();

            let mut condensed = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    condensed.push(crate::geometry::dist(pos[i], pos[j]));
                }
            }
            let dend = kodama::linkage(&mut condensed, n, kodama::Method::Average);

            let mut ref_sets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
            for step in dend.steps() {
                let mut merged = ref_sets[step.cluster1].clone();
                merged.extend_from_slice(&ref_sets[step.cluster2]);
                merged.sort_unstable();
                ref_sets.push(merged);
            }
            // Drop the root, keep leaves + internal merges.
            ref_sets.pop();
            ref_sets.sort();

            let mut got = build_linkage_tree(&pos);
            got.sort();
            assert_eq!(got, ref_sets, "seed {seed}");
        }
    }
}
