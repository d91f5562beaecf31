//! Balanced k-leader clustering of the selection in objective space.
//!
//! Clusters overlap: each cluster takes the `ceil(2|S|/k)` solutions nearest
//! to its leader, so a solution can serve several clusters. The clusters
//! whose mean objectives are most extreme are tagged with single-objective
//! roles; the rest improve on domination.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterRole {
    ExtremeLci,
    ExtremeLsi,
    Middle,
}

/// Min-max normalization of objective pairs, frozen at clustering time so
/// population members outside the selection map consistently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveNorm {
    lo: [f64; 2],
    inv_range: [f64; 2],
}

impl ObjectiveNorm {
    fn fit(points: &[[f64; 2]]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let mut inv_range = [0.0; 2];
        for d in 0..2 {
            let r = hi[d] - lo[d];
            // Degenerate dimensions collapse to 0 and carry no distance.
            inv_range[d] = if r > 0.0 { 1.0 / r } else { 0.0 };
        }
        ObjectiveNorm { lo, inv_range }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            (p[0] - self.lo[0]) * self.inv_range[0],
            (p[1] - self.lo[1]) * self.inv_range[1],
        ]
    }

    fn is_degenerate(&self) -> bool {
        self.inv_range[0] == 0.0 && self.inv_range[1] == 0.0
    }
}

#[derive(Debug, Clone)]
pub struct ClusterAssignment {
    /// Indices into the selection, one sorted list per cluster.
    pub clusters: Vec<Vec<usize>>,
    pub roles: Vec<ClusterRole>,
    /// Cluster centroids in normalized objective space.
    pub centroids: Vec<[f64; 2]>,
    pub norm: ObjectiveNorm,
}

impl ClusterAssignment {
    /// Cluster whose centroid is nearest to an objective pair (raw scale).
    /// Ties break toward the smaller cluster index.
    pub fn nearest_cluster(&self, pair: [f64; 2]) -> usize {
        let p = self.norm.apply(pair);
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in self.centroids.iter().enumerate() {
            let dx = p[0] - centroid[0];
            let dy = p[1] - centroid[1];
            let d = dx * dx + dy * dy;
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        best
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Balanced k-leader clustering of selection objectives `(lci, lsi)`.
///
/// Leaders spread by the farthest-point heuristic starting from the best
/// LCI solution; each cluster is the `min(ceil(2m/k), m)` nearest solutions
/// to its leader. Fully degenerate objectives fall back to round-robin
/// assignment.
pub fn cluster_selection(objectives: &[[f64; 2]], k: usize) -> ClusterAssignment {
    let m = objectives.len();
    assert!(k >= 1 && m >= k, "need at least k selection members");
    let c = ((2 * m).div_ceil(k)).min(m);

    let norm = ObjectiveNorm::fit(objectives);
    let pts: Vec<[f64; 2]> = objectives.iter().map(|&p| norm.apply(p)).collect();

    let mut clusters: Vec<Vec<usize>> = vec![Vec::with_capacity(c); k];
    if norm.is_degenerate() {
        for (slot, cluster) in clusters.iter_mut().enumerate() {
            for s in 0..c {
                cluster.push((slot + s * k) % m);
            }
            cluster.sort_unstable();
        }
    } else {
        let mut leaders = Vec::with_capacity(k);
        let mut first = 0usize;
        for (i, p) in pts.iter().enumerate() {
            if p[0] > pts[first][0] {
                first = i;
            }
        }
        leaders.push(first);
        while leaders.len() < k {
            let mut best = usize::MAX;
            let mut best_d = f64::NEG_INFINITY;
            for i in 0..m {
                if leaders.contains(&i) {
                    continue;
                }
                let d = leaders
                    .iter()
                    .map(|&l| dist2(pts[i], pts[l]))
                    .fold(f64::INFINITY, f64::min);
                if d > best_d {
                    best_d = d;
                    best = i;
                }
            }
            leaders.push(best);
        }

        let mut order: Vec<usize> = (0..m).collect();
        for (cluster, &leader) in clusters.iter_mut().zip(&leaders) {
            order.sort_unstable_by(|&a, &b| {
                dist2(pts[a], pts[leader])
                    .total_cmp(&dist2(pts[b], pts[leader]))
                    .then(a.cmp(&b))
            });
            cluster.extend_from_slice(&order[..c]);
            cluster.sort_unstable();
        }
    }

    let centroids: Vec<[f64; 2]> = clusters
        .iter()
        .map(|cl| {
            let mut s = [0.0f64; 2];
            for &i in cl {
                s[0] += pts[i][0];
                s[1] += pts[i][1];
            }
            [s[0] / cl.len() as f64, s[1] / cl.len() as f64]
        })
        .collect();

    let mut roles = vec![ClusterRole::Middle; k];
    if k >= 2 {
        let mut i_lci = 0usize;
        for (i, c) in centroids.iter().enumerate() {
            if c[0] > centroids[i_lci][0] {
                i_lci = i;
            }
        }
        let mut i_lsi = usize::MAX;
        for (i, c) in centroids.iter().enumerate() {
            if i == i_lci {
                continue;
            }
            if i_lsi == usize::MAX || c[1] > centroids[i_lsi][1] {
                i_lsi = i;
            }
        }
        roles[i_lci] = ClusterRole::ExtremeLci;
        roles[i_lsi] = ClusterRole::ExtremeLsi;
    }

    ClusterAssignment {
        clusters,
        roles,
        centroids,
        norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_sizes_33_into_5() {
        let objs: Vec<[f64; 2]> = (0..33)
            .map(|i| [i as f64, 32.0 - i as f64 + 0.01 * (i as f64).sin()])
            .collect();
        let a = cluster_selection(&objs, 5);
        assert_eq!(a.clusters.len(), 5);
        for cl in &a.clusters {
            assert_eq!(cl.len(), 14);
        }
    }

    #[test]
    fn k1_contains_all_and_is_middle() {
        let objs: Vec<[f64; 2]> = (0..9).map(|i| [i as f64, -(i as f64)]).collect();
        let a = cluster_selection(&objs, 1);
        assert_eq!(a.clusters.len(), 1);
        assert_eq!(a.clusters[0], (0..9).collect::<Vec<_>>());
        assert_eq!(a.roles, vec![ClusterRole::Middle]);
    }

    #[test]
    fn extreme_roles_are_distinct_and_anchored() {
        let objs: Vec<[f64; 2]> = (0..20)
            .map(|i| {
                let t = i as f64 / 19.0;
                [t, 1.0 - t * t]
            })
            .collect();
        let a = cluster_selection(&objs, 5);
        let n_lci = a
            .roles
            .iter()
            .filter(|r| **r == ClusterRole::ExtremeLci)
            .count();
        let n_lsi = a
            .roles
            .iter()
            .filter(|r| **r == ClusterRole::ExtremeLsi)
            .count();
        assert_eq!((n_lci, n_lsi), (1, 1));
        let i_lci = a.roles.iter().position(|r| *r == ClusterRole::ExtremeLci).unwrap();
        let i_lsi = a.roles.iter().position(|r| *r == ClusterRole::ExtremeLsi).unwrap();
        // Best-LCI solution (index 19) sits in the LCI-extreme cluster,
        // best-LSI solution (index 0) in the LSI-extreme cluster.
        assert!(a.clusters[i_lci].contains(&19));
        assert!(a.clusters[i_lsi].contains(&0));
    }

    #[test]
    fn collinear_objectives_give_contiguous_segments() {
        let objs: Vec<[f64; 2]> = (0..10).map(|i| [i as f64, 9.0 - i as f64]).collect();
        let a = cluster_selection(&objs, 5);
        for cl in &a.clusters {
            assert_eq!(cl.len(), 4);
            // Members sorted ascending; contiguity means max-min+1 == len.
            assert_eq!(cl[cl.len() - 1] - cl[0] + 1, cl.len());
        }
    }

    #[test]
    fn degenerate_objectives_round_robin() {
        let objs = vec![[1.0, 2.0]; 7];
        let a = cluster_selection(&objs, 3);
        // ceil(14/3) = 5 members per cluster, all indices covered.
        for cl in &a.clusters {
            assert_eq!(cl.len(), 5);
        }
        let mut seen = [false; 7];
        for cl in &a.clusters {
            for &i in cl {
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn nearest_cluster_tie_breaks_low_index() {
        let objs: Vec<[f64; 2]> = vec![[0.0, 1.0], [1.0, 0.0]];
        let a = cluster_selection(&objs, 2);
        // Equidistant query resolves to the first cluster.
        let q = [0.5, 0.5];
        assert_eq!(a.nearest_cluster(q), 0);
    }
}
