//! Factorized normal distributions over linkage sets.
//!
//! Per cluster and per linkage set a maximum-likelihood mean and covariance
//! is estimated from the cluster members' dwell times. Covariances that are
//! not positive definite are ridge-regularized until Cholesky succeeds, so
//! sampling is always possible (degenerate clusters just sample a point
//! mass plus numerical noise).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::cluster::ClusterRole;
use crate::evaluator::Solution;
use crate::math;

/// Normal model for one linkage set: mean and lower Cholesky factor.
#[derive(Debug, Clone)]
pub struct SetModel {
    pub mean: Vec<f64>,
    /// Row-major lower-triangular factor of the (regularized) covariance.
    chol: Vec<f64>,
    /// Ridge strength that made the covariance positive definite (0 if the
    /// ML estimate already was).
    pub lambda: f64,
}

/// Models for every linkage set, tagged with the cluster's role.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    pub role: ClusterRole,
    pub sets: Vec<SetModel>,
}

/// Estimates ML mean/covariance (divisor n) per linkage set over the given
/// cluster members and factorizes each covariance for sampling.
pub fn estimate_distributions(
    population: &[Solution],
    member_ids: &[usize],
    linkage_sets: &[Vec<usize>],
    role: ClusterRole,
) -> ClusterModel {
    assert!(!member_ids.is_empty(), "cluster must be non-empty");
    let n_mem = member_ids.len() as f64;
    let mut sets = Vec::with_capacity(linkage_sets.len());
    for set in linkage_sets {
        let m = set.len();
        let mut mean = vec![0.0f64; m];
        for &id in member_ids {
            let times = &population[id].dwell_times;
            for (j, &var) in set.iter().enumerate() {
                mean[j] += times[var];
            }
        }
        for v in mean.iter_mut() {
            *v /= n_mem;
        }

        let mut cov = vec![0.0f64; m * m];
        for &id in member_ids {
            let times = &population[id].dwell_times;
            for j in 0..m {
                let dj = times[set[j]] - mean[j];
                for l in 0..=j {
                    cov[j * m + l] += dj * (times[set[l]] - mean[l]);
                }
            }
        }
        for j in 0..m {
            for l in 0..=j {
                cov[j * m + l] /= n_mem;
                cov[l * m + j] = cov[j * m + l];
            }
        }

        let (chol, lambda) = factorize_regularized(&cov, m);
        sets.push(SetModel { mean, chol, lambda });
    }
    ClusterModel { role, sets }
}

/// Cholesky with escalating ridge: start from the ML covariance, then add
/// `1e-6 * trace / m` to the diagonal, growing tenfold (from an absolute
/// floor when the trace is zero) until the factorization succeeds.
fn factorize_regularized(cov: &[f64], m: usize) -> (Vec<f64>, f64) {
    let mut work = cov.to_vec();
    if cholesky_in_place(&mut work, m) {
        return (work, 0.0);
    }
    let trace: f64 = (0..m).map(|j| cov[j * m + j]).sum();
    let mut lambda = 1e-6 * trace / m as f64;
    loop {
        if lambda > 0.0 {
            work.copy_from_slice(cov);
            for j in 0..m {
                work[j * m + j] += lambda;
            }
            if cholesky_in_place(&mut work, m) {
                return (work, lambda);
            }
        }
        lambda = if lambda > 0.0 { lambda * 10.0 } else { 1e-12 };
        debug_assert!(lambda.is_finite());
    }
}

/// In-place lower Cholesky; returns false when a pivot is non-positive or
/// non-finite (matrix not positive definite).
fn cholesky_in_place(a: &mut [f64], m: usize) -> bool {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let dj = math::sqrt(d);
        a[j * m + j] = dj;
        for i in (j + 1)..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / dj;
        }
    }
    // Zero the strict upper triangle so the factor is exactly L.
    for j in 0..m {
        for i in (j + 1)..m {
            a[j * m + i] = 0.0;
        }
    }
    true
}

/// One standard normal via Box-Muller; draws two uniforms per call so the
/// stream layout stays independent of call parity.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let mut u1: f64 = rng.gen();
    while u1 <= 0.0 {
        u1 = rng.gen();
    }
    let u2: f64 = rng.gen();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

impl SetModel {
    /// Samples `mean + L z` into `out`, reusing `z` as scratch.
    pub fn sample_into(&self, rng: &mut ChaCha8Rng, z: &mut Vec<f64>, out: &mut Vec<f64>) {
        let m = self.mean.len();
        z.clear();
        for _ in 0..m {
            z.push(standard_normal(rng));
        }
        out.clear();
        for i in 0..m {
            let mut v = self.mean[i];
            for k in 0..=i {
                v += self.chol[i * m + k] * z[k];
            }
            out.push(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ObjectivePair;
    use alloc::vec;
    use rand::SeedableRng;

    fn sol(times: Vec<f64>) -> Solution {
        Solution {
            dwell_times: times,
            roi_dose: vec![],
            ref_dose: vec![],
            dvi_values: vec![],
            objectives: ObjectivePair::default(),
            cr_feasible: true,
        }
    }

    #[test]
    fn two_member_singleton_set_ml_variance() {
        // ML divisor n: var = ((a-mu)^2 + (b-mu)^2) / 2 = (a-b)^2 / 4.
        let pop = vec![sol(vec![1.0]), sol(vec![3.0])];
        let model = estimate_distributions(&pop, &[0, 1], &[vec![0]], ClusterRole::Middle);
        let set = &model.sets[0];
        assert!((set.mean[0] - 2.0).abs() < 1e-15);
        let var = set.chol[0] * set.chol[0];
        assert!((var - 1.0).abs() < 1e-12, "var {var}");
        assert_eq!(set.lambda, 0.0);
    }

    #[test]
    fn identical_cluster_regularizes_to_tiny_noise() {
        let pop = vec![sol(vec![0.5, 2.0]); 4];
        let model =
            estimate_distributions(&pop, &[0, 1, 2, 3], &[vec![0, 1]], ClusterRole::Middle);
        let set = &model.sets[0];
        assert!(set.lambda > 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut z, mut out) = (Vec::new(), Vec::new());
        set.sample_into(&mut rng, &mut z, &mut out);
        assert!((out[0] - 0.5).abs() < 1e-3);
        assert!((out[1] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn matches_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pop: Vec<Solution> = (0..12)
            .map(|_| sol((0..6).map(|_| rng.gen_range(0.0..5.0)).collect()))
            .collect();
        let ids: Vec<usize> = (0..12).collect();
        let set = vec![1usize, 3, 4];
        let model = estimate_distributions(&pop, &ids, &[set.clone()], ClusterRole::Middle);

        // Independent two-pass estimate.
        let m = set.len();
        let mut mean = vec![0.0; m];
        for &id in &ids {
            for (j, &v) in set.iter().enumerate() {
                mean[j] += pop[id].dwell_times[v];
            }
        }
        for v in mean.iter_mut() {
            *v /= ids.len() as f64;
        }
        let mut cov = vec![0.0; m * m];
        for &id in &ids {
            for j in 0..m {
                for l in 0..m {
                    cov[j * m + l] += (pop[id].dwell_times[set[j]] - mean[j])
                        * (pop[id].dwell_times[set[l]] - mean[l]);
                }
            }
        }
        for v in cov.iter_mut() {
            *v /= ids.len() as f64;
        }

        for j in 0..m {
            assert!((model.sets[0].mean[j] - mean[j]).abs() < 1e-12);
        }
        // Reconstruct covariance from the factor: L L^T.
        let l = &model.sets[0].chol;
        for i in 0..m {
            for j in 0..m {
                let mut v = 0.0;
                for k in 0..m {
                    v += l[i * m + k] * l[j * m + k];
                }
                assert!(
                    (v - cov[i * m + j]).abs() < 1e-12,
                    "cov[{i}][{j}] {v} vs {}",
                    cov[i * m + j]
                );
            }
        }
    }

    #[test]
    fn sampler_is_deterministic_and_centered() {
        let pop: Vec<Solution> = (0..8)
            .map(|i| sol(vec![i as f64 * 0.3, 1.0 + (i % 3) as f64 * 0.2]))
            .collect();
        let ids: Vec<usize> = (0..8).collect();
        let model = estimate_distributions(&pop, &ids, &[vec![0, 1]], ClusterRole::Middle);
        let set = &model.sets[0];

        let mut rng_a = ChaCha8Rng::seed_from_u64(5);
        let mut rng_b = ChaCha8Rng::seed_from_u64(5);
        let (mut z, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
        set.sample_into(&mut rng_a, &mut z, &mut a);
        set.sample_into(&mut rng_b, &mut z, &mut b);
        assert_eq!(a, b);

        // Empirical mean over many draws approaches the model mean.
        let mut acc = [0.0f64; 2];
        let n = 4000;
        for _ in 0..n {
            set.sample_into(&mut rng_a, &mut z, &mut a);
            acc[0] += a[0];
            acc[1] += a[1];
        }
        assert!((acc[0] / n as f64 - set.mean[0]).abs() < 0.05);
        assert!((acc[1] / n as f64 - set.mean[1]).abs() < 0.05);
    }
}
