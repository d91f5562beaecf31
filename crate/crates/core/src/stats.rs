//! Statistical tests for run comparisons: Shapiro-Wilk normality, the
//! Wilcoxon signed-rank test with tie and continuity corrections, and
//! Holm-Bonferroni multiple-testing control.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;

#[cfg(test)]
mod fixtures;

/// Outcome of a single hypothesis test. `reject` stays `None` until a
/// multiple-testing pass assigns decisions under the corrected level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatTestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Sample size actually entering the test (zero differences dropped for
    /// the signed-rank test).
    pub n_effective: usize,
    pub reject: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatError {
    /// Sample size outside the supported range.
    SampleSize { n: usize },
    /// Zero sample variance; the statistic is undefined.
    ConstantSample,
    LengthMismatch { a: usize, b: usize },
}

impl core::fmt::Display for StatError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StatError::SampleSize { n } => write!(f, "unsupported sample size {n}"),
            StatError::ConstantSample => write!(f, "constant sample, statistic undefined"),
            StatError::LengthMismatch { a, b } => {
                write!(f, "paired samples differ in length: {a} vs {b}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for StatError {}

const SQRT_2PI: f64 = 2.506628274631000502;

/// Upper-tail standard normal probability.
fn normal_sf(z: f64) -> f64 {
    0.5 * math::erfc(z / core::f64::consts::SQRT_2)
}

/// Standard normal quantile: rational initial estimate polished by two
/// Halley steps on the erfc-based CDF, accurate to a few ulps on (0, 1).
fn norm_ppf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail(math::sqrt(-2.0 * math::ln(p)))
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(math::sqrt(-2.0 * math::ln(1.0 - p)))
    };
    for _ in 0..2 {
        let err = 0.5 * math::erfc(-x / core::f64::consts::SQRT_2) - p;
        let u = err * SQRT_2PI * math::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

fn poly(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &coef in c.iter().rev() {
        acc = acc * x + coef;
    }
    acc
}

/// Shapiro-Wilk W test for normality, 3 <= n <= 5000, using the published
/// approximation for the coefficients and the size-regime log-normal
/// transforms for the p-value (exact arcsine form at n = 3).
pub fn shapiro_wilk(sample: &[f64]) -> Result<StatTestResult, StatError> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    const G: [f64; 2] = [-2.273, 0.459];

    let n = sample.len();
    if !(3..=5000).contains(&n) {
        return Err(StatError::SampleSize { n });
    }
    let mut x = sample.to_vec();
    x.sort_unstable_by(f64::total_cmp);
    if x[n - 1] == x[0] {
        return Err(StatError::ConstantSample);
    }

    let an = n as f64;
    let n2 = n / 2;
    // Upper-half coefficients; the full vector is antisymmetric.
    let mut a = vec![0.0f64; n2];
    if n == 3 {
        a[0] = core::f64::consts::FRAC_1_SQRT_2;
    } else {
        let an25 = an + 0.25;
        let mut summ2 = 0.0;
        for (i, ai) in a.iter_mut().enumerate() {
            *ai = norm_ppf(((i + 1) as f64 - 0.375) / an25);
            summ2 += *ai * *ai;
        }
        summ2 *= 2.0;
        let ssumm2 = math::sqrt(summ2);
        let rsn = 1.0 / math::sqrt(an);
        let a1 = poly(&C1, rsn) - a[0] / ssumm2;
        let (i1, fac) = if n > 5 {
            let a2 = -a[1] / ssumm2 + poly(&C2, rsn);
            let fac = math::sqrt(
                (summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1])
                    / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2),
            );
            a[1] = a2;
            (2usize, fac)
        } else {
            let fac = math::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
            (1usize, fac)
        };
        a[0] = a1;
        for ai in a.iter_mut().skip(i1) {
            *ai = -*ai / fac;
        }
    }

    // W is the squared correlation between the sorted, range-scaled data
    // and the coefficient vector.
    let coef = |i: usize| {
        let j = n - 1 - i;
        if i < j {
            -a[i]
        } else if i > j {
            a[j]
        } else {
            0.0
        }
    };
    let range = x[n - 1] - x[0];
    let mut sx = 0.0;
    let mut sa = 0.0;
    for (i, xi) in x.iter().enumerate() {
        sx += xi / range;
        sa += coef(i);
    }
    sx /= an;
    sa /= an;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, xi) in x.iter().enumerate() {
        let asa = coef(i) - sa;
        let xsx = xi / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    let ssassx = math::sqrt(ssa * ssx);
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    let p = if n == 3 {
        let pi6 = 6.0 / core::f64::consts::PI;
        let stqr = math::asin(math::sqrt(0.75));
        (pi6 * (math::asin(math::sqrt(w)) - stqr)).clamp(0.0, 1.0)
    } else if w1 <= 0.0 {
        1.0
    } else {
        let y = math::ln(w1);
        let (m, s, y) = if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                // W so small the transform leaves its domain: report the
                // strongest possible rejection.
                return Ok(StatTestResult {
                    statistic: w,
                    p_value: 0.0,
                    n_effective: n,
                    reject: None,
                });
            }
            (
                poly(&C3, an),
                math::exp(poly(&C4, an)),
                -math::ln(gamma - y),
            )
        } else {
            let ln_n = math::ln(an);
            (poly(&C5, ln_n), math::exp(poly(&C6, ln_n)), y)
        };
        normal_sf((y - m) / s).clamp(0.0, 1.0)
    };
    Ok(StatTestResult {
        statistic: w,
        p_value: p,
        n_effective: n,
        reject: None,
    })
}

/// Positive-rank sum, effective size, and tie-corrected variance of the
/// signed-rank statistic over the nonzero paired differences.
fn signed_rank_parts(a: &[f64], b: &[f64]) -> Result<(f64, usize, f64), StatError> {
    if a.len() != b.len() {
        return Err(StatError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Err(StatError::SampleSize { n: 0 });
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok((0.0, 0, 0.0));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));

    let nf = n as f64;
    let mut r_plus = 0.0;
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && diffs[order[end]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        // Midrank shared by the tie group [start, end).
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            if diffs[i] > 0.0 {
                r_plus += rank;
            }
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    Ok((r_plus, n, var))
}

/// Two-sided Wilcoxon signed-rank test via the normal approximation: zero
/// differences dropped, midranks for tied magnitudes, tie-corrected
/// variance, and 0.5/sigma subtracted from the z-score as a continuity
/// correction. All-zero differences give p = 1 by convention.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<StatTestResult, StatError> {
    let (r_plus, n, var) = signed_rank_parts(a, b)?;
    if n == 0 {
        return Ok(StatTestResult {
            statistic: 0.0,
            p_value: 1.0,
            n_effective: 0,
            reject: None,
        });
    }
    let mean = n as f64 * (n as f64 + 1.0) / 4.0;
    let sigma = math::sqrt(var);
    let mut d = r_plus - mean;
    // signum(0.0) is 0, so a centered statistic stays centered.
    d -= 0.5 * d.signum();
    let z = d / sigma;
    let p = (2.0 * normal_sf(z.abs())).min(1.0);
    Ok(StatTestResult {
        statistic: r_plus,
        p_value: p,
        n_effective: n,
        reject: None,
    })
}

/// Holm-Bonferroni step-down decisions at level `alpha`, returned in the
/// input order: ascending p-values are rejected while
/// p_(i) <= alpha / (m - i + 1), stopping at the first failure.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Vec<bool> {
    debug_assert!(p_values.iter().all(|p| (0.0..=1.0).contains(p)));
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_unstable_by(|&i, &j| p_values[i].total_cmp(&p_values[j]));
    let mut reject = vec![false; m];
    for (rank, &i) in order.iter().enumerate() {
        if p_values[i] <= alpha / (m - rank) as f64 {
            reject[i] = true;
        } else {
            break;
        }
    }
    reject
}
