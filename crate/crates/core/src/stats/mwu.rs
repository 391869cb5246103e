//! Mann-Whitney U test.

use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::rank::{midranks, tie_groups};
use crate::rng::tagged_stream;

/// Largest combined sample size for which the exact null distribution is used.
pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwuMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwuResult {
    /// U of the first sample: pairs (a, b) with a > b, ties counting one half.
    pub u: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
    pub method: MwuMethod,
}

/// Number of arrangements giving each U value, for sample sizes `m` and `n`
/// without ties. Index `u` runs over `0..=m*n`.
pub fn exact_u_counts(m: usize, n: usize) -> Vec<f64> {
    // f(u; m, n) = f(u - n; m - 1, n) + f(u; m, n - 1)
    let mut table: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n + 1]; m + 1];
    for i in 0..=m {
        for j in 0..=n {
            let mut row = vec![0.0; i * j + 1];
            if i == 0 || j == 0 {
                row[0] = 1.0;
            } else {
                for (u, slot) in row.iter_mut().enumerate() {
                    let a = if u >= j {
                        table[i - 1][j].get(u - j).copied().unwrap_or(0.0)
                    } else {
                        0.0
                    };
                    let b = table[i][j - 1].get(u).copied().unwrap_or(0.0);
                    *slot = a + b;
                }
            }
            table[i][j] = row;
        }
    }
    std::mem::take(&mut table[m][n])
}

/// Two-sided exact p-value: twice the smaller tail, capped at 1.
pub fn exact_p_value(u: f64, m: usize, n: usize) -> f64 {
    let counts = exact_u_counts(m, n);
    let total: f64 = counts.iter().sum();
    let u = u.round() as usize;
    let lower: f64 = counts[..=u].iter().sum();
    let upper: f64 = counts[u..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Normal approximation with tie-corrected variance and continuity correction.
pub fn normal_p_value(u: f64, n1: usize, n2: usize, ties: &[usize]) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;
    let mean = a * b / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
    let var = a * b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * normal.sf(z)).min(1.0)
}

/// Mann-Whitney U test of `a` against `b`.
///
/// The exact null distribution is used when the samples are tie-free and
/// `n1 + n2 <= 12`; otherwise the normal approximation.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> MwuResult {
    assert!(
        !a.is_empty() && !b.is_empty(),
        "both samples must be nonempty"
    );
    let (n1, n2) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let ties = tie_groups(&pooled);
    let (p_value, method) = if ties.is_empty() && n1 + n2 <= EXACT_MAX_N {
        (exact_p_value(u, n1, n2), MwuMethod::Exact)
    } else {
        (normal_p_value(u, n1, n2, &ties), MwuMethod::NormalApprox)
    };
    MwuResult {
        u,
        p_value,
        n1,
        n2,
        method,
    }
}

/// Share of `sims` simulated studies in which the test rejects at `alpha`,
/// drawing both groups from normals with standard deviation `sd` and the
/// first group's mean shifted by `shift`.
pub fn simulated_power(
    n1: usize,
    n2: usize,
    shift: f64,
    sd: f64,
    alpha: f64,
    sims: usize,
    seed: u64,
) -> f64 {
    assert!(sd > 0.0 && sims > 0, "positive sd and simulation count");
    let normal = rand_distr::Normal::new(0.0, sd).expect("valid normal");
    let rejected = (0..sims)
        .filter(|&i| {
            let mut rng = tagged_stream(seed, "mwu-power", i as u64);
            let a: Vec<f64> = (0..n1).map(|_| shift + normal.sample(&mut rng)).collect();
            let b: Vec<f64> = (0..n2).map(|_| normal.sample(&mut rng)).collect();
            mann_whitney_u(&a, &b).p_value < alpha
        })
        .count();
    rejected as f64 / sims as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_separated_pair() {
        let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(r.u, 0.0);
        assert_eq!(r.method, MwuMethod::Exact);
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 3.0, 3.0, 5.0];
        let r = mann_whitney_u(&a, &a);
        assert_eq!(r.u, 12.5);
        assert_eq!(r.method, MwuMethod::NormalApprox);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn counts_sum_to_binomial() {
        let c = exact_u_counts(4, 5);
        assert_eq!(c.len(), 21);
        assert_eq!(c.iter().sum::<f64>(), 126.0);
        // symmetric around m n / 2
        for u in 0..=20 {
            assert_eq!(c[u], c[20 - u]);
        }
    }

    #[test]
    fn all_tied_is_not_significant() {
        let r = mann_whitney_u(&[1.0; 8], &[1.0; 9]);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn power_grows_with_shift() {
        let null = simulated_power(20, 20, 0.0, 1.0, 0.05, 400, 1);
        let small = simulated_power(20, 20, 0.5, 1.0, 0.05, 400, 1);
        let large = simulated_power(20, 20, 1.5, 1.0, 0.05, 400, 1);
        assert!(null < 0.1);
        assert!(null < small && small < large);
        assert!(large > 0.95);
    }
}
