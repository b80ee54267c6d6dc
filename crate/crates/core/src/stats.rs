//! Wilcoxon rank-sum / Mann-Whitney U test.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

/// Largest combined sample size for which [`wilcoxon_rank_sum`] uses the exact
/// null distribution (tie-free samples only).
pub const EXACT_MAX_TOTAL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    NormalApproximation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::NormalApproximation => "normal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// `U = R_a - n_a (n_a + 1) / 2`.
    pub u_statistic: f64,
    /// Sum of the (mid)ranks of the first sample.
    pub rank_sum: f64,
    pub p_two_sided: f64,
    /// One-sided p-value for "the first sample is stochastically smaller".
    pub p_less: f64,
    pub method: Method,
}

/// Two-sample rank-sum test.
///
/// Ties get midranks. The p-values are exact when the samples are tie-free and
/// `|a| + |b| <= 16`; otherwise a normal approximation with tie-corrected
/// variance and continuity correction is used.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<TestResult> {
    let ranks = Ranks::new(a, b)?;
    let method = if !ranks.has_ties && a.len() + b.len() <= EXACT_MAX_TOTAL {
        Method::Exact
    } else {
        Method::NormalApproximation
    };
    Ok(ranks.test(method))
}

/// Same test with a fixed method. The exact method rejects tied samples.
pub fn wilcoxon_rank_sum_using(a: &[f64], b: &[f64], method: Method) -> Result<TestResult> {
    let ranks = Ranks::new(a, b)?;
    if method == Method::Exact && ranks.has_ties {
        return Err(Error::param("exact rank-sum distribution requires tie-free samples"));
    }
    Ok(ranks.test(method))
}

struct Ranks {
    na: usize,
    nb: usize,
    rank_sum: f64,
    has_ties: bool,
    /// `Σ (t³ - t)` over tie groups.
    tie_term: f64,
}

impl Ranks {
    fn new(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::param("rank-sum test needs two non-empty samples"));
        }
        if a.iter().chain(b).any(|x| x.is_nan()) {
            return Err(Error::param("rank-sum test samples contain NaN"));
        }
        let mut pooled: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
        pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut rank_sum = 0.0;
        let mut tie_term = 0.0;
        let mut has_ties = false;
        let mut start = 0;
        while start < pooled.len() {
            let mut end = start + 1;
            while end < pooled.len() && pooled[end].0 == pooled[start].0 {
                end += 1;
            }
            let t = (end - start) as f64;
            if end - start > 1 {
                has_ties = true;
                tie_term += t * t * t - t;
            }
            // ranks start + 1 ..= end
            let mid = (start + 1 + end) as f64 / 2.0;
            rank_sum += mid * pooled[start..end].iter().filter(|x| x.1).count() as f64;
            start = end;
        }
        Ok(Self {
            na: a.len(),
            nb: b.len(),
            rank_sum,
            has_ties,
            tie_term,
        })
    }

    fn test(&self, method: Method) -> TestResult {
        let (na, nb) = (self.na as f64, self.nb as f64);
        let u = self.rank_sum - na * (na + 1.0) / 2.0;
        let (p_two_sided, p_less) = match method {
            Method::Exact => exact_p(self.na, self.nb, u.round() as usize),
            Method::NormalApproximation => {
                let n = na + nb;
                let mean = na * nb / 2.0;
                let var = na * nb / 12.0 * ((n + 1.0) - self.tie_term / (n * (n - 1.0)));
                if var <= 0.0 {
                    (1.0, 1.0)
                } else {
                    let sd = var.sqrt();
                    let normal = Normal::standard();
                    let z_two = ((u - mean).abs() - 0.5).max(0.0) / sd;
                    let z_less = (u - mean + 0.5) / sd;
                    ((2.0 * normal.sf(z_two)).min(1.0), normal.cdf(z_less))
                }
            }
        };
        TestResult {
            u_statistic: u,
            rank_sum: self.rank_sum,
            p_two_sided,
            p_less,
            method,
        }
    }
}

/// Number of rank assignments giving each value of U, for `na` and `nb`
/// observations without ties.
///
/// The largest pooled observation either belongs to the first sample (adding
/// `nb` to U) or to the second, which gives
/// `N(na, nb, u) = N(na - 1, nb, u - nb) + N(na, nb - 1, u)`.
pub fn u_null_counts(na: usize, nb: usize) -> Vec<u128> {
    // table[j][u] holds N(i, j, u) for the current i
    let max_u = na * nb;
    let mut prev: Vec<Vec<u128>> = (0..=nb).map(|_| vec![0; max_u + 1]).collect();
    for row in prev.iter_mut() {
        row[0] = 1;
    }
    for i in 1..=na {
        let mut cur: Vec<Vec<u128>> = (0..=nb).map(|_| vec![0; max_u + 1]).collect();
        cur[0][0] = 1;
        for j in 1..=nb {
            for u in 0..=i * j {
                let from_a = if u >= j { prev[j][u - j] } else { 0 };
                cur[j][u] = from_a + cur[j - 1][u];
            }
        }
        prev = cur;
    }
    prev.swap_remove(nb)
}

fn exact_p(na: usize, nb: usize, u: usize) -> (f64, f64) {
    let counts = u_null_counts(na, nb);
    let total: u128 = counts.iter().sum();
    let lower: u128 = counts[..=u].iter().sum();
    let upper: u128 = counts[u..].iter().sum();
    let p_less = lower as f64 / total as f64;
    let p_two = (2.0 * lower.min(upper) as f64 / total as f64).min(1.0);
    (p_two, p_less)
}
