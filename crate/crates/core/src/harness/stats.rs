//! Distances and goodness-of-fit helpers used by the comparisons.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::degree::GeneralizedDegree;
use crate::distribution::DegreeDistribution;
use crate::scalar::Scalar;

/// `(1/2) sum_{s(d) <= K} |p(d) - q(d)|` over the union of both supports,
/// summed in canonical degree order so the result is reproducible.
pub fn tv_distance<T: Scalar>(p: &DegreeDistribution<T>, q: &DegreeDistribution<T>, cutoff: u64) -> T {
    let mut support: Vec<&GeneralizedDegree> =
        p.iter().chain(q.iter()).map(|(d, _)| d).filter(|d| d.weight() <= cutoff).collect();
    support.sort_by(|a, b| a.canonical_cmp(b));
    support.dedup();
    let total: T = support.into_iter().map(|d| (p.mass(d.as_slice()) - q.mass(d.as_slice())).abs()).sum();
    (total * T::lit(0.5)).min(T::one())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Kolmogorov survival function `Q(lambda) = 2 sum_j (-1)^{j-1} exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let sq = effective_n.sqrt();
    kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)
}

/// One-sample KS test of `samples` against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let c = cdf(x);
        d = d.max((i as f64 + 1.0) / n - c).max(c - i as f64 / n);
    }
    KsResult { statistic: d, p_value: ks_p_value(d, n) }
}

/// Two-sample KS test; ties are handled by advancing both samples together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    xb.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    KsResult { statistic: d, p_value: ks_p_value(d, na * nb / (na + nb)) }
}

/// Large-sample critical value `c(alpha) sqrt((n+m)/(n m))` of the two-sample test.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `observed` counts against cell probabilities
/// `expected` (which should sum to one over the given cells).
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2, "need at least two cells");
    let total: u64 = observed.iter().sum();
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e) * (o as f64 - e) / e
        })
        .sum();
    let df = observed.len() - 1;
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    ChiSquareResult { statistic, df, p_value: 1.0 - dist.cdf(statistic) }
}
