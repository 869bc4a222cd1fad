use rand::Rng;

use super::{ReplacementSampler, UrnCount};
use crate::matrix::SquareMatrix;
use num_traits::{Float, Zero};

use crate::scalar::Scalar;

/// First realized column whose weight differed from `gamma1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightViolation {
    pub sample: u64,
    /// 1-based.
    pub column: usize,
    pub weight: f64,
}

/// Runtime check of nonnegativity, constant column weight and balance for a
/// replacement sampler, plus the empirical generating matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport<T> {
    pub samples: u64,
    pub negative_entries: u64,
    pub weight_violations: u64,
    pub first_weight_violation: Option<WeightViolation>,
    /// 1-based columns of the declared `H_n` whose weight is not `gamma2`.
    pub balance_violations: Vec<usize>,
    pub declared: SquareMatrix<T>,
    pub empirical: SquareMatrix<T>,
    pub max_abs_deviation: T,
    /// Largest `|empirical - declared| / standard error` over entries with
    /// nonzero sample variance.
    pub max_z_score: T,
}

impl<T: Scalar> AuditReport<T> {
    pub fn is_clean(&self) -> bool {
        self.negative_entries == 0 && self.weight_violations == 0 && self.balance_violations.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let status = |ok: bool| if ok { "PASS" } else { "FAIL" };
        s.push_str(&format!("samples: {}\n", self.samples));
        s.push_str(&format!(
            "{} nonnegative entries ({} negative)\n",
            status(self.negative_entries == 0),
            self.negative_entries
        ));
        s.push_str(&format!(
            "{} constant column weight ({} violations)\n",
            status(self.weight_violations == 0),
            self.weight_violations
        ));
        if let Some(v) = &self.first_weight_violation {
            s.push_str(&format!("  first: sample {} column {} weight {}\n", v.sample, v.column, v.weight));
        }
        s.push_str(&format!(
            "{} generating matrix balance ({} columns off)\n",
            status(self.balance_violations.is_empty()),
            self.balance_violations.len()
        ));
        s.push_str(&format!("max |H_emp - H|: {:.6e}\n", self.max_abs_deviation));
        s.push_str(&format!("max z-score: {:.3}\n", self.max_z_score));
        s
    }
}

/// Draws `n_samples` replacement matrices at step `n` and audits them.
pub fn assumption_audit<S, R>(sampler: &S, n: u64, n_samples: u64, rng: &mut R) -> AuditReport<S::Real>
where
    S: ReplacementSampler,
    R: Rng + ?Sized,
{
    let dim = sampler.colours();
    let gamma1 = sampler.gamma1();
    let mut sum = vec![0.0f64; dim * dim];
    let mut sum_sq = vec![0.0f64; dim * dim];
    let mut negative_entries = 0;
    let mut weight_violations = 0;
    let mut first_weight_violation = None;

    for sample in 0..n_samples {
        let r = sampler.sample_matrix(n, rng);
        for j in 0..dim {
            let mut weight = S::Count::zero();
            for k in 0..dim {
                let v = r.get(k, j);
                if v.is_negative() {
                    negative_entries += 1;
                }
                weight = weight.add(v);
                let x = v.to_f64();
                sum[k * dim + j] += x;
                sum_sq[k * dim + j] += x * x;
            }
            if !weight.approx_eq(gamma1) {
                weight_violations += 1;
                first_weight_violation.get_or_insert(WeightViolation {
                    sample,
                    column: j + 1,
                    weight: weight.to_f64(),
                });
            }
        }
    }

    let declared = sampler.generating_matrix(n);
    let gamma2 = sampler.gamma2();
    let balance_violations = (0..dim)
        .filter(|&j| {
            let w: S::Real = declared.column(j).into_iter().sum();
            (w - gamma2).abs() > S::Real::stochastic_tol()
        })
        .map(|j| j + 1)
        .collect();

    let count = n_samples.max(1) as f64;
    let mut empirical = SquareMatrix::filled(dim, S::Real::zero());
    let mut max_z = 0.0f64;
    let mut max_dev = 0.0f64;
    for k in 0..dim {
        for j in 0..dim {
            let mean = sum[k * dim + j] / count;
            empirical.set(k, j, S::Real::lit(mean));
            let dev = (mean - declared.get(k, j).as_f64()).abs();
            max_dev = max_dev.max(dev);
            if n_samples > 1 {
                let var = (sum_sq[k * dim + j] / count - mean * mean).max(0.0) * count / (count - 1.0);
                let se = (var / count).sqrt();
                if se > 0.0 {
                    max_z = max_z.max(dev / se);
                } else if dev > 0.0 {
                    max_z = f64::INFINITY;
                }
            }
        }
    }

    AuditReport {
        samples: n_samples,
        negative_entries,
        weight_violations,
        first_weight_violation,
        balance_violations,
        declared,
        empirical,
        max_abs_deviation: S::Real::lit(max_dev),
        max_z_score: S::Real::lit(max_z),
    }
}
