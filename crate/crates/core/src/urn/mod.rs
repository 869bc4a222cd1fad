//! Generalized urn with `M` draws (with replacement) per step.
//!
//! Each step draws `M` colours from the start-of-step composition, samples
//! one replacement matrix per draw, and adds the drawn colour's column:
//! `C_{n+1} = C_n + sum_i R^{(i)} chi^{(i)}`.

mod audit;
mod sampler;

use rand::Rng;
use thiserror::Error;

use crate::scalar::Scalar;

pub use audit::{assumption_audit, AuditReport, WeightViolation};
pub use sampler::{bernoulli_column_sampler, BernoulliColumnSampler, ReplacementSampler};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UrnError {
    #[error("initial composition has no balls")]
    EmptyUrn,
    #[error("colour {0} has a negative count")]
    NegativeCount(usize),
    #[error("draws per step must be positive")]
    ZeroDraws,
    #[error("composition has {composition} colours but the sampler has {sampler}")]
    ColourMismatch { composition: usize, sampler: usize },
    #[error("replacement sampler: {0}")]
    BadMatrix(#[from] crate::matrix::MatrixError),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

/// Ball count: exact integers, or reals for fractional replacement schemes.
pub trait UrnCount: Copy + PartialOrd + std::fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, k: u64) -> Self;
    fn to_f64(self) -> f64;
    fn is_negative(self) -> bool;
    /// Exact for integers, relative tolerance `1e-9` for reals.
    fn approx_eq(self, other: Self) -> bool;
    /// Draws colour `j` with probability `counts[j] / total`.
    fn draw<R: Rng + ?Sized>(counts: &[Self], total: Self, rng: &mut R) -> usize;
}

impl UrnCount for u64 {
    fn zero() -> Self {
        0
    }

    fn one() -> Self {
        1
    }

    fn add(self, other: Self) -> Self {
        self + other
    }

    fn scale(self, k: u64) -> Self {
        self * k
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn is_negative(self) -> bool {
        false
    }

    fn approx_eq(self, other: Self) -> bool {
        self == other
    }

    fn draw<R: Rng + ?Sized>(counts: &[Self], total: Self, rng: &mut R) -> usize {
        let mut pick = rng.random_range(0..total);
        for (j, &c) in counts.iter().enumerate() {
            if pick < c {
                return j;
            }
            pick -= c;
        }
        unreachable!("pick < total")
    }
}

macro_rules! real_count {
    ($t:ty) => {
        impl UrnCount for $t {
            fn zero() -> Self {
                0.0
            }

            fn one() -> Self {
                1.0
            }

            fn add(self, other: Self) -> Self {
                self + other
            }

            fn scale(self, k: u64) -> Self {
                self * k as $t
            }

            fn to_f64(self) -> f64 {
                self as f64
            }

            fn is_negative(self) -> bool {
                self < 0.0
            }

            fn approx_eq(self, other: Self) -> bool {
                let scale = 1.0f64.max((self as f64).abs()).max((other as f64).abs());
                ((self - other) as f64).abs() <= 1e-9 * scale
            }

            fn draw<R: Rng + ?Sized>(counts: &[Self], total: Self, rng: &mut R) -> usize {
                let u = rng.random::<f64>() * total as f64;
                let mut acc = 0.0f64;
                for (j, &c) in counts.iter().enumerate() {
                    acc += c as f64;
                    if u < acc {
                        return j;
                    }
                }
                counts.iter().rposition(|&c| c > 0.0).unwrap_or(counts.len() - 1)
            }
        }
    };
}

real_count!(f64);
real_count!(f32);

/// Composition `C_n` of the urn after `n` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnState<C> {
    composition: Vec<C>,
    draws: usize,
    gamma1: C,
    step: u64,
    initial_total: C,
}

/// Composition and its normalization after `n` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnSnapshot<C, T> {
    pub n: u64,
    pub counts: Vec<C>,
    pub fractions: Vec<T>,
}

impl<C: UrnCount> UrnState<C> {
    pub fn new<S>(initial: Vec<C>, draws: usize, sampler: &S) -> Result<Self, UrnError>
    where
        S: ReplacementSampler<Count = C>,
    {
        if initial.len() != sampler.colours() {
            return Err(UrnError::ColourMismatch { composition: initial.len(), sampler: sampler.colours() });
        }
        if let Some(j) = initial.iter().position(|c| c.is_negative()) {
            return Err(UrnError::NegativeCount(j + 1));
        }
        if draws == 0 {
            return Err(UrnError::ZeroDraws);
        }
        let total = sum(&initial);
        if !(total > C::zero()) {
            return Err(UrnError::EmptyUrn);
        }
        Ok(UrnState { composition: initial, draws, gamma1: sampler.gamma1(), step: 0, initial_total: total })
    }

    pub fn composition(&self) -> &[C] {
        &self.composition
    }

    pub fn draws_per_step(&self) -> usize {
        self.draws
    }

    pub fn gamma1(&self) -> C {
        self.gamma1
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn total(&self) -> C {
        sum(&self.composition)
    }

    pub fn fractions<T: Scalar>(&self) -> Vec<T> {
        let total = self.total().to_f64();
        self.composition.iter().map(|c| T::lit(c.to_f64() / total)).collect()
    }

    /// One step of the urn dynamics with `n = step_index + 1`.
    pub fn step<S, R>(&mut self, sampler: &S, rng: &mut R) -> Result<(), UrnError>
    where
        S: ReplacementSampler<Count = C>,
        R: Rng + ?Sized,
    {
        let colours = self.composition.len();
        if sampler.colours() != colours {
            return Err(UrnError::ColourMismatch { composition: colours, sampler: sampler.colours() });
        }
        let n = self.step + 1;
        let total = self.total();
        let mut added = vec![C::zero(); colours];
        let mut column = vec![C::zero(); colours];
        for _ in 0..self.draws {
            let drawn = C::draw(&self.composition, total, rng);
            sampler.sample_column(n, drawn, rng, &mut column);
            for (a, &c) in added.iter_mut().zip(&column) {
                *a = a.add(c);
            }
        }
        for (c, a) in self.composition.iter_mut().zip(added) {
            *c = c.add(a);
        }
        self.step = n;
        Ok(())
    }

    /// Runs `n_steps` steps, recording the initial state, every
    /// `snapshot_every`-th step, and the final state.
    pub fn run<S, R>(
        &mut self,
        sampler: &S,
        n_steps: u64,
        snapshot_every: u64,
        rng: &mut R,
    ) -> Result<Vec<UrnSnapshot<C, S::Real>>, UrnError>
    where
        S: ReplacementSampler<Count = C>,
        R: Rng + ?Sized,
    {
        let mut out = vec![self.snapshot()];
        for i in 1..=n_steps {
            self.step(sampler, rng)?;
            if i == n_steps || (snapshot_every > 0 && i % snapshot_every == 0) {
                out.push(self.snapshot());
            }
        }
        Ok(out)
    }

    pub fn snapshot<T: Scalar>(&self) -> UrnSnapshot<C, T> {
        UrnSnapshot { n: self.step, counts: self.composition.clone(), fractions: self.fractions() }
    }

    /// `s(C_n) = s(C_0) + gamma1 M n`, and no coordinate is negative.
    pub fn check_conservation(&self) -> Result<(), UrnError> {
        let expected = self.initial_total.add(self.gamma1.scale(self.draws as u64 * self.step));
        let total = self.total();
        if !total.approx_eq(expected) {
            return Err(UrnError::InvariantViolated(format!("s(C_n) = {total:?}, expected {expected:?}")));
        }
        if let Some(j) = self.composition.iter().position(|c| c.is_negative()) {
            return Err(UrnError::InvariantViolated(format!("colour {} negative", j + 1)));
        }
        Ok(())
    }
}

fn sum<C: UrnCount>(v: &[C]) -> C {
    v.iter().fold(C::zero(), |acc, &c| acc.add(c))
}
