use std::collections::HashMap;
use std::fmt;

use crate::degree::{canonical_cmp, GeneralizedDegree};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Empirical,
    TheoreticalPerturbed,
    TheoreticalUnperturbed,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Empirical => "empirical",
            Provenance::TheoreticalPerturbed => "theoretical_perturbed",
            Provenance::TheoreticalUnperturbed => "theoretical_unperturbed",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sparse probability mass over generalized degrees.
///
/// Theoretical distributions cover every `d` with `s(d) <= max_weight`;
/// anything absent has mass zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution<T> {
    num_types: usize,
    masses: HashMap<GeneralizedDegree, T>,
    provenance: Provenance,
    max_weight: Option<u64>,
}

impl<T: Scalar> DegreeDistribution<T> {
    pub fn new(num_types: usize, provenance: Provenance, max_weight: Option<u64>) -> Self {
        DegreeDistribution { num_types, masses: HashMap::new(), provenance, max_weight }
    }

    pub fn from_masses(
        num_types: usize,
        provenance: Provenance,
        masses: impl IntoIterator<Item = (GeneralizedDegree, T)>,
    ) -> Self {
        let mut dist = Self::new(num_types, provenance, None);
        for (d, m) in masses {
            dist.insert(d, m);
        }
        dist
    }

    pub fn insert(&mut self, d: GeneralizedDegree, mass: T) {
        debug_assert_eq!(d.num_types(), self.num_types);
        self.masses.insert(d, mass);
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Truncation weight of a theoretical distribution.
    pub fn max_weight(&self) -> Option<u64> {
        self.max_weight
    }

    pub fn mass(&self, d: &[u32]) -> T {
        self.masses.get(d).copied().unwrap_or_else(T::zero)
    }

    pub fn contains(&self, d: &[u32]) -> bool {
        self.masses.contains_key(d)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GeneralizedDegree, T)> {
        self.masses.iter().map(|(d, &m)| (d, m))
    }

    /// Entries ordered by weight, then lexicographically.
    pub fn sorted_entries(&self) -> Vec<(&GeneralizedDegree, T)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| canonical_cmp(a.0.as_slice(), b.0.as_slice()));
        v
    }

    pub fn total_mass(&self) -> T {
        // Summed in canonical order so the result does not depend on hash order.
        self.sorted_entries().into_iter().map(|(_, m)| m).sum()
    }

    /// Mass carried by degrees of weight at most `cutoff`.
    pub fn mass_up_to(&self, cutoff: u64) -> T {
        self.sorted_entries().into_iter().filter(|(d, _)| d.weight() <= cutoff).map(|(_, m)| m).sum()
    }

    /// `out[w]` is the total mass on degrees of weight exactly `w`.
    pub fn weight_marginal(&self) -> Vec<T> {
        let max = self.masses.keys().map(|d| d.weight()).max().unwrap_or(0) as usize;
        let mut out = vec![T::zero(); max + 1];
        for (d, m) in self.sorted_entries() {
            out[d.weight() as usize] = out[d.weight() as usize] + m;
        }
        out
    }

    /// `out[k] = sum over s(d) <= k`.
    pub fn partial_sums(&self) -> Vec<T> {
        let mut acc = T::zero();
        self.weight_marginal()
            .into_iter()
            .map(|m| {
                acc = acc + m;
                acc
            })
            .collect()
    }

    pub fn cast<U: Scalar>(&self) -> DegreeDistribution<U> {
        DegreeDistribution {
            num_types: self.num_types,
            masses: self.masses.iter().map(|(d, &m)| (d.clone(), U::lit(m.as_f64()))).collect(),
            provenance: self.provenance,
            max_weight: self.max_weight,
        }
    }
}
