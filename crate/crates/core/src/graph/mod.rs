//! Simulation of the perturbed multi-type preferential attachment graph.
//!
//! Each step adds one vertex with `M` edges. Endpoints are drawn with
//! probability proportional to degree, each edge takes the type of a
//! uniformly chosen edge already incident to its endpoint, and the type is
//! then flipped according to the current perturbation matrix `F_n`. All
//! draws within a step see the graph as it was at the end of the previous
//! step; bookkeeping is applied once every edge of the step is decided.

mod schedule;
mod seed;

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::degree::GeneralizedDegree;
use crate::distribution::{DegreeDistribution, Provenance};
use crate::sampling::{categorical, is_probability_vector};
use crate::scalar::Scalar;

pub use schedule::{PerturbationSchedule, ScheduleKind};
pub use seed::{SeedGraphSpec, TypedEdge};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    /// Type is 1-based.
    #[error("seed graph has no edge of type {0}")]
    MissingType(usize),
    #[error("seed graph contains a loop at vertex {0}")]
    LoopEdge(u32),
    #[error("seed graph has no vertices")]
    EmptyGraph,
    #[error("graph has no edges to attach to")]
    EmptyPool,
    #[error("vertex {0} has no incident edges")]
    IsolatedEndpoint(u32),
    #[error("perturbation row is not a probability vector")]
    BadRow,
    #[error("vertex {vertex} out of range for {num_vertices} vertices")]
    VertexOutOfRange { vertex: u32, num_vertices: usize },
    /// Type is 1-based.
    #[error("edge type {edge_type} out of range for {num_types} types")]
    TypeOutOfRange { edge_type: usize, num_types: usize },
    #[error("schedule has {schedule} types but the graph has {graph}")]
    TypeCountMismatch { graph: usize, schedule: usize },
    #[error("edges per step must be positive")]
    ZeroEdgesPerStep,
    #[error("seed graph line {line}: {message}")]
    SeedSyntax { line: usize, message: String },
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

/// Mutable state of the multi-type multigraph.
#[derive(Debug, Clone)]
pub struct TypedGraph {
    num_types: usize,
    edges_per_step: usize,
    num_vertices: usize,
    edges: Vec<TypedEdge>,
    /// Both endpoints of every edge; a uniform entry is a degree-biased vertex.
    endpoint_pool: Vec<u32>,
    /// Row-major `num_vertices x num_types` degree table.
    degrees: Vec<u32>,
    census: HashMap<GeneralizedDegree, u64>,
    type_counts: Vec<u64>,
    step: u64,
    initial_edges: u64,
    initial_vertices: u64,
}

/// One snapshot of a run: edge-type proportions and normalized census.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub n: u64,
    pub psi: Vec<T>,
    pub distribution: DegreeDistribution<T>,
}

impl TypedGraph {
    pub fn new(seed: &SeedGraphSpec, edges_per_step: usize) -> Result<Self, GraphError> {
        if seed.num_vertices == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if edges_per_step == 0 {
            return Err(GraphError::ZeroEdgesPerStep);
        }
        let n_types = seed.num_types;
        let mut degrees = vec![0u32; seed.num_vertices * n_types];
        let mut type_counts = vec![0u64; n_types];
        let mut endpoint_pool = Vec::with_capacity(2 * seed.edges.len());
        for e in &seed.edges {
            for v in [e.a, e.b] {
                if v as usize >= seed.num_vertices {
                    return Err(GraphError::VertexOutOfRange { vertex: v, num_vertices: seed.num_vertices });
                }
            }
            if e.edge_type >= n_types {
                return Err(GraphError::TypeOutOfRange { edge_type: e.edge_type + 1, num_types: n_types });
            }
            if e.a == e.b {
                return Err(GraphError::LoopEdge(e.a));
            }
            degrees[e.a as usize * n_types + e.edge_type] += 1;
            degrees[e.b as usize * n_types + e.edge_type] += 1;
            type_counts[e.edge_type] += 1;
            endpoint_pool.extend([e.a, e.b]);
        }
        if let Some(l) = type_counts.iter().position(|&c| c == 0) {
            return Err(GraphError::MissingType(l + 1));
        }
        let mut census = HashMap::new();
        for v in 0..seed.num_vertices {
            let d = GeneralizedDegree::from(&degrees[v * n_types..(v + 1) * n_types]);
            *census.entry(d).or_insert(0) += 1;
        }
        Ok(TypedGraph {
            num_types: n_types,
            edges_per_step,
            num_vertices: seed.num_vertices,
            edges: seed.edges.clone(),
            endpoint_pool,
            degrees,
            census,
            type_counts,
            step: 0,
            initial_edges: seed.edges.len() as u64,
            initial_vertices: seed.num_vertices as u64,
        })
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn edges_per_step(&self) -> usize {
        self.edges_per_step
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn edges(&self) -> &[TypedEdge] {
        &self.edges
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn initial_edges(&self) -> u64 {
        self.initial_edges
    }

    /// `|E_n^{(l)}|` for every type.
    pub fn type_counts(&self) -> &[u64] {
        &self.type_counts
    }

    /// `X_n(d)`: number of vertices per generalized degree.
    pub fn census(&self) -> &HashMap<GeneralizedDegree, u64> {
        &self.census
    }

    pub fn degree(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.degrees[v * self.num_types..(v + 1) * self.num_types]
    }

    pub fn endpoint_pool(&self) -> &[u32] {
        &self.endpoint_pool
    }

    /// Draws a vertex with probability `s(deg(v)) / (2|E|)`.
    pub fn sample_endpoint<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u32, GraphError> {
        if self.endpoint_pool.is_empty() {
            return Err(GraphError::EmptyPool);
        }
        Ok(self.endpoint_pool[rng.random_range(0..self.endpoint_pool.len())])
    }

    /// Draws type `l` with probability `deg^{(l)}(v) / s(deg(v))` by picking
    /// a uniform incident edge of `v` and reading its type.
    pub fn assign_initial_type<R: Rng + ?Sized>(&self, v: u32, rng: &mut R) -> Result<usize, GraphError> {
        if v as usize >= self.num_vertices {
            return Err(GraphError::VertexOutOfRange { vertex: v, num_vertices: self.num_vertices });
        }
        let deg = self.degree(v);
        let total: u64 = deg.iter().map(|&c| c as u64).sum();
        if total == 0 {
            return Err(GraphError::IsolatedEndpoint(v));
        }
        let mut pick = rng.random_range(0..total);
        for (l, &c) in deg.iter().enumerate() {
            if pick < c as u64 {
                return Ok(l);
            }
            pick -= c as u64;
        }
        unreachable!("pick < total")
    }

    /// Applies one growth step using `F_n` from `schedule` with `n = step_index + 1`.
    pub fn pa_step<T: Scalar, R: Rng + ?Sized>(
        &mut self,
        schedule: &PerturbationSchedule<T>,
        rng: &mut R,
    ) -> Result<(), GraphError> {
        if schedule.num_types() != self.num_types {
            return Err(GraphError::TypeCountMismatch { graph: self.num_types, schedule: schedule.num_types() });
        }
        let n = self.step + 1;
        let f_n = schedule.at(n);

        // Decide every edge against the frozen state first.
        let mut new_edges: Vec<(u32, usize)> = Vec::with_capacity(self.edges_per_step);
        for _ in 0..self.edges_per_step {
            let endpoint = self.sample_endpoint(rng)?;
            let initial = self.assign_initial_type(endpoint, rng)?;
            let flipped = categorical(f_n.row(initial), rng);
            new_edges.push((endpoint, flipped));
        }
        self.commit_step(&new_edges);
        Ok(())
    }

    fn commit_step(&mut self, new_edges: &[(u32, usize)]) {
        let n_types = self.num_types;
        let newcomer = self.num_vertices as u32;

        // Old endpoints: move each touched vertex out of its census class once.
        let mut touched: Vec<u32> = new_edges.iter().map(|&(v, _)| v).collect();
        touched.sort_unstable();
        touched.dedup();
        for &v in &touched {
            self.census_remove(v);
        }
        let mut newcomer_degree = vec![0u32; n_types];
        for &(v, l) in new_edges {
            self.degrees[v as usize * n_types + l] += 1;
            newcomer_degree[l] += 1;
            self.type_counts[l] += 1;
            self.edges.push(TypedEdge::new(newcomer, v, l));
            self.endpoint_pool.extend([newcomer, v]);
        }
        for &v in &touched {
            let d = GeneralizedDegree::from(self.degree(v));
            *self.census.entry(d).or_insert(0) += 1;
        }

        self.degrees.extend_from_slice(&newcomer_degree);
        *self.census.entry(GeneralizedDegree::from(newcomer_degree)).or_insert(0) += 1;
        self.num_vertices += 1;
        self.step += 1;
    }

    fn census_remove(&mut self, v: u32) {
        let n_types = self.num_types;
        let key = &self.degrees[v as usize * n_types..(v as usize + 1) * n_types];
        let count = self.census.get_mut(key).expect("every vertex is in the census");
        *count -= 1;
        if *count == 0 {
            self.census.remove(key);
        }
    }

    /// Applies `n_steps` growth steps, recording a snapshot at the start,
    /// every `snapshot_every` steps, and after the last step.
    pub fn run<T: Scalar, R: Rng + ?Sized>(
        &mut self,
        schedule: &PerturbationSchedule<T>,
        n_steps: u64,
        snapshot_every: u64,
        rng: &mut R,
    ) -> Result<Vec<Snapshot<T>>, GraphError> {
        let mut snapshots = vec![self.snapshot()];
        for i in 1..=n_steps {
            self.pa_step(schedule, rng)?;
            if i == n_steps || (snapshot_every > 0 && i % snapshot_every == 0) {
                snapshots.push(self.snapshot());
            }
        }
        Ok(snapshots)
    }

    pub fn snapshot<T: Scalar>(&self) -> Snapshot<T> {
        Snapshot { n: self.step, psi: self.edge_type_proportions(), distribution: self.empirical_distribution() }
    }

    /// `psi_n^{(l)} = |E_n^{(l)}| / |E_n|`.
    pub fn edge_type_proportions<T: Scalar>(&self) -> Vec<T> {
        let total = T::from_count(self.num_edges());
        self.type_counts.iter().map(|&c| T::from_count(c) / total).collect()
    }

    /// Census normalized by `|V_n|`.
    pub fn empirical_distribution<T: Scalar>(&self) -> DegreeDistribution<T> {
        let total = T::from_count(self.num_vertices as u64);
        DegreeDistribution::from_masses(
            self.num_types,
            Provenance::Empirical,
            self.census.iter().map(|(d, &c)| (d.clone(), T::from_count(c) / total)),
        )
    }

    /// Recounts everything from the edge list and checks the conservation laws.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let fail = |msg: String| Err(GraphError::InvariantViolated(msg));
        let m = self.edges_per_step as u64;
        let expected_edges = self.initial_edges + m * self.step;
        let type_total: u64 = self.type_counts.iter().sum();
        if type_total != expected_edges || self.num_edges() != expected_edges {
            return fail(format!("edge count {type_total} != |E_0| + M n = {expected_edges}"));
        }
        let census_total: u64 = self.census.values().sum();
        if census_total != self.num_vertices as u64 || self.num_vertices as u64 != self.initial_vertices + self.step {
            return fail(format!("census total {census_total} != |V_n| = {}", self.num_vertices));
        }
        let degree_total: u64 = self.degrees.iter().map(|&c| c as u64).sum();
        if degree_total != 2 * self.num_edges() || self.endpoint_pool.len() as u64 != 2 * self.num_edges() {
            return fail(format!("handshake: degree sum {degree_total} != 2|E_n| = {}", 2 * self.num_edges()));
        }
        if let Some(l) = self.type_counts.iter().position(|&c| c == 0) {
            return fail(format!("type {} has no edges", l + 1));
        }
        let mut recount = vec![0u32; self.degrees.len()];
        let mut type_recount = vec![0u64; self.num_types];
        for e in &self.edges {
            recount[e.a as usize * self.num_types + e.edge_type] += 1;
            recount[e.b as usize * self.num_types + e.edge_type] += 1;
            type_recount[e.edge_type] += 1;
        }
        if recount != self.degrees || type_recount != self.type_counts {
            return fail("degree table disagrees with edge list".into());
        }
        let mut census: HashMap<&[u32], u64> = HashMap::new();
        for v in 0..self.num_vertices as u32 {
            *census.entry(self.degree(v)).or_insert(0) += 1;
        }
        if census.len() != self.census.len() || census.iter().any(|(d, c)| self.census.get(*d) != Some(c)) {
            return fail("census disagrees with degree table".into());
        }
        Ok(())
    }
}

/// Draws the perturbed type `l` with probability `row[l]`.
pub fn perturb_type<T: Scalar, R: Rng + ?Sized>(row: &[T], rng: &mut R) -> Result<usize, GraphError> {
    if !is_probability_vector(row) {
        return Err(GraphError::BadRow);
    }
    Ok(categorical(row, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::StochasticMatrix;
    use crate::rng::stream;

    fn schedule(rows: &[Vec<f64>]) -> PerturbationSchedule<f64> {
        PerturbationSchedule::constant(StochasticMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn parallel_pair_bookkeeping() {
        let g = TypedGraph::new(&SeedGraphSpec::parallel_pair(2), 1).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.type_counts(), &[1, 1]);
        assert_eq!(g.degree(0), &[1, 1]);
        assert_eq!(g.degree(1), &[1, 1]);
        assert_eq!(g.census().get(&[1u32, 1][..]), Some(&2));
        g.check_invariants().unwrap();
    }

    #[test]
    fn star_census() {
        let n = 4;
        let g = TypedGraph::new(&SeedGraphSpec::star(n), 1).unwrap();
        assert_eq!(g.census().get(&vec![1u32; n][..]), Some(&1));
        for l in 0..n {
            assert_eq!(g.census().get(GeneralizedDegree::unit(n, l).as_slice()), Some(&1));
        }
        let dist: DegreeDistribution<f64> = g.empirical_distribution();
        assert!((dist.mass(&[0, 1, 0, 0]) - 0.2).abs() < 1e-15);
        assert!((dist.mass(&[1, 1, 1, 1]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn seed_errors() {
        let only_first = SeedGraphSpec { num_types: 2, num_vertices: 2, edges: vec![TypedEdge::new(0, 1, 0)] };
        assert_eq!(TypedGraph::new(&only_first, 1).unwrap_err(), GraphError::MissingType(2));
        let looped = SeedGraphSpec { num_types: 1, num_vertices: 2, edges: vec![TypedEdge::new(1, 1, 0)] };
        assert_eq!(TypedGraph::new(&looped, 1).unwrap_err(), GraphError::LoopEdge(1));
        let empty = SeedGraphSpec { num_types: 1, num_vertices: 0, edges: vec![] };
        assert_eq!(TypedGraph::new(&empty, 1).unwrap_err(), GraphError::EmptyGraph);
    }

    #[test]
    fn empty_pool_and_isolated_vertex() {
        // N = 0 types: no edges at all, but vertices exist.
        let spec = SeedGraphSpec { num_types: 0, num_vertices: 3, edges: vec![] };
        let g = TypedGraph::new(&spec, 1).unwrap();
        let mut rng = stream(1, 0);
        assert_eq!(g.sample_endpoint(&mut rng), Err(GraphError::EmptyPool));

        let spec = SeedGraphSpec { num_types: 1, num_vertices: 3, edges: vec![TypedEdge::new(0, 1, 0)] };
        let g = TypedGraph::new(&spec, 1).unwrap();
        assert_eq!(g.assign_initial_type(2, &mut rng), Err(GraphError::IsolatedEndpoint(2)));
    }

    #[test]
    fn degenerate_initial_type() {
        let spec = SeedGraphSpec {
            num_types: 2,
            num_vertices: 4,
            edges: vec![
                TypedEdge::new(0, 1, 0),
                TypedEdge::new(0, 2, 0),
                TypedEdge::new(0, 3, 0),
                TypedEdge::new(1, 2, 1),
            ],
        };
        let g = TypedGraph::new(&spec, 1).unwrap();
        assert_eq!(g.degree(0), &[3, 0]);
        let mut rng = stream(2, 0);
        assert!((0..1000).all(|_| g.assign_initial_type(0, &mut rng).unwrap() == 0));
    }

    #[test]
    fn perturb_type_identity_and_bad_row() {
        let mut rng = stream(3, 0);
        assert!((0..1000).all(|_| perturb_type(&[0.0, 1.0, 0.0], &mut rng).unwrap() == 1));
        assert_eq!(perturb_type(&[0.5, 0.4], &mut rng), Err(GraphError::BadRow));
        assert_eq!(perturb_type::<f64, _>(&[], &mut rng), Err(GraphError::BadRow));
    }

    #[test]
    fn step_conservation() {
        let sched = schedule(&[vec![0.9, 0.1], vec![0.1, 0.9]]);
        for m in 1..=3 {
            let mut g = TypedGraph::new(&SeedGraphSpec::parallel_pair(2), m).unwrap();
            let mut rng = stream(4, m as u64);
            for step in 1..=200u64 {
                let before_edges = g.num_edges();
                g.pa_step(&sched, &mut rng).unwrap();
                assert_eq!(g.num_vertices() as u64, 2 + step);
                assert_eq!(g.num_edges(), before_edges + m as u64);
                let newest = g.num_vertices() as u32 - 1;
                assert_eq!(g.degree(newest).iter().sum::<u32>(), m as u32);
            }
            g.check_invariants().unwrap();
        }
    }

    #[test]
    fn run_snapshots() {
        let sched = schedule(&[vec![1.0]]);
        let mut g = TypedGraph::new(&SeedGraphSpec::parallel_pair(1), 1).unwrap();
        let mut rng = stream(5, 0);
        let snaps: Vec<Snapshot<f64>> = g.run(&sched, 0, 10, &mut rng).unwrap();
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].n, 0);
        let snaps: Vec<Snapshot<f64>> = g.run(&sched, 25, 10, &mut rng).unwrap();
        assert_eq!(snaps.iter().map(|s| s.n).collect::<Vec<_>>(), vec![0, 10, 20, 25]);
        for s in &snaps {
            assert!((s.distribution.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_dimension_must_match() {
        let sched = schedule(&[vec![1.0]]);
        let mut g = TypedGraph::new(&SeedGraphSpec::parallel_pair(2), 1).unwrap();
        let err = g.pa_step(&sched, &mut stream(0, 0)).unwrap_err();
        assert_eq!(err, GraphError::TypeCountMismatch { graph: 2, schedule: 1 });
    }
}
