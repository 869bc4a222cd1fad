//! Command-line front end: `mtpa <subcommand> [options]`.
//!
//! Exit codes: 0 success, 1 tolerance failure (`compare`, `audit`),
//! 2 usage or configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mtpa::graph::{PerturbationSchedule, SeedGraphSpec, TypedGraph};
use mtpa::harness::{
    convergence_series, perturbed_vs_unperturbed_study, run_experiment, ExperimentConfig, Model, Quantity,
};
use mtpa::io::{self, csv, ConfigError, OutputDir, RunManifest};
use mtpa::matrix::StochasticMatrix;
use mtpa::rng::stream;
use mtpa::theory::{solve_recurrence, solve_unperturbed_recurrence, TypeVector};
use mtpa::urn::{assumption_audit, BernoulliColumnSampler, UrnState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mtpa", version, about = "Multi-type preferential attachment with edge-type perturbation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow typed graphs and record psi_n and the degree census.
    SimulateGraph(RunArgs),
    /// Run the Bernoulli-column urn and record its composition.
    SimulateUrn(RunArgs),
    /// Tabulate the limiting degree distribution x(d) of the perturbed model.
    Solve(SolveArgs),
    /// Tabulate x(d) of the unperturbed model for a given psi.
    SolveUnperturbed(UnperturbedArgs),
    /// Simulate and compare with theory; exit 1 if a tolerance fails.
    Compare(RunArgs),
    /// Convergence series of PSI, TV, U_N or NP_EL.
    Diagnose(DiagnoseArgs),
    /// Check the urn sampler's assumptions on sampled replacement matrices.
    Audit(AuditArgs),
    /// Spread of the unperturbed limit over random psi vs the perturbed limit.
    Study(StudyArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of edge types N (without --config).
    #[arg(long = "n")]
    num_types: Option<usize>,
    /// Edges per step M (without --config).
    #[arg(long = "m")]
    edges: Option<usize>,
    /// Perturbation matrix: "symmetric-0.9" or row-major comma list.
    #[arg(long = "f")]
    matrix: Option<String>,
    /// File holding N followed by N^2 reals.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Seed graph edge list (`a b type` per line).
    #[arg(long)]
    seed_graph: Option<PathBuf>,
    /// Initial urn composition, comma separated.
    #[arg(long)]
    c0: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[arg(long)]
    dmax: Option<u64>,
    #[arg(long)]
    cutoff: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct UnperturbedArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Type vector psi, comma separated.
    #[arg(long)]
    psi: String,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// PSI, TV, U_N or NP_EL.
    #[arg(long)]
    quantity: String,
    /// Target degree d for U_N and NP_EL, comma separated.
    #[arg(long)]
    degree: Option<String>,
    /// 1-based type l for NP_EL.
    #[arg(long = "type")]
    edge_type: Option<usize>,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Step index n at which F_n is audited.
    #[arg(long, default_value_t = 1)]
    at_step: u64,
}

#[derive(Debug, Args)]
struct StudyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    psi_samples: usize,
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_USAGE, message: format!("i/o error: {e}") }
    }
}

fn parse_list<X: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<X>, Failure> {
    text.split(',').map(|t| t.trim().parse::<X>().map_err(|_| usage(format!("bad {what}: {t:?}")))).collect()
}

fn matrix_from_flags(m: &ModelArgs, n: usize) -> Result<StochasticMatrix<f64>, Failure> {
    if let Some(path) = &m.matrix_file {
        let f = io::read_matrix_file(path)?;
        if f.dim() != n {
            return Err(usage(format!("matrix file has dimension {}, --n is {n}", f.dim())));
        }
        return Ok(f);
    }
    match &m.matrix {
        Some(spec) => Ok(io::parse_matrix_spec(spec, n)?),
        None if n == 1 => Ok(StochasticMatrix::identity(1)),
        None => Err(usage("--f or --matrix-file is required when N > 1")),
    }
}

/// Config from `--config` or from the model flags, with command-line
/// overrides applied.
fn resolve_config(m: &ModelArgs, model: Option<Model>) -> Result<ExperimentConfig<f64>, Failure> {
    let mut cfg = match &m.config {
        Some(path) => io::parse_config_file(path)?,
        None => {
            let n = m.num_types.ok_or_else(|| usage("--config or --n is required"))?;
            if n == 0 {
                return Err(usage("--n must be positive"));
            }
            let edges = m.edges.ok_or_else(|| usage("--config or --m is required"))?;
            let f = matrix_from_flags(m, n)?;
            if !f.is_irreducible() {
                return Err(usage("F is not irreducible"));
            }
            ExperimentConfig::new(model.unwrap_or(Model::Graph), edges, PerturbationSchedule::constant(f))
        }
    };
    if let Some(model) = model {
        cfg.model = model;
    }
    if let Some(path) = &m.seed_graph {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        cfg.seed_graph = SeedGraphSpec::parse(&text, Some(cfg.num_types())).map_err(usage)?;
        TypedGraph::new(&cfg.seed_graph, 1).map_err(usage)?;
        cfg.initial_composition = cfg.seed_graph.type_counts();
    }
    if let Some(c0) = &m.c0 {
        cfg.initial_composition = parse_list(c0, "C0 entry")?;
    }
    if let Some(s) = m.seed {
        cfg.master_seed = s;
    }
    if let Some(r) = m.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = m.steps {
        cfg.n_steps = s;
    }
    if let Some(s) = m.snapshot_every {
        cfg.snapshot_every = s;
    }
    if let Some(d) = m.dmax {
        cfg.d_max = d;
        if m.cutoff.is_none() {
            cfg.cutoff = cfg.cutoff.min(d);
        }
    }
    if let Some(k) = m.cutoff {
        cfg.cutoff = k;
        if m.dmax.is_none() {
            cfg.d_max = cfg.d_max.max(k);
        }
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn out_dir(m: &ModelArgs) -> PathBuf {
    m.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<O: Write, E: Write>(argv: &[String], stdout: &mut O, stderr: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch<O: Write>(command: Command, stdout: &mut O) -> Result<i32, Failure> {
    match command {
        Command::SimulateGraph(a) => simulate_graph(&a.model, stdout),
        Command::SimulateUrn(a) => simulate_urn(&a.model, stdout),
        Command::Solve(a) => solve(&a.model, stdout),
        Command::SolveUnperturbed(a) => solve_unperturbed(&a, stdout),
        Command::Compare(a) => compare(&a.model, stdout),
        Command::Diagnose(a) => diagnose(&a, stdout),
        Command::Audit(a) => audit(&a, stdout),
        Command::Study(a) => study(&a, stdout),
    }
}

fn finish<O: Write>(dir: OutputDir, stdout: &mut O, out: &Path) -> Result<(), Failure> {
    let manifest = dir.finish()?;
    for (name, _) in &manifest.outputs {
        writeln!(stdout, "wrote {}", out.join(name).display())?;
    }
    Ok(())
}

fn simulate_graph<O: Write>(m: &ModelArgs, stdout: &mut O) -> Result<i32, Failure> {
    let cfg = resolve_config(m, Some(Model::Graph))?;
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for i in 0..cfg.replicates {
        let mut graph = TypedGraph::new(&cfg.seed_graph, cfg.edges_per_step).map_err(usage)?;
        let snaps = graph
            .run::<f64, _>(&cfg.schedule, cfg.n_steps, cfg.snapshot_every, &mut stream(cfg.master_seed, i))
            .map_err(usage)?;
        if let Err(e) = graph.check_invariants() {
            failures.push(format!("replicate {i}: {e}"));
        }
        runs.push((i, snaps));
    }
    let psi: Vec<_> = runs
        .iter()
        .map(|(i, snaps)| mtpa::harness::ReplicateResult {
            index: *i,
            psi_series: snaps.iter().map(|s| (s.n, s.psi.clone())).collect(),
            terminal_psi: snaps.last().expect("final snapshot").psi.clone(),
            distribution: None,
            composition: None,
            conservation_failures: Vec::new(),
        })
        .collect();
    let out = out_dir(m);
    let mut dir = OutputDir::create(&out, RunManifest::new("simulate-graph", &cfg))?;
    dir.write("psi.csv", &csv::psi_csv(cfg.num_types(), &psi))?;
    dir.write("distribution.csv", &csv::snapshot_distributions_csv(cfg.num_types(), &runs))?;
    finish(dir, stdout, &out)?;
    if !failures.is_empty() {
        return Err(Failure { code: EXIT_TOLERANCE, message: failures.join("; ") });
    }
    Ok(EXIT_OK)
}

fn simulate_urn<O: Write>(m: &ModelArgs, stdout: &mut O) -> Result<i32, Failure> {
    let cfg = resolve_config(m, Some(Model::Urn))?;
    let sampler: BernoulliColumnSampler<f64> = BernoulliColumnSampler::from_schedule(cfg.schedule.clone());
    let mut runs = Vec::new();
    for i in 0..cfg.replicates {
        let mut urn = UrnState::new(cfg.initial_composition.clone(), cfg.edges_per_step, &sampler).map_err(usage)?;
        let snaps =
            urn.run(&sampler, cfg.n_steps, cfg.snapshot_every, &mut stream(cfg.master_seed, i)).map_err(usage)?;
        urn.check_conservation().map_err(|e| Failure { code: EXIT_TOLERANCE, message: e.to_string() })?;
        runs.push((i, snaps));
    }
    let out = out_dir(m);
    let mut dir = OutputDir::create(&out, RunManifest::new("simulate-urn", &cfg))?;
    dir.write("urn.csv", &csv::urn_csv(cfg.num_types(), &runs))?;
    finish(dir, stdout, &out)?;
    Ok(EXIT_OK)
}

/// Writes `name` under `--out` with a manifest, or prints it when `--out`
/// is absent.
fn emit<O: Write>(m: &ModelArgs, manifest: RunManifest, name: &str, text: &str, stdout: &mut O) -> Result<(), Failure> {
    match &m.out {
        Some(out) => {
            let mut dir = OutputDir::create(out, manifest)?;
            dir.write(name, text)?;
            finish(dir, stdout, out)
        }
        None => Ok(write!(stdout, "{text}")?),
    }
}

fn solve<O: Write>(m: &ModelArgs, stdout: &mut O) -> Result<i32, Failure> {
    let cfg = resolve_config(m, None)?;
    let x = solve_recurrence(cfg.schedule.limit(), cfg.edges_per_step, cfg.d_max).map_err(usage)?;
    emit(m, RunManifest::new("solve", &cfg), "theory.csv", &csv::distribution_csv(&x), stdout)?;
    Ok(EXIT_OK)
}

fn solve_unperturbed<O: Write>(a: &UnperturbedArgs, stdout: &mut O) -> Result<i32, Failure> {
    let psi = TypeVector::new(parse_list::<f64>(&a.psi, "psi entry")?).map_err(usage)?;
    let edges = match &a.model.config {
        Some(_) => resolve_config(&a.model, None)?.edges_per_step,
        None => a.model.edges.ok_or_else(|| usage("--m is required"))?,
    };
    let d_max = a.model.dmax.unwrap_or(edges as u64 + 10);
    let x = solve_unperturbed_recurrence(&psi, edges, d_max).map_err(usage)?;
    let text = csv::distribution_csv(&x);
    emit(&a.model, RunManifest::bare("solve-unperturbed", 0), "theory.csv", &text, stdout)?;
    Ok(EXIT_OK)
}

fn compare<O: Write>(m: &ModelArgs, stdout: &mut O) -> Result<i32, Failure> {
    let cfg = resolve_config(m, None)?;
    let report = run_experiment(&cfg).map_err(usage)?;
    let summary = report.summary();
    let out = out_dir(m);
    let mut dir = OutputDir::create(&out, RunManifest::new("compare", &cfg))?;
    if cfg.model == Model::Graph {
        dir.write("per_degree.csv", &csv::per_degree_csv(cfg.num_types(), &report))?;
    }
    dir.write("replicates.csv", &csv::replicate_csv(&report))?;
    dir.write("psi.csv", &csv::psi_csv(cfg.num_types(), &report.replicates))?;
    dir.write("summary.txt", &summary)?;
    write!(stdout, "{summary}")?;
    finish(dir, stdout, &out)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_TOLERANCE })
}

fn diagnose<O: Write>(a: &DiagnoseArgs, stdout: &mut O) -> Result<i32, Failure> {
    let cfg = resolve_config(&a.model, None)?;
    let degree = || -> Result<Vec<u32>, Failure> {
        parse_list(a.degree.as_deref().ok_or_else(|| usage("--degree is required"))?, "degree entry")
    };
    let quantity = match a.quantity.to_ascii_uppercase().as_str() {
        "PSI" => Quantity::Psi,
        "TV" => Quantity::Tv,
        "U_N" => Quantity::UN { degree: degree()? },
        "NP_EL" => {
            let l = a.edge_type.ok_or_else(|| usage("--type is required for NP_EL"))?;
            if l == 0 {
                return Err(usage("--type is 1-based"));
            }
            Quantity::NpEl { degree: degree()?, l: l - 1 }
        }
        other => return Err(usage(format!("unknown quantity {other:?}"))),
    };
    let series = convergence_series(&cfg, &quantity).map_err(usage)?;
    let out = out_dir(&a.model);
    let mut dir = OutputDir::create(&out, RunManifest::new("diagnose", &cfg))?;
    dir.write("series.csv", &csv::series_csv(&series))?;
    finish(dir, stdout, &out)?;
    Ok(EXIT_OK)
}

fn audit<O: Write>(a: &AuditArgs, stdout: &mut O) -> Result<i32, Failure> {
    let cfg = resolve_config(&a.model, Some(Model::Urn))?;
    let sampler: BernoulliColumnSampler<f64> = BernoulliColumnSampler::from_schedule(cfg.schedule.clone());
    let report = assumption_audit(&sampler, a.at_step.max(1), a.samples, &mut stream(cfg.master_seed, 0));
    let summary = report.summary();
    write!(stdout, "{summary}")?;
    if let Some(out) = &a.model.out {
        let mut dir = OutputDir::create(out, RunManifest::new("audit", &cfg))?;
        dir.write("audit.txt", &summary)?;
        finish(dir, stdout, out)?;
    }
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_TOLERANCE })
}

fn study<O: Write>(a: &StudyArgs, stdout: &mut O) -> Result<i32, Failure> {
    let cfg = resolve_config(&a.model, None)?;
    let report = perturbed_vs_unperturbed_study(&cfg, a.psi_samples, None).map_err(usage)?;
    let out = out_dir(&a.model);
    let mut dir = OutputDir::create(&out, RunManifest::new("study", &cfg))?;
    dir.write("study.csv", &csv::study_csv(cfg.num_types(), &report))?;
    finish(dir, stdout, &out)?;
    Ok(EXIT_OK)
}
