//! TOML experiment configuration.
//!
//! ```toml
//! model = "graph"            # or "urn"
//! N = 2
//! M = 1
//! F = "symmetric-0.9"        # or a row-major list [0.9, 0.1, 0.1, 0.9]
//!
//! [graph]
//! seed_graph = "parallel"    # "parallel", "star" or "edges" (uses seed_edges)
//! seed_edges = [[1, 2, 1], [1, 2, 2]]   # vertex, vertex, 1-based type
//! schedule = "constant"      # or "decaying": F_n = F + offset / n^rho
//! offset = [0.05, -0.05, -0.05, 0.05]
//! rho = 1.0
//!
//! [urn]
//! C0 = [1, 1]                # default: seed graph type counts
//!
//! [harness]
//! steps = 10000
//! snapshot_every = 1000
//! replicates = 1
//! master_seed = 0
//! d_max = 11                 # default: cutoff
//! cutoff = 11                # default: M + 10
//!
//! [tolerance]
//! tv = 0.02
//! psi = 0.02
//! pass_fraction = 0.95
//! ```
//!
//! A `[manifest]` table, as written next to run outputs, is ignored so a
//! manifest can be fed back as a config.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;
use toml::{Table, Value};

use crate::graph::{GraphError, PerturbationSchedule, ScheduleKind, SeedGraphSpec, TypedEdge};
use crate::harness::{ExperimentConfig, Model, Tolerances};
use crate::matrix::{MatrixError, SquareMatrix, StochasticMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("invalid value for {key}: {message}")]
    Validation { key: String, message: String },
}

impl ConfigError {
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Validation { key, .. } => Some(key),
            ConfigError::Parse { .. } => None,
        }
    }
}

fn invalid<R>(key: impl Into<String>, message: impl Into<String>) -> Result<R, ConfigError> {
    Err(ConfigError::Validation { key: key.into(), message: message.into() })
}

pub fn parse_config_file<T: Scalar>(path: &Path) -> Result<ExperimentConfig<T>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Parse { line: None, message: format!("{}: {e}", path.display()) })?;
    parse_config(&text)
}

pub fn parse_config<T: Scalar>(text: &str) -> Result<ExperimentConfig<T>, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
        line: e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
        message: e.message().to_string(),
    })?;
    resolve(&table)
}

fn check_keys(table: &Table, prefix: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    for k in table.keys() {
        if !allowed.contains(&k.as_str()) {
            return invalid(format!("{prefix}{k}"), "unknown key");
        }
    }
    Ok(())
}

fn as_u64(v: &Value, key: &str) -> Result<u64, ConfigError> {
    match v.as_integer() {
        Some(i) if i >= 0 => Ok(i as u64),
        _ => invalid(key, "expected a nonnegative integer"),
    }
}

fn as_real(v: &Value, key: &str) -> Result<f64, ConfigError> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => invalid(key, "expected a number"),
    }
}

fn real_list(v: &Value, key: &str) -> Result<Vec<f64>, ConfigError> {
    match v {
        Value::Array(items) => items.iter().map(|x| as_real(x, key)).collect(),
        Value::String(s) => s
            .split(',')
            .map(|x| x.trim().parse::<f64>().or_else(|_| invalid(key, format!("not a number: {x:?}"))))
            .collect(),
        _ => invalid(key, "expected a list of numbers"),
    }
}

fn subtable<'a>(table: &'a Table, name: &str) -> Result<Option<&'a Table>, ConfigError> {
    match table.get(name) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => invalid(name, "expected a table"),
    }
}

/// Names the offending part of `F` for stochastic-matrix errors.
fn matrix_error(key: &str, e: MatrixError) -> ConfigError {
    let key = match &e {
        MatrixError::RowSum { row, .. } => format!("{key} row {row}"),
        MatrixError::EntryOutOfRange { row, col, .. } => format!("{key} entry ({row},{col})"),
        MatrixError::OffsetRowSum { row, .. } => format!("{key} row {row}"),
        _ => key.to_string(),
    };
    ConfigError::Validation { key, message: e.to_string() }
}

/// `"symmetric-<diag>"` or a row-major list of `N^2` reals.
pub fn parse_matrix_value<T: Scalar>(v: &Value, n: usize, key: &str) -> Result<StochasticMatrix<T>, ConfigError> {
    if let Value::String(s) = v {
        if let Some(diag) = s.strip_prefix("symmetric-") {
            let diag: f64 = diag.trim().parse().or_else(|_| invalid(key, format!("bad diagonal {diag:?}")))?;
            return StochasticMatrix::symmetric(n, T::lit(diag)).map_err(|e| matrix_error(key, e));
        }
    }
    let entries = real_list(v, key)?;
    if entries.len() != n * n {
        return invalid(key, format!("expected {} entries, got {}", n * n, entries.len()));
    }
    StochasticMatrix::from_row_major(n, entries.into_iter().map(T::lit).collect()).map_err(|e| matrix_error(key, e))
}

fn resolve<T: Scalar>(t: &Table) -> Result<ExperimentConfig<T>, ConfigError> {
    check_keys(t, "", &["model", "N", "M", "F", "graph", "urn", "harness", "tolerance", "manifest"])?;
    let model = match t.get("model").map(|v| v.as_str()) {
        None => return invalid("model", "missing"),
        Some(Some("graph")) | Some(Some("GRAPH")) => Model::Graph,
        Some(Some("urn")) | Some(Some("URN")) => Model::Urn,
        Some(_) => return invalid("model", "expected \"graph\" or \"urn\""),
    };
    let n = as_u64(t.get("N").ok_or_else(|| missing("N"))?, "N")? as usize;
    if n == 0 {
        return invalid("N", "must be positive");
    }
    let m = as_u64(t.get("M").ok_or_else(|| missing("M"))?, "M")? as usize;
    if m == 0 {
        return invalid("M", "must be positive");
    }
    let f: StochasticMatrix<T> = parse_matrix_value(t.get("F").ok_or_else(|| missing("F"))?, n, "F")?;
    if !f.is_irreducible() {
        return invalid("F", "not irreducible");
    }

    let mut schedule = PerturbationSchedule::constant(f.clone());
    let mut seed_graph = SeedGraphSpec::parallel_pair(n);
    if let Some(g) = subtable(t, "graph")? {
        check_keys(g, "graph.", &["seed_graph", "seed_edges", "schedule", "offset", "rho"])?;
        seed_graph = match g.get("seed_graph").map(|v| v.as_str()) {
            None if g.contains_key("seed_edges") => parse_seed_edges(g, n)?,
            None | Some(Some("parallel")) => SeedGraphSpec::parallel_pair(n),
            Some(Some("star")) => SeedGraphSpec::star(n),
            Some(Some("edges")) => parse_seed_edges(g, n)?,
            Some(_) => return invalid("graph.seed_graph", "expected \"parallel\", \"star\" or \"edges\""),
        };
        match g.get("schedule").map(|v| v.as_str()) {
            None | Some(Some("constant")) => {}
            Some(Some("decaying")) => {
                let offset = real_list(g.get("offset").ok_or_else(|| missing("graph.offset"))?, "graph.offset")?;
                if offset.len() != n * n {
                    return invalid("graph.offset", format!("expected {} entries", n * n));
                }
                let offset = SquareMatrix::from_row_major(n, offset.into_iter().map(T::lit).collect())
                    .map_err(|e| matrix_error("graph.offset", e))?;
                let rho = match g.get("rho") {
                    Some(v) => as_real(v, "graph.rho")?,
                    None => 1.0,
                };
                schedule = PerturbationSchedule::decaying(f.clone(), offset, T::lit(rho)).map_err(|e| {
                    matrix_error(
                        if matches!(e, MatrixError::DecayExponent(_)) { "graph.rho" } else { "graph.offset" },
                        e,
                    )
                })?;
            }
            Some(_) => return invalid("graph.schedule", "expected \"constant\" or \"decaying\""),
        }
    }
    let mut cfg = ExperimentConfig::new(model, m, schedule);
    cfg.initial_composition = seed_graph.type_counts();
    cfg.seed_graph = seed_graph;

    if let Some(u) = subtable(t, "urn")? {
        check_keys(u, "urn.", &["C0"])?;
        if let Some(v) = u.get("C0") {
            let Value::Array(items) = v else {
                return invalid("urn.C0", "expected a list");
            };
            cfg.initial_composition = items.iter().map(|x| as_u64(x, "urn.C0")).collect::<Result<_, _>>()?;
            if cfg.initial_composition.len() != n {
                return invalid("urn.C0", format!("expected {n} entries"));
            }
            if cfg.initial_composition.iter().all(|&c| c == 0) {
                return invalid("urn.C0", "urn is empty");
            }
        }
    }

    let mut cutoff = None;
    let mut d_max = None;
    if let Some(h) = subtable(t, "harness")? {
        check_keys(h, "harness.", &["steps", "snapshot_every", "replicates", "master_seed", "d_max", "cutoff"])?;
        let get = |k: &str| h.get(k).map(|v| as_u64(v, &format!("harness.{k}"))).transpose();
        cfg.n_steps = get("steps")?.unwrap_or(cfg.n_steps);
        cfg.snapshot_every = get("snapshot_every")?.unwrap_or(cfg.snapshot_every);
        cfg.replicates = get("replicates")?.unwrap_or(cfg.replicates);
        cfg.master_seed = get("master_seed")?.unwrap_or(cfg.master_seed);
        cutoff = get("cutoff")?;
        d_max = get("d_max")?;
    }
    if cfg.replicates == 0 {
        return invalid("harness.replicates", "must be at least 1");
    }
    cfg.cutoff = cutoff.unwrap_or_else(|| (m as u64 + 10).min(d_max.unwrap_or(u64::MAX)));
    cfg.d_max = d_max.unwrap_or(cfg.cutoff);
    if cfg.cutoff > cfg.d_max {
        return invalid("harness.cutoff", format!("exceeds d_max = {}", cfg.d_max));
    }

    if let Some(tol) = subtable(t, "tolerance")? {
        check_keys(tol, "tolerance.", &["tv", "psi", "pass_fraction"])?;
        let mut tolerances = Tolerances::default();
        for (k, slot) in
            [("tv", &mut tolerances.tv), ("psi", &mut tolerances.psi), ("pass_fraction", &mut tolerances.pass_fraction)]
        {
            if let Some(v) = tol.get(k) {
                let x = as_real(v, &format!("tolerance.{k}"))?;
                if !(0.0..=1.0).contains(&x) {
                    return invalid(format!("tolerance.{k}"), "must lie in [0, 1]");
                }
                *slot = T::lit(x);
            }
        }
        cfg.tolerances = tolerances;
    }
    cfg.validate().map_err(|e| ConfigError::Validation { key: "config".into(), message: e.to_string() })?;
    Ok(cfg)
}

fn missing(key: &str) -> ConfigError {
    ConfigError::Validation { key: key.into(), message: "missing".into() }
}

fn parse_seed_edges(g: &Table, n: usize) -> Result<SeedGraphSpec, ConfigError> {
    let key = "graph.seed_edges";
    let Some(Value::Array(rows)) = g.get("seed_edges") else {
        return invalid(key, "expected a list of [a, b, type]");
    };
    let mut text = String::new();
    for row in rows {
        let Value::Array(triple) = row else {
            return invalid(key, "expected [a, b, type]");
        };
        if triple.len() != 3 {
            return invalid(key, "expected [a, b, type]");
        }
        let v: Vec<u64> = triple.iter().map(|x| as_u64(x, key)).collect::<Result<_, _>>()?;
        writeln!(text, "{} {} {}", v[0], v[1], v[2]).expect("write to string");
    }
    let spec = SeedGraphSpec::parse(&text, Some(n))
        .map_err(|e| ConfigError::Validation { key: key.into(), message: e.to_string() })?;
    // Reject seeds the graph engine would refuse, naming the config key.
    crate::graph::TypedGraph::new(&spec, 1)
        .map_err(|e: GraphError| ConfigError::Validation { key: key.into(), message: e.to_string() })?;
    Ok(spec)
}

fn real_str<T: Scalar>(x: T) -> String {
    // `{:?}` prints the shortest string that round-trips.
    let v = x.as_f64();
    let s = format!("{v:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn real_array<T: Scalar>(xs: &[T]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| real_str(x)).collect();
    format!("[{}]", items.join(", "))
}

/// Fully resolved config in the format accepted by [`parse_config`].
pub fn write_config<T: Scalar>(cfg: &ExperimentConfig<T>) -> String {
    let mut s = String::new();
    let n = cfg.num_types();
    writeln!(s, "model = \"{}\"", cfg.model.as_str()).unwrap();
    writeln!(s, "N = {n}").unwrap();
    writeln!(s, "M = {}", cfg.edges_per_step).unwrap();
    writeln!(s, "F = {}", real_array(cfg.schedule.limit().matrix().as_slice())).unwrap();
    writeln!(s, "\n[graph]\nseed_graph = \"edges\"").unwrap();
    let edges: Vec<String> = cfg
        .seed_graph
        .edges
        .iter()
        .map(|e: &TypedEdge| format!("[{}, {}, {}]", e.a + 1, e.b + 1, e.edge_type + 1))
        .collect();
    writeln!(s, "seed_edges = [{}]", edges.join(", ")).unwrap();
    match cfg.schedule.kind() {
        ScheduleKind::Constant => writeln!(s, "schedule = \"constant\"").unwrap(),
        ScheduleKind::Decaying { offset, rho } => {
            writeln!(s, "schedule = \"decaying\"").unwrap();
            writeln!(s, "offset = {}", real_array(offset.as_slice())).unwrap();
            writeln!(s, "rho = {}", real_str(*rho)).unwrap();
        }
    }
    let c0: Vec<String> = cfg.initial_composition.iter().map(|c| c.to_string()).collect();
    writeln!(s, "\n[urn]\nC0 = [{}]", c0.join(", ")).unwrap();
    writeln!(
        s,
        "\n[harness]\nsteps = {}\nsnapshot_every = {}\nreplicates = {}\nmaster_seed = {}\nd_max = {}\ncutoff = {}",
        cfg.n_steps, cfg.snapshot_every, cfg.replicates, cfg.master_seed, cfg.d_max, cfg.cutoff
    )
    .unwrap();
    let t = &cfg.tolerances;
    writeln!(
        s,
        "\n[tolerance]\ntv = {}\npsi = {}\npass_fraction = {}",
        real_str(t.tv),
        real_str(t.psi),
        real_str(t.pass_fraction)
    )
    .unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg: ExperimentConfig<f64> =
            parse_config("model = \"graph\"\nN = 2\nM = 1\nF = \"symmetric-0.9\"\n").unwrap();
        assert_eq!(cfg.model, Model::Graph);
        assert!((cfg.schedule.limit().get(0, 1) - 0.1).abs() < 1e-15);
        assert_eq!(cfg.seed_graph, SeedGraphSpec::parallel_pair(2));
        assert_eq!(cfg.initial_composition, vec![1, 1]);
        assert_eq!((cfg.cutoff, cfg.d_max), (11, 11));
        assert_eq!(cfg.n_steps, crate::harness::DEFAULT_STEPS);
        assert_eq!(cfg.tolerances, Tolerances::default());
    }

    #[test]
    fn bad_row_names_the_row() {
        let err = parse_config::<f64>("model = \"urn\"\nN = 2\nM = 1\nF = [0.5, 0.5, 0.3, 0.6]\n").unwrap_err();
        assert_eq!(err.key(), Some("F row 2"));
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse_config::<f64>("model = \"graph\"\nN = = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: Some(2), .. }), "{err:?}");
    }

    #[test]
    fn missing_file_is_parse_error() {
        let err = parse_config_file::<f64>(Path::new("/nonexistent/mtpa.toml")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config::<f64>("model = \"graph\"\nN = 1\nM = 1\nF = [1]\n[harness]\nstep = 3\n").unwrap_err();
        assert_eq!(err.key(), Some("harness.step"));
    }

    #[test]
    fn reducible_f_rejected() {
        let err = parse_config::<f64>("model = \"graph\"\nN = 2\nM = 1\nF = [1, 0, 0, 1]\n").unwrap_err();
        assert_eq!(err.key(), Some("F"));
    }

    #[test]
    fn written_config_round_trips() {
        let text = "model = \"urn\"\nN = 2\nM = 3\nF = [0.8, 0.2, 0.4, 0.6]\n\
                    [graph]\nseed_graph = \"star\"\nschedule = \"decaying\"\noffset = [0.1, -0.1, 0, 0]\nrho = 0.5\n\
                    [urn]\nC0 = [1, 3]\n[harness]\nsteps = 77\nreplicates = 4\nmaster_seed = 9\nd_max = 20\n\
                    [tolerance]\ntv = 0.05\n";
        let cfg: ExperimentConfig<f64> = parse_config(text).unwrap();
        assert_eq!(cfg.cutoff, 13);
        let again: ExperimentConfig<f64> = parse_config(&write_config(&cfg)).unwrap();
        assert_eq!(write_config(&again), write_config(&cfg));
        assert_eq!(again.seed_graph, cfg.seed_graph);
        assert_eq!(again.schedule, cfg.schedule);
        assert_eq!(again.initial_composition, vec![1, 3]);
    }
}
