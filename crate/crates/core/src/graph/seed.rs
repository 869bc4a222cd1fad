use std::collections::HashMap;

use super::GraphError;

/// An undirected typed edge. `edge_type` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypedEdge {
    pub a: u32,
    pub b: u32,
    pub edge_type: usize,
}

impl TypedEdge {
    pub fn new(a: u32, b: u32, edge_type: usize) -> Self {
        TypedEdge { a, b, edge_type }
    }
}

/// Description of the deterministic initial graph `G_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedGraphSpec {
    pub num_types: usize,
    pub num_vertices: usize,
    pub edges: Vec<TypedEdge>,
}

impl SeedGraphSpec {
    /// Two vertices joined by `num_types` parallel edges, one of each type.
    pub fn parallel_pair(num_types: usize) -> Self {
        SeedGraphSpec { num_types, num_vertices: 2, edges: (0..num_types).map(|l| TypedEdge::new(0, 1, l)).collect() }
    }

    /// Centre vertex 0 with leaf `l + 1` attached by a type-`l` edge.
    pub fn star(num_types: usize) -> Self {
        SeedGraphSpec {
            num_types,
            num_vertices: num_types + 1,
            edges: (0..num_types).map(|l| TypedEdge::new(0, l as u32 + 1, l)).collect(),
        }
    }

    /// Number of seed edges of each type.
    pub fn type_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.num_types];
        for e in &self.edges {
            if e.edge_type < self.num_types {
                counts[e.edge_type] += 1;
            }
        }
        counts
    }

    /// Parses the edge-list format: one `a b t` triple per line with a
    /// 1-based type `t`; `#` starts a comment. Vertex labels are arbitrary
    /// integers and are numbered densely in order of first appearance.
    ///
    /// With `num_types = None` the number of types is the largest `t` seen.
    pub fn parse(text: &str, num_types: Option<usize>) -> Result<Self, GraphError> {
        let mut labels: HashMap<u64, u32> = HashMap::new();
        let mut edges = Vec::new();
        let mut max_type = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(GraphError::SeedSyntax {
                    line: line_no,
                    message: format!("expected `a b t`, found {} fields", fields.len()),
                });
            }
            let num = |s: &str| {
                s.parse::<u64>().map_err(|e| GraphError::SeedSyntax { line: line_no, message: format!("`{s}`: {e}") })
            };
            let (a, b, t) = (num(fields[0])?, num(fields[1])?, num(fields[2])?);
            if t == 0 {
                return Err(GraphError::SeedSyntax { line: line_no, message: "edge types are 1-based".into() });
            }
            let mut id = |label: u64| {
                let next = labels.len() as u32;
                *labels.entry(label).or_insert(next)
            };
            let (a, b) = (id(a), id(b));
            max_type = max_type.max(t as usize);
            edges.push(TypedEdge::new(a, b, t as usize - 1));
        }
        let num_types = num_types.unwrap_or(max_type);
        if let Some(e) = edges.iter().find(|e| e.edge_type >= num_types) {
            return Err(GraphError::TypeOutOfRange { edge_type: e.edge_type + 1, num_types });
        }
        Ok(SeedGraphSpec { num_types, num_vertices: labels.len(), edges })
    }

    /// Inverse of [`SeedGraphSpec::parse`] for dense vertex ids.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::from("# a b type\n");
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.a, e.b, e.edge_type + 1));
        }
        out
    }
}
