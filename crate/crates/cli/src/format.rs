//! The network file format: a TOML document with `meta`, `nodes`, `H`,
//! `edges`, `delta`, and optional `C` / `tolerances` sections. Matrices are
//! row-major nested arrays validated against `meta`; unknown keys are
//! rejected. Node indices are 1-based in files, 0-based in memory.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use netctrl::model::{NetworkSpec, NodeSystem, ToleranceConfig};
use netctrl::structured::{CompanionNode, StructuredNetworkSpec};

/// On-disk document. Field order matters for TOML: plain values first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    /// Inner coupling, `n x m` row-major.
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    /// Driver indicators, one 0/1 per node.
    pub delta: Vec<u8>,
    /// Shared output row for companion-form files (`1 x n`, flattened).
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    pub meta: Meta,
    pub nodes: Vec<NodeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    /// State dimension per node.
    pub n: usize,
    /// Input dimension per node.
    pub p: usize,
    /// Output dimension per node.
    pub m: usize,
    /// Node count.
    #[serde(rename = "N")]
    pub node_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub companion: Option<CompanionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanionEntry {
    /// Characteristic coefficients `[a_0, ..., a_{n-1}]`.
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    /// 1-based source node.
    pub from: usize,
    /// 1-based target node.
    pub to: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eig_dedup_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_vec_tol: Option<f64>,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("TOML parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("network spec invalid: {0}")]
    Spec(#[from] netctrl::model::InvalidSpec),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// A parsed network: companion-form files keep the structured view alongside
/// the general bridge so both checker families can run.
#[derive(Debug, Clone)]
pub enum ParsedNetwork {
    General(NetworkSpec),
    Structured {
        structured: StructuredNetworkSpec,
        bridged: NetworkSpec,
    },
}

impl ParsedNetwork {
    pub fn general(&self) -> &NetworkSpec {
        match self {
            ParsedNetwork::General(spec) => spec,
            ParsedNetwork::Structured { bridged, .. } => bridged,
        }
    }

    pub fn structured(&self) -> Option<&StructuredNetworkSpec> {
        match self {
            ParsedNetwork::General(_) => None,
            ParsedNetwork::Structured { structured, .. } => Some(structured),
        }
    }
}

pub fn parse_str(text: &str) -> Result<(ParsedNetwork, ToleranceConfig), FormatError> {
    let file: NetworkFile = toml::from_str(text)?;
    let network = file_to_network(&file)?;
    let tol = tolerances_from(&file)?;
    Ok((network, tol))
}

fn tolerances_from(file: &NetworkFile) -> Result<ToleranceConfig, FormatError> {
    let mut tol = ToleranceConfig::default();
    if let Some(t) = &file.tolerances {
        if let Some(v) = t.rank_factor {
            tol.rank_factor = v;
        }
        if let Some(v) = t.eig_dedup_radius {
            tol.eig_dedup_radius = v;
        }
        if let Some(v) = t.zero_vec_tol {
            tol.zero_vec_tol = v;
        }
    }
    tol.validate()
        .map_err(|v| field_err("tolerances", v.to_string()))?;
    Ok(tol)
}

fn matrix_from(rows: &[Vec<f64>], want_rows: usize, want_cols: usize, field: &str) -> Result<Array2<f64>, FormatError> {
    if rows.len() != want_rows {
        return Err(field_err(
            field,
            format!("has {} rows, expected {}", rows.len(), want_rows),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != want_cols {
            return Err(field_err(
                field,
                format!("row {} has {} entries, expected {}", i + 1, row.len(), want_cols),
            ));
        }
    }
    Ok(Array2::from_shape_fn((want_rows, want_cols), |(i, j)| rows[i][j]))
}

fn adjacency_from(edges: &[EdgeEntry], node_count: usize) -> Result<Array2<f64>, FormatError> {
    let mut w = Array2::<f64>::zeros((node_count, node_count));
    let mut seen = std::collections::HashSet::new();
    for (k, e) in edges.iter().enumerate() {
        let field = format!("edges[{}]", k + 1);
        if e.from == 0 || e.from > node_count || e.to == 0 || e.to > node_count {
            return Err(field_err(field, format!("node index out of range 1..={node_count}")));
        }
        if e.from == e.to {
            return Err(field_err(field, "self-loop"));
        }
        if e.weight == 0.0 {
            return Err(field_err(field, "weight must be nonzero"));
        }
        if !seen.insert((e.from, e.to)) {
            return Err(field_err(field, format!("duplicate edge {} -> {}", e.from, e.to)));
        }
        w[(e.to - 1, e.from - 1)] = e.weight;
    }
    Ok(w)
}

fn file_to_network(file: &NetworkFile) -> Result<ParsedNetwork, FormatError> {
    let meta = &file.meta;
    if file.nodes.len() != meta.node_count {
        return Err(field_err(
            "nodes",
            format!("{} node entries, meta.N says {}", file.nodes.len(), meta.node_count),
        ));
    }
    if meta.node_count == 0 || meta.n == 0 {
        return Err(field_err("meta", "n and N must be at least 1"));
    }
    if file.delta.len() != meta.node_count {
        return Err(field_err(
            "delta",
            format!("{} entries, expected N = {}", file.delta.len(), meta.node_count),
        ));
    }
    for (i, &d) in file.delta.iter().enumerate() {
        if d > 1 {
            return Err(field_err(format!("delta[{}]", i + 1), format!("value {d} is not 0 or 1")));
        }
    }
    let companion_count = file.nodes.iter().filter(|n| n.companion.is_some()).count();
    if companion_count > 0 && companion_count < file.nodes.len() {
        return Err(field_err(
            "nodes",
            "companion and explicit node entries cannot be mixed",
        ));
    }
    let w = adjacency_from(&file.edges, meta.node_count)?;

    if companion_count == file.nodes.len() {
        // Structured file: p = m = 1, H is n x 1, shared C required.
        if meta.p != 1 || meta.m != 1 {
            return Err(field_err("meta", "companion nodes require p = 1 and m = 1"));
        }
        let c_flat = file
            .c
            .as_ref()
            .ok_or_else(|| field_err("C", "companion nodes require the shared output row C"))?;
        if c_flat.len() != meta.n {
            return Err(field_err(
                "C",
                format!("has {} entries, expected n = {}", c_flat.len(), meta.n),
            ));
        }
        let h = matrix_from(&file.h, meta.n, 1, "H")?;
        let mut nodes = Vec::with_capacity(meta.node_count);
        for (i, entry) in file.nodes.iter().enumerate() {
            let field = format!("nodes[{}]", i + 1);
            if entry.a.is_some() || entry.b.is_some() || entry.c.is_some() {
                return Err(field_err(field, "companion entries must not carry A/B/C"));
            }
            let companion = entry.companion.as_ref().expect("companion_count checked");
            if companion.a.len() != meta.n {
                return Err(field_err(
                    format!("{field}.companion.a"),
                    format!("has {} coefficients, expected n = {}", companion.a.len(), meta.n),
                ));
            }
            nodes.push(CompanionNode { a: companion.a.clone() });
        }
        let structured = StructuredNetworkSpec {
            nodes,
            w,
            h: h.column(0).to_owned(),
            c: Array1::from_vec(c_flat.clone()),
            delta: file.delta.clone(),
        };
        let violations = structured.validate();
        if !violations.is_empty() {
            return Err(netctrl::model::InvalidSpec { violations }.into());
        }
        let bridged = structured.as_network_spec();
        return Ok(ParsedNetwork::Structured { structured, bridged });
    }

    if file.c.is_some() {
        return Err(field_err("C", "shared output row is only valid for companion nodes"));
    }
    let h = matrix_from(&file.h, meta.n, meta.m, "H")?;
    let mut nodes = Vec::with_capacity(meta.node_count);
    for (i, entry) in file.nodes.iter().enumerate() {
        let field = format!("nodes[{}]", i + 1);
        let a = entry
            .a
            .as_ref()
            .ok_or_else(|| field_err(format!("{field}.A"), "missing state matrix"))?;
        let b = entry
            .b
            .as_ref()
            .ok_or_else(|| field_err(format!("{field}.B"), "missing input matrix"))?;
        let c = entry
            .c
            .as_ref()
            .ok_or_else(|| field_err(format!("{field}.C"), "missing output matrix"))?;
        let label = entry.label.clone().unwrap_or_else(|| (i + 1).to_string());
        nodes.push(NodeSystem::new(
            matrix_from(a, meta.n, meta.n, &format!("{field}.A"))?,
            matrix_from(b, meta.n, meta.p, &format!("{field}.B"))?,
            matrix_from(c, meta.m, meta.n, &format!("{field}.C"))?,
            label,
        ));
    }
    let spec = NetworkSpec {
        nodes,
        w,
        h,
        delta: file.delta.clone(),
    };
    let violations = spec.validate();
    if !violations.is_empty() {
        return Err(netctrl::model::InvalidSpec { violations }.into());
    }
    Ok(ParsedNetwork::General(spec))
}

/// Render a general spec back to the file format. Labels that match the
/// 1-based index are omitted.
pub fn render(spec: &NetworkSpec) -> NetworkFile {
    let (n, p, m) = spec.dims();
    let node_count = spec.node_count();
    let mut edges = Vec::new();
    for i in 0..node_count {
        for j in 0..node_count {
            if spec.w[(i, j)] != 0.0 {
                edges.push(EdgeEntry {
                    from: j + 1,
                    to: i + 1,
                    weight: spec.w[(i, j)],
                });
            }
        }
    }
    edges.sort_by_key(|e| (e.from, e.to));
    NetworkFile {
        h: matrix_rows(&spec.h),
        delta: spec.delta.clone(),
        c: None,
        meta: Meta { n, p, m, node_count },
        nodes: spec
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| NodeEntry {
                label: (node.label != (i + 1).to_string()).then(|| node.label.clone()),
                a: Some(matrix_rows(&node.a)),
                b: Some(matrix_rows(&node.b)),
                c: Some(matrix_rows(&node.c)),
                companion: None,
            })
            .collect(),
        edges,
        tolerances: None,
    }
}

pub fn render_structured(spec: &StructuredNetworkSpec) -> NetworkFile {
    let n = spec.state_dim();
    let node_count = spec.node_count();
    let mut edges = Vec::new();
    for i in 0..node_count {
        for j in 0..node_count {
            if spec.w[(i, j)] != 0.0 {
                edges.push(EdgeEntry {
                    from: j + 1,
                    to: i + 1,
                    weight: spec.w[(i, j)],
                });
            }
        }
    }
    edges.sort_by_key(|e| (e.from, e.to));
    NetworkFile {
        h: spec.h.iter().map(|&x| vec![x]).collect(),
        delta: spec.delta.clone(),
        c: Some(spec.c.to_vec()),
        meta: Meta { n, p: 1, m: 1, node_count },
        nodes: spec
            .nodes
            .iter()
            .map(|node| NodeEntry {
                label: None,
                a: None,
                b: None,
                c: None,
                companion: Some(CompanionEntry { a: node.a.clone() }),
            })
            .collect(),
        edges,
        tolerances: None,
    }
}

pub fn to_toml(file: &NetworkFile) -> String {
    toml::to_string(file).expect("network files serialize")
}

fn matrix_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
