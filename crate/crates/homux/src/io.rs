//! File formats: dataset CSV, scale-map JSON, candidate JSONL, network
//! edge-list TSV with JSON sidecar, stage-report TSV, multiplex JSON,
//! metric TSVs, and the synthetic ground-truth JSON.
//!
//! Item indices are 1-based in every file; the parsers convert back to the
//! 0-based in-memory convention. Every rendered artifact carries the tool
//! version and the configuration hash so outputs are traceable to the exact
//! run that produced them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::candidates::CandidateSet;
use crate::data::{
    InteractionType, Multiplet, MultiplexHypergraph, Provenance, ResponseMatrix, ScaleMap,
    ValidatedHyperedge,
};
use crate::dyadic::{CorrelationMethod, DyadicNetwork};
use crate::error::{Error, Result};
use crate::metrics::{LayerDegrees, ScalePattern, ScaleScore};
use crate::synth::TripletSpec;
use crate::validation::{StageReport, ValidationConfig};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version + config-hash stamp embedded in every artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stamp {
    pub version: String,
    pub config_sha256: String,
}

impl Stamp {
    pub fn new(config_sha256: impl Into<String>) -> Self {
        Self {
            version: TOOL_VERSION.to_string(),
            config_sha256: config_sha256.into(),
        }
    }

    fn tsv_header(&self) -> String {
        format!(
            "# homux {}\n# config: {}\n",
            self.version, self.config_sha256
        )
    }
}

/// SHA-256 hex digest of a byte string (config hashing, artifact hashing).
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(bytes);
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

// ---------------------------------------------------------------------------
// dataset CSV

/// Read an ordinal dataset: optional `# key: value` metadata lines, then a
/// header row of item labels, then one respondent per row of integer cells.
/// Missing or non-integer cells reject the file.
pub fn read_dataset_csv(path: &Path, layer_id: &str) -> Result<ResponseMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read dataset {}: {e}", path.display())))?;
    parse_dataset_csv(&text, layer_id).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_dataset_csv(text: &str, layer_id: &str) -> Result<ResponseMatrix> {
    let mut likert = ResponseMatrix::DEFAULT_LIKERT;
    let mut body_start = 0usize;
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(meta) = trimmed.strip_prefix('#') {
            body_start += line.len() + 1;
            if let Some((key, value)) = meta.split_once(':') {
                if key.trim() == "likert" {
                    likert = parse_likert_range(value.trim())?;
                }
            }
        } else {
            break;
        }
    }
    let body = &text[body_start.min(text.len())..];
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let item_ids: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Data(format!("bad header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows: Vec<Vec<i32>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("row {}: {e}", r + 2)))?;
        if record.len() != item_ids.len() {
            return Err(Error::Data(format!(
                "row {}: {} cells for {} items",
                r + 2,
                record.len(),
                item_ids.len()
            )));
        }
        let mut row = Vec::with_capacity(item_ids.len());
        for (c, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::Data(format!(
                    "row {}, item {:?}: missing value",
                    r + 2,
                    item_ids[c]
                )));
            }
            let v: i32 = cell.parse().map_err(|_| {
                Error::Data(format!(
                    "row {}, item {:?}: non-integer cell {cell:?}",
                    r + 2,
                    item_ids[c]
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let n = rows.len();
    let p = item_ids.len();
    let mut values = Array2::<i32>::zeros((n, p));
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            values[(r, c)] = v;
        }
    }
    ResponseMatrix::new(values, item_ids, layer_id, likert)
}

fn parse_likert_range(s: &str) -> Result<(i32, i32)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| Error::Data(format!("bad likert range {s:?}, expected LO..HI")))?;
    let lo: i32 = lo
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("bad likert lower bound {lo:?}")))?;
    let hi: i32 = hi
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("bad likert upper bound {hi:?}")))?;
    Ok((lo, hi))
}

pub fn render_dataset_csv(data: &ResponseMatrix) -> String {
    let (lo, hi) = data.likert_range();
    let mut out = format!("# likert: {lo}..{hi}\n");
    out.push_str(&data.item_ids().join(","));
    out.push('\n');
    for row in data.values().rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// scale map JSON

/// Scale map file: `{scale_name: [1-based item numbers], "unassigned": [..]}`.
/// When the `unassigned` list is present the coverage must be exact;
/// otherwise uncovered items become unassigned automatically.
pub fn read_scale_map(path: &Path, n_items: usize) -> Result<ScaleMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read scale map {}: {e}", path.display())))?;
    parse_scale_map(&text, n_items).map_err(|e| match e {
        Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_scale_map(text: &str, n_items: usize) -> Result<ScaleMap> {
    let raw: BTreeMap<String, Vec<u64>> = serde_json::from_str(text)
        .map_err(|e| Error::Schema(format!("scale map is not a JSON object of lists: {e}")))?;
    let mut scales: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut unassigned: Option<BTreeSet<usize>> = None;
    for (name, items) in raw {
        let set = items
            .iter()
            .map(|&v| {
                if v == 0 || v as usize > n_items {
                    Err(Error::Schema(format!(
                        "scale {name:?}: item {v} outside 1..{n_items}"
                    )))
                } else {
                    Ok(v as usize - 1)
                }
            })
            .collect::<Result<BTreeSet<usize>>>()?;
        if name == "unassigned" {
            unassigned = Some(set);
        } else {
            scales.insert(name, set);
        }
    }
    match unassigned {
        Some(u) => ScaleMap::new(scales, u, n_items),
        None => ScaleMap::with_complement(scales, n_items),
    }
}

pub fn render_scale_map(map: &ScaleMap) -> String {
    let mut obj: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (name, items) in map.scales() {
        obj.insert(name.clone(), items.iter().map(|&i| i as u64 + 1).collect());
    }
    if !map.unassigned().is_empty() {
        obj.insert(
            "unassigned".to_string(),
            map.unassigned().iter().map(|&i| i as u64 + 1).collect(),
        );
    }
    serde_json::to_string_pretty(&obj).expect("serializable") + "\n"
}

// ---------------------------------------------------------------------------
// candidate pool JSONL

#[derive(Debug, Serialize, Deserialize)]
struct CandidateLine {
    items: Vec<u64>,
    order: usize,
    provenance: Provenance,
}

/// One multiplet per line with provenance; lets validation resume without
/// regenerating the pool.
pub fn render_candidates_jsonl(set: &CandidateSet) -> String {
    let mut out = String::new();
    for (m, prov) in set.iter() {
        let line = CandidateLine {
            items: m.items().iter().map(|&i| i as u64 + 1).collect(),
            order: m.order(),
            provenance: prov,
        };
        out.push_str(&serde_json::to_string(&line).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn parse_candidates_jsonl(
    text: &str,
    n_items: usize,
    k_min: usize,
    k_max: usize,
) -> Result<CandidateSet> {
    let mut set = CandidateSet::new(k_min, k_max)?;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: CandidateLine = serde_json::from_str(line)
            .map_err(|e| Error::Schema(format!("candidate line {}: {e}", lineno + 1)))?;
        let items: Vec<usize> = parsed
            .items
            .iter()
            .map(|&v| {
                if v == 0 || v as usize > n_items {
                    Err(Error::Schema(format!(
                        "candidate line {}: item {v} outside 1..{n_items}",
                        lineno + 1
                    )))
                } else {
                    Ok(v as usize - 1)
                }
            })
            .collect::<Result<Vec<usize>>>()?;
        if items.len() != parsed.order {
            return Err(Error::Schema(format!(
                "candidate line {}: order {} does not match {} items",
                lineno + 1,
                parsed.order,
                items.len()
            )));
        }
        set.insert(Multiplet::from_unsorted(items, n_items)?, parsed.provenance)?;
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// dyadic network TSV + sidecar

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkMeta {
    pub version: String,
    pub config_sha256: String,
    pub method: CorrelationMethod,
    pub lambda_selected: f64,
    pub ebic_gamma: f64,
    pub n_items: usize,
    pub n_edges: usize,
    pub n_components: usize,
}

pub fn render_network_tsv(net: &DyadicNetwork, stamp: &Stamp) -> String {
    let mut out = stamp.tsv_header();
    out.push_str("i\tj\tpartial_corr\n");
    for (i, j, w) in net.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", i + 1, j + 1, w);
    }
    out
}

pub fn render_network_meta(
    net: &DyadicNetwork,
    method: CorrelationMethod,
    stamp: &Stamp,
) -> String {
    let meta = NetworkMeta {
        version: stamp.version.clone(),
        config_sha256: stamp.config_sha256.clone(),
        method,
        lambda_selected: net.lambda_selected,
        ebic_gamma: net.ebic_gamma,
        n_items: net.n_items(),
        n_edges: net.n_edges(),
        n_components: net.n_components(),
    };
    serde_json::to_string_pretty(&meta).expect("serializable") + "\n"
}

/// Rebuild a network from its exported edge list and sidecar. The precision
/// matrix is not part of the export; the loaded network carries an identity
/// placeholder, which the candidate-generation stages never read.
pub fn parse_network_tsv(text: &str, meta: &NetworkMeta) -> Result<DyadicNetwork> {
    let p = meta.n_items;
    let mut pc = Array2::<f64>::zeros((p, p));
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("i\t") {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 3 {
            return Err(Error::Schema(format!(
                "network line {}: expected 3 columns",
                lineno + 1
            )));
        }
        let i: usize = cells[0]
            .parse()
            .map_err(|_| Error::Schema(format!("network line {}: bad index", lineno + 1)))?;
        let j: usize = cells[1]
            .parse()
            .map_err(|_| Error::Schema(format!("network line {}: bad index", lineno + 1)))?;
        let w: f64 = cells[2]
            .parse()
            .map_err(|_| Error::Schema(format!("network line {}: bad weight", lineno + 1)))?;
        if i == 0 || j == 0 || i > p || j > p {
            return Err(Error::Schema(format!(
                "network line {}: index outside 1..{p}",
                lineno + 1
            )));
        }
        pc[(i - 1, j - 1)] = w;
        pc[(j - 1, i - 1)] = w;
    }
    Ok(DyadicNetwork {
        partial_corr: pc,
        precision: Array2::eye(p),
        lambda_selected: meta.lambda_selected,
        ebic_gamma: meta.ebic_gamma,
    })
}

// ---------------------------------------------------------------------------
// stage report TSV + metadata

pub fn render_stage_report_tsv(report: &StageReport, stamp: &Stamp) -> String {
    let mut out = stamp.tsv_header();
    out.push_str("items\torder\tprovenance\tstage\tomega\tp_raw\tp_adj\tci_low\tci_high\tpassed\treason\n");
    let fmt_opt = |v: Option<f64>| v.map_or("NA".to_string(), |x| x.to_string());
    for r in report.records() {
        let items: Vec<String> = r.multiplet.items().iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            items.join(","),
            r.multiplet.order(),
            r.provenance,
            r.stage,
            fmt_opt(r.omega),
            fmt_opt(r.p_raw),
            fmt_opt(r.p_adj),
            fmt_opt(r.ci.map(|c| c.0)),
            fmt_opt(r.ci.map(|c| c.1)),
            r.passed,
            r.reason.map_or("NA".to_string(), |x| x.to_string()),
        );
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValidationMeta {
    pub version: String,
    pub config_sha256: String,
    pub layer: String,
    pub validation: ValidationConfig,
    pub n_candidates: usize,
    pub stage1_passed: usize,
    pub stage2_passed: usize,
    pub stage3_passed: usize,
}

pub fn render_validation_meta(meta: &ValidationMeta) -> String {
    serde_json::to_string_pretty(meta).expect("serializable") + "\n"
}

// ---------------------------------------------------------------------------
// hyperedges and multiplex JSON

#[derive(Debug, Serialize, Deserialize)]
struct HyperedgeRecord {
    items: Vec<u64>,
    omega: f64,
    ci: [f64; 2],
    p_adj: f64,
    interaction_type: InteractionType,
    provenance: Provenance,
}

impl HyperedgeRecord {
    fn from_edge(e: &ValidatedHyperedge) -> Self {
        Self {
            items: e.multiplet.items().iter().map(|&i| i as u64 + 1).collect(),
            omega: e.omega,
            ci: [e.ci_low, e.ci_high],
            p_adj: e.p_adj,
            interaction_type: e.interaction_type,
            provenance: e.provenance,
        }
    }

    fn to_edge(&self, n_items: usize, effect_floor: f64) -> Result<ValidatedHyperedge> {
        let items: Vec<usize> = self
            .items
            .iter()
            .map(|&v| {
                if v == 0 || v as usize > n_items {
                    Err(Error::Schema(format!(
                        "hyperedge item {v} outside 1..{n_items}"
                    )))
                } else {
                    Ok(v as usize - 1)
                }
            })
            .collect::<Result<Vec<usize>>>()?;
        let edge = ValidatedHyperedge::new(
            Multiplet::from_unsorted(items, n_items)?,
            self.omega,
            self.ci[0],
            self.ci[1],
            self.p_adj,
            self.provenance,
            effect_floor,
        )?;
        if edge.interaction_type != self.interaction_type {
            return Err(Error::Schema(format!(
                "hyperedge {} labeled {} but omega sign says {}",
                edge.multiplet, self.interaction_type, edge.interaction_type
            )));
        }
        Ok(edge)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerEdgesFile {
    version: String,
    config_sha256: String,
    layer: String,
    effect_floor: f64,
    hyperedges: Vec<HyperedgeRecord>,
}

/// Per-layer validated hyperedges (both signs together).
pub fn render_hyperedges_json(
    layer: &str,
    edges: &[ValidatedHyperedge],
    effect_floor: f64,
    stamp: &Stamp,
) -> String {
    let file = LayerEdgesFile {
        version: stamp.version.clone(),
        config_sha256: stamp.config_sha256.clone(),
        layer: layer.to_string(),
        effect_floor,
        hyperedges: edges.iter().map(HyperedgeRecord::from_edge).collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

pub fn parse_hyperedges_json(text: &str, n_items: usize) -> Result<Vec<ValidatedHyperedge>> {
    let file: LayerEdgesFile = serde_json::from_str(text)
        .map_err(|e| Error::Schema(format!("hyperedges file: {e}")))?;
    file.hyperedges
        .iter()
        .map(|r| r.to_edge(n_items, file.effect_floor))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct MultiplexFile {
    version: String,
    config_sha256: String,
    interaction_type: InteractionType,
    effect_floor: f64,
    nodes: Vec<String>,
    layers: BTreeMap<String, Vec<HyperedgeRecord>>,
}

pub fn render_multiplex_json(
    mux: &MultiplexHypergraph,
    effect_floor: f64,
    stamp: &Stamp,
) -> String {
    let layers = mux
        .layers()
        .iter()
        .map(|(id, edges)| {
            (
                id.clone(),
                edges.iter().map(HyperedgeRecord::from_edge).collect(),
            )
        })
        .collect();
    let file = MultiplexFile {
        version: stamp.version.clone(),
        config_sha256: stamp.config_sha256.clone(),
        interaction_type: mux.interaction_type(),
        effect_floor,
        nodes: mux.node_ids().to_vec(),
        layers,
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

pub fn parse_multiplex_json(text: &str) -> Result<MultiplexHypergraph> {
    let file: MultiplexFile = serde_json::from_str(text)
        .map_err(|e| Error::Schema(format!("multiplex file: {e}")))?;
    let n = file.nodes.len();
    let mut mux = MultiplexHypergraph::new(file.nodes.clone(), file.interaction_type);
    for (layer, records) in &file.layers {
        let edges = records
            .iter()
            .map(|r| r.to_edge(n, file.effect_floor))
            .collect::<Result<Vec<_>>>()?;
        mux.insert_layer(layer.clone(), edges)?;
    }
    Ok(mux)
}

// ---------------------------------------------------------------------------
// metric TSVs

/// Item-level table: item number, normalized weighted degree, subscale.
/// Rows with zero degree are omitted; sort is by normalized degree
/// descending, ties by item number.
pub fn render_degrees_tsv(degrees: &LayerDegrees, map: Option<&ScaleMap>, stamp: &Stamp) -> String {
    let mut out = stamp.tsv_header();
    out.push_str("item\tnormalized_weighted_degree\tsubscale\n");
    let mut rows: Vec<(usize, f64)> = degrees
        .normalized
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, v)| *v > 0.0)
        .collect();
    rows.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite degrees")
            .then_with(|| a.0.cmp(&b.0))
    });
    for (item, value) in rows {
        let scale = map
            .and_then(|m| m.scale_of(item))
            .unwrap_or(crate::metrics::UNASSIGNED_PATTERN);
        let _ = writeln!(out, "{}\t{}\t{}", item + 1, value, scale);
    }
    out
}

/// Scale-level table: scale, mean per-item degree, NSWD. Sorted by NSWD
/// descending, ties by scale name.
pub fn render_nswd_tsv(scores: &BTreeMap<String, ScaleScore>, stamp: &Stamp) -> String {
    let mut out = stamp.tsv_header();
    out.push_str("scale\ts_bar\tnswd\n");
    let mut rows: Vec<(&String, &ScaleScore)> = scores.iter().collect();
    rows.sort_by(|a, b| {
        b.1.nswd
            .partial_cmp(&a.1.nswd)
            .expect("finite scores")
            .then_with(|| a.0.cmp(b.0))
    });
    for (scale, score) in rows {
        let _ = writeln!(out, "{}\t{}\t{}", scale, score.s_bar, score.nswd);
    }
    out
}

/// Pattern table: scale set, orders present, hyperedge count, cumulative
/// weight, monoscale flag. Already ranked by the extraction.
pub fn render_patterns_tsv(patterns: &[ScalePattern], stamp: &Stamp) -> String {
    let mut out = stamp.tsv_header();
    out.push_str("scales\torders\thyperedge_count\tcumulative_weight\tmonoscale\n");
    for p in patterns {
        let scales: Vec<&str> = p.scale_set.iter().map(String::as_str).collect();
        let orders: Vec<String> = p.orders_present.iter().map(|o| o.to_string()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            scales.join(","),
            orders.join(","),
            p.hyperedge_count,
            p.cumulative_weight,
            p.is_monoscale(),
        );
    }
    out
}

// ---------------------------------------------------------------------------
// synthetic ground truth

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthBlock {
    /// 1-based column numbers of the planted triplet.
    pub items: Vec<u64>,
    pub loadings: [f64; 3],
    pub e_cov: f64,
    pub analytic_omega: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub version: String,
    pub seed: u64,
    pub n_samples: usize,
    pub regime: String,
    /// Number of Likert levels when discretized; absent for continuous output.
    pub likert_levels: Option<usize>,
    pub blocks: Vec<GroundTruthBlock>,
}

pub fn render_ground_truth(file: &GroundTruthFile) -> String {
    serde_json::to_string_pretty(file).expect("serializable") + "\n"
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruthFile> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("ground truth file: {e}")))
}

impl GroundTruthBlock {
    pub fn from_planted(p: &crate::synth::PlantedTriplet) -> Self {
        Self {
            items: p.items.iter().map(|&i| i as u64 + 1).collect(),
            loadings: [p.spec.loadings.0, p.spec.loadings.1, p.spec.loadings.2],
            e_cov: p.spec.e_cov,
            analytic_omega: p.analytic_omega,
        }
    }

    pub fn spec(&self) -> Result<TripletSpec> {
        TripletSpec::new(
            (self.loadings[0], self.loadings[1], self.loadings[2]),
            self.e_cov,
        )
    }

    /// Planted items as a 0-based multiplet.
    pub fn multiplet(&self, n_items: usize) -> Result<Multiplet> {
        let items: Vec<usize> = self
            .items
            .iter()
            .map(|&v| {
                if v == 0 || v as usize > n_items {
                    Err(Error::Schema(format!(
                        "ground truth item {v} outside 1..{n_items}"
                    )))
                } else {
                    Ok(v as usize - 1)
                }
            })
            .collect::<Result<Vec<usize>>>()?;
        Multiplet::from_unsorted(items, n_items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Provenance;

    #[test]
    fn dataset_round_trip_with_likert_metadata() {
        let text = "# likert: 0..6\na,b,c\n0,3,6\n1,1,1\n2,4,0\n";
        let data = parse_dataset_csv(text, "T").unwrap();
        assert_eq!(data.likert_range(), (0, 6));
        assert_eq!(data.n_respondents(), 3);
        assert_eq!(render_dataset_csv(&data), text);
    }

    #[test]
    fn dataset_rejects_missing_and_non_integer_cells() {
        assert!(matches!(
            parse_dataset_csv("a,b,c\n0,,1\n", "T"),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            parse_dataset_csv("a,b,c\n0,x,1\n", "T"),
            Err(Error::Data(_))
        ));
        // out-of-range for declared likert
        assert!(matches!(
            parse_dataset_csv("# likert: 0..2\na,b,c\n0,3,1\n", "T"),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn scale_map_round_trip() {
        let text = r#"{"A":[1,2],"B":[3],"unassigned":[4]}"#;
        let map = parse_scale_map(text, 4).unwrap();
        assert_eq!(map.scale_of(0), Some("A"));
        assert_eq!(map.scale_of(3), None);
        let rendered = render_scale_map(&map);
        let reparsed = parse_scale_map(&rendered, 4).unwrap();
        assert_eq!(map, reparsed);
    }

    #[test]
    fn scale_map_incomplete_coverage_needs_complement() {
        // explicit unassigned that misses item 4 -> error
        assert!(parse_scale_map(r#"{"A":[1,2],"unassigned":[3]}"#, 4).is_err());
        // no unassigned key -> complement fills the gap
        let map = parse_scale_map(r#"{"A":[1,2]}"#, 4).unwrap();
        assert_eq!(map.unassigned().len(), 2);
    }

    #[test]
    fn candidates_jsonl_round_trip() {
        let mut set = CandidateSet::new(3, 5).unwrap();
        set.insert(
            Multiplet::new(vec![0, 1, 2], 9).unwrap(),
            Provenance::NetworkBased,
        )
        .unwrap();
        set.insert(
            Multiplet::new(vec![2, 5, 7, 8], 9).unwrap(),
            Provenance::SubscaleInter,
        )
        .unwrap();
        let text = render_candidates_jsonl(&set);
        let parsed = parse_candidates_jsonl(&text, 9, 3, 5).unwrap();
        let a: Vec<_> = set.iter().map(|(m, p)| (m.clone(), p)).collect();
        let b: Vec<_> = parsed.iter().map(|(m, p)| (m.clone(), p)).collect();
        assert_eq!(a, b);
        // serialized form is deterministic
        assert_eq!(text, render_candidates_jsonl(&parsed));
    }

    #[test]
    fn network_round_trip_preserves_edges() {
        let mut pc = Array2::<f64>::zeros((4, 4));
        pc[(0, 1)] = 0.25;
        pc[(1, 0)] = 0.25;
        pc[(2, 3)] = -0.125;
        pc[(3, 2)] = -0.125;
        let net = DyadicNetwork {
            partial_corr: pc,
            precision: Array2::eye(4),
            lambda_selected: 0.07,
            ebic_gamma: 0.5,
        };
        let stamp = Stamp::new("deadbeef");
        let tsv = render_network_tsv(&net, &stamp);
        let meta: NetworkMeta = serde_json::from_str(&render_network_meta(
            &net,
            CorrelationMethod::Nonparanormal,
            &stamp,
        ))
        .unwrap();
        let loaded = parse_network_tsv(&tsv, &meta).unwrap();
        assert_eq!(loaded.partial_corr, net.partial_corr);
        assert_eq!(loaded.lambda_selected, net.lambda_selected);
        assert_eq!(meta.n_edges, 2);
    }

    #[test]
    fn multiplex_round_trip_revalidates() {
        let mut mux = MultiplexHypergraph::new(
            (0..5).map(|i| format!("v{}", i + 1)).collect(),
            InteractionType::Synergy,
        );
        let e = ValidatedHyperedge::new(
            Multiplet::new(vec![0, 2, 4], 5).unwrap(),
            -0.3,
            -0.4,
            -0.21,
            0.004,
            Provenance::NetworkBased,
            0.15,
        )
        .unwrap();
        mux.insert_layer("L1", vec![e]).unwrap();
        mux.insert_layer("L2", vec![]).unwrap();
        let stamp = Stamp::new("cafe");
        let text = render_multiplex_json(&mux, 0.15, &stamp);
        let parsed = parse_multiplex_json(&text).unwrap();
        assert_eq!(parsed, mux);
        // corrupting the sign is caught on parse
        let bad = text.replace("\"omega\": -0.3", "\"omega\": 0.3");
        assert!(parse_multiplex_json(&bad).is_err());
    }

    #[test]
    fn ground_truth_round_trip() {
        let spec = TripletSpec::new((0.6, 0.6, 0.6), 0.22).unwrap();
        let file = GroundTruthFile {
            version: TOOL_VERSION.to_string(),
            seed: 7,
            n_samples: 100,
            regime: "redundant".to_string(),
            likert_levels: Some(5),
            blocks: vec![GroundTruthBlock {
                items: vec![1, 2, 3],
                loadings: [0.6, 0.6, 0.6],
                e_cov: 0.22,
                analytic_omega: crate::synth::analytic_omega(&spec).unwrap(),
            }],
        };
        let text = render_ground_truth(&file);
        let parsed = parse_ground_truth(&text).unwrap();
        assert_eq!(parsed.blocks[0].items, vec![1, 2, 3]);
        assert_eq!(parsed.blocks[0].spec().unwrap(), spec);
        assert_eq!(
            parsed.blocks[0].multiplet(27).unwrap().items(),
            &[0, 1, 2]
        );
    }
}
