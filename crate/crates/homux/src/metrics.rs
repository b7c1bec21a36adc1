//! Node- and subscale-level influence metrics over validated multiplexes:
//! weighted degrees with layer normalization, the Normalized Scale Weighted
//! Degree (NSWD), and ranked scale co-involvement patterns.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::data::{MultiplexHypergraph, ScaleMap};

/// Pattern label for hyperedges made entirely of non-scale items.
pub const UNASSIGNED_PATTERN: &str = "UNASSIGNED";

/// Raw and normalized weighted degrees for one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDegrees {
    /// `k_i = sum of incident hyperedge weights` (signed).
    pub raw: Vec<f64>,
    /// `|k_i| / sum of |w_e|` over the layer; all zeros for an empty layer.
    pub normalized: Vec<f64>,
    /// `sum of |w_e|` over the layer.
    pub total_strength: f64,
}

/// Per-layer degree profiles over the shared node set.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDegreeProfile {
    pub layers: BTreeMap<String, LayerDegrees>,
    pub n_items: usize,
}

/// Weighted degree of every node in every layer.
///
/// Within a layer all hyperedges share one sign, so the absolute value in
/// the normalization is a labeling convenience, not a sign correction.
pub fn weighted_degrees(mux: &MultiplexHypergraph) -> NodeDegreeProfile {
    let n = mux.n_nodes();
    let mut layers = BTreeMap::new();
    for (layer_id, edges) in mux.layers() {
        let mut raw = vec![0.0; n];
        let mut total = 0.0;
        for e in edges {
            total += e.omega.abs();
            for &i in e.multiplet.items() {
                raw[i] += e.omega;
            }
        }
        let normalized = if total > 0.0 {
            raw.iter().map(|k| k.abs() / total).collect()
        } else {
            vec![0.0; n]
        };
        layers.insert(
            layer_id.clone(),
            LayerDegrees {
                raw,
                normalized,
                total_strength: total,
            },
        );
    }
    NodeDegreeProfile { layers, n_items: n }
}

/// Per-scale summary: average per-item normalized degree and its
/// layer-rescaled share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleScore {
    /// Mean normalized weighted degree over the scale's items.
    pub s_bar: f64,
    /// `s_bar / sum of s_bar over scales` -- the NSWD.
    pub nswd: f64,
}

/// Normalized Scale Weighted Degree per layer and scale.
///
/// Unassigned items contribute to no scale (they still appear in node-level
/// reports). A layer with no activity has no defined NSWD and is omitted
/// with a warning.
pub fn nswd(
    profile: &NodeDegreeProfile,
    map: &ScaleMap,
) -> BTreeMap<String, BTreeMap<String, ScaleScore>> {
    let mut out = BTreeMap::new();
    for (layer_id, degrees) in &profile.layers {
        let mut s_bars: BTreeMap<String, f64> = BTreeMap::new();
        for (scale, items) in map.scales() {
            let sum: f64 = items.iter().map(|&i| degrees.normalized[i]).sum();
            s_bars.insert(scale.clone(), sum / items.len() as f64);
        }
        let total: f64 = s_bars.values().sum();
        if total <= 0.0 {
            log::warn!("layer {layer_id:?} has no scale activity; NSWD undefined");
            continue;
        }
        let scores = s_bars
            .into_iter()
            .map(|(scale, s_bar)| {
                (
                    scale,
                    ScaleScore {
                        s_bar,
                        nswd: s_bar / total,
                    },
                )
            })
            .collect();
        out.insert(layer_id.clone(), scores);
    }
    out
}

/// Aggregated scale co-involvement pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalePattern {
    pub scale_set: BTreeSet<String>,
    pub orders_present: BTreeSet<usize>,
    pub hyperedge_count: usize,
    pub cumulative_weight: f64,
}

impl ScalePattern {
    pub fn is_monoscale(&self) -> bool {
        self.scale_set.len() == 1 && !self.scale_set.contains(UNASSIGNED_PATTERN)
    }
}

/// Scale patterns per layer, ranked by |cumulative weight| descending, then
/// hyperedge count descending, then lexicographic scale set (the final
/// deterministic tie-break).
///
/// Each hyperedge maps to the set of scales its items belong to; a
/// hyperedge made only of unassigned items lands in the flagged
/// `UNASSIGNED` pattern.
pub fn extract_patterns(
    mux: &MultiplexHypergraph,
    map: &ScaleMap,
) -> BTreeMap<String, Vec<ScalePattern>> {
    let mut out = BTreeMap::new();
    for (layer_id, edges) in mux.layers() {
        let mut agg: BTreeMap<BTreeSet<String>, ScalePattern> = BTreeMap::new();
        for e in edges {
            let mut scale_set: BTreeSet<String> = e
                .multiplet
                .items()
                .iter()
                .filter_map(|&i| map.scale_of(i).map(str::to_string))
                .collect();
            if scale_set.is_empty() {
                log::warn!(
                    "layer {layer_id:?}: hyperedge {} has only unassigned items",
                    e.multiplet
                );
                scale_set.insert(UNASSIGNED_PATTERN.to_string());
            }
            let entry = agg.entry(scale_set.clone()).or_insert(ScalePattern {
                scale_set,
                orders_present: BTreeSet::new(),
                hyperedge_count: 0,
                cumulative_weight: 0.0,
            });
            entry.orders_present.insert(e.multiplet.order());
            entry.hyperedge_count += 1;
            entry.cumulative_weight += e.omega;
        }
        let mut patterns: Vec<ScalePattern> = agg.into_values().collect();
        patterns.sort_by(|a, b| {
            b.cumulative_weight
                .abs()
                .partial_cmp(&a.cumulative_weight.abs())
                .expect("finite weights")
                .then_with(|| b.hyperedge_count.cmp(&a.hyperedge_count))
                .then_with(|| a.scale_set.cmp(&b.scale_set))
        });
        out.insert(layer_id.clone(), patterns);
    }
    out
}
