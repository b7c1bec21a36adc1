//! Core domain types shared by every stage: response matrices, scale maps,
//! multiplets, validated hyperedges, and the two multiplex hypergraphs.
//!
//! Item indices are 0-based everywhere in memory; file formats and reports
//! use 1-based numbering (the conversion lives in the I/O layer).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinal responses for one diagnostic layer: respondents x items.
///
/// All types in this module are immutable after construction and safe to
/// share across worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    values: Array2<i32>,
    item_ids: Vec<String>,
    layer_id: String,
    likert: (i32, i32),
}

impl ResponseMatrix {
    /// Likert range used when a dataset declares none.
    pub const DEFAULT_LIKERT: (i32, i32) = (0, 4);

    pub fn new(
        values: Array2<i32>,
        item_ids: Vec<String>,
        layer_id: impl Into<String>,
        likert: (i32, i32),
    ) -> Result<Self> {
        let layer_id = layer_id.into();
        if item_ids.len() != values.ncols() {
            return Err(Error::Schema(format!(
                "layer {layer_id}: {} item ids for {} columns",
                item_ids.len(),
                values.ncols()
            )));
        }
        if item_ids.len() < 3 {
            return Err(Error::Schema(format!(
                "layer {layer_id}: need at least 3 items, got {}",
                item_ids.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &item_ids {
            if !seen.insert(id) {
                return Err(Error::Schema(format!(
                    "layer {layer_id}: duplicate item id {id:?}"
                )));
            }
        }
        if likert.0 > likert.1 {
            return Err(Error::Schema(format!(
                "layer {layer_id}: empty Likert range {}..{}",
                likert.0, likert.1
            )));
        }
        for ((r, c), &v) in values.indexed_iter() {
            if v < likert.0 || v > likert.1 {
                return Err(Error::Data(format!(
                    "layer {layer_id}: value {v} at row {} item {:?} outside Likert range {}..{}",
                    r + 1,
                    item_ids[c],
                    likert.0,
                    likert.1
                )));
            }
        }
        Ok(Self {
            values,
            item_ids,
            layer_id,
            likert,
        })
    }

    pub fn n_respondents(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_items(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<i32> {
        &self.values
    }

    pub fn column(&self, item: usize) -> ArrayView1<'_, i32> {
        self.values.column(item)
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn layer_id(&self) -> &str {
        &self.layer_id
    }

    pub fn likert_range(&self) -> (i32, i32) {
        self.likert
    }
}

/// Row-concatenate two layers measured on the identical item set.
///
/// The merged layer id joins the two names; respondent rows keep their
/// original order (`a` first).
pub fn merge_layers(a: &ResponseMatrix, b: &ResponseMatrix) -> Result<ResponseMatrix> {
    if a.item_ids != b.item_ids {
        return Err(Error::Schema(format!(
            "cannot merge layers {:?} and {:?}: item sets differ",
            a.layer_id, b.layer_id
        )));
    }
    if a.likert != b.likert {
        return Err(Error::Schema(format!(
            "cannot merge layers {:?} and {:?}: Likert ranges differ",
            a.layer_id, b.layer_id
        )));
    }
    let mut values = Array2::zeros((a.n_respondents() + b.n_respondents(), a.n_items()));
    for (r, row) in a.values.rows().into_iter().enumerate() {
        values.row_mut(r).assign(&row);
    }
    for (r, row) in b.values.rows().into_iter().enumerate() {
        values.row_mut(a.n_respondents() + r).assign(&row);
    }
    ResponseMatrix::new(
        values,
        a.item_ids.clone(),
        format!("{}_{}", a.layer_id, b.layer_id),
        a.likert,
    )
}

/// Partition-with-exceptions of items into named subscales.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleMap {
    scales: BTreeMap<String, BTreeSet<usize>>,
    unassigned: BTreeSet<usize>,
    item_to_scale: Vec<Option<String>>,
}

impl ScaleMap {
    /// Build and validate: scales pairwise disjoint and non-empty,
    /// scales plus `unassigned` cover `0..n_items` exactly.
    pub fn new(
        scales: BTreeMap<String, BTreeSet<usize>>,
        unassigned: BTreeSet<usize>,
        n_items: usize,
    ) -> Result<Self> {
        let mut item_to_scale: Vec<Option<String>> = vec![None; n_items];
        for (name, items) in &scales {
            if items.is_empty() {
                return Err(Error::Schema(format!("scale {name:?} is empty")));
            }
            for &i in items {
                if i >= n_items {
                    return Err(Error::Schema(format!(
                        "scale {name:?} references item {} beyond {n_items} items",
                        i + 1
                    )));
                }
                if item_to_scale[i].is_some() {
                    return Err(Error::Schema(format!(
                        "item {} assigned to more than one scale",
                        i + 1
                    )));
                }
                item_to_scale[i] = Some(name.clone());
            }
        }
        for &i in &unassigned {
            if i >= n_items {
                return Err(Error::Schema(format!(
                    "unassigned item {} beyond {n_items} items",
                    i + 1
                )));
            }
            if item_to_scale[i].is_some() {
                return Err(Error::Schema(format!(
                    "item {} both in a scale and unassigned",
                    i + 1
                )));
            }
        }
        for (i, slot) in item_to_scale.iter().enumerate() {
            if slot.is_none() && !unassigned.contains(&i) {
                return Err(Error::Schema(format!(
                    "item {} neither in a scale nor listed as unassigned",
                    i + 1
                )));
            }
        }
        Ok(Self {
            scales,
            unassigned,
            item_to_scale,
        })
    }

    /// Convenience constructor: whatever is not in a scale becomes unassigned.
    pub fn with_complement(
        scales: BTreeMap<String, BTreeSet<usize>>,
        n_items: usize,
    ) -> Result<Self> {
        let mut covered = BTreeSet::new();
        for items in scales.values() {
            covered.extend(items.iter().copied());
        }
        let unassigned = (0..n_items).filter(|i| !covered.contains(i)).collect();
        Self::new(scales, unassigned, n_items)
    }

    pub fn scales(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.scales
    }

    pub fn unassigned(&self) -> &BTreeSet<usize> {
        &self.unassigned
    }

    pub fn n_items(&self) -> usize {
        self.item_to_scale.len()
    }

    pub fn scale_of(&self, item: usize) -> Option<&str> {
        self.item_to_scale
            .get(item)
            .and_then(|s| s.as_deref())
    }
}

/// An ordered set of 3+ item indices under evaluation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiplet {
    items: Vec<usize>,
}

impl Multiplet {
    /// Item indices must be strictly increasing, all below `n_items`,
    /// and at least 3 of them (the interaction measure needs order >= 3).
    pub fn new(items: Vec<usize>, n_items: usize) -> Result<Self> {
        if items.len() < 3 {
            return Err(Error::Structural(format!(
                "multiplet needs order >= 3, got {}",
                items.len()
            )));
        }
        for w in items.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Structural(format!(
                    "multiplet items must be strictly increasing, got {items:?}"
                )));
            }
        }
        if let Some(&last) = items.last() {
            if last >= n_items {
                return Err(Error::Structural(format!(
                    "multiplet item {} out of range for {n_items} items",
                    last + 1
                )));
            }
        }
        Ok(Self { items })
    }

    /// Sort-and-check constructor for unsorted input.
    pub fn from_unsorted(mut items: Vec<usize>, n_items: usize) -> Result<Self> {
        items.sort_unstable();
        items.dedup();
        Self::new(items, n_items)
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn order(&self) -> usize {
        self.items.len()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    /// All (k-1)-subsets, in deterministic order. Empty for order 3.
    pub fn sub_multiplets(&self) -> Vec<Multiplet> {
        if self.order() <= 3 {
            return Vec::new();
        }
        (0..self.items.len())
            .map(|skip| {
                let items: Vec<usize> = self
                    .items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                Multiplet { items }
            })
            .collect()
    }

    /// Stable textual id, used in seed-derivation contexts and reports
    /// (0-based, dash-joined).
    pub fn id_string(&self) -> String {
        self.items
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for Multiplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.items.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?; // 1-based in human-facing text
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionType {
    Synergy,
    Redundancy,
}

impl fmt::Display for InteractionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InteractionType::Synergy => write!(f, "synergy"),
            InteractionType::Redundancy => write!(f, "redundancy"),
        }
    }
}

/// Where a candidate multiplet came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    NetworkBased,
    SubscaleIntra,
    SubscaleInter,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::NetworkBased => write!(f, "network_based"),
            Provenance::SubscaleIntra => write!(f, "subscale_intra"),
            Provenance::SubscaleInter => write!(f, "subscale_inter"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "network_based" => Ok(Provenance::NetworkBased),
            "subscale_intra" => Ok(Provenance::SubscaleIntra),
            "subscale_inter" => Ok(Provenance::SubscaleInter),
            other => Err(Error::Schema(format!("unknown provenance {other:?}"))),
        }
    }
}

/// A multiplet that survived all three validation stages.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedHyperedge {
    pub multiplet: Multiplet,
    /// Interaction weight, in nats.
    pub omega: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_adj: f64,
    pub interaction_type: InteractionType,
    pub provenance: Provenance,
}

impl ValidatedHyperedge {
    /// Constructor enforcing the sign/CI/floor invariants.
    pub fn new(
        multiplet: Multiplet,
        omega: f64,
        ci_low: f64,
        ci_high: f64,
        p_adj: f64,
        provenance: Provenance,
        effect_floor: f64,
    ) -> Result<Self> {
        if !omega.is_finite() || !ci_low.is_finite() || !ci_high.is_finite() {
            return Err(Error::Structural(format!(
                "hyperedge {multiplet}: non-finite weight or interval"
            )));
        }
        if !(ci_low <= omega && omega <= ci_high) {
            return Err(Error::Structural(format!(
                "hyperedge {multiplet}: omega {omega} outside interval [{ci_low}, {ci_high}]"
            )));
        }
        if ci_low <= 0.0 && ci_high >= 0.0 {
            return Err(Error::Structural(format!(
                "hyperedge {multiplet}: interval [{ci_low}, {ci_high}] contains zero"
            )));
        }
        if omega.abs() < effect_floor {
            return Err(Error::Structural(format!(
                "hyperedge {multiplet}: |omega| = {} below effect floor {effect_floor}",
                omega.abs()
            )));
        }
        if !(0.0..=1.0).contains(&p_adj) {
            return Err(Error::Structural(format!(
                "hyperedge {multiplet}: p_adj {p_adj} outside [0, 1]"
            )));
        }
        let interaction_type = if omega > 0.0 {
            InteractionType::Redundancy
        } else {
            InteractionType::Synergy
        };
        Ok(Self {
            multiplet,
            omega,
            ci_low,
            ci_high,
            p_adj,
            interaction_type,
            provenance,
        })
    }
}

/// Layered hypergraph: shared node set, one hyperedge set per diagnostic
/// layer, every edge carrying the same interaction sign.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexHypergraph {
    node_ids: Vec<String>,
    layers: BTreeMap<String, Vec<ValidatedHyperedge>>,
    interaction_type: InteractionType,
}

impl MultiplexHypergraph {
    pub fn new(node_ids: Vec<String>, interaction_type: InteractionType) -> Self {
        Self {
            node_ids,
            layers: BTreeMap::new(),
            interaction_type,
        }
    }

    /// Insert a layer; edges are sorted by multiplet and checked for sign
    /// homogeneity, duplicate item sets, and node-range consistency.
    /// An empty hyperedge set is a valid degenerate layer.
    pub fn insert_layer(
        &mut self,
        layer_id: impl Into<String>,
        mut edges: Vec<ValidatedHyperedge>,
    ) -> Result<()> {
        let layer_id = layer_id.into();
        edges.sort_by(|a, b| a.multiplet.cmp(&b.multiplet));
        for w in edges.windows(2) {
            if w[0].multiplet == w[1].multiplet {
                return Err(Error::Structural(format!(
                    "layer {layer_id}: duplicate hyperedge {}",
                    w[0].multiplet
                )));
            }
        }
        for e in &edges {
            if e.interaction_type != self.interaction_type {
                return Err(Error::Structural(format!(
                    "layer {layer_id}: edge {} has type {}, multiplex is {}",
                    e.multiplet, e.interaction_type, self.interaction_type
                )));
            }
            if let Some(&max) = e.multiplet.items().last() {
                if max >= self.node_ids.len() {
                    return Err(Error::Structural(format!(
                        "layer {layer_id}: edge {} references node beyond shared set",
                        e.multiplet
                    )));
                }
            }
        }
        self.layers.insert(layer_id, edges);
        Ok(())
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn n_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn interaction_type(&self) -> InteractionType {
        self.interaction_type
    }

    pub fn layers(&self) -> &BTreeMap<String, Vec<ValidatedHyperedge>> {
        &self.layers
    }
}

/// Incidence matrix (N x E of 0/1) and weight vector for one layer.
///
/// Column `e` has exactly `order(e)` ones; the weight entry is the edge's
/// omega. Edges appear in sorted-multiplet order.
pub fn incidence(layer: &[ValidatedHyperedge], n_items: usize) -> Result<(Array2<u8>, Vec<f64>)> {
    let mut edges: Vec<&ValidatedHyperedge> = layer.iter().collect();
    edges.sort_by(|a, b| a.multiplet.cmp(&b.multiplet));
    let mut h = Array2::<u8>::zeros((n_items, edges.len()));
    let mut weights = Vec::with_capacity(edges.len());
    for (e_idx, edge) in edges.iter().enumerate() {
        for &i in edge.multiplet.items() {
            if i >= n_items {
                return Err(Error::Structural(format!(
                    "incidence: item {} out of range for {n_items} nodes",
                    i + 1
                )));
            }
            h[(i, e_idx)] = 1;
        }
        weights.push(edge.omega);
    }
    Ok((h, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn simple_edge(items: Vec<usize>, omega: f64) -> ValidatedHyperedge {
        let (lo, hi) = if omega > 0.0 {
            (omega * 0.5, omega * 1.5)
        } else {
            (omega * 1.5, omega * 0.5)
        };
        ValidatedHyperedge::new(
            Multiplet::new(items, 100).unwrap(),
            omega,
            lo,
            hi,
            0.01,
            Provenance::NetworkBased,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn incidence_empty_layer() {
        let (h, w) = incidence(&[], 5).unwrap();
        assert_eq!(h.dim(), (5, 0));
        assert!(w.is_empty());
    }

    #[test]
    fn incidence_single_edge() {
        let (h, w) = incidence(&[simple_edge(vec![0, 1, 2], -0.2)], 4).unwrap();
        assert_eq!(h.column(0).to_vec(), vec![1, 1, 1, 0]);
        assert_eq!(w, vec![-0.2]);
    }

    #[test]
    fn incidence_row_sums() {
        let layer = vec![simple_edge(vec![0, 1, 2], 0.3), simple_edge(vec![1, 2, 3], 0.4)];
        let (h, w) = incidence(&layer, 4).unwrap();
        let row_sums: Vec<u32> = (0..4).map(|i| h.row(i).iter().map(|&v| v as u32).sum()).collect();
        assert_eq!(row_sums, vec![1, 2, 2, 1]);
        assert_eq!(w, vec![0.3, 0.4]);
    }

    #[test]
    fn incidence_round_trip() {
        let layer = vec![
            simple_edge(vec![0, 2, 4], 0.3),
            simple_edge(vec![1, 2, 3, 5], 0.4),
            simple_edge(vec![0, 1, 5], 0.22),
        ];
        let (h, w) = incidence(&layer, 6).unwrap();
        // rebuild (item set, weight) pairs from columns
        let mut rebuilt: Vec<(Vec<usize>, f64)> = (0..w.len())
            .map(|e| {
                let items: Vec<usize> =
                    (0..6).filter(|&i| h[(i, e)] == 1).collect();
                (items, w[e])
            })
            .collect();
        rebuilt.sort_by(|a, b| a.0.cmp(&b.0));
        let mut expect: Vec<(Vec<usize>, f64)> = layer
            .iter()
            .map(|e| (e.multiplet.items().to_vec(), e.omega))
            .collect();
        expect.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(rebuilt, expect);
    }

    #[test]
    fn incidence_rejects_out_of_range() {
        let e = simple_edge(vec![0, 1, 7], 0.3);
        assert!(matches!(incidence(&[e], 4), Err(Error::Structural(_))));
    }

    #[test]
    fn merge_concatenates_rows() {
        let ids = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let x = ResponseMatrix::new(array![[0, 1, 2], [1, 1, 1]], ids.clone(), "X", (0, 4)).unwrap();
        let y = ResponseMatrix::new(
            array![[2, 2, 2], [3, 3, 3], [4, 0, 4]],
            ids.clone(),
            "Y",
            (0, 4),
        )
        .unwrap();
        let m = merge_layers(&x, &y).unwrap();
        assert_eq!(m.n_respondents(), 5);
        assert_eq!(m.layer_id(), "X_Y");
        assert_eq!(m.values().row(0).to_vec(), vec![0, 1, 2]);
        assert_eq!(m.values().row(2).to_vec(), vec![2, 2, 2]);
        assert_eq!(m.values().row(4).to_vec(), vec![4, 0, 4]);
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let ids = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let x = ResponseMatrix::new(array![[0, 1, 2], [1, 1, 1]], ids.clone(), "X", (0, 4)).unwrap();
        let empty =
            ResponseMatrix::new(Array2::zeros((0, 3)), ids.clone(), "E", (0, 4)).unwrap();
        let m = merge_layers(&x, &empty).unwrap();
        assert_eq!(m.n_respondents(), 2);
        assert_eq!(m.values(), x.values());
    }

    #[test]
    fn merge_sizes_add_up() {
        let ids: Vec<String> = (0..3).map(|i| format!("i{i}")).collect();
        let bed =
            ResponseMatrix::new(Array2::zeros((42, 3)), ids.clone(), "BED", (0, 4)).unwrap();
        let osfed =
            ResponseMatrix::new(Array2::zeros((155, 3)), ids.clone(), "OSFED", (0, 4)).unwrap();
        assert_eq!(merge_layers(&bed, &osfed).unwrap().n_respondents(), 197);
    }

    #[test]
    fn merge_rejects_mismatched_items() {
        let a = ResponseMatrix::new(
            Array2::zeros((2, 3)),
            vec!["a".into(), "b".into(), "c".into()],
            "A",
            (0, 4),
        )
        .unwrap();
        let b = ResponseMatrix::new(
            Array2::zeros((2, 3)),
            vec!["a".into(), "b".into(), "d".into()],
            "B",
            (0, 4),
        )
        .unwrap();
        assert!(matches!(merge_layers(&a, &b), Err(Error::Schema(_))));
    }

    #[test]
    fn response_matrix_rejects_out_of_range_values() {
        let r = ResponseMatrix::new(
            array![[0, 1, 9]],
            vec!["a".into(), "b".into(), "c".into()],
            "A",
            (0, 4),
        );
        assert!(matches!(r, Err(Error::Data(_))));
    }

    #[test]
    fn scale_map_partition_enforced() {
        let mut scales = BTreeMap::new();
        scales.insert("S1".to_string(), BTreeSet::from([0, 1]));
        scales.insert("S2".to_string(), BTreeSet::from([2]));
        // item 3 uncovered -> error
        assert!(ScaleMap::new(scales.clone(), BTreeSet::new(), 4).is_err());
        // with complement it passes and item 3 is unassigned
        let map = ScaleMap::with_complement(scales.clone(), 4).unwrap();
        assert_eq!(map.unassigned(), &BTreeSet::from([3]));
        assert_eq!(map.scale_of(1), Some("S1"));
        assert_eq!(map.scale_of(3), None);
        // overlap -> error
        scales.insert("S3".to_string(), BTreeSet::from([1]));
        assert!(ScaleMap::with_complement(scales, 4).is_err());
    }

    #[test]
    fn multiplet_validation() {
        assert!(Multiplet::new(vec![0, 1], 10).is_err());
        assert!(Multiplet::new(vec![0, 1, 1], 10).is_err());
        assert!(Multiplet::new(vec![2, 1, 3], 10).is_err());
        assert!(Multiplet::new(vec![0, 1, 10], 10).is_err());
        let m = Multiplet::new(vec![1, 4, 7, 9], 10).unwrap();
        assert_eq!(m.order(), 4);
        let subs = m.sub_multiplets();
        assert_eq!(subs.len(), 4);
        assert_eq!(subs[0].items(), &[4, 7, 9]);
        assert_eq!(subs[3].items(), &[1, 4, 7]);
        assert!(Multiplet::new(vec![0, 1, 2], 10).unwrap().sub_multiplets().is_empty());
    }

    #[test]
    fn hyperedge_invariants() {
        let m = Multiplet::new(vec![0, 1, 2], 10).unwrap();
        // interval containing zero rejected
        assert!(ValidatedHyperedge::new(
            m.clone(), 0.2, -0.1, 0.4, 0.01, Provenance::NetworkBased, 0.15
        )
        .is_err());
        // omega outside interval rejected
        assert!(ValidatedHyperedge::new(
            m.clone(), 0.5, 0.1, 0.4, 0.01, Provenance::NetworkBased, 0.15
        )
        .is_err());
        // below floor rejected
        assert!(ValidatedHyperedge::new(
            m.clone(), 0.1, 0.05, 0.2, 0.01, Provenance::NetworkBased, 0.15
        )
        .is_err());
        let e = ValidatedHyperedge::new(
            m.clone(), -0.3, -0.4, -0.2, 0.01, Provenance::SubscaleIntra, 0.15
        )
        .unwrap();
        assert_eq!(e.interaction_type, InteractionType::Synergy);
        let e = ValidatedHyperedge::new(m, 0.3, 0.2, 0.4, 0.01, Provenance::NetworkBased, 0.15)
            .unwrap();
        assert_eq!(e.interaction_type, InteractionType::Redundancy);
    }

    #[test]
    fn multiplex_sign_homogeneity() {
        let mut mux = MultiplexHypergraph::new(
            (0..6).map(|i| format!("i{i}")).collect(),
            InteractionType::Redundancy,
        );
        mux.insert_layer("L1", vec![simple_edge(vec![0, 1, 2], 0.3)]).unwrap();
        // empty layer is valid
        mux.insert_layer("L2", vec![]).unwrap();
        // wrong sign rejected
        let bad = mux.insert_layer("L3", vec![simple_edge(vec![0, 1, 2], -0.3)]);
        assert!(bad.is_err());
        assert_eq!(mux.layers().len(), 2);
    }
}
