//! Multiplex assembly and influence metrics: weighted degrees, NSWD, and
//! ranked scale patterns across two diagnostic layers.
//!
//! Run: cargo run --example multiplex_metrics

use std::collections::BTreeMap;

use homux::data::{
    incidence, InteractionType, Multiplet, MultiplexHypergraph, Provenance, ScaleMap,
    ValidatedHyperedge,
};
use homux::metrics::{extract_patterns, nswd, weighted_degrees};

fn edge(items: Vec<usize>, omega: f64) -> ValidatedHyperedge {
    let (lo, hi) = if omega > 0.0 {
        (omega * 0.7, omega * 1.3)
    } else {
        (omega * 1.3, omega * 0.7)
    };
    ValidatedHyperedge::new(
        Multiplet::new(items, 12).unwrap(),
        omega,
        lo,
        hi,
        0.01,
        Provenance::NetworkBased,
        0.15,
    )
    .unwrap()
}

fn main() {
    let nodes: Vec<String> = (1..=12).map(|i| format!("item{i}")).collect();
    let mut mux = MultiplexHypergraph::new(nodes, InteractionType::Synergy);
    mux.insert_layer(
        "GROUP_A",
        vec![
            edge(vec![0, 1, 4], -0.31),
            edge(vec![0, 1, 4, 7], -0.22),
            edge(vec![2, 5, 8], -0.18),
        ],
    )
    .unwrap();
    mux.insert_layer(
        "GROUP_B",
        vec![edge(vec![0, 2, 4], -0.27), edge(vec![6, 7, 8, 9], -0.4)],
    )
    .unwrap();

    let mut scales = BTreeMap::new();
    scales.insert("EATING".to_string(), [0usize, 1, 2, 3].into_iter().collect());
    scales.insert("AFFECT".to_string(), [4usize, 5, 6, 7].into_iter().collect());
    scales.insert("SOCIAL".to_string(), [8usize, 9, 10].into_iter().collect());
    let map = ScaleMap::with_complement(scales, 12).unwrap();

    // incidence structure of one layer
    let (h, w) = incidence(&mux.layers()["GROUP_A"], mux.n_nodes()).unwrap();
    println!("GROUP_A incidence: {} nodes x {} hyperedges, weights {w:?}", h.nrows(), h.ncols());

    let profile = weighted_degrees(&mux);
    println!("\ntop nodes by normalized weighted degree:");
    for (layer, degrees) in &profile.layers {
        let mut idx: Vec<usize> = (0..degrees.normalized.len())
            .filter(|&i| degrees.normalized[i] > 0.0)
            .collect();
        idx.sort_by(|&a, &b| degrees.normalized[b].partial_cmp(&degrees.normalized[a]).unwrap());
        println!("  {layer}:");
        for &i in idx.iter().take(4) {
            println!(
                "    item{:<3} k~ = {:.4}  (scale {})",
                i + 1,
                degrees.normalized[i],
                map.scale_of(i).unwrap_or("UNASSIGNED")
            );
        }
    }

    println!("\nNSWD per layer (sums to 1):");
    for (layer, scores) in nswd(&profile, &map) {
        print!("  {layer}: ");
        let mut parts: Vec<(String, f64)> =
            scores.iter().map(|(s, v)| (s.clone(), v.nswd)).collect();
        parts.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let line: Vec<String> = parts.iter().map(|(s, v)| format!("{s} {v:.3}")).collect();
        println!("{}", line.join(", "));
    }

    println!("\nranked scale patterns:");
    for (layer, patterns) in extract_patterns(&mux, &map) {
        println!("  {layer}:");
        for p in patterns {
            let scales: Vec<&str> = p.scale_set.iter().map(String::as_str).collect();
            println!(
                "    {{{}}}: {} hyperedges, cumulative weight {:.3}{}",
                scales.join(","),
                p.hyperedge_count,
                p.cumulative_weight,
                if p.is_monoscale() { " (monoscale)" } else { "" }
            );
        }
    }
}
