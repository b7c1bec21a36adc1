//! Candidate multiplet generation from network structure and subscales.
//!
//! Shows the full seeding path: spin-glass communities on a signed network,
//! maximal cliques as seeds, structural scoring with the factorial size
//! discount, greedy expansion, and the subscale-guided combinatorial pool.
//!
//! Run: cargo run --example candidate_generation

use std::collections::BTreeMap;

use homux::candidates::{
    expand_seeds, maximal_cliques, score_seed, spinglass_communities, subscale_candidates,
    ExpansionOptions, SpinglassOptions, SubscaleOptions,
};
use homux::data::ScaleMap;
use homux::dyadic::DyadicNetwork;
use ndarray::Array2;

fn main() {
    // a signed network with two positive blocks bridged by negative edges
    let n = 10;
    let mut pc = Array2::<f64>::zeros((n, n));
    let mut put = |i: usize, j: usize, w: f64| {
        pc[(i, j)] = w;
        pc[(j, i)] = w;
    };
    for block in [&[0usize, 1, 2, 3][..], &[5usize, 6, 7, 8][..]] {
        for (a, &i) in block.iter().enumerate() {
            for &j in &block[a + 1..] {
                put(i, j, 0.35);
            }
        }
    }
    put(3, 5, -0.25);
    put(2, 6, -0.2);
    put(4, 0, 0.3); // pendant node on the first block
    put(9, 8, 0.3); // pendant node on the second block
    let net = DyadicNetwork {
        partial_corr: pc,
        precision: Array2::eye(n),
        lambda_selected: 0.05,
        ebic_gamma: 0.5,
    };

    let comm = spinglass_communities(&net, &SpinglassOptions::default(), 11);
    println!("communities: {:?}", comm.membership);
    println!("affinity matrix:");
    for r in 0..comm.n_communities {
        let row: Vec<String> = (0..comm.n_communities)
            .map(|c| format!("{:.3}", comm.affinity[(r, c)]))
            .collect();
        println!("  [{}]", row.join(", "));
    }

    let cliques = maximal_cliques(&net, 3, 5, false).unwrap();
    println!("\nmaximal cliques in [3, 5]:");
    for c in &cliques {
        let shifted: Vec<usize> = c.iter().map(|i| i + 1).collect();
        println!("  {:?}  score = {:.4}", shifted, score_seed(c, &comm));
    }

    let pool = expand_seeds(
        &cliques,
        &net,
        &comm,
        &ExpansionOptions {
            min_gain: -0.8, // allow score-decreasing growth for the demo
            ..Default::default()
        },
    )
    .unwrap();
    println!("\nnetwork-based candidates after expansion: {}", pool.len());
    for (m, _) in pool.iter() {
        println!("  {m}");
    }

    // subscale-guided pool on a small scale map
    let mut scales = BTreeMap::new();
    scales.insert("S1".to_string(), [0usize, 1, 2, 3].into_iter().collect());
    scales.insert("S2".to_string(), [5usize, 6, 7, 8].into_iter().collect());
    let map = ScaleMap::with_complement(scales, n).unwrap();
    let sub = subscale_candidates(
        &map,
        &SubscaleOptions {
            sample_per_pair: 3,
            ..Default::default()
        },
        99,
    )
    .unwrap();
    let by_order = sub.by_order();
    println!("\nsubscale-guided candidates by order:");
    for (k, ms) in by_order {
        println!("  order {k}: {}", ms.len());
    }
}
