//! Maximal-clique enumeration (Bron-Kerbosch with pivoting) on the network
//! skeleton, with size filtering and decomposition of oversized cliques.

use itertools::Itertools;

use crate::dyadic::DyadicNetwork;
use crate::error::{Error, Result};

/// Maximal cliques of the unweighted skeleton, restricted to sizes in
/// `[k_min, k_max]`; cliques larger than `k_max` are decomposed into all
/// their `k_max`-subsets. Output is deduplicated and sorted.
pub fn maximal_cliques(
    net: &DyadicNetwork,
    k_min: usize,
    k_max: usize,
    positive_only: bool,
) -> Result<Vec<Vec<usize>>> {
    if k_min < 3 {
        return Err(Error::Config(format!(
            "clique search needs k_min >= 3, got {k_min}"
        )));
    }
    if k_max < k_min {
        return Err(Error::Config(format!(
            "clique bounds inverted: k_min {k_min} > k_max {k_max}"
        )));
    }
    let adj = net.skeleton(positive_only);
    let cliques = maximal_cliques_adj(&adj);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for clique in cliques {
        if clique.len() < k_min {
            continue;
        }
        if clique.len() <= k_max {
            out.push(clique);
        } else {
            for sub in clique.iter().copied().combinations(k_max) {
                out.push(sub);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// All maximal cliques of an adjacency-list graph, each sorted ascending.
pub(crate) fn maximal_cliques_adj(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut matrix = vec![false; n * n];
    for (i, nbrs) in adj.iter().enumerate() {
        for &j in nbrs {
            matrix[i * n + j] = true;
            matrix[j * n + i] = true;
        }
    }
    let mut out = Vec::new();
    let p: Vec<usize> = (0..n).collect();
    bron_kerbosch(&matrix, n, &mut Vec::new(), p, Vec::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch(
    adj: &[bool],
    n: usize,
    r: &mut Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    // pivot: vertex of P union X with most neighbors inside P
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u * n + v]).count())
        .expect("non-empty P or X");
    let todo: Vec<usize> = p
        .iter()
        .copied()
        .filter(|&v| !adj[pivot * n + v])
        .collect();
    for v in todo {
        r.push(v);
        let next_p: Vec<usize> = p.iter().copied().filter(|&u| adj[v * n + u]).collect();
        let next_x: Vec<usize> = x.iter().copied().filter(|&u| adj[v * n + u]).collect();
        bron_kerbosch(adj, n, r, next_p, next_x, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net_from_edges(n: usize, edges: &[(usize, usize)]) -> DyadicNetwork {
        let mut pc = Array2::<f64>::zeros((n, n));
        let mut prec = Array2::<f64>::eye(n);
        for &(i, j) in edges {
            pc[(i, j)] = 0.3;
            pc[(j, i)] = 0.3;
            prec[(i, j)] = -0.3;
            prec[(j, i)] = -0.3;
        }
        DyadicNetwork {
            partial_corr: pc,
            precision: prec,
            lambda_selected: 0.1,
            ebic_gamma: 0.5,
        }
    }

    /// Exhaustive maximal-clique search for small graphs.
    fn brute_force_maximal(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let n = adj.len();
        let mut m = vec![false; n * n];
        for (i, nbrs) in adj.iter().enumerate() {
            for &j in nbrs {
                m[i * n + j] = true;
                m[j * n + i] = true;
            }
        }
        let is_clique = |set: &[usize]| {
            set.iter()
                .enumerate()
                .all(|(a, &i)| set[a + 1..].iter().all(|&j| m[i * n + j]))
        };
        let mut cliques = Vec::new();
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if !is_clique(&set) {
                continue;
            }
            // maximal: no vertex outside connects to all inside
            let maximal = (0..n)
                .filter(|i| !set.contains(i))
                .all(|v| !set.iter().all(|&u| m[v * n + u]));
            if maximal {
                cliques.push(set);
            }
        }
        cliques.sort();
        cliques
    }

    #[test]
    fn triangle_is_found() {
        let net = net_from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let cliques = maximal_cliques(&net, 3, 5, false).unwrap();
        assert_eq!(cliques, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn k5_decomposes_into_four_subsets() {
        let edges: Vec<(usize, usize)> = (0..5)
            .flat_map(|i| ((i + 1)..5).map(move |j| (i, j)))
            .collect();
        let net = net_from_edges(5, &edges);
        let cliques = maximal_cliques(&net, 3, 4, false).unwrap();
        assert_eq!(cliques.len(), 5); // C(5,4)
        for c in &cliques {
            assert_eq!(c.len(), 4);
        }
    }

    #[test]
    fn path_graph_has_no_triangles() {
        let net = net_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(maximal_cliques(&net, 3, 5, false).unwrap().is_empty());
    }

    #[test]
    fn positive_only_filters_negative_edges() {
        let n = 3;
        let mut pc = Array2::<f64>::zeros((n, n));
        for (i, j, w) in [(0, 1, 0.3), (1, 2, 0.3), (0, 2, -0.3)] {
            pc[(i, j)] = w;
            pc[(j, i)] = w;
        }
        let net = DyadicNetwork {
            partial_corr: pc,
            precision: Array2::eye(n),
            lambda_selected: 0.1,
            ebic_gamma: 0.5,
        };
        assert_eq!(maximal_cliques(&net, 3, 5, false).unwrap().len(), 1);
        assert!(maximal_cliques(&net, 3, 5, true).unwrap().is_empty());
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let n = rng.gen_range(4..=12);
            let density = rng.gen_range(0.2..0.7);
            let mut adj = vec![Vec::new(); n];
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<f64>() < density {
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                }
            }
            let fast = maximal_cliques_adj(&adj);
            let brute = brute_force_maximal(&adj);
            assert_eq!(fast, brute);
        }
    }
}
