//! Candidate multiplet generation: network-based seeding from the dyadic
//! network's mesoscale structure, and subscale-guided combinatorics.

mod cliques;
mod spinglass;
mod subscale;

pub use cliques::maximal_cliques;
pub use spinglass::{
    spinglass_communities, AnnealSchedule, CommunityDecomposition, SpinglassOptions,
};
pub use subscale::{mixed_subset_count, subscale_candidates, SubscaleOptions};

use std::collections::BTreeMap;

use crate::data::{Multiplet, Provenance};
use crate::dyadic::DyadicNetwork;
use crate::error::{Error, Result};

/// Deduplicated candidate pool with per-multiplet provenance.
///
/// The first insertion of an item set wins, so callers control provenance
/// priority through insertion order (the pipeline inserts network-based
/// candidates first, then subscale-intra, then subscale-inter).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    k_min: usize,
    k_max: usize,
    entries: BTreeMap<Multiplet, Provenance>,
}

impl CandidateSet {
    pub fn new(k_min: usize, k_max: usize) -> Result<Self> {
        if k_min < 3 {
            return Err(Error::Config(format!(
                "candidate orders start at 3, got k_min = {k_min}"
            )));
        }
        if k_max < k_min {
            return Err(Error::Config(format!(
                "candidate order bounds inverted: [{k_min}, {k_max}]"
            )));
        }
        Ok(Self {
            k_min,
            k_max,
            entries: BTreeMap::new(),
        })
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Insert unless already present; returns whether the entry is new.
    pub fn insert(&mut self, multiplet: Multiplet, provenance: Provenance) -> Result<bool> {
        let k = multiplet.order();
        if k < self.k_min || k > self.k_max {
            return Err(Error::Structural(format!(
                "candidate {multiplet} has order {k}, bounds are [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if self.entries.contains_key(&multiplet) {
            return Ok(false);
        }
        self.entries.insert(multiplet, provenance);
        Ok(true)
    }

    /// Union, keeping existing provenance on collisions.
    pub fn merge(&mut self, other: CandidateSet) -> Result<()> {
        for (m, p) in other.entries {
            self.insert(m, p)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, m: &Multiplet) -> bool {
        self.entries.contains_key(m)
    }

    pub fn provenance(&self, m: &Multiplet) -> Option<Provenance> {
        self.entries.get(m).copied()
    }

    /// Sorted iteration (by multiplet).
    pub fn iter(&self) -> impl Iterator<Item = (&Multiplet, Provenance)> {
        self.entries.iter().map(|(m, &p)| (m, p))
    }

    /// Candidates grouped by order, each group sorted.
    pub fn by_order(&self) -> BTreeMap<usize, Vec<Multiplet>> {
        let mut out: BTreeMap<usize, Vec<Multiplet>> = BTreeMap::new();
        for m in self.entries.keys() {
            out.entry(m.order()).or_default().push(m.clone());
        }
        out
    }
}

/// Structural score of an item set against the community decomposition:
/// `kappa(|e|) * sum over unordered pairs of W[c(i), c(j)]` with
/// `kappa(k) = 1/k!`. Rewards sets spanning strongly coupled communities
/// while the factorial discounts size.
pub fn score_seed(items: &[usize], comm: &CommunityDecomposition) -> f64 {
    let k = items.len();
    let mut pair_sum = 0.0;
    for a in 0..k {
        for b in (a + 1)..k {
            pair_sum += comm.coupling(items[a], items[b]);
        }
    }
    let factorial: f64 = (1..=k).map(|v| v as f64).product();
    pair_sum / factorial
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionOptions {
    pub k_min: usize,
    pub k_max: usize,
    /// Seeds kept after scoring.
    pub top_m: usize,
    /// Minimum relative score increase for adding a node.
    pub min_gain: f64,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self {
            k_min: 3,
            k_max: 5,
            top_m: 200,
            min_gain: 0.02,
        }
    }
}

/// Greedy expansion of the top-scored seeds along skeleton neighbors.
///
/// Every intermediate set of order >= `k_min` is emitted (the seed itself
/// included), so `min_gain = +inf` reduces the output to the seed pool.
/// Expansion stops when no neighbor clears the relative gain threshold or
/// the set reaches `k_max`. All candidates are tagged `network_based`.
pub fn expand_seeds(
    seeds: &[Vec<usize>],
    net: &DyadicNetwork,
    comm: &CommunityDecomposition,
    opts: &ExpansionOptions,
) -> Result<CandidateSet> {
    if opts.top_m == 0 {
        return Err(Error::Config("expansion needs top_m >= 1".into()));
    }
    let mut scored: Vec<(Vec<usize>, f64)> = seeds
        .iter()
        .map(|s| {
            let mut items = s.clone();
            items.sort_unstable();
            let score = score_seed(&items, comm);
            (items, score)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite scores")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(opts.top_m);

    let adjacency = net.skeleton(false);
    let n_items = net.n_items();
    let mut out = CandidateSet::new(opts.k_min, opts.k_max)?;
    for (seed, mut score) in scored {
        let mut current = seed;
        if current.len() >= opts.k_min && current.len() <= opts.k_max {
            out.insert(
                Multiplet::new(current.clone(), n_items)?,
                Provenance::NetworkBased,
            )?;
        }
        while current.len() < opts.k_max {
            // neighbors of any member, not already included
            let mut frontier: Vec<usize> = Vec::new();
            for &m in &current {
                for &nb in &adjacency[m] {
                    if !current.contains(&nb) && !frontier.contains(&nb) {
                        frontier.push(nb);
                    }
                }
            }
            frontier.sort_unstable();
            let mut best: Option<(usize, f64)> = None;
            for &candidate in &frontier {
                let mut grown = current.clone();
                grown.push(candidate);
                grown.sort_unstable();
                let s = score_seed(&grown, comm);
                let better = match best {
                    None => true,
                    Some((_, bs)) => s > bs, // frontier is sorted, so ties keep the lowest index
                };
                if better {
                    best = Some((candidate, s));
                }
            }
            let Some((node, new_score)) = best else { break };
            let gain = if score == 0.0 {
                if new_score > 0.0 {
                    f64::MAX
                } else {
                    0.0
                }
            } else {
                (new_score - score) / score.abs()
            };
            if gain < opts.min_gain {
                break;
            }
            current.push(node);
            current.sort_unstable();
            score = new_score;
            if current.len() >= opts.k_min {
                out.insert(
                    Multiplet::new(current.clone(), n_items)?,
                    Provenance::NetworkBased,
                )?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn decomposition(membership: Vec<usize>, affinity: Array2<f64>) -> CommunityDecomposition {
        let n_communities = affinity.nrows();
        CommunityDecomposition {
            membership,
            affinity,
            n_communities,
        }
    }

    fn net_from_weighted(n: usize, edges: &[(usize, usize, f64)]) -> DyadicNetwork {
        let mut pc = Array2::<f64>::zeros((n, n));
        for &(i, j, w) in edges {
            pc[(i, j)] = w;
            pc[(j, i)] = w;
        }
        DyadicNetwork {
            partial_corr: pc,
            precision: Array2::eye(n),
            lambda_selected: 0.1,
            ebic_gamma: 0.5,
        }
    }

    #[test]
    fn score_triplet_with_unit_affinity() {
        let comm = decomposition(vec![0, 0, 0], Array2::ones((1, 1)));
        // 3 pairs, kappa(3) = 1/6 -> 0.5
        assert!((score_seed(&[0, 1, 2], &comm) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_affinity_scores_zero() {
        let comm = decomposition(vec![0, 0, 1, 1], Array2::zeros((2, 2)));
        assert_eq!(score_seed(&[0, 1, 2], &comm), 0.0);
    }

    #[test]
    fn factorial_ratio_between_orders() {
        let comm = decomposition(vec![0; 5], Array2::ones((1, 1)));
        let s3 = score_seed(&[0, 1, 2], &comm); // 3 pairs / 6
        let s4 = score_seed(&[0, 1, 2, 3], &comm); // 6 pairs / 24
        // per unit of pair-sum, order 4 is kappa(4)/kappa(3) = 1/4 of order 3
        let per_pair3 = s3 / 3.0;
        let per_pair4 = s4 / 6.0;
        assert!((per_pair4 / per_pair3 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn score_invariant_under_structure_preserving_relabel() {
        let aff = ndarray::array![[0.5, 0.2], [0.2, 0.3]];
        let comm = decomposition(vec![0, 0, 1, 1], aff.clone());
        let base = score_seed(&[0, 1, 2], &comm);
        // swap items 0<->1 and 2<->3 (same communities)
        let relabeled = decomposition(vec![0, 0, 1, 1], aff);
        let swapped = score_seed(&[1, 0, 3], &relabeled);
        assert!((base - swapped).abs() < 1e-12);
    }

    #[test]
    fn seed_at_k_max_is_emitted_unchanged() {
        let net = net_from_weighted(6, &[(0, 1, 0.4), (1, 2, 0.4), (2, 3, 0.4)]);
        let comm = decomposition(vec![0; 6], Array2::ones((1, 1)));
        let opts = ExpansionOptions {
            k_min: 3,
            k_max: 4,
            top_m: 10,
            min_gain: -1.0,
        };
        let out = expand_seeds(&[vec![0, 1, 2, 3]], &net, &comm, &opts).unwrap();
        let all: Vec<_> = out.iter().map(|(m, _)| m.items().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn infinite_min_gain_means_no_expansion() {
        let net = net_from_weighted(6, &[(0, 1, 0.4), (1, 2, 0.4), (2, 3, 0.4), (3, 4, 0.4)]);
        let comm = decomposition(vec![0; 6], Array2::ones((1, 1)));
        let opts = ExpansionOptions {
            k_min: 3,
            k_max: 5,
            top_m: 10,
            min_gain: f64::INFINITY,
        };
        let out = expand_seeds(&[vec![0, 1, 2]], &net, &comm, &opts).unwrap();
        let all: Vec<_> = out.iter().map(|(m, _)| m.items().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn expansion_prefers_the_stronger_community() {
        // hub 0 and member 1 in community 0; candidates: 2 (community 1,
        // strong coupling) and 3 (community 2, weak coupling)
        let net = net_from_weighted(4, &[(0, 1, 0.4), (0, 2, 0.3), (0, 3, 0.3)]);
        let aff = ndarray::array![[0.4, 0.9, 0.1], [0.9, 0.0, 0.0], [0.1, 0.0, 0.0]];
        let comm = decomposition(vec![0, 0, 1, 2], aff);
        let opts = ExpansionOptions {
            k_min: 3,
            k_max: 3,
            top_m: 5,
            min_gain: -1.0,
        };
        let out = expand_seeds(&[vec![0, 1]], &net, &comm, &opts).unwrap();
        let all: Vec<_> = out.iter().map(|(m, _)| m.items().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn candidate_set_dedupes_with_first_provenance() {
        let mut set = CandidateSet::new(3, 5).unwrap();
        let m = Multiplet::new(vec![0, 1, 2], 10).unwrap();
        assert!(set.insert(m.clone(), Provenance::NetworkBased).unwrap());
        assert!(!set.insert(m.clone(), Provenance::SubscaleIntra).unwrap());
        assert_eq!(set.provenance(&m), Some(Provenance::NetworkBased));
        assert_eq!(set.len(), 1);
        // out-of-bounds order rejected
        let big = Multiplet::new(vec![0, 1, 2, 3, 4, 5], 10).unwrap();
        assert!(set.insert(big, Provenance::NetworkBased).is_err());
    }

    #[test]
    fn by_order_respects_bounds() {
        let mut set = CandidateSet::new(3, 4).unwrap();
        set.insert(Multiplet::new(vec![0, 1, 2], 9).unwrap(), Provenance::NetworkBased)
            .unwrap();
        set.insert(Multiplet::new(vec![0, 1, 2, 3], 9).unwrap(), Provenance::SubscaleIntra)
            .unwrap();
        let grouped = set.by_order();
        assert_eq!(grouped[&3].len(), 1);
        assert_eq!(grouped[&4].len(), 1);
        for (k, ms) in grouped {
            for m in ms {
                assert!(m.order() == k && k >= set.k_min() && k <= set.k_max());
            }
        }
    }
}
