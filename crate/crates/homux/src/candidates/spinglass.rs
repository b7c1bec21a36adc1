//! Spin-glass community detection on signed weighted networks.
//!
//! Minimizes a signed Potts Hamiltonian: positive edges reward co-assignment
//! and negative edges penalize it, each against its own configuration null
//! model scaled by the resolution parameter. Optimization is simulated
//! annealing with a geometric schedule plus a greedy descent polish,
//! restarted from several seeded initializations; the lowest-energy run wins
//! with ties broken by restart index.

use ndarray::Array2;
use rand::Rng;

use crate::dyadic::DyadicNetwork;
use crate::seed::SeedDeriver;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub t_start: f64,
    pub t_end: f64,
    /// Geometric cooling factor applied once per sweep.
    pub cooling: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            t_start: 1.0,
            t_end: 0.01,
            cooling: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinglassOptions {
    /// Potts resolution applied to both null-model terms.
    pub gamma: f64,
    pub spins_max: usize,
    pub restarts: usize,
    pub schedule: AnnealSchedule,
}

impl Default for SpinglassOptions {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            spins_max: 25,
            restarts: 5,
            schedule: AnnealSchedule::default(),
        }
    }
}

/// Hard community memberships plus the inter-community affinity matrix
/// (mean absolute coupling between communities; diagonal holds the mean
/// within-community coupling).
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityDecomposition {
    pub membership: Vec<usize>,
    pub affinity: Array2<f64>,
    pub n_communities: usize,
}

impl CommunityDecomposition {
    pub fn community_of(&self, item: usize) -> usize {
        self.membership[item]
    }

    /// Affinity between the communities of two items.
    pub fn coupling(&self, item_a: usize, item_b: usize) -> f64 {
        self.affinity[(self.membership[item_a], self.membership[item_b])]
    }
}

struct SignedGraph {
    n: usize,
    /// adjacency with signed weights
    neighbors: Vec<Vec<(usize, f64)>>,
    s_pos: Vec<f64>,
    s_neg: Vec<f64>,
    two_m_pos: f64,
    two_m_neg: f64,
}

impl SignedGraph {
    fn from_network(net: &DyadicNetwork) -> Self {
        let n = net.n_items();
        let mut neighbors = vec![Vec::new(); n];
        let mut s_pos = vec![0.0; n];
        let mut s_neg = vec![0.0; n];
        for (i, j, w) in net.edges() {
            neighbors[i].push((j, w));
            neighbors[j].push((i, w));
            if w > 0.0 {
                s_pos[i] += w;
                s_pos[j] += w;
            } else {
                s_neg[i] += -w;
                s_neg[j] += -w;
            }
        }
        let two_m_pos = s_pos.iter().sum();
        let two_m_neg = s_neg.iter().sum();
        Self {
            n,
            neighbors,
            s_pos,
            s_neg,
            two_m_pos,
            two_m_neg,
        }
    }

    /// Energy contribution of node `i` evaluated against community `c`
    /// (excluding itself): the per-node half of the Hamiltonian.
    fn node_energy(
        &self,
        i: usize,
        c: usize,
        membership: &[usize],
        comm_s_pos: &[f64],
        comm_s_neg: &[f64],
        gamma: f64,
        include_self: bool,
    ) -> f64 {
        let mut a_pos = 0.0;
        let mut a_neg = 0.0;
        for &(j, w) in &self.neighbors[i] {
            if membership[j] == c && j != i {
                if w > 0.0 {
                    a_pos += w;
                } else {
                    a_neg += -w;
                }
            }
        }
        let self_pos = if include_self { self.s_pos[i] } else { 0.0 };
        let self_neg = if include_self { self.s_neg[i] } else { 0.0 };
        let null_pos = if self.two_m_pos > 0.0 {
            self.s_pos[i] * (comm_s_pos[c] - self_pos) / self.two_m_pos
        } else {
            0.0
        };
        let null_neg = if self.two_m_neg > 0.0 {
            self.s_neg[i] * (comm_s_neg[c] - self_neg) / self.two_m_neg
        } else {
            0.0
        };
        -(a_pos - gamma * null_pos) + (a_neg - gamma * null_neg)
    }

    /// Full Hamiltonian, for restart comparison and tests.
    fn total_energy(&self, membership: &[usize], gamma: f64) -> f64 {
        let mut h = 0.0;
        // actual couplings over edges
        for i in 0..self.n {
            for &(j, w) in &self.neighbors[i] {
                if j > i && membership[i] == membership[j] {
                    if w > 0.0 {
                        h -= w;
                    } else {
                        h += -w;
                    }
                }
            }
        }
        // null couplings over all same-community pairs
        let n_comms = membership.iter().copied().max().map_or(0, |m| m + 1);
        let mut comm_s_pos = vec![0.0; n_comms];
        let mut comm_s_neg = vec![0.0; n_comms];
        for i in 0..self.n {
            comm_s_pos[membership[i]] += self.s_pos[i];
            comm_s_neg[membership[i]] += self.s_neg[i];
        }
        for c in 0..n_comms {
            if self.two_m_pos > 0.0 {
                let sum_sq: f64 = (0..self.n)
                    .filter(|&i| membership[i] == c)
                    .map(|i| self.s_pos[i] * self.s_pos[i])
                    .sum();
                h += gamma * (comm_s_pos[c] * comm_s_pos[c] - sum_sq) / (2.0 * self.two_m_pos);
            }
            if self.two_m_neg > 0.0 {
                let sum_sq: f64 = (0..self.n)
                    .filter(|&i| membership[i] == c)
                    .map(|i| self.s_neg[i] * self.s_neg[i])
                    .sum();
                h -= gamma * (comm_s_neg[c] * comm_s_neg[c] - sum_sq) / (2.0 * self.two_m_neg);
            }
        }
        h
    }
}

/// Detect communities in a signed weighted network.
///
/// Deterministic given the seed. An edgeless network degenerates to one
/// community covering every node, with a warning.
pub fn spinglass_communities(
    net: &DyadicNetwork,
    opts: &SpinglassOptions,
    seed: u64,
) -> CommunityDecomposition {
    let graph = SignedGraph::from_network(net);
    let n = graph.n;
    if net.n_edges() == 0 {
        log::warn!("spin-glass on an edgeless network: single degenerate community");
        return CommunityDecomposition {
            membership: vec![0; n],
            affinity: Array2::zeros((1, 1)),
            n_communities: 1,
        };
    }
    let deriver = SeedDeriver::new(seed);
    let spins = opts.spins_max.max(1).min(n.max(1));
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = deriver.rng(&["spinglass", "restart", &restart.to_string()]);
        let membership = anneal_once(&graph, opts, spins, &mut rng);
        let energy = graph.total_energy(&membership, opts.gamma);
        let replace = match &best {
            None => true,
            Some((e, _, _)) => energy < *e,
        };
        if replace {
            best = Some((energy, restart, membership));
        }
    }
    let (_, _, membership) = best.expect("at least one restart");
    finish(net, membership)
}

fn anneal_once(
    graph: &SignedGraph,
    opts: &SpinglassOptions,
    spins: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let n = graph.n;
    let mut membership: Vec<usize> = (0..n).map(|_| rng.gen_range(0..spins)).collect();
    let mut comm_s_pos = vec![0.0; spins];
    let mut comm_s_neg = vec![0.0; spins];
    for i in 0..n {
        comm_s_pos[membership[i]] += graph.s_pos[i];
        comm_s_neg[membership[i]] += graph.s_neg[i];
    }
    let mut t = opts.schedule.t_start;
    while t > opts.schedule.t_end {
        for i in 0..n {
            let current = membership[i];
            let proposal = rng.gen_range(0..spins);
            if proposal == current {
                continue;
            }
            let e_cur = graph.node_energy(
                i, current, &membership, &comm_s_pos, &comm_s_neg, opts.gamma, true,
            );
            let e_new = graph.node_energy(
                i, proposal, &membership, &comm_s_pos, &comm_s_neg, opts.gamma, false,
            );
            let delta = e_new - e_cur;
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
                membership[i] = proposal;
                comm_s_pos[current] -= graph.s_pos[i];
                comm_s_neg[current] -= graph.s_neg[i];
                comm_s_pos[proposal] += graph.s_pos[i];
                comm_s_neg[proposal] += graph.s_neg[i];
            }
        }
        t *= opts.schedule.cooling;
    }
    // greedy descent to the nearest local minimum
    loop {
        let mut improved = false;
        for i in 0..n {
            let current = membership[i];
            let e_cur = graph.node_energy(
                i, current, &membership, &comm_s_pos, &comm_s_neg, opts.gamma, true,
            );
            let mut best_spin = current;
            let mut best_delta = 0.0;
            for d in 0..spins {
                if d == current {
                    continue;
                }
                let e_new = graph.node_energy(
                    i, d, &membership, &comm_s_pos, &comm_s_neg, opts.gamma, false,
                );
                let delta = e_new - e_cur;
                if delta < best_delta - 1e-12 {
                    best_delta = delta;
                    best_spin = d;
                }
            }
            if best_spin != current {
                membership[i] = best_spin;
                comm_s_pos[current] -= graph.s_pos[i];
                comm_s_neg[current] -= graph.s_neg[i];
                comm_s_pos[best_spin] += graph.s_pos[i];
                comm_s_neg[best_spin] += graph.s_neg[i];
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    membership
}

/// Canonical relabeling and affinity matrix.
fn finish(net: &DyadicNetwork, membership: Vec<usize>) -> CommunityDecomposition {
    let n = membership.len();
    let mut relabel = std::collections::BTreeMap::new();
    let mut canonical = vec![0usize; n];
    for i in 0..n {
        let next = relabel.len();
        let id = *relabel.entry(membership[i]).or_insert(next);
        canonical[i] = id;
    }
    let c = relabel.len();
    let mut weight_sum = Array2::<f64>::zeros((c, c));
    let mut counts = Array2::<f64>::zeros((c, c));
    for (i, j, w) in net.edges() {
        let (a, b) = (canonical[i], canonical[j]);
        weight_sum[(a, b)] += w.abs();
        counts[(a, b)] += 1.0;
        if a != b {
            weight_sum[(b, a)] += w.abs();
            counts[(b, a)] += 1.0;
        }
    }
    let mut affinity = Array2::<f64>::zeros((c, c));
    for a in 0..c {
        for b in 0..c {
            if counts[(a, b)] > 0.0 {
                affinity[(a, b)] = weight_sum[(a, b)] / counts[(a, b)];
            }
        }
    }
    CommunityDecomposition {
        membership: canonical,
        affinity,
        n_communities: c,
    }
}
