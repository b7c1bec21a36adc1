//! Subscale-guided combinatorial candidates: intra-scale subsets probe
//! within-construct structure; inter-scale combinations probe cross-domain
//! interactions. All order-3 inter candidates are kept; higher orders are
//! sampled per scale pair to stay tractable.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::{Multiplet, Provenance, ScaleMap};
use crate::error::Result;
use crate::seed::SeedDeriver;

use super::CandidateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubscaleOptions {
    pub k_min: usize,
    pub k_max: usize,
    /// Order-4/5 inter-scale samples per unordered scale pair.
    pub sample_per_pair: usize,
    /// Cap on intra-scale combinations per (scale, order); above it a
    /// deterministic sample of this size is taken.
    pub intra_cap: usize,
}

impl Default for SubscaleOptions {
    fn default() -> Self {
        Self {
            k_min: 3,
            k_max: 5,
            sample_per_pair: 100,
            intra_cap: 5000,
        }
    }
}

fn n_choose_k(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

/// Mixed k-subsets of two disjoint scales: every subset contains at least
/// one item from each. `C(p+q, k) - C(p, k) - C(q, k)` of them exist.
pub fn mixed_subset_count(p: usize, q: usize, k: usize) -> u128 {
    n_choose_k(p + q, k)
        .saturating_sub(n_choose_k(p, k))
        .saturating_sub(n_choose_k(q, k))
}

/// Candidate multiplets from the scale structure.
///
/// Intra candidates are tagged `subscale_intra`, inter candidates
/// `subscale_inter`; scales smaller than the requested order are skipped
/// with a log note. Identical inputs and seed produce identical sets.
pub fn subscale_candidates(
    map: &ScaleMap,
    opts: &SubscaleOptions,
    seed: u64,
) -> Result<CandidateSet> {
    let deriver = SeedDeriver::new(seed);
    let n_items = map.n_items();
    let mut set = CandidateSet::new(opts.k_min, opts.k_max)?;

    // intra-scale: all k-subsets, capped
    for (name, items) in map.scales() {
        let items: Vec<usize> = items.iter().copied().collect();
        for k in opts.k_min..=opts.k_max {
            if items.len() < k {
                log::debug!("scale {name:?} has {} items, skipping order {k}", items.len());
                continue;
            }
            let total = n_choose_k(items.len(), k);
            if total <= opts.intra_cap as u128 {
                for combo in items.iter().copied().combinations(k) {
                    set.insert(Multiplet::new(combo, n_items)?, Provenance::SubscaleIntra)?;
                }
            } else {
                let mut all: Vec<Vec<usize>> =
                    items.iter().copied().combinations(k).collect();
                let mut rng = deriver.rng(&["subscale", "intra", name, &k.to_string()]);
                all.shuffle(&mut rng);
                all.truncate(opts.intra_cap);
                all.sort();
                for combo in all {
                    set.insert(Multiplet::new(combo, n_items)?, Provenance::SubscaleIntra)?;
                }
            }
        }
    }

    // inter-scale: unordered pairs of scales
    let scale_names: Vec<&String> = map.scales().keys().collect();
    for a in 0..scale_names.len() {
        for b in (a + 1)..scale_names.len() {
            let items_a: Vec<usize> = map.scales()[scale_names[a]].iter().copied().collect();
            let items_b: Vec<usize> = map.scales()[scale_names[b]].iter().copied().collect();
            // order 3: exhaustive mixed subsets
            if opts.k_min <= 3 && opts.k_max >= 3 {
                for combo in mixed_exhaustive(&items_a, &items_b, 3) {
                    set.insert(
                        Multiplet::from_unsorted(combo, n_items)?,
                        Provenance::SubscaleInter,
                    )?;
                }
            }
            // orders 4..k_max: seeded uniform sampling without replacement
            for k in 4.max(opts.k_min)..=opts.k_max {
                if opts.sample_per_pair == 0 {
                    continue;
                }
                let total_mixed = mixed_subset_count(items_a.len(), items_b.len(), k);
                if total_mixed == 0 {
                    continue;
                }
                let mut rng = deriver.rng(&[
                    "subscale",
                    "inter",
                    scale_names[a],
                    scale_names[b],
                    &k.to_string(),
                ]);
                let combos: Vec<Vec<usize>> = if total_mixed <= opts.sample_per_pair as u128 {
                    mixed_exhaustive(&items_a, &items_b, k)
                } else if n_choose_k(items_a.len() + items_b.len(), k) <= 200_000 {
                    // enumerate, then take a uniform sample via partial shuffle
                    let mut all = mixed_exhaustive(&items_a, &items_b, k);
                    all.shuffle(&mut rng);
                    all.truncate(opts.sample_per_pair);
                    all
                } else {
                    sample_mixed_rejection(
                        &items_a,
                        &items_b,
                        k,
                        opts.sample_per_pair,
                        &mut rng,
                    )
                };
                for combo in combos {
                    set.insert(
                        Multiplet::from_unsorted(combo, n_items)?,
                        Provenance::SubscaleInter,
                    )?;
                }
            }
        }
    }
    Ok(set)
}

/// All k-subsets of the union with at least one item from each side.
fn mixed_exhaustive(a: &[usize], b: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for take_a in 1..k {
        let take_b = k - take_a;
        if take_a > a.len() || take_b > b.len() {
            continue;
        }
        for ca in a.iter().copied().combinations(take_a) {
            for cb in b.iter().copied().combinations(take_b) {
                let mut combo = ca.clone();
                combo.extend_from_slice(&cb);
                out.push(combo);
            }
        }
    }
    out
}

/// Uniform sample of distinct mixed k-subsets by rejection from the union.
fn sample_mixed_rejection(
    a: &[usize],
    b: &[usize],
    k: usize,
    want: usize,
    rng: &mut impl Rng,
) -> Vec<Vec<usize>> {
    let union: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    let a_set: BTreeSet<usize> = a.iter().copied().collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut attempts = 0usize;
    let max_attempts = want.saturating_mul(10_000).max(100_000);
    while seen.len() < want && attempts < max_attempts {
        attempts += 1;
        // partial Fisher-Yates for a uniform k-subset
        let mut pool = union.clone();
        for i in 0..k {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        let mut combo: Vec<usize> = pool[..k].to_vec();
        combo.sort_unstable();
        let from_a = combo.iter().filter(|i| a_set.contains(i)).count();
        if from_a == 0 || from_a == k {
            continue;
        }
        seen.insert(combo);
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn two_scales(sizes: (usize, usize)) -> ScaleMap {
        let mut scales = BTreeMap::new();
        scales.insert("A".to_string(), (0..sizes.0).collect());
        scales.insert("B".to_string(), (sizes.0..sizes.0 + sizes.1).collect());
        ScaleMap::with_complement(scales, sizes.0 + sizes.1).unwrap()
    }

    #[test]
    fn single_scale_of_three_yields_one_intra() {
        let mut scales = BTreeMap::new();
        scales.insert("A".to_string(), (0..3).collect());
        let map = ScaleMap::with_complement(scales, 3).unwrap();
        let set = subscale_candidates(&map, &SubscaleOptions::default(), 1).unwrap();
        assert_eq!(set.len(), 1);
        let (m, prov) = set.iter().next().unwrap();
        assert_eq!(m.items(), &[0, 1, 2]);
        assert_eq!(prov, Provenance::SubscaleIntra);
    }

    #[test]
    fn pair_of_two_scales_gives_four_mixed_triplets() {
        // scales {a,b} and {c,d}: every 3-subset of the union is mixed
        let map = two_scales((2, 2));
        let set = subscale_candidates(
            &map,
            &SubscaleOptions {
                sample_per_pair: 0,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        let order3: Vec<_> = set.iter().filter(|(m, _)| m.order() == 3).collect();
        assert_eq!(order3.len(), 4);
        for (_, prov) in order3 {
            assert_eq!(prov, Provenance::SubscaleInter);
        }
    }

    #[test]
    fn zero_sample_per_pair_skips_higher_orders() {
        let map = two_scales((4, 4));
        let set = subscale_candidates(
            &map,
            &SubscaleOptions {
                sample_per_pair: 0,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        // intra orders exist (scales of 4), but no order-4/5 inter candidates
        assert!(set
            .iter()
            .filter(|(m, p)| *p == Provenance::SubscaleInter && m.order() > 3)
            .count()
            == 0);
    }

    #[test]
    fn inter_triplet_count_matches_closed_form() {
        for (p, q) in [(3, 4), (5, 2), (6, 6)] {
            let map = two_scales((p, q));
            let set = subscale_candidates(
                &map,
                &SubscaleOptions {
                    sample_per_pair: 0,
                    ..Default::default()
                },
                1,
            )
            .unwrap();
            let got = set
                .iter()
                .filter(|(m, prov)| m.order() == 3 && *prov == Provenance::SubscaleInter)
                .count() as u128;
            assert_eq!(got, mixed_subset_count(p, q, 3));
        }
    }

    #[test]
    fn sampling_is_without_replacement_and_mixed() {
        let map = two_scales((6, 6));
        let opts = SubscaleOptions {
            sample_per_pair: 20,
            ..Default::default()
        };
        let set = subscale_candidates(&map, &opts, 9).unwrap();
        let order4: Vec<_> = set
            .iter()
            .filter(|(m, p)| m.order() == 4 && *p == Provenance::SubscaleInter)
            .map(|(m, _)| m.clone())
            .collect();
        assert_eq!(order4.len(), 20);
        let unique: BTreeSet<_> = order4.iter().collect();
        assert_eq!(unique.len(), 20);
        for m in &order4 {
            let from_a = m.items().iter().filter(|&&i| i < 6).count();
            assert!(from_a >= 1 && from_a < m.order());
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let map = two_scales((6, 5));
        let opts = SubscaleOptions {
            sample_per_pair: 7,
            ..Default::default()
        };
        let a = subscale_candidates(&map, &opts, 33).unwrap();
        let b = subscale_candidates(&map, &opts, 33).unwrap();
        let va: Vec<_> = a.iter().collect();
        let vb: Vec<_> = b.iter().collect();
        assert_eq!(va, vb);
        let c = subscale_candidates(&map, &opts, 34).unwrap();
        let vc: Vec<_> = c.iter().collect();
        assert_ne!(va, vc);
    }

    #[test]
    fn intra_cap_limits_large_scales() {
        let mut scales = BTreeMap::new();
        scales.insert("BIG".to_string(), (0..12).collect());
        let map = ScaleMap::with_complement(scales, 12).unwrap();
        let opts = SubscaleOptions {
            k_min: 3,
            k_max: 3,
            sample_per_pair: 0,
            intra_cap: 50,
        };
        let set = subscale_candidates(&map, &opts, 2).unwrap();
        assert_eq!(set.len(), 50); // C(12,3) = 220 capped at 50
    }
}
