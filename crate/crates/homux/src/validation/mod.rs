//! Three-stage inferential pipeline turning candidate multiplets into
//! validated hyperedges.
//!
//! Stage 1 builds a column-permutation null for each candidate's interaction
//! weight (each column shuffled with its own derived stream, preserving
//! marginals while destroying joint structure), adjusts two-tailed p-values
//! per order family with Benjamini-Hochberg, and applies an effect-size
//! floor. Stage 2 checks robustness with a row bootstrap and BCa intervals,
//! discarding candidates whose interval covers zero or whose point estimate
//! is an outlier of its own bootstrap distribution. Stage 3 compares each
//! surviving k-multiplet interval against the intervals of all its
//! (k-1)-sub-multiplets and removes overlaps: whatever remains is genuinely
//! higher-order. Order-3 candidates pass stage 3 unconditionally since no
//! order-2 interaction weight exists.

mod bca;
mod fdr;

pub use bca::{
    bca_bounds, bias_correction, jackknife_acceleration, percentile_bounds,
};
pub use fdr::benjamini_hochberg_adjust;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::CandidateSet;
use crate::data::{Multiplet, Provenance, ValidatedHyperedge};
use crate::error::{Error, Result};
use crate::info::{multiplet_correlation, omega_from_correlation, CopulaScores};
use crate::seed::SeedDeriver;
use crate::stats::sorted_quantile;
use bca::bootstrap_omega;

/// Knobs of the inferential pipeline. The seed is the master for every
/// derived stream, so `(data, candidates, config)` fully determines the
/// output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub n_perm: usize,
    pub alpha_fdr: f64,
    /// Effect-size floor in nats; |omega| below it is treated as negligible.
    pub effect_floor: f64,
    pub n_boot: usize,
    pub ci_level: f64,
    pub seed: u64,
}

impl ValidationConfig {
    pub const DEFAULT_N_PERM: usize = 1000;
    pub const DEFAULT_ALPHA_FDR: f64 = 0.05;
    pub const DEFAULT_EFFECT_FLOOR: f64 = 0.15;
    pub const DEFAULT_N_BOOT: usize = 2000;
    pub const DEFAULT_CI_LEVEL: f64 = 0.95;

    pub fn with_seed(seed: u64) -> Self {
        Self {
            n_perm: Self::DEFAULT_N_PERM,
            alpha_fdr: Self::DEFAULT_ALPHA_FDR,
            effect_floor: Self::DEFAULT_EFFECT_FLOOR,
            n_boot: Self::DEFAULT_N_BOOT,
            ci_level: Self::DEFAULT_CI_LEVEL,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_perm < 100 {
            return Err(Error::Config(format!(
                "n_perm must be >= 100, got {}",
                self.n_perm
            )));
        }
        if self.n_boot < 1000 {
            return Err(Error::Config(format!(
                "n_boot must be >= 1000, got {}",
                self.n_boot
            )));
        }
        if !(self.alpha_fdr > 0.0 && self.alpha_fdr < 1.0) {
            return Err(Error::Config(format!(
                "alpha_fdr must lie in (0, 1), got {}",
                self.alpha_fdr
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!(
                "ci_level must lie in (0, 1), got {}",
                self.ci_level
            )));
        }
        if self.effect_floor.is_nan() || self.effect_floor < 0.0 {
            return Err(Error::Config(format!(
                "effect_floor must be >= 0, got {}",
                self.effect_floor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageId {
    Permutation,
    Bootstrap,
    Hierarchy,
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageId::Permutation => write!(f, "permutation"),
            StageId::Bootstrap => write!(f, "bootstrap"),
            StageId::Hierarchy => write!(f, "hierarchy"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    NotSignificant,
    BelowFloor,
    CiSpansZero,
    UnstablePoint,
    SubsumedBySuborder,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureReason::NotSignificant => "not_significant",
            FailureReason::BelowFloor => "below_floor",
            FailureReason::CiSpansZero => "ci_spans_zero",
            FailureReason::UnstablePoint => "unstable_point",
            FailureReason::SubsumedBySuborder => "subsumed_by_suborder",
        };
        write!(f, "{s}")
    }
}

/// One candidate's outcome at one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub multiplet: Multiplet,
    pub provenance: Provenance,
    pub stage: StageId,
    pub omega: Option<f64>,
    pub p_raw: Option<f64>,
    pub p_adj: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub passed: bool,
    pub reason: Option<FailureReason>,
}

/// Audit trail: one row per (candidate, stage), sorted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageReport {
    records: Vec<StageRecord>,
}

impl StageReport {
    pub fn new(mut records: Vec<StageRecord>) -> Self {
        records.sort_by(|a, b| {
            a.stage
                .cmp(&b.stage)
                .then_with(|| a.multiplet.cmp(&b.multiplet))
        });
        Self { records }
    }

    pub fn records(&self) -> &[StageRecord] {
        &self.records
    }

    pub fn merge(mut self, other: StageReport) -> StageReport {
        self.records.extend(other.records);
        StageReport::new(self.records)
    }

    pub fn n_passed(&self, stage: StageId) -> usize {
        self.records
            .iter()
            .filter(|r| r.stage == stage && r.passed)
            .count()
    }

    pub fn n_records(&self, stage: StageId) -> usize {
        self.records.iter().filter(|r| r.stage == stage).count()
    }
}

/// Candidate that cleared the permutation stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationSurvivor {
    pub multiplet: Multiplet,
    pub provenance: Provenance,
    pub omega: f64,
    pub p_adj: f64,
}

/// Candidate that also cleared the bootstrap stage.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSurvivor {
    pub multiplet: Multiplet,
    pub provenance: Provenance,
    pub omega: f64,
    pub p_adj: f64,
    pub ci: (f64, f64),
}

struct PermOutcome {
    multiplet: Multiplet,
    provenance: Provenance,
    omega: Option<f64>,
    p_raw: Option<f64>,
}

/// Stage 1: column-permutation null, BH-FDR per order family, effect floor.
pub fn stage1_permutation(
    scores: &CopulaScores,
    cands: &CandidateSet,
    cfg: &ValidationConfig,
) -> Result<(StageReport, Vec<PermutationSurvivor>)> {
    cfg.validate()?;
    let deriver = SeedDeriver::new(cfg.seed);
    let list: Vec<(Multiplet, Provenance)> =
        cands.iter().map(|(m, p)| (m.clone(), p)).collect();
    let n = scores.n_respondents();

    let outcomes: Vec<PermOutcome> = list
        .par_iter()
        .map(|(m, prov)| {
            let observed = multiplet_correlation(scores, m)
                .and_then(|corr| omega_from_correlation(&corr, m.order()));
            let omega = match observed {
                Ok(w) => w,
                Err(_) => {
                    // degenerate candidate: recorded, never aborts the batch
                    return PermOutcome {
                        multiplet: m.clone(),
                        provenance: *prov,
                        omega: None,
                        p_raw: None,
                    };
                }
            };
            let k = m.order();
            // unit-variance copies so permuted correlations are plain dots/n
            let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
            for &item in m.items() {
                let mut col = scores.column_vec(item);
                let sd = (col.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
                col.iter_mut().for_each(|v| *v /= sd);
                cols.push(col);
            }
            let mut rngs: Vec<_> = (0..k)
                .map(|c| {
                    deriver.rng(&["stage1", &m.id_string(), "col", &c.to_string()])
                })
                .collect();
            let mut exceed = 0usize;
            let mut gram = vec![0.0; k * k];
            for _ in 0..cfg.n_perm {
                for (col, rng) in cols.iter_mut().zip(rngs.iter_mut()) {
                    col.shuffle(rng);
                }
                for a in 0..k {
                    gram[a * k + a] = 1.0;
                    for b in (a + 1)..k {
                        let dot: f64 =
                            cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum();
                        let r = (dot / n as f64).clamp(-1.0, 1.0);
                        gram[a * k + b] = r;
                        gram[b * k + a] = r;
                    }
                }
                match omega_from_correlation(&gram, k) {
                    Ok(w) if w.abs() < omega.abs() => {}
                    // singular null draws count as extreme (conservative)
                    _ => exceed += 1,
                }
            }
            let p = (1 + exceed) as f64 / (cfg.n_perm + 1) as f64;
            PermOutcome {
                multiplet: m.clone(),
                provenance: *prov,
                omega: Some(omega),
                p_raw: Some(p),
            }
        })
        .collect();

    // BH jointly per order family
    let mut p_adj: Vec<Option<f64>> = vec![None; outcomes.len()];
    let mut families: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, o) in outcomes.iter().enumerate() {
        if o.p_raw.is_some() {
            families.entry(o.multiplet.order()).or_default().push(idx);
        }
    }
    for indices in families.values() {
        let raw: Vec<f64> = indices.iter().map(|&i| outcomes[i].p_raw.unwrap()).collect();
        let adj = benjamini_hochberg_adjust(&raw);
        for (&i, a) in indices.iter().zip(adj) {
            p_adj[i] = Some(a);
        }
    }

    let mut records = Vec::with_capacity(outcomes.len());
    let mut survivors = Vec::new();
    for (idx, o) in outcomes.into_iter().enumerate() {
        let adj = p_adj[idx];
        let (passed, reason) = match (o.omega, adj) {
            (Some(w), Some(a)) => {
                if a > cfg.alpha_fdr {
                    (false, Some(FailureReason::NotSignificant))
                } else if w.abs() < cfg.effect_floor {
                    (false, Some(FailureReason::BelowFloor))
                } else {
                    (true, None)
                }
            }
            _ => (false, Some(FailureReason::NotSignificant)),
        };
        if passed {
            survivors.push(PermutationSurvivor {
                multiplet: o.multiplet.clone(),
                provenance: o.provenance,
                omega: o.omega.unwrap(),
                p_adj: adj.unwrap(),
            });
        }
        records.push(StageRecord {
            multiplet: o.multiplet,
            provenance: o.provenance,
            stage: StageId::Permutation,
            omega: o.omega,
            p_raw: o.p_raw,
            p_adj: adj,
            ci: None,
            passed,
            reason,
        });
    }
    survivors.sort_by(|a, b| a.multiplet.cmp(&b.multiplet));
    Ok((StageReport::new(records), survivors))
}

/// Share of dropped resamples above which a candidate is unstable.
const MAX_DROP_SHARE: f64 = 0.05;

/// Stage 2: row bootstrap with BCa intervals.
pub fn stage2_bootstrap(
    scores: &CopulaScores,
    survivors: &[PermutationSurvivor],
    cfg: &ValidationConfig,
) -> Result<(StageReport, Vec<BootstrapSurvivor>)> {
    cfg.validate()?;
    let deriver = SeedDeriver::new(cfg.seed);
    let results: Vec<StageRecord> = survivors
        .par_iter()
        .map(|s| {
            let cols: Vec<Vec<f64>> = s
                .multiplet
                .items()
                .iter()
                .map(|&i| scores.column_vec(i))
                .collect();
            let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
            let mut rng = deriver.rng(&["stage2", &s.multiplet.id_string()]);
            let outcome = bootstrap_omega(&refs, s.omega, cfg.n_boot, cfg.ci_level, &mut rng);
            let (passed, reason, ci) = match outcome {
                None => (false, Some(FailureReason::UnstablePoint), None),
                Some(o) => {
                    let ci = (o.lo, o.hi);
                    if o.n_dropped as f64 > MAX_DROP_SHARE * cfg.n_boot as f64 {
                        (false, Some(FailureReason::UnstablePoint), Some(ci))
                    } else if o.lo <= 0.0 && o.hi >= 0.0 {
                        (false, Some(FailureReason::CiSpansZero), Some(ci))
                    } else {
                        let q_lo = sorted_quantile(&o.boot_stats, 0.005);
                        let q_hi = sorted_quantile(&o.boot_stats, 0.995);
                        let central = s.omega >= q_lo && s.omega <= q_hi;
                        let contained = o.lo <= s.omega && s.omega <= o.hi;
                        if central && contained {
                            (true, None, Some(ci))
                        } else {
                            (false, Some(FailureReason::UnstablePoint), Some(ci))
                        }
                    }
                }
            };
            StageRecord {
                multiplet: s.multiplet.clone(),
                provenance: s.provenance,
                stage: StageId::Bootstrap,
                omega: Some(s.omega),
                p_raw: None,
                p_adj: Some(s.p_adj),
                ci,
                passed,
                reason,
            }
        })
        .collect();

    let mut out = Vec::new();
    for (r, s) in results.iter().zip(survivors) {
        if r.passed {
            out.push(BootstrapSurvivor {
                multiplet: s.multiplet.clone(),
                provenance: s.provenance,
                omega: s.omega,
                p_adj: s.p_adj,
                ci: r.ci.unwrap(),
            });
        }
    }
    out.sort_by(|a, b| a.multiplet.cmp(&b.multiplet));
    Ok((StageReport::new(results), out))
}

/// Stage 3: hierarchical sub-multiplet comparison.
///
/// Sub-multiplet intervals use fresh bootstrap draws with seeds derived from
/// the sub-multiplet identity, so a sub shared by several parents is
/// evaluated once and identically regardless of scheduling.
pub fn stage3_hierarchical(
    scores: &CopulaScores,
    survivors: &[BootstrapSurvivor],
    cfg: &ValidationConfig,
) -> Result<(StageReport, Vec<BootstrapSurvivor>)> {
    cfg.validate()?;
    let deriver = SeedDeriver::new(cfg.seed);
    let mut subs: BTreeSet<Multiplet> = BTreeSet::new();
    for s in survivors {
        if s.multiplet.order() >= 4 {
            subs.extend(s.multiplet.sub_multiplets());
        }
    }
    let sub_list: Vec<Multiplet> = subs.into_iter().collect();
    // None means "whole real line": the sub-interval could not be computed
    // and conservatively forces removal of every parent.
    let sub_cis: BTreeMap<Multiplet, Option<(f64, f64)>> = sub_list
        .par_iter()
        .map(|sub| {
            let point = multiplet_correlation(scores, sub)
                .and_then(|corr| omega_from_correlation(&corr, sub.order()));
            let ci = match point {
                Err(_) => {
                    log::warn!("sub-multiplet {sub} is singular; treating its interval as the whole line");
                    None
                }
                Ok(w) => {
                    let cols: Vec<Vec<f64>> = sub
                        .items()
                        .iter()
                        .map(|&i| scores.column_vec(i))
                        .collect();
                    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
                    let mut rng = deriver.rng(&["stage3", "sub", &sub.id_string()]);
                    match bootstrap_omega(&refs, w, cfg.n_boot, cfg.ci_level, &mut rng) {
                        Some(o) if (o.n_dropped as f64) <= MAX_DROP_SHARE * cfg.n_boot as f64 => {
                            Some((o.lo, o.hi))
                        }
                        _ => {
                            log::warn!("sub-multiplet {sub} bootstrap unstable; treating its interval as the whole line");
                            None
                        }
                    }
                }
            };
            (sub.clone(), ci)
        })
        .collect();

    let mut records = Vec::with_capacity(survivors.len());
    let mut out = Vec::new();
    for s in survivors {
        let passed = if s.multiplet.order() < 4 {
            true
        } else {
            // closed-interval overlap with ANY sub-interval removes the parent
            !s.multiplet.sub_multiplets().iter().any(|sub| {
                match sub_cis.get(sub).copied().flatten() {
                    None => true, // whole line
                    Some((lo, hi)) => s.ci.0 <= hi && lo <= s.ci.1,
                }
            })
        };
        let reason = if passed {
            None
        } else {
            Some(FailureReason::SubsumedBySuborder)
        };
        if passed {
            out.push(s.clone());
        }
        records.push(StageRecord {
            multiplet: s.multiplet.clone(),
            provenance: s.provenance,
            stage: StageId::Hierarchy,
            omega: Some(s.omega),
            p_raw: None,
            p_adj: Some(s.p_adj),
            ci: Some(s.ci),
            passed,
            reason,
        });
    }
    out.sort_by(|a, b| a.multiplet.cmp(&b.multiplet));
    Ok((StageReport::new(records), out))
}

/// Full three-stage composition: candidates in, validated hyperedges and
/// the complete audit trail out.
pub fn validate_all(
    scores: &CopulaScores,
    cands: &CandidateSet,
    cfg: &ValidationConfig,
) -> Result<(Vec<ValidatedHyperedge>, StageReport)> {
    let (report1, survivors1) = stage1_permutation(scores, cands, cfg)?;
    let (report2, survivors2) = stage2_bootstrap(scores, &survivors1, cfg)?;
    let (report3, survivors3) = stage3_hierarchical(scores, &survivors2, cfg)?;
    let mut edges = Vec::with_capacity(survivors3.len());
    for s in survivors3 {
        edges.push(ValidatedHyperedge::new(
            s.multiplet,
            s.omega,
            s.ci.0,
            s.ci.1,
            s.p_adj,
            s.provenance,
            cfg.effect_floor,
        )?);
    }
    edges.sort_by(|a, b| a.multiplet.cmp(&b.multiplet));
    let report = report1.merge(report2).merge(report3);
    Ok((edges, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::InteractionType;
    use crate::info::copula_transform_continuous;
    use crate::synth::{
        calibrate_equal_loading, regime_specs, sample_system, BlockSystemSpec,
        CalibrationTarget, Regime, TripletSpec, E_COV_REDUNDANT,
    };
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn quick_cfg(seed: u64) -> ValidationConfig {
        ValidationConfig {
            n_perm: 200,
            n_boot: 1000,
            ..ValidationConfig::with_seed(seed)
        }
    }

    fn scores_from_system(sys: &crate::synth::SampledSystem) -> CopulaScores {
        copula_transform_continuous(&sys.columns(), sys.column_ids.clone(), "synthetic", None)
            .unwrap()
    }

    fn equicorr_scores(rho: f64, k: usize, n: usize, seed: u64) -> CopulaScores {
        // one-factor equicorrelated structure
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rho.sqrt();
        let resid = (1.0 - rho).sqrt();
        let mut cols = vec![Vec::with_capacity(n); k];
        for _ in 0..n {
            let f: f64 = rng.sample(StandardNormal);
            for col in cols.iter_mut() {
                col.push(a * f + resid * rng.sample::<f64, _>(StandardNormal));
            }
        }
        let ids = (0..k).map(|i| format!("v{i}")).collect();
        copula_transform_continuous(&cols, ids, "T", None).unwrap()
    }

    #[test]
    fn config_invariants_enforced() {
        let mut cfg = ValidationConfig::with_seed(1);
        assert!(cfg.validate().is_ok());
        cfg.n_perm = 99;
        assert!(cfg.validate().is_err());
        cfg.n_perm = 100;
        cfg.n_boot = 999;
        assert!(cfg.validate().is_err());
        cfg.n_boot = 1000;
        cfg.alpha_fdr = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn floor_separates_weak_redundancy() {
        // planted equicorrelated triplet, true omega ~ +0.085
        let scores = equicorr_scores(0.5, 3, 2000, 50);
        let mut cands = CandidateSet::new(3, 5).unwrap();
        cands
            .insert(Multiplet::new(vec![0, 1, 2], 3).unwrap(), Provenance::NetworkBased)
            .unwrap();

        let strict = quick_cfg(1);
        let (report, survivors) = stage1_permutation(&scores, &cands, &strict).unwrap();
        assert!(survivors.is_empty());
        assert_eq!(report.records()[0].reason, Some(FailureReason::BelowFloor));

        let lenient = ValidationConfig {
            effect_floor: 0.05,
            ..strict
        };
        let (report, survivors) = stage1_permutation(&scores, &cands, &lenient).unwrap();
        assert_eq!(survivors.len(), 1);
        assert!(report.records()[0].passed);
        assert!(survivors[0].omega > 0.05);
    }

    #[test]
    fn noise_candidates_rarely_pass() {
        // 100 triplets over i.i.d. columns
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 600;
        let p = 30;
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let ids = (0..p).map(|i| format!("v{i}")).collect();
        let scores = copula_transform_continuous(&cols, ids, "T", None).unwrap();
        let mut cands = CandidateSet::new(3, 5).unwrap();
        let mut inserted = 0;
        while inserted < 100 {
            let mut items: Vec<usize> = (0..3).map(|_| rng.gen_range(0..p)).collect();
            items.sort_unstable();
            items.dedup();
            if items.len() < 3 {
                continue;
            }
            if cands
                .insert(Multiplet::new(items, p).unwrap(), Provenance::NetworkBased)
                .unwrap()
            {
                inserted += 1;
            }
        }
        let cfg = ValidationConfig {
            effect_floor: 0.0, // isolate the FDR control
            ..quick_cfg(9)
        };
        let (report, survivors) = stage1_permutation(&scores, &cands, &cfg).unwrap();
        assert_eq!(report.n_records(StageId::Permutation), 100);
        assert!(
            survivors.len() <= 5,
            "false passes {} exceed the FDR budget",
            survivors.len()
        );
    }

    #[test]
    fn strong_synergy_validates_with_negative_interval() {
        let spec = calibrate_equal_loading(
            crate::synth::E_COV_SYNERGISTIC,
            CalibrationTarget::Synergistic(0.25),
        )
        .unwrap();
        let sys = sample_system(&BlockSystemSpec {
            triplets: vec![spec],
            n_samples: 5000,
            seed: 77,
        })
        .unwrap();
        let scores = scores_from_system(&sys);
        let mut cands = CandidateSet::new(3, 5).unwrap();
        cands
            .insert(Multiplet::new(vec![0, 1, 2], 3).unwrap(), Provenance::SubscaleIntra)
            .unwrap();
        let (edges, report) = validate_all(&scores, &cands, &quick_cfg(3)).unwrap();
        assert_eq!(edges.len(), 1);
        let e = &edges[0];
        assert_eq!(e.interaction_type, InteractionType::Synergy);
        assert!(e.ci_high < 0.0);
        assert!(e.ci_low <= e.omega && e.omega <= e.ci_high);
        assert_eq!(report.n_passed(StageId::Hierarchy), 1);
    }

    #[test]
    fn noise_padding_is_removed_at_order_four() {
        let spec =
            calibrate_equal_loading(E_COV_REDUNDANT, CalibrationTarget::Redundant(0.25)).unwrap();
        let sys = sample_system(&BlockSystemSpec {
            triplets: vec![spec, TripletSpec::new((0.0, 0.0, 0.0), 0.0).unwrap()],
            n_samples: 1500,
            seed: 13,
        })
        .unwrap();
        let scores = scores_from_system(&sys);
        let mut cands = CandidateSet::new(3, 5).unwrap();
        let triplet = Multiplet::new(vec![0, 1, 2], 6).unwrap();
        let padded = Multiplet::new(vec![0, 1, 2, 3], 6).unwrap();
        cands.insert(triplet.clone(), Provenance::NetworkBased).unwrap();
        cands.insert(padded.clone(), Provenance::NetworkBased).unwrap();
        let (edges, report) = validate_all(&scores, &cands, &quick_cfg(21)).unwrap();
        let validated: Vec<&Multiplet> = edges.iter().map(|e| &e.multiplet).collect();
        assert!(validated.contains(&&triplet), "planted triplet must survive");
        assert!(!validated.contains(&&padded), "padded multiplet must be removed");
        let removal = report
            .records()
            .iter()
            .find(|r| r.stage == StageId::Hierarchy && r.multiplet == padded)
            .expect("padded candidate reaches stage 3");
        assert_eq!(removal.reason, Some(FailureReason::SubsumedBySuborder));
    }

    #[test]
    fn genuine_order_four_effect_is_retained() {
        // equicorrelated quadruplet rho=0.5: omega_4 ~ 0.223 vs sub-triplet
        // omega_3 ~ 0.085, analytically disjoint at this sample size
        let scores = equicorr_scores(0.5, 4, 4000, 31);
        let mut cands = CandidateSet::new(3, 5).unwrap();
        let quad = Multiplet::new(vec![0, 1, 2, 3], 4).unwrap();
        cands.insert(quad.clone(), Provenance::NetworkBased).unwrap();
        let (edges, _) = validate_all(&scores, &cands, &quick_cfg(4)).unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].multiplet, quad);
        assert!(edges[0].omega > 0.15);
    }

    #[test]
    fn empty_candidates_give_empty_output() {
        let scores = equicorr_scores(0.3, 3, 100, 2);
        let cands = CandidateSet::new(3, 5).unwrap();
        let (edges, report) = validate_all(&scores, &cands, &quick_cfg(0)).unwrap();
        assert!(edges.is_empty());
        assert!(report.records().is_empty());
    }

    #[test]
    fn near_zero_regime_validates_nothing_at_default_floor() {
        let sys = sample_system(&BlockSystemSpec {
            triplets: regime_specs(Regime::NearZero, 0.15, 0.10).unwrap(),
            n_samples: 2000,
            seed: 5,
        })
        .unwrap();
        let scores = scores_from_system(&sys);
        let mut cands = CandidateSet::new(3, 5).unwrap();
        for b in &sys.blocks {
            cands
                .insert(
                    Multiplet::new(b.items.to_vec(), sys.n_items()).unwrap(),
                    Provenance::SubscaleIntra,
                )
                .unwrap();
        }
        let (edges, _) = validate_all(&scores, &cands, &quick_cfg(6)).unwrap();
        assert!(edges.is_empty(), "near-zero regime validated {}", edges.len());
    }

    #[test]
    fn mixed_regime_recovers_correct_signs() {
        let sys = sample_system(&BlockSystemSpec {
            triplets: regime_specs(Regime::Mixed, 0.15, 0.10).unwrap(),
            n_samples: 3000,
            seed: 15,
        })
        .unwrap();
        let scores = scores_from_system(&sys);
        let mut cands = CandidateSet::new(3, 5).unwrap();
        for b in &sys.blocks {
            cands
                .insert(
                    Multiplet::new(b.items.to_vec(), sys.n_items()).unwrap(),
                    Provenance::SubscaleIntra,
                )
                .unwrap();
        }
        let (edges, report) = validate_all(&scores, &cands, &quick_cfg(16)).unwrap();
        assert!(!edges.is_empty());
        for e in &edges {
            let truth = sys.ground_truth_omega(&e.multiplet);
            assert!(truth.abs() > 0.15, "validated {} has near-zero truth", e.multiplet);
            assert_eq!(
                e.omega > 0.0,
                truth > 0.0,
                "sign mismatch on {}",
                e.multiplet
            );
            // sign consistency: CI strictly one side of zero, matching omega
            assert_eq!(e.ci_low > 0.0, e.omega > 0.0);
            assert_eq!(e.ci_high < 0.0, e.omega < 0.0);
        }
        // monotone filtering: stage outputs are subsets of stage inputs
        let passed1: BTreeSet<_> = report
            .records()
            .iter()
            .filter(|r| r.stage == StageId::Permutation && r.passed)
            .map(|r| r.multiplet.clone())
            .collect();
        let stage2: BTreeSet<_> = report
            .records()
            .iter()
            .filter(|r| r.stage == StageId::Bootstrap)
            .map(|r| r.multiplet.clone())
            .collect();
        assert!(stage2.is_subset(&passed1));
        // reasons partition the removals
        for r in report.records() {
            assert_eq!(r.passed, r.reason.is_none());
        }
    }

    #[test]
    fn byte_identical_across_worker_counts() {
        let sys = sample_system(&BlockSystemSpec {
            triplets: regime_specs(Regime::Mixed, 0.15, 0.10).unwrap(),
            n_samples: 800,
            seed: 23,
        })
        .unwrap();
        let scores = scores_from_system(&sys);
        let mut cands = CandidateSet::new(3, 5).unwrap();
        for b in &sys.blocks {
            cands
                .insert(
                    Multiplet::new(b.items.to_vec(), sys.n_items()).unwrap(),
                    Provenance::SubscaleIntra,
                )
                .unwrap();
        }
        cands
            .insert(Multiplet::new(vec![0, 1, 2, 3], 27).unwrap(), Provenance::NetworkBased)
            .unwrap();
        let cfg = quick_cfg(99);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| validate_all(&scores, &cands, &cfg).unwrap())
        };
        let (edges1, report1) = run(1);
        let (edges4, report4) = run(4);
        assert_eq!(edges1, edges4);
        assert_eq!(report1, report4);
    }
}
