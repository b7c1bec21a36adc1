//! Synthetic multivariate Gaussian systems with planted interactions of
//! known sign and magnitude.
//!
//! Each planted block is a triplet `X_i = a_i F + eps_i` with a shared
//! standard-normal factor, unit-variance marginals, and a residual
//! covariance `e_cov` between the first two observed variables. Tuning
//! `e_cov` moves the block between redundancy-dominated (omega > 0),
//! synergy-dominated (omega < 0), and near-zero interaction. Independent
//! blocks are assembled into one system via a block-diagonal covariance,
//! so any multiplet spanning two blocks has exactly zero interaction.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Multiplet;
use crate::error::{Error, Result};
use crate::seed::SeedDeriver;

/// Residual covariances of the simulated regimes.
pub const E_COV_NEAR_ZERO: f64 = -0.15;
pub const E_COV_REDUNDANT: f64 = 0.22;
pub const E_COV_SYNERGISTIC: f64 = -0.39;

/// Default factor loading (all three variables).
pub const DEFAULT_LOADING: f64 = 0.6;

/// Blocks per synthetic dataset.
pub const DEFAULT_BLOCKS: usize = 9;

/// Single-factor triplet parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletSpec {
    pub loadings: (f64, f64, f64),
    pub e_cov: f64,
}

impl TripletSpec {
    pub fn new(loadings: (f64, f64, f64), e_cov: f64) -> Result<Self> {
        let spec = Self { loadings, e_cov };
        spec.correlation()?; // validates
        Ok(spec)
    }

    pub fn equal_loading(a: f64, e_cov: f64) -> Result<Self> {
        Self::new((a, a, a), e_cov)
    }

    /// Implied 3x3 correlation matrix; errors when not positive definite.
    pub fn correlation(&self) -> Result<[[f64; 3]; 3]> {
        triplet_covariance(self)
    }
}

/// Correlation matrix implied by the single-factor parameterization:
/// off-diagonals `(a1*a2 + e_cov, a1*a3, a2*a3)`, unit diagonal.
pub fn triplet_covariance(spec: &TripletSpec) -> Result<[[f64; 3]; 3]> {
    let (a1, a2, a3) = spec.loadings;
    for (name, a) in [("a1", a1), ("a2", a2), ("a3", a3)] {
        if a.is_nan() || a.abs() >= 1.0 {
            return Err(Error::Specification(format!(
                "triplet spec {spec:?}: loading {name}={a} must satisfy |a| < 1"
            )));
        }
    }
    let r12 = a1 * a2 + spec.e_cov;
    let r13 = a1 * a3;
    let r23 = a2 * a3;
    // Sylvester: leading minors 1, 1 - r12^2, det must all be positive
    let d12 = 1.0 - r12 * r12;
    let det = det3(r12, r13, r23);
    if d12 <= 0.0 || det <= 0.0 {
        return Err(Error::Specification(format!(
            "triplet spec {spec:?}: implied correlation not positive definite (det = {det:.6})"
        )));
    }
    Ok([[1.0, r12, r13], [r12, 1.0, r23], [r13, r23, 1.0]])
}

fn det3(r12: f64, r13: f64, r23: f64) -> f64 {
    1.0 + 2.0 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23
}

/// Exact Gaussian interaction weight of a triplet spec, in nats:
/// `0.5 * [ln det3 - sum of pairwise ln(1 - r^2)]`.
///
/// Computed from closed-form determinants, independently of the estimation
/// path; this is the oracle all synthetic tests compare against.
pub fn analytic_omega(spec: &TripletSpec) -> Result<f64> {
    let corr = triplet_covariance(spec)?;
    let (r12, r13, r23) = (corr[0][1], corr[0][2], corr[1][2]);
    let det = det3(r12, r13, r23);
    let omega = 0.5
        * (det.ln()
            - (1.0 - r12 * r12).ln()
            - (1.0 - r13 * r13).ln()
            - (1.0 - r23 * r23).ln());
    Ok(omega)
}

/// Requested sign of a calibrated regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationTarget {
    /// |omega| as small as possible.
    NearZero,
    /// omega >= target magnitude.
    Redundant(f64),
    /// omega <= -target magnitude (argument is the magnitude).
    Synergistic(f64),
}

/// Search over equal loadings `a = sqrt(t)` for a spec whose analytic
/// interaction weight meets the target at the given residual covariance.
///
/// The residual covariance stays fixed (it is what defines the regime); only
/// the loading moves. The search is a deterministic fine grid over
/// `t = a^2` restricted to comfortably positive-definite specs, followed by
/// a local bisection refinement.
pub fn calibrate_equal_loading(e_cov: f64, target: CalibrationTarget) -> Result<TripletSpec> {
    let desired = match target {
        CalibrationTarget::NearZero => 0.0,
        CalibrationTarget::Redundant(m) => m.abs(),
        CalibrationTarget::Synergistic(m) => -m.abs(),
    };
    let omega_at = |t: f64| -> Option<f64> {
        let a = t.sqrt();
        let r12 = t + e_cov;
        let d12 = 1.0 - r12 * r12;
        let det = det3(r12, t, t);
        if a >= 1.0 || d12 <= 1e-4 || det <= 1e-4 {
            return None;
        }
        TripletSpec::equal_loading(a, e_cov)
            .ok()
            .and_then(|s| analytic_omega(&s).ok())
    };
    let mut best: Option<(f64, f64)> = None; // (t, |omega - desired|)
    let mut prev: Option<(f64, f64)> = None; // (t, omega) for bracketing
    let mut bracket: Option<(f64, f64)> = None;
    let steps = 2000;
    for i in 1..steps {
        let t = i as f64 / steps as f64;
        let Some(w) = omega_at(t) else {
            prev = None;
            continue;
        };
        let err = (w - desired).abs();
        if best.map_or(true, |(_, e)| err < e) {
            best = Some((t, err));
        }
        if let Some((pt, pw)) = prev {
            if (pw - desired) * (w - desired) <= 0.0 && bracket.is_none() {
                bracket = Some((pt, t));
            }
        }
        prev = Some((t, w));
    }
    let mut t_star = best
        .ok_or_else(|| {
            Error::Specification(format!(
                "no positive-definite equal-loading spec exists for e_cov = {e_cov}"
            ))
        })?
        .0;
    if let Some((mut lo, mut hi)) = bracket {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match (omega_at(lo), omega_at(mid)) {
                (Some(wl), Some(wm)) => {
                    if (wl - desired) * (wm - desired) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                _ => break,
            }
        }
        t_star = 0.5 * (lo + hi);
    }
    let spec = TripletSpec::equal_loading(t_star.sqrt(), e_cov)?;
    match target {
        CalibrationTarget::Redundant(m) if analytic_omega(&spec)? < m.abs() => {
            Err(Error::Specification(format!(
                "cannot reach omega >= {m} with e_cov = {e_cov}; best loading {:.4} gives {:.4}",
                t_star.sqrt(),
                analytic_omega(&spec)?
            )))
        }
        CalibrationTarget::Synergistic(m) if analytic_omega(&spec)? > -m.abs() => {
            Err(Error::Specification(format!(
                "cannot reach omega <= -{m} with e_cov = {e_cov}; best loading {:.4} gives {:.4}",
                t_star.sqrt(),
                analytic_omega(&spec)?
            )))
        }
        _ => Ok(spec),
    }
}

/// The four simulated regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NearZero,
    Redundant,
    Synergistic,
    Mixed,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::NearZero,
        Regime::Redundant,
        Regime::Synergistic,
        Regime::Mixed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::NearZero => "near-zero",
            Regime::Redundant => "redundant",
            Regime::Synergistic => "synergistic",
            Regime::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "near-zero" | "near_zero" => Ok(Regime::NearZero),
            "redundant" => Ok(Regime::Redundant),
            "synergistic" => Ok(Regime::Synergistic),
            "mixed" => Ok(Regime::Mixed),
            other => Err(Error::Config(format!("unknown regime {other:?}"))),
        }
    }
}

/// Per-regime triplet specs: near-zero keeps the default loading, the signed
/// regimes calibrate the loading so |omega| clears `floor + margin`.
pub fn regime_specs(regime: Regime, floor: f64, margin: f64) -> Result<Vec<TripletSpec>> {
    let near = TripletSpec::equal_loading(DEFAULT_LOADING, E_COV_NEAR_ZERO)?;
    let red = calibrate_equal_loading(
        E_COV_REDUNDANT,
        CalibrationTarget::Redundant(floor + margin),
    )?;
    let syn = calibrate_equal_loading(
        E_COV_SYNERGISTIC,
        CalibrationTarget::Synergistic(floor + margin),
    )?;
    let specs = match regime {
        Regime::NearZero => vec![near; DEFAULT_BLOCKS],
        Regime::Redundant => vec![red; DEFAULT_BLOCKS],
        Regime::Synergistic => vec![syn; DEFAULT_BLOCKS],
        Regime::Mixed => {
            let mut v = Vec::with_capacity(DEFAULT_BLOCKS);
            v.extend(std::iter::repeat(red).take(3));
            v.extend(std::iter::repeat(syn).take(3));
            v.extend(std::iter::repeat(near).take(3));
            v
        }
    };
    Ok(specs)
}

/// A full synthetic dataset description: independent triplet blocks,
/// sample count, master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSystemSpec {
    pub triplets: Vec<TripletSpec>,
    pub n_samples: usize,
    pub seed: u64,
}

/// One planted block with its exact interaction weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTriplet {
    /// 0-based column indices of the block.
    pub items: [usize; 3],
    pub spec: TripletSpec,
    pub analytic_omega: f64,
}

/// Sampled, standardized system plus its ground truth.
#[derive(Debug, Clone)]
pub struct SampledSystem {
    /// Respondents x items, each column standardized to zero mean and unit
    /// (population) variance.
    pub values: Array2<f64>,
    pub column_ids: Vec<String>,
    pub blocks: Vec<PlantedTriplet>,
}

impl SampledSystem {
    pub fn n_items(&self) -> usize {
        self.values.ncols()
    }

    /// Columns as owned vectors, the layout the copula transform expects.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.values.ncols())
            .map(|j| self.values.column(j).to_vec())
            .collect()
    }

    /// Index of the block containing every item of the multiplet, if any.
    pub fn block_of(&self, multiplet: &Multiplet) -> Option<usize> {
        let first_block = multiplet.items()[0] / 3;
        if multiplet.items().iter().all(|&i| i / 3 == first_block) {
            Some(first_block)
        } else {
            None
        }
    }

    /// Exact interaction weight of a multiplet under the generating model.
    ///
    /// A multiplet spanning two or more independent blocks carries no
    /// higher-order interaction: adding independent variables leaves the
    /// O-information of the contained block unchanged, and any multiplet
    /// whose intersection with every block has fewer than 3 items reduces
    /// to pairwise-or-less structure, hence weight 0. For the triplet
    /// blocks used here that means: exactly the planted triplets carry
    /// their analytic weight; everything else not fully containing a
    /// block is 0, and a superset of a block inherits the block's weight.
    pub fn ground_truth_omega(&self, multiplet: &Multiplet) -> f64 {
        let mut total = 0.0;
        for block in &self.blocks {
            if block.items.iter().all(|&i| multiplet.contains(i)) {
                total += block.analytic_omega;
            } else {
                // A partial overlap of 2 items contributes only a pairwise
                // term, which O-information at order >= 3 cancels exactly
                // under block independence.
            }
        }
        total
    }
}

/// Draw `n_samples` rows from the block-diagonal Gaussian and standardize
/// every column.
pub fn sample_system(spec: &BlockSystemSpec) -> Result<SampledSystem> {
    if spec.triplets.is_empty() {
        return Err(Error::Specification("block system needs >= 1 triplet".into()));
    }
    if spec.n_samples < 3 {
        return Err(Error::Specification(format!(
            "block system needs >= 3 samples, got {}",
            spec.n_samples
        )));
    }
    let n = spec.n_samples;
    let n_items = 3 * spec.triplets.len();
    let deriver = SeedDeriver::new(spec.seed);
    let mut values = Array2::<f64>::zeros((n, n_items));
    let mut blocks = Vec::with_capacity(spec.triplets.len());
    for (b, t) in spec.triplets.iter().enumerate() {
        let corr = triplet_covariance(t)?;
        let l = chol3(&corr).ok_or_else(|| {
            Error::Specification(format!("block {b}: correlation not positive definite"))
        })?;
        let mut rng = deriver.rng(&["synth", "block", &b.to_string()]);
        for r in 0..n {
            let g = [
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ];
            for i in 0..3 {
                let mut v = 0.0;
                for j in 0..=i {
                    v += l[i][j] * g[j];
                }
                values[(r, 3 * b + i)] = v;
            }
        }
        blocks.push(PlantedTriplet {
            items: [3 * b, 3 * b + 1, 3 * b + 2],
            spec: *t,
            analytic_omega: analytic_omega(t)?,
        });
    }
    // standardize to zero mean, unit population variance
    for j in 0..n_items {
        let mut col = values.column_mut(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        if sd <= 0.0 {
            return Err(Error::Specification(format!(
                "sampled column {j} is degenerate"
            )));
        }
        col.mapv_inplace(|v| (v - mean) / sd);
    }
    let column_ids = (1..=n_items).map(|i| format!("v{i}")).collect();
    Ok(SampledSystem {
        values,
        column_ids,
        blocks,
    })
}

fn chol3(corr: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut l = [[0.0; 3]; 3];
    for j in 0..3 {
        for i in j..3 {
            let mut s = corr[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[j][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Quantile-bin each column into `levels` ordinal codes `0..levels-1`.
///
/// This is the bridge from the continuous simulation to the Likert pipeline:
/// equiprobable bins from the column's own empirical quantiles.
pub fn discretize_quantile(values: &Array2<f64>, levels: usize) -> Result<Array2<i32>> {
    if levels < 2 {
        return Err(Error::Specification(format!(
            "discretization needs >= 2 levels, got {levels}"
        )));
    }
    let n = values.nrows();
    let mut out = Array2::<i32>::zeros((n, values.ncols()));
    for j in 0..values.ncols() {
        let col = values.column(j);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("finite values"));
        for (pos, &idx) in order.iter().enumerate() {
            out[(idx, j)] = ((pos * levels) / n).min(levels - 1) as i32;
        }
    }
    Ok(out)
}
