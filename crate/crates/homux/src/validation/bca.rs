//! Bias-corrected and accelerated (BCa) bootstrap intervals.
//!
//! The generic kernels (`bca_bounds`, `percentile_bounds`,
//! `jackknife_acceleration`) work for any statistic; `bootstrap_omega`
//! specializes them to the interaction weight of a column selection, using
//! exact leave-one-out moment downdates for the jackknife.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::info::{omega_from_correlation, MomentAccumulator};
use crate::stats::{norm_cdf, norm_quantile, sorted_quantile};

/// Percentile interval from sorted bootstrap statistics.
pub fn percentile_bounds(sorted_boot: &[f64], level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    (
        sorted_quantile(sorted_boot, alpha / 2.0),
        sorted_quantile(sorted_boot, 1.0 - alpha / 2.0),
    )
}

/// BCa interval from sorted bootstrap statistics and precomputed
/// bias-correction `z0` and acceleration `accel`. With `z0 = accel = 0`
/// this reduces to the percentile interval on the same resamples.
pub fn bca_bounds(sorted_boot: &[f64], z0: f64, accel: f64, level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    let adjust = |q: f64| -> f64 {
        let z = norm_quantile(q);
        let denom = 1.0 - accel * (z0 + z);
        if denom <= 0.0 {
            // acceleration pathologically large; saturate at the tail
            return if z0 + z > 0.0 { 1.0 } else { 0.0 };
        }
        norm_cdf(z0 + (z0 + z) / denom)
    };
    let p_lo = adjust(alpha / 2.0).clamp(0.0, 1.0);
    let p_hi = adjust(1.0 - alpha / 2.0).clamp(0.0, 1.0);
    (
        sorted_quantile(sorted_boot, p_lo),
        sorted_quantile(sorted_boot, p_hi),
    )
}

/// Bias-correction constant from the share of bootstrap statistics below
/// the point estimate; the share is clamped away from 0 and 1 so the
/// quantile stays finite.
pub fn bias_correction(sorted_boot: &[f64], point: f64) -> f64 {
    let b = sorted_boot.len();
    let below = sorted_boot.iter().filter(|&&x| x < point).count();
    let share = ((below as f64) / b as f64).clamp(1.0 / (b as f64 + 1.0), b as f64 / (b as f64 + 1.0));
    norm_quantile(share)
}

/// Acceleration from jackknife replicates:
/// `sum (mean - x)^3 / (6 [sum (mean - x)^2]^{3/2})`.
pub fn jackknife_acceleration(jackknife: &[f64]) -> f64 {
    let n = jackknife.len() as f64;
    if jackknife.is_empty() {
        return 0.0;
    }
    let mean = jackknife.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut denom = 0.0;
    for &x in jackknife {
        let d = mean - x;
        num += d * d * d;
        denom += d * d;
    }
    let denom = denom.powf(1.5);
    if denom > 0.0 {
        num / (6.0 * denom)
    } else {
        0.0
    }
}

/// Result of bootstrapping the interaction weight of one column selection.
#[derive(Debug, Clone)]
pub(crate) struct OmegaBootstrap {
    pub lo: f64,
    pub hi: f64,
    /// Sorted retained bootstrap statistics.
    pub boot_stats: Vec<f64>,
    pub n_dropped: usize,
}

/// Row-resampling bootstrap of the interaction weight.
///
/// `point` is the full-sample estimate (the caller already has it; reusing
/// it keeps every stage's numbers identical). Resamples with singular
/// correlation are dropped and counted. Returns `None` when no usable
/// resamples remain.
pub(crate) fn bootstrap_omega(
    columns: &[&[f64]],
    point: f64,
    n_boot: usize,
    ci_level: f64,
    rng: &mut ChaCha8Rng,
) -> Option<OmegaBootstrap> {
    let k = columns.len();
    let n = columns[0].len();
    let mut stats = Vec::with_capacity(n_boot);
    let mut dropped = 0usize;
    let mut acc = MomentAccumulator::new(k);
    let mut row = vec![0.0; k];
    for _ in 0..n_boot {
        acc.n = 0;
        acc.sum.iter_mut().for_each(|v| *v = 0.0);
        acc.cross.iter_mut().for_each(|v| *v = 0.0);
        for _ in 0..n {
            let r = rng.gen_range(0..n);
            for (c, col) in columns.iter().enumerate() {
                row[c] = col[r];
            }
            acc.add_row(&row);
        }
        match acc
            .correlation()
            .and_then(|corr| omega_from_correlation(&corr, k))
        {
            Ok(w) => stats.push(w),
            Err(_) => dropped += 1,
        }
    }
    if stats.is_empty() {
        return None;
    }
    stats.sort_by(|a, b| a.partial_cmp(b).expect("finite omegas"));

    // jackknife over rows via exact moment downdates
    let mut full = MomentAccumulator::new(k);
    for r in 0..n {
        for (c, col) in columns.iter().enumerate() {
            row[c] = col[r];
        }
        full.add_row(&row);
    }
    let mut jackknife = Vec::with_capacity(n);
    for r in 0..n {
        for (c, col) in columns.iter().enumerate() {
            row[c] = col[r];
        }
        let mut loo = full.clone();
        loo.remove_row(&row);
        if let Ok(w) = loo
            .correlation()
            .and_then(|corr| omega_from_correlation(&corr, k))
        {
            jackknife.push(w);
        }
    }
    let z0 = bias_correction(&stats, point);
    let accel = jackknife_acceleration(&jackknife);
    let (lo, hi) = bca_bounds(&stats, z0, accel, ci_level);
    Some(OmegaBootstrap {
        lo,
        hi,
        boot_stats: stats,
        n_dropped: dropped,
    })
}
