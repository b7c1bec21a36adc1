//! Graphical lasso (off-diagonal l1 penalty) with EBIC model selection.
//!
//! Block coordinate descent in the covariance parameterization: each column
//! update solves a lasso subproblem by coordinate descent, and the outer loop
//! runs until the duality gap `tr(S Theta) + lambda ||Theta||_1,off - p`
//! and the fresh-inverse KKT residual are both within tolerance. The lambda
//! sweep is warm-started and strictly sequential, so model selection does
//! not depend on worker counts.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::info::PD_RIDGE;

use super::{invert_pd, CorrelationEstimate, DyadicNetwork};

const GAP_TOL: f64 = 1e-6;
const MAX_SWEEPS: usize = 500;
const MAX_INNER: usize = 1000;
/// Precision entries at or below this magnitude count as structural zeros.
const ZERO_EPS: f64 = 1e-10;

/// Log-spaced grid from `lambda_max = max |off-diagonal|` down to
/// `min_ratio * lambda_max`.
pub fn default_lambda_grid(corr: &CorrelationEstimate, size: usize, min_ratio: f64) -> Vec<f64> {
    let p = corr.n_items();
    let mut lambda_max: f64 = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            lambda_max = lambda_max.max(corr.matrix[(i, j)].abs());
        }
    }
    if lambda_max <= 0.0 {
        // nothing to shrink; any positive lambda yields the empty network
        return vec![1e-3];
    }
    let size = size.max(1);
    if size == 1 {
        return vec![lambda_max];
    }
    (0..size)
        .map(|i| lambda_max * min_ratio.powf(i as f64 / (size - 1) as f64))
        .collect()
}

struct FitDiagnostics {
    lambda: f64,
    gap: f64,
    kkt: f64,
    sweeps: usize,
}

struct Fit {
    theta: Array2<f64>,
    lambda: f64,
    n_edges: usize,
    ebic: f64,
}

/// EBIC-selected sparse partial-correlation network.
///
/// For each lambda in the (strictly decreasing) grid the l1-penalized
/// precision matrix is estimated to duality gap <= 1e-6; the returned
/// network minimizes `EBIC = -2 loglik + E ln n + 4 E gamma ln p` with ties
/// going to the sparser (larger-lambda) model. Precision entries are turned
/// into partial correlations `-theta_ij / sqrt(theta_ii theta_jj)`.
pub fn ebic_glasso(
    corr: &CorrelationEstimate,
    n: usize,
    gamma: f64,
    lambda_grid: &[f64],
) -> Result<DyadicNetwork> {
    if gamma < 0.0 {
        return Err(Error::Config(format!("EBIC gamma must be >= 0, got {gamma}")));
    }
    if n < 2 {
        return Err(Error::Data(format!("EBIC needs a sample size >= 2, got {n}")));
    }
    if lambda_grid.is_empty() {
        return Err(Error::Config("lambda grid is empty".into()));
    }
    for w in lambda_grid.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::Config(
                "lambda grid must be strictly decreasing".into(),
            ));
        }
    }
    if lambda_grid[lambda_grid.len() - 1] <= 0.0 {
        return Err(Error::Config("lambda grid entries must be positive".into()));
    }
    let p = corr.n_items();
    let s = ensure_pd(&corr.matrix)?;

    // warm-started state across the lambda path
    let mut w = s.clone();
    let mut betas = Array2::<f64>::zeros((p, p)); // column j: coefficients over the others
    let mut best: Option<Fit> = None;
    let mut failures: Vec<FitDiagnostics> = Vec::new();

    for &lambda in lambda_grid {
        match glasso_fixed_lambda(&s, lambda, &mut w, &mut betas) {
            Ok(theta) => {
                let n_edges = count_edges(&theta);
                let ebic = ebic_score(&s, &theta, n, gamma, n_edges)?;
                let better = match &best {
                    None => true,
                    Some(b) => ebic < b.ebic,
                };
                if better {
                    best = Some(Fit {
                        theta,
                        lambda,
                        n_edges,
                        ebic,
                    });
                }
            }
            Err(diag) => failures.push(diag),
        }
    }

    let fit = best.ok_or_else(|| {
        let detail: Vec<String> = failures
            .iter()
            .map(|d| {
                format!(
                    "lambda={:.6} gap={:.3e} kkt={:.3e} sweeps={}",
                    d.lambda, d.gap, d.kkt, d.sweeps
                )
            })
            .collect();
        Error::Estimation(format!(
            "graphical lasso converged for no lambda on the grid [{}]",
            detail.join("; ")
        ))
    })?;

    let mut partial = Array2::<f64>::zeros((p, p));
    for i in 0..p {
        for j in 0..p {
            if i == j {
                continue;
            }
            let th = fit.theta[(i, j)];
            partial[(i, j)] = if th.abs() <= ZERO_EPS {
                0.0
            } else {
                (-th / (fit.theta[(i, i)] * fit.theta[(j, j)]).sqrt()).clamp(-0.999_999, 0.999_999)
            };
        }
    }
    let net = DyadicNetwork {
        partial_corr: partial,
        precision: fit.theta,
        lambda_selected: fit.lambda,
        ebic_gamma: gamma,
    };
    if net.n_edges() > 0 && net.n_components() > 1 {
        log::warn!(
            "selected network has {} connected components ({} edges); proceeding per component",
            net.n_components(),
            fit.n_edges
        );
    }
    Ok(net)
}

fn ensure_pd(matrix: &Array2<f64>) -> Result<Array2<f64>> {
    if invert_pd(matrix).is_some() {
        return Ok(matrix.clone());
    }
    let mut ridged = matrix.clone();
    for i in 0..matrix.nrows() {
        ridged[(i, i)] += PD_RIDGE;
    }
    if invert_pd(&ridged).is_some() {
        Ok(ridged)
    } else {
        Err(Error::SingularCovariance(
            "correlation matrix not positive definite after ridge".into(),
        ))
    }
}

/// One lambda on the path. `w` and `betas` are warm-start state and are
/// left at the converged values on success.
fn glasso_fixed_lambda(
    s: &Array2<f64>,
    lambda: f64,
    w: &mut Array2<f64>,
    betas: &mut Array2<f64>,
) -> std::result::Result<Array2<f64>, FitDiagnostics> {
    let p = s.nrows();
    // diagonal is unpenalized: W_jj = S_jj throughout
    for j in 0..p {
        w[(j, j)] = s[(j, j)];
    }
    let mut gap = f64::INFINITY;
    let mut kkt = f64::INFINITY;
    let mut sweeps = 0;
    let mut v = vec![0.0; (p - 1) * (p - 1)];
    let mut rhs = vec![0.0; p - 1];
    let mut beta = vec![0.0; p - 1];
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        for j in 0..p {
            // gather the minor system for column j
            let mut r = 0;
            for i in 0..p {
                if i == j {
                    continue;
                }
                rhs[r] = s[(i, j)];
                beta[r] = betas[(i, j)];
                let mut c = 0;
                for l in 0..p {
                    if l == j {
                        continue;
                    }
                    v[r * (p - 1) + c] = w[(i, l)];
                    c += 1;
                }
                r += 1;
            }
            lasso_cd(&v, &rhs, lambda, &mut beta, p - 1);
            let mut r = 0;
            for i in 0..p {
                if i == j {
                    continue;
                }
                betas[(i, j)] = beta[r];
                r += 1;
            }
            // scatter back: w_col_j = V beta
            for i in 0..p {
                if i == j {
                    continue;
                }
                let mut dot = 0.0;
                for l in 0..p {
                    if l != j {
                        dot += w[(i, l)] * betas[(l, j)];
                    }
                }
                w[(i, j)] = dot;
                w[(j, i)] = dot;
            }
        }
        let theta = recover_precision(w, betas, s);
        if let Some(theta) = theta {
            gap = duality_gap(s, &theta, lambda);
            kkt = kkt_violation(s, &theta, lambda).unwrap_or(f64::INFINITY);
            if gap.abs() <= GAP_TOL && kkt <= GAP_TOL {
                return Ok(theta);
            }
        }
    }
    Err(FitDiagnostics {
        lambda,
        gap,
        kkt,
        sweeps,
    })
}

/// Coordinate descent for `min 0.5 b'Vb - rhs'b + lambda |b|_1`.
fn lasso_cd(v: &[f64], rhs: &[f64], lambda: f64, beta: &mut [f64], m: usize) {
    if m == 0 {
        return;
    }
    for _ in 0..MAX_INNER {
        let mut max_delta: f64 = 0.0;
        for k in 0..m {
            let mut resid = rhs[k];
            for l in 0..m {
                if l != k {
                    resid -= v[k * m + l] * beta[l];
                }
            }
            let new = soft_threshold(resid, lambda) / v[k * m + k];
            let delta = (new - beta[k]).abs();
            if delta > max_delta {
                max_delta = delta;
            }
            beta[k] = new;
        }
        if max_delta < 1e-10 {
            break;
        }
    }
}

#[inline]
fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Recover the precision matrix from the working covariance and the column
/// coefficients, then symmetrize.
fn recover_precision(w: &Array2<f64>, betas: &Array2<f64>, s: &Array2<f64>) -> Option<Array2<f64>> {
    let p = s.nrows();
    let mut theta = Array2::<f64>::zeros((p, p));
    for j in 0..p {
        let mut denom = w[(j, j)];
        for i in 0..p {
            if i != j {
                denom -= w[(i, j)] * betas[(i, j)];
            }
        }
        if denom <= 0.0 || !denom.is_finite() {
            return None;
        }
        let tjj = 1.0 / denom;
        theta[(j, j)] = tjj;
        for i in 0..p {
            if i != j {
                theta[(i, j)] = -betas[(i, j)] * tjj;
            }
        }
    }
    // symmetrize; exact zeros survive only if both sides are zero
    for i in 0..p {
        for j in (i + 1)..p {
            let m = 0.5 * (theta[(i, j)] + theta[(j, i)]);
            theta[(i, j)] = m;
            theta[(j, i)] = m;
        }
    }
    Some(theta)
}

fn duality_gap(s: &Array2<f64>, theta: &Array2<f64>, lambda: f64) -> f64 {
    let p = s.nrows();
    let mut tr = 0.0;
    let mut l1_off = 0.0;
    for i in 0..p {
        for j in 0..p {
            tr += s[(i, j)] * theta[(j, i)];
            if i != j {
                l1_off += theta[(i, j)].abs();
            }
        }
    }
    tr + lambda * l1_off - p as f64
}

fn kkt_violation(s: &Array2<f64>, theta: &Array2<f64>, lambda: f64) -> Option<f64> {
    let w = invert_pd(theta)?;
    let p = s.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            if i != j {
                worst = worst.max((s[(i, j)] - w[(i, j)]).abs() - lambda);
            }
        }
    }
    Some(worst)
}

fn count_edges(theta: &Array2<f64>) -> usize {
    let p = theta.nrows();
    let mut e = 0;
    for i in 0..p {
        for j in (i + 1)..p {
            if theta[(i, j)].abs() > ZERO_EPS {
                e += 1;
            }
        }
    }
    e
}

fn ebic_score(
    s: &Array2<f64>,
    theta: &Array2<f64>,
    n: usize,
    gamma: f64,
    n_edges: usize,
) -> Result<f64> {
    let p = s.nrows();
    let logdet = pd_logdet(theta).ok_or_else(|| {
        Error::SingularCovariance("precision matrix not positive definite".into())
    })?;
    let mut tr = 0.0;
    for i in 0..p {
        for j in 0..p {
            tr += s[(i, j)] * theta[(j, i)];
        }
    }
    let loglik = 0.5 * n as f64 * (logdet - tr);
    Ok(-2.0 * loglik
        + n_edges as f64 * (n as f64).ln()
        + 4.0 * n_edges as f64 * gamma * (p as f64).ln())
}

fn pd_logdet(a: &Array2<f64>) -> Option<f64> {
    let p = a.nrows();
    let mut l = a.clone();
    let mut logdet = 0.0;
    for j in 0..p {
        for i in j..p {
            let mut s = l[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                let d = s.sqrt();
                l[(j, j)] = d;
                logdet += 2.0 * d.ln();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Some(logdet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::CorrelationMethod;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn estimate(matrix: Array2<f64>) -> CorrelationEstimate {
        CorrelationEstimate {
            matrix,
            method: CorrelationMethod::Nonparanormal,
        }
    }

    /// Random factor-structure correlation matrix (always PD).
    fn random_corr(p: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let loadings: Vec<(f64, f64)> = (0..p)
            .map(|_| (rng.gen_range(-0.75..0.75), rng.gen_range(-0.5..0.5)))
            .collect();
        let mut m = Array2::<f64>::eye(p);
        for i in 0..p {
            for j in (i + 1)..p {
                let raw = loadings[i].0 * loadings[j].0 + loadings[i].1 * loadings[j].1;
                m[(i, j)] = raw;
                m[(j, i)] = raw;
            }
        }
        m
    }

    #[test]
    fn identity_input_gives_empty_network() {
        let c = estimate(Array2::eye(8));
        let grid = default_lambda_grid(&c, 10, 0.01);
        let net = ebic_glasso(&c, 500, 0.5, &grid).unwrap();
        assert_eq!(net.n_edges(), 0);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(net.partial_corr[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn lambda_above_max_shrinks_everything() {
        let m = random_corr(7, 3);
        let mut lambda_max: f64 = 0.0;
        for i in 0..7 {
            for j in (i + 1)..7 {
                lambda_max = lambda_max.max(m[(i, j)].abs());
            }
        }
        let net = ebic_glasso(&estimate(m), 300, 0.5, &[lambda_max * 1.01]).unwrap();
        assert_eq!(net.n_edges(), 0);
    }

    #[test]
    fn chain_conditional_independence_recovered() {
        // rho12 = rho23 = 0.5, rho13 = 0.25: precision entry (1,3) is exactly 0
        let m = ndarray::array![[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]];
        let net = ebic_glasso(&estimate(m), 1000, 0.5, &[0.001]).unwrap();
        assert!(net.partial_corr[(0, 2)].abs() <= 0.02, "pc13 = {}", net.partial_corr[(0, 2)]);
        // analytic partial correlation 1-2 is 0.4472
        assert_abs_diff_eq!(net.partial_corr[(0, 1)], 0.447, epsilon = 0.05);
    }

    #[test]
    fn kkt_residual_within_tolerance_on_random_problems() {
        for seed in 0..10 {
            let p = 5 + (seed as usize % 6);
            let c = estimate(random_corr(p, 100 + seed));
            let grid = default_lambda_grid(&c, 20, 0.05);
            let net = ebic_glasso(&c, 400, 0.5, &grid).unwrap();
            let viol = net.max_kkt_violation(&c).unwrap();
            assert!(viol <= 1e-6, "seed {seed}: violation {viol}");
        }
    }

    #[test]
    fn output_is_symmetric_with_symmetric_zeros() {
        let c = estimate(random_corr(9, 7));
        let grid = default_lambda_grid(&c, 30, 0.02);
        let net = ebic_glasso(&c, 250, 0.5, &grid).unwrap();
        for i in 0..9 {
            assert_eq!(net.partial_corr[(i, i)], 0.0);
            for j in 0..9 {
                assert_eq!(net.partial_corr[(i, j)], net.partial_corr[(j, i)]);
                assert!(net.partial_corr[(i, j)].abs() < 1.0);
                assert_eq!(
                    net.partial_corr[(i, j)] == 0.0,
                    net.precision[(i, j)].abs() <= ZERO_EPS || i == j
                );
            }
        }
    }

    #[test]
    fn edge_count_monotone_along_grid() {
        let c = estimate(random_corr(8, 11));
        let grid = default_lambda_grid(&c, 25, 0.02);
        let mut counts = Vec::new();
        for &l in &grid {
            let net = ebic_glasso(&c, 350, 0.5, &[l]).unwrap();
            counts.push(net.n_edges());
        }
        // grid is decreasing, so counts must be non-decreasing
        for w in counts.windows(2) {
            assert!(w[0] <= w[1], "counts {counts:?}");
        }
    }

    #[test]
    fn selection_is_reproducible() {
        let c = estimate(random_corr(10, 13));
        let grid = default_lambda_grid(&c, 40, 0.01);
        let a = ebic_glasso(&c, 200, 0.5, &grid).unwrap();
        let b = ebic_glasso(&c, 200, 0.5, &grid).unwrap();
        assert_eq!(a.lambda_selected, b.lambda_selected);
        assert_eq!(a.partial_corr, b.partial_corr);
    }

    #[test]
    fn grid_must_be_strictly_decreasing() {
        let c = estimate(random_corr(4, 1));
        assert!(matches!(
            ebic_glasso(&c, 100, 0.5, &[0.1, 0.1]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ebic_glasso(&c, 100, 0.5, &[0.1, 0.2]),
            Err(Error::Config(_))
        ));
    }
}
