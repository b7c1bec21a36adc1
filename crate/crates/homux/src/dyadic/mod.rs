//! Sparse signed partial-correlation networks from ordinal data.
//!
//! Two correlation models accommodate the distributional quirks of Likert
//! items -- nonparanormal (rank-based normal scores) and polychoric (latent
//! bivariate-normal thresholds) -- and both feed an EBIC-selected graphical
//! lasso that yields the sparse dyadic network used for candidate seeding.

mod glasso;
mod polychoric;

pub use glasso::{default_lambda_grid, ebic_glasso};
pub use polychoric::polychoric_corr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::ResponseMatrix;
use crate::error::{Error, Result};
use crate::info::average_ranks;
use crate::stats::norm_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    Nonparanormal,
    Polychoric,
}

impl std::fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrelationMethod::Nonparanormal => write!(f, "nonparanormal"),
            CorrelationMethod::Polychoric => write!(f, "polychoric"),
        }
    }
}

impl std::str::FromStr for CorrelationMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonparanormal" => Ok(CorrelationMethod::Nonparanormal),
            "polychoric" => Ok(CorrelationMethod::Polychoric),
            other => Err(Error::Config(format!(
                "unknown correlation method {other:?}"
            ))),
        }
    }
}

/// N x N symmetric correlation matrix with the method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    pub matrix: Array2<f64>,
    pub method: CorrelationMethod,
}

impl CorrelationEstimate {
    pub fn n_items(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Rank handling for the nonparanormal estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonparanormalVariant {
    /// Plain normal-scores correlation on `r/(n+1)`.
    #[default]
    Plain,
    /// Winsorized ranks: quantile arguments truncated to
    /// `[delta_n, 1 - delta_n]` with `delta_n = 1/(4 n^(1/4) sqrt(pi ln n))`.
    Winsorized,
}

/// Nonparanormal correlation: Pearson correlation of normal-scores
/// transformed columns (plain variant).
pub fn nonparanormal_corr(data: &ResponseMatrix) -> Result<CorrelationEstimate> {
    nonparanormal_corr_with(data, NonparanormalVariant::Plain)
}

pub fn nonparanormal_corr_with(
    data: &ResponseMatrix,
    variant: NonparanormalVariant,
) -> Result<CorrelationEstimate> {
    let n = data.n_respondents();
    if n < 3 {
        return Err(Error::Data(format!(
            "nonparanormal correlation needs >= 3 respondents, got {n}"
        )));
    }
    let p = data.n_items();
    let delta = match variant {
        NonparanormalVariant::Plain => 0.0,
        NonparanormalVariant::Winsorized => {
            1.0 / (4.0 * (n as f64).powf(0.25) * (std::f64::consts::PI * (n as f64).ln()).sqrt())
        }
    };
    // normal scores, centered per column
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for j in 0..p {
        let raw: Vec<f64> = data.column(j).iter().map(|&v| v as f64).collect();
        let first = raw[0];
        if raw.iter().all(|&v| v == first) {
            return Err(Error::DegenerateVariable(format!(
                "item {:?} in layer {:?} is constant",
                data.item_ids()[j],
                data.layer_id()
            )));
        }
        let ranks = average_ranks(&raw);
        let mut z: Vec<f64> = ranks
            .iter()
            .map(|&r| {
                let u = (r / (n as f64 + 1.0)).clamp(delta.max(f64::MIN_POSITIVE), 1.0 - delta);
                norm_quantile(u)
            })
            .collect();
        let mean = z.iter().sum::<f64>() / n as f64;
        z.iter_mut().for_each(|v| *v -= mean);
        cols.push(z);
    }
    let mut matrix = Array2::<f64>::zeros((p, p));
    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    for i in 0..p {
        matrix[(i, i)] = 1.0;
        for j in (i + 1)..p {
            let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            matrix[(i, j)] = r;
            matrix[(j, i)] = r;
        }
    }
    Ok(CorrelationEstimate {
        matrix,
        method: CorrelationMethod::Nonparanormal,
    })
}

/// Sparse partial-correlation network selected by EBIC over a lambda grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicNetwork {
    /// Partial correlations `-theta_ij / sqrt(theta_ii * theta_jj)`,
    /// zero diagonal, exact zeros where the precision entry was shrunk away.
    pub partial_corr: Array2<f64>,
    /// Selected precision matrix (symmetrized).
    pub precision: Array2<f64>,
    pub lambda_selected: f64,
    pub ebic_gamma: f64,
}

impl DyadicNetwork {
    pub fn n_items(&self) -> usize {
        self.partial_corr.nrows()
    }

    /// Upper-triangle nonzero edges `(i, j, partial_corr)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let p = self.n_items();
        let mut out = Vec::new();
        for i in 0..p {
            for j in (i + 1)..p {
                let w = self.partial_corr[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    /// Adjacency lists of the unweighted skeleton (nonzero edges).
    pub fn skeleton(&self, positive_only: bool) -> Vec<Vec<usize>> {
        let p = self.n_items();
        let mut adj = vec![Vec::new(); p];
        for (i, j, w) in self.edges() {
            if positive_only && w <= 0.0 {
                continue;
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Number of connected components of the skeleton (isolated nodes count).
    pub fn n_components(&self) -> usize {
        let adj = self.skeleton(false);
        let p = adj.len();
        let mut seen = vec![false; p];
        let mut components = 0;
        for start in 0..p {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        components
    }

    /// Largest off-diagonal KKT violation `max |S - Theta^{-1}|_ij - lambda`
    /// at the selected lambda. Non-positive (up to numerical tolerance) for
    /// a converged solution.
    pub fn max_kkt_violation(&self, corr: &CorrelationEstimate) -> Result<f64> {
        let w = invert_pd(&self.precision).ok_or_else(|| {
            Error::SingularCovariance("selected precision matrix is not positive definite".into())
        })?;
        let p = self.n_items();
        let mut worst: f64 = f64::NEG_INFINITY;
        for i in 0..p {
            for j in 0..p {
                if i == j {
                    continue;
                }
                worst = worst.max((corr.matrix[(i, j)] - w[(i, j)]).abs());
            }
        }
        Ok(worst - self.lambda_selected)
    }
}

/// Dense inverse of a symmetric positive-definite matrix via Cholesky.
pub(crate) fn invert_pd(a: &Array2<f64>) -> Option<Array2<f64>> {
    let p = a.nrows();
    let mut l = a.clone();
    // in-place lower Cholesky
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
                l[(j, j)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    // solve L (L^T X) = I column by column
    let mut inv = Array2::<f64>::zeros((p, p));
    for col in 0..p {
        let mut y = vec![0.0; p];
        for i in 0..p {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..p).rev() {
            let mut s = y[i];
            for k in (i + 1)..p {
                s -= l[(k, i)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    Some(inv)
}
