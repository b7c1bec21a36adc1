//! Gaussian-copula entropy estimation and O-information for arbitrary
//! multiplets.
//!
//! The estimator is rank-based: each column is mapped through average ranks
//! (or seeded random tie-breaking) to `r/(n+1)`, then through the standard
//! normal quantile. Interaction weights are computed in nats from the
//! closed-form Gaussian entropy of the sample correlation matrix of the
//! transformed columns. The effect-size floor used downstream is defined in
//! nats, so the natural log is fixed throughout.

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;

use crate::data::{Multiplet, ResponseMatrix};
use crate::error::{Error, Result};
use crate::seed::SeedDeriver;
use crate::stats::norm_quantile;

/// ln(2*pi*e)
pub(crate) const LN_2PI_E: f64 = 2.837_877_066_409_345;

/// Ridge added to the diagonal before any determinant evaluation. If the
/// matrix is still not positive definite the operation fails rather than
/// shrinking further.
pub(crate) const PD_RIDGE: f64 = 1e-10;

/// Normal-quantile transformed ranks, one column per item.
///
/// Columns are centered (zero sample mean); the rank map `r/(n+1)` keeps all
/// quantiles finite.
#[derive(Debug, Clone)]
pub struct CopulaScores {
    scores: Array2<f64>,
    item_ids: Vec<String>,
    layer_id: String,
}

impl CopulaScores {
    pub fn scores(&self) -> &Array2<f64> {
        &self.scores
    }

    pub fn n_respondents(&self) -> usize {
        self.scores.nrows()
    }

    pub fn n_items(&self) -> usize {
        self.scores.ncols()
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn layer_id(&self) -> &str {
        &self.layer_id
    }

    /// Contiguous copy of one column.
    pub fn column_vec(&self, item: usize) -> Vec<f64> {
        self.scores.column(item).to_vec()
    }
}

/// Rank-transform an ordinal response matrix into copula scores.
///
/// Ties get average ranks by default; passing a jitter seed switches to
/// seeded random tie-breaking for sensitivity analysis. A constant column is
/// unusable and fails with a degenerate-variable error.
pub fn copula_transform(
    data: &ResponseMatrix,
    tie_jitter_seed: Option<u64>,
) -> Result<CopulaScores> {
    let float_cols: Vec<Vec<f64>> = (0..data.n_items())
        .map(|j| data.column(j).iter().map(|&v| v as f64).collect())
        .collect();
    copula_transform_continuous(
        &float_cols,
        data.item_ids().to_vec(),
        data.layer_id(),
        tie_jitter_seed,
    )
}

/// Rank-transform arbitrary continuous columns (used for synthetic Gaussian
/// data, which skips the Likert encoding entirely).
pub fn copula_transform_continuous(
    columns: &[Vec<f64>],
    item_ids: Vec<String>,
    layer_id: &str,
    tie_jitter_seed: Option<u64>,
) -> Result<CopulaScores> {
    let n_items = columns.len();
    if n_items == 0 {
        return Err(Error::Data("copula transform: no columns".into()));
    }
    let n = columns[0].len();
    if n < 3 {
        return Err(Error::Data(format!(
            "copula transform: need at least 3 respondents, got {n}"
        )));
    }
    let deriver = tie_jitter_seed.map(SeedDeriver::new);
    let mut scores = Array2::<f64>::zeros((n, n_items));
    for (j, col) in columns.iter().enumerate() {
        let item = item_ids.get(j).map(String::as_str).unwrap_or("?");
        if col.len() != n {
            return Err(Error::Data(format!(
                "copula transform: ragged column {item:?}"
            )));
        }
        let first = col[0];
        if col.iter().all(|&v| v == first) {
            return Err(Error::DegenerateVariable(format!(
                "item {item:?} in layer {layer_id:?} is constant"
            )));
        }
        let ranks = match &deriver {
            None => average_ranks(col),
            Some(d) => {
                let mut rng = d.rng(&["tie-jitter", layer_id, &j.to_string()]);
                random_tiebreak_ranks(col, &mut rng)
            }
        };
        let mut mean = 0.0;
        for (r, &rank) in ranks.iter().enumerate() {
            let z = norm_quantile(rank / (n as f64 + 1.0));
            scores[(r, j)] = z;
            mean += z;
        }
        mean /= n as f64;
        for r in 0..n {
            scores[(r, j)] -= mean;
        }
    }
    Ok(CopulaScores {
        scores,
        item_ids,
        layer_id: layer_id.to_string(),
    })
}

/// Average ranks (1-based), ties shared.
pub(crate) fn average_ranks(col: &[f64]) -> Vec<f64> {
    let n = col.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && col[order[j + 1]] == col[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Distinct ranks with ties broken uniformly at random.
fn random_tiebreak_ranks(col: &[f64], rng: &mut impl rand::Rng) -> Vec<f64> {
    let n = col.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("finite values"));
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && col[order[j + 1]] == col[order[i]] {
            j += 1;
        }
        order[i..=j].shuffle(rng);
        i = j + 1;
    }
    let mut ranks = vec![0.0; n];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = (pos + 1) as f64;
    }
    ranks
}

/// Differential entropy (nats) of a Gaussian with the given correlation
/// matrix: `0.5 * ln((2*pi*e)^k * det)`.
pub fn gaussian_entropy(cov: ArrayView2<'_, f64>) -> Result<f64> {
    let k = cov.nrows();
    if k == 0 || cov.ncols() != k {
        return Err(Error::Structural(format!(
            "gaussian entropy: expected square matrix, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    for i in 0..k {
        if (cov[(i, i)] - 1.0).abs() > 1e-8 {
            return Err(Error::Structural(format!(
                "gaussian entropy: diagonal entry {} is {}, expected 1",
                i,
                cov[(i, i)]
            )));
        }
        for j in 0..i {
            if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-8 {
                return Err(Error::Structural(
                    "gaussian entropy: matrix not symmetric".into(),
                ));
            }
        }
    }
    let mut flat: Vec<f64> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            flat.push(cov[(i, j)]);
        }
    }
    let logdet = logdet_pd(&mut flat, k).ok_or_else(|| {
        Error::SingularCovariance(format!(
            "gaussian entropy: {k}x{k} matrix not positive definite after ridge"
        ))
    })?;
    Ok(0.5 * (k as f64 * LN_2PI_E + logdet))
}

/// In-place Cholesky log-determinant of a row-major symmetric matrix, with
/// the standard ridge applied first. `None` when not positive definite.
pub(crate) fn logdet_pd(a: &mut [f64], k: usize) -> Option<f64> {
    for i in 0..k {
        a[i * k + i] += PD_RIDGE;
    }
    let mut logdet = 0.0;
    for j in 0..k {
        for i in j..k {
            let mut sum = a[i * k + j];
            for l in 0..j {
                sum -= a[i * k + l] * a[j * k + l];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                let d = sum.sqrt();
                a[j * k + j] = d;
                logdet += 2.0 * d.ln();
            } else {
                a[i * k + j] = sum / a[j * k + j];
            }
        }
    }
    Some(logdet)
}

/// O-information estimate for one multiplet, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaEstimate {
    pub omega: f64,
    pub order: usize,
}

/// O-information of the selected score columns.
///
/// Computed as `(n-2) H(X) + sum_i [H(X_i) - H(X_{-i})]` with every entropy
/// evaluated in closed form on the sample correlation matrix. Positive
/// values mark redundancy-dominated dependence, negative values synergy.
pub fn o_information(scores: &CopulaScores, multiplet: &Multiplet) -> Result<OmegaEstimate> {
    let k = multiplet.order();
    if let Some(&max) = multiplet.items().last() {
        if max >= scores.n_items() {
            return Err(Error::Structural(format!(
                "multiplet {multiplet} out of range for {} items",
                scores.n_items()
            )));
        }
    }
    let corr = multiplet_correlation(scores, multiplet)?;
    let full = Array2::from_shape_vec((k, k), corr.clone()).expect("square");
    let joint = gaussian_entropy(full.view())?;
    let single = 0.5 * LN_2PI_E;
    let mut omega = (k as f64 - 2.0) * joint;
    for drop in 0..k {
        let minus = principal_minor(&corr, k, drop);
        let view = Array2::from_shape_vec((k - 1, k - 1), minus).expect("square");
        omega += single - gaussian_entropy(view.view())?;
    }
    if !omega.is_finite() {
        return Err(Error::Estimation(format!(
            "omega for {multiplet} is not finite"
        )));
    }
    Ok(OmegaEstimate { omega, order: k })
}

/// O-information from a flat row-major correlation matrix, with the
/// `(2*pi*e)` constants cancelled algebraically:
/// `0.5 * [(k-2) ln det S - sum_i ln det S_{-i}]`.
///
/// This is the kernel used by the permutation and bootstrap loops; tests
/// verify it agrees with [`o_information`] to 1e-10.
pub fn omega_from_correlation(corr: &[f64], k: usize) -> Result<f64> {
    debug_assert_eq!(corr.len(), k * k);
    if k < 3 {
        return Err(Error::Structural(format!(
            "omega needs order >= 3, got {k}"
        )));
    }
    let mut buf = corr.to_vec();
    let logdet_full = logdet_pd(&mut buf, k).ok_or_else(|| {
        Error::SingularCovariance("omega kernel: correlation matrix not positive definite".into())
    })?;
    let mut omega = (k as f64 - 2.0) * logdet_full;
    let mut minor = vec![0.0; (k - 1) * (k - 1)];
    for drop in 0..k {
        let mut r = 0;
        for i in 0..k {
            if i == drop {
                continue;
            }
            let mut c = 0;
            for j in 0..k {
                if j == drop {
                    continue;
                }
                minor[r * (k - 1) + c] = corr[i * k + j];
                c += 1;
            }
            r += 1;
        }
        let logdet_minor = logdet_pd(&mut minor, k - 1).ok_or_else(|| {
            Error::SingularCovariance("omega kernel: sub-matrix not positive definite".into())
        })?;
        omega -= logdet_minor;
        // minor buffer is overwritten by the Cholesky; refill next iteration
    }
    Ok(0.5 * omega)
}

fn principal_minor(corr: &[f64], k: usize, drop: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity((k - 1) * (k - 1));
    for i in 0..k {
        if i == drop {
            continue;
        }
        for j in 0..k {
            if j == drop {
                continue;
            }
            out.push(corr[i * k + j]);
        }
    }
    out
}

/// Sample correlation matrix (flat row-major) of the selected columns.
pub fn multiplet_correlation(scores: &CopulaScores, multiplet: &Multiplet) -> Result<Vec<f64>> {
    let k = multiplet.order();
    let n = scores.n_respondents() as f64;
    let m = scores.scores();
    let items = multiplet.items();
    // columns are centered, so covariance reduces to a Gram matrix
    let mut gram = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let mut dot = 0.0;
            let ca = m.column(items[a]);
            let cb = m.column(items[b]);
            for (x, y) in ca.iter().zip(cb.iter()) {
                dot += x * y;
            }
            gram[a * k + b] = dot / n;
            gram[b * k + a] = dot / n;
        }
    }
    gram_to_correlation(&mut gram, k, || format!("multiplet {multiplet}"))?;
    Ok(gram)
}

/// Normalize a covariance Gram matrix to a correlation matrix in place.
pub(crate) fn gram_to_correlation(
    gram: &mut [f64],
    k: usize,
    context: impl Fn() -> String,
) -> Result<()> {
    let mut sd = vec![0.0; k];
    for (i, s) in sd.iter_mut().enumerate() {
        let v = gram[i * k + i];
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::DegenerateVariable(format!(
                "{}: zero-variance column",
                context()
            )));
        }
        *s = v.sqrt();
    }
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = if i == j {
                1.0
            } else {
                (gram[i * k + j] / (sd[i] * sd[j])).clamp(-1.0, 1.0)
            };
        }
    }
    Ok(())
}

/// Streaming first/second moments over rows of a k-column selection.
/// Supports exact leave-one-out downdates, which keeps the bootstrap
/// jackknife linear in the number of rows.
#[derive(Debug, Clone)]
pub(crate) struct MomentAccumulator {
    pub k: usize,
    pub n: usize,
    pub sum: Vec<f64>,
    pub cross: Vec<f64>, // upper triangle incl. diagonal, row-major packed full
}

impl MomentAccumulator {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            n: 0,
            sum: vec![0.0; k],
            cross: vec![0.0; k * k],
        }
    }

    #[inline]
    pub fn add_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.k);
        self.n += 1;
        for i in 0..self.k {
            self.sum[i] += row[i];
            for j in i..self.k {
                self.cross[i * self.k + j] += row[i] * row[j];
            }
        }
    }

    #[inline]
    pub fn remove_row(&mut self, row: &[f64]) {
        debug_assert!(self.n > 0);
        self.n -= 1;
        for i in 0..self.k {
            self.sum[i] -= row[i];
            for j in i..self.k {
                self.cross[i * self.k + j] -= row[i] * row[j];
            }
        }
    }

    /// Correlation matrix of the accumulated rows (flat row-major).
    pub fn correlation(&self) -> Result<Vec<f64>> {
        if self.n < 3 {
            return Err(Error::Data(format!(
                "correlation needs >= 3 rows, have {}",
                self.n
            )));
        }
        let k = self.k;
        let n = self.n as f64;
        let mut cov = vec![0.0; k * k];
        for i in 0..k {
            let mi = self.sum[i] / n;
            for j in i..k {
                let mj = self.sum[j] / n;
                let c = self.cross[i * k + j] / n - mi * mj;
                cov[i * k + j] = c;
                cov[j * k + i] = c;
            }
        }
        gram_to_correlation(&mut cov, k, || "moment accumulator".to_string())?;
        Ok(cov)
    }
}
