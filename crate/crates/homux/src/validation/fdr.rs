//! Benjamini-Hochberg false discovery rate adjustment.

/// BH-adjusted p-values (step-up), in the input order.
///
/// Rejecting `p_adj <= alpha` reproduces exactly the textbook step-up rule:
/// find the largest i with `p_(i) <= i * alpha / m` and reject everything up
/// to it.
pub fn benjamini_hochberg_adjust(pvals: &[f64]) -> Vec<f64> {
    let m = pvals.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).expect("finite p-values"));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0_f64;
    for rank in (0..m).rev() {
        let idx = order[rank];
        let raw = pvals[idx] * m as f64 / (rank + 1) as f64;
        running = running.min(raw);
        adjusted[idx] = running.min(1.0);
    }
    adjusted
}
