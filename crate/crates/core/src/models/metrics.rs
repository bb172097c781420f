//! Evaluation metrics: tie-corrected AUC, accuracy, log loss, Spearman.

use crate::error::{Error, Result};

/// Probability clip applied inside the log loss.
pub const PROB_CLIP: f64 = 1e-15;

/// Average ranks (1-based), ties sharing the mean rank of their run.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j are one tie run; mean of 1-based ranks.
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// ROC AUC via the Mann-Whitney rank statistic with average ranks for ties.
pub fn auc(scores: &[f64], labels: &[i64]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::usage(format!(
            "auc: {} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::usage("auc: both classes must be present"));
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &y)| y == 1)
        .map(|(r, _)| r)
        .sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Accuracy at the threshold and mean cross-entropy with probabilities
/// clipped to [1e-15, 1 - 1e-15].
pub fn accuracy_and_log_loss(scores: &[f64], labels: &[i64], threshold: f64) -> (f64, f64) {
    let n = scores.len() as f64;
    let mut correct = 0usize;
    let mut loss = 0.0f64;
    for (&s, &y) in scores.iter().zip(labels) {
        let predicted = (s >= threshold) as i64;
        correct += (predicted == y) as usize;
        let p = s.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
        loss -= if y == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    (correct as f64 / n, loss / n)
}

/// Spearman rank correlation: Pearson correlation of the average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::usage("spearman: inputs must be equal-length and non-empty"));
    }
    pearson(&average_ranks(a), &average_ranks(b))
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::usage("correlation undefined for a constant input"));
    }
    Ok(cov / (vx * vy).sqrt())
}
