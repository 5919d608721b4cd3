//! Discrete power-law tail fitting.
//!
//! Maximum-likelihood exponent with the continuous half-step correction,
//! with the tail cutoff chosen by scanning candidate cutoffs for the one
//! minimizing the Kolmogorov-Smirnov distance between the empirical and
//! fitted tails.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::Serialize;

/// Minimum tail size before an estimate is considered well supported.
pub const MIN_TAIL_SAMPLES: usize = 50;

/// Fitted power-law tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit<F> {
    pub alpha: F,
    pub xmin: u64,
    pub ks_distance: F,
    pub n_tail: usize,
    /// True when the selected tail has fewer than [`MIN_TAIL_SAMPLES`]
    /// samples.
    pub low_support: bool,
}

/// Fit `alpha` and `xmin` to the positive values in `degrees`.
///
/// For each candidate cutoff, `alpha = 1 + n_tail / sum(ln(x / (xmin - 0.5)))`
/// over the tail, and the KS distance compares the empirical tail survival
/// function against `((x - 0.5) / (xmin - 0.5))^(1 - alpha)`. Candidates
/// with fewer than [`MIN_TAIL_SAMPLES`] tail samples are only considered
/// when no larger tail exists, and the result is then flagged.
pub fn fit_power_law<F: Scalar>(degrees: &[u64]) -> Result<PowerLawFit<F>> {
    let mut xs: Vec<u64> = degrees.iter().copied().filter(|&d| d > 0).collect();
    if xs.is_empty() {
        return Err(Error::degenerate("no positive values to fit"));
    }
    xs.sort_unstable();
    let n = xs.len();

    // Distinct values with their first index in the sorted array.
    let mut distinct: Vec<(u64, usize)> = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        if distinct.last().map(|&(v, _)| v) != Some(x) {
            distinct.push((x, i));
        }
    }
    if distinct.len() < 2 {
        return Err(Error::degenerate(
            "all values equal; the tail cannot constrain an exponent",
        ));
    }

    // Suffix sums of ln(x) for O(1) tail log-sums per candidate.
    let mut suffix_ln = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + (xs[i] as f64).ln();
    }

    let evaluate = |cand: usize| -> (f64, f64, usize) {
        let (xmin, start) = distinct[cand];
        let n_tail = n - start;
        let shift = xmin as f64 - 0.5;
        let log_sum = suffix_ln[start] - n_tail as f64 * shift.ln();
        let alpha = 1.0 + n_tail as f64 / log_sum;
        let mut ks = 0.0f64;
        for &(x, idx) in &distinct[cand..] {
            let emp = (n - idx) as f64 / n_tail as f64;
            let fit = ((x as f64 - 0.5) / shift).powf(1.0 - alpha);
            let gap = (emp - fit).abs();
            if gap > ks {
                ks = gap;
            }
        }
        (alpha, ks, n_tail)
    };

    // The largest distinct value leaves a single-valued tail; skip it.
    let candidates: Vec<usize> = (0..distinct.len() - 1).collect();
    let supported: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&c| n - distinct[c].1 >= MIN_TAIL_SAMPLES)
        .collect();
    let scan = if supported.is_empty() { &candidates } else { &supported };

    let mut best: Option<(usize, f64, f64, usize)> = None;
    for &cand in scan {
        let (alpha, ks, n_tail) = evaluate(cand);
        if !alpha.is_finite() || !ks.is_finite() {
            continue;
        }
        // Strict less-than keeps the smallest cutoff on ties.
        if best.is_none_or(|(_, _, best_ks, _)| ks < best_ks) {
            best = Some((cand, alpha, ks, n_tail));
        }
    }
    let (cand, alpha, ks, n_tail) =
        best.ok_or_else(|| Error::degenerate("no finite power-law candidate"))?;

    Ok(PowerLawFit {
        alpha: F::from_f64(alpha).unwrap(),
        xmin: distinct[cand].0,
        ks_distance: F::from_f64(ks).unwrap(),
        n_tail,
        low_support: n_tail < MIN_TAIL_SAMPLES,
    })
}
