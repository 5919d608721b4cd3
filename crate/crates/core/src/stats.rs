//! Distribution comparison and summary statistics.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::Serialize;

/// Two-sample Kolmogorov-Smirnov test result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult<F> {
    pub d_statistic: F,
    pub p_value: F,
    pub n1: usize,
    pub n2: usize,
}

/// Two-sample KS test.
///
/// The statistic is the supremum gap between the two empirical CDFs,
/// evaluated at every distinct pooled sample value with ties advanced on
/// both sides before the gap is taken. The p-value uses the asymptotic
/// Kolmogorov series with the Numerical-Recipes-style effective-size
/// correction.
pub fn ks_two_sample<F: Scalar>(a: &[F], b: &[F]) -> Result<KsResult<F>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::validation("KS test requires non-empty samples"));
    }
    let mut xs: Vec<F> = a.to_vec();
    let mut ys: Vec<F> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("samples must not contain NaN"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("samples must not contain NaN"));

    let n1 = xs.len();
    let n2 = ys.len();
    let fn1 = F::from_count(n1);
    let fn2 = F::from_count(n2);

    let mut i = 0;
    let mut j = 0;
    let mut d = F::zero();
    // The loop exits once a sample is exhausted; its final iteration already
    // compared the gap against that sample's CDF at 1, and later values of
    // the other sample only shrink the gap.
    while i < n1 && j < n2 {
        let v = xs[i].min(ys[j]);
        while i < n1 && xs[i] == v {
            i += 1;
        }
        while j < n2 && ys[j] == v {
            j += 1;
        }
        let cdf_a = F::from_count(i) / fn1;
        let cdf_b = F::from_count(j) / fn2;
        let gap = (cdf_a - cdf_b).abs();
        if gap > d {
            d = gap;
        }
    }

    let p = ks_p_value(d, n1, n2);
    Ok(KsResult {
        d_statistic: d,
        p_value: p,
        n1,
        n2,
    })
}

/// Asymptotic two-sample KS p-value for statistic `d`.
pub fn ks_p_value<F: Scalar>(d: F, n1: usize, n2: usize) -> F {
    let ne = F::from_count(n1) * F::from_count(n2) / (F::from_count(n1) + F::from_count(n2));
    let sqrt_ne = ne.sqrt();
    let c12 = F::from_f64(0.12).unwrap();
    let c11 = F::from_f64(0.11).unwrap();
    let lambda = (sqrt_ne + c12 + c11 / sqrt_ne) * d;
    kolmogorov_survival(lambda)
}

/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), clamped to [0,1].
fn kolmogorov_survival<F: Scalar>(lambda: F) -> F {
    let tiny = F::from_f64(1e-9).unwrap();
    if lambda < tiny {
        return F::one();
    }
    let term_floor = F::from_f64(1e-12).unwrap();
    let two = F::from_f64(2.0).unwrap();
    let minus_two_l2 = -two * lambda * lambda;
    let mut sum = F::zero();
    let mut sign = F::one();
    for k in 1..=100usize {
        let k2 = F::from_count(k * k);
        let term = (minus_two_l2 * k2).exp();
        sum += sign * term;
        if term < term_floor {
            break;
        }
        sign = -sign;
    }
    (two * sum).max(F::zero()).min(F::one())
}

/// Mean/min/max/count of one group of values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupSummary<F> {
    pub count: usize,
    pub mean: Option<F>,
    pub min: Option<F>,
    pub max: Option<F>,
}

pub fn group_summary<F: Scalar>(values: &[F]) -> GroupSummary<F> {
    if values.is_empty() {
        return GroupSummary {
            count: 0,
            mean: None,
            min: None,
            max: None,
        };
    }
    let mut min = values[0];
    let mut max = values[0];
    let mut sum = F::zero();
    for &v in values {
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    GroupSummary {
        count: values.len(),
        mean: Some(sum / F::from_count(values.len())),
        min: Some(min),
        max: Some(max),
    }
}

/// Equal-width histogram in the linear or log10 domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram<F> {
    /// `bins + 1` edges in the data domain (never log-transformed).
    pub edges: Vec<F>,
    pub counts: Vec<u64>,
    pub log_x: bool,
}

pub fn histogram<F: Scalar>(values: &[F], bins: usize, log_x: bool) -> Result<Histogram<F>> {
    if values.is_empty() {
        return Ok(Histogram {
            edges: Vec::new(),
            counts: Vec::new(),
            log_x,
        });
    }
    let mut lo = values[0];
    let mut hi = values[0];
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        // Degenerate range: widen symmetrically so the single occupied bin
        // is well defined.
        let half = F::from_f64(0.5).unwrap();
        if log_x {
            let factor = half.exp();
            lo /= factor;
            hi *= factor;
        } else {
            lo -= half;
            hi += half;
        }
    }
    histogram_in_range(values, bins, lo, hi, log_x)
}

/// Histogram over an explicit `[lo, hi]` range. Values outside the range
/// are clamped into the boundary bins; the last bin is right-inclusive.
pub fn histogram_in_range<F: Scalar>(
    values: &[F],
    bins: usize,
    lo: F,
    hi: F,
    log_x: bool,
) -> Result<Histogram<F>> {
    if bins == 0 {
        return Err(Error::validation("histogram needs at least one bin"));
    }
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::validation("histogram range must satisfy lo < hi"));
    }
    if log_x {
        let offenders: Vec<String> = values
            .iter()
            .filter(|v| **v <= F::zero())
            .take(5)
            .map(|v| v.to_string())
            .collect();
        if !offenders.is_empty() {
            return Err(Error::validation(format!(
                "log-binned histogram requires strictly positive values, got {}",
                offenders.join(", ")
            )));
        }
        if lo <= F::zero() {
            return Err(Error::validation(
                "log-binned histogram requires a positive lower edge",
            ));
        }
    }

    let transform = |v: F| if log_x { v.log10() } else { v };
    let t_lo = transform(lo);
    let t_hi = transform(hi);
    let width = (t_hi - t_lo) / F::from_count(bins);

    let mut edges = Vec::with_capacity(bins + 1);
    for i in 0..=bins {
        let t = t_lo + width * F::from_count(i);
        let edge = if log_x {
            F::from_f64(10.0).unwrap().powf(t)
        } else {
            t
        };
        edges.push(edge);
    }
    // Pin the boundary edges to the exact inputs.
    edges[0] = lo;
    edges[bins] = hi;

    let mut counts = vec![0u64; bins];
    let max_bin = bins - 1;
    for &v in values {
        let t = transform(v);
        let idx = if width > F::zero() {
            ((t - t_lo) / width).floor()
        } else {
            F::zero()
        };
        let idx = idx.max(F::zero()).min(F::from_count(max_bin));
        counts[idx.to_usize().unwrap_or(max_bin).min(max_bin)] += 1;
    }
    Ok(Histogram {
        edges,
        counts,
        log_x,
    })
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson<F: Scalar>(x: &[F], y: &[F]) -> Option<F> {
    if x.len() != y.len() || x.is_empty() {
        return None;
    }
    let n = F::from_count(x.len());
    let mean_x = x.iter().copied().sum::<F>() / n;
    let mean_y = y.iter().copied().sum::<F>() / n;
    let mut cov = F::zero();
    let mut var_x = F::zero();
    let mut var_y = F::zero();
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == F::zero() || var_y == F::zero() {
        return None;
    }
    Some(cov / (var_x.sqrt() * var_y.sqrt()))
}
