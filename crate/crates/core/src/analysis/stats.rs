//! Running and sample statistics.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;


use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n − 1 denominator), two-pass.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

/// Unbiased standard deviation of the first k samples, for k = 2..=n.
///
/// Element `i` of the output corresponds to `i + 2` samples.
pub fn cumulative_std(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::NotEnoughData { needed: 2, got: samples.len() });
    }
    // Welford
    let mut out = Vec::with_capacity(samples.len() - 1);
    let mut m = samples[0];
    let mut m2 = 0.0;
    for (k, &x) in samples.iter().enumerate().skip(1) {
        let n = (k + 1) as f64;
        let d = x - m;
        m += d / n;
        m2 += d * (x - m);
        out.push((m2.max(0.0) / (n - 1.0)).sqrt());
    }
    Ok(out)
}

/// Linear-interpolated quantile of a sorted slice, q ∈ [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let f = pos - lo as f64;
    sorted[lo] * (1.0 - f) + sorted[hi] * f
}
