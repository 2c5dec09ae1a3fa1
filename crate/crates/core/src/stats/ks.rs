use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::DegreeFrequencyTable;

/// How the KS p-value is obtained from `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KsPValue {
    /// Limiting Kolmogorov distribution at `λ = √n_e · D`.
    #[default]
    Asymptotic,
    /// Stephens' small-sample correction `λ = D(√n_e + 0.12 + 0.11/√n_e)`.
    Stephens,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d_statistic: f64,
    pub p_raw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_adjusted: Option<f64>,
    pub n1: usize,
    pub n2: usize,
}

const SERIES_CUTOFF: f64 = 1e-12;

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} exp(−2 j² λ²)`.
///
/// For small `λ` the alternating series converges too slowly to be summed
/// directly, so the equivalent theta-function form
/// `1 − (√(2π)/λ) Σ_{j≥1} exp(−(2j−1)² π² / (8 λ²))` is used below 1.18.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda.is_nan() || lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        let y = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for j in 1.. {
            let k = (2 * j - 1) as f64;
            let term = (k * k * y).exp();
            sum += term;
            if term < SERIES_CUTOFF {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for j in 1.. {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * lambda * lambda).exp();
            sum += sign * term;
            if term < SERIES_CUTOFF {
                break;
            }
            sign = -sign;
        }
        2.0 * sum
    };
    q.clamp(0.0, 1.0)
}

/// p-value for an observed `D` with sample sizes `n1`, `n2`.
pub fn ks_p_value(d: f64, n1: usize, n2: usize, method: KsPValue) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 as f64 + n2 as f64);
    let sq = ne.sqrt();
    let lambda = match method {
        KsPValue::Asymptotic => sq * d,
        KsPValue::Stephens => d * (sq + 0.12 + 0.11 / sq),
    };
    kolmogorov_survival(lambda)
}

/// Two-sample Kolmogorov–Smirnov test on degree tables. `D` is computed
/// exactly from the cumulative counts.
pub fn ks_two_sample(
    a: &DegreeFrequencyTable,
    b: &DegreeFrequencyTable,
    method: KsPValue,
) -> Result<KsResult> {
    let (n1, n2) = (a.total(), b.total());
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument(
            "KS test needs two non-empty samples".into(),
        ));
    }
    // max |ca/n1 − cb/n2| = max |ca·n2 − cb·n1| / (n1·n2), in integers
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (0u128, 0u128);
    let mut best = 0u128;
    while i < a.rows.len() || j < b.rows.len() {
        let da = a.rows.get(i).map(|r| r.degree);
        let db = b.rows.get(j).map(|r| r.degree);
        let x = match (da, db) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!(),
        };
        if da == Some(x) {
            ca += a.rows[i].frequency as u128;
            i += 1;
        }
        if db == Some(x) {
            cb += b.rows[j].frequency as u128;
            j += 1;
        }
        let diff = (ca * n2 as u128).abs_diff(cb * n1 as u128);
        best = best.max(diff);
    }
    let d = best as f64 / (n1 as f64 * n2 as f64);
    Ok(KsResult {
        d_statistic: d,
        p_raw: ks_p_value(d, n1, n2, method),
        p_adjusted: None,
        n1,
        n2,
    })
}

/// KS test on raw samples.
pub fn ks_two_sample_raw(a: &[f64], b: &[f64], method: KsPValue) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "KS test needs two non-empty samples".into(),
        ));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("KS samples contain NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n1, n2) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let x = a[i].min(b[j]);
        while i < n1 && a[i] == x {
            i += 1;
        }
        while j < n2 && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    Ok(KsResult {
        d_statistic: d,
        p_raw: ks_p_value(d, n1, n2, method),
        p_adjusted: None,
        n1,
        n2,
    })
}
