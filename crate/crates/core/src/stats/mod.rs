//! Statistical comparison: two-sample KS tests on degree distributions,
//! multiple-comparison adjustment and the random-panel null model.

mod ks;
mod null_model;

pub use ks::{
    kolmogorov_survival, ks_p_value, ks_two_sample, ks_two_sample_raw, KsPValue, KsResult,
};
pub use null_model::{
    evaluate_indicator, null_model_sample, uniform_below, DrawMode, HistogramBucket, Indicator,
    NetworkKind, NullModelConfig, NullModelRun, EXHAUSTIVE_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjustment {
    #[default]
    Holm,
    Bonferroni,
    None,
}

impl Adjustment {
    pub fn apply(self, pvals: &[f64]) -> Result<Vec<f64>> {
        match self {
            Adjustment::Holm => holm_adjust(pvals),
            Adjustment::Bonferroni => bonferroni_adjust(pvals),
            Adjustment::None => {
                check(pvals)?;
                Ok(pvals.to_vec())
            }
        }
    }
}

fn check(pvals: &[f64]) -> Result<()> {
    match pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(Error::InvalidArgument(format!(
            "p-value {p} outside [0, 1]"
        ))),
        None => Ok(()),
    }
}

/// Holm step-down adjustment, returned in input order.
pub fn holm_adjust(pvals: &[f64]) -> Result<Vec<f64>> {
    check(pvals)?;
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (j, &i) in order.iter().enumerate() {
        let scaled = ((m - j) as f64 * pvals[i]).min(1.0);
        running = running.max(scaled);
        out[i] = running;
    }
    Ok(out)
}

pub fn bonferroni_adjust(pvals: &[f64]) -> Result<Vec<f64>> {
    check(pvals)?;
    let m = pvals.len() as f64;
    Ok(pvals.iter().map(|p| (m * p).min(1.0)).collect())
}
