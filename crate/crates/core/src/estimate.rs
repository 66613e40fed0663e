use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub estimate: f64,
    pub std_error: f64,
    #[serde(rename = "n")]
    pub n_replicates: usize,
    pub ci95: [f64; 2],
    pub diagnostics: BTreeMap<String, Value>,
}

impl EstimateSummary {
    /// Mean and standard error of i.i.d. replicate values. A single replicate
    /// has no spread estimate; its standard error is reported as 0 and flagged.
    pub fn from_samples(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "no replicates");
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut diagnostics = BTreeMap::new();
        let std_error = if n > 1 {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            diagnostics.insert("single_replicate".into(), Value::Bool(true));
            0.0
        };
        Self::new(mean, std_error, n, diagnostics)
    }

    pub fn new(estimate: f64, std_error: f64, n_replicates: usize, diagnostics: BTreeMap<String, Value>) -> Self {
        Self {
            estimate,
            std_error,
            n_replicates,
            ci95: [estimate - 1.96 * std_error, estimate + 1.96 * std_error],
            diagnostics,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.into(), value.into());
        self
    }
}

/// Median and quartiles (linear interpolation between order statistics).
pub fn quartiles(values: &[f64]) -> [f64; 3] {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let x = p * (v.len() - 1) as f64;
        let (i, frac) = (x.floor() as usize, x - x.floor());
        if i + 1 < v.len() {
            v[i] + frac * (v[i + 1] - v[i])
        } else {
            v[i]
        }
    };
    [q(0.25), q(0.5), q(0.75)]
}

pub fn median(values: &[f64]) -> f64 {
    quartiles(values)[1]
}
