//! Box-counting dimension estimates of span sets.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::estimate::EstimateSummary;
use crate::paths::gen_srw;
use crate::rng::map_replicates;
use crate::spans::{span_lattice, IntervalSet, SpanSet};

/// A set to be box-counted: a union of intervals, or integer lags `k` read as
/// the points `k / divisor`.
#[derive(Debug, Clone, Copy)]
pub enum BoxSet<'a> {
    Intervals(&'a IntervalSet),
    Lattice { spans: &'a SpanSet, divisor: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxCountRow {
    pub scale: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountTable {
    pub window: [f64; 2],
    pub rows: Vec<BoxCountRow>,
}

impl BoxCountTable {
    /// CSV with columns `scale,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scale,count\n");
        for r in &self.rows {
            s.push_str(&format!("{},{}\n", r.scale, r.count));
        }
        s
    }
}

/// `2^{-k}` for `k` in `k_min..=k_max`, coarsest first.
pub fn dyadic_scales(k_min: i32, k_max: i32) -> Vec<f64> {
    (k_min..=k_max).map(|k| 2f64.powi(-k)).collect()
}

/// `k` with `scale = 2^{-k}`, if the scale is an exact power of two.
fn dyadic_exponent(scale: f64) -> Option<i32> {
    if !(scale > 0.0 && scale.is_finite()) {
        return None;
    }
    let k = -scale.log2().round() as i32;
    (2f64.powi(-k) == scale).then_some(k)
}

/// Number of half-open boxes `[jδ, (j+1)δ)` meeting `set ∩ [l, u]`, per scale.
pub fn box_count(set: BoxSet<'_>, window: [f64; 2], scales: &[f64]) -> Result<BoxCountTable> {
    let [l, u] = window;
    ensure!(l > 0.0 && l.is_finite(), "window start must be positive, got {l}");
    ensure!(u > l && u.is_finite(), "window end must exceed its start");
    ensure!(!scales.is_empty(), "need at least one scale");
    let exps = scales
        .iter()
        .map(|&s| dyadic_exponent(s).ok_or_else(|| crate::error::invalid(format!("scale {s} is not a power of two"))))
        .collect::<Result<Vec<i32>>>()?;
    ensure!(exps.windows(2).all(|w| w[0] < w[1]), "scales must decrease strictly");
    let rows = scales
        .iter()
        .zip(&exps)
        .map(|(&delta, &k)| {
            let count = match set {
                BoxSet::Intervals(iv) => {
                    let mut count = 0u64;
                    let mut last: Option<i64> = None;
                    for &[a, b] in iv.clip(l, u).intervals() {
                        let j0 = (a / delta).floor() as i64;
                        let j1 = (b / delta).floor() as i64;
                        let start = last.map_or(j0, |x| j0.max(x + 1));
                        if j1 >= start {
                            count += (j1 - start + 1) as u64;
                            last = Some(j1);
                        }
                    }
                    count
                }
                BoxSet::Lattice { spans, divisor } => {
                    let n = divisor as u128;
                    let mut count = 0u64;
                    let mut last: Option<u128> = None;
                    for &lag in spans.lags() {
                        let x = lag as f64 / divisor as f64;
                        if x < l || x > u {
                            continue;
                        }
                        let box_index = if k >= 0 {
                            ((lag as u128) << k) / n
                        } else {
                            (lag as u128) / (n << (-k))
                        };
                        if last != Some(box_index) {
                            count += 1;
                            last = Some(box_index);
                        }
                    }
                    count
                }
            };
            BoxCountRow { scale: delta, count }
        })
        .collect();
    Ok(BoxCountTable { window, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionFit {
    pub slope: f64,
    pub r_squared: f64,
    pub n_rows: usize,
}

/// Least-squares slope of `log₂ count` against `-log₂ scale` over the rows
/// whose scale lies in `scale_range` (inclusive, either order).
pub fn fit_dimension(table: &BoxCountTable, scale_range: [f64; 2]) -> Result<DimensionFit> {
    let (lo, hi) = (scale_range[0].min(scale_range[1]), scale_range[0].max(scale_range[1]));
    let rows: Vec<&BoxCountRow> = table.rows.iter().filter(|r| r.scale >= lo && r.scale <= hi).collect();
    ensure!(rows.len() >= 3, "need at least 3 rows in the fitting range, got {}", rows.len());
    ensure!(rows.iter().all(|r| r.count > 0), "box counts in the fitting range must be positive");
    let xs: Vec<f64> = rows.iter().map(|r| -r.scale.log2()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.count as f64).log2()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DimensionFit { slope, r_squared, n_rows: rows.len() })
}

/// Parameters of the lattice-walk dimension experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub dim: usize,
    pub n_steps: usize,
    pub n_seeds: usize,
    pub window: [f64; 2],
    /// Box scales `2^{-k}` for `k` in this inclusive range.
    pub scale_exponents: [i32; 2],
    pub fit_exponents: [i32; 2],
}

impl PipelineConfig {
    /// Walks of 10^6 steps, window [0.05, 1], scales 2^-4..2^-12 fitted over
    /// 2^-6..2^-10, 20 seeds.
    pub fn standard(dim: usize) -> Self {
        Self {
            dim,
            n_steps: 1_000_000,
            n_seeds: 20,
            window: [0.05, 1.0],
            scale_exponents: [4, 12],
            fit_exponents: [6, 10],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub slopes: Vec<f64>,
    pub r_squared: Vec<f64>,
    pub mean_slope: EstimateSummary,
    /// Box counts of the first seed.
    pub example_table: BoxCountTable,
}

/// Box-count slope of `(1/N)·span_lattice` of independent `dim`-dimensional walks.
pub fn dimension_pipeline(cfg: &PipelineConfig, seed: u64) -> Result<PipelineReport> {
    ensure!(cfg.n_seeds >= 1, "need at least one seed");
    let scales = dyadic_scales(cfg.scale_exponents[0], cfg.scale_exponents[1]);
    let fit_range = [2f64.powi(-cfg.fit_exponents[0]), 2f64.powi(-cfg.fit_exponents[1])];
    let per_seed = map_replicates(cfg.n_seeds, seed, |_, s| -> Result<(BoxCountTable, DimensionFit)> {
        let walk = gen_srw(cfg.dim, cfg.n_steps, s)?;
        let spans = span_lattice(&walk);
        let table = box_count(BoxSet::Lattice { spans: &spans, divisor: cfg.n_steps as u64 }, cfg.window, &scales)?;
        let fit = fit_dimension(&table, fit_range)?;
        Ok((table, fit))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let slopes: Vec<f64> = per_seed.iter().map(|x| x.1.slope).collect();
    Ok(PipelineReport {
        config: cfg.clone(),
        r_squared: per_seed.iter().map(|x| x.1.r_squared).collect(),
        mean_slope: EstimateSummary::from_samples(&slopes)
            .with("note", "box-counting slope, a proxy for Hausdorff dimension"),
        slopes,
        example_table: per_seed.into_iter().next().unwrap().0,
    })
}
