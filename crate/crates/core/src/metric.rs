//! Hausdorff distance between compact subsets of the half-line and the
//! convergence experiments for rescaled walk span sets.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::estimate::quartiles;
use crate::paths::{embed_coarse, gen_srw, LatticePath};
use crate::rng::{map_replicates, mix64};
use crate::spans::{span_lattice, span_pl_walk, IntervalSet};

/// `sup_{x ∈ A} dist(x, B)`. On an interval union the supremum is attained at
/// an endpoint of `A` or at the midpoint of a gap of `B` lying inside `A`.
pub fn directed_distance(a: &IntervalSet, b: &IntervalSet) -> Result<f64> {
    ensure!(!a.is_empty() && !b.is_empty(), "Hausdorff distance needs nonempty sets");
    let mut d = 0.0f64;
    for &[x, y] in a.intervals() {
        d = d.max(b.dist(x)).max(b.dist(y));
    }
    for w in b.intervals().windows(2) {
        let mid = 0.5 * (w[0][1] + w[1][0]);
        if a.contains(mid) {
            d = d.max(b.dist(mid));
        }
    }
    Ok(d)
}

pub fn hausdorff_distance(a: &IntervalSet, b: &IntervalSet) -> Result<f64> {
    Ok(directed_distance(a, b)?.max(directed_distance(b, a)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// Coarse walks embedded in the reference walk.
    Knight,
    /// Coarse walks independent of the reference walk.
    Independent,
}

/// Resolutions to compare: dyadic levels `n` (`N = 4^n` steps) or step counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Levels(Vec<u32>),
    Steps(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceConfig {
    pub coupling: Coupling,
    pub resolution: Resolution,
    /// The reference is the interpolated walk of `4^reference_level` steps.
    pub reference_level: u32,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    /// Number of coarse steps `N`.
    pub parameter: u64,
    pub level: Option<u32>,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub config: ConvergenceConfig,
    pub reference_steps: u64,
    /// Distances are evidence about the limit, not a verification of it.
    pub label: &'static str,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// CSV with columns `parameter,median,q25,q75,n_seeds`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("parameter,median,q25,q75,n_seeds\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.parameter, r.median, r.q25, r.q75, r.n_seeds));
        }
        s
    }
}

/// `(1/N)·span_lattice` of the first `N` steps, as a point set.
fn rescaled_lattice_spans(walk: &LatticePath, n: u64) -> IntervalSet {
    span_lattice(&walk.prefix(n as usize)).to_interval_set(1.0 / n as f64)
}

/// Hausdorff distances between rescaled lattice span sets of coarse walks and
/// the span set of a fine interpolated walk on `[0, 1]`, summarized per resolution.
pub fn convergence_experiment(cfg: &ConvergenceConfig, seed: u64) -> Result<ConvergenceReport> {
    ensure!(cfg.n_seeds >= 1, "need at least one seed");
    ensure!((1..=12).contains(&cfg.reference_level), "reference level must be in 1..=12");
    let big_l = cfg.reference_level;
    let n_ref = 1u64 << (2 * big_l);
    let (levels, steps): (Vec<Option<u32>>, Vec<u64>) = match &cfg.resolution {
        Resolution::Levels(ls) => {
            ensure!(ls.iter().all(|&n| n >= 1 && n <= big_l), "levels must lie in 1..=reference_level");
            (ls.iter().map(|&n| Some(n)).collect(), ls.iter().map(|&n| 1u64 << (2 * n)).collect())
        }
        Resolution::Steps(ns) => {
            ensure!(
                cfg.coupling == Coupling::Independent,
                "the Knight coupling needs dyadic levels, not arbitrary step counts"
            );
            ensure!(ns.iter().all(|&n| n >= 1), "step counts must be positive");
            (vec![None; ns.len()], ns.clone())
        }
    };
    ensure!(!steps.is_empty(), "need at least one resolution");
    let per_seed = map_replicates(cfg.n_seeds, seed, |_, s| -> Result<Vec<f64>> {
        let fine_seed = mix64(s, 0);
        match cfg.coupling {
            Coupling::Knight => {
                // Grow the fine walk until every coarse walk has its 4^n steps;
                // walks from one seed are prefixes of each other.
                let mut len = 2 * n_ref as usize;
                loop {
                    let fine = gen_srw(1, len, fine_seed)?.with_level(Some(big_l));
                    let reference = span_pl_walk(&fine.prefix(n_ref as usize), 1.0 / n_ref as f64)?;
                    let mut out = Vec::with_capacity(steps.len());
                    for (&level, &n) in levels.iter().zip(&steps) {
                        let level = level.unwrap();
                        let coarse = if level == big_l { fine.clone() } else { embed_coarse(&fine, level)?.coarse };
                        if (coarse.n_steps() as u64) < n {
                            break;
                        }
                        out.push(hausdorff_distance(&rescaled_lattice_spans(&coarse, n), &reference)?);
                    }
                    if out.len() == steps.len() {
                        return Ok(out);
                    }
                    len *= 2;
                }
            }
            Coupling::Independent => {
                let fine = gen_srw(1, n_ref as usize, fine_seed)?;
                let reference = span_pl_walk(&fine, 1.0 / n_ref as f64)?;
                steps
                    .iter()
                    .enumerate()
                    .map(|(k, &n)| {
                        let coarse = gen_srw(1, n as usize, mix64(s, 1 + k as u64))?;
                        hausdorff_distance(&rescaled_lattice_spans(&coarse, n), &reference)
                    })
                    .collect()
            }
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rows = steps
        .iter()
        .zip(&levels)
        .enumerate()
        .map(|(k, (&n, &level))| {
            let column: Vec<f64> = per_seed.iter().map(|v| v[k]).collect();
            let [q25, median, q75] = quartiles(&column);
            ConvergenceRow { parameter: n, level, median, q25, q75, n_seeds: cfg.n_seeds }
        })
        .collect();
    Ok(ConvergenceReport { config: cfg.clone(), reference_steps: n_ref, label: "evidence", rows })
}
