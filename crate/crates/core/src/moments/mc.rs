//! Direct simulation of `M_{d,ε}([a, ∞))`.
//!
//! A replicate needs the number of grid pairs at lag `≥ a` within distance
//! `ε`, over `n ≈ ξ/Δ` samples. The samples are hashed into cubes of side
//! `ε`, so each sample is compared only with later samples in the `3^d`
//! neighbouring cubes, and a binary search skips indices closer than the
//! minimal lag. This replaces the `O(n²)` scan over all pairs.

use rand::Rng;
use rand_distr::Exp1;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{ensure, Result};
use crate::estimate::EstimateSummary;
use crate::paths::SampledPath;
use crate::rng::{map_replicates, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum McMode {
    /// Estimate `E ε^{-d} M_{d,ε}([a, ∞))`.
    Single,
    /// Estimate `E[ε^{-d} M_{d,ε}([a, ∞)) · δ^{-d} M_{d,δ}([b, ∞))]` on a common path.
    Product { b: f64, delta: f64 },
}

fn cell_key(cell: [i64; 3]) -> u64 {
    let mut k = 0u64;
    for c in cell {
        k = (k << 21) | ((c + (1 << 20)) as u64 & ((1 << 21) - 1));
    }
    k
}

/// For each `(min_lag, radius)` query, the number of sample pairs `i < j` with
/// `j - i ≥ min_lag` and `|x_j - x_i| ≤ radius`.
pub fn count_close_pairs(path: &SampledPath, queries: &[(usize, f64)]) -> Vec<u64> {
    let mut counts = vec![0u64; queries.len()];
    if queries.is_empty() {
        return counts;
    }
    let n = path.len();
    let dim = path.dim();
    let side = queries.iter().map(|q| q.1).fold(0.0, f64::max);
    let lag_min = queries.iter().map(|q| q.0).min().unwrap().max(1);
    let r2: Vec<f64> = queries.iter().map(|q| q.1 * q.1).collect();
    let cell_of = |i: usize| -> [i64; 3] {
        let mut c = [0i64; 3];
        for (axis, slot) in c.iter_mut().enumerate().take(dim) {
            *slot = (path.coord(axis)[i] / side).floor() as i64;
        }
        c
    };
    let mut grid: FxHashMap<u64, Vec<u32>> = FxHashMap::default();
    for i in 0..n {
        grid.entry(cell_key(cell_of(i))).or_default().push(i as u32);
    }
    let offsets: Vec<[i64; 3]> = (0..3i64.pow(dim as u32))
        .map(|mut k| {
            let mut o = [0i64; 3];
            for slot in o.iter_mut().take(dim) {
                *slot = k % 3 - 1;
                k /= 3;
            }
            o
        })
        .collect();
    for i in 0..n {
        let c = cell_of(i);
        let first = i + lag_min;
        if first >= n {
            break;
        }
        for o in &offsets {
            let Some(bucket) = grid.get(&cell_key([c[0] + o[0], c[1] + o[1], c[2] + o[2]])) else {
                continue;
            };
            let start = bucket.partition_point(|&j| (j as usize) < first);
            for &j in &bucket[start..] {
                let j = j as usize;
                let d2 = path.dist2(i, j);
                for (q, (&(lag, _), &rr)) in queries.iter().zip(&r2).enumerate() {
                    if j - i >= lag && d2 <= rr {
                        counts[q] += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Monte Carlo estimate of the first moment (or the mixed second moment) of
/// the `ε^{-d}`-scaled approximate span measure of `[a, ∞)`, as a double
/// Riemann sum over grid pairs on `[0, ξ]`.
pub fn mc_span_measure(
    d: usize,
    a: f64,
    eps: f64,
    grid_step: f64,
    n_replicates: usize,
    seed: u64,
    mode: McMode,
) -> Result<EstimateSummary> {
    ensure!(d == 2 || d == 3, "dimension must be 2 or 3, got {d}");
    ensure!(n_replicates >= 1, "need at least one replicate");
    ensure!(grid_step > 0.0 && grid_step.is_finite(), "grid step must be positive");
    let check = |lag: f64, radius: f64| -> Result<()> {
        ensure!(radius > 0.0 && radius.is_finite(), "radius must be positive");
        ensure!(
            grid_step <= radius * radius / 4.0 * (1.0 + 1e-12),
            "grid step {grid_step} does not resolve the radius {radius} (need Δ ≤ r²/4)"
        );
        ensure!(lag > grid_step && lag.is_finite(), "minimal lag {lag} must exceed the grid step");
        Ok(())
    };
    check(a, eps)?;
    let mut queries = vec![(a, eps)];
    if let McMode::Product { b, delta } = mode {
        check(b, delta)?;
        queries.push((b, delta));
    }
    // Smallest k with k·Δ ≥ lag, robust to rounding of lag/Δ.
    let lag_steps = |lag: f64| ((lag / grid_step) * (1.0 - 1e-12)).ceil() as usize;
    let int_queries: Vec<(usize, f64)> = queries.iter().map(|&(lag, r)| (lag_steps(lag), r)).collect();
    let norm: Vec<f64> = queries.iter().map(|&(_, r)| grid_step * grid_step / r.powi(d as i32)).collect();
    let draws = map_replicates(n_replicates, seed, |_, s| {
        let mut rng = rng_from_seed(s);
        let xi: f64 = rng.sample(Exp1);
        let n = (xi / grid_step).floor() as usize;
        if n < int_queries.iter().map(|q| q.0).min().unwrap() {
            return (xi, 0.0);
        }
        let path = SampledPath::brownian(d, n, grid_step, &mut rng);
        let counts = count_close_pairs(&path, &int_queries);
        let value = counts.iter().zip(&norm).map(|(&c, &w)| c as f64 * w).product();
        (xi, value)
    });
    let values: Vec<f64> = draws.iter().map(|x| x.1).collect();
    let zero = values.iter().filter(|&&v| v == 0.0).count();
    let mean_xi = draws.iter().map(|x| x.0).sum::<f64>() / n_replicates as f64;
    Ok(EstimateSummary::from_samples(&values)
        .with("dimension", d)
        .with("grid_step", grid_step)
        .with("mode", serde_json::to_value(mode).unwrap())
        .with("mean_xi", mean_xi)
        .with("zero_fraction", zero as f64 / n_replicates as f64))
}
