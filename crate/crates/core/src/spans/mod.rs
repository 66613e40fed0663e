//! Span sets: exact for one-dimensional piecewise-linear paths and for lattice
//! walks, approximate (ε-spans) for sampled paths in any dimension.

mod lattice;
mod pl;
mod sets;

pub use lattice::{span_lattice, span_lattice_oracle, span_lattice_oracle_with_cap, DEFAULT_ORACLE_CAP};
pub use pl::{span_pl_1d, span_pl_walk, span_pl_walk_measure, MERGE_REL_TOL};
pub use sets::{format_g17, IntervalSet, SpanSet};

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::estimate::quartiles;
use crate::paths::{gen_gaussian_path, SampledPath};
use crate::rng::map_replicates;

/// Grid lags in `[l, u]` at which some pair of samples comes within `eps`,
/// each inflated to `[h - Δ/2, h + Δ/2]`: an outer approximation of the ε-span
/// restricted to the window.
pub fn eps_span_grid(path: &SampledPath, eps: f64, window: [f64; 2]) -> Result<IntervalSet> {
    let [l, u] = window;
    let dt = path.grid_step();
    ensure!(eps > 0.0 && eps.is_finite(), "eps must be positive, got {eps}");
    ensure!(0.0 < l && l < u, "window must satisfy 0 < l < u, got [{l}, {u}]");
    ensure!(l >= dt * (1.0 - 1e-9), "window start {l} is below the grid step {dt}");
    ensure!(u <= path.horizon() * (1.0 + 1e-9), "window end {u} exceeds the horizon");
    let eps2 = eps * eps;
    let n = path.len();
    let k_lo = ((l / dt) * (1.0 - 1e-12)).ceil() as usize;
    let k_hi = (((u / dt) * (1.0 + 1e-12)).floor() as usize).min(n - 1);
    let mut out = Vec::new();
    for k in k_lo.max(1)..=k_hi {
        if (0..n - k).any(|s| path.dist2(s, s + k) <= eps2) {
            let h = k as f64 * dt;
            out.push([h - dt / 2.0, h + dt / 2.0]);
        }
    }
    Ok(IntervalSet::canonical(out, MERGE_REL_TOL * path.horizon()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsSpanRow {
    pub eps: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub n_seeds: usize,
}

/// Lebesgue measure of [`eps_span_grid`] within `window`, summarized across
/// independent sampled paths on `[0, horizon]`. Each path is reused for every `eps`.
pub fn eps_span_experiment(
    dim: usize,
    horizon: f64,
    grid_step: f64,
    eps_values: &[f64],
    window: [f64; 2],
    n_seeds: usize,
    seed: u64,
) -> Result<Vec<EpsSpanRow>> {
    ensure!(n_seeds >= 1, "need at least one seed");
    ensure!(!eps_values.is_empty(), "need at least one eps");
    let per_seed = map_replicates(n_seeds, seed, |_, s| -> Result<Vec<f64>> {
        let path = gen_gaussian_path(dim, horizon, grid_step, s)?;
        eps_values
            .iter()
            .map(|&eps| Ok(eps_span_grid(&path, eps, window)?.clip(window[0], window[1]).measure()))
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(eps_values
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let column: Vec<f64> = per_seed.iter().map(|v| v[k]).collect();
            let [q25, median, q75] = quartiles(&column);
            EpsSpanRow { eps, median, q25, q75, n_seeds }
        })
        .collect())
}

/// Spans guaranteed by excursions at a common level: a single excursion
/// `(u, u + T)` yields `[0, T]`; two excursions `(p, q)`, `(r, s)` with
/// `p < q < r < s` yield `[max(r-p, s-q), s-p] ∪ [r-q, min(r-p, s-q)]`.
pub fn spans_from_excursions(excursions: &[(f64, f64)]) -> Result<IntervalSet> {
    for &(a, b) in excursions {
        ensure!(a.is_finite() && b.is_finite() && a < b, "excursion ({a}, {b}) is not ordered");
    }
    match *excursions {
        [(u, v)] => IntervalSet::interval(0.0, v - u),
        [(p, q), (r, s)] => {
            ensure!(q < r, "excursions ({p}, {q}) and ({r}, {s}) must be disjoint and ordered");
            let m = (r - p).min(s - q);
            let big = (r - p).max(s - q);
            IntervalSet::from_intervals([[big, s - p], [r - q, m]], 0.0)
        }
        _ => Err(crate::error::invalid("expected one or two excursions")),
    }
}
