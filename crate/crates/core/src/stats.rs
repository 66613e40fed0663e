//! Span-set statistics: measure and first gap of span sets, longest
//! excursions, first-match times `F_n`, the law of the first-match time `F`,
//! estimators of `E S₁` and an empirical capacity functional.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::json;

use crate::error::{ensure, Error, Result};
use crate::estimate::EstimateSummary;
use crate::paths::{gen_srw, LatticePath, SrwStream};
use crate::quad::{integrate, Quadrature, QuadratureConfig};
use crate::rng::map_replicates;
use crate::spans::{span_pl_walk, span_pl_walk_measure, IntervalSet};

/// Law of `F`, the first zero of `h ↦ B_{1+h} - B_h`: density
/// `(1/π)·√((2-t)/t)` on `[0, 1]` and an atom-free remainder of mass
/// `1/2 - 1/π` beyond 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct FLaw;

impl FLaw {
    pub fn density(t: f64) -> Result<f64> {
        ensure!((0.0..=1.0).contains(&t), "the density is known only on [0, 1], got {t}");
        Ok(((2.0 - t) / t).sqrt() / PI)
    }

    /// `(1/π)(√(t(2-t)) + 2·arcsin√(t/2))`.
    pub fn cdf(t: f64) -> Result<f64> {
        ensure!((0.0..=1.0).contains(&t), "the distribution function is known only on [0, 1], got {t}");
        Ok(((t * (2.0 - t)).sqrt() + 2.0 * (t / 2.0).sqrt().asin()) / PI)
    }

    /// `P(F > 1)`.
    pub fn tail_mass() -> f64 {
        0.5 - 1.0 / PI
    }
}

pub fn f_cdf(t: f64) -> Result<f64> {
    FLaw::cdf(t)
}

/// Bounds on `E S₁ = E[1/(1+F)]` from the law of `F`: the lower bound drops
/// the mass beyond 1, the upper bound charges it at the maximal value 1/2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Es1Bounds {
    pub lower: f64,
    pub upper: f64,
    pub abs_error: f64,
    pub converged: bool,
}

pub fn es1_bounds(cfg: &QuadratureConfig) -> Result<Es1Bounds> {
    cfg.validate()?;
    // t = x² removes the t^{-1/2} endpoint singularity.
    let q: Quadrature = if cfg.singularity_substitutions {
        integrate(|x| 2.0 * (2.0 - x * x).sqrt() / (PI * (1.0 + x * x)), 0.0, 1.0, cfg)
    } else {
        integrate(|t| ((2.0 - t) / t).sqrt() / (PI * (1.0 + t)), 0.0, 1.0, cfg)
    };
    Ok(Es1Bounds {
        lower: q.value,
        upper: q.value + 0.5 * FLaw::tail_mass(),
        abs_error: q.abs_error,
        converged: q.converged,
    })
}

/// Total length `S` of a span set within `[0, u]`, and `T₁`, the right end of
/// the component containing 0.
pub fn measure_stats(spans: &IntervalSet, u: f64) -> Result<(f64, f64)> {
    ensure!(u > 0.0 && u.is_finite(), "u must be positive");
    ensure!(spans.max().is_none_or(|m| m <= u), "span set extends beyond u = {u}");
    let t1 = match spans.intervals().first() {
        Some(&[0.0, b]) => b,
        _ => 0.0,
    };
    Ok((spans.measure(), t1))
}

/// Longest gap between consecutive visits to any level (`R`) and to level 0 (`R0`).
pub fn longest_excursions(walk: &LatticePath) -> Result<(u64, u64)> {
    ensure!(walk.dim() == 1, "excursions are defined for one-dimensional walks");
    let pos = walk.coords();
    let min = *pos.iter().min().unwrap();
    let max = *pos.iter().max().unwrap();
    let mut last = vec![usize::MAX; (max - min) as usize + 1];
    let (mut r, mut r0) = (0usize, 0usize);
    for (k, &p) in pos.iter().enumerate() {
        let slot = &mut last[(p - min) as usize];
        if *slot != usize::MAX {
            let gap = k - *slot;
            r = r.max(gap);
            if p == 0 {
                r0 = r0.max(gap);
            }
        }
        *slot = k;
    }
    Ok((r as u64, r0 as u64))
}

fn check_lag(n: usize) -> Result<()> {
    ensure!(n > 0, "lag must be positive");
    if n % 2 == 1 {
        return Err(Error::OddLag(n as u64));
    }
    Ok(())
}

/// `F_n = min{k ≥ 0 : RW_{k+n} = RW_k}`, or `None` when the walk ends first.
pub fn first_match_time(walk: &LatticePath, n: usize) -> Result<Option<usize>> {
    ensure!(walk.dim() == 1, "first-match times need a one-dimensional walk");
    check_lag(n)?;
    ensure!(n < walk.len(), "lag {n} is not shorter than the walk");
    let pos = walk.coords();
    Ok((0..walk.len() - n).find(|&k| pos[k + n] == pos[k]))
}

/// [`first_match_time`] on `gen_srw(1, walk_steps, seed)`, generating steps
/// only until the match.
pub fn first_match_time_streaming(seed: u64, n: usize, walk_steps: usize) -> Result<Option<usize>> {
    check_lag(n)?;
    ensure!(n <= walk_steps, "lag {n} is not shorter than the walk");
    let mut stream = SrwStream::new(1, seed)?;
    let mut ring = vec![0i32; n];
    let mut pos = 0i32;
    for j in 0..=walk_steps {
        if j > 0 {
            pos += stream.next_step().1;
        }
        let slot = &mut ring[j % n];
        if j >= n && *slot == pos {
            return Ok(Some(j - n));
        }
        *slot = pos;
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Es1Method {
    Formula,
    Direct,
}

impl std::str::FromStr for Es1Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(Self::Formula),
            "direct" => Ok(Self::Direct),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
        }
    }
}

/// Lag used by the formula estimator: the even number nearest `walk_steps / 50`.
pub fn formula_lag(walk_steps: usize) -> usize {
    (2 * ((walk_steps + 50) / 100)).max(2)
}

/// Estimates `E S₁`. `Formula` averages `1/(1 + F_n/n)` over walks, with
/// unobserved `F_n` censored at `cap = (walk_steps - n)/n`; `Direct` averages
/// the Lebesgue measure of the span set of the diffusively interpolated walk.
pub fn estimate_es1(method: Es1Method, n_replicates: usize, walk_steps: usize, seed: u64) -> Result<EstimateSummary> {
    ensure!(n_replicates >= 1, "need at least one replicate");
    ensure!(walk_steps >= 4, "walks must have at least 4 steps");
    match method {
        Es1Method::Formula => {
            let n = formula_lag(walk_steps);
            let cap = (walk_steps - n) as f64 / n as f64;
            let draws = map_replicates(n_replicates, seed, |_, s| first_match_time_streaming(s, n, walk_steps));
            let draws = draws.into_iter().collect::<Result<Vec<_>>>()?;
            let censored = draws.iter().filter(|d| d.is_none()).count();
            let values: Vec<f64> = draws
                .iter()
                .map(|d| match d {
                    Some(k) => 1.0 / (1.0 + *k as f64 / n as f64),
                    None => 1.0 / (1.0 + cap),
                })
                .collect();
            Ok(EstimateSummary::from_samples(&values)
                .with("method", "formula")
                .with("walk_steps", walk_steps)
                .with("lag", n)
                .with("censor_cap", cap)
                .with("censoring_rule", "unobserved F_n contributes 1/(1+cap), cap = (walk_steps - n)/n")
                .with("censored_fraction", censored as f64 / n_replicates as f64))
        }
        Es1Method::Direct => {
            let scale = 1.0 / walk_steps as f64;
            let values = map_replicates(n_replicates, seed, |_, s| {
                span_pl_walk_measure(&gen_srw(1, walk_steps, s)?, scale)
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            Ok(EstimateSummary::from_samples(&values)
                .with("method", "direct")
                .with("walk_steps", walk_steps)
                .with("censoring_rule", "none: exact span measure of the interpolated walk on [0, 1]"))
        }
    }
}

/// Empirical law of `F_n/n` against the closed form on `[0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct FDistReport {
    pub lag: usize,
    pub walk_steps: usize,
    pub n_replicates: usize,
    /// Kolmogorov–Smirnov distance to [`f_cdf`] over `[0, 1]`.
    pub ks_distance: f64,
    pub censored_fraction: f64,
    pub empirical_tail: f64,
    pub exact_tail: f64,
    /// `(t, empirical CDF, exact CDF)` on a grid of step 0.01.
    pub grid: Vec<[f64; 3]>,
}

pub fn fdist_experiment(n: usize, walk_steps: usize, n_replicates: usize, seed: u64) -> Result<FDistReport> {
    check_lag(n)?;
    ensure!(n_replicates >= 1, "need at least one replicate");
    let draws = map_replicates(n_replicates, seed, |_, s| first_match_time_streaming(s, n, walk_steps))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let censored = draws.iter().filter(|d| d.is_none()).count();
    let mut x: Vec<f64> = draws.iter().flatten().map(|&k| k as f64 / n as f64).collect();
    x.sort_by(f64::total_cmp);
    let total = n_replicates as f64;
    let ecdf = |t: f64| x.partition_point(|&v| v <= t) as f64 / total;
    let mut ks = 0.0f64;
    for (i, &v) in x.iter().enumerate() {
        if v > 1.0 {
            break;
        }
        let f = f_cdf(v)?;
        ks = ks.max((i as f64 / total - f).abs()).max((ecdf(v) - f).abs());
    }
    ks = ks.max((ecdf(1.0) - f_cdf(1.0)?).abs());
    let grid = (0..=100)
        .map(|i| {
            let t = i as f64 / 100.0;
            Ok([t, ecdf(t), f_cdf(t)?])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FDistReport {
        lag: n,
        walk_steps,
        n_replicates,
        ks_distance: ks,
        censored_fraction: censored as f64 / total,
        empirical_tail: 1.0 - ecdf(1.0),
        exact_tail: FLaw::tail_mass(),
        grid,
    })
}

/// Mean of `R0/N` over independent walks of `walk_steps` steps, with `R/N`
/// reported in the diagnostics.
pub fn excursion_experiment(walk_steps: usize, n_replicates: usize, seed: u64) -> Result<EstimateSummary> {
    ensure!(n_replicates >= 1, "need at least one replicate");
    let pairs = map_replicates(n_replicates, seed, |_, s| longest_excursions(&gen_srw(1, walk_steps, s)?))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let n = walk_steps as f64;
    let r0: Vec<f64> = pairs.iter().map(|p| p.1 as f64 / n).collect();
    let r_mean = pairs.iter().map(|p| p.0 as f64 / n).sum::<f64>() / pairs.len() as f64;
    Ok(EstimateSummary::from_samples(&r0)
        .with("walk_steps", walk_steps)
        .with("mean_R_over_N", r_mean)
        .with("note", "lattice walk of finite length; excursions straddling the horizon are not complete and are ignored"))
}

/// Fraction of interpolated walks whose span set on `[0, 1]` meets `K`.
pub fn capacity_estimate(k: &IntervalSet, n_replicates: usize, walk_steps: usize, seed: u64) -> Result<EstimateSummary> {
    ensure!(!k.is_empty(), "K must be nonempty");
    ensure!(k.max().unwrap() <= 1.0, "K must lie in [0, 1]");
    ensure!(n_replicates >= 1, "need at least one replicate");
    let scale = 1.0 / walk_steps as f64;
    let hits = map_replicates(n_replicates, seed, |_, s| -> Result<f64> {
        let spans = span_pl_walk(&gen_srw(1, walk_steps, s)?, scale)?;
        Ok(if spans.intersects(k) { 1.0 } else { 0.0 })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(EstimateSummary::from_samples(&hits).with("walk_steps", walk_steps).with("K", json!(k.to_string())))
}
