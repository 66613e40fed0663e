//! One-command reproduction of the desk-scale numbers.

use std::f64::consts::PI;

use anyhow::Result;
use serde::Serialize;

use spans_core::dimension::{dimension_pipeline, PipelineConfig};
use spans_core::metric::{convergence_experiment, hausdorff_distance, ConvergenceConfig, Coupling, Resolution};
use spans_core::moments::{energy_bound, m1_asymptotic, m1_exact, m2_limit, mc_span_measure, McMode};
use spans_core::paths::{gen_srw, PiecewiseLinearPath};
use spans_core::quad::QuadratureConfig;
use spans_core::rng::mix64;
use spans_core::spans::{eps_span_experiment, span_lattice, span_lattice_oracle, span_pl_1d, spans_from_excursions};
use spans_core::stats::{es1_bounds, estimate_es1, excursion_experiment, f_cdf, fdist_experiment, Es1Method};

#[derive(Debug, Serialize)]
pub struct Row {
    pub id: u32,
    pub quantity: String,
    pub value: String,
    pub target: String,
    pub pass: bool,
}

fn row(id: u32, quantity: &str, value: String, target: &str, pass: bool) -> Row {
    Row { id, quantity: quantity.into(), value, target: target.into(), pass }
}

fn join(v: &[f64], digits: usize) -> String {
    v.iter().map(|x| format!("{x:.digits$}")).collect::<Vec<_>>().join(" ")
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn run(quick: bool, seed: u64) -> Result<Vec<Row>> {
    let s = |k: u64| mix64(seed, k);
    let scale = |full: usize, small: usize| if quick { small } else { full };
    let cfg = QuadratureConfig::default();
    let mut rows = Vec::new();

    let tent = |end: f64| PiecewiseLinearPath::from_points(&[(0.0, 0.0), (0.25, 0.25), (0.75, -0.25), (1.0, end)]);
    let (f, fn_) = (span_pl_1d(&tent(0.0)?), span_pl_1d(&tent(-0.125)?));
    let d = hausdorff_distance(&f, &fn_)?;
    rows.push(row(1, "tent span, gap distance", format!("{f}; {d}"), "[0,0.5] ∪ {1}; 0.5", d == 0.5));

    let pair = spans_from_excursions(&[(0.0, 2.0), (4.0, 4.5)])?;
    rows.push(row(2, "two-excursion spans", pair.to_string(), "[2,2.5] ∪ [4,4.5]", pair.to_string() == "[2,2.5] ∪ [4,4.5]"));

    let n_walks = scale(500, 50);
    let mut same = true;
    for k in 0..n_walks as u64 {
        let w = gen_srw(1 + (k % 3) as usize, 1 + (s(3 + k) % 2000) as usize, s(10_000 + k))?;
        same &= span_lattice(&w) == span_lattice_oracle(&w)?;
    }
    rows.push(row(3, "lattice spans vs brute force", format!("{n_walks} walks, identical: {same}"), "identical", same));

    let f1 = f_cdf(1.0)?;
    let fd = fdist_experiment(2000, 1_000_000, scale(10_000, 1000), s(5))?;
    rows.push(row(
        5,
        "law of F: F(1), KS distance",
        format!("{f1:.15}, {:.4}", fd.ks_distance),
        "1/2+1/pi = 0.818309886183791, <= 0.03",
        (f1 - (0.5 + 1.0 / PI)).abs() < 1e-12 && fd.ks_distance <= 0.03,
    ));

    let reps = scale(10_000, 1000);
    let a = estimate_es1(Es1Method::Formula, reps, 10_000, s(6))?;
    let b = estimate_es1(Es1Method::Direct, reps, 10_000, s(6))?;
    let agree = (a.estimate - b.estimate).abs() <= 3.0 * a.std_error.hypot(b.std_error);
    let inside = |x: f64| (0.63..=0.77).contains(&x);
    rows.push(row(
        6,
        "E S1 (formula, direct)",
        format!("{:.4} ± {:.4}, {:.4} ± {:.4}", a.estimate, a.std_error, b.estimate, b.std_error),
        "[0.63, 0.77], agree within 3 se",
        inside(a.estimate) && inside(b.estimate) && agree,
    ));

    let r0 = excursion_experiment(10_000, reps, s(7))?;
    rows.push(row(
        7,
        "mean longest zero-excursion R0/N",
        format!("{:.4} ± {:.4}", r0.estimate, r0.std_error),
        "0.2869 ± 0.02 (reference constant disputed)",
        (r0.estimate - 0.2869).abs() <= 0.02,
    ));

    let bounds = es1_bounds(&cfg)?;
    rows.push(row(
        8,
        "E S1 bounds",
        format!("{:.6}, {:.6}", bounds.lower, bounds.upper),
        "0.655, 0.746 (± 0.0005)",
        (bounds.lower - 0.655).abs() <= 5e-4 && (bounds.upper - 0.746).abs() <= 5e-4,
    ));

    let (m2d, m3d) = (m1_asymptotic(2, 1.0, &cfg)?.value, m1_asymptotic(3, 1.0, &cfg)?.value);
    let eps = 0.05;
    let exact = m1_exact(2, 1.0, eps, &cfg)?.value / (eps * eps);
    let mc = mc_span_measure(2, 1.0, eps, 5e-4, scale(4000, 500), s(9), McMode::Single)?;
    rows.push(row(
        9,
        "first moment: limits d=2,3; exact vs MC at eps=0.05",
        format!("{m2d:.10}, {m3d:.10}; {exact:.5} vs {:.5} ± {:.5}", mc.estimate, mc.std_error),
        "0.1096919672, 0.0473804363; within 3 se",
        (exact - mc.estimate).abs() <= 3.0 * mc.std_error,
    ));

    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let v = m2_limit(d, 1.0, 0.5, &cfg)?;
        let p = mc_span_measure(d, 1.0, 0.05, 0.05f64.powi(2) / 4.0, scale(100_000, 2000), s(10 + d as u64), McMode::Product {
            b: 0.5,
            delta: 0.05,
        })?;
        ok &= v.converged && (p.estimate - v.value).abs() <= 0.15 * v.value;
        parts.push(format!("d={d} {:.5} vs MC {:.4} ± {:.4}", v.value, p.estimate, p.std_error));
    }
    rows.push(row(10, "second moment limit vs MC product", parts.join("; "), "within 15%", ok));

    let mut ok = true;
    let mut parts = Vec::new();
    for (d, grid) in [(2usize, [0.0, 0.25, 0.5, 0.75, 0.95]), (3, [0.0, 0.1, 0.2, 0.3, 0.45])] {
        let vals = grid.iter().map(|&al| energy_bound(d, 1.0, al, &cfg).map(|r| r.value)).collect::<Result<Vec<_>, _>>()?;
        ok &= vals.windows(2).all(|w| w[0] < w[1]) && energy_bound(d, 1.0, 2.0 - d as f64 / 2.0, &cfg).is_err();
        parts.push(format!("d={d}: {}", join(&vals, 4)));
    }
    rows.push(row(11, "energy bound on alpha grid", parts.join("; "), "increasing; rejected at threshold", ok));

    let seeds = scale(20, 4);
    let slope = |d| -> Result<f64> {
        let cfg = PipelineConfig { n_seeds: seeds, ..PipelineConfig::standard(d) };
        Ok(dimension_pipeline(&cfg, s(12))?.mean_slope.estimate)
    };
    let (s2, s3) = (slope(2)?, slope(3)?);
    rows.push(row(
        12,
        "box-count slope d=2, d=3",
        format!("{s2:.4}, {s3:.4}"),
        "[0.85, 1.15], [0.35, 0.65]",
        (0.85..=1.15).contains(&s2) && (0.35..=0.65).contains(&s3),
    ));

    let eps_list = [0.1, 0.05, 0.025, 0.0125];
    let d2 = eps_span_experiment(2, 1.0, 1e-3, &eps_list, [0.05, 1.0], 20, s(13))?;
    let d1 = eps_span_experiment(1, 8.0, 2e-3, &eps_list, [0.05, 1.0], 20, s(13))?;
    let med2: Vec<f64> = d2.iter().map(|r| r.median).collect();
    let min1 = d1.iter().map(|r| r.median).fold(f64::INFINITY, f64::min);
    rows.push(row(
        13,
        "eps-span median measure d=2; d=1 minimum",
        format!("{}; {min1:.4}", join(&med2, 4)),
        "strictly decreasing; >= 0.931",
        strictly_decreasing(&med2) && min1 >= 0.98 * 0.95,
    ));

    let cc = ConvergenceConfig {
        coupling: Coupling::Knight,
        resolution: Resolution::Levels(vec![4, 5, 6, 7, 8]),
        reference_level: 9,
        n_seeds: scale(50, 10),
    };
    let med: Vec<f64> = convergence_experiment(&cc, s(14))?.rows.iter().map(|r| r.median).collect();
    rows.push(row(14, "Knight median d_H, levels 4..8", join(&med, 5), "strictly decreasing", strictly_decreasing(&med)));
    Ok(rows)
}

pub fn render(rows: &[Row]) -> String {
    let mut out = String::new();
    for r in rows {
        let tag = if r.pass { "ok  " } else { "MISS" };
        out.push_str(&format!("{tag} {:>2} {}: {} (target {})\n", r.id, r.quantity, r.value, r.target));
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    out.push_str(&format!("{passed}/{} within target", rows.len()));
    out
}
