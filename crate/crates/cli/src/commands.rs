use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use spans_core::dimension::{dimension_pipeline, PipelineConfig};
use spans_core::estimate::EstimateSummary;
use spans_core::metric::{convergence_experiment, hausdorff_distance, ConvergenceConfig, Coupling, Resolution};
use spans_core::moments::{energy_bound, m1_asymptotic, m1_exact, m2_limit, mc_span_measure, McMode, MomentResult};
use spans_core::paths::{gen_gaussian_path, gen_srw, LatticePath, PiecewiseLinearPath};
use spans_core::quad::QuadratureConfig;
use spans_core::spans::{eps_span_experiment, span_lattice, span_pl_1d, IntervalSet};
use spans_core::stats::{
    capacity_estimate, es1_bounds, estimate_es1, excursion_experiment, fdist_experiment, Es1Method,
};

use crate::output::{csv_table, emit, usage, Outcome};
use crate::{Cli, Command, FdistArgs, GenCmd, Global, MomentsCmd, SpanCmd, StatsCmd};

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let start = Instant::now();
    let g = &cli.global;
    let seed = g.seed;
    let (name, params, outcome) = match &cli.command {
        Command::Gen(GenCmd::Walk(a)) => {
            let walk = gen_srw(a.dim, a.steps, seed)?.with_level(a.level);
            let rows = (0..walk.len()).map(|k| {
                let p: Vec<String> = walk.position(k).iter().map(|c| c.to_string()).collect();
                format!("{k},{}", p.join(","))
            });
            let header = ["step", "x", "y", "z"][..=a.dim].join(",");
            ("gen walk", param(a)?, Outcome::new(&walk)?.csv(csv_table(&header, rows)).plain(walk.to_json()))
        }
        Command::Gen(GenCmd::Gaussian(a)) => {
            let path = gen_gaussian_path(a.dim, a.horizon, a.grid_step, seed)?;
            let rows = (0..path.len()).map(|k| {
                let p: Vec<String> = path.point(k).iter().map(|c| c.to_string()).collect();
                format!("{},{}", k as f64 * path.grid_step(), p.join(","))
            });
            let header = ["t", "x", "y", "z"][..=a.dim].join(",");
            ("gen gaussian", param(a)?, Outcome::new(&path)?.csv(csv_table(&header, rows)))
        }
        Command::Span(SpanCmd::Pl(a)) => {
            let path = match (&a.input, a.demo.as_deref()) {
                (Some(file), _) => read_input(file)?.parse::<PiecewiseLinearPath>()?,
                (None, Some("ex2")) => tent_path(0.0)?,
                (None, Some("ex2n")) => {
                    if a.n == 0 {
                        return Err(usage("--n must be positive"));
                    }
                    tent_path(-0.25 / a.n as f64)?
                }
                (None, Some(other)) => return Err(usage(format!("unknown demo `{other}`; try ex2 or ex2n"))),
                (None, None) => return Err(usage("give --input FILE or --demo ex2")),
            };
            let spans = span_pl_1d(&path);
            let results = json!({ "path": path, "spans": spans, "measure": spans.measure() });
            ("span pl", param(a)?, Outcome::new(results)?.csv(interval_csv(&spans)).plain(spans.to_string()))
        }
        Command::Span(SpanCmd::Lattice(a)) => {
            let walk = match &a.input {
                Some(file) => LatticePath::from_json(&read_input(file)?)?,
                None => gen_srw(a.dim, a.steps, seed)?,
            };
            let spans = span_lattice(&walk);
            let csv = csv_table("lag", spans.lags().iter().map(|k| k.to_string()));
            let results = json!({ "dim": walk.dim(), "n_steps": walk.n_steps(), "count": spans.len(), "spans": spans });
            ("span lattice", param(a)?, Outcome::new(results)?.csv(csv).plain(spans.to_json()))
        }
        Command::Span(SpanCmd::Eps(a)) => {
            let rows = eps_span_experiment(a.dim, a.horizon, a.grid_step, &a.eps, window(&a.window)?, a.seeds, seed)?;
            let csv = csv_table(
                "eps,median,q25,q75,n_seeds",
                rows.iter().map(|r| format!("{},{},{},{},{}", r.eps, r.median, r.q25, r.q75, r.n_seeds)),
            );
            ("span eps", param(a)?, Outcome::new(&rows)?.csv(csv))
        }
        Command::Stats(StatsCmd::Es1(a)) => {
            if a.method == "bounds" {
                let b = es1_bounds(&quad(g)?)?;
                let csv = csv_table("lower,upper,abs_error", [format!("{},{},{}", b.lower, b.upper, b.abs_error)]);
                ("stats es1", param(a)?, Outcome::new(b)?.csv(csv).converged(b.converged))
            } else {
                let method: Es1Method = a.method.parse()?;
                let r = estimate_es1(method, a.reps, a.steps, seed)?;
                ("stats es1", param(a)?, Outcome::new(&r)?.csv(summary_csv(&r)))
            }
        }
        Command::Stats(StatsCmd::Fdist(a)) | Command::Fdist(a) => ("stats fdist", param(a)?, fdist(a, seed)?),
        Command::Stats(StatsCmd::Excursions(a)) => {
            let r = excursion_experiment(a.steps, a.reps, seed)?;
            ("stats excursions", param(a)?, Outcome::new(&r)?.csv(summary_csv(&r)))
        }
        Command::Stats(StatsCmd::Capacity(a)) => {
            let k: IntervalSet = a.set.parse()?;
            let r = capacity_estimate(&k, a.reps, a.steps, seed)?;
            ("stats capacity", param(a)?, Outcome::new(&r)?.csv(summary_csv(&r)))
        }
        Command::Dim(a) => {
            let cfg = PipelineConfig { n_steps: a.steps, n_seeds: a.seeds, ..PipelineConfig::standard(a.dim) };
            let r = dimension_pipeline(&cfg, seed)?;
            ("dim", param(a)?, Outcome::new(&r)?.csv(r.example_table.to_csv()))
        }
        Command::Moments(MomentsCmd::M1(a)) => {
            let r = match a.eps {
                Some(eps) => m1_exact(a.d, a.a, eps, &quad(g)?)?,
                None => m1_asymptotic(a.d, a.a, &quad(g)?)?,
            };
            ("moments m1", param(a)?, moment(r)?)
        }
        Command::Moments(MomentsCmd::M2(a)) => ("moments m2", param(a)?, moment(m2_limit(a.d, a.a, a.b, &quad(g)?)?)?),
        Command::Moments(MomentsCmd::Energy(a)) => {
            ("moments energy", param(a)?, moment(energy_bound(a.d, a.l, a.alpha, &quad(g)?)?)?)
        }
        Command::Moments(MomentsCmd::Mc(a)) => {
            let mode = match a.b {
                Some(b) => McMode::Product { b, delta: a.delta.unwrap_or(a.eps) },
                None => McMode::Single,
            };
            let grid = a.grid_step.unwrap_or(a.eps * a.eps / 4.0);
            let r = mc_span_measure(a.d, a.a, a.eps, grid, a.reps, seed, mode)?;
            ("moments mc", param(a)?, Outcome::new(&r)?.csv(summary_csv(&r)))
        }
        Command::Hausdorff(a) => {
            let (x, y) = (read_set(&a.a)?, read_set(&a.b)?);
            let d = hausdorff_distance(&x, &y)?;
            let results = json!({ "a": x, "b": y, "distance": d });
            ("hausdorff", param(a)?, Outcome::new(results)?.csv(csv_table("distance", [d.to_string()])).plain(d.to_string()))
        }
        Command::Converge(a) => {
            let coupling = match a.coupling.as_str() {
                "knight" => Coupling::Knight,
                "independent" => Coupling::Independent,
                other => return Err(usage(format!("unknown coupling `{other}`; use knight or independent"))),
            };
            let resolution = if !a.steps.is_empty() {
                Resolution::Steps(a.steps.clone())
            } else if !a.levels.is_empty() {
                Resolution::Levels(a.levels.clone())
            } else {
                Resolution::Levels(vec![4, 5, 6, 7, 8])
            };
            let cfg = ConvergenceConfig { coupling, resolution, reference_level: a.reference_level, n_seeds: a.seeds };
            let r = convergence_experiment(&cfg, seed)?;
            ("converge", param(a)?, Outcome::new(&r)?.csv(r.to_csv()))
        }
        Command::Repro(a) => {
            let table = crate::repro::run(a.quick, seed)?;
            let plain = crate::repro::render(&table);
            let csv = csv_table(
                "id,quantity,value,target,pass",
                table.iter().map(|r| format!("{},{},{},{},{}", r.id, r.quantity, r.value, r.target, r.pass)),
            );
            ("repro", param(a)?, Outcome::new(&table)?.csv(csv).plain(plain))
        }
    };
    emit(g, name, params, outcome, start)
}

fn param(args: &impl Serialize) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(args)?)
}

fn quad(g: &Global) -> Result<QuadratureConfig> {
    let cfg = match g.tol {
        Some(t) => QuadratureConfig::default().with_rel_tol(t),
        None => QuadratureConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn window(w: &[f64]) -> Result<[f64; 2]> {
    match *w {
        [l, u] => Ok([l, u]),
        _ => Err(usage("--window takes two numbers, e.g. 0.05,1")),
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// A set literal, or `@path` to read one from a file.
fn read_set(arg: &str) -> Result<IntervalSet> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_input(Path::new(path))?,
        None => arg.to_string(),
    };
    Ok(text.trim().parse::<IntervalSet>().with_context(|| format!("parsing set `{arg}`"))?)
}

/// Slopes +1, -1, +1 on [0,¼], [¼,¾], [¾,1], with the last piece bent to end at `end`.
fn tent_path(end: f64) -> Result<PiecewiseLinearPath> {
    Ok(PiecewiseLinearPath::from_points(&[(0.0, 0.0), (0.25, 0.25), (0.75, -0.25), (1.0, end)])?)
}

fn interval_csv(s: &IntervalSet) -> String {
    csv_table("lo,hi", s.intervals().iter().map(|[a, b]| format!("{a},{b}")))
}

fn summary_csv(r: &EstimateSummary) -> String {
    csv_table(
        "estimate,std_error,n,ci_lo,ci_hi",
        [format!("{},{},{},{},{}", r.estimate, r.std_error, r.n_replicates, r.ci95[0], r.ci95[1])],
    )
}

fn moment(r: MomentResult) -> Result<Outcome> {
    let mut rows = vec![format!("total,{},{}", r.value, r.est_error)];
    rows.extend(r.pieces.iter().map(|p| format!("{},{},{}", p.name, p.value, p.est_error)));
    let converged = r.converged;
    Ok(Outcome::new(&r)?.csv(csv_table("piece,value,est_error", rows)).converged(converged))
}

fn fdist(a: &FdistArgs, seed: u64) -> Result<Outcome> {
    let r = fdist_experiment(a.n, a.steps, a.reps, seed)?;
    let csv = csv_table("t,empirical,exact", r.grid.iter().map(|[t, e, x]| format!("{t},{e},{x}")));
    Outcome::new(&r).map(|o| o.csv(csv))
}
