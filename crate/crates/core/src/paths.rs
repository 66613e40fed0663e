//! Random walks, sampled Gaussian paths, Knight's embedded coarse walks and
//! piecewise-linear interpolation.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::rng::rng_from_seed;

/// A nearest-neighbour walk on Z^dim, stored as flattened positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticePath {
    dim: usize,
    coords: Vec<i32>,
    level: Option<u32>,
}

fn check_dim(dim: usize) -> Result<()> {
    ensure!((1..=3).contains(&dim), "dimension must be 1, 2 or 3, got {dim}");
    Ok(())
}

impl LatticePath {
    /// Builds a walk from flattened positions (`dim` coordinates per position),
    /// checking the origin start and the unit-step property.
    pub fn new(dim: usize, coords: Vec<i32>, level: Option<u32>) -> Result<Self> {
        check_dim(dim)?;
        ensure!(
            !coords.is_empty() && coords.len() % dim == 0,
            "coordinate buffer length {} is not a positive multiple of {dim}",
            coords.len()
        );
        ensure!(coords[..dim].iter().all(|&c| c == 0), "walk must start at the origin");
        for (k, w) in coords.chunks_exact(dim).collect::<Vec<_>>().windows(2).enumerate() {
            let dist: i64 = w[0].iter().zip(w[1]).map(|(a, b)| (*a as i64 - *b as i64).abs()).sum();
            ensure!(dist == 1, "step {k} is not a unit nearest-neighbour move");
        }
        Ok(Self { dim, coords, level })
    }

    /// `{"dim":1,"coords":[0,1,0],"level":null}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("walks always serialize")
    }

    /// Parses the [`to_json`](Self::to_json) form, with the same validation as [`new`](Self::new).
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: WalkJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.dim, raw.coords, raw.level)
    }

    /// Convenience constructor for one-dimensional walks.
    pub fn from_positions(positions: &[i32]) -> Result<Self> {
        Self::new(1, positions.to_vec(), None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn with_level(mut self, level: Option<u32>) -> Self {
        self.level = level;
        self
    }

    /// Number of positions, i.e. `n_steps() + 1`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_steps(&self) -> usize {
        self.len() - 1
    }

    pub fn position(&self, k: usize) -> &[i32] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    /// Flattened coordinates; for a one-dimensional walk these are the positions.
    pub fn coords(&self) -> &[i32] {
        &self.coords
    }

    /// The walk restricted to its first `n_steps` steps.
    pub fn prefix(&self, n_steps: usize) -> Self {
        let n = (n_steps + 1).min(self.len());
        Self { dim: self.dim, coords: self.coords[..n * self.dim].to_vec(), level: self.level }
    }
}

/// Step source for simple symmetric walks. One-dimensional steps consume one
/// random bit each, two-dimensional steps two bits, three-dimensional steps a
/// uniform draw from six neighbours. The stream is sequential, so a longer walk
/// from the same seed extends a shorter one.
pub struct SrwStream {
    dim: usize,
    rng: ChaCha8Rng,
    buf: u64,
    left: u32,
}

impl SrwStream {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, rng: rng_from_seed(seed), buf: 0, left: 0 })
    }

    /// Next step as (axis, ±1).
    #[inline]
    pub fn next_step(&mut self) -> (usize, i32) {
        match self.dim {
            1 => {
                if self.left == 0 {
                    self.buf = self.rng.next_u64();
                    self.left = 64;
                }
                let bit = self.buf & 1;
                self.buf >>= 1;
                self.left -= 1;
                (0, if bit == 1 { 1 } else { -1 })
            }
            2 => {
                if self.left == 0 {
                    self.buf = self.rng.next_u64();
                    self.left = 32;
                }
                let bits = self.buf & 3;
                self.buf >>= 2;
                self.left -= 1;
                ((bits >> 1) as usize, if bits & 1 == 1 { 1 } else { -1 })
            }
            _ => {
                let k: u32 = self.rng.random_range(0..6);
                ((k / 2) as usize, if k % 2 == 1 { 1 } else { -1 })
            }
        }
    }
}

/// A simple symmetric walk with `n_steps` steps; bit-identical for equal inputs.
pub fn gen_srw(dim: usize, n_steps: usize, seed: u64) -> Result<LatticePath> {
    check_dim(dim)?;
    ensure!(n_steps >= 1, "a walk needs at least one step");
    let mut stream = SrwStream::new(dim, seed)?;
    let mut coords = Vec::with_capacity((n_steps + 1) * dim);
    let mut pos = [0i32; 3];
    coords.extend_from_slice(&pos[..dim]);
    for _ in 0..n_steps {
        let (axis, sign) = stream.next_step();
        pos[axis] += sign;
        coords.extend_from_slice(&pos[..dim]);
    }
    Ok(LatticePath { dim, coords, level: None })
}

/// Grid samples of a Brownian motion started at the origin, stored per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledPath {
    grid_step: f64,
    coords: Vec<Vec<f64>>,
}

impl SampledPath {
    /// Wraps existing per-coordinate samples (all the same length, starting at 0).
    pub fn from_coords(grid_step: f64, coords: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(coords.len())?;
        ensure!(grid_step > 0.0 && grid_step.is_finite(), "grid step must be positive");
        let n = coords[0].len();
        ensure!(n >= 2, "a sampled path needs at least two samples");
        ensure!(coords.iter().all(|c| c.len() == n), "coordinate series differ in length");
        ensure!(coords.iter().all(|c| c[0] == 0.0), "sampled path must start at the origin");
        ensure!(coords.iter().flatten().all(|v| v.is_finite()), "non-finite sample");
        Ok(Self { grid_step, coords })
    }

    /// A path with `n_steps` Gaussian increments of variance `grid_step`.
    pub(crate) fn brownian<R: Rng>(dim: usize, n_steps: usize, grid_step: f64, rng: &mut R) -> Self {
        let sd = grid_step.sqrt();
        let mut coords = vec![Vec::with_capacity(n_steps + 1); dim];
        for c in coords.iter_mut() {
            c.push(0.0);
        }
        let mut pos = [0.0f64; 3];
        for _ in 0..n_steps {
            for (axis, c) in coords.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                pos[axis] += sd * z;
                c.push(pos[axis]);
            }
        }
        Self { grid_step, coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    /// Number of samples (grid points including time 0).
    pub fn len(&self) -> usize {
        self.coords[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        (self.len() - 1) as f64 * self.grid_step
    }

    pub fn coord(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.coords.iter().map(|c| c[k]).collect()
    }

    /// Squared distance between samples `i` and `j`.
    #[inline]
    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        self.coords.iter().map(|c| (c[j] - c[i]) * (c[j] - c[i])).sum()
    }
}

/// Number of grid steps in `[0, horizon]`, requiring `horizon / grid_step` to be
/// an integer up to rounding.
pub fn grid_count(horizon: f64, grid_step: f64) -> Result<usize> {
    ensure!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive, got {horizon}");
    ensure!(grid_step > 0.0 && grid_step.is_finite(), "grid step must be positive, got {grid_step}");
    let ratio = horizon / grid_step;
    let n = ratio.round();
    ensure!(
        n >= 1.0 && (ratio - n).abs() <= 1e-9 * n,
        "horizon {horizon} is not an integer multiple of grid step {grid_step}"
    );
    Ok(n as usize)
}

/// Brownian motion sampled at `0, Δ, …, T`.
pub fn gen_gaussian_path(dim: usize, horizon: f64, grid_step: f64, seed: u64) -> Result<SampledPath> {
    check_dim(dim)?;
    let n = grid_count(horizon, grid_step)?;
    Ok(SampledPath::brownian(dim, n, grid_step, &mut rng_from_seed(seed)))
}

/// Coarse walk read off a finer one at the hitting times of a coarser grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub coarse: LatticePath,
    pub hit_indices: Vec<usize>,
    /// True when the fine walk ends after the last hit without reaching the next one.
    pub truncated: bool,
}

/// Extracts the level-`target_level` walk embedded in a one-dimensional walk of
/// level `n`: successive first moves by `2^(n - target_level)` fine units.
pub fn embed_coarse(fine: &LatticePath, target_level: u32) -> Result<Embedding> {
    ensure!(fine.dim() == 1, "coarse embedding needs a one-dimensional walk");
    let Some(n) = fine.level() else {
        return Err(Error::InvalidArgument("fine walk has no refinement level".into()));
    };
    ensure!(target_level < n, "target level {target_level} must be below the fine level {n}");
    ensure!(n - target_level < 31, "level gap too large");
    let unit = 1i32 << (n - target_level);
    let pos = fine.coords();
    let mut hits = vec![0usize];
    let mut coarse = vec![0i32];
    let mut anchor = 0i32;
    for (k, &p) in pos.iter().enumerate().skip(1) {
        if (p - anchor).abs() == unit {
            anchor = p;
            hits.push(k);
            coarse.push(p / unit);
        }
    }
    let truncated = *hits.last().unwrap() < fine.n_steps();
    Ok(Embedding {
        coarse: LatticePath { dim: 1, coords: coarse, level: Some(target_level) },
        hit_indices: hits,
        truncated,
    })
}

/// Breakpoints of a continuous piecewise-linear function on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearPath {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinearPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        ensure!(times.len() == values.len(), "times and values differ in length");
        ensure!(times.len() >= 2, "a piecewise-linear path needs at least two breakpoints");
        ensure!(times[0] == 0.0, "first breakpoint time must be 0");
        ensure!(
            times.iter().chain(&values).all(|x| x.is_finite()),
            "breakpoints must be finite"
        );
        ensure!(times.windows(2).all(|w| w[0] < w[1]), "breakpoint times must increase strictly");
        Ok(Self { times, values })
    }

    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(points.iter().map(|p| p.0).collect(), points.iter().map(|p| p.1).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_pieces(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Linear interpolation; `t` is clamped to `[0, T]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.horizon());
        let i = self.times.partition_point(|&x| x <= t).saturating_sub(1).min(self.n_pieces() - 1);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        if t == t0 {
            y0
        } else if t == t1 {
            y1
        } else {
            y0 + (y1 - y0) * (t - t0) / (t1 - t0)
        }
    }

    pub fn time_scaled(&self, c: f64) -> Result<Self> {
        ensure!(c > 0.0 && c.is_finite(), "time scale must be positive");
        Self::new(self.times.iter().map(|t| t * c).collect(), self.values.clone())
    }

    pub fn negated(&self) -> Self {
        Self { times: self.times.clone(), values: self.values.iter().map(|v| -v).collect() }
    }

    /// `t ↦ w(T - t)`.
    pub fn time_reversed(&self) -> Self {
        let t_end = self.horizon();
        let times = self.times.iter().rev().map(|t| t_end - t).collect();
        let values = self.values.iter().rev().copied().collect();
        Self { times, values }
    }

    /// The first `n_pieces` pieces.
    pub fn prefix(&self, n_pieces: usize) -> Self {
        let n = (n_pieces + 1).clamp(2, self.times.len());
        Self { times: self.times[..n].to_vec(), values: self.values[..n].to_vec() }
    }
}

/// Linear interpolation of a one-dimensional walk: breakpoint `k` sits at
/// `(k·time_scale, position_k·space_scale)`.
pub fn to_pl(walk: &LatticePath, time_scale: f64, space_scale: f64) -> Result<PiecewiseLinearPath> {
    ensure!(walk.dim() == 1, "only one-dimensional walks interpolate to a real-valued path");
    ensure!(time_scale > 0.0 && time_scale.is_finite(), "time scale must be positive");
    ensure!(space_scale > 0.0 && space_scale.is_finite(), "space scale must be positive");
    let times = (0..walk.len()).map(|k| k as f64 * time_scale).collect();
    let values = walk.coords().iter().map(|&p| p as f64 * space_scale).collect();
    PiecewiseLinearPath::new(times, values)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WalkJson {
    dim: usize,
    coords: Vec<i32>,
    #[serde(default)]
    level: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlJson {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl std::str::FromStr for PiecewiseLinearPath {
    type Err = Error;

    /// Accepts either `{"times": [...], "values": [...]}` or plain text with one
    /// `time value` pair per line (whitespace or comma separated, `#` comments).
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            let raw: PlJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
            return Self::new(raw.times, raw.values);
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
            if fields.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected `time value`", lineno + 1)));
            }
            let parse = |f: &str| {
                f.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            times.push(parse(fields[0])?);
            values.push(parse(fields[1])?);
        }
        Self::new(times, values)
    }
}
