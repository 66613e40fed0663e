//! Exact span sets of one-dimensional piecewise-linear paths.
//!
//! For two pieces `p` before `q` whose value ranges overlap on `[y_lo, y_hi]`,
//! both inverse maps `y ↦ s(y)`, `y ↦ t(y)` are affine when the pieces are
//! non-constant, so the spans `t(y) - s(y)` fill the segment between the values
//! at `y_lo` and `y_hi`. Constant pieces give a point or a full cell slice. The
//! sweep visits only value-overlapping pairs, found by sorting pieces by their
//! lower value.

use super::lattice::{lag_bitset_to_vec, Bitset};
use super::sets::IntervalSet;
use crate::error::{ensure, Result};
use crate::paths::{LatticePath, PiecewiseLinearPath};

/// Relative merge tolerance (times the horizon).
pub const MERGE_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy)]
struct Piece {
    t0: f64,
    t1: f64,
    y0: f64,
    y1: f64,
    lo: f64,
    hi: f64,
}

impl Piece {
    fn is_flat(&self) -> bool {
        self.y0 == self.y1
    }

    /// Time at which the piece takes value `y` (assumed inside its range).
    fn time_at(&self, y: f64) -> f64 {
        if y == self.y0 {
            self.t0
        } else if y == self.y1 {
            self.t1
        } else {
            let t = self.t0 + (y - self.y0) / (self.y1 - self.y0) * (self.t1 - self.t0);
            t.clamp(self.t0, self.t1)
        }
    }
}

/// Spans `t - s` with `s` on piece `p`, `t` on the later piece `q`.
fn cell(p: &Piece, q: &Piece) -> Option<[f64; 2]> {
    let y_lo = p.lo.max(q.lo);
    let y_hi = p.hi.min(q.hi);
    if y_lo > y_hi {
        return None;
    }
    let iv = match (p.is_flat(), q.is_flat()) {
        (true, true) => [q.t0 - p.t1, q.t1 - p.t0],
        (true, false) => {
            let t = q.time_at(p.y0);
            [t - p.t1, t - p.t0]
        }
        (false, true) => {
            let s = p.time_at(q.y0);
            [q.t0 - s, q.t1 - s]
        }
        (false, false) => {
            let h_lo = q.time_at(y_lo) - p.time_at(y_lo);
            let h_hi = q.time_at(y_hi) - p.time_at(y_hi);
            [h_lo.min(h_hi), h_lo.max(h_hi)]
        }
    };
    Some([iv[0].max(0.0), iv[1].max(0.0)])
}

/// `{t - s : w(s) = w(t), 0 ≤ s ≤ t ≤ T}` as a canonical interval set.
pub fn span_pl_1d(path: &PiecewiseLinearPath) -> IntervalSet {
    let (t, y) = (path.times(), path.values());
    let pieces: Vec<Piece> = (0..path.n_pieces())
        .map(|i| Piece {
            t0: t[i],
            t1: t[i + 1],
            y0: y[i],
            y1: y[i + 1],
            lo: y[i].min(y[i + 1]),
            hi: y[i].max(y[i + 1]),
        })
        .collect();
    let mut out = vec![[0.0, 0.0]];
    for p in &pieces {
        if p.is_flat() {
            out.push([0.0, p.t1 - p.t0]);
        }
    }
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_unstable_by(|&a, &b| pieces[a].lo.total_cmp(&pieces[b].lo));
    for (k, &i) in order.iter().enumerate() {
        let hi = pieces[i].hi;
        for &j in &order[k + 1..] {
            if pieces[j].lo > hi {
                break;
            }
            let (p, q) = if i < j { (&pieces[i], &pieces[j]) } else { (&pieces[j], &pieces[i]) };
            if let Some(iv) = cell(p, q) {
                out.push(iv);
            }
        }
    }
    IntervalSet::canonical(out, MERGE_REL_TOL * path.horizon())
}

/// Odd lags `|i - j|` between an up-crossing at step `i` and a down-crossing at
/// step `j` of the same unit edge, as a bitset over `0..n_steps`.
fn crossing_lags(walk: &LatticePath) -> Bitset {
    let pos = walk.coords();
    let n = walk.n_steps();
    let min = *pos.iter().min().unwrap();
    let max = *pos.iter().max().unwrap();
    let n_edges = (max - min) as usize;
    // Counting sort of steps by edge, ups and downs separately.
    let mut count = vec![0usize; 2 * n_edges + 1];
    let key = |k: usize| -> usize {
        let (a, b) = (pos[k], pos[k + 1]);
        let edge = (a.min(b) - min) as usize;
        2 * edge + usize::from(b < a)
    };
    for k in 0..n {
        count[key(k) + 1] += 1;
    }
    for i in 1..count.len() {
        count[i] += count[i - 1];
    }
    let mut fill = count.clone();
    let mut steps = vec![0usize; n];
    for k in 0..n {
        let c = &mut fill[key(k)];
        steps[*c] = k;
        *c += 1;
    }
    let mut bits = Bitset::new(n + 1);
    for e in 0..n_edges {
        let ups = &steps[count[2 * e]..count[2 * e + 1]];
        let downs = &steps[count[2 * e + 1]..count[2 * e + 2]];
        for &u in ups {
            for &d in downs {
                bits.set(u.abs_diff(d));
            }
        }
    }
    bits
}

/// Span set of the linearly interpolated one-dimensional walk with breakpoints
/// at multiples of `time_scale` (space scaling does not affect spans).
///
/// Same output as `span_pl_1d(&to_pl(walk, time_scale, 1.0))` but in
/// `O(N + Σ_e ups_e·downs_e)`: the span set is the integer lattice spans plus
/// `[m-1, m+1]` for every odd lag `m` between opposite crossings of one edge.
pub fn span_pl_walk(walk: &LatticePath, time_scale: f64) -> Result<IntervalSet> {
    ensure!(walk.dim() == 1, "interpolated walk spans need a one-dimensional walk");
    ensure!(time_scale > 0.0 && time_scale.is_finite(), "time scale must be positive");
    let lattice = super::lattice::span_lattice(walk);
    let odd = crossing_lags(walk);
    let mut out: Vec<[f64; 2]> = lattice.lags().iter().map(|&k| [k as f64 * time_scale; 2]).collect();
    out.extend(lag_bitset_to_vec(&odd).into_iter().map(|m| {
        [(m - 1) as f64 * time_scale, (m + 1) as f64 * time_scale]
    }));
    let horizon = walk.n_steps() as f64 * time_scale;
    Ok(IntervalSet::canonical(out, MERGE_REL_TOL * horizon))
}

/// Lebesgue measure of [`span_pl_walk`] without building the set: `2·|M|·time_scale`.
pub fn span_pl_walk_measure(walk: &LatticePath, time_scale: f64) -> Result<f64> {
    ensure!(walk.dim() == 1, "interpolated walk spans need a one-dimensional walk");
    ensure!(time_scale > 0.0 && time_scale.is_finite(), "time scale must be positive");
    Ok(2.0 * crossing_lags(walk).count() as f64 * time_scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{gen_srw, to_pl};

    fn pl(points: &[(f64, f64)]) -> PiecewiseLinearPath {
        PiecewiseLinearPath::from_points(points).unwrap()
    }

    #[test]
    fn tent_paths() {
        let f = pl(&[(0.0, 0.0), (0.25, 0.25), (0.75, -0.25), (1.0, 0.0)]);
        assert_eq!(span_pl_1d(&f).intervals(), &[[0.0, 0.5], [1.0, 1.0]]);
        let n = 8.0;
        let fn_ = pl(&[(0.0, 0.0), (0.25, 0.25), (0.75, -0.25), (1.0, -1.0 / (4.0 * n))]);
        assert_eq!(span_pl_1d(&fn_).intervals(), &[[0.0, 0.5]]);
    }

    #[test]
    fn injective_and_constant() {
        assert_eq!(span_pl_1d(&pl(&[(0.0, 0.0), (1.0, 1.0)])).intervals(), &[[0.0, 0.0]]);
        assert_eq!(span_pl_1d(&pl(&[(0.0, 0.0), (2.0, 0.0)])).intervals(), &[[0.0, 2.0]]);
        let plateau = pl(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 0.0)]);
        assert_eq!(span_pl_1d(&plateau).intervals(), &[[0.0, 3.0]]);
    }

    #[test]
    fn flat_piece_against_sloped() {
        let piece = |t0: f64, t1: f64, y0: f64, y1: f64| Piece { t0, t1, y0, y1, lo: y0.min(y1), hi: y0.max(y1) };
        let flat = piece(1.0, 2.0, 1.0, 1.0);
        let up = piece(3.0, 4.0, 0.0, 2.0);
        assert_eq!(cell(&flat, &up), Some([1.5, 2.5]));
        assert_eq!(cell(&up, &piece(5.0, 7.0, 1.0, 1.0)), Some([1.5, 3.5]));
        assert_eq!(cell(&flat, &piece(3.0, 4.0, 1.0, 1.0)), Some([1.0, 3.0]));
        assert_eq!(cell(&flat, &piece(3.0, 4.0, 2.0, 2.0)), None);
        // Equal slopes give a single lag.
        assert_eq!(cell(&up, &piece(6.0, 7.0, 0.0, 2.0)), Some([3.0, 3.0]));
        let whole = pl(&[(0.0, 0.0), (0.5, 1.0), (1.0, 1.0), (2.0, 2.0), (3.0, 0.0)]);
        assert_eq!(span_pl_1d(&whole).intervals(), &[[0.0, 3.0]]);
    }

    #[test]
    fn walk_fast_path_matches_generic() {
        for seed in 0..40 {
            let w = gen_srw(1, 1 + (seed as usize * 37) % 400, seed).unwrap();
            let generic = span_pl_1d(&to_pl(&w, 1.0, 1.0).unwrap());
            let fast = span_pl_walk(&w, 1.0).unwrap();
            assert_eq!(generic, fast, "seed {seed}");
            assert_eq!(span_pl_walk_measure(&w, 1.0).unwrap(), generic.measure());
        }
    }
}
