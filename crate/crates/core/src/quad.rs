//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error meets `max(abs_tol, rel_tol·|value|)` or the subdivision budget runs
//! out; the latter is reported through [`Quadrature::converged`] rather than
//! silently accepted.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Tolerances and budgets for the moment integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Use variable changes and singularity subtraction near integrable
    /// endpoint singularities. Disabling them is only useful for diagnosis.
    pub singularity_substitutions: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 2000, singularity_substitutions: true }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.rel_tol > 0.0 && self.rel_tol.is_finite(), "rel_tol must be positive");
        ensure!(self.abs_tol > 0.0 && self.abs_tol.is_finite(), "abs_tol must be positive");
        ensure!(self.max_subdivisions >= 1, "max_subdivisions must be positive");
        Ok(())
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    /// Tighter tolerances for an integral nested inside another, with a smaller
    /// subdivision budget so that the total work stays bounded.
    pub(crate) fn inner(self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            max_subdivisions: (self.max_subdivisions / 8).max(32),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl Quadrature {
    fn zero() -> Self {
        Self { value: 0.0, abs_error: 0.0, converged: true, evaluations: 0 }
    }

    /// Sum of two independent integrals.
    pub fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self { value: self.value * c, abs_error: self.abs_error * c.abs(), ..self }
    }
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

/// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], …, XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// One 21-point Kronrod rule on `[a, b]`: (value, error estimate).
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, x) in XGK[..10].iter().enumerate() {
        let dx = h * x;
        let (f1, f2) = (f(c - dx), f(c + dx));
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let (res_k, res_abs, res_asc) = (res_k * h, res_abs * h.abs(), res_asc * h.abs());
    let mut err = ((res_k - res_g * h).abs()).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (res_k, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// `∫_a^b f`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Quadrature {
    integrate_breaks(f, &[a, b], cfg)
}

/// `∫ f` over `[points[0], points.last()]`, starting from the given subdivision.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], cfg: &QuadratureConfig) -> Quadrature {
    assert!(points.len() >= 2, "need at least one segment");
    let mut heap = BinaryHeap::new();
    let mut done = Quadrature::zero();
    let mut evals = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (value, err) = gk21(&mut f, w[0], w[1]);
        evals += 21;
        heap.push(Segment { a: w[0], b: w[1], value, err });
    }
    // Running sums decide when to stop; exact sums confirm before returning,
    // so accumulated rounding in the running error cannot end the loop early.
    let exact = |heap: &BinaryHeap<Segment>, done: &Quadrature| {
        (
            done.value + heap.iter().map(|s| s.value).sum::<f64>(),
            done.abs_error + heap.iter().map(|s| s.err).sum::<f64>(),
        )
    };
    let (mut total, mut err) = exact(&heap, &done);
    let mut splits = 0;
    loop {
        let target = |total: f64| cfg.abs_tol.max(cfg.rel_tol * total.abs());
        let finite = total.is_finite() && err.is_finite();
        if (err <= target(total) && finite) || heap.is_empty() || splits >= cfg.max_subdivisions || !finite {
            let (t, e) = exact(&heap, &done);
            let ok = t.is_finite() && e.is_finite() && e <= target(t);
            if ok || heap.is_empty() || splits >= cfg.max_subdivisions || !finite {
                return Quadrature { value: t, abs_error: e, converged: ok, evaluations: evals };
            }
            (total, err) = (t, e);
        }
        let s = heap.pop().unwrap();
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b || (s.b - s.a) < 1e-15 * s.a.abs().max(s.b.abs()) {
            // Cannot split further; keep the contribution and its error.
            done.value += s.value;
            done.abs_error += s.err;
            continue;
        }
        let (v1, e1) = gk21(&mut f, s.a, mid);
        let (v2, e2) = gk21(&mut f, mid, s.b);
        evals += 42;
        splits += 1;
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.err;
        heap.push(Segment { a: s.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: s.b, value: v2, err: e2 });
    }
}

/// Length of the truncated range for `e^{-t}`-weighted tails; the discarded
/// mass is at most `e^{-40}·sup|g|` beyond the cut.
pub const EXP_TAIL_CUT: f64 = 40.0;

/// `∫_a^∞ e^{-t} g(t) dt` for `g` of at most polynomial growth, integrated on
/// `[a, a + 40]` with the discarded tail added to the error estimate.
/// `breaks` are interior break points (ignored unless inside the range).
pub fn integrate_exp_tail<G: FnMut(f64) -> f64>(
    mut g: G,
    a: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Quadrature {
    let end = a + EXP_TAIL_CUT;
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < end));
    pts.push(end);
    pts.sort_by(f64::total_cmp);
    let tail = (-end).exp() * g(end).abs() * 2.0;
    let mut q = integrate_breaks(|t| (-t).exp() * g(t), &pts, cfg);
    q.abs_error += tail;
    q
}

/// Break points `a·2^k` up to `limit`, to help resolve `t^{-p}` behaviour near a small `a`.
pub fn geometric_breaks(a: f64, limit: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut x = 2.0 * a;
    while x < limit {
        v.push(x);
        x *= 2.0;
    }
    v
}
