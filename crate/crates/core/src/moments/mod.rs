//! Moments of the approximate span measure
//! `M_{d,ε}(A) = ∬_{0≤s≤t≤ξ} 1(t-s ∈ A, |B_t - B_s| ≤ ε) ds dt`, `ξ ~ Exp(1)`:
//! first moments (exact and as `ε → 0`), the `ε, δ → 0` limit of the mixed
//! second moment, upper bounds on its α-energy, and direct simulation.
//!
//! Second moment. Writing `c = (2^{d/2} Γ(d/2+1))^{-1}` and, for the
//! `ε^{-d} δ^{-d}`-scaled product over `[a, ∞) × [b, ∞)` with `b ≤ a`,
//! the limit is `c² (C1 + C2 + C3)` summed over all relative orders of the two
//! time pairs:
//! * disjoint pairs (two orders): `C1 = 2 I(a) I(b)`, `I(x) = ∫_x^∞ e^{-t} t^{-d/2} dt`;
//! * nested pairs (either pair inside the other): `C2 = J(a, b) + J(a, a)` with
//!   `J(x, y) = ∫_{p≥x} e^{-p} ∫_{y≤q≤p} q^{-d/2} (p-q)^{1-d/2} dq dp`;
//! * interlaced pairs (two orders): `C3 = 2 K(a, b)` with
//!   `K(a, b) = ∫_{p≥a, q≥b} e^{-(p+q)} ∫_0^{p∧q} e^r (pq - r²)^{-d/2} dr dq dp`.
//!
//! `K` is evaluated in the coordinates `m = p∧q`, `g = |p - q|`; the inner
//! `r`-integral has its `(pq - r²)^{-d/2}` blow-up at `r = m`, `g = 0`
//! subtracted in closed form, and `g = v²` absorbs the remaining
//! `log g` / `g^{-1/2}` behaviour.

mod mc;

pub use mc::{count_close_pairs, mc_span_measure, McMode};

use std::cell::Cell;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::quad::{geometric_breaks, integrate, integrate_breaks, integrate_exp_tail, Quadrature, QuadratureConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentPiece {
    pub name: String,
    pub value: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentResult {
    pub value: f64,
    pub est_error: f64,
    pub converged: bool,
    /// Per-case contributions (second moments only); they sum to `value`.
    pub pieces: Vec<MomentPiece>,
}

impl MomentResult {
    fn single(q: Quadrature, scale: f64) -> Self {
        let q = q.scaled(scale);
        Self { value: q.value, est_error: q.abs_error, converged: q.converged, pieces: Vec::new() }
    }

    /// Turns a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence(format!(
                "value {} with estimated error {}",
                self.value, self.est_error
            )))
        }
    }
}

fn check_d(d: usize) -> Result<()> {
    ensure!(d == 2 || d == 3, "dimension must be 2 or 3, got {d}");
    Ok(())
}

/// `(2^{d/2} Γ(d/2 + 1))^{-1}`: ball volume times the heat kernel at the origin.
pub fn ball_constant(d: usize) -> f64 {
    match d {
        2 => 0.5,
        3 => 1.0 / (2.0f64.powf(1.5) * 0.75 * PI.sqrt()),
        _ => panic!("dimension must be 2 or 3"),
    }
}

/// Collects convergence flags of nested integrals. Converged inner integrals
/// meet their relative tolerance, which bounds their share of the outer error.
struct Nested {
    ok: Cell<bool>,
    inner_rel_tol: f64,
}

impl Nested {
    fn new(inner: &QuadratureConfig) -> Self {
        Self { ok: Cell::new(true), inner_rel_tol: inner.rel_tol }
    }

    fn take(&self, q: Quadrature) -> f64 {
        if !q.converged {
            self.ok.set(false);
        }
        q.value
    }

    /// Folds the inner accounting into an outer result.
    fn finish(&self, mut q: Quadrature) -> Quadrature {
        q.converged &= self.ok.get();
        q.abs_error += q.value.abs() * self.inner_rel_tol;
        q
    }
}

/// `E M_{d,ε}([a, ∞))` without the `ε → 0` approximation.
pub fn m1_exact(d: usize, a: f64, eps: f64, cfg: &QuadratureConfig) -> Result<MomentResult> {
    check_d(d)?;
    cfg.validate()?;
    ensure!(a > 0.0 && a.is_finite(), "a must be positive");
    ensure!(eps > 0.0 && eps.is_finite(), "eps must be positive");
    let e2 = eps * eps;
    let q = match d {
        // P(|N(0, t I_2)| ≤ ε) = 1 - e^{-ε²/2t}.
        2 => integrate_exp_tail(|t| -(-e2 / (2.0 * t)).exp_m1(), a, &[], cfg),
        _ => {
            let inner_cfg = cfg.inner(0.1);
            let nested = Nested::new(&inner_cfg);
            let ball = |t: f64| {
                let radial = integrate(|x| x * x * (-e2 * x * x / (2.0 * t)).exp(), 0.0, 1.0, &inner_cfg);
                nested.take(radial) * 4.0 * PI * eps.powi(3) / (2.0 * PI * t).powf(1.5)
            };
            let q = integrate_exp_tail(ball, a, &[], cfg);
            nested.finish(q)
        }
    };
    Ok(MomentResult::single(q, 1.0))
}

/// `I(x) = ∫_x^∞ e^{-t} t^{-d/2} dt`.
fn tail_integral(d: usize, x: f64, cfg: &QuadratureConfig) -> Quadrature {
    let p = d as f64 / 2.0;
    integrate_exp_tail(|t| t.powf(-p), x, &geometric_breaks(x, x + 1.0), cfg)
}

/// Limit of `ε^{-d} E M_{d,ε}([a, ∞))` as `ε → 0`: `c ∫_a^∞ e^{-t} t^{-d/2} dt`.
pub fn m1_asymptotic(d: usize, a: f64, cfg: &QuadratureConfig) -> Result<MomentResult> {
    check_d(d)?;
    cfg.validate()?;
    if a <= 0.0 {
        return Err(Error::Divergent(format!("∫_a^∞ e^(-t) t^(-{d}/2) dt diverges for a = {a} ≤ 0")));
    }
    ensure!(a.is_finite(), "a must be finite");
    Ok(MomentResult::single(tail_integral(d, a, cfg), ball_constant(d)))
}

/// `J(x, y)` for `x ≥ y`: the nested-pairs integral with the inner `q`
/// integral in closed form, `log(p/y)` (d = 2) or `2√(p-y)/(p√y)` (d = 3).
fn nested_integral(d: usize, x: f64, y: f64, cfg: &QuadratureConfig) -> Quadrature {
    let phi = |p: f64| match d {
        2 => (p / y).ln(),
        _ => 2.0 * (p - y).max(0.0).sqrt() / (p * y.sqrt()),
    };
    if cfg.singularity_substitutions {
        // p = y + v² straightens the square root at p = y.
        let (v0, v1) = ((x - y).sqrt(), (x + 1.0 - y).sqrt());
        let head = integrate(
            |v| {
                let p = y + v * v;
                2.0 * v * (-p).exp() * phi(p)
            },
            v0,
            v1,
            cfg,
        );
        head.plus(integrate_exp_tail(phi, x + 1.0, &[], cfg))
    } else {
        integrate_exp_tail(phi, x, &[], cfg)
    }
}

/// `e^{-m} ∫_0^m e^r (m(m+g) - r²)^{-d/2} dr`.
fn interlace_inner(d: usize, m: f64, g: f64, cfg: &QuadratureConfig, nested: &Nested) -> f64 {
    let dp = d as f64 / 2.0;
    if !cfg.singularity_substitutions {
        let c2 = m * (m + g);
        let q = integrate(|r| (r - m).exp() * (c2 - r * r).powf(-dp), 0.0, m, cfg);
        return nested.take(q);
    }
    let mg = m * g;
    let c2 = m * (m + g);
    let c = c2.sqrt();
    // Integrals of 1 and (r - m) against (c² - r²)^{-d/2} over [0, m].
    let head = match d {
        2 => {
            let phi0 = ((c + m) * (c + m) / mg).ln() / (2.0 * c);
            (1.0 - m) * phi0 + 0.5 * ((m + g) / g).ln()
        }
        _ => {
            let s = mg.sqrt();
            m / (c2 * s) + s / c2 - 1.0 / c
        }
    };
    // Remainder e^{r-m} - 1 - (r - m) with r = m - y².
    let rem = |y: f64| {
        let y2 = y * y;
        let den = y2 * (2.0 * m - y2) + mg;
        2.0 * y * ((-y2).exp_m1() + y2) / den.powf(dp)
    };
    let top = m.sqrt();
    let knee = g.sqrt().min(0.5 * top);
    let q = integrate_breaks(rem, &[0.0, knee, top], cfg);
    head + nested.take(q)
}

/// `∫_{g0}^∞ e^{-g} e^{-m} I(m, m+g) dg`.
fn interlace_gap(d: usize, m: f64, g0: f64, cfg: &QuadratureConfig, nested: &Nested) -> f64 {
    let inner_cfg = cfg.inner(0.1);
    let q = if cfg.singularity_substitutions {
        let head = integrate(
            |v| 2.0 * v * (-v * v).exp() * interlace_inner(d, m, v * v, &inner_cfg, nested),
            g0.sqrt(),
            (g0 + 1.0).sqrt(),
            cfg,
        );
        head.plus(integrate_exp_tail(|g| interlace_inner(d, m, g, &inner_cfg, nested), g0 + 1.0, &[], cfg))
    } else {
        integrate_exp_tail(|g| interlace_inner(d, m, g, &inner_cfg, nested), g0, &[], cfg)
    };
    nested.take(q)
}

/// `K(a, b)` for `b ≤ a`.
fn interlaced_integral(d: usize, a: f64, b: f64, cfg: &QuadratureConfig) -> Quadrature {
    let inner_cfg = cfg.inner(0.1);
    let nested = Nested::new(&inner_cfg);
    let h = |m: f64, g0: f64| interlace_gap(d, m, g0, &inner_cfg, &nested);
    // m ∈ [b, a): q = m is the smaller coordinate and p ≥ a; m = a - w² smooths the
    // lower limit g0 = a - m as it approaches 0.
    let low = if a > b {
        if cfg.singularity_substitutions {
            integrate(|w| 2.0 * w * (-(a - w * w)).exp() * h(a - w * w, w * w), 0.0, (a - b).sqrt(), cfg)
        } else {
            integrate(|m| (-m).exp() * h(m, a - m), b, a, cfg)
        }
    } else {
        Quadrature { value: 0.0, abs_error: 0.0, converged: true, evaluations: 0 }
    };
    // m ≥ a: either coordinate may be the smaller one.
    let high = integrate_exp_tail(|m| 2.0 * h(m, 0.0), a, &geometric_breaks(a, a + 1.0), cfg);
    nested.finish(low.plus(high))
}

/// The `ε, δ → 0` limit of `E[ε^{-d} M_{d,ε}([a,∞)) · δ^{-d} M_{d,δ}([b,∞))]`
/// for `0 < b ≤ a`, split into disjoint, nested and interlaced contributions.
pub fn m2_limit(d: usize, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<MomentResult> {
    check_d(d)?;
    cfg.validate()?;
    ensure!(b > 0.0 && b.is_finite() && a.is_finite(), "a and b must be positive");
    ensure!(b <= a, "b = {b} must not exceed a = {a}");
    let c2 = ball_constant(d).powi(2);
    let (ia, ib) = (tail_integral(d, a, cfg), tail_integral(d, b, cfg));
    let case1 = Quadrature {
        value: 2.0 * ia.value * ib.value,
        abs_error: 2.0 * (ia.abs_error * ib.value.abs() + ib.abs_error * ia.value.abs()),
        converged: ia.converged && ib.converged,
        evaluations: ia.evaluations + ib.evaluations,
    };
    let case2 = nested_integral(d, a, b, cfg).plus(nested_integral(d, a, a, cfg));
    let case3 = interlaced_integral(d, a, b, cfg).scaled(2.0);
    let named = [("case1_disjoint", case1), ("case2_nested", case2), ("case3_interlaced", case3)];
    let pieces: Vec<MomentPiece> = named
        .iter()
        .map(|(name, q)| MomentPiece { name: (*name).into(), value: c2 * q.value, est_error: c2 * q.abs_error })
        .collect();
    Ok(MomentResult {
        value: pieces.iter().map(|p| p.value).sum(),
        est_error: pieces.iter().map(|p| p.est_error).sum(),
        converged: named.iter().all(|(_, q)| q.converged),
        pieces,
    })
}

/// Upper bound on `E ∬_{a,b ≥ l} |a-b|^{-α} M_d(da) M_d(db)` from the explicit
/// bounding integrands over `a ≥ b ≥ l`; finite exactly for `α < 2 - d/2`.
pub fn energy_bound(d: usize, l: f64, alpha: f64, cfg: &QuadratureConfig) -> Result<MomentResult> {
    check_d(d)?;
    cfg.validate()?;
    ensure!(l > 0.0 && l.is_finite(), "l must be positive");
    ensure!(alpha >= 0.0, "alpha must be nonnegative");
    let threshold = 2.0 - d as f64 / 2.0;
    if alpha >= threshold {
        return Err(Error::Divergent(format!(
            "the energy integral diverges for alpha = {alpha} ≥ {threshold} in dimension {d}"
        )));
    }
    // Bracket terms as coefficients of powers of s, without the e^{-b} e^{-s}
    // weight: d = 2 gives (s^{-α} [A - B log s]), d = 3 gives
    // (s^{-α} C + s^{-1/2-α} E).
    let terms = |b: f64, s: f64| -> [f64; 2] {
        let a = b + s;
        let c1 = 2.0 * (-b).exp() / (a * b);
        match d {
            2 => {
                let root = 2.0 / (a * b).sqrt();
                [0.5 * (c1 + 1.0 / b + root * 2.0 * (a.sqrt() + b.sqrt()).ln()), 0.5 * root]
            }
            _ => {
                let pre = 4.0 / (9.0 * PI);
                [pre * c1, pre * (1.0 / b.powf(1.5) + 2.0 / (a * b.sqrt()))]
            }
        }
    };
    let plain = |b: f64, s: f64| -> f64 {
        let [x, y] = terms(b, s);
        match d {
            2 => s.powf(-alpha) * (x - y * s.ln()),
            _ => s.powf(-alpha) * x + s.powf(-0.5 - alpha) * y,
        }
    };
    // Near s = 0 the worst power is s^{-γ} (times log s for d = 2); with
    // s = z^p, p = 2/(1-γ), the Jacobian cancels it down to a factor z.
    let gamma = if d == 2 { alpha } else { 0.5 + alpha };
    let p = 2.0 / (1.0 - gamma);
    let substituted = |b: f64, z: f64| -> f64 {
        let s = z.powf(p);
        let [x, y] = terms(b, s);
        let body = match d {
            2 => x - y * p * z.ln(),
            _ => x * z.powf(p * (1.0 - alpha) - 2.0) + y,
        };
        p * z * (-s).exp() * body
    };
    let inner_cfg = cfg.inner(0.1);
    let nested = Nested::new(&inner_cfg);
    let over_s = |b: f64| -> f64 {
        let head = if cfg.singularity_substitutions {
            integrate(|z| if z == 0.0 { 0.0 } else { substituted(b, z) }, 0.0, 1.0, &inner_cfg)
        } else {
            integrate(|s| (-s).exp() * plain(b, s), 0.0, 1.0, &inner_cfg)
        };
        let tail = integrate_exp_tail(|s| plain(b, s), 1.0, &[], &inner_cfg);
        nested.take(head.plus(tail))
    };
    let q = integrate_exp_tail(over_s, l, &geometric_breaks(l, l + 1.0), cfg);
    Ok(MomentResult::single(nested.finish(q), 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_constants() {
        assert_eq!(ball_constant(2), 0.25f64.sqrt());
        assert!((ball_constant(3).powi(2) - 2.0 / (9.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn m1_saturates_for_large_eps() {
        let cfg = QuadratureConfig::default();
        let r = m1_exact(2, 1.0, 1e4, &cfg).unwrap();
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn m1_asymptotic_rejects_nonpositive_a() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(m1_asymptotic(2, 0.0, &cfg), Err(Error::Divergent(_))));
        assert!(m1_asymptotic(4, 1.0, &cfg).is_err());
        let small = m1_asymptotic(2, 1e-6, &cfg).unwrap().value;
        assert!(small > m1_asymptotic(2, 1e-3, &cfg).unwrap().value);
    }

    #[test]
    fn nested_closed_form_d3() {
        // J(x, y) = 2/√y ∫_x^∞ e^{-p} √(p-y)/p dp against a plain evaluation.
        let cfg = QuadratureConfig::default();
        let j = nested_integral(3, 1.0, 0.5, &cfg).value;
        let plain = integrate_exp_tail(|p| 2.0 * (p - 0.5f64).sqrt() / (p * 0.5f64.sqrt()), 1.0, &[], &cfg).value;
        assert!((j - plain).abs() < 1e-10 * plain);
    }

    #[test]
    fn interlace_inner_matches_plain_quadrature() {
        let cfg = QuadratureConfig { rel_tol: 1e-11, ..Default::default() };
        let plain_cfg = QuadratureConfig { singularity_substitutions: false, ..cfg };
        for d in [2, 3] {
            for &(m, g) in &[(0.5, 0.3), (1.0, 2.0), (2.0, 0.05), (0.7, 5.0)] {
                let n = Nested::new(&cfg);
                let fast = interlace_inner(d, m, g, &cfg, &n);
                let plain = interlace_inner(d, m, g, &plain_cfg, &n);
                assert!((fast - plain).abs() < 1e-8 * plain, "d={d} m={m} g={g}: {fast} vs {plain}");
            }
        }
    }

    #[test]
    fn energy_threshold() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(energy_bound(2, 1.0, 1.0, &cfg), Err(Error::Divergent(_))));
        assert!(matches!(energy_bound(3, 1.0, 0.5, &cfg), Err(Error::Divergent(_))));
        assert!(energy_bound(2, 1.0, -0.1, &cfg).is_err());
        assert!(energy_bound(3, 0.5, 0.49, &cfg).unwrap().converged);
    }
}
