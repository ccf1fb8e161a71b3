//! Adaptive Gauss–Kronrod quadrature on sub-intervals of (0, 1).
//!
//! Interior pieces are integrated in the logit variable `x = ln(p / (1 - p))`,
//! which spreads the endpoint regions out. Pieces touching an endpoint are
//! mapped to a half line (`q = e^{-t}` at the lower end, `q = 1 - e^{-t}` at
//! the upper end) and integrated panel by panel until the contribution of a
//! panel is negligible relative to the accumulated value.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::prob::Prob;

/// Tolerances and budget for one quadrature call.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            max_evals: 1_000_000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Truncation threshold for half-line panels, relative to the running total.
const TAIL_NEGLIGIBLE: f64 = 1e-14;
/// Beyond this many units of `t` the substitution variable underflows.
const TAIL_T_MAX: f64 = 700.0;

struct Budget {
    used: usize,
    max: usize,
}

/// Kronrod value, error estimate and the Kronrod integral of `|g|`.
fn gk15<F: FnMut(f64) -> f64>(g: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g(c);
    let mut k = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = g(c - dx);
        let f2 = g(c + dx);
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - gauss) * h).abs(), abs * h.abs())
}

/// Error estimates below this multiple of `ε·∫|g|` are rounding noise.
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

#[derive(PartialEq)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration of `g` over the finite interval `[a, b]`.
fn adaptive<F: FnMut(f64) -> f64>(
    g: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    budget: &mut Budget,
    report: (f64, f64),
) -> Result<f64> {
    let (v, e, abs) = gk15(g, a, b);
    budget.used += 15;
    if !v.is_finite() {
        return Err(Error::DivergentIntegral {
            a: report.0,
            b: report.1,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, err: e, abs });
    let mut total = v;
    let mut total_err = e;
    let mut total_abs = abs;
    loop {
        if total_err <= (rel_tol * total.abs()).max(abs_tol).max(ROUNDOFF * total_abs) {
            return Ok(total);
        }
        if budget.used >= budget.max {
            return Err(Error::QuadratureTolerance {
                a: report.0,
                b: report.1,
                evaluations: budget.used,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(total);
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point; accept it.
            total_err -= worst.err;
            heap.push(Piece { err: 0.0, ..worst });
            if heap.iter().all(|p| p.err == 0.0) {
                return Ok(total);
            }
            continue;
        }
        let (v1, e1, a1) = gk15(g, worst.a, mid);
        let (v2, e2, a2) = gk15(g, mid, worst.b);
        budget.used += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::DivergentIntegral {
                a: report.0,
                b: report.1,
            });
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        total_abs += a1 + a2 - worst.abs;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1, abs: a1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2, abs: a2 });
    }
}

/// Which endpoint a half-line piece runs into.
#[derive(Clone, Copy)]
enum Tail {
    Lower,
    Upper,
}

/// Integrates `f` from `start` to the endpoint named by `tail`, with `t0` the
/// starting value of the substitution variable.
fn half_line<F: Fn(Prob) -> f64>(
    f: &F,
    tail: Tail,
    t0: f64,
    cfg: &QuadConfig,
    budget: &mut Budget,
    report: (f64, f64),
) -> Result<f64> {
    // Both substitutions have Jacobian e^{-t}.
    let point = |t: f64| -> Prob {
        let small = (-t).exp();
        let large = -(-t).exp_m1();
        match tail {
            Tail::Lower => Prob::from_parts(small, large),
            Tail::Upper => Prob::from_parts(large, small),
        }
    };
    let saturated = std::cell::Cell::new(false);
    let mut g = |t: f64| {
        let pr = point(t);
        let v = f(pr) * (-t).exp();
        // Past the resolution of p some models cannot be evaluated. Such
        // points are dropped and the panel loop decides whether that is safe.
        if !v.is_finite() && (pr.value() == 1.0 || pr.complement() == 1.0) {
            saturated.set(true);
            0.0
        } else {
            v
        }
    };
    let mut acc = 0.0_f64;
    let mut t = t0;
    let mut width = 0.5_f64;
    let mut quiet = 0;
    loop {
        let hi = t + width;
        let panel = adaptive(&mut g, t, hi, cfg.rel_tol, 0.0, budget, report)?;
        let previous = acc;
        acc += panel;
        if saturated.get() {
            // Points were dropped; accept only if the tail had already died out.
            if panel.abs() <= 1e-10 * previous.abs() {
                return Ok(acc);
            }
            return Err(Error::DivergentIntegral {
                a: report.0,
                b: report.1,
            });
        }
        let negligible = panel.abs() <= TAIL_NEGLIGIBLE * acc.abs() || (panel == 0.0 && acc == 0.0);
        quiet = if negligible { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return Ok(acc);
        }
        t = hi;
        if t > TAIL_T_MAX {
            return Err(Error::DivergentIntegral {
                a: report.0,
                b: report.1,
            });
        }
        width = (width * 2.0).min(16.0);
    }
}

/// Integral over `[a, b]` in the logit variable, for `0 < a < b < 1`.
fn logit_piece<F: Fn(Prob) -> f64>(
    f: &F,
    a: Prob,
    b: Prob,
    cfg: &QuadConfig,
    budget: &mut Budget,
) -> Result<f64> {
    let mut g = |x: f64| {
        let pr = Prob::from_logit(x);
        f(pr) * pr.value() * pr.complement()
    };
    adaptive(
        &mut g,
        a.logit(),
        b.logit(),
        cfg.rel_tol,
        0.0,
        budget,
        (a.value(), b.value()),
    )
}

/// `∫_0^p f(q) dq`.
pub fn integrate_from_zero<F: Fn(Prob) -> f64>(f: &F, p: Prob, cfg: &QuadConfig) -> Result<f64> {
    let mut budget = Budget {
        used: 0,
        max: cfg.max_evals,
    };
    half_line(f, Tail::Lower, -p.value().ln(), cfg, &mut budget, (0.0, p.value()))
}

/// `∫_p^1 f(q) dq`.
pub fn integrate_to_one<F: Fn(Prob) -> f64>(f: &F, p: Prob, cfg: &QuadConfig) -> Result<f64> {
    let mut budget = Budget {
        used: 0,
        max: cfg.max_evals,
    };
    half_line(f, Tail::Upper, -p.complement().ln(), cfg, &mut budget, (p.value(), 1.0))
}

/// `∫_a^b f(q) dq` for interior limits.
pub fn integrate_between<F: Fn(Prob) -> f64>(
    f: &F,
    a: Prob,
    b: Prob,
    cfg: &QuadConfig,
) -> Result<f64> {
    let mut budget = Budget {
        used: 0,
        max: cfg.max_evals,
    };
    if a.value() >= b.value() {
        return Ok(0.0);
    }
    logit_piece(f, a, b, cfg, &mut budget)
}

/// `∫_a^b f(q) dq` for `0 ≤ a < b ≤ 1`. Endpoint singularities are allowed.
///
/// Fails with [`Error::DivergentIntegral`] when the integral does not
/// converge and [`Error::QuadratureTolerance`] when the evaluation budget is
/// exhausted first.
pub fn quadrature<F: Fn(Prob) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a) || !(b > a && b <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature limits must satisfy 0 <= a < b <= 1, got [{a}, {b}]"
        )));
    }
    let cfg = QuadConfig {
        rel_tol,
        ..QuadConfig::default()
    };
    let half = Prob::from_parts(0.5, 0.5);
    match (a == 0.0, b == 1.0) {
        (true, true) => Ok(integrate_from_zero(&f, half, &cfg)? + integrate_to_one(&f, half, &cfg)?),
        (true, false) => integrate_from_zero(&f, Prob::new(b)?, &cfg),
        (false, true) => integrate_to_one(&f, Prob::new(a)?, &cfg),
        (false, false) => integrate_between(&f, Prob::new(a)?, Prob::new(b)?, &cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn polynomial_is_exact() {
        let v = quadrature(|q| q.value() * q.value(), 0.0, 1.0, 1e-12).unwrap();
        assert!(close(v, 1.0 / 3.0, 1e-13));
    }

    #[test]
    fn singular_lower_end() {
        let v = quadrature(|q| q.value().powf(-0.9), 0.0, 1.0, 1e-10).unwrap();
        assert!(close(v, 10.0, 1e-9), "{v}");
    }

    #[test]
    fn log_singularity_upper_end() {
        let v = quadrature(|q| -q.complement().ln(), 0.0, 1.0, 1e-10).unwrap();
        assert!(close(v, 1.0, 1e-10), "{v}");
    }

    #[test]
    fn harmonic_divergence_is_detected() {
        let r = quadrature(|q| q.value() / q.complement(), 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::DivergentIntegral { .. })), "{r:?}");
    }

    #[test]
    fn partial_harmonic() {
        let v = quadrature(|q| q.value() / q.complement(), 0.0, 0.5, 1e-10).unwrap();
        assert!(close(v, 2f64.ln() - 0.5, 1e-10), "{v}");
    }

    #[test]
    fn interior_piece() {
        let v = quadrature(|q| q.value().cos(), 0.25, 0.75, 1e-12).unwrap();
        assert!(close(v, 0.75f64.sin() - 0.25f64.sin(), 1e-12));
    }

    #[test]
    fn bad_limits() {
        assert!(quadrature(|_| 1.0, 0.5, 0.5, 1e-8).is_err());
        assert!(quadrature(|_| 1.0, -0.1, 0.5, 1e-8).is_err());
    }
}
