//! One-sided limits at the endpoints of (0, 1).
//!
//! A limit is either supplied by an analytic hint (closed-form endpoint
//! asymptotics of built-in models) or estimated from the sequence of values at
//! distances `2^-k`, `k = 8..=40`, from the endpoint.

use crate::prob::Prob;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Zero,
    One,
}

impl Endpoint {
    /// The probability at distance `eps` from this endpoint.
    pub fn at(self, eps: f64) -> Prob {
        match self {
            Endpoint::Zero => Prob::from_parts(eps, 1.0 - eps),
            Endpoint::One => Prob::from_parts(1.0 - eps, eps),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Endpoint::Zero => "0+",
            Endpoint::One => "1-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKind {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Indeterminate,
}

impl LimitKind {
    /// Maps an extended real to a limit kind. NaN becomes indeterminate.
    pub fn from_extended(v: f64) -> LimitKind {
        if v.is_nan() {
            LimitKind::Indeterminate
        } else if v == f64::INFINITY {
            LimitKind::PlusInfinity
        } else if v == f64::NEG_INFINITY {
            LimitKind::MinusInfinity
        } else {
            LimitKind::Finite(v)
        }
    }

    /// The limit as an extended real; indeterminate becomes NaN.
    pub fn as_extended(self) -> f64 {
        match self {
            LimitKind::Finite(v) => v,
            LimitKind::PlusInfinity => f64::INFINITY,
            LimitKind::MinusInfinity => f64::NEG_INFINITY,
            LimitKind::Indeterminate => f64::NAN,
        }
    }

    pub fn is_determinate(self) -> bool {
        !matches!(self, LimitKind::Indeterminate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMethod {
    AnalyticHint,
    Extrapolation,
}

impl LimitMethod {
    pub fn label(self) -> &'static str {
        match self {
            LimitMethod::AnalyticHint => "analytic-hint",
            LimitMethod::Extrapolation => "extrapolation",
        }
    }
}

/// Outcome of a one-sided limit evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitValue {
    pub kind: LimitKind,
    pub method: LimitMethod,
    /// `(distance from the endpoint, value)` pairs that were evaluated.
    pub diagnostics: Vec<(f64, f64)>,
}

impl LimitValue {
    pub fn hinted(kind: LimitKind) -> Self {
        LimitValue {
            kind,
            method: LimitMethod::AnalyticHint,
            diagnostics: Vec::new(),
        }
    }
}

const K_FIRST: i32 = 8;
const K_LAST: i32 = 40;
/// Successive extrapolants must agree to this relative tolerance.
const CAUCHY_REL: f64 = 1e-9;
/// Absolute floor for the Cauchy test, for limits equal to zero.
const CAUCHY_ABS: f64 = 1e-12;
/// Magnitude beyond which monotone growth counts as divergence.
const DIVERGENCE_MAGNITUDE: f64 = 1e12;

/// Evaluates the one-sided limit of `f` at `end`.
///
/// A supplied hint is returned as is. Otherwise the limit is estimated by
/// Aitken extrapolation of the values at `2^-k`, with explicit detection of
/// monotone divergence; sequences matching neither pattern are indeterminate.
pub fn limit_at<F: Fn(Prob) -> f64>(f: F, end: Endpoint, hint: Option<LimitKind>) -> LimitValue {
    if let Some(kind) = hint {
        return LimitValue::hinted(kind);
    }
    let diagnostics: Vec<(f64, f64)> = (K_FIRST..=K_LAST)
        .map(|k| {
            let eps = 2f64.powi(-k);
            (eps, f(end.at(eps)))
        })
        .collect();
    let values: Vec<f64> = diagnostics.iter().map(|d| d.1).collect();
    LimitValue {
        kind: classify_sequence(&values),
        method: LimitMethod::Extrapolation,
        diagnostics,
    }
}

/// Classifies a sequence of values approaching a limit.
pub fn classify_sequence(values: &[f64]) -> LimitKind {
    // Infinite values at the tail count as divergence when their sign is stable.
    let finite_len = values.iter().take_while(|v| v.is_finite()).count();
    if finite_len < values.len() {
        let tail = &values[finite_len..];
        if tail.iter().all(|v| *v == f64::INFINITY) {
            return LimitKind::PlusInfinity;
        }
        if tail.iter().all(|v| *v == f64::NEG_INFINITY) {
            return LimitKind::MinusInfinity;
        }
        if finite_len < 12 {
            return LimitKind::Indeterminate;
        }
    }
    let s = &values[..finite_len];
    if let Some(kind) = divergence(s) {
        return kind;
    }
    aitken_limit(s).map_or(LimitKind::Indeterminate, LimitKind::Finite)
}

fn divergence(s: &[f64]) -> Option<LimitKind> {
    let n = s.len();
    if n < 8 {
        return None;
    }
    let signed = |v: f64| {
        if v > 0.0 {
            LimitKind::PlusInfinity
        } else {
            LimitKind::MinusInfinity
        }
    };
    let growing = |w: &[f64]| {
        let same_sign = w.iter().all(|v| *v > 0.0) || w.iter().all(|v| *v < 0.0);
        same_sign && w.windows(2).all(|p| p[1].abs() > p[0].abs())
    };

    // Large and still growing.
    let last5 = &s[n - 5..];
    if growing(last5) && last5.iter().all(|v| v.abs() > DIVERGENCE_MAGNITUDE) {
        return Some(signed(last5[4]));
    }

    // Geometric growth: a stable ratio above one.
    let last6 = &s[n - 6..];
    if growing(last6) {
        let ratios: Vec<f64> = last6.windows(2).map(|w| w[1] / w[0]).collect();
        let stable = ratios.windows(2).all(|r| (r[1] / r[0] - 1.0).abs() < 0.02);
        if stable && ratios.iter().all(|r| *r > 1.05) {
            return Some(signed(last6[5]));
        }
    }

    // Logarithmic growth: stable non-vanishing increments.
    let last9 = &s[n - 9..];
    let diffs: Vec<f64> = last9.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = last9.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let meaningful = diffs.iter().all(|d| d.abs() > 1e-6 * scale.max(1.0));
    let same_sign = diffs.iter().all(|d| *d > 0.0) || diffs.iter().all(|d| *d < 0.0);
    if meaningful && same_sign {
        let stable = diffs.windows(2).all(|d| (d[1] / d[0] - 1.0).abs() < 1e-4);
        if stable {
            return Some(if diffs[0] > 0.0 {
                LimitKind::PlusInfinity
            } else {
                LimitKind::MinusInfinity
            });
        }
    }
    None
}

fn aitken_limit(s: &[f64]) -> Option<f64> {
    if s.len() < 6 {
        return None;
    }
    let noise = |a: f64, b: f64| 64.0 * f64::EPSILON * a.abs().max(b.abs());
    let extrapolants: Vec<f64> = s
        .windows(3)
        .map(|w| {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1];
            if d2.abs() <= noise(w[1], w[2]) {
                return w[2];
            }
            let r = d2 / d1;
            if r.is_nan() || r.abs() >= 0.999 {
                return f64::NAN;
            }
            w[2] - d2 * r / (r - 1.0)
        })
        .collect();
    let tail = &extrapolants[extrapolants.len() - 4..];
    if tail.iter().any(|a| !a.is_finite()) {
        return None;
    }
    let agree = tail
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() <= CAUCHY_REL * w[0].abs().max(w[1].abs()) + CAUCHY_ABS);
    agree.then(|| tail[3])
}
