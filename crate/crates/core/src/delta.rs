//! Decision functions for the order checks and their endpoint limits.
//!
//! With `R = qd_Y / qd_X` the quantile-density ratio:
//!
//! * `δ(p) = Q_X(p)·R(p) − Q_Y(p)`
//! * `δ_ps(p) = Q_X(p)/E[X] − Q_Y(p)/E[Y]`
//! * `δ_qmit(p) = R(p)·I_X(p) − I_Y(p)` with `I(p) = ∫₀ᵖ q·qd(q) dq`
//! * `δ_dmrl(p) = M_Y(p) − R(p)·M_X(p)` with `M(p) = ∫ₚ¹ (1−q)·qd(q) dq`
//! * `Φ(p) = R(p)·(Q_X(p) − E[X]) − (Q_Y(p) − E[Y])`, whose endpoint limits
//!   decide the qmit and dmrl orders in their unimodal forms.

use crate::error::{Error, Result};
use crate::limit::{limit_at, Endpoint, LimitKind, LimitValue};
use crate::model::{EndpointBehavior, QuantileModel};
use crate::prob::Prob;
use crate::quad::{integrate_from_zero, integrate_to_one, QuadConfig};
use crate::shape::ratio_qd;

/// `I(p) = ∫₀ᵖ q·qd(q) dq`, the mean inactivity integral.
pub fn lower_moment(x: &QuantileModel, p: Prob) -> Result<f64> {
    integrate_from_zero(&|q: Prob| q.value() * x.qd(q), p, &QuadConfig::default())
}

/// `M(p) = ∫ₚ¹ (1−q)·qd(q) dq`, the mean residual integral.
pub fn upper_moment(x: &QuantileModel, p: Prob) -> Result<f64> {
    integrate_to_one(&|q: Prob| q.complement() * x.qd(q), p, &QuadConfig::default())
}

pub fn delta(x: &QuantileModel, y: &QuantileModel, p: Prob) -> f64 {
    x.q(p) * ratio_qd(x, y, p) - y.q(p)
}

fn nonzero_mean(m: &QuantileModel) -> Result<f64> {
    let mu = m.mean()?;
    if mu == 0.0 {
        return Err(Error::Refused("a zero mean cannot normalise the quantile".into()));
    }
    Ok(mu)
}

pub fn delta_ps(x: &QuantileModel, y: &QuantileModel, p: Prob) -> Result<f64> {
    Ok(x.q(p) / nonzero_mean(x)? - y.q(p) / nonzero_mean(y)?)
}

pub fn delta_qmit(x: &QuantileModel, y: &QuantileModel, p: Prob) -> Result<f64> {
    Ok(ratio_qd(x, y, p) * lower_moment(x, p)? - lower_moment(y, p)?)
}

pub fn delta_dmrl(x: &QuantileModel, y: &QuantileModel, p: Prob) -> Result<f64> {
    x.mean()?;
    y.mean()?;
    Ok(upper_moment(y, p)? - ratio_qd(x, y, p) * upper_moment(x, p)?)
}

/// `Φ(p) = R(p)·(Q_X(p) − E[X]) − (Q_Y(p) − E[Y])`.
pub fn centered_delta(x: &QuantileModel, y: &QuantileModel, p: Prob) -> Result<f64> {
    Ok(centered_delta_with(x, y, p, x.mean()?, y.mean()?))
}

fn centered_delta_with(x: &QuantileModel, y: &QuantileModel, p: Prob, mx: f64, my: f64) -> f64 {
    ratio_qd(x, y, p) * (x.q(p) - mx) - (y.q(p) - my)
}

/// `EPS_X(p) = M(p) / Q(p)`.
pub fn eps(x: &QuantileModel, p: Prob) -> Result<f64> {
    x.mean()?;
    let q = x.q(p);
    if q < 0.0 {
        return Err(Error::Refused(format!(
            "quantile {q} at p = {} is negative",
            p.value()
        )));
    }
    let m = upper_moment(x, p)?;
    Ok(if q == 0.0 { f64::INFINITY } else { m / q })
}

/// Mean residual life at the p-th quantile, `M(p) / (1 − p)`.
pub fn mrl_quantile(x: &QuantileModel, p: Prob) -> Result<f64> {
    x.mean()?;
    Ok(upper_moment(x, p)? / p.complement())
}

/// Mean inactivity time at the p-th quantile, `I(p) / p`.
pub fn mit_quantile(x: &QuantileModel, p: Prob) -> Result<f64> {
    Ok(lower_moment(x, p)? / p.value())
}

// ------------------------------------------------------------ analytic hints

/// Limit of `R` from the endpoint exponents: 0, a positive constant, or +∞.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RatioLimit {
    Zero,
    Const(f64),
    Infinite,
}

const EXPONENT_TOL: f64 = 1e-12;

fn ratio_behaviour(bx: EndpointBehavior, by: EndpointBehavior) -> RatioLimit {
    let e = by.exponent - bx.exponent;
    if e.abs() <= EXPONENT_TOL {
        RatioLimit::Const(by.coef / bx.coef)
    } else if e > 0.0 {
        RatioLimit::Zero
    } else {
        RatioLimit::Infinite
    }
}

fn signed_infinity(s: f64) -> LimitKind {
    if s > 0.0 {
        LimitKind::PlusInfinity
    } else {
        LimitKind::MinusInfinity
    }
}

/// Limit of `R·(Q_X − sx) − (Q_Y − sy)` from closed-form endpoint asymptotics.
///
/// Returns `None` when the leading terms cancel and the answer depends on
/// lower-order behaviour.
pub(crate) fn shifted_delta_hint(
    bx: EndpointBehavior,
    by: EndpointBehavior,
    sx: f64,
    sy: f64,
    end: Endpoint,
) -> Option<LimitKind> {
    let r = ratio_behaviour(bx, by);
    let a = bx.quantile - sx;
    let b = by.quantile - sy;
    match (a.is_finite(), b.is_finite()) {
        (true, true) => Some(match r {
            RatioLimit::Const(c) => LimitKind::Finite(c * a - b),
            RatioLimit::Zero => LimitKind::Finite(-b),
            RatioLimit::Infinite if a == 0.0 => LimitKind::Finite(-b),
            RatioLimit::Infinite => signed_infinity(a),
        }),
        // Q_X diverges while Q_Y stays bounded: R vanishes fast enough that
        // R·Q_X → 0.
        (false, true) => Some(LimitKind::Finite(-b)),
        (true, false) if a != 0.0 => Some(signed_infinity(a)),
        (true, false) => None,
        (false, false) => {
            let sigma = match end {
                Endpoint::Zero => -1.0,
                Endpoint::One => 1.0,
            };
            let (ax, ay) = (bx.exponent, by.exponent);
            let log_x = (ax + 1.0).abs() <= EXPONENT_TOL;
            let log_y = (ay + 1.0).abs() <= EXPONENT_TOL;
            match (log_x, log_y) {
                (true, true) => None,
                (true, false) => Some(signed_infinity(sigma)),
                (false, true) => Some(signed_infinity(-sigma)),
                (false, false) => {
                    let u = -(ax + 1.0);
                    let v = -(ay + 1.0);
                    let lead = 1.0 / u - 1.0 / v;
                    if lead.abs() <= EXPONENT_TOL {
                        None
                    } else {
                        Some(signed_infinity(sigma * lead))
                    }
                }
            }
        }
    }
}

fn behaviours(x: &QuantileModel, y: &QuantileModel, end: Endpoint) -> Option<(EndpointBehavior, EndpointBehavior)> {
    Some((x.endpoint_behavior(end)?, y.endpoint_behavior(end)?))
}

/// Endpoint limit of the ratio `R`.
pub fn ratio_limit(x: &QuantileModel, y: &QuantileModel, end: Endpoint) -> LimitValue {
    let hint = behaviours(x, y, end).map(|(bx, by)| match ratio_behaviour(bx, by) {
        RatioLimit::Zero => LimitKind::Finite(0.0),
        RatioLimit::Const(c) => LimitKind::Finite(c),
        RatioLimit::Infinite => LimitKind::PlusInfinity,
    });
    limit_at(|p| ratio_qd(x, y, p), end, hint)
}

/// Endpoint limit of `δ`.
pub fn delta_limit(x: &QuantileModel, y: &QuantileModel, end: Endpoint) -> LimitValue {
    let hint = behaviours(x, y, end).and_then(|(bx, by)| shifted_delta_hint(bx, by, 0.0, 0.0, end));
    limit_at(|p| delta(x, y, p), end, hint)
}

/// Endpoint limit of `Φ`.
pub fn centered_delta_limit(x: &QuantileModel, y: &QuantileModel, end: Endpoint) -> Result<LimitValue> {
    let (mx, my) = (x.mean()?, y.mean()?);
    let hint = behaviours(x, y, end).and_then(|(bx, by)| shifted_delta_hint(bx, by, mx, my, end));
    Ok(limit_at(|p| centered_delta_with(x, y, p, mx, my), end, hint))
}

/// Endpoint limit of `δ_ps`.
pub fn delta_ps_limit(x: &QuantileModel, y: &QuantileModel, end: Endpoint) -> Result<LimitValue> {
    let (mx, my) = (nonzero_mean(x)?, nonzero_mean(y)?);
    let hint = behaviours(x, y, end).and_then(|(bx, by)| {
        let (a, b) = (bx.quantile / mx, by.quantile / my);
        match (a.is_finite(), b.is_finite()) {
            (true, true) => Some(LimitKind::Finite(a - b)),
            (true, false) => Some(signed_infinity(-b)),
            (false, true) => Some(signed_infinity(a)),
            (false, false) => None,
        }
    });
    Ok(limit_at(|p| x.q(p) / mx - y.q(p) / my, end, hint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::LimitMethod;

    fn tukey_pair() -> (QuantileModel, QuantileModel) {
        (
            QuantileModel::tukey(4.0, 1.0, 2.5).unwrap(),
            QuantileModel::tukey(1.5, 1.0, 1.5).unwrap(),
        )
    }

    fn pr(p: f64) -> Prob {
        Prob::new(p).unwrap()
    }

    fn finite(v: &LimitValue) -> f64 {
        match v.kind {
            LimitKind::Finite(x) => x,
            other => panic!("expected finite, got {other:?}"),
        }
    }

    #[test]
    fn tukey_delta_limits() {
        let (x, y) = tukey_pair();
        let lo = delta_limit(&x, &y, Endpoint::Zero);
        let hi = delta_limit(&x, &y, Endpoint::One);
        assert_eq!(lo.method, LimitMethod::AnalyticHint);
        assert!((finite(&lo) - 1.3).abs() < 1e-12);
        assert!((finite(&hi) - 0.5).abs() < 1e-12);
        let lo_e = limit_at(|p| delta(&x, &y, p), Endpoint::Zero, None);
        let hi_e = limit_at(|p| delta(&x, &y, p), Endpoint::One, None);
        assert!((finite(&lo_e) - 1.3).abs() < 1e-3);
        assert!((finite(&hi_e) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn tukey_centered_limits() {
        let (x, y) = tukey_pair();
        let hi = centered_delta_limit(&x, &y, Endpoint::One).unwrap();
        assert!((finite(&hi) + 0.4).abs() < 1e-12);
        let swapped = centered_delta_limit(&y, &x, Endpoint::Zero).unwrap();
        assert!((finite(&swapped) + 2.0 / 3.0).abs() < 1e-12);
        let literal = centered_delta_limit(&x, &y, Endpoint::Zero).unwrap();
        assert!((finite(&literal) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn hazard_of_govindarajulu() {
        let g = QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap();
        let e = QuantileModel::unit_exponential();
        assert_eq!(ratio_limit(&g, &e, Endpoint::Zero).kind, LimitKind::PlusInfinity);
        assert_eq!(
            limit_at(|p| ratio_qd(&g, &e, p), Endpoint::Zero, None).kind,
            LimitKind::PlusInfinity
        );
        assert_eq!(centered_delta_limit(&g, &e, Endpoint::One).unwrap().kind, LimitKind::PlusInfinity);
        assert_eq!(delta_limit(&g, &e, Endpoint::One).kind, LimitKind::PlusInfinity);
        assert!((finite(&delta_limit(&g, &e, Endpoint::Zero))).abs() < 1e-15);
        let d = delta(&g, &e, pr(1.0 / 3.0));
        assert!((d - (14.0 / 48.0 + (2.0f64 / 3.0).ln())).abs() < 1e-12);
    }

    #[test]
    fn hint_matches_extrapolation_for_small_alpha() {
        // alpha1 < 1: the limit at 0 is −(λ₂ − η₂).
        let x = QuantileModel::tukey(1.0, 0.5, 0.5).unwrap();
        let y = QuantileModel::tukey(2.0, 1.0, 1.5).unwrap();
        let hinted = delta_limit(&x, &y, Endpoint::Zero);
        assert!((finite(&hinted) + 1.0).abs() < 1e-12);
        let extrapolated = limit_at(|p| delta(&x, &y, p), Endpoint::Zero, None);
        assert!((finite(&extrapolated) + 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_values() {
        let e = QuantileModel::unit_exponential();
        assert!((eps(&e, pr(0.5)).unwrap() - 0.5 / 2f64.ln()).abs() < 1e-10);
        let p = 1.0 - (-1.0f64).exp();
        assert!((eps(&e, pr(p)).unwrap() - (-1.0f64).exp()).abs() < 1e-10);
        assert!((mit_quantile(&e, pr(0.5)).unwrap() - (2f64.ln() - 0.5) / 0.5).abs() < 1e-10);
        for &p in &[1e-6, 0.2, 0.5, 0.9, 1.0 - 1e-9] {
            assert!((mrl_quantile(&e, pr(p)).unwrap() - 1.0).abs() < 1e-9);
        }
        let g = QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap();
        assert!((mrl_quantile(&g, pr(1e-9)).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn scale_equivalence() {
        let e = QuantileModel::unit_exponential();
        let e2 = e.scaled(2.0).unwrap();
        for &p in &[0.01, 0.3, 0.7, 0.99] {
            assert!(delta_qmit(&e, &e2, pr(p)).unwrap().abs() < 1e-10);
            assert!(delta_dmrl(&e, &e2, pr(p)).unwrap().abs() < 1e-10);
            assert!(delta_ps(&e, &e2, pr(p)).unwrap().abs() < 1e-15);
            assert_eq!(delta(&e, &e, pr(p)), 0.0);
        }
        let (x, y) = tukey_pair();
        assert_eq!(delta_ps(&x, &y, pr(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn negative_quantile_is_refused_by_eps() {
        let t = QuantileModel::tukey(0.0, 1.0, 1.5).unwrap();
        assert!(eps(&t, pr(0.2)).is_err());
    }
}
