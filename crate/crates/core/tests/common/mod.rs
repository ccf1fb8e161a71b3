//! Helpers shared by the property suite and the acceptance harness.
#![allow(dead_code)]

use qorder::aging::hazard_quantile;
use qorder::delta::{delta, eps, mrl_quantile};
use qorder::order::Comparator;
use qorder::quad::quadrature;
use qorder::shape::{ratio_qd, tukey_unimodal_region};
use qorder::{
    compare_all, CompareOptions, Endpoint, GridConfig, LimitKind, MethodChoice, Order, Prob, QuantileModel, Status,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_261_015;

/// Seed from `QORDER_SEED`, or the fixed default.
pub fn seed() -> u64 {
    std::env::var("QORDER_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// A Tukey model with non-negative support (`λ ≥ η`).
pub fn random_tukey(r: &mut impl Rng) -> QuantileModel {
    let eta = r.gen_range(0.5..2.0);
    let lambda = eta + r.gen_range(0.0..3.0);
    let alpha = r.gen_range(0.1..4.9);
    QuantileModel::tukey(lambda, eta, alpha).unwrap()
}

/// A non-negative model from one of the parametric families.
pub fn random_model(r: &mut impl Rng) -> QuantileModel {
    match r.gen_range(0..4) {
        0 | 1 => random_tukey(r),
        2 => QuantileModel::govindarajulu(0.0, r.gen_range(0.5..3.0), r.gen_range(0.5..4.0)).unwrap(),
        _ => QuantileModel::exponential(r.gen_range(0.2..5.0)).unwrap(),
    }
}

fn far_from_special(a: f64) -> bool {
    (a - 1.0).abs() >= 0.25 && (a - 2.0).abs() >= 0.25
}

fn clear_of_zero(k: LimitKind) -> bool {
    match k {
        LimitKind::Finite(v) => v.abs() >= 0.1,
        LimitKind::PlusInfinity | LimitKind::MinusInfinity => true,
        LimitKind::Indeterminate => false,
    }
}

/// A Tukey pair whose shape parameters pass the region test, sit at least
/// 0.25 away from 1, 2 and each other, and whose δ and Φ endpoint limits are
/// at least 0.1 away from zero in both orientations. The ratio of quantile
/// densities peaks at 1/2, where `δ` must also be clear of zero by 1e-3 of
/// its terms; closer pairs change monotonicity by less than a grid can see.
pub fn region_pair(r: &mut impl Rng) -> (QuantileModel, QuantileModel) {
    use qorder::delta::{centered_delta_limit, delta_limit};
    loop {
        let (a1, a2) = (r.gen_range(0.05..4.95), r.gen_range(0.05..4.95));
        if !(far_from_special(a1) && far_from_special(a2) && (a1 - a2).abs() >= 0.25) {
            continue;
        }
        if !tukey_unimodal_region(a1, a2).unwrap() {
            continue;
        }
        let (e1, e2) = (r.gen_range(0.5..2.0), r.gen_range(0.5..2.0));
        let x = QuantileModel::tukey(e1 + r.gen_range(0.0..3.0), e1, a1).unwrap();
        let y = QuantileModel::tukey(e2 + r.gen_range(0.0..3.0), e2, a2).unwrap();
        let ok = [(&x, &y), (&y, &x)].iter().all(|&(u, v)| {
            [Endpoint::Zero, Endpoint::One].iter().all(|&end| {
                clear_of_zero(delta_limit(u, v, end).kind)
                    && centered_delta_limit(u, v, end).is_ok_and(|l| clear_of_zero(l.kind))
            }) && {
                let half = Prob::new(0.5).unwrap();
                let scale = (u.q(half) * ratio_qd(u, v, half)).abs().max(v.q(half).abs());
                delta(u, v, half).abs() >= 1e-3 * scale
            }
        });
        if ok {
            return (x, y);
        }
    }
}

pub fn theorem_opts() -> CompareOptions {
    CompareOptions {
        method: MethodChoice::Theorem,
        grid: GridConfig::default(),
    }
}

pub fn statuses(x: &QuantileModel, y: &QuantileModel) -> Result<Vec<Status>, String> {
    let mut c = Comparator::new(x, y, theorem_opts()).map_err(|e| e.to_string())?;
    Order::ALL
        .iter()
        .map(|&o| c.verdict(o).map(|v| v.status).map_err(|e| format!("{o}: {e}")))
        .collect()
}

/// Theorem verdicts agree with the oracle wherever both are determinate.
pub fn check_agreement(x: &QuantileModel, y: &QuantileModel) -> Result<(), String> {
    let opts = CompareOptions {
        method: MethodChoice::Both,
        grid: GridConfig::default(),
    };
    let c = compare_all(x, y, &opts).map_err(|e| format!("{x} vs {y}: {e}"))?;
    if !c.disagreements.is_empty() {
        return Err(format!("{x} vs {y}: theorem and oracle disagree on {:?}", c.disagreements));
    }
    for v in &c.verdicts {
        if v.order != Order::Nbue && v.status == Status::Inconclusive {
            return Err(format!("{x} vs {y}: {} is inconclusive", v.order));
        }
    }
    Ok(())
}

/// A full comparison succeeds; implication violations surface as errors.
pub fn check_implication_chain(x: &QuantileModel, y: &QuantileModel) -> Result<(), String> {
    compare_all(x, y, &theorem_opts()).map(|_| ()).map_err(|e| format!("{x} vs {y}: {e}"))
}

pub fn check_scale_invariance(x: &QuantileModel, y: &QuantileModel, c: f64) -> Result<(), String> {
    let base = statuses(x, y)?;
    let (cx, cy) = (x.scaled(c).unwrap(), y.scaled(c).unwrap());
    for (label, a, b) in [("(cX, cY)", &cx, &cy), ("(X, cY)", x, &cy)] {
        let s = statuses(a, b)?;
        if s != base {
            return Err(format!("{x} vs {y}, c = {c}: {label} gives {s:?}, expected {base:?}"));
        }
    }
    Ok(())
}

pub fn check_antisymmetry(x: &QuantileModel, y: &QuantileModel) -> Result<(), String> {
    let fwd = statuses(x, y)?;
    let rev = statuses(y, x)?;
    for ((o, f), r) in Order::ALL.iter().zip(&fwd).zip(&rev) {
        if f.swapped() != *r {
            return Err(format!("{x} vs {y}: {o} gives {f} forward but {r} reversed"));
        }
    }
    Ok(())
}

/// `δ(p) = ∫₀ᵖ [R(p)·qd_X(q) − qd_Y(q)] dq + l_X·R(p) − l_Y`, compared
/// relative to the size of the two terms whose difference is `δ`. The two
/// integrals are taken separately; their difference can vanish identically.
pub fn check_delta_identity(x: &QuantileModel, y: &QuantileModel, p: f64) -> Result<(), String> {
    let pr = Prob::new(p).unwrap();
    let r = ratio_qd(x, y, pr);
    let int = |m: &QuantileModel| {
        quadrature(|q| m.qd(q), 0.0, p, 1e-12).map_err(|e| format!("{x} vs {y} at p = {p}: {e}"))
    };
    let integral = r * int(x)? - int(y)?;
    let rebuilt = integral + x.support().0 * r - y.support().0;
    let direct = delta(x, y, pr);
    let scale = (x.q(pr) * r).abs().max(y.q(pr).abs()).max(f64::MIN_POSITIVE);
    if (rebuilt - direct).abs() <= 1e-7 * scale {
        Ok(())
    } else {
        Err(format!("{x} vs {y} at p = {p}: direct {direct}, integral form {rebuilt}"))
    }
}

pub fn check_eps_identity(x: &QuantileModel, p: f64) -> Result<(), String> {
    let pr = Prob::new(p).unwrap();
    let lhs = eps(x, pr).map_err(|e| e.to_string())? * x.q(pr);
    let rhs = pr.complement() * mrl_quantile(x, pr).map_err(|e| e.to_string())?;
    if rel_close(lhs, rhs, 1e-9) {
        Ok(())
    } else {
        Err(format!("{x} at p = {p}: eps·Q = {lhs}, (1-p)·mrl = {rhs}"))
    }
}

pub fn check_hazard_identity(x: &QuantileModel, p: f64) -> Result<(), String> {
    let e = QuantileModel::unit_exponential();
    let h = hazard_quantile(x, p).map_err(|e| e.to_string())?;
    let r = ratio_qd(x, &e, Prob::new(p).unwrap());
    if rel_close(h, r, 1e-12) {
        Ok(())
    } else {
        Err(format!("{x} at p = {p}: hazard {h}, ratio {r}"))
    }
}
