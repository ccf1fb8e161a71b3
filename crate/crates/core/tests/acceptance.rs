//! Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails. Runs without the libtest harness so the lines are
//! always printed.

mod common;

use std::time::{Duration, Instant};

use qorder::aging::{aging_report, HazardShape, IfraClass, MrlClass};
use qorder::delta::{centered_delta_limit, delta_limit};
use qorder::empirical::{qq_transform, SampleSet};
use qorder::limit::limit_at;
use qorder::order::check_star;
use qorder::sweep::{run_sweep, SweepConfig};
use qorder::{compare_all, CompareOptions, Endpoint, GridConfig, LimitKind, LimitMethod, MethodChoice, Order, QuantileModel, Status};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tukey_pair() -> (QuantileModel, QuantileModel) {
    (
        QuantileModel::tukey(4.0, 1.0, 2.5).unwrap(),
        QuantileModel::tukey(1.5, 1.0, 1.5).unwrap(),
    )
}

fn tukey_example() -> Outcome {
    let (x, y) = tukey_pair();
    let opts = CompareOptions {
        method: MethodChoice::Both,
        grid: GridConfig::with_n(4096),
    };
    let start = Instant::now();
    let c = compare_all(&x, &y, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let want = [
        (Order::Star, Status::Holds),
        (Order::Qmit, Status::BothDirectionsFail),
        (Order::Dmrl, Status::BothDirectionsFail),
        (Order::Convex, Status::BothDirectionsFail),
        (Order::Ps, Status::Holds),
        (Order::Nbue, Status::Holds),
    ];
    for (o, s) in want {
        let got = c.get(o).status;
        if got != s {
            return Err(format!("{o}: expected {s}, got {got}"));
        }
    }
    if !c.disagreements.is_empty() {
        return Err(format!("theorem and oracle disagree on {:?}", c.disagreements));
    }
    if elapsed >= Duration::from_secs(2) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("all six verdicts match, no disagreements, {elapsed:.2?}"))
}

fn delta_limits() -> Outcome {
    let (x, y) = tukey_pair();
    let mut parts = Vec::new();
    for (end, expected) in [(Endpoint::Zero, 1.3), (Endpoint::One, 0.5)] {
        let hinted = delta_limit(&x, &y, end);
        if hinted.method != LimitMethod::AnalyticHint {
            return Err(format!("{}: limit not from the analytic hint", end.label()));
        }
        match hinted.kind {
            LimitKind::Finite(v) if (v - expected).abs() <= 1e-12 => {}
            k => return Err(format!("{}: hinted limit {k:?}, expected {expected}", end.label())),
        }
        let extrapolated = limit_at(|p| qorder::delta::delta(&x, &y, p), end, None);
        match extrapolated.kind {
            LimitKind::Finite(v) if (v - expected).abs() <= 1e-3 * expected => {
                parts.push(format!("{} = {expected} (extrapolated {v:.6})", end.label()))
            }
            k => return Err(format!("{}: extrapolated limit {k:?}, expected {expected}", end.label())),
        }
    }
    Ok(parts.join(", "))
}

fn region_sweep() -> Outcome {
    let start = Instant::now();
    let rows = run_sweep(&SweepConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let inside: Vec<_> = rows.iter().filter(|r| r.region == Some(true)).collect();
    let bad: Vec<_> = inside.iter().filter(|r| !r.is_unimodal_max()).collect();
    if let Some(r) = bad.first() {
        return Err(format!("{} exceptions, first at ({}, {}): {}", bad.len(), r.alpha1, r.alpha2, r.shape));
    }
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} cells, {} in region, zero exceptions, {elapsed:.2?}", rows.len(), inside.len()))
}

fn govindarajulu_aging() -> Outcome {
    let g = QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap();
    let r = aging_report(&g, &GridConfig::default()).map_err(|e| e.to_string())?;
    if r.hazard.shape != HazardShape::Bt {
        return Err(format!("hazard shape {}", r.hazard.shape.label()));
    }
    let mode = r.hazard.modes[0].p.value();
    if (mode - 1.0 / 3.0).abs() > 1e-6 {
        return Err(format!("hazard mode at {mode}"));
    }
    if r.mrl != MrlClass::Ubt {
        return Err(format!("mrl {}", r.mrl.label()));
    }
    if matches!(r.ifra, IfraClass::Ifra | IfraClass::Dfra | IfraClass::Both) {
        return Err(format!("ifra class {}", r.ifra.label()));
    }
    let ifra_value = r
        .evidence
        .conditions
        .iter()
        .find(|c| c.name.contains("IFRA iff"))
        .map(|c| c.value)
        .ok_or("no IFRA condition in the evidence")?;
    if (ifra_value - (-0.1138)).abs() > 1e-3 {
        return Err(format!("IFRA condition value {ifra_value}"));
    }
    let e = QuantileModel::unit_exponential();
    let ihrwa = centered_delta_limit(&g, &e, Endpoint::One).map_err(|e| e.to_string())?;
    if ihrwa.kind != LimitKind::PlusInfinity {
        return Err(format!("IHRWA limit {:?}", ihrwa.kind));
    }
    if r.weighted_average_conflict.is_none() {
        return Err("weighted-average conflict not flagged".into());
    }
    Ok(format!(
        "hazard BT at {mode:.9}, mrl UBT, ifra {}, IFRA value {ifra_value:.4}, IHRWA limit +inf, surrogate shape {}, conflict flagged",
        r.ifra.label(),
        r.ihrwa.label()
    ))
}

/// The forward inequality is checked as stated. For the reverse direction the
/// ratio is unimodal with its maximum at 1/2, so `Y ≤⋆ X` needs `δ(1/2) ≤ 0`;
/// cells where the `δ(0+) < 0` shortcut would say otherwise are counted.
fn closed_form_star() -> Outcome {
    let mut r = common::rng(5);
    let (mut holds, mut shortcut_differs) = (0usize, 0usize);
    for i in 0..10 {
        let alpha2 = 1.0 + (i as f64 + r.gen_range(0.05..0.95)) / 10.0;
        for _ in 0..10 {
            let alpha1 = if r.gen_bool(0.5) { 1.0 } else { 2.0 };
            let (e1, e2) = (r.gen_range(0.3..3.0), r.gen_range(0.3..3.0));
            let (l1, l2) = (e1 + r.gen_range(0.0..4.0), e2 + r.gen_range(0.0..4.0));
            let x = QuantileModel::tukey(l1, e1, alpha1).unwrap();
            let y = QuantileModel::tukey(l2, e2, alpha2).unwrap();
            let fwd = (l1 + e1) * e2 * alpha2 > (l2 + e2) * 2.0 * e1;
            let rev = l1 * e2 * alpha2 * 0.5f64.powf(alpha2 - 1.0) < l2 * e1;
            let shortcut = (l1 - e1) * e2 * alpha2 < (l2 - e2) * 2.0 * e1;
            if shortcut != rev {
                shortcut_differs += 1;
            }
            let got = check_star(&x, &y).map_err(|e| e.to_string())?.status;
            if got.forward() != Some(fwd) || got.reverse() != Some(rev) {
                return Err(format!("{x} vs {y}: got {got}, closed form gives forward {fwd}, reverse {rev}"));
            }
            holds += fwd as usize;
        }
    }
    Ok(format!(
        "100 cells agree, forward holds in {holds}; the delta(0+) < 0 reverse shortcut differs from delta(1/2) <= 0 in {shortcut_differs}"
    ))
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut r = common::rng(6);
    let mut n = 0usize;
    for _ in 0..50 {
        let (x, y) = (common::random_model(&mut r), common::random_model(&mut r));
        let c = r.gen_range(0.1..10.0);
        common::check_implication_chain(&x, &y)?;
        common::check_scale_invariance(&x, &y, c)?;
        common::check_antisymmetry(&x, &y)?;
        for _ in 0..8 {
            let p = r.gen_range(0.001..0.999);
            common::check_delta_identity(&x, &y, p)?;
            common::check_eps_identity(&x, p)?;
            common::check_hazard_identity(&x, p)?;
        }
        n += 1;
    }
    let mut agree = 0usize;
    for _ in 0..200 {
        let (x, y) = common::region_pair(&mut r);
        common::check_agreement(&x, &y)?;
        agree += 1;
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(300) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{n} random pairs (implications, scale, antisymmetry, identities), {agree} region pairs agree, seed {}, {elapsed:.2?}",
        common::seed()
    ))
}

fn empirical_identity() -> Outcome {
    let mut r = common::rng(7);
    for set in 0..20 {
        let n = r.gen_range(5..400);
        let values: Vec<f64> = (0..n).map(|_| r.gen_range(-50.0..50.0)).collect();
        let s = SampleSet::new(values.clone()).map_err(|e| e.to_string())?;
        for (u, v) in qq_transform(&s, &s) {
            if u != v {
                return Err(format!("set {set}: point ({u}, {v}) off the identity"));
            }
        }
        let other: Vec<f64> = (0..r.gen_range(5..400)).map(|_| r.gen_range(0.0..10.0)).collect();
        let (a, b) = (r.gen_range(0.1..5.0), r.gen_range(-10.0..10.0));
        let sy = SampleSet::new(other.clone()).map_err(|e| e.to_string())?;
        let sy_affine = SampleSet::new(other.iter().map(|v| a * v + b).collect()).map_err(|e| e.to_string())?;
        let base = qq_transform(&s, &sy);
        let moved = qq_transform(&s, &sy_affine);
        for ((u0, v0), (u1, v1)) in base.iter().zip(&moved) {
            if u0 != u1 || *v1 != a * v0 + b {
                return Err(format!("set {set}: affine image ({u1}, {v1}) differs from ({u0}, {})", a * v0 + b));
            }
        }
    }
    Ok("20 sets on the identity line, affine equivariance exact".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("Tukey worked example", tukey_example),
        ("closed-form delta limits", delta_limits),
        ("unimodal region sweep", region_sweep),
        ("Govindarajulu aging", govindarajulu_aging),
        ("closed-form star condition", closed_form_star),
        ("property suites", property_suites),
        ("empirical identity", empirical_identity),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
