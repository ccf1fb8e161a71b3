//! Certified verdicts for the transform orders between two distributions.
//!
//! All checks are driven by the shape of `R = qd_Y / qd_X`. Each order's
//! defining ratio is monotone exactly when a decision function keeps one sign,
//! and each decision function moves in lock-step with `R`:
//!
//! * star: `δ' = Q_X·R'`, so `δ` is smallest at `0⁺` (if `R` starts
//!   increasing), at the minima of `R`, and at `1⁻` (if `R` ends decreasing);
//! * qmit: `δ_qmit' = R'·I_X` with `δ_qmit(0⁺) = 0` and `δ_qmit(1⁻) = Φ(1⁻)`;
//! * dmrl: `δ_dmrl' = −R'·M_X` with `δ_dmrl(1⁻) = 0` and `δ_dmrl(0⁺) = Φ(0⁺)`.
//!
//! The reverse direction of every order is the forward check applied to
//! `(Y, X)`, whose ratio is `1/R`. Values within [`THRESHOLD_TOL`] of a
//! threshold are not trusted; such checks fall back to the grid oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::delta::{
    centered_delta_limit, delta, delta_dmrl, delta_limit, delta_ps_limit, delta_qmit, eps,
};
use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::limit::{Endpoint, LimitMethod, LimitValue};
use crate::model::QuantileModel;
use crate::oracle::{GridStatus, GridVerdict, OracleCurves, ORACLE_TOL};
use crate::prob::Prob;
use crate::shape::{find_shape, ratio_qd, Classification, Direction, Mode, ModeKind, ShapeReport};

/// Absolute tolerance for threshold comparisons.
pub const THRESHOLD_TOL: f64 = 1e-9;
/// Lower support endpoints above this negative value count as non-negative.
const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Convex,
    Star,
    Qmit,
    Dmrl,
    Ps,
    Nbue,
}

impl Order {
    pub const ALL: [Order; 6] = [
        Order::Convex,
        Order::Star,
        Order::Qmit,
        Order::Dmrl,
        Order::Ps,
        Order::Nbue,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Order::Convex => "convex",
            Order::Star => "star",
            Order::Qmit => "qmit",
            Order::Dmrl => "dmrl",
            Order::Ps => "ps",
            Order::Nbue => "nbue",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Order {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Order::ALL
            .into_iter()
            .find(|o| o.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown order '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// `X ≤ Y` and not `Y ≤ X`.
    Holds,
    /// `Y ≤ X` and not `X ≤ Y`.
    HoldsReversed,
    BothDirectionsFail,
    Equivalent,
    Inconclusive,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Holds => "Holds",
            Status::HoldsReversed => "HoldsReversed",
            Status::BothDirectionsFail => "BothDirectionsFail",
            Status::Equivalent => "Equivalent",
            Status::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_determinate(self) -> bool {
        self != Status::Inconclusive
    }

    /// Whether `X ≤ Y` holds; `None` when inconclusive.
    pub fn forward(self) -> Option<bool> {
        match self {
            Status::Holds | Status::Equivalent => Some(true),
            Status::HoldsReversed | Status::BothDirectionsFail => Some(false),
            Status::Inconclusive => None,
        }
    }

    /// Whether `Y ≤ X` holds; `None` when inconclusive.
    pub fn reverse(self) -> Option<bool> {
        self.swapped().forward()
    }

    /// The status of the same order with the roles of X and Y exchanged.
    pub fn swapped(self) -> Status {
        match self {
            Status::Holds => Status::HoldsReversed,
            Status::HoldsReversed => Status::Holds,
            other => other,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Theorem,
    Implication,
    NumericFallback,
    Oracle,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Theorem => "theorem",
            Method::Implication => "implication",
            Method::NumericFallback => "numeric-fallback",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
    Above,
    Below,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Above => ">",
            Relation::Below => "<",
        }
    }
}

/// One evaluated condition of a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    /// `None` when the value is too close to the threshold, or undetermined.
    pub satisfied: Option<bool>,
    /// How the value was obtained, e.g. `analytic-hint` for a limit.
    pub source: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Certificate {
    pub theorem: String,
    pub conditions: Vec<Condition>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub order: Order,
    pub status: Status,
    pub method: Method,
    pub certificate: Certificate,
    /// Grid evidence when the oracle was consulted.
    pub oracle: Option<GridVerdict>,
}

/// Three-valued outcome of a condition or a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tri {
    Yes,
    No,
    Unsure,
}

impl Tri {
    pub(crate) fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unsure,
        }
    }

    pub(crate) fn or(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
            (Tri::No, Tri::No) => Tri::No,
            _ => Tri::Unsure,
        }
    }

    pub(crate) fn from_option(b: Option<bool>) -> Tri {
        match b {
            Some(true) => Tri::Yes,
            Some(false) => Tri::No,
            None => Tri::Unsure,
        }
    }

    pub(crate) fn as_option(self) -> Option<bool> {
        match self {
            Tri::Yes => Some(true),
            Tri::No => Some(false),
            Tri::Unsure => None,
        }
    }
}

/// A value entering a condition.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Quantity {
    value: f64,
    /// Exactly known, so a zero is a true zero.
    exact: bool,
    source: &'static str,
}

impl Quantity {
    pub(crate) fn point(value: f64) -> Self {
        Quantity {
            value,
            exact: false,
            source: "evaluated",
        }
    }

    pub(crate) fn limit(l: &LimitValue) -> Self {
        Quantity {
            value: l.kind.as_extended(),
            exact: l.method == LimitMethod::AnalyticHint && l.kind.is_determinate(),
            source: l.method.label(),
        }
    }
}

pub(crate) fn judge(q: Quantity, rel: Relation) -> Tri {
    let v = q.value;
    if v.is_nan() {
        return Tri::Unsure;
    }
    if q.exact && v == 0.0 {
        return match rel {
            Relation::AtLeast | Relation::AtMost => Tri::Yes,
            Relation::Above | Relation::Below => Tri::No,
        };
    }
    if v.abs() <= THRESHOLD_TOL {
        return Tri::Unsure;
    }
    let positive = v > 0.0;
    let ok = match rel {
        Relation::AtLeast | Relation::Above => positive,
        Relation::AtMost | Relation::Below => !positive,
    };
    if ok {
        Tri::Yes
    } else {
        Tri::No
    }
}

impl Certificate {
    pub(crate) fn new(theorem: impl Into<String>) -> Self {
        Certificate {
            theorem: theorem.into(),
            ..Default::default()
        }
    }

    /// Records `q rel 0` and returns its outcome.
    pub(crate) fn check(&mut self, name: impl Into<String>, q: Quantity, rel: Relation) -> Tri {
        let t = judge(q, rel);
        self.conditions.push(Condition {
            name: name.into(),
            value: q.value,
            threshold: 0.0,
            relation: rel,
            satisfied: t.as_option(),
            source: q.source,
        });
        t
    }

    pub(crate) fn fact(&mut self, name: impl Into<String>, value: f64, threshold: f64, rel: Relation, ok: bool) {
        self.conditions.push(Condition {
            name: name.into(),
            value,
            threshold,
            relation: rel,
            satisfied: Some(ok),
            source: "evaluated",
        });
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

/// How verdicts are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    /// Theorems, falling back to the oracle when they cannot decide.
    Theorem,
    /// Theorems only; undecidable cases are reported as inconclusive.
    TheoremOnly,
    /// The grid oracle only.
    Oracle,
    /// Theorems and oracle side by side.
    Both,
}

impl FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem" => Ok(MethodChoice::Theorem),
            "theorem-only" => Ok(MethodChoice::TheoremOnly),
            "oracle" => Ok(MethodChoice::Oracle),
            "both" => Ok(MethodChoice::Both),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub method: MethodChoice,
    pub grid: GridConfig,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            method: MethodChoice::Theorem,
            grid: GridConfig::default(),
        }
    }
}

/// The quantile-ratio segmentation cases for a unimodal-max `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioCase {
    /// Increasing throughout.
    Case1,
    /// Increasing, then decreasing.
    Case2,
    /// Decreasing, then increasing.
    Case3,
    /// Decreasing throughout.
    Case4a,
    /// Decreasing, increasing, decreasing.
    Case4b,
}

impl RatioCase {
    pub fn label(self) -> &'static str {
        match self {
            RatioCase::Case1 => "1",
            RatioCase::Case2 => "2",
            RatioCase::Case3 => "3",
            RatioCase::Case4a => "4a",
            RatioCase::Case4b => "4b",
        }
    }
}

/// Predicted behaviour of `Q_Y / Q_X` from the signs of `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioPrediction {
    /// `None` when a sign could not be decided.
    pub case: Option<RatioCase>,
    pub shape: Option<ShapeReport>,
    /// The mode of `R`.
    pub p_star: Prob,
    pub certificate: Certificate,
}

/// Locates a sign change of `f` strictly inside `(lo, hi)` on the grid and
/// refines it by bisection. `rising` selects a change from negative to
/// positive.
fn sign_change<F: Fn(Prob) -> f64>(f: &F, grid: &[Prob], lo: f64, hi: f64, rising: bool) -> Option<Prob> {
    let pts: Vec<Prob> = grid
        .iter()
        .copied()
        .filter(|p| p.value() > lo && p.value() < hi)
        .collect();
    let good = |v: f64| if rising { v > 0.0 } else { v < 0.0 };
    let mut prev = *pts.first()?;
    let mut prev_good = good(f(prev));
    for &p in &pts[1..] {
        let now = good(f(p));
        if now && !prev_good {
            let (mut a, mut b) = (prev, p);
            for _ in 0..200 {
                let m = Prob::midpoint(a, b);
                if m.value() <= a.value() || m.value() >= b.value() {
                    break;
                }
                if good(f(m)) {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Some(Prob::midpoint(a, b));
        }
        prev = p;
        prev_good = now;
    }
    None
}

fn direction_word(d: Option<Direction>) -> &'static str {
    d.map(Direction::label).unwrap_or("flat")
}

/// Theorem-path analysis of one ordered pair.
pub struct Comparator<'a> {
    x: &'a QuantileModel,
    y: &'a QuantileModel,
    opts: CompareOptions,
    shape: Result<ShapeReport>,
    zero_lower: bool,
    curves: Option<OracleCurves<'a>>,
    cache: BTreeMap<Order, OrderVerdict>,
}

impl<'a> Comparator<'a> {
    /// Validates the pair and classifies the quantile-density ratio.
    pub fn new(x: &'a QuantileModel, y: &'a QuantileModel, opts: CompareOptions) -> Result<Self> {
        let mut lower = [0.0; 2];
        for (i, (name, m)) in [("X", x), ("Y", y)].into_iter().enumerate() {
            if !m.is_smooth() {
                return Err(Error::Refused(format!(
                    "{name} is an empirical model; order checks need a quantile density"
                )));
            }
            let l = m.support().0;
            if l < -SUPPORT_TOL {
                return Err(Error::Refused(format!(
                    "{name} has lower support endpoint {l}; only non-negative variables can be compared"
                )));
            }
            lower[i] = l;
        }
        let shape = find_shape(|p| ratio_qd(x, y, p), &opts.grid);
        Ok(Comparator {
            x,
            y,
            opts,
            shape,
            zero_lower: lower.iter().all(|l| l.abs() <= SUPPORT_TOL),
            curves: None,
            cache: BTreeMap::new(),
        })
    }

    /// Shape of `qd_Y / qd_X`.
    pub fn ratio_shape(&self) -> Result<&ShapeReport> {
        self.shape.as_ref().map_err(Clone::clone)
    }

    /// Whether both lower support endpoints are zero.
    pub fn zero_lower_supports(&self) -> bool {
        self.zero_lower
    }

    fn curves(&mut self) -> &mut OracleCurves<'a> {
        let (x, y, grid) = (self.x, self.y, self.opts.grid);
        self.curves.get_or_insert_with(|| OracleCurves::new(x, y, &grid))
    }

    /// Oracle verdict for `order`.
    pub fn oracle(&mut self, order: Order) -> Result<OrderVerdict> {
        let v = self.curves().verdict(order)?;
        let status = status_from_grid(&v);
        let mut cert = Certificate::new(format!("{} definition checked on a {}-point grid", order, v.n));
        let (up, down) = match order {
            Order::Ps | Order::Nbue => ("largest relative excess of the Y side", "largest relative excess of the X side"),
            _ => ("largest relative rise", "largest relative drop"),
        };
        cert.fact(up, v.rise.magnitude, ORACLE_TOL, Relation::Above, v.rise.magnitude > ORACLE_TOL);
        cert.fact(down, v.drop.magnitude, ORACLE_TOL, Relation::Above, v.drop.magnitude > ORACLE_TOL);
        if !v.decisive {
            cert.note("an excursion lies within ten times the tolerance; verdict withheld");
        }
        Ok(OrderVerdict {
            order,
            status,
            method: Method::Oracle,
            certificate: cert,
            oracle: Some(v),
        })
    }

    /// Theorem-path verdict for `order`, with the configured fallback.
    pub fn verdict(&mut self, order: Order) -> Result<OrderVerdict> {
        if let Some(v) = self.cache.get(&order) {
            return Ok(v.clone());
        }
        let v = if self.opts.method == MethodChoice::Oracle {
            self.oracle(order)?
        } else {
            let (status, method, cert) = match order {
                Order::Convex => self.convex(),
                Order::Star => self.star()?,
                Order::Qmit => self.qmit()?,
                Order::Dmrl => self.dmrl()?,
                Order::Ps => self.ps()?,
                Order::Nbue => self.nbue()?,
            };
            self.finish(order, status, method, cert)?
        };
        self.cache.insert(order, v.clone());
        Ok(v)
    }

    fn finish(&mut self, order: Order, status: Option<Status>, method: Method, mut cert: Certificate) -> Result<OrderVerdict> {
        if let Some(status) = status {
            return Ok(OrderVerdict {
                order,
                status,
                method,
                certificate: cert,
                oracle: None,
            });
        }
        if self.opts.method == MethodChoice::TheoremOnly {
            cert.note("conditions undecided and numeric fallback disabled");
            return Ok(OrderVerdict {
                order,
                status: Status::Inconclusive,
                method,
                certificate: cert,
                oracle: None,
            });
        }
        cert.note("conditions undecided; verdict taken from the grid oracle");
        let o = self.oracle(order)?;
        let g = o.oracle.clone().expect("oracle verdict carries grid evidence");
        cert.conditions.extend(o.certificate.conditions);
        cert.notes.extend(o.certificate.notes);
        Ok(OrderVerdict {
            order,
            status: o.status,
            method: Method::NumericFallback,
            certificate: cert,
            oracle: Some(g),
        })
    }

    /// Sign of the constant `δ` when `R` is constant.
    fn constant_delta(&self, cert: &mut Certificate) -> Tri {
        let half = Prob::from_parts(0.5, 0.5);
        let d = delta(self.x, self.y, half);
        let scale = 1f64.max(self.y.q(half).abs());
        if d.abs() <= THRESHOLD_TOL * scale {
            cert.fact("δ (constant)", d, 0.0, Relation::AtLeast, true);
            cert.note("δ vanishes identically: Q_Y is a multiple of Q_X");
            return Tri::Unsure;
        }
        cert.check("δ (constant)", Quantity::point(d), Relation::AtLeast)
    }

    fn convex(&self) -> (Option<Status>, Method, Certificate) {
        let mut cert = Certificate::new("convex transform: monotonicity of qd_Y/qd_X");
        let s = match &self.shape {
            Ok(s) => s,
            Err(e) => {
                cert.note(format!("ratio shape unavailable: {e}"));
                return (None, Method::Theorem, cert);
            }
        };
        let status = match s.classification {
            Classification::Constant => Status::Equivalent,
            Classification::Increasing => Status::Holds,
            Classification::Decreasing => Status::HoldsReversed,
            _ => Status::BothDirectionsFail,
        };
        let n = s.modes.len() as f64;
        cert.fact("modes of qd_Y/qd_X", n, 0.0, Relation::AtMost, n == 0.0);
        cert.note(format!("ratio shape: {}", s.classification.label()));
        (Some(status), Method::Theorem, cert)
    }

    /// Combines per-direction outcomes. When `R` is not constant the two
    /// directions of any of these orders exclude each other, so one certified
    /// direction settles the verdict.
    fn combine(&self, fwd: Tri, rev: Tri, cert: &mut Certificate) -> Option<Status> {
        match (fwd, rev) {
            (Tri::Yes, Tri::Yes) => Some(Status::Equivalent),
            (Tri::Yes, Tri::No) => Some(Status::Holds),
            (Tri::No, Tri::Yes) => Some(Status::HoldsReversed),
            (Tri::No, Tri::No) => Some(Status::BothDirectionsFail),
            (Tri::Yes, Tri::Unsure) => {
                cert.note("reverse direction excluded: both directions hold only for a constant ratio");
                Some(Status::Holds)
            }
            (Tri::Unsure, Tri::Yes) => {
                cert.note("forward direction excluded: both directions hold only for a constant ratio");
                Some(Status::HoldsReversed)
            }
            _ => None,
        }
    }

    fn star(&self) -> Result<(Option<Status>, Method, Certificate)> {
        let s = match &self.shape {
            Ok(s) => s.clone(),
            Err(e) => {
                let mut cert = Certificate::new("star-shaped: extrema of δ");
                cert.note(format!("ratio shape unavailable: {e}"));
                return Ok((None, Method::Theorem, cert));
            }
        };
        if s.is_constant() {
            let mut cert = Certificate::new("star-shaped: constant quantile-density ratio makes δ constant");
            let status = match self.constant_delta(&mut cert) {
                Tri::Unsure => Status::Equivalent,
                Tri::Yes => Status::Holds,
                Tri::No => Status::HoldsReversed,
            };
            return Ok((Some(status), Method::Theorem, cert));
        }
        let theorem = if s.classification == Classification::UnimodalMax {
            "star-shaped characterization for a unimodal-max ratio"
        } else {
            "star-shaped conditions at the extrema of δ"
        };
        let mut cert = Certificate::new(theorem);
        cert.note(format!("ratio shape: {}", s.classification.label()));
        let fwd = star_direction(self.x, self.y, &s, "X,Y", &mut cert);
        let rev = star_direction(self.y, self.x, &s.reciprocal(), "Y,X", &mut cert);
        Ok((self.combine(fwd, rev, &mut cert), Method::Theorem, cert))
    }

    fn qmit(&self) -> Result<(Option<Status>, Method, Certificate)> {
        self.x.mean()?;
        self.y.mean()?;
        let s = match &self.shape {
            Ok(s) => s.clone(),
            Err(e) => {
                let mut cert = Certificate::new("qmit: sign of δ_qmit");
                cert.note(format!("ratio shape unavailable: {e}"));
                return Ok((None, Method::Theorem, cert));
            }
        };
        let mut cert = Certificate::new("qmit n-modal conditions on δ_qmit and Φ(1-)");
        cert.note(format!("ratio shape: {}", s.classification.label()));
        if s.is_constant() {
            cert.note("constant ratio: δ_qmit vanishes identically");
            return Ok((Some(Status::Equivalent), Method::Theorem, cert));
        }
        let fwd = qmit_direction(self.x, self.y, &s, "X,Y", &mut cert)?;
        let rev = qmit_direction(self.y, self.x, &s.reciprocal(), "Y,X", &mut cert)?;
        Ok((self.combine(fwd, rev, &mut cert), Method::Theorem, cert))
    }

    fn dmrl(&self) -> Result<(Option<Status>, Method, Certificate)> {
        self.x.mean()?;
        self.y.mean()?;
        let s = match &self.shape {
            Ok(s) => s.clone(),
            Err(e) => {
                let mut cert = Certificate::new("dmrl: sign of δ_dmrl");
                cert.note(format!("ratio shape unavailable: {e}"));
                return Ok((None, Method::Theorem, cert));
            }
        };
        let mut cert = Certificate::new("dmrl n-modal conditions on δ_dmrl and Φ(0+)");
        cert.note(format!("ratio shape: {}", s.classification.label()));
        if s.is_constant() {
            cert.note("constant ratio: δ_dmrl vanishes identically");
            return Ok((Some(Status::Equivalent), Method::Theorem, cert));
        }
        let fwd = dmrl_direction(self.x, self.y, &s, "X,Y", &mut cert)?;
        let rev = dmrl_direction(self.y, self.x, &s.reciprocal(), "Y,X", &mut cert)?;
        let status = self.combine(fwd, rev, &mut cert);
        if s.classification == Classification::UnimodalMax {
            // The unimodal algorithm can also be read as deciding the reverse
            // direction from Φ(0+) of (X, Y) itself. Keep both readings.
            let phi = centered_delta_limit(self.x, self.y, Endpoint::Zero)?;
            let literal = judge(Quantity::limit(&phi), Relation::AtLeast);
            cert.note(format!(
                "literal reading (Y <=dmrl X iff Φ[X,Y](0+) >= 0): Φ[X,Y](0+) = {}, reading gives {}",
                fmt_value(phi.kind.as_extended()),
                tri_word(literal)
            ));
            if literal != Tri::Unsure && Some(literal) != Some(rev) && rev != Tri::Unsure {
                cert.note("the literal reading disagrees with the role-swapped conditions; the role-swapped verdict is reported");
            }
        }
        Ok((status, Method::Theorem, cert))
    }

    fn ps(&mut self) -> Result<(Option<Status>, Method, Certificate)> {
        self.x.mean()?;
        self.y.mean()?;
        let star = self.verdict(Order::Star)?;
        if star.status.is_determinate() && star.status != Status::BothDirectionsFail {
            let mut cert = Certificate::new("star-shaped order implies ps order");
            cert.note(format!("star: {}", star.status));
            return Ok((Some(star.status), Method::Implication, cert));
        }
        let Ok(s) = self.shape.clone() else {
            return Ok((None, Method::Theorem, Certificate::new("ps: ratio shape unavailable")));
        };
        let mut cert = Certificate::new("ps conditions for a unimodal quantile-density ratio");
        cert.note(format!("ratio shape: {}; star: {}", s.classification.label(), star.status));
        let status = match s.classification {
            Classification::UnimodalMax => {
                let (fwd, rev) = ps_cases(self.x, self.y, &s, &self.opts.grid, "X,Y", &mut cert)?;
                self.combine(fwd, rev, &mut cert)
            }
            Classification::UnimodalMin => {
                cert.note("conditions applied to (Y, X), whose ratio is unimodal-max");
                let (fwd, rev) = ps_cases(self.y, self.x, &s.reciprocal(), &self.opts.grid, "Y,X", &mut cert)?;
                self.combine(rev, fwd, &mut cert)
            }
            _ => {
                cert.note("no ps conditions for this ratio shape");
                None
            }
        };
        Ok((status, Method::Theorem, cert))
    }

    fn nbue(&mut self) -> Result<(Option<Status>, Method, Certificate)> {
        self.x.mean()?;
        self.y.mean()?;
        let mut cert = Certificate::new("nbue by implication from star, ps or dmrl");
        let mut sources = vec![Order::Star, Order::Ps];
        if self.zero_lower {
            sources.push(Order::Dmrl);
        } else {
            cert.note("dmrl not used: its implication needs both supports to start at 0");
        }
        let (mut fwd, mut rev) = (Tri::No, Tri::No);
        for o in sources {
            let v = self.verdict(o)?;
            cert.note(format!("{o}: {}", v.status));
            fwd = fwd.or(Tri::from_option(v.status.forward()));
            rev = rev.or(Tri::from_option(v.status.reverse()));
        }
        let status = match (fwd, rev) {
            (Tri::Yes, Tri::Yes) => Status::Equivalent,
            (Tri::Yes, _) => Status::Holds,
            (_, Tri::Yes) => Status::HoldsReversed,
            _ => {
                cert.note("no implying order holds in either direction");
                Status::Inconclusive
            }
        };
        Ok((Some(status), Method::Implication, cert))
    }

    /// Quantile-ratio prediction; requires a unimodal-max `R`.
    pub fn predict_quantile_ratio_shape(&self) -> Result<RatioPrediction> {
        let s = self.ratio_shape()?;
        if s.classification != Classification::UnimodalMax {
            return Err(Error::Hypothesis(format!(
                "quantile-density ratio is {}, not unimodal-max; use the n-modal conditions",
                s.classification.label()
            )));
        }
        predict(self.x, self.y, s.modes[0].p, &self.opts.grid)
    }
}

fn tri_word(t: Tri) -> &'static str {
    match t {
        Tri::Yes => "holds",
        Tri::No => "fails",
        Tri::Unsure => "undecided",
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        format!("{v}")
    }
}

pub(crate) fn status_from_grid(v: &GridVerdict) -> Status {
    if !v.decisive {
        return Status::Inconclusive;
    }
    match v.status {
        GridStatus::Increasing => Status::Holds,
        GridStatus::Decreasing => Status::HoldsReversed,
        GridStatus::Constant => Status::Equivalent,
        GridStatus::Mixed => Status::BothDirectionsFail,
    }
}

fn at(m: &Mode) -> String {
    format!("p={:.6}", m.p.value())
}

/// Forward star check of `(a, b)` given the shape `s` of `qd_b/qd_a`.
fn star_direction(a: &QuantileModel, b: &QuantileModel, s: &ShapeReport, tag: &str, cert: &mut Certificate) -> Tri {
    let mut t = Tri::Yes;
    if s.initial_direction() == Some(Direction::Increasing) {
        let l = delta_limit(a, b, Endpoint::Zero);
        t = t.and(cert.check(format!("δ[{tag}](0+)"), Quantity::limit(&l), Relation::AtLeast));
    }
    for m in s.modes_of(ModeKind::Min) {
        let d = delta(a, b, m.p);
        t = t.and(cert.check(format!("δ[{tag}]({})", at(m)), Quantity::point(d), Relation::AtLeast));
    }
    if s.final_direction() == Some(Direction::Decreasing) {
        let l = delta_limit(a, b, Endpoint::One);
        t = t.and(cert.check(format!("δ[{tag}](1-)"), Quantity::limit(&l), Relation::AtLeast));
    }
    t
}

fn qmit_direction(a: &QuantileModel, b: &QuantileModel, s: &ShapeReport, tag: &str, cert: &mut Certificate) -> Result<Tri> {
    if s.initial_direction() == Some(Direction::Decreasing) {
        cert.note(format!(
            "[{tag}] ratio starts {}: δ_qmit falls below 0 right after 0+",
            direction_word(s.initial_direction())
        ));
        cert.fact(format!("[{tag}] ratio increasing at 0+"), 0.0, 1.0, Relation::AtLeast, false);
        return Ok(Tri::No);
    }
    let mut t = Tri::Yes;
    for m in s.modes_of(ModeKind::Min) {
        let d = delta_qmit(a, b, m.p)?;
        t = t.and(cert.check(format!("δ_qmit[{tag}]({})", at(m)), Quantity::point(d), Relation::AtLeast));
    }
    if s.final_direction() == Some(Direction::Decreasing) {
        let l = centered_delta_limit(a, b, Endpoint::One)?;
        t = t.and(cert.check(format!("Φ[{tag}](1-)"), Quantity::limit(&l), Relation::AtLeast));
    }
    Ok(t)
}

fn dmrl_direction(a: &QuantileModel, b: &QuantileModel, s: &ShapeReport, tag: &str, cert: &mut Certificate) -> Result<Tri> {
    if s.final_direction() == Some(Direction::Decreasing) {
        cert.note(format!("[{tag}] ratio ends decreasing: δ_dmrl is negative just before 1-"));
        cert.fact(format!("[{tag}] ratio increasing at 1-"), 0.0, 1.0, Relation::AtLeast, false);
        return Ok(Tri::No);
    }
    let mut t = Tri::Yes;
    for m in s.modes_of(ModeKind::Max) {
        let d = delta_dmrl(a, b, m.p)?;
        t = t.and(cert.check(format!("δ_dmrl[{tag}]({})", at(m)), Quantity::point(d), Relation::AtLeast));
    }
    if s.initial_direction() == Some(Direction::Decreasing) {
        let l = centered_delta_limit(a, b, Endpoint::Zero)?;
        t = t.and(cert.check(format!("Φ[{tag}](0+)"), Quantity::limit(&l), Relation::AtLeast));
    }
    Ok(t)
}

/// Both ps directions for `(a, b)` with `qd_b/qd_a` unimodal-max.
fn ps_cases(
    a: &QuantileModel,
    b: &QuantileModel,
    s: &ShapeReport,
    grid: &GridConfig,
    tag: &str,
    cert: &mut Certificate,
) -> Result<(Tri, Tri)> {
    let p_star = s.modes[0].p;
    let d0 = Quantity::limit(&delta_limit(a, b, Endpoint::Zero));
    let d1 = Quantity::limit(&delta_limit(a, b, Endpoint::One));
    let dps0 = Quantity::limit(&delta_ps_limit(a, b, Endpoint::Zero)?);
    let dstar = Quantity::point(delta(a, b, p_star));
    let ps_at = format!("p*={:.6}", p_star.value());

    let star_fwd = cert
        .check(format!("star [{tag}]: δ(0+)"), d0, Relation::AtLeast)
        .and(cert.check(format!("star [{tag}]: δ(1-)"), d1, Relation::AtLeast));
    let star_rev = judge(dstar, Relation::AtMost);
    cert.check(format!("reverse star [{tag}]: δ({ps_at})"), dstar, Relation::AtMost);

    let case1 = cert
        .check(format!("case 1 [{tag}]: δ(0+)"), d0, Relation::Below)
        .and(cert.check(format!("case 1 [{tag}]: δ(1-)"), d1, Relation::AtLeast))
        .and(cert.check(format!("case 1 [{tag}]: δ_ps(0+)"), dps0, Relation::AtLeast));
    let case2a = cert
        .check(format!("case 2a [{tag}]: δ(0+)"), d0, Relation::AtLeast)
        .and(cert.check(format!("case 2a [{tag}]: δ(1-)"), d1, Relation::Below))
        .and(cert.check(format!("case 2a [{tag}]: δ_ps(0+)"), dps0, Relation::AtMost));
    let mut case2b = cert
        .check(format!("case 2b [{tag}]: δ(0+)"), d0, Relation::Below)
        .and(cert.check(format!("case 2b [{tag}]: δ(1-)"), d1, Relation::Below))
        .and(cert.check(format!("case 2b [{tag}]: δ({ps_at})"), dstar, Relation::Above))
        .and(cert.check(format!("case 2b [{tag}]: δ_ps(0+)"), dps0, Relation::AtMost));
    if case2b != Tri::No {
        // p₁ is the minimum of Q_b/Q_a, where δ turns from negative to positive.
        let pts = grid.points();
        match sign_change(&|p| delta(a, b, p), &pts, 0.0, p_star.value(), true) {
            Some(p1) => {
                let diff = eps(a, p1)? - eps(b, p1)?;
                let name = format!("case 2b [{tag}]: EPS_X(p1) - EPS_Y(p1) at p1={:.6}", p1.value());
                case2b = case2b.and(cert.check(name, Quantity::point(diff), Relation::AtLeast));
            }
            None => {
                cert.note(format!("[{tag}] minimum of the quantile ratio not located"));
                case2b = case2b.and(Tri::Unsure);
            }
        }
    }
    Ok((star_fwd.or(case1), star_rev.or(case2a).or(case2b)))
}

fn predict(x: &QuantileModel, y: &QuantileModel, p_star: Prob, grid: &GridConfig) -> Result<RatioPrediction> {
    let mut cert = Certificate::new("quantile-ratio behaviour from the signs of δ");
    let d0 = Quantity::limit(&delta_limit(x, y, Endpoint::Zero));
    let d1 = Quantity::limit(&delta_limit(x, y, Endpoint::One));
    let start_up = cert.check("δ(0+)", d0, Relation::AtLeast);
    let end_up = cert.check("δ(1-)", d1, Relation::AtLeast);
    let f = |p: Prob| delta(x, y, p);
    let pts = grid.points();
    let ps = p_star.value();
    let (case, modes, first) = match (start_up, end_up) {
        (Tri::Unsure, _) | (_, Tri::Unsure) => (None, vec![], None),
        (Tri::Yes, Tri::Yes) => (Some(RatioCase::Case1), vec![], Some(Direction::Increasing)),
        (Tri::Yes, Tri::No) => {
            let m = sign_change(&|p| -f(p), &pts, ps, 1.0, true);
            let modes = m.map(|p| vec![Mode { p, kind: ModeKind::Max }]);
            (Some(RatioCase::Case2), modes.unwrap_or_default(), Some(Direction::Increasing))
        }
        (Tri::No, Tri::Yes) => {
            let m = sign_change(&f, &pts, 0.0, ps, true);
            let modes = m.map(|p| vec![Mode { p, kind: ModeKind::Min }]);
            (Some(RatioCase::Case3), modes.unwrap_or_default(), Some(Direction::Decreasing))
        }
        (Tri::No, Tri::No) => {
            let dstar = Quantity::point(f(p_star));
            match cert.check(format!("δ(p*={ps:.6})"), dstar, Relation::Above) {
                Tri::Unsure => (None, vec![], None),
                Tri::No => (Some(RatioCase::Case4a), vec![], Some(Direction::Decreasing)),
                Tri::Yes => {
                    let lo = sign_change(&f, &pts, 0.0, ps, true);
                    let hi = sign_change(&|p| -f(p), &pts, ps, 1.0, true);
                    let modes = match (lo, hi) {
                        (Some(a), Some(b)) => vec![Mode { p: a, kind: ModeKind::Min }, Mode { p: b, kind: ModeKind::Max }],
                        _ => vec![],
                    };
                    (Some(RatioCase::Case4b), modes, Some(Direction::Decreasing))
                }
            }
        }
    };
    let expected_modes = match case {
        Some(RatioCase::Case2) | Some(RatioCase::Case3) => 1,
        Some(RatioCase::Case4b) => 2,
        _ => 0,
    };
    let shape = match case {
        Some(_) if modes.len() == expected_modes => Some(ShapeReport::from_directions(first, modes, Vec::new())),
        Some(_) => {
            cert.note("sign change of δ not located on the grid");
            None
        }
        None => None,
    };
    Ok(RatioPrediction {
        case,
        shape,
        p_star,
        certificate: cert,
    })
}

/// Verdicts for all six orders.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub verdicts: Vec<OrderVerdict>,
    /// Oracle verdicts, present for [`MethodChoice::Both`].
    pub oracle: Option<Vec<OrderVerdict>>,
    /// Orders where both methods were determinate and disagreed.
    pub disagreements: Vec<Order>,
    pub ratio_shape: Option<ShapeReport>,
}

impl Comparison {
    pub fn get(&self, order: Order) -> &OrderVerdict {
        self.verdicts
            .iter()
            .find(|v| v.order == order)
            .expect("every order has a verdict")
    }
}

/// The order of evaluation used by [`compare_all`].
const RUN_ORDER: [Order; 6] = [Order::Convex, Order::Qmit, Order::Dmrl, Order::Star, Order::Ps, Order::Nbue];

/// Runs every order check and verifies the result against the implication
/// diagram.
pub fn compare_all(x: &QuantileModel, y: &QuantileModel, opts: &CompareOptions) -> Result<Comparison> {
    x.mean()?;
    y.mean()?;
    let mut c = Comparator::new(x, y, *opts)?;
    let mut verdicts = Vec::with_capacity(6);
    for o in RUN_ORDER {
        verdicts.push(c.verdict(o)?);
    }
    verdicts.sort_by_key(|v| v.order);
    check_implications(&verdicts, c.zero_lower)?;
    let (oracle, disagreements) = if opts.method == MethodChoice::Both {
        let mut ov = Vec::with_capacity(6);
        for o in Order::ALL {
            ov.push(c.oracle(o)?);
        }
        check_implications(&ov, c.zero_lower)?;
        let dis = verdicts
            .iter()
            .zip(&ov)
            .filter(|(t, o)| t.status.is_determinate() && o.status.is_determinate() && t.status != o.status)
            .map(|(t, _)| t.order)
            .collect();
        (Some(ov), dis)
    } else {
        (None, Vec::new())
    };
    Ok(Comparison {
        verdicts,
        oracle,
        disagreements,
        ratio_shape: c.shape.ok(),
    })
}

/// Implications `(stronger, weaker, needs both supports starting at 0)`.
pub const IMPLICATIONS: [(Order, Order, bool); 8] = [
    (Order::Convex, Order::Qmit, true),
    (Order::Convex, Order::Dmrl, true),
    (Order::Convex, Order::Star, true),
    (Order::Qmit, Order::Star, true),
    (Order::Dmrl, Order::Nbue, true),
    (Order::Star, Order::Ps, false),
    (Order::Star, Order::Nbue, false),
    (Order::Ps, Order::Nbue, false),
];

/// Fails when a determinate verdict contradicts an applicable implication.
pub fn check_implications(verdicts: &[OrderVerdict], zero_lower: bool) -> Result<()> {
    let status = |o: Order| verdicts.iter().find(|v| v.order == o).map(|v| v.status);
    for (strong, weak, needs_zero) in IMPLICATIONS {
        if needs_zero && !zero_lower {
            continue;
        }
        let (Some(s), Some(w)) = (status(strong), status(weak)) else {
            continue;
        };
        for (name, sd, wd) in [("X<=Y", s.forward(), w.forward()), ("Y<=X", s.reverse(), w.reverse())] {
            if sd == Some(true) && wd == Some(false) {
                return Err(Error::Consistency(format!(
                    "{strong} {name} holds ({s}) but {weak} does not ({w})"
                )));
            }
        }
    }
    Ok(())
}

fn single(order: Order, x: &QuantileModel, y: &QuantileModel) -> Result<OrderVerdict> {
    Comparator::new(x, y, CompareOptions::default())?.verdict(order)
}

pub fn check_convex(x: &QuantileModel, y: &QuantileModel) -> Result<OrderVerdict> {
    single(Order::Convex, x, y)
}

pub fn check_star(x: &QuantileModel, y: &QuantileModel) -> Result<OrderVerdict> {
    single(Order::Star, x, y)
}

pub fn check_qmit(x: &QuantileModel, y: &QuantileModel) -> Result<OrderVerdict> {
    single(Order::Qmit, x, y)
}

pub fn check_dmrl(x: &QuantileModel, y: &QuantileModel) -> Result<OrderVerdict> {
    single(Order::Dmrl, x, y)
}

pub fn check_ps(x: &QuantileModel, y: &QuantileModel) -> Result<OrderVerdict> {
    single(Order::Ps, x, y)
}

pub fn check_nbue(x: &QuantileModel, y: &QuantileModel) -> Result<OrderVerdict> {
    single(Order::Nbue, x, y)
}

pub fn predict_quantile_ratio_shape(x: &QuantileModel, y: &QuantileModel) -> Result<RatioPrediction> {
    Comparator::new(x, y, CompareOptions::default())?.predict_quantile_ratio_shape()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tukey_pair() -> (QuantileModel, QuantileModel) {
        (
            QuantileModel::tukey(4.0, 1.0, 2.5).unwrap(),
            QuantileModel::tukey(1.5, 1.0, 1.5).unwrap(),
        )
    }

    #[test]
    fn tukey_example_verdicts() {
        let (x, y) = tukey_pair();
        let c = compare_all(&x, &y, &CompareOptions::default()).unwrap();
        let st = |o| c.get(o).status;
        assert_eq!(st(Order::Convex), Status::BothDirectionsFail);
        assert_eq!(st(Order::Star), Status::Holds);
        assert_eq!(st(Order::Qmit), Status::BothDirectionsFail);
        assert_eq!(st(Order::Dmrl), Status::BothDirectionsFail);
        assert_eq!(st(Order::Ps), Status::Holds);
        assert_eq!(st(Order::Nbue), Status::Holds);
        assert_eq!(c.get(Order::Ps).method, Method::Implication);
        for v in &c.verdicts {
            assert_ne!(v.method, Method::NumericFallback, "{:?}", v.certificate);
        }
    }

    #[test]
    fn identical_models_are_equivalent() {
        let x = QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap();
        let c = compare_all(&x, &x, &CompareOptions::default()).unwrap();
        for v in &c.verdicts {
            assert_eq!(v.status, Status::Equivalent, "{}", v.order);
        }
    }

    #[test]
    fn scaled_model_is_equivalent_in_star() {
        let x = QuantileModel::tukey(2.0, 1.0, 1.5).unwrap();
        let y = x.scaled(3.0).unwrap();
        assert_eq!(check_star(&x, &y).unwrap().status, Status::Equivalent);
        assert_eq!(check_ps(&x, &y).unwrap().status, Status::Equivalent);
    }

    #[test]
    fn prediction_case_one() {
        let (x, y) = tukey_pair();
        let p = predict_quantile_ratio_shape(&x, &y).unwrap();
        assert_eq!(p.case, Some(RatioCase::Case1));
        assert_eq!(p.shape.unwrap().classification, Classification::Increasing);
    }

    #[test]
    fn prediction_needs_unimodal_ratio() {
        let x = QuantileModel::unit_exponential();
        let y = QuantileModel::exponential(2.0).unwrap();
        assert!(matches!(predict_quantile_ratio_shape(&x, &y), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn negative_support_refused() {
        let x = QuantileModel::tukey(1.0, 2.0, 3.0).unwrap();
        let y = QuantileModel::unit_exponential();
        assert!(matches!(check_star(&x, &y), Err(Error::Refused(_))));
    }

    #[test]
    fn dmrl_records_literal_reading() {
        let (x, y) = tukey_pair();
        let v = check_dmrl(&x, &y).unwrap();
        assert!(v.certificate.notes.iter().any(|n| n.contains("literal reading")));
        assert!(v.certificate.notes.iter().any(|n| n.contains("disagrees")));
    }

    #[test]
    fn both_methods_agree_on_example() {
        let (x, y) = tukey_pair();
        let opts = CompareOptions {
            method: MethodChoice::Both,
            ..Default::default()
        };
        let c = compare_all(&x, &y, &opts).unwrap();
        assert!(c.disagreements.is_empty(), "{:?}", c.disagreements);
    }
}
