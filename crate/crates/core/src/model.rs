//! Quantile models: distributions described on the probability scale.

use std::fmt;
use std::sync::Arc;

use crate::dsl::{self, BinOp, Bindings, Expr, Func};
use crate::empirical::SampleSet;
use crate::error::{Error, Result};
use crate::grid::logit_grid;
use crate::limit::{limit_at, Endpoint, LimitKind};
use crate::prob::Prob;
use crate::quad::{self, QuadConfig};

/// Leading behaviour of the quantile density near an endpoint.
///
/// With `t` the distance to the endpoint, `qd ≈ coef · t^exponent`, and the
/// quantile function tends to `quantile` (possibly infinite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointBehavior {
    pub coef: f64,
    pub exponent: f64,
    pub quantile: f64,
}

/// `Q(p) = λ + η(p^α − (1−p)^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TukeyGeneralized {
    lambda: f64,
    eta: f64,
    alpha: f64,
}

impl TukeyGeneralized {
    /// Requires finite parameters, `η ≠ 0`, `α ≠ 0` and `ηα > 0` so that the
    /// quantile function is increasing.
    pub fn new(lambda: f64, eta: f64, alpha: f64) -> Result<Self> {
        if !(lambda.is_finite() && eta.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidParameter("Tukey parameters must be finite".into()));
        }
        if eta == 0.0 {
            return Err(Error::InvalidParameter("Tukey eta must be non-zero".into()));
        }
        if alpha == 0.0 {
            return Err(Error::InvalidParameter("Tukey alpha must be non-zero".into()));
        }
        if eta * alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Tukey eta*alpha must be positive for an increasing quantile, got eta={eta}, alpha={alpha}"
            )));
        }
        Ok(TukeyGeneralized { lambda, eta, alpha })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn q(&self, pr: Prob) -> f64 {
        self.lambda + self.eta * (pr.value().powf(self.alpha) - pr.complement().powf(self.alpha))
    }

    fn qd(&self, pr: Prob) -> f64 {
        let a1 = self.alpha - 1.0;
        self.eta * self.alpha * (pr.value().powf(a1) + pr.complement().powf(a1))
    }

    fn support(&self) -> (f64, f64) {
        if self.alpha > 0.0 {
            (self.lambda - self.eta, self.lambda + self.eta)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    }

    fn mean(&self) -> Result<f64> {
        if self.alpha > -1.0 {
            Ok(self.lambda)
        } else {
            Err(Error::NonFiniteMean(format!("Tukey alpha = {} <= -1", self.alpha)))
        }
    }

    fn behavior(&self, end: Endpoint) -> EndpointBehavior {
        let a = self.alpha;
        let (coef, exponent) = if a < 1.0 {
            (self.eta * a, a - 1.0)
        } else if a == 1.0 {
            (2.0 * self.eta, 0.0)
        } else {
            (self.eta * a, 0.0)
        };
        let (lo, hi) = self.support();
        let quantile = match end {
            Endpoint::Zero => lo,
            Endpoint::One => hi,
        };
        EndpointBehavior {
            coef,
            exponent,
            quantile,
        }
    }
}

/// `Q(p) = θ + σ((β+1)p^β − βp^{β+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Govindarajulu {
    theta: f64,
    sigma: f64,
    beta: f64,
}

impl Govindarajulu {
    pub fn new(theta: f64, sigma: f64, beta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter("Govindarajulu theta must be finite".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("Govindarajulu sigma must be positive, got {sigma}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("Govindarajulu beta must be positive, got {beta}")));
        }
        Ok(Govindarajulu { theta, sigma, beta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn q(&self, pr: Prob) -> f64 {
        let p = pr.value();
        let b = self.beta;
        self.theta + self.sigma * p.powf(b) * (b + 1.0 - b * p)
    }

    fn qd(&self, pr: Prob) -> f64 {
        let b = self.beta;
        self.sigma * b * (b + 1.0) * pr.value().powf(b - 1.0) * pr.complement()
    }

    fn behavior(&self, end: Endpoint) -> EndpointBehavior {
        let k = self.sigma * self.beta * (self.beta + 1.0);
        match end {
            Endpoint::Zero => EndpointBehavior {
                coef: k,
                exponent: self.beta - 1.0,
                quantile: self.theta,
            },
            Endpoint::One => EndpointBehavior {
                coef: k,
                exponent: 1.0,
                quantile: self.theta + self.sigma,
            },
        }
    }
}

/// A quantile function given by an expression, with an optional expression for
/// its derivative.
#[derive(Debug, Clone)]
pub struct DslModel {
    qf: Expr,
    qdf: Option<Expr>,
    bindings: Bindings,
    qf_bound: Expr,
    qdf_bound: Option<Expr>,
    support: (f64, f64),
    mean: std::result::Result<f64, Error>,
}

impl PartialEq for DslModel {
    fn eq(&self, other: &Self) -> bool {
        self.qf == other.qf && self.qdf == other.qdf && self.bindings == other.bindings
    }
}

/// Evaluates a bound expression, reading `1 - p` from the stored complement.
fn eval_at(e: &Expr, pr: Prob) -> Result<f64> {
    match e {
        Expr::Num(v) => Ok(*v),
        Expr::Var => Ok(pr.value()),
        Expr::Bin(BinOp::Sub, l, r) if **l == Expr::Num(1.0) && **r == Expr::Var => Ok(pr.complement()),
        Expr::Neg(i) => Ok(-eval_at(i, pr)?),
        Expr::Call(func, arg) => {
            let x = eval_at(arg, pr)?;
            let v = match func {
                Func::Log if x <= 0.0 => f64::NAN,
                Func::Log => x.ln(),
                Func::Exp => x.exp(),
                Func::Sqrt => x.sqrt(),
                Func::Abs => x.abs(),
            };
            if v.is_nan() {
                // Re-run through the checked evaluator for a precise message.
                return e.evaluate(pr.value(), &Bindings::new());
            }
            Ok(v)
        }
        Expr::Bin(op, l, r) => {
            let a = eval_at(l, pr)?;
            let b = eval_at(r, pr)?;
            let v = match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            };
            if v.is_nan() || (*op == BinOp::Div && b == 0.0) || (*op == BinOp::Pow && a == 0.0 && b < 0.0) {
                return Err(Error::EvalDomain {
                    expr: e.to_string(),
                    detail: format!("invalid operands {a} and {b}"),
                });
            }
            Ok(v)
        }
        Expr::Param(name) => Err(Error::UnboundParameter(name.clone())),
    }
}

/// Number of validation points for user-supplied quantile functions.
const DSL_VALIDATION_POINTS: usize = 1024;

impl DslModel {
    pub fn new(qf: Expr, qdf: Option<Expr>, bindings: Bindings) -> Result<Self> {
        let qf_bound = qf.bind(&bindings)?;
        let qdf_bound = qdf.as_ref().map(|e| e.bind(&bindings)).transpose()?;
        let mut model = DslModel {
            qf,
            qdf,
            bindings,
            qf_bound,
            qdf_bound,
            support: (f64::NEG_INFINITY, f64::INFINITY),
            mean: Ok(f64::NAN),
        };
        model.validate()?;
        model.support = (model.endpoint_value(Endpoint::Zero)?, model.endpoint_value(Endpoint::One)?);
        let cfg = QuadConfig::default();
        model.mean = quad::quadrature(|pr| model.q(pr), 0.0, 1.0, cfg.rel_tol).map_err(|e| match e {
            Error::DivergentIntegral { .. } | Error::QuadratureTolerance { .. } => {
                Error::NonFiniteMean(format!("integral of the quantile function: {e}"))
            }
            other => other,
        });
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let grid = logit_grid(DSL_VALIDATION_POINTS, 1e-8);
        let mut prev: Option<(Prob, f64)> = None;
        for pr in grid {
            let q = self.try_q(pr)?;
            if !q.is_finite() {
                return Err(Error::ModelIntegrity(format!(
                    "quantile function is not finite at p = {}",
                    pr.value()
                )));
            }
            if let Some((pp, pq)) = prev {
                if q <= pq {
                    return Err(Error::NotIncreasing {
                        p1: pp.value(),
                        q1: pq,
                        p2: pr.value(),
                        q2: q,
                    });
                }
            }
            if self.qdf_bound.is_some() {
                let d = self.try_qd(pr)?;
                if !(d > 0.0 && d.is_finite()) {
                    return Err(Error::ModelIntegrity(format!(
                        "quantile density {d} is not positive at p = {}",
                        pr.value()
                    )));
                }
            }
            prev = Some((pr, q));
        }
        Ok(())
    }

    fn endpoint_value(&self, end: Endpoint) -> Result<f64> {
        match limit_at(|pr| self.q(pr), end, None).kind {
            LimitKind::Indeterminate => Err(Error::ModelIntegrity(format!(
                "support endpoint at {} could not be determined",
                end.label()
            ))),
            k => Ok(k.as_extended()),
        }
    }

    fn try_q(&self, pr: Prob) -> Result<f64> {
        eval_at(&self.qf_bound, pr)
    }

    fn try_qd(&self, pr: Prob) -> Result<f64> {
        match &self.qdf_bound {
            Some(e) => eval_at(e, pr),
            None => {
                // A power-of-two step keeps p ± h and (1 - p) ∓ h exact.
                let h = (1e-6 * pr.edge_distance()).log2().floor().exp2();
                let up = self.try_q(pr.shifted(h))?;
                let down = self.try_q(pr.shifted(-h))?;
                Ok((up - down) / (2.0 * h))
            }
        }
    }

    fn q(&self, pr: Prob) -> f64 {
        self.try_q(pr).unwrap_or(f64::NAN)
    }

    pub fn quantile_expr(&self) -> &Expr {
        &self.qf
    }

    pub fn density_expr(&self) -> Option<&Expr> {
        self.qdf.as_ref()
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }
}

/// A distribution expressed through its quantile function.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantileModel {
    Tukey(TukeyGeneralized),
    Govindarajulu(Govindarajulu),
    /// Exponential with the given scale; scale 1 is the unit exponential.
    Exponential { scale: f64 },
    Dsl(Box<DslModel>),
    Empirical(Arc<SampleSet>),
    /// `factor · X` for a positive factor.
    Scaled { base: Arc<QuantileModel>, factor: f64 },
}

impl QuantileModel {
    pub fn tukey(lambda: f64, eta: f64, alpha: f64) -> Result<Self> {
        Ok(QuantileModel::Tukey(TukeyGeneralized::new(lambda, eta, alpha)?))
    }

    pub fn govindarajulu(theta: f64, sigma: f64, beta: f64) -> Result<Self> {
        Ok(QuantileModel::Govindarajulu(Govindarajulu::new(theta, sigma, beta)?))
    }

    pub fn unit_exponential() -> Self {
        QuantileModel::Exponential { scale: 1.0 }
    }

    pub fn exponential(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponential scale must be positive, got {scale}")));
        }
        Ok(QuantileModel::Exponential { scale })
    }

    pub fn dsl(qf: &str, qdf: Option<&str>, bindings: Bindings) -> Result<Self> {
        let qf = dsl::parse(qf)?;
        let qdf = qdf.map(dsl::parse).transpose()?;
        Ok(QuantileModel::Dsl(Box::new(DslModel::new(qf, qdf, bindings)?)))
    }

    pub fn empirical(samples: SampleSet) -> Self {
        QuantileModel::Empirical(Arc::new(samples))
    }

    /// The model of `factor · X`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {factor}")));
        }
        Ok(match self {
            QuantileModel::Scaled { base, factor: f } => QuantileModel::Scaled {
                base: base.clone(),
                factor: f * factor,
            },
            other => QuantileModel::Scaled {
                base: Arc::new(other.clone()),
                factor,
            },
        })
    }

    /// Quantile at a validated probability. Evaluation failures give NaN.
    pub fn q(&self, pr: Prob) -> f64 {
        match self {
            QuantileModel::Tukey(t) => t.q(pr),
            QuantileModel::Govindarajulu(g) => g.q(pr),
            QuantileModel::Exponential { scale } => {
                let l = if pr.value() <= 0.5 {
                    -(-pr.value()).ln_1p()
                } else {
                    -pr.complement().ln()
                };
                scale * l
            }
            QuantileModel::Dsl(d) => d.q(pr),
            QuantileModel::Empirical(s) => s.quantile(pr),
            QuantileModel::Scaled { base, factor } => factor * base.q(pr),
        }
    }

    /// Quantile density at a validated probability. Evaluation failures give NaN.
    pub fn qd(&self, pr: Prob) -> f64 {
        match self {
            QuantileModel::Tukey(t) => t.qd(pr),
            QuantileModel::Govindarajulu(g) => g.qd(pr),
            QuantileModel::Exponential { scale } => scale / pr.complement(),
            QuantileModel::Dsl(d) => d.try_qd(pr).unwrap_or(f64::NAN),
            QuantileModel::Empirical(_) => f64::NAN,
            QuantileModel::Scaled { base, factor } => factor * base.qd(pr),
        }
    }

    /// `F⁻¹(p)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let pr = Prob::new(p)?;
        let v = match self {
            QuantileModel::Dsl(d) => d.try_q(pr)?,
            _ => self.q(pr),
        };
        if v.is_nan() {
            return Err(Error::ModelIntegrity(format!("quantile is undefined at p = {p}")));
        }
        Ok(v)
    }

    /// `dF⁻¹/dp`.
    pub fn quantile_density(&self, p: f64) -> Result<f64> {
        let pr = Prob::new(p)?;
        if let QuantileModel::Empirical(_) = self {
            return Err(Error::Refused("an empirical model has no quantile density".into()));
        }
        let v = match self {
            QuantileModel::Dsl(d) => d.try_qd(pr)?,
            _ => self.qd(pr),
        };
        if v.is_nan() {
            return Err(Error::ModelIntegrity(format!("quantile density is undefined at p = {p}")));
        }
        Ok(v)
    }

    /// `f(F⁻¹(p)) = 1 / qd(p)`.
    pub fn density_at_quantile(&self, p: f64) -> Result<f64> {
        let d = self.quantile_density(p)?;
        if d <= 0.0 {
            return Err(Error::ModelIntegrity(format!(
                "quantile density {d} is not positive at p = {p}"
            )));
        }
        Ok(1.0 / d)
    }

    /// `E[X] = ∫₀¹ F⁻¹(q) dq`.
    pub fn mean(&self) -> Result<f64> {
        match self {
            QuantileModel::Tukey(t) => t.mean(),
            QuantileModel::Govindarajulu(g) => Ok(g.theta + 2.0 * g.sigma / (g.beta + 2.0)),
            QuantileModel::Exponential { scale } => Ok(*scale),
            QuantileModel::Dsl(d) => d.mean.clone(),
            QuantileModel::Empirical(s) => Ok(s.mean()),
            QuantileModel::Scaled { base, factor } => Ok(factor * base.mean()?),
        }
    }

    /// `(l, u)`: the limits of the quantile function at 0 and 1.
    pub fn support(&self) -> (f64, f64) {
        match self {
            QuantileModel::Tukey(t) => t.support(),
            QuantileModel::Govindarajulu(g) => (g.theta, g.theta + g.sigma),
            QuantileModel::Exponential { .. } => (0.0, f64::INFINITY),
            QuantileModel::Dsl(d) => d.support,
            QuantileModel::Empirical(s) => (s.min(), s.max()),
            QuantileModel::Scaled { base, factor } => {
                let (l, u) = base.support();
                (factor * l, factor * u)
            }
        }
    }

    /// Closed-form endpoint asymptotics, available for the parametric families.
    pub fn endpoint_behavior(&self, end: Endpoint) -> Option<EndpointBehavior> {
        match self {
            QuantileModel::Tukey(t) => Some(t.behavior(end)),
            QuantileModel::Govindarajulu(g) => Some(g.behavior(end)),
            QuantileModel::Exponential { scale } => Some(match end {
                Endpoint::Zero => EndpointBehavior {
                    coef: *scale,
                    exponent: 0.0,
                    quantile: 0.0,
                },
                Endpoint::One => EndpointBehavior {
                    coef: *scale,
                    exponent: -1.0,
                    quantile: f64::INFINITY,
                },
            }),
            QuantileModel::Scaled { base, factor } => base.endpoint_behavior(end).map(|b| EndpointBehavior {
                coef: b.coef * factor,
                exponent: b.exponent,
                quantile: b.quantile * factor,
            }),
            QuantileModel::Dsl(_) | QuantileModel::Empirical(_) => None,
        }
    }

    /// Whether the model has a usable quantile density.
    pub fn is_smooth(&self) -> bool {
        match self {
            QuantileModel::Empirical(_) => false,
            QuantileModel::Scaled { base, .. } => base.is_smooth(),
            _ => true,
        }
    }

    /// Parses a distribution spec string such as `tukey:4,1,2.5`, `exp1`,
    /// `govindarajulu:0,2,2`, `dsl:-log(1-p)` or `csv:samples.csv`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let bad = |reason: String| Error::Spec {
            spec: spec.to_string(),
            reason,
        };
        let (kind, rest) = match spec.split_once(':') {
            Some((k, r)) => (k.trim(), r),
            None => (spec.trim(), ""),
        };
        let numbers = |n: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = rest
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("bad number: {e}")))?;
            if v.len() != n {
                return Err(bad(format!("expected {n} comma-separated numbers, got {}", v.len())));
            }
            Ok(v)
        };
        match kind {
            "tukey" => {
                let v = numbers(3)?;
                Self::tukey(v[0], v[1], v[2])
            }
            "govindarajulu" => {
                let v = numbers(3)?;
                Self::govindarajulu(v[0], v[1], v[2])
            }
            "exp1" if rest.is_empty() => Ok(Self::unit_exponential()),
            "exp" => Self::exponential(numbers(1)?[0]),
            "dsl" => {
                let mut parts = rest.split(';');
                let qf = parts.next().unwrap_or("").trim().to_string();
                let mut qdf = None;
                let mut bindings = Bindings::new();
                for part in parts {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| bad(format!("expected name=value, got `{part}`")))?;
                    let (k, v) = (k.trim(), v.trim());
                    if k == "qdf" {
                        qdf = Some(v.to_string());
                    } else {
                        let x: f64 = v.parse().map_err(|_| bad(format!("bad value for `{k}`: `{v}`")))?;
                        bindings.insert(k.to_string(), x);
                    }
                }
                Self::dsl(&qf, qdf.as_deref(), bindings)
            }
            "csv" => Ok(Self::empirical(SampleSet::load(rest)?)),
            _ => Err(bad(
                "unknown family; expected tukey, govindarajulu, exp1, exp, dsl or csv".to_string(),
            )),
        }
    }
}

impl fmt::Display for QuantileModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantileModel::Tukey(t) => write!(f, "tukey:{:?},{:?},{:?}", t.lambda, t.eta, t.alpha),
            QuantileModel::Govindarajulu(g) => {
                write!(f, "govindarajulu:{:?},{:?},{:?}", g.theta, g.sigma, g.beta)
            }
            QuantileModel::Exponential { scale } if *scale == 1.0 => f.write_str("exp1"),
            QuantileModel::Exponential { scale } => write!(f, "exp:{scale:?}"),
            QuantileModel::Dsl(d) => {
                write!(f, "dsl:{}", d.qf)?;
                if let Some(q) = &d.qdf {
                    write!(f, ";qdf={q}")?;
                }
                for (k, v) in &d.bindings {
                    write!(f, ";{k}={v:?}")?;
                }
                Ok(())
            }
            QuantileModel::Empirical(s) => write!(f, "empirical[n={}]", s.len()),
            QuantileModel::Scaled { base, factor } => write!(f, "{factor:?}*({base})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn frozen_values() {
        let t = QuantileModel::tukey(4.0, 1.0, 2.5).unwrap();
        assert_eq!(t.quantile(0.5).unwrap(), 4.0);
        assert!(close(t.quantile_density(0.5).unwrap(), 1.767_766_952_966_368_8, 1e-15));

        let e = QuantileModel::unit_exponential();
        assert!(close(e.quantile(1.0 - (-1.0f64).exp()).unwrap(), 1.0, 1e-15));
        assert_eq!(e.quantile_density(0.5).unwrap(), 2.0);
        assert_eq!(e.density_at_quantile(0.5).unwrap(), 0.5);

        let g = QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap();
        assert!(close(g.quantile(1.0 / 3.0).unwrap(), 14.0 / 27.0, 1e-15));
        assert!(close(g.quantile_density(1.0 / 3.0).unwrap(), 8.0 / 3.0, 1e-15));
        assert!(close(g.density_at_quantile(1.0 / 3.0).unwrap(), 0.375, 1e-15));
    }

    #[test]
    fn means() {
        assert_eq!(QuantileModel::tukey(1.7, 0.3, 0.4).unwrap().mean().unwrap(), 1.7);
        assert_eq!(QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap().mean().unwrap(), 1.0);
        assert_eq!(QuantileModel::unit_exponential().mean().unwrap(), 1.0);
        assert!(matches!(
            QuantileModel::tukey(0.0, -1.0, -1.5).unwrap().mean(),
            Err(Error::NonFiniteMean(_))
        ));
    }

    #[test]
    fn parameter_validation() {
        assert!(QuantileModel::tukey(1.0, 0.0, 1.0).is_err());
        assert!(QuantileModel::tukey(1.0, 1.0, -1.0).is_err());
        assert!(QuantileModel::govindarajulu(0.0, 0.0, 1.0).is_err());
        assert!(QuantileModel::govindarajulu(0.0, 1.0, -1.0).is_err());
        assert!(QuantileModel::unit_exponential().quantile(0.0).is_err());
        assert!(QuantileModel::unit_exponential().quantile(1.0).is_err());
    }

    #[test]
    fn exponential_is_accurate_near_zero() {
        let e = QuantileModel::unit_exponential();
        let q = e.quantile(1e-12).unwrap();
        assert!((q - (1e-12 + 0.5e-24)).abs() < 1e-27);
    }

    #[test]
    fn specs() {
        let m = QuantileModel::from_spec("tukey:4,1,2.5").unwrap();
        assert_eq!(m, QuantileModel::tukey(4.0, 1.0, 2.5).unwrap());
        assert_eq!(m.to_string(), "tukey:4.0,1.0,2.5");
        assert_eq!(QuantileModel::from_spec("exp1").unwrap(), QuantileModel::unit_exponential());
        assert!(QuantileModel::from_spec("tukey:4,1").is_err());
        assert!(QuantileModel::from_spec("weibull:1,2").is_err());
        let d = QuantileModel::from_spec("dsl:l+e*(p^a-(1-p)^a);l=4;e=1;a=2.5").unwrap();
        assert_eq!(d.quantile(0.5).unwrap(), 4.0);
        assert!(QuantileModel::from_spec("dsl:a*p").is_err());
    }

    #[test]
    fn dsl_models() {
        let u = QuantileModel::dsl("p", None, Bindings::new()).unwrap();
        for &p in &[1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-6] {
            assert!((u.quantile_density(p).unwrap() - 1.0).abs() < 1e-6);
        }
        assert!((u.mean().unwrap() - 0.5).abs() < 1e-12);
        let (lo, hi) = u.support();
        assert!(lo.abs() < 1e-11 && (hi - 1.0).abs() < 1e-11, "{lo} {hi}");

        let e = QuantileModel::dsl("-log(1-p)", None, Bindings::new()).unwrap();
        assert!((e.mean().unwrap() - 1.0).abs() < 1e-8);
        let (lo, hi) = e.support();
        assert!(lo.abs() < 1e-11 && hi == f64::INFINITY, "{lo} {hi}");

        match QuantileModel::dsl("p*(1-p)", None, Bindings::new()) {
            Err(Error::NotIncreasing { p1, p2, .. }) => assert!(p1 < p2 && p1 >= 0.49),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scaled_model() {
        let g = QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap();
        let s = g.scaled(3.0).unwrap();
        assert_eq!(s.mean().unwrap(), 3.0);
        assert_eq!(s.support(), (0.0, 6.0));
        let pr = Prob::new(0.3).unwrap();
        assert_eq!(s.qd(pr), 3.0 * g.qd(pr));
        let twice = s.scaled(2.0).unwrap();
        assert!(matches!(twice, QuantileModel::Scaled { factor, .. } if factor == 6.0));
    }
}
