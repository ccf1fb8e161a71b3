//! Aging classes of a single lifetime distribution.
//!
//! Against the unit exponential `E`, the quantile-density ratio `qd_E/qd_X`
//! is the hazard rate at the quantile, `r(Q_X(p))`. The aging classes are
//! then order relations with `E`: IFR is the convex transform order, DMRL the
//! dmrl order, IHRWA the qmit order and IFRA the star-shaped order.
//!
//! For bathtub and upside-down bathtub hazards each class is decided from
//! endpoint limits and the hazard mode. Every class is also recomputed
//! through the order engine, and the two routes must agree.

use crate::delta::{centered_delta_limit, delta, delta_limit, ratio_limit};
use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::limit::Endpoint;
use crate::model::QuantileModel;
use crate::oracle::{coarse_shape, OracleCurves};
use crate::order::{Certificate, CompareOptions, Comparator, Order, OrderVerdict, Quantity, Relation, Status, Tri};
use crate::prob::Prob;
use crate::shape::{find_shape, ratio_qd, Classification, Mode, ShapeReport};

/// Reversals smaller than this, relative, are ignored when segmenting
/// integrated curves.
const CURVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HazardShape {
    Increasing,
    Decreasing,
    /// Bathtub: decreasing, then increasing.
    Bt,
    /// Upside-down bathtub: increasing, then decreasing.
    Ubt,
    NModal(usize),
    Constant,
}

impl HazardShape {
    pub fn label(self) -> String {
        match self {
            HazardShape::Increasing => "Increasing".into(),
            HazardShape::Decreasing => "Decreasing".into(),
            HazardShape::Bt => "BT".into(),
            HazardShape::Ubt => "UBT".into(),
            HazardShape::NModal(n) => format!("NModal({n})"),
            HazardShape::Constant => "Constant".into(),
        }
    }

    fn from_classification(c: Classification) -> Self {
        match c {
            Classification::Constant => HazardShape::Constant,
            Classification::Increasing => HazardShape::Increasing,
            Classification::Decreasing => HazardShape::Decreasing,
            Classification::UnimodalMin => HazardShape::Bt,
            Classification::UnimodalMax => HazardShape::Ubt,
            Classification::NModal(n) => HazardShape::NModal(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardReport {
    pub shape: HazardShape,
    pub modes: Vec<Mode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrlClass {
    Dmrl,
    Imrl,
    Bt,
    Ubt,
    /// Constant mean residual life: both DMRL and IMRL.
    Constant,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IhrwaClass {
    Ihrwa,
    Dhrwa,
    Ubt,
    Bt,
    /// Constant weighted average: both IHRWA and DHRWA.
    Constant,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfraClass {
    Ifra,
    Dfra,
    Neither,
    /// Constant hazard on average: both IFRA and DFRA.
    Both,
    Inconclusive,
}

impl MrlClass {
    pub fn label(self) -> &'static str {
        match self {
            MrlClass::Dmrl => "DMRL",
            MrlClass::Imrl => "IMRL",
            MrlClass::Bt => "BT",
            MrlClass::Ubt => "UBT",
            MrlClass::Constant => "Constant",
            MrlClass::Inconclusive => "Inconclusive",
        }
    }

    /// `(DMRL holds, IMRL holds)`.
    fn directions(self) -> Option<(bool, bool)> {
        match self {
            MrlClass::Dmrl => Some((true, false)),
            MrlClass::Imrl => Some((false, true)),
            MrlClass::Bt | MrlClass::Ubt => Some((false, false)),
            MrlClass::Constant => Some((true, true)),
            MrlClass::Inconclusive => None,
        }
    }

    fn from_shape(s: &ShapeReport) -> Self {
        match s.classification {
            Classification::Constant => MrlClass::Constant,
            Classification::Decreasing => MrlClass::Dmrl,
            Classification::Increasing => MrlClass::Imrl,
            Classification::UnimodalMin => MrlClass::Bt,
            Classification::UnimodalMax => MrlClass::Ubt,
            Classification::NModal(_) => MrlClass::Inconclusive,
        }
    }
}

impl IhrwaClass {
    pub fn label(self) -> &'static str {
        match self {
            IhrwaClass::Ihrwa => "IHRWA",
            IhrwaClass::Dhrwa => "DHRWA",
            IhrwaClass::Ubt => "UBT",
            IhrwaClass::Bt => "BT",
            IhrwaClass::Constant => "Constant",
            IhrwaClass::Inconclusive => "Inconclusive",
        }
    }

    /// `(IHRWA holds, DHRWA holds)`.
    fn directions(self) -> Option<(bool, bool)> {
        match self {
            IhrwaClass::Ihrwa => Some((true, false)),
            IhrwaClass::Dhrwa => Some((false, true)),
            IhrwaClass::Bt | IhrwaClass::Ubt => Some((false, false)),
            IhrwaClass::Constant => Some((true, true)),
            IhrwaClass::Inconclusive => None,
        }
    }

    fn from_shape(s: &ShapeReport) -> Self {
        match s.classification {
            Classification::Constant => IhrwaClass::Constant,
            Classification::Increasing => IhrwaClass::Ihrwa,
            Classification::Decreasing => IhrwaClass::Dhrwa,
            Classification::UnimodalMin => IhrwaClass::Bt,
            Classification::UnimodalMax => IhrwaClass::Ubt,
            Classification::NModal(_) => IhrwaClass::Inconclusive,
        }
    }
}

impl IfraClass {
    pub fn label(self) -> &'static str {
        match self {
            IfraClass::Ifra => "IFRA",
            IfraClass::Dfra => "DFRA",
            IfraClass::Neither => "Neither",
            IfraClass::Both => "Both",
            IfraClass::Inconclusive => "Inconclusive",
        }
    }

    /// `(IFRA holds, DFRA holds)`.
    fn directions(self) -> Option<(bool, bool)> {
        match self {
            IfraClass::Ifra => Some((true, false)),
            IfraClass::Dfra => Some((false, true)),
            IfraClass::Neither => Some((false, false)),
            IfraClass::Both => Some((true, true)),
            IfraClass::Inconclusive => None,
        }
    }

    fn from_status(s: Status) -> Self {
        match s {
            Status::Holds => IfraClass::Ifra,
            Status::HoldsReversed => IfraClass::Dfra,
            Status::BothDirectionsFail => IfraClass::Neither,
            Status::Equivalent => IfraClass::Both,
            Status::Inconclusive => IfraClass::Inconclusive,
        }
    }
}

/// Plot-ready curves on the working grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AgingCurves {
    pub p: Vec<f64>,
    pub hazard: Vec<f64>,
    pub mrl: Vec<f64>,
    /// `∫₀ᵖ q/(1−q) dq / ∫₀ᵖ q·qd_X(q) dq`, which moves with the hazard
    /// rate weighted average.
    pub weighted_average: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgingReport {
    pub hazard: HazardReport,
    pub mrl: MrlClass,
    pub ihrwa: IhrwaClass,
    pub ifra: IfraClass,
    /// Every limit and point value the classification used.
    pub evidence: Certificate,
    /// Shape of the weighted-average surrogate.
    pub weighted_average_shape: ShapeReport,
    /// Set when the closed-form reading and the surrogate could disagree on
    /// the weighted-average shape; says which one is reported.
    pub weighted_average_conflict: Option<String>,
    /// Order-engine verdicts against the unit exponential.
    pub cross_check: Vec<OrderVerdict>,
    pub curves: AgingCurves,
}

/// Hazard rate at the p-th quantile, `1 / ((1 − p)·qd(p))`.
pub fn hazard_quantile(x: &QuantileModel, p: f64) -> Result<f64> {
    let pr = Prob::new(p)?;
    Ok(hazard_at(x, pr))
}

fn hazard_at(x: &QuantileModel, p: Prob) -> f64 {
    thread_local! {
        static UNIT: QuantileModel = QuantileModel::unit_exponential();
    }
    UNIT.with(|e| ratio_qd(x, e, p))
}

/// `∫₀ᵖ q/(1−q) dq = −ln(1−p) − p`, accurate for small `p`.
fn exp_lower_moment(p: Prob) -> f64 {
    let v = p.value();
    if v < 0.25 {
        let mut term = v * v;
        let mut sum = 0.0f64;
        let mut k = 2.0;
        while term / k > 1e-18 * sum.max(f64::MIN_POSITIVE) {
            sum += term / k;
            term *= v;
            k += 1.0;
        }
        sum
    } else {
        -p.complement().ln() - v
    }
}

/// Segments the hazard quantile.
pub fn classify_hazard(x: &QuantileModel, grid: &GridConfig) -> Result<HazardReport> {
    match find_shape(|p| hazard_at(x, p), grid) {
        Ok(s) => Ok(HazardReport {
            shape: HazardShape::from_classification(s.classification),
            modes: s.modes,
        }),
        Err(Error::TooOscillatory { .. }) => {
            let pts = grid.points();
            let vals: Vec<f64> = pts.iter().map(|&p| hazard_at(x, p)).collect();
            let s = coarse_shape(&pts, &vals, CURVE_TOL)?;
            Ok(HazardReport {
                shape: HazardShape::NModal(s.modes.len()),
                modes: s.modes,
            })
        }
        Err(e) => Err(e),
    }
}

struct Analysis<'a> {
    x: &'a QuantileModel,
    e: &'a QuantileModel,
    hazard: HazardReport,
    curves: AgingCurves,
    mrl_shape: ShapeReport,
    wa_shape: ShapeReport,
    cmp: Comparator<'a>,
    evidence: Certificate,
}

impl<'a> Analysis<'a> {
    fn new(x: &'a QuantileModel, e: &'a QuantileModel, grid: &GridConfig) -> Result<Self> {
        let cmp = Comparator::new(
            x,
            e,
            CompareOptions {
                grid: *grid,
                ..Default::default()
            },
        )?;
        x.mean()?;
        let hazard = classify_hazard(x, grid)?;
        let mut oc = OracleCurves::new(x, e, grid);
        let lower = oc.lower(0)?.to_vec();
        let upper = oc.upper(0)?.to_vec();
        let pts = oc.grid.clone();
        let hazard_vals: Vec<f64> = pts.iter().map(|&p| hazard_at(x, p)).collect();
        let mrl: Vec<f64> = upper.iter().zip(&pts).map(|(m, p)| m / p.complement()).collect();
        let wa: Vec<f64> = lower.iter().zip(&pts).map(|(i, &p)| exp_lower_moment(p) / i).collect();
        let mrl_shape = coarse_shape(&pts, &mrl, CURVE_TOL)?;
        let wa_shape = coarse_shape(&pts, &wa, CURVE_TOL)?;
        Ok(Analysis {
            x,
            e,
            hazard,
            curves: AgingCurves {
                p: pts.iter().map(|p| p.value()).collect(),
                hazard: hazard_vals,
                mrl,
                weighted_average: wa,
            },
            mrl_shape,
            wa_shape,
            cmp,
            evidence: Certificate::new("aging classes against the unit exponential"),
        })
    }

    fn mode(&self) -> Prob {
        self.hazard.modes[0].p
    }

    fn mrl(&mut self) -> Result<MrlClass> {
        let shape = self.hazard.shape;
        match shape {
            HazardShape::Constant => return Ok(MrlClass::Constant),
            HazardShape::Bt | HazardShape::Ubt => {}
            _ => {
                self.evidence.note(format!(
                    "mrl class from the mean residual quantile shape ({})",
                    self.mrl_shape.classification.label()
                ));
                return Ok(MrlClass::from_shape(&self.mrl_shape));
            }
        }
        let r0 = ratio_limit(self.x, self.e, Endpoint::Zero).kind.as_extended();
        let inv_mean = 1.0 / self.x.mean()?;
        self.evidence.fact("r(0+) against 1/E[X]", r0, inv_mean, Relation::AtMost, r0 <= inv_mean);
        // Φ(0+) = 1 − r(0+)·(E[X] − l).
        let phi = Quantity::limit(&centered_delta_limit(self.x, self.e, Endpoint::Zero)?);
        let class = if shape == HazardShape::Bt {
            match self.evidence.check("1 - r(0+)(E[X]-l) [DMRL iff >= 0]", phi, Relation::AtLeast) {
                Tri::Yes => MrlClass::Dmrl,
                Tri::No => MrlClass::Ubt,
                Tri::Unsure => self.mrl_fallback(),
            }
        } else {
            match self.evidence.check("1 - r(0+)(E[X]-l) [IMRL iff <= 0]", phi, Relation::AtMost) {
                Tri::Yes => MrlClass::Imrl,
                Tri::No => MrlClass::Bt,
                Tri::Unsure => self.mrl_fallback(),
            }
        };
        Ok(class)
    }

    fn mrl_fallback(&mut self) -> MrlClass {
        self.evidence.note("mrl limit undecided; class taken from the mean residual quantile shape");
        MrlClass::from_shape(&self.mrl_shape)
    }

    fn ihrwa(&mut self) -> Result<(IhrwaClass, Option<String>)> {
        let shape = self.hazard.shape;
        let observed = IhrwaClass::from_shape(&self.wa_shape);
        match shape {
            HazardShape::Constant => return Ok((IhrwaClass::Constant, None)),
            HazardShape::Bt | HazardShape::Ubt => {}
            _ => {
                self.evidence.note(format!(
                    "weighted-average class from the surrogate shape ({})",
                    self.wa_shape.classification.label()
                ));
                return Ok((observed, None));
            }
        }
        // Φ(1−) = r(Q(p))·(Q(p) − E[X]) + log(1 − p) + 1 at 1−.
        let phi = Quantity::limit(&centered_delta_limit(self.x, self.e, Endpoint::One)?);
        let (t, hit, otherwise) = if shape == HazardShape::Ubt {
            let t = self.evidence.check("r(Q)(Q-E[X])+log(1-p)+1 at 1- [IHRWA iff >= 0]", phi, Relation::AtLeast);
            (t, IhrwaClass::Ihrwa, IhrwaClass::Ubt)
        } else {
            let t = self.evidence.check("r(Q)(Q-E[X])+log(1-p)+1 at 1- [DHRWA iff <= 0]", phi, Relation::AtMost);
            (t, IhrwaClass::Dhrwa, IhrwaClass::Bt)
        };
        match t {
            Tri::Yes => Ok((hit, None)),
            Tri::Unsure => {
                self.evidence.note("weighted-average limit undecided; class taken from the surrogate shape");
                Ok((self.surrogate_or(observed, None)?, None))
            }
            Tri::No => {
                let reported = self.surrogate_or(observed, Some(otherwise))?;
                let msg = format!(
                    "weighted average is not monotone; the endpoint condition alone suggests {} but cannot tell BT from UBT, so the reported shape {} comes from the numeric surrogate checked against the qmit order",
                    otherwise.label(),
                    reported.label()
                );
                Ok((reported, Some(msg)))
            }
        }
    }

    /// The surrogate shape, unless the qmit verdict against Exp(1) rules it
    /// out. That happens when the hazard turns within one grid cell of an
    /// endpoint and the surrogate misses the turn.
    fn surrogate_or(&mut self, observed: IhrwaClass, otherwise: Option<IhrwaClass>) -> Result<IhrwaClass> {
        let v = self.cmp.verdict(Order::Qmit)?;
        let (Some(f), Some(r)) = (v.status.forward(), v.status.reverse()) else {
            return Ok(observed);
        };
        if observed.directions() == Some((f, r)) {
            return Ok(observed);
        }
        let replacement = match (f, r) {
            (true, true) => IhrwaClass::Constant,
            (true, false) => IhrwaClass::Ihrwa,
            (false, true) => IhrwaClass::Dhrwa,
            (false, false) => otherwise.unwrap_or(IhrwaClass::Inconclusive),
        };
        self.evidence.note(format!(
            "surrogate shape {} contradicts the qmit order against Exp(1) ({}); reporting {}",
            observed.label(),
            v.status,
            replacement.label()
        ));
        Ok(replacement)
    }

    fn ifra(&mut self) -> Result<IfraClass> {
        let shape = self.hazard.shape;
        match shape {
            HazardShape::Constant => return Ok(IfraClass::Both),
            HazardShape::Bt | HazardShape::Ubt => {}
            _ => {
                let v = self.cmp.verdict(Order::Star)?;
                self.evidence.note(format!("IFRA class from the star-shaped order against Exp(1): {}", v.status));
                return Ok(IfraClass::from_status(v.status));
            }
        }
        let d0 = Quantity::limit(&delta_limit(self.x, self.e, Endpoint::Zero));
        let d1 = Quantity::limit(&delta_limit(self.x, self.e, Endpoint::One));
        let p_star = self.mode();
        let ds = Quantity::point(delta(self.x, self.e, p_star));
        let at = format!("p*={:.6}", p_star.value());
        let ev = &mut self.evidence;
        let (ifra, dfra) = if shape == HazardShape::Ubt {
            let ifra = ev
                .check("Q r(Q)+log(1-p) at 0+ [IFRA needs >= 0]", d0, Relation::AtLeast)
                .and(ev.check("Q r(Q)+log(1-p) at 1- [IFRA needs >= 0]", d1, Relation::AtLeast));
            let dfra = ev.check(format!("Q r(Q)+log(1-p) at {at} [DFRA iff <= 0]"), ds, Relation::AtMost);
            (ifra, dfra)
        } else {
            let dfra = ev
                .check("Q r(Q)+log(1-p) at 0+ [DFRA needs <= 0]", d0, Relation::AtMost)
                .and(ev.check("Q r(Q)+log(1-p) at 1- [DFRA needs <= 0]", d1, Relation::AtMost));
            let ifra = ev.check(format!("Q r(Q)+log(1-p) at {at} [IFRA iff >= 0]"), ds, Relation::AtLeast);
            (ifra, dfra)
        };
        Ok(match (ifra, dfra) {
            (Tri::Yes, Tri::No) => IfraClass::Ifra,
            (Tri::No, Tri::Yes) => IfraClass::Dfra,
            (Tri::No, Tri::No) => IfraClass::Neither,
            _ => {
                self.evidence.note("IFRA conditions undecided; class taken from the grid oracle for the quantile ratio");
                let v = self.cmp.oracle(Order::Star)?;
                IfraClass::from_status(v.status)
            }
        })
    }
}

fn cross_check(name: &str, class: Option<(bool, bool)>, v: &OrderVerdict) -> Result<()> {
    let (Some((f, r)), Some(vf), Some(vr)) = (class, v.status.forward(), v.status.reverse()) else {
        return Ok(());
    };
    if (f, r) != (vf, vr) {
        return Err(Error::Consistency(format!(
            "{name} class (increasing: {f}, decreasing: {r}) disagrees with the {} order against Exp(1): {} via {} [{}; conditions: {}]",
            v.order,
            v.status,
            v.method.label(),
            v.certificate.theorem,
            v.certificate
                .conditions
                .iter()
                .map(|c| format!("{} = {}", c.name, c.value))
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    Ok(())
}

/// Classifies `x` and checks the classes against the order engine.
pub fn aging_report(x: &QuantileModel, grid: &GridConfig) -> Result<AgingReport> {
    let e = QuantileModel::unit_exponential();
    let mut a = Analysis::new(x, &e, grid)?;
    let mrl = a.mrl()?;
    let (ihrwa, conflict) = a.ihrwa()?;
    let ifra = a.ifra()?;

    let mut checks = Vec::new();
    for o in [Order::Convex, Order::Dmrl, Order::Qmit, Order::Star] {
        checks.push(a.cmp.verdict(o)?);
    }
    let ifr = match a.hazard.shape {
        HazardShape::Increasing => Some((true, false)),
        HazardShape::Decreasing => Some((false, true)),
        HazardShape::Constant => Some((true, true)),
        _ => Some((false, false)),
    };
    cross_check("hazard", ifr, &checks[0])?;
    cross_check("mrl", mrl.directions(), &checks[1])?;
    cross_check("weighted-average", ihrwa.directions(), &checks[2])?;
    cross_check("IFRA", ifra.directions(), &checks[3])?;

    // IFR ⇒ IHRWA ⇒ IFRA and IFR ⇒ DMRL, in both directions.
    for dir in [0usize, 1] {
        let pick = |c: Option<(bool, bool)>| c.map(|(f, r)| if dir == 0 { f } else { r });
        let chain = [
            ("IFR", pick(ifr), "IHRWA", pick(ihrwa.directions())),
            ("IHRWA", pick(ihrwa.directions()), "IFRA", pick(ifra.directions())),
            ("IFR", pick(ifr), "DMRL", pick(mrl.directions())),
        ];
        for (s, sv, w, wv) in chain {
            if sv == Some(true) && wv == Some(false) {
                let side = if dir == 0 { "increasing" } else { "decreasing" };
                return Err(Error::Consistency(format!("{s} holds ({side} side) but {w} does not")));
            }
        }
    }

    Ok(AgingReport {
        hazard: a.hazard.clone(),
        mrl,
        ihrwa,
        ifra,
        evidence: a.evidence,
        weighted_average_shape: a.wa_shape,
        weighted_average_conflict: conflict,
        cross_check: checks,
        curves: a.curves,
    })
}

pub fn classify_mrl(x: &QuantileModel) -> Result<MrlClass> {
    Ok(aging_report(x, &GridConfig::default())?.mrl)
}

pub fn classify_ihrwa(x: &QuantileModel) -> Result<IhrwaClass> {
    Ok(aging_report(x, &GridConfig::default())?.ihrwa)
}

pub fn classify_ifra(x: &QuantileModel) -> Result<IfraClass> {
    Ok(aging_report(x, &GridConfig::default())?.ifra)
}
