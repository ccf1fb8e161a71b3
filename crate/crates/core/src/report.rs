//! Deterministic JSON reports.
//!
//! Field order is fixed by construction and every float is printed with 17
//! significant digits, so identical inputs give byte-identical output.
//! Non-finite values become the strings `"inf"`, `"-inf"` and `"nan"`.

use std::fmt::Write as _;

use crate::aging::AgingReport;
use crate::empirical::ConvexityDiagnostic;
use crate::oracle::GridVerdict;
use crate::order::{Certificate, Comparison, OrderVerdict, RatioPrediction};
use crate::shape::ShapeReport;

/// Version of the report layout.
pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl From<f64> for Json {
    fn from(v: f64) -> Self {
        Json::Num(v)
    }
}

impl From<bool> for Json {
    fn from(v: bool) -> Self {
        Json::Bool(v)
    }
}

impl From<usize> for Json {
    fn from(v: usize) -> Self {
        Json::Int(v as i64)
    }
}

impl From<&str> for Json {
    fn from(v: &str) -> Self {
        Json::Str(v.to_string())
    }
}

impl From<String> for Json {
    fn from(v: String) -> Self {
        Json::Str(v)
    }
}

impl<T: Into<Json>> From<Option<T>> for Json {
    fn from(v: Option<T>) -> Self {
        v.map_or(Json::Null, Into::into)
    }
}

/// Builds an object from `(key, value)` pairs, keeping their order.
pub fn obj<const N: usize>(fields: [(&str, Json); N]) -> Json {
    Json::Obj(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

pub fn arr<T, I: IntoIterator<Item = T>>(items: I, f: impl Fn(T) -> Json) -> Json {
    Json::Arr(items.into_iter().map(f).collect())
}

/// 17 significant digits, enough to round-trip any double.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "\"nan\"".into()
    } else if v == f64::INFINITY {
        "\"inf\"".into()
    } else if v == f64::NEG_INFINITY {
        "\"-inf\"".into()
    } else if v == 0.0 {
        // Normalise the sign of zero.
        "0.0000000000000000e0".into()
    } else {
        format!("{v:.16e}")
    }
}

fn escape(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialise")
}

impl Json {
    /// Pretty-printed with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        let pad = |out: &mut String, d: usize| {
            for _ in 0..d {
                out.push_str("  ");
            }
        };
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(v) => out.push_str(&format_number(*v)),
            Json::Str(s) => out.push_str(&escape(s)),
            Json::Arr(items) if items.is_empty() => out.push_str("[]"),
            Json::Obj(fields) if fields.is_empty() => out.push_str("{}"),
            Json::Arr(items) => {
                out.push_str("[\n");
                for (i, it) in items.iter().enumerate() {
                    pad(out, depth + 1);
                    it.write(out, depth + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, depth);
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    pad(out, depth + 1);
                    out.push_str(&escape(k));
                    out.push_str(": ");
                    v.write(out, depth + 1);
                    out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
                }
                pad(out, depth);
                out.push('}');
            }
        }
    }

    /// Appends a field to an object; no effect on other variants.
    pub fn push(&mut self, key: &str, value: Json) {
        if let Json::Obj(fields) = self {
            fields.push((key.to_string(), value));
        }
    }
}

pub fn shape_json(s: &ShapeReport) -> Json {
    obj([
        ("classification", s.classification.label().into()),
        (
            "modes",
            arr(&s.modes, |m| obj([("p", m.p.value().into()), ("kind", m.kind.label().into())])),
        ),
        (
            "segments",
            arr(&s.segments, |g| {
                obj([
                    ("from", g.from.into()),
                    ("to", g.to.into()),
                    ("direction", g.direction.label().into()),
                ])
            }),
        ),
        (
            "plateaus",
            arr(&s.plateaus, |&(a, b)| Json::Arr(vec![a.into(), b.into()])),
        ),
    ])
}

pub fn certificate_json(c: &Certificate) -> Json {
    obj([
        ("theorem", c.theorem.as_str().into()),
        (
            "conditions",
            arr(&c.conditions, |k| {
                obj([
                    ("name", k.name.as_str().into()),
                    ("value", k.value.into()),
                    ("relation", k.relation.symbol().into()),
                    ("threshold", k.threshold.into()),
                    ("satisfied", k.satisfied.into()),
                    ("source", k.source.into()),
                ])
            }),
        ),
        ("notes", arr(&c.notes, |n| n.as_str().into())),
    ])
}

pub fn grid_verdict_json(g: &GridVerdict) -> Json {
    let exc = |e: &crate::oracle::Excursion| {
        obj([
            ("from", e.from.into()),
            ("to", e.to.into()),
            ("magnitude", e.magnitude.into()),
        ])
    };
    obj([
        ("status", g.status.label().into()),
        ("n", g.n.into()),
        ("rise", exc(&g.rise)),
        ("drop", exc(&g.drop)),
        ("worst_violation", g.worst_violation.as_ref().map_or(Json::Null, exc)),
        ("margin", g.margin.into()),
        ("decisive", g.decisive.into()),
    ])
}

pub fn verdict_json(v: &OrderVerdict) -> Json {
    obj([
        ("order", v.order.label().into()),
        ("status", v.status.label().into()),
        ("method", v.method.label().into()),
        ("certificate", certificate_json(&v.certificate)),
        ("oracle", v.oracle.as_ref().map_or(Json::Null, grid_verdict_json)),
    ])
}

pub fn prediction_json(p: &RatioPrediction) -> Json {
    obj([
        ("case", p.case.map(|c| c.label()).into()),
        ("p_star", p.p_star.value().into()),
        ("shape", p.shape.as_ref().map_or(Json::Null, shape_json)),
        ("certificate", certificate_json(&p.certificate)),
    ])
}

/// Report body for a comparison; callers add header fields first.
pub fn comparison_fields(c: &Comparison, out: &mut Json) {
    out.push("ratio_shape", c.ratio_shape.as_ref().map_or(Json::Null, shape_json));
    out.push("verdicts", arr(&c.verdicts, verdict_json));
    if let Some(o) = &c.oracle {
        out.push("oracle_verdicts", arr(o, verdict_json));
    }
    out.push("disagreements", arr(&c.disagreements, |o| o.label().into()));
}

pub fn aging_fields(r: &AgingReport, out: &mut Json) {
    out.push(
        "hazard",
        obj([
            ("shape", r.hazard.shape.label().into()),
            (
                "modes",
                arr(&r.hazard.modes, |m| obj([("p", m.p.value().into()), ("kind", m.kind.label().into())])),
            ),
        ]),
    );
    out.push("mrl", r.mrl.label().into());
    out.push("ihrwa", r.ihrwa.label().into());
    out.push("ifra", r.ifra.label().into());
    out.push("weighted_average_shape", shape_json(&r.weighted_average_shape));
    out.push("weighted_average_conflict", r.weighted_average_conflict.clone().into());
    out.push("evidence", certificate_json(&r.evidence));
    out.push("cross_check", arr(&r.cross_check, verdict_json));
}

pub fn convexity_json(d: &ConvexityDiagnostic) -> Json {
    obj([
        ("pattern", d.pattern.label().into()),
        ("min_run", d.min_run.into()),
        ("signs", arr(&d.signs, |s| Json::Int(*s as i64))),
        ("warnings", arr(&d.warnings, |w| w.as_str().into())),
    ])
}

/// A report object starting with the schema version and command name.
pub fn header(command: &str) -> Json {
    obj([("schema", Json::Int(SCHEMA_VERSION)), ("command", command.into())])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(-0.0), "0.0000000000000000e0");
        assert_eq!(format_number(f64::INFINITY), "\"inf\"");
        assert_eq!(format_number(f64::NAN), "\"nan\"");
        let back: f64 = format_number(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn render_is_valid_json() {
        let mut j = header("test");
        j.push("x", Json::Arr(vec![1.5.into(), f64::NEG_INFINITY.into(), Json::Null]));
        j.push("s", "a \"quoted\" δ".into());
        j.push("empty", Json::Arr(vec![]));
        let text = j.render();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["x"][1], "-inf");
        assert_eq!(v["s"], "a \"quoted\" δ");
    }
}
