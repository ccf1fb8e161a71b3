//! Samples, empirical quantiles and the Q-Q transform diagnostic.

use std::path::Path;

use crate::error::{Error, Result};
use crate::prob::Prob;

/// Sorted, finite observations; at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data {
                record: bad + 1,
                line: 0,
                message: "value is not finite".into(),
            });
        }
        if values.len() < 2 {
            return Err(Error::Data {
                record: values.len(),
                line: 0,
                message: format!("at least 2 values are required, found {}", values.len()),
            });
        }
        values.sort_by(f64::total_cmp);
        Ok(SampleSet { values })
    }

    /// Parses comma- or newline-separated numbers. A single non-numeric first
    /// record is taken to be a header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut record = 0;
        let mut first = true;
        for (line_idx, line) in text.lines().enumerate() {
            for field in line.split(',') {
                let field = field.trim();
                if field.is_empty() {
                    continue;
                }
                record += 1;
                match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    Ok(_) => {
                        return Err(Error::Data {
                            record,
                            line: line_idx + 1,
                            message: format!("value `{field}` is not finite"),
                        })
                    }
                    Err(_) if first && line_idx == 0 => {}
                    Err(_) => {
                        return Err(Error::Data {
                            record,
                            line: line_idx + 1,
                            message: format!("`{field}` is not a number"),
                        })
                    }
                }
                first = false;
            }
        }
        if record == 0 {
            return Err(Error::Data {
                record: 0,
                line: 0,
                message: "no records".into(),
            });
        }
        SampleSet::new(values)
    }

    /// Reads samples from a file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        SampleSet::parse(&text)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// The `⌈n·p⌉`-th order statistic.
    pub fn quantile(&self, p: Prob) -> f64 {
        let n = self.values.len();
        let k = ((n as f64) * p.value()).ceil() as usize;
        self.values[k.clamp(1, n) - 1]
    }
}

/// Reads samples from a file.
pub fn load_samples(path: impl AsRef<Path>) -> Result<SampleSet> {
    SampleSet::load(path)
}

/// Left-continuous generalized inverse of the empirical distribution.
pub fn empirical_quantile(s: &SampleSet, p: f64) -> Result<f64> {
    Ok(s.quantile(Prob::new(p)?))
}

/// Points `(x_(i), G_m⁻¹(i/(n+1)))` for the sorted sample `sx`.
pub fn qq_transform(sx: &SampleSet, sy: &SampleSet) -> Vec<(f64, f64)> {
    let n = sx.len();
    sx.values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = Prob::from_parts((i + 1) as f64 / (n + 1) as f64, (n - i) as f64 / (n + 1) as f64);
            (x, sy.quantile(p))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvePattern {
    Linear,
    Convex,
    Concave,
    ConvexThenConcave,
    ConcaveThenConvex,
    Mixed,
}

impl CurvePattern {
    pub fn label(self) -> &'static str {
        match self {
            CurvePattern::Linear => "linear",
            CurvePattern::Convex => "convex",
            CurvePattern::Concave => "concave",
            CurvePattern::ConvexThenConcave => "convex-then-concave",
            CurvePattern::ConcaveThenConvex => "concave-then-convex",
            CurvePattern::Mixed => "mixed",
        }
    }
}

/// Result of [`convexity_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityDiagnostic {
    pub pattern: CurvePattern,
    /// Signs (-1, 0, 1) of the second divided differences, after filtering.
    pub signs: Vec<i8>,
    /// Minimum run length kept by the filter.
    pub min_run: usize,
    pub warnings: Vec<String>,
}

/// Classifies the curvature of a curve from the signs of its second divided
/// differences, suppressing runs shorter than `⌈n/20⌉`.
pub fn convexity_scan(curve: &[(f64, f64)]) -> Result<ConvexityDiagnostic> {
    let n = curve.len();
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "convexity scan needs at least 4 points, got {n}"
        )));
    }
    let mut warnings = Vec::new();
    let mut pts = curve.to_vec();
    // Spread exact duplicate abscissae apart by a few ulps.
    let mut duplicates = 0;
    for i in 1..n {
        if pts[i].0 <= pts[i - 1].0 {
            if pts[i].0 < pts[i - 1].0 {
                return Err(Error::InvalidParameter("curve abscissae must be non-decreasing".into()));
            }
            duplicates += 1;
            let base = pts[i - 1].0;
            let step = (base.abs() * 1e-12).max(1e-300);
            pts[i].0 = base + step;
        }
    }
    if duplicates > 0 {
        warnings.push(format!("{duplicates} duplicate abscissae were jittered"));
        if pts.windows(2).any(|w| w[1].0 <= w[0].0) {
            warnings.push("degenerate curve: abscissae still not strictly increasing after jitter".into());
        }
    }

    let scale = pts.iter().fold(0.0_f64, |m, p| m.max(p.1.abs()));
    let slope = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (b.0 - a.0);
    let mut raw: Vec<i8> = Vec::with_capacity(n - 2);
    for w in pts.windows(3) {
        let s1 = slope(w[0], w[1]);
        let s2 = slope(w[1], w[2]);
        let d = s2 - s1;
        let tol = 1e-9 * (s1.abs().max(s2.abs())).max(1e-12 * scale);
        raw.push(if d.abs() <= tol || !d.is_finite() {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        });
    }

    let min_run = n.div_ceil(20).max(1);
    // Runs of non-zero signs shorter than the minimum are treated as noise.
    let mut signs = raw.clone();
    let mut i = 0;
    while i < raw.len() {
        let mut j = i;
        while j < raw.len() && raw[j] == raw[i] {
            j += 1;
        }
        if raw[i] != 0 && j - i < min_run {
            for s in &mut signs[i..j] {
                *s = 0;
            }
        }
        i = j;
    }

    let mut runs: Vec<i8> = Vec::new();
    for &s in signs.iter().filter(|s| **s != 0) {
        if runs.last() != Some(&s) {
            runs.push(s);
        }
    }
    let pattern = match runs.as_slice() {
        [] => CurvePattern::Linear,
        [1] => CurvePattern::Convex,
        [-1] => CurvePattern::Concave,
        [1, -1] => CurvePattern::ConvexThenConcave,
        [-1, 1] => CurvePattern::ConcaveThenConvex,
        _ => CurvePattern::Mixed,
    };
    Ok(ConvexityDiagnostic {
        pattern,
        signs,
        min_run,
        warnings,
    })
}
