//! Region map for pairs of generalized Tukey models.
//!
//! Each cell pairs `Tukey(η₁+c, η₁, α₁)` with `Tukey(η₂+c, η₂, α₂)` and
//! records the closed-form region test next to the shape actually observed
//! for the quantile-density ratio, so the two can be compared cell by cell.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::model::QuantileModel;
use crate::order::{CompareOptions, Comparator, MethodChoice, Order, Status};
use crate::shape::{tukey_unimodal_region, Classification};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alpha1: (f64, f64),
    pub alpha2: (f64, f64),
    pub step: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// `λᵢ = ηᵢ + lambda_offset`.
    pub lambda_offset: f64,
    pub grid: GridConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alpha1: (0.05, 4.95),
            alpha2: (0.05, 4.95),
            step: 0.05,
            eta1: 1.0,
            eta2: 1.0,
            lambda_offset: 1.0,
            grid: GridConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha1: f64,
    pub alpha2: f64,
    /// `None` where the region test does not apply (α ∈ {1, 2} or α₁ = α₂).
    pub region: Option<bool>,
    /// Classification label, or `error:<kind>` when the shape could not be found.
    pub shape: String,
    pub star: String,
    pub qmit: String,
    pub dmrl: String,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "alpha1,alpha2,region,shape,star,qmit,dmrl";

    pub fn is_unimodal_max(&self) -> bool {
        self.shape == Classification::UnimodalMax.label()
    }

    pub fn to_csv(&self) -> String {
        let region = match self.region {
            Some(true) => "true",
            Some(false) => "false",
            None => "na",
        };
        format!(
            "{},{},{},{},{},{},{}",
            self.alpha1, self.alpha2, region, self.shape, self.star, self.qmit, self.dmrl
        )
    }
}

/// Values `lo, lo+step, …` up to `hi`, snapped to 12 decimals so that
/// grid points such as 1.0 and 2.0 are hit exactly.
pub fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("sweep step must be positive, got {step}")));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidParameter(format!("sweep range ({lo}, {hi}) is empty")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn error_label(e: &Error) -> String {
    format!("error:{}", e.kind())
}

fn status_label(r: Result<Status>) -> String {
    match r {
        Ok(s) => s.label().to_string(),
        Err(e) => error_label(&e),
    }
}

/// Evaluates one cell.
pub fn sweep_cell(cfg: &SweepConfig, alpha1: f64, alpha2: f64) -> SweepRow {
    let region = tukey_unimodal_region(alpha1, alpha2).ok();
    let models = QuantileModel::tukey(cfg.eta1 + cfg.lambda_offset, cfg.eta1, alpha1).and_then(|x| {
        QuantileModel::tukey(cfg.eta2 + cfg.lambda_offset, cfg.eta2, alpha2).map(|y| (x, y))
    });
    let (x, y) = match models {
        Ok(m) => m,
        Err(e) => {
            let l = error_label(&e);
            return SweepRow { alpha1, alpha2, region, shape: l.clone(), star: l.clone(), qmit: l.clone(), dmrl: l };
        }
    };
    let opts = CompareOptions {
        method: MethodChoice::TheoremOnly,
        grid: cfg.grid,
    };
    match Comparator::new(&x, &y, opts) {
        Ok(mut c) => {
            let shape = match c.ratio_shape() {
                Ok(s) => s.classification.label(),
                Err(e) => error_label(&e),
            };
            let mut status = |o: Order| status_label(c.verdict(o).map(|v| v.status));
            let star = status(Order::Star);
            let qmit = status(Order::Qmit);
            let dmrl = status(Order::Dmrl);
            SweepRow { alpha1, alpha2, region, shape, star, qmit, dmrl }
        }
        Err(e) => {
            let l = error_label(&e);
            SweepRow { alpha1, alpha2, region, shape: l.clone(), star: l.clone(), qmit: l.clone(), dmrl: l }
        }
    }
}

/// All cells in row-major order (α₁ outer, α₂ inner), evaluated in parallel.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let a1 = axis(cfg.alpha1.0, cfg.alpha1.1, cfg.step)?;
    let a2 = axis(cfg.alpha2.0, cfg.alpha2.1, cfg.step)?;
    let cells: Vec<(f64, f64)> = a1.iter().flat_map(|&u| a2.iter().map(move |&v| (u, v))).collect();
    Ok(cells.par_iter().map(|&(u, v)| sweep_cell(cfg, u, v)).collect())
}

/// CSV text with a header row.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SweepRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_hits_integers() {
        let a = axis(0.05, 4.95, 0.05).unwrap();
        assert_eq!(a.len(), 99);
        assert!(a.contains(&1.0) && a.contains(&2.0));
        assert_eq!(axis(2.5, 2.5, 0.1).unwrap(), vec![2.5]);
        assert!(axis(0.0, 1.0, 0.0).is_err());
        assert!(axis(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn single_cell_in_region() {
        let cfg = SweepConfig {
            alpha1: (2.5, 2.5),
            alpha2: (1.5, 1.5),
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].region, Some(true));
        assert!(rows[0].is_unimodal_max(), "{:?}", rows[0]);
    }

    #[test]
    fn special_alphas_are_not_applicable() {
        let cfg = SweepConfig::default();
        assert_eq!(sweep_cell(&cfg, 1.0, 1.5).region, None);
        assert_eq!(sweep_cell(&cfg, 1.5, 1.5).region, None);
        assert_eq!(sweep_cell(&cfg, 1.5, 1.5).shape, "constant");
    }
}
