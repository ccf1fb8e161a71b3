//! Ground truth by brute force: each order's defining function evaluated on a
//! dense logit grid and checked for monotonicity or sign.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::model::QuantileModel;
use crate::order::Order;
use crate::prob::Prob;
use crate::quad::{integrate_between, integrate_from_zero, integrate_to_one, QuadConfig};
use crate::shape::{Direction, Mode, ModeKind, ShapeReport};

/// Relative size an excursion must exceed to count.
pub const ORACLE_TOL: f64 = 1e-9;
/// Excursions between `ORACLE_TOL` and this many times it are too close to
/// call; the verdict is then marked indecisive.
pub const GRAY_ZONE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridStatus {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
}

impl GridStatus {
    pub fn label(self) -> &'static str {
        match self {
            GridStatus::Increasing => "increasing",
            GridStatus::Decreasing => "decreasing",
            GridStatus::Constant => "constant",
            GridStatus::Mixed => "mixed",
        }
    }
}

/// A relative change of the checked function between two grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excursion {
    pub from: f64,
    pub to: f64,
    pub magnitude: f64,
}

impl Excursion {
    const NONE: Excursion = Excursion {
        from: f64::NAN,
        to: f64::NAN,
        magnitude: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridVerdict {
    pub status: GridStatus,
    /// Largest relative increase from a running minimum.
    pub rise: Excursion,
    /// Largest relative decrease from a running maximum.
    pub drop: Excursion,
    /// Largest excursion against the reported status, if any was seen.
    pub worst_violation: Option<Excursion>,
    /// Size of the smallest excursion the status relies on, or for a
    /// constant status the room left below the tolerance.
    pub margin: f64,
    /// False when an excursion falls in the gray zone above the tolerance.
    pub decisive: bool,
    pub n: usize,
}

fn classify(rise: Excursion, drop: Excursion, n: usize) -> GridVerdict {
    let up = rise.magnitude > ORACLE_TOL;
    let down = drop.magnitude > ORACLE_TOL;
    let gray = |e: Excursion| e.magnitude > ORACLE_TOL && e.magnitude <= GRAY_ZONE * ORACLE_TOL;
    let (status, margin, against) = match (up, down) {
        (true, true) => (GridStatus::Mixed, rise.magnitude.min(drop.magnitude), None),
        (true, false) => (GridStatus::Increasing, rise.magnitude, Some(drop)),
        (false, true) => (GridStatus::Decreasing, drop.magnitude, Some(rise)),
        (false, false) => {
            let worst = if rise.magnitude >= drop.magnitude { rise } else { drop };
            (GridStatus::Constant, ORACLE_TOL - worst.magnitude, Some(worst))
        }
    };
    GridVerdict {
        status,
        rise,
        drop,
        worst_violation: against.filter(|e| e.magnitude > 0.0),
        margin,
        decisive: !gray(rise) && !gray(drop),
        n,
    }
}

/// Monotonicity of sampled values, judged against running extrema so that
/// slow drifts are caught as well as single steps.
pub fn monotone_verdict(grid: &[Prob], vals: &[f64]) -> Result<GridVerdict> {
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteOnGrid(grid[i].value()));
    }
    let rel = |a: f64, b: f64| {
        let s = a.abs().max(b.abs());
        if s == 0.0 {
            0.0
        } else {
            (b - a) / s
        }
    };
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut rise = Excursion::NONE;
    let mut drop = Excursion::NONE;
    for j in 1..vals.len() {
        let r = rel(vals[lo], vals[j]);
        if r > rise.magnitude {
            rise = Excursion {
                from: grid[lo].value(),
                to: grid[j].value(),
                magnitude: r,
            };
        }
        let d = rel(vals[j], vals[hi]);
        if d > drop.magnitude {
            drop = Excursion {
                from: grid[hi].value(),
                to: grid[j].value(),
                magnitude: d,
            };
        }
        if vals[j] < vals[lo] {
            lo = j;
        }
        if vals[j] > vals[hi] {
            hi = j;
        }
    }
    Ok(classify(rise, drop, vals.len()))
}

/// Sign check of `diff` relative to `scale`, recast in monotonicity terms:
/// `Increasing` means `diff ≥ 0` everywhere (forward direction only),
/// `Decreasing` means `diff ≤ 0` everywhere (reverse only), `Constant` means
/// both, and `Mixed` means neither.
pub fn sign_verdict(grid: &[Prob], diff: &[f64], scale: &[f64]) -> Result<GridVerdict> {
    let mut pos = Excursion::NONE;
    let mut neg = Excursion::NONE;
    for (i, (&d, &s)) in diff.iter().zip(scale).enumerate() {
        if !d.is_finite() || !s.is_finite() {
            return Err(Error::NonFiniteOnGrid(grid[i].value()));
        }
        let r = if s == 0.0 { 0.0 } else { d / s.abs() };
        let at = grid[i].value();
        if r > pos.magnitude {
            pos = Excursion { from: at, to: at, magnitude: r };
        }
        if -r > neg.magnitude {
            neg = Excursion { from: at, to: at, magnitude: -r };
        }
    }
    // A positive difference somewhere rules out the reverse direction, i.e.
    // plays the role of a rise.
    Ok(classify(pos, neg, diff.len()))
}

/// Samples of both models and their moment integrals on a shared grid.
pub struct OracleCurves<'a> {
    pub x: &'a QuantileModel,
    pub y: &'a QuantileModel,
    pub grid: Vec<Prob>,
    pub qx: Vec<f64>,
    pub qy: Vec<f64>,
    pub qdx: Vec<f64>,
    pub qdy: Vec<f64>,
    lower: [Option<Result<Vec<f64>>>; 2],
    upper: [Option<Result<Vec<f64>>>; 2],
}

/// `∫₀^{p_i} q·qd` at every grid point, by cell-wise quadrature.
fn cumulative_lower(m: &QuantileModel, grid: &[Prob], cfg: &QuadConfig) -> Result<Vec<f64>> {
    let f = |q: Prob| q.value() * m.qd(q);
    let first = integrate_from_zero(&f, grid[0], cfg)?;
    let cells: Vec<f64> = (1..grid.len())
        .into_par_iter()
        .map(|i| integrate_between(&f, grid[i - 1], grid[i], cfg))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = first;
    out.push(acc);
    for c in cells {
        acc += c;
        out.push(acc);
    }
    Ok(out)
}

/// `∫_{p_i}^1 (1−q)·qd` at every grid point.
fn cumulative_upper(m: &QuantileModel, grid: &[Prob], cfg: &QuadConfig) -> Result<Vec<f64>> {
    let f = |q: Prob| q.complement() * m.qd(q);
    let n = grid.len();
    let last = integrate_to_one(&f, grid[n - 1], cfg)?;
    let cells: Vec<f64> = (1..n)
        .into_par_iter()
        .map(|i| integrate_between(&f, grid[i - 1], grid[i], cfg))
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; n];
    let mut acc = last;
    out[n - 1] = acc;
    for i in (0..n - 1).rev() {
        acc += cells[i];
        out[i] = acc;
    }
    Ok(out)
}

impl<'a> OracleCurves<'a> {
    pub fn new(x: &'a QuantileModel, y: &'a QuantileModel, cfg: &GridConfig) -> Self {
        let grid = cfg.points();
        let sample = |m: &QuantileModel, d: bool| -> Vec<f64> {
            grid.par_iter().map(|&p| if d { m.qd(p) } else { m.q(p) }).collect()
        };
        OracleCurves {
            x,
            y,
            qx: sample(x, false),
            qy: sample(y, false),
            qdx: sample(x, true),
            qdy: sample(y, true),
            grid,
            lower: [None, None],
            upper: [None, None],
        }
    }

    fn model(&self, which: usize) -> &'a QuantileModel {
        if which == 0 {
            self.x
        } else {
            self.y
        }
    }

    /// `I` on the grid for X (0) or Y (1).
    pub fn lower(&mut self, which: usize) -> Result<&[f64]> {
        if self.lower[which].is_none() {
            let v = cumulative_lower(self.model(which), &self.grid, &QuadConfig::default());
            self.lower[which] = Some(v);
        }
        match self.lower[which].as_ref() {
            Some(Ok(v)) => Ok(v),
            Some(Err(e)) => Err(e.clone()),
            None => unreachable!(),
        }
    }

    /// `M` on the grid for X (0) or Y (1).
    pub fn upper(&mut self, which: usize) -> Result<&[f64]> {
        if self.upper[which].is_none() {
            self.model(which).mean()?;
            let v = cumulative_upper(self.model(which), &self.grid, &QuadConfig::default());
            self.upper[which] = Some(v);
        }
        match self.upper[which].as_ref() {
            Some(Ok(v)) => Ok(v),
            Some(Err(e)) => Err(e.clone()),
            None => unreachable!(),
        }
    }

    pub fn ratio_qd(&self) -> Vec<f64> {
        self.qdy.iter().zip(&self.qdx).map(|(y, x)| y / x).collect()
    }

    pub fn quantile_ratio(&self) -> Vec<f64> {
        self.qy.iter().zip(&self.qx).map(|(y, x)| y / x).collect()
    }

    /// EPS of X (0) or Y (1) on the grid.
    pub fn eps(&mut self, which: usize) -> Result<Vec<f64>> {
        let q = if which == 0 { self.qx.clone() } else { self.qy.clone() };
        let m = self.upper(which)?;
        Ok(m.iter().zip(&q).map(|(m, q)| m / q).collect())
    }

    /// Checks the defining condition of `order` on the grid.
    pub fn verdict(&mut self, order: Order) -> Result<GridVerdict> {
        let grid = self.grid.clone();
        match order {
            Order::Convex => monotone_verdict(&grid, &self.ratio_qd()),
            Order::Star => monotone_verdict(&grid, &self.quantile_ratio()),
            Order::Qmit => {
                let ix = self.lower(0)?.to_vec();
                let iy = self.lower(1)?;
                let r: Vec<f64> = iy.iter().zip(&ix).map(|(y, x)| y / x).collect();
                monotone_verdict(&grid, &r)
            }
            Order::Dmrl => {
                let mx = self.upper(0)?.to_vec();
                let my = self.upper(1)?;
                let r: Vec<f64> = my.iter().zip(&mx).map(|(y, x)| y / x).collect();
                monotone_verdict(&grid, &r)
            }
            Order::Ps => {
                let ex = self.eps(0)?;
                let ey = self.eps(1)?;
                let diff: Vec<f64> = ey.iter().zip(&ex).map(|(y, x)| y - x).collect();
                let scale: Vec<f64> = ey.iter().zip(&ex).map(|(y, x)| y.abs().max(x.abs())).collect();
                sign_verdict(&grid, &diff, &scale)
            }
            Order::Nbue => {
                let target = self.y.mean()? / self.x.mean()?;
                let mx = self.upper(0)?.to_vec();
                let my = self.upper(1)?;
                let ratio: Vec<f64> = my.iter().zip(&mx).map(|(y, x)| y / x).collect();
                let diff: Vec<f64> = ratio.iter().map(|r| r - target).collect();
                let scale: Vec<f64> = ratio.iter().map(|r| r.abs().max(target.abs())).collect();
                sign_verdict(&grid, &diff, &scale)
            }
        }
    }
}

/// Segments sampled values, ignoring reversals smaller than `tol` relative
/// to the running extreme. Modes are reported at grid points.
pub fn coarse_shape(grid: &[Prob], vals: &[f64], tol: f64) -> Result<ShapeReport> {
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteOnGrid(grid[i].value()));
    }
    let rel = |a: f64, b: f64| {
        let s = a.abs().max(b.abs());
        if s == 0.0 {
            0.0
        } else {
            (b - a) / s
        }
    };
    let mut first = None;
    let mut dir = None;
    let mut modes = Vec::new();
    let (mut lo, mut hi, mut ext) = (0usize, 0usize, 0usize);
    for j in 1..vals.len() {
        match dir {
            None => {
                if vals[j] < vals[lo] {
                    lo = j;
                }
                if vals[j] > vals[hi] {
                    hi = j;
                }
                if rel(vals[lo], vals[j]) > tol {
                    dir = Some(Direction::Increasing);
                    ext = j;
                } else if rel(vals[j], vals[hi]) > tol {
                    dir = Some(Direction::Decreasing);
                    ext = j;
                }
                first = dir;
            }
            Some(Direction::Increasing) => {
                if vals[j] >= vals[ext] {
                    ext = j;
                } else if rel(vals[j], vals[ext]) > tol {
                    modes.push(Mode { p: grid[ext], kind: ModeKind::Max });
                    dir = Some(Direction::Decreasing);
                    ext = j;
                }
            }
            Some(Direction::Decreasing) => {
                if vals[j] <= vals[ext] {
                    ext = j;
                } else if rel(vals[ext], vals[j]) > tol {
                    modes.push(Mode { p: grid[ext], kind: ModeKind::Min });
                    dir = Some(Direction::Increasing);
                    ext = j;
                }
            }
        }
    }
    Ok(ShapeReport::from_directions(first, modes, Vec::new()))
}

/// Monotonicity of `f` on an `n`-point logit grid.
pub fn grid_monotone<F: Fn(Prob) -> f64 + Sync>(f: F, n: usize) -> Result<GridVerdict> {
    let grid = GridConfig::with_n(n).points();
    let vals: Vec<f64> = grid.par_iter().map(|&p| f(p)).collect();
    monotone_verdict(&grid, &vals)
}

/// Checks `order` between `x` and `y` directly from its definition.
pub fn order_oracle(x: &QuantileModel, y: &QuantileModel, order: Order, cfg: &GridConfig) -> Result<GridVerdict> {
    OracleCurves::new(x, y, cfg).verdict(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_monotone() {
        assert_eq!(grid_monotone(|_| 4.0, 512).unwrap().status, GridStatus::Constant);
        assert_eq!(grid_monotone(|p| p.value(), 512).unwrap().status, GridStatus::Increasing);
        assert_eq!(grid_monotone(|p| -p.value() - 1.0, 512).unwrap().status, GridStatus::Decreasing);
        let m = grid_monotone(|p| p.value() * p.complement(), 512).unwrap();
        assert_eq!(m.status, GridStatus::Mixed);
        assert!(m.decisive);
    }

    #[test]
    fn slow_drift_is_seen() {
        // Each step is below tolerance, the total is not.
        let v = grid_monotone(|p| 1.0 - 1e-7 * p.value(), 4096).unwrap();
        assert_eq!(v.status, GridStatus::Decreasing);
    }

    #[test]
    fn gray_zone_is_indecisive() {
        let v = grid_monotone(|p| 1.0 + 3e-9 * p.value(), 256).unwrap();
        assert_eq!(v.status, GridStatus::Increasing);
        assert!(!v.decisive);
    }

    #[test]
    fn coarse_shape_ignores_ripples() {
        let grid = GridConfig::with_n(2000).points();
        let vals: Vec<f64> = grid
            .iter()
            .map(|p| {
                let t = p.value();
                (t - 0.3).powi(2) + 1.0 + 1e-12 * (t * 5000.0).sin()
            })
            .collect();
        let s = coarse_shape(&grid, &vals, 1e-9).unwrap();
        assert_eq!(s.classification, crate::shape::Classification::UnimodalMin);
        assert!((s.modes[0].p.value() - 0.3).abs() < 1e-2);
        let flat = vec![2.0; grid.len()];
        assert!(coarse_shape(&grid, &flat, 1e-9).unwrap().is_constant());
    }

    #[test]
    fn tukey_pair_oracles() {
        let x = QuantileModel::tukey(4.0, 1.0, 2.5).unwrap();
        let y = QuantileModel::tukey(1.5, 1.0, 1.5).unwrap();
        let mut c = OracleCurves::new(&x, &y, &GridConfig::default());
        assert_eq!(c.verdict(Order::Star).unwrap().status, GridStatus::Increasing);
        assert_eq!(c.verdict(Order::Convex).unwrap().status, GridStatus::Mixed);
        assert_eq!(c.verdict(Order::Qmit).unwrap().status, GridStatus::Mixed);
        assert_eq!(c.verdict(Order::Dmrl).unwrap().status, GridStatus::Mixed);
        assert_eq!(c.verdict(Order::Ps).unwrap().status, GridStatus::Increasing);
        assert_eq!(c.verdict(Order::Nbue).unwrap().status, GridStatus::Increasing);
    }

    #[test]
    fn identical_models_are_constant() {
        let g = QuantileModel::govindarajulu(0.5, 2.0, 3.0).unwrap();
        let mut c = OracleCurves::new(&g, &g, &GridConfig::default());
        for o in Order::ALL {
            let v = c.verdict(o).unwrap();
            assert_eq!(v.status, GridStatus::Constant, "{o:?}");
        }
    }
}
