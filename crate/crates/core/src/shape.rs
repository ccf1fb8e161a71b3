//! Monotone segmentation of functions on (0, 1) and the quantile-density ratio.

use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::model::QuantileModel;
use crate::prob::Prob;

/// Relative size below which a grid step counts as flat.
pub const PLATEAU_TOL: f64 = 1e-12;
/// Bisection stops once the bracket is narrower than this.
const MODE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Max,
    Min,
}

impl ModeKind {
    fn flipped(self) -> ModeKind {
        match self {
            ModeKind::Max => ModeKind::Min,
            ModeKind::Min => ModeKind::Max,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModeKind::Max => "max",
            ModeKind::Min => "min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn flipped(self) -> Direction {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub p: Prob,
    pub kind: ModeKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Constant,
    Increasing,
    Decreasing,
    UnimodalMax,
    UnimodalMin,
    NModal(usize),
}

impl Classification {
    pub fn label(self) -> String {
        match self {
            Classification::Constant => "constant".into(),
            Classification::Increasing => "increasing".into(),
            Classification::Decreasing => "decreasing".into(),
            Classification::UnimodalMax => "unimodal-max".into(),
            Classification::UnimodalMin => "unimodal-min".into(),
            Classification::NModal(n) => format!("{n}-modal"),
        }
    }
}

/// Monotonicity segmentation of a function on (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub modes: Vec<Mode>,
    pub segments: Vec<Segment>,
    pub classification: Classification,
    /// Intervals where the function was flat to within the plateau tolerance.
    pub plateaus: Vec<(f64, f64)>,
}

impl ShapeReport {
    pub(crate) fn from_directions(first: Option<Direction>, modes: Vec<Mode>, plateaus: Vec<(f64, f64)>) -> Self {
        let Some(first) = first else {
            return ShapeReport {
                modes: Vec::new(),
                segments: Vec::new(),
                classification: Classification::Constant,
                plateaus,
            };
        };
        let mut segments = Vec::with_capacity(modes.len() + 1);
        let mut from = 0.0;
        let mut dir = first;
        for m in &modes {
            segments.push(Segment {
                from,
                to: m.p.value(),
                direction: dir,
            });
            from = m.p.value();
            dir = dir.flipped();
        }
        segments.push(Segment {
            from,
            to: 1.0,
            direction: dir,
        });
        let classification = match (modes.len(), first) {
            (0, Direction::Increasing) => Classification::Increasing,
            (0, Direction::Decreasing) => Classification::Decreasing,
            (1, Direction::Increasing) => Classification::UnimodalMax,
            (1, Direction::Decreasing) => Classification::UnimodalMin,
            (n, _) => Classification::NModal(n),
        };
        ShapeReport {
            modes,
            segments,
            classification,
            plateaus,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.classification == Classification::Constant
    }

    /// Direction on the first segment; `None` when constant.
    pub fn initial_direction(&self) -> Option<Direction> {
        self.segments.first().map(|s| s.direction)
    }

    /// Direction on the last segment; `None` when constant.
    pub fn final_direction(&self) -> Option<Direction> {
        self.segments.last().map(|s| s.direction)
    }

    pub fn modes_of(&self, kind: ModeKind) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(move |m| m.kind == kind)
    }

    /// Shape of the reciprocal of a positive function: same modes, roles flipped.
    pub fn reciprocal(&self) -> ShapeReport {
        let modes: Vec<Mode> = self
            .modes
            .iter()
            .map(|m| Mode {
                p: m.p,
                kind: m.kind.flipped(),
            })
            .collect();
        ShapeReport::from_directions(
            self.initial_direction().map(Direction::flipped),
            modes,
            self.plateaus.clone(),
        )
    }
}

/// `f(F⁻¹(p)) / g(G⁻¹(p))`, computed as `qd_Y(p) / qd_X(p)`.
pub fn ratio_qd(x: &QuantileModel, y: &QuantileModel, p: Prob) -> f64 {
    if std::ptr::eq(x, y) {
        return 1.0;
    }
    y.qd(p) / x.qd(p)
}

/// Public form of [`ratio_qd`] taking a raw probability.
pub fn ratio_qd_at(x: &QuantileModel, y: &QuantileModel, p: f64) -> Result<f64> {
    let pr = Prob::new(p)?;
    let r = ratio_qd(x, y, pr);
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::ModelIntegrity(format!(
            "quantile-density ratio {r} at p = {p} is not a positive number"
        )));
    }
    Ok(r)
}

fn step_sign(a: f64, b: f64) -> i8 {
    let d = b - a;
    let scale = a.abs().max(b.abs());
    if d.abs() <= PLATEAU_TOL * scale || d == 0.0 {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// Finite-difference slope sign at `pr`.
fn slope_sign<F: Fn(Prob) -> f64>(f: &F, pr: Prob) -> f64 {
    let h = 1e-5 * pr.edge_distance();
    f(pr.shifted(h)) - f(pr.shifted(-h))
}

/// Locates the extremum inside `[lo, hi]` where the slope changes from
/// `before` to the opposite sign.
fn refine<F: Fn(Prob) -> f64>(f: &F, mut lo: Prob, mut hi: Prob, before: i8) -> Prob {
    while hi.value() - lo.value() > MODE_TOL {
        let mid = Prob::midpoint(lo, hi);
        if mid.value() <= lo.value() || mid.value() >= hi.value() {
            break;
        }
        let s = slope_sign(f, mid);
        let same = (s > 0.0 && before > 0) || (s < 0.0 && before < 0);
        if same {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Prob::midpoint(lo, hi)
}

/// Segments `f` into monotone pieces on the working grid.
///
/// Steps smaller than [`PLATEAU_TOL`] relative to the function value are
/// treated as flat; sign changes between non-flat steps become modes, each
/// refined by bisection on the finite-difference slope.
pub fn find_shape<F: Fn(Prob) -> f64>(f: F, cfg: &GridConfig) -> Result<ShapeReport> {
    let grid = cfg.points();
    let vals: Vec<f64> = grid.iter().map(|&p| f(p)).collect();
    shape_from_values(&f, &grid, &vals, cfg.max_modes)
}

/// As [`find_shape`], reusing values already computed on `grid`.
pub fn shape_from_values<F: Fn(Prob) -> f64>(
    f: &F,
    grid: &[Prob],
    vals: &[f64],
    max_modes: usize,
) -> Result<ShapeReport> {
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteOnGrid(grid[i].value()));
    }
    let mut plateaus = Vec::new();
    let mut flat_start: Option<usize> = None;
    // (index of step, sign) for non-flat steps.
    let mut steps: Vec<(usize, i8)> = Vec::new();
    for i in 0..vals.len() - 1 {
        let s = step_sign(vals[i], vals[i + 1]);
        if s == 0 {
            flat_start.get_or_insert(i);
        } else {
            if let Some(start) = flat_start.take() {
                if i - start >= 8 {
                    plateaus.push((grid[start].value(), grid[i].value()));
                }
            }
            steps.push((i, s));
        }
    }
    if let Some(start) = flat_start {
        if vals.len() - 1 - start >= 8 {
            plateaus.push((grid[start].value(), grid[vals.len() - 1].value()));
        }
    }
    let Some(&(_, first_sign)) = steps.first() else {
        return Ok(ShapeReport::from_directions(None, Vec::new(), plateaus));
    };
    let changes: Vec<(usize, usize, i8)> = steps
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0, w[1].0, w[0].1))
        .collect();
    if changes.len() > max_modes {
        return Err(Error::TooOscillatory { max_modes });
    }
    let modes = changes
        .into_iter()
        .map(|(prev_step, next_step, before)| {
            let p = refine(f, grid[prev_step], grid[next_step + 1], before);
            Mode {
                p,
                kind: if before > 0 { ModeKind::Max } else { ModeKind::Min },
            }
        })
        .collect();
    let first = if first_sign > 0 {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    Ok(ShapeReport::from_directions(Some(first), modes, plateaus))
}

/// Sufficient condition for the ratio of two Tukey quantile densities, with
/// shape parameters `α₁` (for X) and `α₂` (for Y), to be increasing then
/// decreasing.
///
/// Requires `α₁, α₂ ∉ {1, 2}` and `α₁ ≠ α₂`; those cases need separate analysis.
pub fn tukey_unimodal_region(alpha1: f64, alpha2: f64) -> Result<bool> {
    if [1.0, 2.0].contains(&alpha1) || [1.0, 2.0].contains(&alpha2) || alpha1 == alpha2 {
        return Err(Error::Hypothesis(format!(
            "region test needs alpha values outside {{1, 2}} and distinct, got ({alpha1}, {alpha2})"
        )));
    }
    let l1 = (alpha2 - alpha1) * (alpha2 + alpha1 - 3.0) <= 0.0;
    let l21 = (alpha2 - 2.0) * (alpha2 - 1.0) < 0.0;
    let l22 = (alpha1 - 2.0) * (alpha1 - 1.0) > 0.0;
    Ok(l1 && l21 && l22)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function() {
        let s = find_shape(|_| 2.0, &GridConfig::default()).unwrap();
        assert_eq!(s.classification, Classification::Constant);
        assert!(s.modes.is_empty());
        assert_eq!(s.plateaus.len(), 1);
    }

    #[test]
    fn symmetric_unimodal() {
        let s = find_shape(
            |p| p.value().sqrt() + p.complement().sqrt(),
            &GridConfig::default(),
        )
        .unwrap();
        assert_eq!(s.classification, Classification::UnimodalMax);
        assert!((s.modes[0].p.value() - 0.5).abs() < 1e-8);
        assert_eq!(s.segments.len(), 2);
    }

    #[test]
    fn reciprocal_flips() {
        let s = find_shape(|p| p.value() * p.complement(), &GridConfig::default()).unwrap();
        let r = s.reciprocal();
        assert_eq!(r.classification, Classification::UnimodalMin);
        assert_eq!(r.modes[0].p, s.modes[0].p);
    }

    #[test]
    fn many_modes() {
        let s = find_shape(
            |p| (10.0 * std::f64::consts::PI * p.value()).sin() + 2.0,
            &GridConfig::default(),
        )
        .unwrap();
        assert_eq!(s.classification, Classification::NModal(10));
        for w in s.modes.windows(2) {
            assert!(w[0].p.value() < w[1].p.value());
            assert_ne!(w[0].kind, w[1].kind);
        }
        let err = find_shape(
            |p| (20.0 * std::f64::consts::PI * p.value()).sin() + 2.0,
            &GridConfig::default(),
        );
        assert!(matches!(err, Err(Error::TooOscillatory { .. })));
    }

    #[test]
    fn ratio_examples() {
        let x = QuantileModel::tukey(4.0, 1.0, 2.5).unwrap();
        let y = QuantileModel::tukey(1.5, 1.0, 1.5).unwrap();
        let r = ratio_qd_at(&x, &y, 0.5).unwrap();
        assert!((r - 1.2).abs() < 1e-12, "{r}");
        let g = QuantileModel::govindarajulu(0.0, 2.0, 2.0).unwrap();
        let e = QuantileModel::unit_exponential();
        assert!((ratio_qd_at(&g, &e, 1.0 / 3.0).unwrap() - 0.5625).abs() < 1e-14);
        assert_eq!(ratio_qd_at(&g, &g, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn region_examples() {
        assert!(tukey_unimodal_region(2.5, 1.5).unwrap());
        assert!(tukey_unimodal_region(0.5, 1.5).unwrap());
        assert!(!tukey_unimodal_region(1.5, 2.5).unwrap());
        assert!(tukey_unimodal_region(1.5, 1.5).is_err());
        assert!(tukey_unimodal_region(1.0, 1.5).is_err());
    }
}
