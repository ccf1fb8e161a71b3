use crate::prob::Prob;

/// Working grid and mode-detection settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Number of grid points.
    pub n: usize,
    /// Distance of the outermost points from 0 and 1.
    pub edge: f64,
    /// More sign changes than this is reported as too oscillatory.
    pub max_modes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 4096,
            edge: 1e-8,
            max_modes: 16,
        }
    }
}

impl GridConfig {
    pub fn with_n(n: usize) -> Self {
        GridConfig {
            n,
            ..Self::default()
        }
    }

    /// Points uniformly spaced in logit coordinates, so both tails are dense.
    pub fn points(&self) -> Vec<Prob> {
        logit_grid(self.n, self.edge)
    }
}

/// `n` points with logits uniformly spaced between `logit(edge)` and `logit(1 - edge)`.
pub fn logit_grid(n: usize, edge: f64) -> Vec<Prob> {
    let n = n.max(2);
    let span = ((1.0 - edge) / edge).ln();
    (0..n)
        .map(|i| {
            let x = -span + 2.0 * span * (i as f64) / ((n - 1) as f64);
            Prob::from_logit(x)
        })
        .collect()
}
