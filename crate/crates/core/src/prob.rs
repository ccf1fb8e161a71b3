use crate::error::{Error, Result};

/// A probability strictly inside (0, 1), stored together with its complement.
///
/// Keeping `1 - p` alongside `p` lets evaluations near the upper endpoint use
/// the complement directly instead of recovering it by cancellation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Prob {
    p: f64,
    c: f64,
}

impl Prob {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Prob { p, c: 1.0 - p })
        } else {
            Err(Error::ProbabilityOutOfRange(p))
        }
    }

    /// Builds a probability from its complement `1 - p`.
    pub fn from_complement(c: f64) -> Result<Self> {
        if c > 0.0 && c < 1.0 {
            Ok(Prob { p: 1.0 - c, c })
        } else {
            Err(Error::ProbabilityOutOfRange(1.0 - c))
        }
    }

    /// Builds from both halves. The caller guarantees `p + c == 1` up to rounding
    /// and that both are positive.
    pub(crate) fn from_parts(p: f64, c: f64) -> Self {
        debug_assert!(p > 0.0 && c > 0.0, "bad parts {p} {c}");
        Prob { p, c }
    }

    /// Point at logit coordinate `x`, i.e. `p = 1 / (1 + e^{-x})`.
    pub(crate) fn from_logit(x: f64) -> Self {
        Prob {
            p: 1.0 / (1.0 + (-x).exp()),
            c: 1.0 / (1.0 + x.exp()),
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.p
    }

    #[inline]
    pub fn complement(self) -> f64 {
        self.c
    }

    /// Distance to the nearer endpoint.
    #[inline]
    pub fn edge_distance(self) -> f64 {
        self.p.min(self.c)
    }

    pub fn logit(self) -> f64 {
        (self.p / self.c).ln()
    }

    /// Shift by `h`, which may be negative, keeping the complement consistent.
    pub(crate) fn shifted(self, h: f64) -> Self {
        Prob {
            p: self.p + h,
            c: self.c - h,
        }
    }

    /// Midpoint of two probabilities.
    pub(crate) fn midpoint(a: Prob, b: Prob) -> Self {
        Prob {
            p: 0.5 * (a.p + b.p),
            c: 0.5 * (a.c + b.c),
        }
    }
}

impl TryFrom<f64> for Prob {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Prob::new(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_endpoints() {
        assert!(Prob::new(0.0).is_err());
        assert!(Prob::new(1.0).is_err());
        assert!(Prob::new(f64::NAN).is_err());
        assert!(Prob::from_complement(0.0).is_err());
    }

    #[test]
    fn complement_is_kept_exact() {
        let p = Prob::from_complement(1e-300).unwrap();
        assert_eq!(p.complement(), 1e-300);
        assert_eq!(p.value(), 1.0);
    }

    #[test]
    fn logit_round_trip() {
        for &x in &[-30.0, -1.0, 0.0, 2.5, 30.0] {
            let p = Prob::from_logit(x);
            assert!((p.logit() - x).abs() < 1e-9 * (1.0 + x.abs()));
        }
    }
}
