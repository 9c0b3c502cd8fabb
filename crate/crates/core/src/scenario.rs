use alloc::format;

use crate::error::{Error, Result};

/// Which of the two Gaussian alternatives generates the second segment.
///
/// `P = N(0, I_d)` in both cases; `Q = N(mu·1, I_d)` for a mean shift and
/// `Q = N(0, sigma² I_d)` for a variance scale.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ScenarioKind {
    MeanShift { mu: f64 },
    VarianceScale { sigma: f64 },
}

/// A pair of distributions plus the split proportion `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: ScenarioKind,
    pub alpha: f64,
    pub dim: usize,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie strictly inside (0, 1), got {alpha}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dim must be at least 1".into()));
        }
        match kind {
            ScenarioKind::MeanShift { mu } if !mu.is_finite() => Err(Error::InvalidArgument(
                format!("mean shift must be finite, got {mu}"),
            )),
            ScenarioKind::VarianceScale { sigma } if !(sigma >= 1.0 && sigma.is_finite()) => {
                Err(Error::InvalidArgument(format!(
                    "variance scale sigma must be finite and >= 1, got {sigma}"
                )))
            }
            _ => Ok(Scenario { kind, alpha, dim }),
        }
    }

    /// One-dimensional mean-shift scenario.
    pub fn mean_shift(mu: f64, alpha: f64) -> Result<Self> {
        Self::new(ScenarioKind::MeanShift { mu }, alpha, 1)
    }

    /// One-dimensional variance-scale scenario; `sigma` is a standard deviation.
    pub fn variance_scale(sigma: f64, alpha: f64) -> Result<Self> {
        Self::new(ScenarioKind::VarianceScale { sigma }, alpha, 1)
    }

    pub fn with_dim(self, dim: usize) -> Result<Self> {
        Self::new(self.kind, self.alpha, dim)
    }

    /// `true` when `P = Q`.
    pub fn is_null(&self) -> bool {
        match self.kind {
            ScenarioKind::MeanShift { mu } => mu == 0.0,
            ScenarioKind::VarianceScale { sigma } => sigma == 1.0,
        }
    }

    /// Per-coordinate mean and standard deviation of `Q`.
    pub fn q_location_scale(&self) -> (f64, f64) {
        match self.kind {
            ScenarioKind::MeanShift { mu } => (mu, 1.0),
            ScenarioKind::VarianceScale { sigma } => (0.0, sigma),
        }
    }

    /// Size of the first segment, `floor(alpha n)`.
    pub fn boundary(&self, n: usize) -> usize {
        libm::floor(self.alpha * n as f64) as usize
    }

    pub(crate) fn require_scalar(&self) -> Result<()> {
        if self.dim == 1 {
            Ok(())
        } else {
            Err(Error::UnsupportedScenario { dim: self.dim })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Scenario::mean_shift(1.0, 0.0).is_err());
        assert!(Scenario::mean_shift(1.0, 1.0).is_err());
        assert!(Scenario::mean_shift(f64::NAN, 0.5).is_err());
        assert!(Scenario::variance_scale(0.5, 0.5).is_err());
        assert!(Scenario::mean_shift(1.0, 0.5).unwrap().with_dim(0).is_err());
    }

    #[test]
    fn null_detection() {
        assert!(Scenario::mean_shift(0.0, 0.3).unwrap().is_null());
        assert!(Scenario::variance_scale(1.0, 0.3).unwrap().is_null());
        assert!(!Scenario::variance_scale(1.5, 0.3).unwrap().is_null());
    }

    #[test]
    fn boundary_is_floor() {
        let s = Scenario::mean_shift(1.0, 0.25).unwrap();
        assert_eq!(s.boundary(400), 100);
        assert_eq!(s.boundary(10), 2);
    }
}
