use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Absolute norm floor below which an operator counts as zero.
pub const ZERO_FLOOR: f64 = 1e-12;

/// Absolute floor for pruning symbolic Pauli coefficients.
pub const COEFF_FLOOR: f64 = 1e-13;

/// Numerical interpretation of "linearly independent", "equal eigenvalue"
/// and "proportional" used throughout the library.
///
/// Rank decisions are deterministic given identical inputs and policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative threshold on a residual norm for declaring it zero.
    pub rank_threshold: f64,
    /// Relative threshold (times the spectral radius) for merging
    /// nearly equal eigenvalues into one eigenspace.
    pub eig_group_threshold: f64,
    /// Threshold for the proportionality test: `u ∝ v` iff
    /// `|<u,v>| / (|u||v|) > 1 - proportionality_threshold`.
    pub proportionality_threshold: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rank_threshold: 1e-9,
            eig_group_threshold: 1e-8,
            proportionality_threshold: 1e-10,
        }
    }
}

impl TolerancePolicy {
    pub fn validated(self) -> Result<Self> {
        for (name, v) in [
            ("rank_threshold", self.rank_threshold),
            ("eig_group_threshold", self.eig_group_threshold),
            ("proportionality_threshold", self.proportionality_threshold),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CoreError::InvalidTolerance(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(self)
    }

    /// Policy with a different rank threshold, for dual-tolerance rank checks.
    pub fn with_rank_threshold(mut self, threshold: f64) -> Self {
        self.rank_threshold = threshold;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_policy_is_valid() {
        assert!(TolerancePolicy::default().validated().is_ok());
    }

    #[test]
    fn rejects_nonpositive_thresholds() {
        let mut p = TolerancePolicy::default();
        p.rank_threshold = 0.0;
        assert!(p.validated().is_err());
        p.rank_threshold = -1e-9;
        assert!(p.validated().is_err());
        p.rank_threshold = f64::NAN;
        assert!(p.validated().is_err());
    }
}
