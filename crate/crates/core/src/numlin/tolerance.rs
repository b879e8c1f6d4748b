use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SUBSPACE_TOL: f64 = 1e-9;
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// How the singular-value cutoff for rank decisions is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RankTol {
    /// Fixed threshold.
    Absolute(f64),
    /// `factor * sigma_max`; `None` means `max(rows, cols) * f64::EPSILON`.
    RelativeToSigmaMax(Option<f64>),
}

impl Default for RankTol {
    fn default() -> Self {
        RankTol::RelativeToSigmaMax(None)
    }
}

impl RankTol {
    /// Threshold for a `rows x cols` matrix whose largest singular value is
    /// `sigma_max`. Singular values strictly above it count toward the rank.
    pub fn threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        match *self {
            RankTol::Absolute(eps) => eps,
            RankTol::RelativeToSigmaMax(Some(factor)) => factor * sigma_max,
            RankTol::RelativeToSigmaMax(None) => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
        }
    }
}

/// Tolerances that turn exact subspace statements into residual tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub rank_tol: RankTol,
    pub subspace_tol: f64,
    pub psd_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rank_tol: RankTol::default(),
            subspace_tol: DEFAULT_SUBSPACE_TOL,
            psd_tol: DEFAULT_PSD_TOL,
        }
    }
}

impl TolerancePolicy {
    pub fn new(rank_tol: RankTol, subspace_tol: f64, psd_tol: f64) -> Result<Self> {
        let policy = Self {
            rank_tol,
            subspace_tol,
            psd_tol,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn with_subspace_tol(mut self, tol: f64) -> Result<Self> {
        self.subspace_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::BadTolerance(format!(
                    "{name} must be finite and > 0, got {v}"
                )))
            }
        };
        match self.rank_tol {
            RankTol::Absolute(v) => positive("absolute rank tolerance", v)?,
            RankTol::RelativeToSigmaMax(Some(v)) => positive("relative rank tolerance", v)?,
            RankTol::RelativeToSigmaMax(None) => {}
        }
        positive("subspace tolerance", self.subspace_tol)?;
        positive("psd tolerance", self.psd_tol)
    }
}
