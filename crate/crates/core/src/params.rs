use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five model constants shared by the classical, quantum, and noisy
/// classical descriptions: eigenfrequency `omega`, linear pumping rate `k1`,
/// nonlinear (two-phonon) damping rate `k2`, Kerr anharmonicity `kerr`, and
/// coupling strength `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega: f64,
    pub k1: f64,
    pub k2: f64,
    pub kerr: f64,
    pub epsilon: f64,
}

/// Which quantum regime the damping rates select.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `k1 > k2`: many phonons, near-classical dynamics.
    Weak,
    /// `k2 > k1`: high damping, noise-dominated dynamics.
    Deep,
    /// `k1 == k2`.
    Marginal,
}

impl SystemParams {
    pub fn new(omega: f64, k1: f64, k2: f64, kerr: f64, epsilon: f64) -> Result<Self> {
        let p = Self { omega, k1, k2, kerr, epsilon };
        p.validate()?;
        Ok(p)
    }

    /// Reference parameter set of the weak quantum regime:
    /// omega=2, k1=1, k2=0.2, K=1.
    pub fn weak_regime(epsilon: f64) -> Self {
        Self { omega: 2.0, k1: 1.0, k2: 0.2, kerr: 1.0, epsilon }
    }

    /// Reference parameter set of the deep quantum regime:
    /// omega=2, k1=1, k2=3, K=1.
    pub fn deep_regime(epsilon: f64) -> Self {
        Self { omega: 2.0, k1: 1.0, k2: 3.0, kerr: 1.0, epsilon }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.k1.is_finite() || self.k1 <= 0.0 {
            return Err(Error::InvalidParameter(format!("k1 must be > 0, got {}", self.k1)));
        }
        if !self.k2.is_finite() || self.k2 <= 0.0 {
            return Err(Error::InvalidParameter(format!("k2 must be > 0, got {}", self.k2)));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !self.omega.is_finite() || !self.kerr.is_finite() {
            return Err(Error::InvalidParameter("omega and kerr must be finite".into()));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        if self.k1 > self.k2 {
            Regime::Weak
        } else if self.k2 > self.k1 {
            Regime::Deep
        } else {
            Regime::Marginal
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_kerr(mut self, kerr: f64) -> Self {
        self.kerr = kerr;
        self
    }
}
