use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A one-dimensional Lévy process from one of the supported parametric
/// families.
///
/// Serialized as `{"family": "<snake_case name>", "params": {...}}`; see
/// `docs/schema.md` for the field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ProcessSpec {
    /// `X_t = b t`.
    DeterministicDrift { b: f64 },
    /// `X_t = sigma W_t + mu t`.
    BrownianDrift { sigma: f64, mu: f64 },
    /// Poisson process with unit jumps.
    Poisson { rate: f64 },
    /// Compound Poisson process with integer jumps drawn from `jump_pmf`.
    CompoundPoissonInteger { rate: f64, jump_pmf: BTreeMap<i64, f64> },
    /// Symmetric stable process with `E e^{izX_t} = exp(-scale t |z|^alpha)`.
    SymmetricStable { alpha: f64, scale: f64 },
    /// Gamma process with `X_t ~ Gamma(shape t, rate)`; Lévy density
    /// `shape x⁻¹ e^{-rate x}` on `(0, ∞)`.
    GammaSubordinator { shape: f64, rate: f64 },
    /// Strictly stable subordinator with `E e^{-uX_t} = exp(-scale t u^beta)`.
    PositiveStable { beta: f64, scale: f64 },
}

/// Tolerance on `Σ jump_pmf = 1`.
pub const PMF_SUM_TOL: f64 = 1e-12;

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::spec(path, format!("must be finite and > 0, got {v}")))
    }
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::spec(path, format!("must be finite, got {v}")))
    }
}

impl ProcessSpec {
    /// The zero process, `X_t ≡ 0`.
    pub fn zero() -> Self {
        ProcessSpec::DeterministicDrift { b: 0.0 }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            ProcessSpec::DeterministicDrift { .. } => "deterministic_drift",
            ProcessSpec::BrownianDrift { .. } => "brownian_drift",
            ProcessSpec::Poisson { .. } => "poisson",
            ProcessSpec::CompoundPoissonInteger { .. } => "compound_poisson_integer",
            ProcessSpec::SymmetricStable { .. } => "symmetric_stable",
            ProcessSpec::GammaSubordinator { .. } => "gamma_subordinator",
            ProcessSpec::PositiveStable { .. } => "positive_stable",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::DeterministicDrift { b } => finite("params.b", *b),
            ProcessSpec::BrownianDrift { sigma, mu } => {
                finite("params.mu", *mu)?;
                if !(sigma.is_finite() && *sigma >= 0.0) {
                    return Err(Error::spec("params.sigma", format!("must be finite and >= 0, got {sigma}")));
                }
                Ok(())
            }
            ProcessSpec::Poisson { rate } => positive("params.rate", *rate),
            ProcessSpec::CompoundPoissonInteger { rate, jump_pmf } => {
                positive("params.rate", *rate)?;
                if jump_pmf.is_empty() {
                    return Err(Error::spec("params.jump_pmf", "must not be empty"));
                }
                if jump_pmf.contains_key(&0) {
                    return Err(Error::spec("params.jump_pmf.0", "jump size 0 is not allowed"));
                }
                for (k, p) in jump_pmf {
                    if !(p.is_finite() && *p >= 0.0) {
                        return Err(Error::spec(format!("params.jump_pmf.{k}"), format!("must be >= 0, got {p}")));
                    }
                }
                let total: f64 = jump_pmf.values().sum();
                if (total - 1.0).abs() > PMF_SUM_TOL {
                    return Err(Error::spec("params.jump_pmf", format!("probabilities sum to {total}, expected 1")));
                }
                Ok(())
            }
            ProcessSpec::SymmetricStable { alpha, scale } => {
                if !(*alpha > 0.0 && *alpha <= 2.0) {
                    return Err(Error::spec("params.alpha", format!("must lie in (0, 2], got {alpha}")));
                }
                positive("params.scale", *scale)
            }
            ProcessSpec::GammaSubordinator { shape, rate } => {
                positive("params.shape", *shape)?;
                positive("params.rate", *rate)
            }
            ProcessSpec::PositiveStable { beta, scale } => {
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(Error::spec("params.beta", format!("must lie in (0, 1), got {beta}")));
                }
                positive("params.scale", *scale)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ProcessSpec::DeterministicDrift { b } => *b == 0.0,
            ProcessSpec::BrownianDrift { sigma, mu } => *sigma == 0.0 && *mu == 0.0,
            _ => false,
        }
    }

    /// `E X₁` when `E|X₁| < ∞`, `Some(+∞)` for subordinators with infinite
    /// mean, `None` when the mean is undefined.
    pub fn mean(&self) -> Option<f64> {
        match self {
            ProcessSpec::DeterministicDrift { b } => Some(*b),
            ProcessSpec::BrownianDrift { mu, .. } => Some(*mu),
            ProcessSpec::Poisson { rate } => Some(*rate),
            ProcessSpec::CompoundPoissonInteger { rate, jump_pmf } => {
                Some(rate * jump_pmf.iter().map(|(k, p)| *k as f64 * p).sum::<f64>())
            }
            ProcessSpec::SymmetricStable { alpha, .. } => (*alpha > 1.0).then_some(0.0),
            ProcessSpec::GammaSubordinator { shape, rate } => Some(shape / rate),
            ProcessSpec::PositiveStable { .. } => Some(f64::INFINITY),
        }
    }

    /// Standard deviation of `X₁`, `+∞` when the variance is infinite.
    pub fn std_dev(&self) -> f64 {
        match self {
            ProcessSpec::DeterministicDrift { .. } => 0.0,
            ProcessSpec::BrownianDrift { sigma, .. } => *sigma,
            ProcessSpec::Poisson { rate } => rate.sqrt(),
            ProcessSpec::CompoundPoissonInteger { rate, jump_pmf } => {
                (rate * jump_pmf.iter().map(|(k, p)| (*k as f64).powi(2) * p).sum::<f64>()).sqrt()
            }
            ProcessSpec::SymmetricStable { alpha, scale } => {
                if *alpha == 2.0 {
                    (2.0 * scale).sqrt()
                } else {
                    f64::INFINITY
                }
            }
            ProcessSpec::GammaSubordinator { shape, rate } => shape.sqrt() / rate,
            ProcessSpec::PositiveStable { .. } => f64::INFINITY,
        }
    }

    /// Whether the paths have finitely many jumps on bounded intervals and no
    /// infinite-activity part.
    pub fn is_finite_activity(&self) -> bool {
        !matches!(
            self,
            ProcessSpec::SymmetricStable { alpha, .. } if *alpha < 2.0
        ) && !matches!(self, ProcessSpec::GammaSubordinator { .. } | ProcessSpec::PositiveStable { .. })
    }

    /// `true` for processes with nondecreasing paths.
    pub fn is_increasing(&self) -> bool {
        match self {
            ProcessSpec::DeterministicDrift { b } => *b >= 0.0,
            ProcessSpec::BrownianDrift { sigma, mu } => *sigma == 0.0 && *mu >= 0.0,
            ProcessSpec::Poisson { .. } | ProcessSpec::GammaSubordinator { .. } | ProcessSpec::PositiveStable { .. } => {
                true
            }
            ProcessSpec::CompoundPoissonInteger { jump_pmf, .. } => {
                jump_pmf.iter().all(|(k, p)| *k > 0 || *p == 0.0)
            }
            ProcessSpec::SymmetricStable { .. } => false,
        }
    }

    pub fn is_decreasing(&self) -> bool {
        match self {
            ProcessSpec::DeterministicDrift { b } => *b <= 0.0,
            ProcessSpec::BrownianDrift { sigma, mu } => *sigma == 0.0 && *mu <= 0.0,
            ProcessSpec::CompoundPoissonInteger { jump_pmf, .. } => {
                jump_pmf.iter().all(|(k, p)| *k < 0 || *p == 0.0)
            }
            _ => false,
        }
    }
}
