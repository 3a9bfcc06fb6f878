//! Samplers for `Z = ∫₀^{∞-} e^{-X_{s-}} dY_s`.
//!
//! * pathwise integration on a truncated horizon ([`sample_z_euler`]);
//! * the series `Z = Σ_n e^{-n} W_n` when `X` is a Poisson process
//!   ([`sample_z_poisson_series`]);
//! * closed forms: `∫₀^∞ e^{aB_s - bs} ds = 2/(a² Γ_{2b/a²})`
//!   ([`dufresne_sample`]) and the type G laws `Γ^{-1/α} S`
//!   ([`type_g_sample_mixture`], [`type_g_sample_subordinated`]).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::engine::{integrate_functional, IntegrationScheme, PairDriver};
use crate::error::{Error, Result};
use crate::gou::{sample_gou_marginal, JointPairSpec};
use crate::levy::sample::{exponential, gamma_variate, standard_positive_stable, standard_symmetric_stable};
use crate::levy::{sample_increment, ProcessSpec};
use crate::rng::{sample_batch, RngStream};

/// Terms kept in the Poisson-case series.
pub const DEFAULT_SERIES_TERMS: usize = 40;
/// Relative Cauchy-gap tolerance of the pathwise sampler.
pub const DEFAULT_CAUCHY_TOL: f64 = 1e-6;
/// Horizon used when `X₁` has no finite mean and variance to plan with.
pub const FALLBACK_HORIZON: f64 = 200.0;
/// `X_{T/2}` should clear this level ...
const HORIZON_LEVEL: f64 = 40.0;
/// ... with this many standard deviations to spare.
const HORIZON_SDS: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Euler,
    PoissonSeries,
    Dufresne,
    TypeGMixture,
    TypeGSubordinated,
    GouMarginal,
}

/// Horizon `T` for the pathwise sampler: the smallest `T` with
/// `|E X_{T/2}| - 6 sd(X_{T/2}) ≥ 40`, so that `e^{-X}` is far below the
/// Cauchy tolerance over `[T/2, T]`.
pub fn default_horizon(spec_x: &ProcessSpec) -> f64 {
    let m = spec_x.mean().map(f64::abs).unwrap_or(0.0);
    let s = spec_x.std_dev();
    if !(m > 0.0 && m.is_finite() && s.is_finite()) {
        return FALLBACK_HORIZON;
    }
    // m t - k s √t = L  ⇒  √t = (k s + sqrt(k² s² + 4 m L)) / (2m)
    let k = HORIZON_SDS;
    let root = (k * s + (k * k * s * s + 4.0 * m * HORIZON_LEVEL).sqrt()) / (2.0 * m);
    2.0 * root * root
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerConfig {
    /// `None` picks [`default_horizon`].
    #[serde(default)]
    pub horizon: Option<f64>,
    /// Base grid step; cells stretch up to `max_step` once `e^{-X}` is small.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_max_step")]
    pub max_step: f64,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default)]
    pub scheme: IntegrationScheme,
}

fn default_step() -> f64 {
    0.01
}

fn default_max_step() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    DEFAULT_CAUCHY_TOL
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self { horizon: None, step: default_step(), max_step: default_max_step(), tolerance: default_tol(), scheme: IntegrationScheme::default() }
    }
}

impl EulerConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::spec("euler.horizon", "must be finite and > 0"));
            }
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::spec("euler.step", "must be finite and > 0"));
        }
        if !(self.max_step >= self.step) {
            return Err(Error::spec("euler.max_step", "must be >= step"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::spec("euler.tolerance", "must be > 0"));
        }
        Ok(())
    }
}

/// Partial integrals at `T/4`, `T/2`, `T` and the relative gap
/// `|Z_T - Z_{T/2}| / max(1, |Z_T|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceDiag {
    pub horizon: f64,
    pub partial_values: [f64; 3],
    pub cauchy_gap: f64,
    pub tolerance: f64,
    pub converged: bool,
}

impl ConvergenceDiag {
    fn new(horizon: f64, partial_values: [f64; 3], tolerance: f64) -> Self {
        let [_, half, full] = partial_values;
        let cauchy_gap = (full - half).abs() / full.abs().max(1.0);
        let converged = cauchy_gap.is_finite() && cauchy_gap < tolerance;
        Self { horizon, partial_values, cauchy_gap, tolerance, converged }
    }
}

fn euler_on(driver: &PairDriver, horizon: f64, cfg: &EulerConfig, l_transform: Option<f64>, rng: &mut (impl Rng + ?Sized)) -> (f64, ConvergenceDiag) {
    let checkpoints = [horizon / 4.0, horizon / 2.0, horizon];
    let (path, marks) = driver.simulate_adaptive(horizon, cfg.step, cfg.max_step, &checkpoints, rng);
    let scheme = if driver.is_correlated() { IntegrationScheme::LeftPoint } else { cfg.scheme };
    let z = integrate_functional(&path, scheme, driver.y_grid_index, driver.x_var, l_transform, &marks);
    let diag = ConvergenceDiag::new(horizon, [z[0], z[1], z[2]], cfg.tolerance);
    (z[2], diag)
}

/// `∫₀^T e^{-X_{s-}} dY_s` for independent `X`, `Y`, with convergence
/// diagnostics. Jumps of `Y` enter exactly with the pre-jump integrand; the
/// continuous part of `Y` is integrated cell by cell.
pub fn sample_z_euler<R: Rng + ?Sized>(
    spec_x: &ProcessSpec,
    spec_y: &ProcessSpec,
    cfg: &EulerConfig,
    rng: &mut R,
) -> (f64, ConvergenceDiag) {
    let horizon = cfg.horizon.unwrap_or_else(|| default_horizon(spec_x));
    euler_on(&PairDriver::independent(spec_x, spec_y), horizon, cfg, None, rng)
}

/// `∫₀^T e^{-ξ_{s-}} dL_s` for a joint pair, where `L` is the
/// L-transformation of `η`.
pub fn sample_z_pair_euler<R: Rng + ?Sized>(pair: &JointPairSpec, cfg: &EulerConfig, rng: &mut R) -> (f64, ConvergenceDiag) {
    let horizon = cfg.horizon.unwrap_or_else(|| default_horizon(&pair.xi_spec));
    let driver = PairDriver::for_pair(pair);
    let l = match pair.coupling {
        crate::gou::Coupling::Independent => None,
        _ => Some(pair.a12()),
    };
    euler_on(&driver, horizon, cfg, l, rng)
}

/// `Y(T₁)` with `T₁ ~ Exp(a)` independent of `Y`.
pub fn sample_y_at_exp_time<R: Rng + ?Sized>(spec_y: &ProcessSpec, a: f64, rng: &mut R) -> f64 {
    let t = exponential(a, rng);
    if t > 0.0 {
        sample_increment(spec_y, t, rng)
    } else {
        0.0
    }
}

/// `Σ_{n<N} e^{-n} W_n` with i.i.d. `W_n =ᵈ Y(T₁)`: the exponential
/// functional for `X` a Poisson process of rate `a`.
pub fn sample_z_poisson_series<R: Rng + ?Sized>(a: f64, spec_y: &ProcessSpec, n_terms: usize, rng: &mut R) -> f64 {
    assert!(n_terms >= 1, "need at least one term");
    // Accumulate from the smallest term so the sum does not depend on
    // rounding of the leading term.
    let w: Vec<f64> = (0..n_terms).map(|_| sample_y_at_exp_time(spec_y, a, rng)).collect();
    w.iter().enumerate().rev().map(|(n, w)| (-(n as f64)).exp() * w).sum()
}

/// `2/(a² Γ)` with `Γ ~ Gamma(2b/a², 1)`: the law of `∫₀^∞ e^{aB_s - bs} ds`.
pub fn dufresne_sample<R: Rng + ?Sized>(a_coef: f64, b_coef: f64, rng: &mut R) -> f64 {
    assert!(a_coef != 0.0 && b_coef > 0.0, "dufresne_sample needs a != 0, b > 0");
    let a2 = a_coef * a_coef;
    2.0 / (a2 * gamma_variate(2.0 * b_coef / a2, 1.0, rng))
}

/// `(2c)⁻¹ α² Γ_{2λ/α}`.
fn type_g_gamma<R: Rng + ?Sized>(alpha: f64, lambda: f64, c: f64, rng: &mut R) -> f64 {
    alpha * alpha / (2.0 * c) * gamma_variate(2.0 * lambda / alpha, 1.0, rng)
}

/// `Γ^{-1/α} S` with `E e^{izS} = e^{-|z|^α}`: the exponential functional of
/// `X = B_t + λt`, `Y` symmetric α-stable with scale `c`.
pub fn type_g_sample_mixture<R: Rng + ?Sized>(alpha: f64, lambda: f64, c: f64, rng: &mut R) -> f64 {
    let g = type_g_gamma(alpha, lambda, c, rng);
    g.powf(-1.0 / alpha) * standard_symmetric_stable(alpha, rng)
}

/// `(Γ^{-2/α} S⁺)^{1/2} W` with `E e^{-uS⁺} = e^{-(2u)^{α/2}}` and `W`
/// standard normal; same law as [`type_g_sample_mixture`].
pub fn type_g_sample_subordinated<R: Rng + ?Sized>(alpha: f64, lambda: f64, c: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "subordinated sampler needs alpha in (0, 2), got {alpha}; use the mixture sampler at alpha = 2"
        )));
    }
    let g = type_g_gamma(alpha, lambda, c, rng);
    let s_plus = positive_stable_half_index(alpha, rng);
    let w: f64 = rng.sample(StandardNormal);
    Ok((g.powf(-2.0 / alpha) * s_plus).sqrt() * w)
}

/// `S⁺_{α/2}` with `E e^{-uS⁺} = e^{-(2u)^{α/2}}`.
pub fn positive_stable_half_index<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    2.0 * standard_positive_stable(alpha / 2.0, rng)
}

/// What to sample, with its parameters. Serialized as the provenance of a
/// [`SampleSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SamplerConfig {
    Euler {
        x: ProcessSpec,
        y: ProcessSpec,
        #[serde(default)]
        euler: EulerConfig,
    },
    PoissonSeries {
        a: f64,
        y: ProcessSpec,
        #[serde(default = "default_terms")]
        n_terms: usize,
    },
    Dufresne {
        a_coef: f64,
        b_coef: f64,
    },
    TypeGMixture {
        alpha: f64,
        lambda: f64,
        c: f64,
    },
    TypeGSubordinated {
        alpha: f64,
        lambda: f64,
        c: f64,
    },
    GouMarginal {
        pair: JointPairSpec,
        time: f64,
        #[serde(default = "default_step")]
        step: f64,
        #[serde(default)]
        euler: EulerConfig,
    },
}

fn default_terms() -> usize {
    DEFAULT_SERIES_TERMS
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::spec(path, format!("must be finite and > 0, got {v}")))
    }
}

impl SamplerConfig {
    pub fn method(&self) -> Method {
        match self {
            SamplerConfig::Euler { .. } => Method::Euler,
            SamplerConfig::PoissonSeries { .. } => Method::PoissonSeries,
            SamplerConfig::Dufresne { .. } => Method::Dufresne,
            SamplerConfig::TypeGMixture { .. } => Method::TypeGMixture,
            SamplerConfig::TypeGSubordinated { .. } => Method::TypeGSubordinated,
            SamplerConfig::GouMarginal { .. } => Method::GouMarginal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SamplerConfig::Euler { x, y, euler } => {
                x.validate().map_err(|e| e.within("x"))?;
                y.validate().map_err(|e| e.within("y"))?;
                euler.validate()
            }
            SamplerConfig::PoissonSeries { a, y, n_terms } => {
                positive("a", *a)?;
                y.validate().map_err(|e| e.within("y"))?;
                if *n_terms == 0 {
                    return Err(Error::spec("n_terms", "must be >= 1"));
                }
                Ok(())
            }
            SamplerConfig::Dufresne { a_coef, b_coef } => {
                if !(*a_coef != 0.0 && a_coef.is_finite()) {
                    return Err(Error::spec("a_coef", "must be finite and nonzero"));
                }
                positive("b_coef", *b_coef)
            }
            SamplerConfig::TypeGMixture { alpha, lambda, c } | SamplerConfig::TypeGSubordinated { alpha, lambda, c } => {
                let upper_ok = if matches!(self, SamplerConfig::TypeGMixture { .. }) { *alpha <= 2.0 } else { *alpha < 2.0 };
                if !(*alpha > 0.0 && upper_ok) {
                    return Err(Error::spec("alpha", format!("out of range: {alpha}")));
                }
                positive("lambda", *lambda)?;
                positive("c", *c)
            }
            SamplerConfig::GouMarginal { pair, time, step, euler } => {
                pair.validate().map_err(|e| e.within("pair"))?;
                positive("time", *time)?;
                positive("step", *step)?;
                euler.validate()
            }
        }
    }

    /// One draw plus whether the draw is trustworthy (pathwise draws report
    /// their convergence diagnostic, every other method is exact).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, bool) {
        match self {
            SamplerConfig::Euler { x, y, euler } => {
                let (z, d) = sample_z_euler(x, y, euler, rng);
                (z, d.converged)
            }
            SamplerConfig::PoissonSeries { a, y, n_terms } => (sample_z_poisson_series(*a, y, *n_terms, rng), true),
            SamplerConfig::Dufresne { a_coef, b_coef } => (dufresne_sample(*a_coef, *b_coef, rng), true),
            SamplerConfig::TypeGMixture { alpha, lambda, c } => (type_g_sample_mixture(*alpha, *lambda, *c, rng), true),
            SamplerConfig::TypeGSubordinated { alpha, lambda, c } => {
                (type_g_sample_subordinated(*alpha, *lambda, *c, rng).expect("validated alpha"), true)
            }
            SamplerConfig::GouMarginal { pair, time, step, euler } => (sample_gou_marginal(pair, *time, *step, euler, rng), true),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub method: Option<Method>,
    pub spec_provenance: serde_json::Value,
    pub seed: u64,
    pub stream_id: u64,
    pub n: usize,
    /// Pathwise draws whose Cauchy diagnostic failed.
    pub unconverged: usize,
}

impl SampleSet {
    /// Wraps externally produced values.
    pub fn from_values(values: Vec<f64>, seed: u64) -> Self {
        let n = values.len();
        Self { values, method: None, spec_provenance: serde_json::Value::Null, seed, stream_id: 0, n, unconverged: 0 }
    }

    pub fn provenance(&self) -> serde_json::Value {
        serde_json::json!({
            "method": self.method,
            "spec": self.spec_provenance,
            "seed": self.seed,
            "stream_id": self.stream_id,
            "n": self.n,
        })
    }
}

/// `n` draws from `cfg` on `stream`, identical for any thread count.
pub fn sample_set(cfg: &SamplerConfig, n: usize, stream: RngStream) -> Result<SampleSet> {
    cfg.validate()?;
    let draws = sample_batch(n, stream, |rng| cfg.draw(rng));
    let unconverged = draws.iter().filter(|(_, ok)| !ok).count();
    Ok(SampleSet {
        values: draws.into_iter().map(|(v, _)| v).collect(),
        method: Some(cfg.method()),
        spec_provenance: serde_json::to_value(cfg)?,
        seed: stream.seed,
        stream_id: stream.stream_id,
        n,
        unconverged,
    })
}
