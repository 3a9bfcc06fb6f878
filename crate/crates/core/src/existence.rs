//! Existence of `Z = ∫₀^{∞-} e^{-X_{s-}} dY_s`.
//!
//! `Z` exists and is finite a.s. iff `X_t → +∞` and
//! `∫_{|y|≥e^c} log|y| / h_X(log|y|) ν_Y(dy) < ∞`, where `c` is any point past
//! which `h_X(x) = γ_X + ν_X((1,∞)) + ∫₁ˣ ν_X((y,∞)) dy` stays positive. When
//! `0 < E X₁ < ∞` this reduces to `∫ log⁺|y| ν_Y(dy) < ∞`.
//!
//! Finite/infinite decisions are made analytically per family; quadrature
//! only supplies magnitudes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{triplet_of, LevyMeasureDescriptor, ProcessSpec};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};

const QUAD_TOL: f64 = 1e-10;
/// Points in the log grid used to certify `h_X > 0` on `[c, c·2¹⁶]`.
pub const C_GRID_POINTS: usize = 256;
const C_GRID_SPAN_LOG2: i32 = 16;
const C_SEARCH_MAX_LOG2: i32 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Exists,
    Diverges,
    Undetermined,
}

/// Value of a log-moment integral; `None` inside `Finite` never occurs, the
/// infinite case is its own variant so the JSON stays valid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralValue {
    Finite(f64),
    Infinite,
    NotEvaluated,
}

impl IntegralValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, IntegralValue::Finite(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detail {
    pub name: String,
    pub value: f64,
}

fn detail(name: &str, value: f64) -> Detail {
    Detail { name: name.to_string(), value }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceVerdict {
    pub drifts_to_infinity: Decision,
    pub log_integral_value: IntegralValue,
    pub verdict: Verdict,
    pub details: Vec<Detail>,
}

/// `∫_lo^hi ν((y,∞)) dy` for `1 ≤ lo ≤ hi`.
fn tail_integral(m: &LevyMeasureDescriptor, lo: f64, hi: f64) -> f64 {
    match m {
        LevyMeasureDescriptor::Zero => 0.0,
        LevyMeasureDescriptor::AtomicOnIntegers { masses } => masses
            .iter()
            .filter(|(k, _)| (**k as f64) > lo)
            .map(|(k, w)| w * ((*k as f64).min(hi) - lo))
            .sum(),
        _ => integrate(|y| m.tail_mass(y), lo, hi, Tolerance::absolute(QUAD_TOL)).value,
    }
}

/// `h_X(x)` for `x ≥ 1`.
pub fn h_x(spec_x: &ProcessSpec, x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!("h_X is defined here for x >= 1, got {x}")));
    }
    let t = triplet_of(spec_x);
    Ok(t.drift_gamma + t.levy_measure.tail_mass(1.0) + tail_integral(&t.levy_measure, 1.0, x))
}

fn log_grid(c: f64) -> impl Iterator<Item = f64> {
    let span = f64::from(C_GRID_SPAN_LOG2) * std::f64::consts::LN_2;
    (0..C_GRID_POINTS).map(move |i| c * (span * i as f64 / (C_GRID_POINTS - 1) as f64).exp())
}

/// Smallest power of two `c ≥ 1` with `h_X > 0` on a 256-point log grid of
/// `[c, c·2¹⁶]`.
pub fn choose_c(spec_x: &ProcessSpec) -> Option<f64> {
    (0..=C_SEARCH_MAX_LOG2)
        .map(|k| 2f64.powi(k))
        .find(|&c| log_grid(c).all(|x| h_x(spec_x, x).map(|h| h > 0.0).unwrap_or(false)))
}

/// Whether `X_t → +∞` a.s., decided per family through `E|X₁| < ∞, E X₁ > 0`
/// or, failing that, `∫₁^∞ ν_X((y,∞)) dy = ∞` together with the negative-jump
/// integral condition.
pub fn drifts_to_infinity(spec_x: &ProcessSpec) -> Decision {
    drift_analysis(spec_x).0
}

fn drift_analysis(spec_x: &ProcessSpec) -> (Decision, Vec<Detail>) {
    let mut details = Vec::new();
    let decision = match spec_x {
        ProcessSpec::SymmetricStable { alpha, .. } if *alpha <= 1.0 => {
            // Infinite mean; the negative-jump integral behaves like ∫ dx/|x|
            // (α < 1) or ∫ dx/(|x| log|x|) (α = 1) and diverges.
            details.push(detail("negative_jump_integral", f64::INFINITY));
            Decision::No
        }
        ProcessSpec::PositiveStable { .. } => {
            // ∫ ν((y,∞)) dy diverges and there are no negative jumps.
            details.push(detail("positive_tail_integral", f64::INFINITY));
            details.push(detail("negative_jump_integral", 0.0));
            Decision::Yes
        }
        other => {
            let mean = other.mean().expect("finite-mean family");
            details.push(detail("mean", mean));
            if mean > 0.0 {
                Decision::Yes
            } else {
                Decision::No
            }
        }
    };
    (decision, details)
}

/// `∫_{|y|≥e^c} (log|y| / h_X(log|y|)) ν_Y(dy)`.
pub fn log_moment_integral(spec_y: &ProcessSpec, spec_x: &ProcessSpec, c: f64) -> Result<IntegralValue> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("c must be > 0, got {c}")));
    }
    let c_eval = c.max(1.0);
    for x in log_grid(c_eval) {
        let h = h_x(spec_x, x)?;
        if h <= 0.0 {
            return Err(Error::NonPositiveH { x, value: h });
        }
    }
    let m = triplet_of(spec_y).levy_measure;
    let threshold = c.exp();
    let value = match &m {
        LevyMeasureDescriptor::Zero => 0.0,
        LevyMeasureDescriptor::AtomicOnIntegers { masses } => {
            let mut s = 0.0;
            for (k, w) in masses {
                let r = (*k as f64).abs();
                if r >= threshold {
                    s += w * r.ln() / h_x(spec_x, r.ln())?;
                }
            }
            s
        }
        // Every continuous family here has ∫ log⁺|y| ν_Y(dy) < ∞ and h_X is
        // nondecreasing, so the integral is finite; quadrature gives its size.
        _ => {
            let hx = |u: f64| h_x(spec_x, u.max(1.0)).unwrap_or(f64::NAN);
            let f = |u: f64| {
                let r = u.exp();
                let dens = m.density(r).unwrap_or(0.0) + m.density(-r).unwrap_or(0.0);
                if dens == 0.0 {
                    0.0
                } else {
                    u / hx(u) * dens * r
                }
            };
            let q = integrate_to_infinity(f, c, Tolerance::absolute(QUAD_TOL));
            q.value
        }
    };
    Ok(IntegralValue::Finite(value))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerMoment {
    pub finite: bool,
    pub value: IntegralValue,
}

/// `∫ (log⁺|y|)^{1/α} ν_Y(dy)`: finite for every supported family (bounded
/// jumps, or tails decaying polynomially or exponentially).
pub fn alpha_power_test(spec_y: &ProcessSpec, alpha: f64) -> Result<PowerMoment> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    let p = 1.0 / alpha;
    let m = triplet_of(spec_y).levy_measure;
    let value = match &m {
        LevyMeasureDescriptor::Zero => 0.0,
        LevyMeasureDescriptor::AtomicOnIntegers { masses } => masses
            .iter()
            .filter(|(k, _)| k.abs() > 1)
            .map(|(k, w)| w * ((*k as f64).abs().ln()).powf(p))
            .sum(),
        _ => {
            let f = |u: f64| {
                let r = u.exp();
                let dens = m.density(r).unwrap_or(0.0) + m.density(-r).unwrap_or(0.0);
                u.powf(p) * dens * r
            };
            integrate_to_infinity(f, 0.0, Tolerance::absolute(QUAD_TOL)).value
        }
    };
    Ok(PowerMoment { finite: true, value: IntegralValue::Finite(value) })
}

pub fn existence_verdict(spec_x: &ProcessSpec, spec_y: &ProcessSpec) -> Result<ExistenceVerdict> {
    spec_x.validate()?;
    spec_y.validate()?;
    let (drifts, mut details) = drift_analysis(spec_x);
    if spec_y.is_zero() {
        details.push(detail("zero_process_y", 1.0));
        return Ok(ExistenceVerdict {
            drifts_to_infinity: drifts,
            log_integral_value: IntegralValue::Finite(0.0),
            verdict: Verdict::Exists,
            details,
        });
    }
    let c = choose_c(spec_x);
    if let Some(c) = c {
        details.push(detail("c", c));
        details.push(detail("h_x_at_c", h_x(spec_x, c)?));
    }
    let log_integral = match c {
        Some(c) => log_moment_integral(spec_y, spec_x, c)?,
        None => IntegralValue::NotEvaluated,
    };
    if drifts == Decision::No {
        return Ok(ExistenceVerdict {
            drifts_to_infinity: drifts,
            log_integral_value: log_integral,
            verdict: Verdict::Diverges,
            details,
        });
    }
    let mean = spec_x.mean().unwrap_or(f64::NAN);
    let verdict = if mean > 0.0 && mean.is_finite() {
        let simple = alpha_power_test(spec_y, 1.0)?;
        if let IntegralValue::Finite(v) = simple.value {
            details.push(detail("log_plus_moment", v));
        }
        if simple.finite {
            Verdict::Exists
        } else {
            Verdict::Diverges
        }
    } else {
        match log_integral {
            IntegralValue::Finite(_) => Verdict::Exists,
            IntegralValue::Infinite => Verdict::Diverges,
            IntegralValue::NotEvaluated => Verdict::Undetermined,
        }
    };
    Ok(ExistenceVerdict { drifts_to_infinity: drifts, log_integral_value: log_integral, verdict, details })
}
