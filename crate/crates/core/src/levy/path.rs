use rand::Rng;
use serde::{Deserialize, Serialize};

use super::spec::ProcessSpec;
use crate::engine::{mesh, PairDriver, PairPath};
use crate::error::{Error, Result};

/// A simulated path on a mesh. At a jump time `values` holds the left limit
/// `X_{t-}`; the jump itself is listed in `jumps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSkeleton {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub jumps: Vec<(f64, f64)>,
}

impl PathSkeleton {
    pub(crate) fn from_parts(times: &[f64], left: &[f64], jump: &[f64]) -> Self {
        let jumps = times.iter().zip(jump).filter(|(_, d)| **d != 0.0).map(|(t, d)| (*t, *d)).collect();
        Self { times: times.to_vec(), values: left.to_vec(), jumps }
    }

    pub(crate) fn x_of(p: &PairPath) -> Self {
        Self::from_parts(&p.times, &p.x_left, &p.x_jump)
    }

    pub(crate) fn y_of(p: &PairPath) -> Self {
        Self::from_parts(&p.times, &p.y_left, &p.y_jump)
    }

    /// Checks the structural invariants.
    pub fn is_well_formed(&self) -> bool {
        let last = self.times.last().copied().unwrap_or(0.0);
        self.times.len() == self.values.len()
            && self.times.first() == Some(&0.0)
            && self.values.first() == Some(&0.0)
            && self.times.windows(2).all(|w| w[0] < w[1])
            && self.jumps.iter().all(|(t, _)| *t > 0.0 && *t <= last)
    }

    /// Jump size at mesh index `i` (0 if none).
    pub fn jump_at(&self, i: usize) -> f64 {
        let t = self.times[i];
        match self.jumps.binary_search_by(|(s, _)| s.total_cmp(&t)) {
            Ok(k) => self.jumps[k].1,
            Err(_) => 0.0,
        }
    }

    /// Right-continuous value `X_{t_i}`.
    pub fn value_after(&self, i: usize) -> f64 {
        self.values[i] + self.jump_at(i)
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }
}

/// Simulates one path of `spec` on `[0, horizon]` with grid step `step`;
/// finite-activity jumps are placed at their exact times.
pub fn sample_path<R: Rng + ?Sized>(spec: &ProcessSpec, horizon: f64, step: f64, rng: &mut R) -> Result<PathSkeleton> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be > 0, got {horizon}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid step must be > 0, got {step}")));
    }
    let driver = PairDriver::independent(spec, &ProcessSpec::zero());
    let path = driver.simulate(&mesh(horizon, step, &[]), rng);
    Ok(PathSkeleton::x_of(&path))
}

/// Default grid step `2⁻¹⁰ T`.
pub fn default_step(horizon: f64) -> f64 {
    horizon / 1024.0
}
