//! Exact-in-law increment samplers.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};

use super::spec::ProcessSpec;

/// Symmetric α-stable variate with `E e^{izS} = e^{-|z|^α}` (Chambers–Mallows–Stuck).
pub fn standard_symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    if (alpha - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
    a * b
}

/// Positive strictly β-stable variate with `E e^{-uS} = e^{-u^β}` (Kanter).
pub fn standard_positive_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample::<f64, _>(Open01) * PI;
    let w: f64 = rng.sample(Exp1);
    let a = (beta * u).sin() / u.sin().powf(1.0 / beta);
    let b = (((1.0 - beta) * u).sin() / w).powf((1.0 - beta) / beta);
    a * b
}

pub fn gamma_variate<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0 / rate).expect("gamma parameters").sample(rng)
}

pub fn exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / rate
}

/// Jump part of a finite-activity family.
#[derive(Clone, Debug)]
pub(crate) enum JumpLaw {
    Unit { rate: f64 },
    Integer { rate: f64, sizes: Vec<i64>, index: WeightedIndex<f64> },
}

impl JumpLaw {
    pub fn rate(&self) -> f64 {
        match self {
            JumpLaw::Unit { rate } | JumpLaw::Integer { rate, .. } => *rate,
        }
    }

    pub fn size<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpLaw::Unit { .. } => 1.0,
            JumpLaw::Integer { sizes, index, .. } => sizes[index.sample(rng)] as f64,
        }
    }
}

/// Infinite-activity part, simulated by exact increments on the mesh.
#[derive(Clone, Copy, Debug)]
pub(crate) enum GridLaw {
    SymmetricStable { alpha: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    PositiveStable { beta: f64, scale: f64 },
}

impl GridLaw {
    /// Stability index when the part is strictly stable.
    pub fn stable_index(&self) -> Option<f64> {
        match self {
            GridLaw::SymmetricStable { alpha, .. } => Some(*alpha),
            GridLaw::PositiveStable { beta, .. } => Some(*beta),
            GridLaw::Gamma { .. } => None,
        }
    }

    pub fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        match *self {
            GridLaw::SymmetricStable { alpha, scale } => {
                (scale * dt).powf(1.0 / alpha) * standard_symmetric_stable(alpha, rng)
            }
            GridLaw::Gamma { shape, rate } => gamma_variate(shape * dt, rate, rng),
            GridLaw::PositiveStable { beta, scale } => {
                (scale * dt).powf(1.0 / beta) * standard_positive_stable(beta, rng)
            }
        }
    }
}

/// Path decomposition of a family: linear drift, Brownian part, finite-activity
/// jumps and an infinite-activity part.
#[derive(Clone, Debug)]
pub(crate) struct Components {
    pub drift: f64,
    pub sigma: f64,
    pub jumps: Option<JumpLaw>,
    pub grid: Option<GridLaw>,
}

impl Components {
    pub fn of(spec: &ProcessSpec) -> Self {
        let none = Components { drift: 0.0, sigma: 0.0, jumps: None, grid: None };
        match spec {
            ProcessSpec::DeterministicDrift { b } => Components { drift: *b, ..none },
            ProcessSpec::BrownianDrift { sigma, mu } => Components { drift: *mu, sigma: *sigma, ..none },
            ProcessSpec::Poisson { rate } => Components { jumps: Some(JumpLaw::Unit { rate: *rate }), ..none },
            ProcessSpec::CompoundPoissonInteger { rate, jump_pmf } => {
                let sizes: Vec<i64> = jump_pmf.keys().copied().collect();
                let index = WeightedIndex::new(jump_pmf.values().copied()).expect("valid jump pmf");
                Components { jumps: Some(JumpLaw::Integer { rate: *rate, sizes, index }), ..none }
            }
            ProcessSpec::SymmetricStable { alpha, scale } => {
                if *alpha == 2.0 {
                    Components { sigma: (2.0 * scale).sqrt(), ..none }
                } else {
                    Components { grid: Some(GridLaw::SymmetricStable { alpha: *alpha, scale: *scale }), ..none }
                }
            }
            ProcessSpec::GammaSubordinator { shape, rate } => {
                Components { grid: Some(GridLaw::Gamma { shape: *shape, rate: *rate }), ..none }
            }
            ProcessSpec::PositiveStable { beta, scale } => {
                Components { grid: Some(GridLaw::PositiveStable { beta: *beta, scale: *scale }), ..none }
            }
        }
    }

    /// Increment of everything except the finite-activity jumps over `dt`.
    pub fn continuous_increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> ContParts {
        let gauss = if self.sigma > 0.0 {
            let n: f64 = rng.sample(StandardNormal);
            self.sigma * dt.sqrt() * n
        } else {
            0.0
        };
        let grid = self.grid.map_or(0.0, |g| g.increment(dt, rng));
        ContParts { drift: self.drift * dt, gauss, grid }
    }
}

/// Continuous increment split by component, so integrators can weight each
/// part according to its own scaling.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContParts {
    pub drift: f64,
    pub gauss: f64,
    pub grid: f64,
}

impl ContParts {
    pub fn total(&self) -> f64 {
        self.drift + self.gauss + self.grid
    }
}

/// One draw of `X_{t+dt} - X_t`.
pub fn sample_increment<R: Rng + ?Sized>(spec: &ProcessSpec, dt: f64, rng: &mut R) -> f64 {
    assert!(dt > 0.0, "sample_increment needs dt > 0");
    let comp = Components::of(spec);
    let mut inc = comp.continuous_increment(dt, rng).total();
    if let Some(j) = &comp.jumps {
        let count = Poisson::new(j.rate() * dt).map(|p| p.sample(rng)).unwrap_or(0.0) as u64;
        for _ in 0..count {
            inc += j.size(rng);
        }
    }
    inc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn drift_increment_is_deterministic() {
        let mut rng = RngStream::new(1, 1).rng();
        assert_eq!(sample_increment(&ProcessSpec::DeterministicDrift { b: 2.5 }, 0.4, &mut rng), 2.5 * 0.4);
    }

    #[test]
    fn poisson_increment_mean() {
        let mut rng = RngStream::new(2, 1).rng();
        let (a, dt, n) = (3.0, 0.7, 1_000_000);
        let xs: Vec<f64> = (0..n).map(|_| sample_increment(&ProcessSpec::Poisson { rate: a }, dt, &mut rng)).collect();
        let (m, _) = mean_var(&xs);
        let se = (a * dt / n as f64).sqrt();
        assert!((m - a * dt).abs() < 4.0 * se, "{m}");
    }

    #[test]
    fn stable_two_has_variance_two() {
        let mut rng = RngStream::new(3, 1).rng();
        let n = 1_000_000;
        let s = ProcessSpec::SymmetricStable { alpha: 2.0, scale: 1.0 };
        let xs: Vec<f64> = (0..n).map(|_| sample_increment(&s, 1.0, &mut rng)).collect();
        let (_, v) = mean_var(&xs);
        // Var of sample variance for N(0, 2): 2σ⁴/(n-1) = 8/(n-1).
        let se = (8.0 / (n as f64 - 1.0)).sqrt();
        assert!((v - 2.0).abs() < 4.0 * se, "{v}");
    }

    #[test]
    fn cms_at_alpha_two_is_gaussian_route_too() {
        let mut rng = RngStream::new(4, 1).rng();
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| standard_symmetric_stable(2.0, &mut rng)).collect();
        let (_, v) = mean_var(&xs);
        assert!((v - 2.0).abs() < 4.0 * (8.0 / n as f64).sqrt());
    }

    #[test]
    fn positive_stable_laplace_transform() {
        let mut rng = RngStream::new(5, 1).rng();
        let n = 200_000;
        let beta = 0.75;
        let xs: Vec<f64> = (0..n).map(|_| standard_positive_stable(beta, &mut rng)).collect();
        for &u in &[0.1, 1.0, 10.0] {
            let emp = xs.iter().map(|x| (-u * x).exp()).sum::<f64>() / n as f64;
            let exact = (-(u as f64).powf(beta)).exp();
            assert!((emp - exact).abs() < 5.0 / (n as f64).sqrt(), "u={u}: {emp} vs {exact}");
        }
    }

    #[test]
    fn gamma_increment_moments() {
        let mut rng = RngStream::new(6, 1).rng();
        let (q, a, dt, n) = (2.0, 3.0, 0.5, 400_000);
        let s = ProcessSpec::GammaSubordinator { shape: q, rate: a };
        let xs: Vec<f64> = (0..n).map(|_| sample_increment(&s, dt, &mut rng)).collect();
        let (m, _) = mean_var(&xs);
        let se = ((q * dt) / (a * a) / n as f64).sqrt();
        assert!((m - q * dt / a).abs() < 4.0 * se);
    }
}
