//! Lévy–Khintchine triplets under the truncation `x·1{|x| ≤ 1}`:
//!
//! ```text
//! E e^{izX_t} = exp t[ -½ a z² + iγz + ∫ (e^{izx} - 1 - izx 1{|x|≤1}) ν(dx) ]
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::spec::ProcessSpec;
use crate::special::exp_integral_e1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevyMeasureDescriptor {
    Zero,
    /// Point masses on nonzero integers.
    AtomicOnIntegers { masses: BTreeMap<i64, f64> },
    /// Symmetric α-stable measure `K |x|^{-1-α} dx` matching `exp(-c|z|^α)`.
    StableDensity { alpha: f64, c: f64 },
    /// `q x⁻¹ e^{-a x} dx` on `(0, ∞)`.
    GammaDensity { q: f64, a: f64 },
    /// `C x^{-1-β} dx` on `(0, ∞)` matching `E e^{-uX₁} = exp(-scale u^β)`.
    PositiveStableDensity { beta: f64, scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub gauss_var: f64,
    pub levy_measure: LevyMeasureDescriptor,
    pub drift_gamma: f64,
}

/// Constant `K` of the symmetric stable Lévy density `K|x|^{-1-α}` whose
/// exponent is `-c|z|^α`. This is the one place the `c ↔ K` conversion lives;
/// it uses `∫₀^∞ (1 - cos u) u^{-1-α} du = Γ(1-α) cos(πα/2) / α` (`π/2` at α = 1).
pub fn stable_density_constant(alpha: f64, c: f64) -> f64 {
    c * alpha / (2.0 * one_minus_cos_integral(alpha))
}

/// `α ∫₀^∞ (1 - cos u) u^{-1-α} du`, i.e. `Γ(1-α) cos(πα/2)` with the α = 1 limit.
fn one_minus_cos_integral(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        PI / 2.0
    } else {
        gamma(1.0 - alpha) * (PI * alpha / 2.0).cos()
    }
}

/// Constant `C` of the positive stable density `C x^{-1-β}`.
pub fn positive_stable_density_constant(beta: f64, scale: f64) -> f64 {
    beta * scale / gamma(1.0 - beta)
}

pub fn triplet_of(spec: &ProcessSpec) -> LevyTriplet {
    use LevyMeasureDescriptor as M;
    let (gauss_var, levy_measure, drift_gamma) = match spec {
        ProcessSpec::DeterministicDrift { b } => (0.0, M::Zero, *b),
        ProcessSpec::BrownianDrift { sigma, mu } => (sigma * sigma, M::Zero, *mu),
        ProcessSpec::Poisson { rate } => (0.0, M::AtomicOnIntegers { masses: BTreeMap::from([(1, *rate)]) }, *rate),
        ProcessSpec::CompoundPoissonInteger { rate, jump_pmf } => {
            let masses: BTreeMap<i64, f64> =
                jump_pmf.iter().filter(|(_, p)| **p > 0.0).map(|(k, p)| (*k, rate * p)).collect();
            let gamma = masses.iter().filter(|(k, _)| k.abs() <= 1).map(|(k, m)| *k as f64 * m).sum();
            (0.0, M::AtomicOnIntegers { masses }, gamma)
        }
        ProcessSpec::SymmetricStable { alpha, scale } => {
            if *alpha == 2.0 {
                (2.0 * scale, M::Zero, 0.0)
            } else {
                (0.0, M::StableDensity { alpha: *alpha, c: *scale }, 0.0)
            }
        }
        ProcessSpec::GammaSubordinator { shape, rate } => {
            (0.0, M::GammaDensity { q: *shape, a: *rate }, shape * (1.0 - (-rate).exp()) / rate)
        }
        ProcessSpec::PositiveStable { beta, scale } => {
            let c = positive_stable_density_constant(*beta, *scale);
            (0.0, M::PositiveStableDensity { beta: *beta, scale: *scale }, c / (1.0 - beta))
        }
    };
    LevyTriplet { gauss_var, levy_measure, drift_gamma }
}

impl LevyMeasureDescriptor {
    /// `ν((y, ∞))` for `y > 0`.
    pub fn tail_mass(&self, y: f64) -> f64 {
        assert!(y > 0.0, "tail_mass needs y > 0");
        match self {
            LevyMeasureDescriptor::Zero => 0.0,
            LevyMeasureDescriptor::AtomicOnIntegers { masses } => {
                masses.iter().filter(|(k, _)| (**k as f64) > y).map(|(_, m)| m).sum()
            }
            LevyMeasureDescriptor::StableDensity { alpha, c } => {
                stable_density_constant(*alpha, *c) * y.powf(-alpha) / alpha
            }
            LevyMeasureDescriptor::GammaDensity { q, a } => q * exp_integral_e1(a * y),
            LevyMeasureDescriptor::PositiveStableDensity { beta, scale } => {
                positive_stable_density_constant(*beta, *scale) * y.powf(-beta) / beta
            }
        }
    }

    /// `ν((-∞, -y))` for `y > 0`.
    pub fn left_tail_mass(&self, y: f64) -> f64 {
        match self {
            LevyMeasureDescriptor::AtomicOnIntegers { masses } => {
                masses.iter().filter(|(k, _)| (**k as f64) < -y).map(|(_, m)| m).sum()
            }
            LevyMeasureDescriptor::StableDensity { .. } => self.tail_mass(y),
            _ => 0.0,
        }
    }

    /// Lebesgue density of an absolutely continuous measure at `x ≠ 0`
    /// (`None` for atomic or zero measures).
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            LevyMeasureDescriptor::Zero | LevyMeasureDescriptor::AtomicOnIntegers { .. } => None,
            LevyMeasureDescriptor::StableDensity { alpha, c } => {
                Some(stable_density_constant(*alpha, *c) * x.abs().powf(-1.0 - alpha))
            }
            LevyMeasureDescriptor::GammaDensity { q, a } => {
                Some(if x > 0.0 { q * (-a * x).exp() / x } else { 0.0 })
            }
            LevyMeasureDescriptor::PositiveStableDensity { beta, scale } => Some(if x > 0.0 {
                positive_stable_density_constant(*beta, *scale) * x.powf(-1.0 - beta)
            } else {
                0.0
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LevyMeasureDescriptor::Zero => true,
            LevyMeasureDescriptor::AtomicOnIntegers { masses } => masses.values().all(|m| *m == 0.0),
            _ => false,
        }
    }

    /// `∫ (e^{izx} - 1 - izx 1{|x|≤1}) ν(dx)`.
    fn compensated_integral(&self, z: f64) -> Complex64 {
        let i = Complex64::i();
        match self {
            LevyMeasureDescriptor::Zero => Complex64::new(0.0, 0.0),
            LevyMeasureDescriptor::AtomicOnIntegers { masses } => masses
                .iter()
                .map(|(k, m)| {
                    let x = *k as f64;
                    let comp = if x.abs() <= 1.0 { i * z * x } else { Complex64::new(0.0, 0.0) };
                    *m * ((i * z * x).exp() - 1.0 - comp)
                })
                .sum(),
            LevyMeasureDescriptor::StableDensity { alpha, c } => {
                // Symmetric: the compensator integrates to zero; the real part is
                // -2K ∫₀^∞ (1 - cos zx) x^{-1-α} dx.
                let k = stable_density_constant(*alpha, *c);
                Complex64::new(-2.0 * k * one_minus_cos_integral(*alpha) / alpha * z.abs().powf(*alpha), 0.0)
            }
            LevyMeasureDescriptor::GammaDensity { q, a } => {
                // ∫₀^∞ (e^{izx} - 1) q e^{-ax}/x dx = -q log(1 - iz/a)
                let frullani = -*q * (1.0 - i * z / *a).ln();
                let compensator = i * z * q * (1.0 - (-a).exp()) / a;
                frullani - compensator
            }
            LevyMeasureDescriptor::PositiveStableDensity { beta, scale } => {
                let c = positive_stable_density_constant(*beta, *scale);
                // ∫₀^∞ (e^{izx} - 1) C x^{-1-β} dx = -C Γ(1-β)/β (-iz)^β
                let uncompensated = -c * gamma(1.0 - beta) / beta * (-i * z).powf(*beta);
                uncompensated - i * z * c / (1.0 - beta)
            }
        }
    }
}

impl LevyTriplet {
    /// Lévy–Khintchine exponent `ψ(z)` with `E e^{izX_t} = e^{tψ(z)}`.
    pub fn exponent(&self, z: f64) -> Complex64 {
        Complex64::new(-0.5 * self.gauss_var * z * z, self.drift_gamma * z) + self.levy_measure.compensated_integral(z)
    }
}

pub fn tail_mass(m: &LevyMeasureDescriptor, y: f64) -> f64 {
    m.tail_mass(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_to_infinity, Tolerance};

    #[test]
    fn worked_triplets() {
        let t = triplet_of(&ProcessSpec::DeterministicDrift { b: 1.0 });
        assert_eq!(t, LevyTriplet { gauss_var: 0.0, levy_measure: LevyMeasureDescriptor::Zero, drift_gamma: 1.0 });
        let t = triplet_of(&ProcessSpec::Poisson { rate: 2.0 });
        assert_eq!(t.gauss_var, 0.0);
        assert_eq!(t.drift_gamma, 2.0);
        assert_eq!(t.levy_measure, LevyMeasureDescriptor::AtomicOnIntegers { masses: BTreeMap::from([(1, 2.0)]) });
        let t = triplet_of(&ProcessSpec::SymmetricStable { alpha: 2.0, scale: 1.0 });
        assert_eq!((t.gauss_var, t.drift_gamma), (2.0, 0.0));
        assert_eq!(t.levy_measure, LevyMeasureDescriptor::Zero);
    }

    #[test]
    fn atomic_tails() {
        let m = LevyMeasureDescriptor::AtomicOnIntegers { masses: BTreeMap::from([(1, 2.0)]) };
        assert_eq!(m.tail_mass(0.5), 2.0);
        assert_eq!(m.tail_mass(1.0), 0.0);
    }

    #[test]
    fn gamma_tail_matches_density_quadrature() {
        let (q, a) = (1.7, 0.8);
        let m = LevyMeasureDescriptor::GammaDensity { q, a };
        let oracle = integrate_to_infinity(|x| q * (-a * x).exp() / x, 1.0, Tolerance::relative(1e-13));
        assert!((m.tail_mass(1.0) - oracle.value).abs() < 1e-11);
    }

    #[test]
    fn stable_tail_matches_density_quadrature() {
        for &alpha in &[0.5, 1.0, 1.5] {
            let m = LevyMeasureDescriptor::StableDensity { alpha, c: 1.3 };
            let g = |s: f64| m.density(2.0 * s.exp()).unwrap() * 2.0 * s.exp();
            let oracle = integrate_to_infinity(g, 0.0, Tolerance::relative(1e-12));
            assert!(((m.tail_mass(2.0) - oracle.value) / oracle.value).abs() < 1e-9, "alpha {alpha}");
        }
    }

    #[test]
    fn gamma_exponent_matches_quadrature_of_compensated_integral() {
        // Independent route: integrate (e^{izx}-1-izx1{x≤1}) q e^{-ax}/x numerically.
        let (q, a) = (0.7, 1.3);
        let t = triplet_of(&ProcessSpec::GammaSubordinator { shape: q, rate: a });
        for &z in &[-2.0, 0.5, 3.0] {
            let dens = |x: f64| q * (-a * x).exp() / x;
            let tol = Tolerance::absolute(1e-13);
            let re_in = integrate(|x| ((z * x).cos() - 1.0) * dens(x), 0.0, 1.0, tol).value;
            let im_in = integrate(|x| ((z * x).sin() - z * x) * dens(x), 0.0, 1.0, tol).value;
            let re_out = integrate_to_infinity(|x| ((z * x).cos() - 1.0) * dens(x), 1.0, tol).value;
            let im_out = integrate_to_infinity(|x| (z * x).sin() * dens(x), 1.0, tol).value;
            let psi = Complex64::new(re_in + re_out, t.drift_gamma * z + im_in + im_out);
            assert!((psi - t.exponent(z)).norm() < 1e-9, "z={z}");
        }
    }

    #[test]
    fn positive_stable_laplace_exponent() {
        // ∫ (1 - e^{-ux}) C x^{-1-β} dx = scale u^β, checked by quadrature.
        let (beta, scale, u) = (0.6, 2.0, 1.7);
        let c = positive_stable_density_constant(beta, scale);
        let f = |x: f64| -(-u * x).exp_m1() * c * x.powf(-1.0 - beta);
        let tol = Tolerance::relative(1e-11);
        let lo = |s: f64| f((-s).exp()) * (-s).exp();
        let hi = |s: f64| f(s.exp()) * s.exp();
        let v = integrate_to_infinity(lo, 0.0, tol).value + integrate_to_infinity(hi, 0.0, tol).value;
        assert!((v - scale * u.powf(beta)).abs() < 1e-7, "{v}");
    }
}
