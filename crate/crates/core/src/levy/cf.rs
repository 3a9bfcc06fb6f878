use num_complex::Complex64;

use super::spec::ProcessSpec;

/// Closed-form characteristic function `E e^{izX_t}` of each family.
pub fn cf_exact(spec: &ProcessSpec, z: f64, t: f64) -> Complex64 {
    assert!(t >= 0.0, "cf_exact needs t >= 0");
    let i = Complex64::i();
    let exponent: Complex64 = match spec {
        ProcessSpec::DeterministicDrift { b } => i * z * b,
        ProcessSpec::BrownianDrift { sigma, mu } => Complex64::new(-0.5 * sigma * sigma * z * z, mu * z),
        ProcessSpec::Poisson { rate } => *rate * ((i * z).exp() - 1.0),
        ProcessSpec::CompoundPoissonInteger { rate, jump_pmf } => {
            let phi: Complex64 = jump_pmf.iter().map(|(k, p)| *p * (i * z * *k as f64).exp()).sum();
            *rate * (phi - 1.0)
        }
        ProcessSpec::SymmetricStable { alpha, scale } => Complex64::new(-scale * z.abs().powf(*alpha), 0.0),
        ProcessSpec::GammaSubordinator { shape, rate } => -*shape * (1.0 - i * z / *rate).ln(),
        ProcessSpec::PositiveStable { beta, scale } => -*scale * (-i * z).powf(*beta),
    };
    (exponent * t).exp()
}
