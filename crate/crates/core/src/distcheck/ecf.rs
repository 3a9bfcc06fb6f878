use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::TestReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcfEstimate {
    pub z_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `1/√n` bound on the standard error of each value.
    pub stderr: Vec<f64>,
    pub n: usize,
}

/// 41 equally spaced points on `[-5, 5]`.
pub fn default_z_grid() -> Vec<f64> {
    (-20..=20).map(|k| 0.25 * k as f64).collect()
}

/// `(1/n) Σ e^{izx}`. Summation order is fixed, and `cos`/`sin` are even/odd
/// bit for bit, so `ecf(-z)` is exactly the conjugate of `ecf(z)`.
pub(crate) fn ecf_at(samples: &[f64], z: f64) -> Complex64 {
    if z == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for &x in samples {
        let (s, c) = (z * x).sin_cos();
        re += c;
        im += s;
    }
    let n = samples.len() as f64;
    Complex64::new(re / n, im / n)
}

pub fn ecf(samples: &[f64], z_grid: &[f64]) -> EcfEstimate {
    assert!(!samples.is_empty(), "ecf needs samples");
    let se = 1.0 / (samples.len() as f64).sqrt();
    EcfEstimate {
        z_grid: z_grid.to_vec(),
        values: z_grid.iter().map(|&z| ecf_at(samples, z)).collect(),
        stderr: vec![se; z_grid.len()],
        n: samples.len(),
    }
}

/// Checks `φ_Z(z) = φ_Z(bz) φ_{W₀}(z)` on `z_grid`.
///
/// The statistic is `max_z |φ̂_Z(z) - φ̂_Z(bz) φ̂_W(z)| / env(z)` with the
/// first-order envelope `env = (1 + |φ̂_W(z)|)/√n_Z + |φ̂_Z(bz)|/√n_W`; the
/// check passes below 3.
pub fn factorization_residual(z_samples: &[f64], w0_samples: &[f64], b: f64, z_grid: &[f64]) -> TestReport {
    let provenance = serde_json::json!({ "b": b, "z_grid": z_grid, "n_z": z_samples.len(), "n_w": w0_samples.len() });
    let (nz, nw) = (z_samples.len() as f64, w0_samples.len() as f64);
    let (sz, sw) = (1.0 / nz.sqrt(), 1.0 / nw.sqrt());
    let mut worst = 0.0f64;
    let mut worst_residual = 0.0f64;
    for &z in z_grid {
        let phi_z = ecf_at(z_samples, z);
        let phi_zb = ecf_at(z_samples, b * z);
        let phi_w = ecf_at(w0_samples, z);
        if phi_zb.norm() < 5.0 * sz {
            return TestReport::inconclusive(
                "factorization_residual",
                format!("|ecf_Z(bz)| = {:.3e} below 5 standard errors at z = {z}", phi_zb.norm()),
                provenance,
            );
        }
        let r = (phi_z - phi_zb * phi_w).norm();
        let env = (1.0 + phi_w.norm()) * sz + phi_zb.norm() * sw;
        worst = worst.max(r / env);
        worst_residual = worst_residual.max(r);
    }
    TestReport::compare("factorization_residual", worst, 3.0, provenance)
        .with_details(serde_json::json!({ "max_residual": worst_residual }))
}

/// Positive-definiteness screen for `ρ̂_b = φ̂_Z / φ̂_Z(b·)`.
///
/// For each `b` the Hermitian matrix `M_{jk} = ρ̂_b(z_j - z_k)` is formed and
/// its smallest eigenvalue computed. The statistic is the largest violation
/// `max(0, -λ_min)` over `b_list`; it fails above `τ = 5 n^{-1/2} · |grid|`.
/// A pass only means no violation was detected.
pub fn selfdec_screen(z_samples: &[f64], b_list: &[f64], z_grid: &[f64]) -> TestReport {
    let n = z_samples.len() as f64;
    let m = z_grid.len();
    let tau = 5.0 / n.sqrt() * m as f64;
    let provenance = serde_json::json!({ "b_list": b_list, "z_grid": z_grid, "n": z_samples.len() });
    let differences = DifferenceTable::new(z_grid);
    let mut violation = 0.0f64;
    let mut min_eigs = Vec::new();
    for &b in b_list {
        let mut psi = Vec::with_capacity(differences.values.len());
        for &w in &differences.values {
            let den = ecf_at(z_samples, b * w);
            if den.norm() < 5.0 / n.sqrt() {
                return TestReport::inconclusive(
                    "selfdec_screen",
                    format!("|ecf(bw)| = {:.3e} below 5 standard errors at b = {b}, w = {w}", den.norm()),
                    provenance,
                );
            }
            psi.push(ecf_at(z_samples, w) / den);
        }
        let mat = DMatrix::from_fn(m, m, |j, k| psi[differences.index(j, k)]);
        let eig = mat.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        min_eigs.push(serde_json::json!({ "b": b, "min_eigenvalue": eig }));
        violation = violation.max(-eig);
    }
    TestReport::compare("selfdec_screen", violation, tau, provenance).with_details(serde_json::json!({ "per_b": min_eigs }))
}

/// Distinct values of `z_j - z_k`, with a shortcut for uniform grids.
struct DifferenceTable {
    values: Vec<f64>,
    uniform: Option<usize>,
}

impl DifferenceTable {
    fn new(grid: &[f64]) -> Self {
        let m = grid.len();
        let uniform = m >= 2 && {
            let h = grid[1] - grid[0];
            grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1.0))
        };
        if uniform {
            let h = grid[1] - grid[0];
            let values = (0..2 * m - 1).map(|d| (d as f64 - (m - 1) as f64) * h).collect();
            Self { values, uniform: Some(m) }
        } else {
            let values = (0..m * m).map(|i| grid[i / m] - grid[i % m]).collect();
            Self { values, uniform: None }
        }
    }

    fn index(&self, j: usize, k: usize) -> usize {
        match self.uniform {
            Some(m) => j + (m - 1) - k,
            None => j * (self.values.len() as f64).sqrt() as usize + k,
        }
    }
}
