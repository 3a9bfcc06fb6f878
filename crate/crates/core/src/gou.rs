//! Generalized Ornstein–Uhlenbeck processes
//! `V_t = e^{-ξ_t}(V₀ + ∫₀ᵗ e^{ξ_{s-}} dη_s)` and the L-transformation
//! `L_t = η_t + Σ_{s≤t} (e^{-Δξ_s} - 1) Δη_s - t a¹²`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distcheck::ks::ks_statistic;
use crate::distcheck::report::{ks_critical_value, TestReport, Verdict};
use crate::engine::{gou_recursion, mesh, IntegrationScheme, PairDriver, PairPath};
use crate::error::{Error, Result};
use crate::existence::{alpha_power_test, drifts_to_infinity, existence_verdict, Decision, Verdict as Existence};
use crate::exfunc::{sample_z_pair_euler, EulerConfig};
use crate::levy::{triplet_of, PathSkeleton, ProcessSpec};
use crate::rng::{sample_batch, RngStream};

const PSD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonJump {
    pub d_xi: f64,
    pub d_eta: f64,
    pub prob: f64,
}

/// Dependence between ξ and η beyond their marginal specs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    Independent,
    /// Extra simultaneous jumps `(Δξ, Δη)` arriving at `rate`, on top of the
    /// marginal specs.
    CommonJumps { rate: f64, jumps: Vec<CommonJump> },
    /// Covariance `a¹²` of the Brownian parts.
    GaussianCov { a12: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPairSpec {
    pub xi_spec: ProcessSpec,
    pub eta_spec: ProcessSpec,
    #[serde(default)]
    pub coupling: Coupling,
}

impl JointPairSpec {
    pub fn independent(xi: ProcessSpec, eta: ProcessSpec) -> Self {
        Self { xi_spec: xi, eta_spec: eta, coupling: Coupling::Independent }
    }

    pub fn a12(&self) -> f64 {
        match self.coupling {
            Coupling::GaussianCov { a12 } => a12,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.xi_spec.validate().map_err(|e| e.within("xi_spec"))?;
        self.eta_spec.validate().map_err(|e| e.within("eta_spec"))?;
        match &self.coupling {
            Coupling::Independent => {}
            Coupling::CommonJumps { rate, jumps } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::spec("coupling.rate", "must be finite and > 0"));
                }
                if jumps.is_empty() {
                    return Err(Error::spec("coupling.jumps", "must not be empty"));
                }
                for (i, j) in jumps.iter().enumerate() {
                    if !(j.d_xi.is_finite() && j.d_eta.is_finite()) {
                        return Err(Error::spec(format!("coupling.jumps.{i}"), "jump sizes must be finite"));
                    }
                    if !(j.prob >= 0.0 && j.prob <= 1.0) {
                        return Err(Error::spec(format!("coupling.jumps.{i}.prob"), "must lie in [0, 1]"));
                    }
                }
                let total: f64 = jumps.iter().map(|j| j.prob).sum();
                if (total - 1.0).abs() > crate::levy::spec::PMF_SUM_TOL {
                    return Err(Error::spec("coupling.jumps", format!("probabilities sum to {total}, not 1")));
                }
            }
            Coupling::GaussianCov { a12 } => {
                let a11 = triplet_of(&self.xi_spec).gauss_var;
                let a22 = triplet_of(&self.eta_spec).gauss_var;
                if !a12.is_finite() || a12 * a12 > a11 * a22 * (1.0 + PSD_TOL) {
                    return Err(Error::spec(
                        "coupling.a12",
                        format!("covariance matrix ((a11, a12), (a12, a22)) = (({a11}, {a12}), ({a12}, {a22})) is not positive semidefinite"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Existence of `∫₀^{∞-} e^{-ξ_{s-}} dL_s`.
    ///
    /// Common jumps add a bounded finite-activity part to ξ and to L, which
    /// changes neither log-moment finiteness nor the drift classification
    /// beyond the shift in `E ξ₁`.
    pub fn existence(&self) -> Result<Existence> {
        self.validate()?;
        match &self.coupling {
            Coupling::Independent => Ok(existence_verdict(&self.xi_spec, &self.eta_spec)?.verdict),
            Coupling::GaussianCov { a12 } => {
                let l = shifted_drift(&self.eta_spec, -a12)?;
                Ok(existence_verdict(&self.xi_spec, &l)?.verdict)
            }
            Coupling::CommonJumps { rate, jumps } => {
                let drifts = match self.xi_spec.mean() {
                    Some(m) if m.is_finite() => {
                        m + rate * jumps.iter().map(|j| j.prob * j.d_xi).sum::<f64>() > 0.0
                    }
                    _ => drifts_to_infinity(&self.xi_spec) == Decision::Yes,
                };
                let log_ok = alpha_power_test(&self.eta_spec, 1.0)?.finite;
                Ok(if drifts && log_ok { Existence::Exists } else { Existence::Diverges })
            }
        }
    }
}

/// `η_t + shift·t` as a spec, for the families with a Gaussian part.
fn shifted_drift(eta: &ProcessSpec, shift: f64) -> Result<ProcessSpec> {
    match eta {
        _ if shift == 0.0 => Ok(eta.clone()),
        ProcessSpec::BrownianDrift { sigma, mu } => Ok(ProcessSpec::BrownianDrift { sigma: *sigma, mu: mu + shift }),
        ProcessSpec::SymmetricStable { alpha, scale } if *alpha == 2.0 => {
            Ok(ProcessSpec::BrownianDrift { sigma: (2.0 * scale).sqrt(), mu: shift })
        }
        other => Err(Error::Unsupported(format!("a12 != 0 needs a Gaussian part in eta, got {}", other.family_name()))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GouPath {
    pub times: Vec<f64>,
    pub v: Vec<f64>,
    pub xi: PathSkeleton,
    pub eta: PathSkeleton,
    #[serde(skip)]
    path: PairPath,
}

impl GouPath {
    /// `V` at the mesh point equal to `t`.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.times.iter().position(|s| *s == t).map(|i| self.v[i])
    }
}

fn scheme_for(driver: &PairDriver) -> IntegrationScheme {
    if driver.is_correlated() {
        IntegrationScheme::LeftPoint
    } else {
        IntegrationScheme::StableLogMean
    }
}

/// Simulates `V` on `[0, horizon]` with grid step `step` from the initial
/// value `v0`. The mesh also contains `extra_times` and every jump time.
pub fn simulate_v<R: Rng + ?Sized>(
    pair: &JointPairSpec,
    v0: f64,
    horizon: f64,
    step: f64,
    extra_times: &[f64],
    rng: &mut R,
) -> Result<GouPath> {
    pair.validate()?;
    if !(horizon > 0.0 && step > 0.0) {
        return Err(Error::InvalidArgument(format!("need horizon > 0 and step > 0, got {horizon}, {step}")));
    }
    let driver = PairDriver::for_pair(pair);
    let grid = mesh(horizon, step, extra_times);
    let path = driver.simulate(&grid, rng);
    let v = gou_recursion(&path, scheme_for(&driver), driver.y_grid_index, driver.x_var, 0, v0);
    Ok(GouPath {
        times: path.times.clone(),
        v,
        xi: PathSkeleton::x_of(&path),
        eta: PathSkeleton::y_of(&path),
        path,
    })
}

/// Restarts the recursion of `path` at mesh index `start` from `v_start`,
/// reusing the driving paths.
pub fn restart_v(pair: &JointPairSpec, path: &GouPath, start: usize, v_start: f64) -> Vec<f64> {
    let driver = PairDriver::for_pair(pair);
    gou_recursion(&path.path, scheme_for(&driver), driver.y_grid_index, driver.x_var, start, v_start)
}

/// L-transformation of `path_eta` given `path_xi` on the same mesh.
pub fn transform_l(pair: &JointPairSpec, path_xi: &PathSkeleton, path_eta: &PathSkeleton) -> Result<PathSkeleton> {
    if path_xi.times != path_eta.times {
        return Err(Error::InvalidArgument("xi and eta paths must share their mesh".into()));
    }
    let a12 = pair.a12();
    let mut values = Vec::with_capacity(path_eta.values.len());
    let mut jumps = Vec::with_capacity(path_eta.jumps.len());
    let mut correction = 0.0;
    for (i, (&t, &eta)) in path_eta.times.iter().zip(&path_eta.values).enumerate() {
        values.push(if correction == 0.0 && a12 == 0.0 { eta } else { eta + correction - t * a12 });
        let d_eta = path_eta.jump_at(i);
        if d_eta != 0.0 {
            let d_xi = path_xi.jump_at(i);
            jumps.push((t, (-d_xi).exp() * d_eta));
            correction += (-d_xi).exp_m1() * d_eta;
        }
    }
    Ok(PathSkeleton { times: path_eta.times.clone(), values, jumps })
}

/// How the initial value is drawn in [`stationarity_report`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialLaw {
    /// A fresh draw of `∫₀^{∞-} e^{-ξ_{s-}} dL_s`.
    Stationary,
    Constant { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityConfig {
    pub times: Vec<f64>,
    pub n: usize,
    #[serde(default = "default_gou_step")]
    pub step: f64,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub euler: EulerConfig,
    #[serde(default = "default_initial")]
    pub initial: InitialLaw,
}

fn default_gou_step() -> f64 {
    0.01
}

fn default_level() -> f64 {
    0.01
}

fn default_initial() -> InitialLaw {
    InitialLaw::Stationary
}

impl StationarityConfig {
    pub fn new(times: Vec<f64>, n: usize) -> Self {
        Self { times, n, step: default_gou_step(), level: default_level(), euler: EulerConfig::default(), initial: InitialLaw::Stationary }
    }
}

/// `V` at each time in `times` for `n` independent paths: `out[k][i]` is path
/// `i` at `times[k]`.
pub fn sample_marginals(
    pair: &JointPairSpec,
    cfg: &StationarityConfig,
    stream: RngStream,
) -> Result<Vec<Vec<f64>>> {
    pair.validate()?;
    let horizon = cfg.times.iter().copied().fold(0.0, f64::max);
    if !(horizon > 0.0) || cfg.times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("times must be positive".into()));
    }
    let driver = PairDriver::for_pair(pair);
    let scheme = scheme_for(&driver);
    let grid = mesh(horizon, cfg.step, &cfg.times);
    let v0_stream = stream.substream(0);
    let path_stream = stream.substream(1);
    let rows: Vec<Vec<f64>> = sample_batch(cfg.n, path_stream, |rng| {
        // V₀ gets its own stream, distinct from the one driving (ξ, η).
        let key: u64 = rng.random();
        let v0 = match cfg.initial {
            InitialLaw::Stationary => sample_z_pair_euler(pair, &cfg.euler, &mut v0_stream.substream(key).rng()).0,
            InitialLaw::Constant { value } => value,
        };
        let path = driver.simulate(&grid, rng);
        let v = gou_recursion(&path, scheme, driver.y_grid_index, driver.x_var, 0, v0);
        cfg.times
            .iter()
            .map(|t| {
                let i = path.times.iter().position(|s| s == t).expect("time on path mesh");
                v[i]
            })
            .collect()
    });
    Ok((0..cfg.times.len()).map(|k| rows.iter().map(|r| r[k]).collect()).collect())
}

/// Pairwise two-sample KS between the marginals of `V` at `cfg.times`,
/// Bonferroni-corrected over the pairs.
pub fn stationarity_report(pair: &JointPairSpec, cfg: &StationarityConfig, stream: RngStream) -> Result<TestReport> {
    if pair.existence()? != Existence::Exists {
        return Err(Error::InvalidArgument(
            "the exponential functional of (xi, L) does not exist; no stationary law".into(),
        ));
    }
    let marginals = sample_marginals(pair, cfg, stream)?;
    let k = cfg.times.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let provenance = serde_json::json!({
        "pair": pair,
        "config": cfg,
        "stream": stream,
    });
    if pairs.is_empty() {
        return Ok(TestReport::inconclusive("gou_stationarity", "need at least two times", provenance));
    }
    let level = cfg.level / pairs.len() as f64;
    let n = cfg.n as f64;
    let threshold = ks_critical_value(level) * (2.0 / n).sqrt();
    let mut worst = 0.0f64;
    let mut per_pair = Vec::new();
    for &(i, j) in &pairs {
        let d = ks_statistic(&marginals[i], &marginals[j]);
        per_pair.push(serde_json::json!({"t1": cfg.times[i], "t2": cfg.times[j], "ks": d}));
        worst = worst.max(d);
    }
    let mut report = TestReport::compare("gou_stationarity", worst, threshold, provenance);
    report.details = serde_json::json!({ "pairs": per_pair, "pair_level": level });
    debug_assert!(report.verdict != Verdict::Inconclusive);
    Ok(report)
}

/// One draw of `V_t` started from the stationary law.
pub fn sample_gou_marginal<R: Rng + ?Sized>(
    pair: &JointPairSpec,
    t: f64,
    step: f64,
    euler: &EulerConfig,
    rng: &mut R,
) -> f64 {
    let v0 = sample_z_pair_euler(pair, euler, rng).0;
    let driver = PairDriver::for_pair(pair);
    let grid = mesh(t, step, &[]);
    let path = driver.simulate(&grid, rng);
    *gou_recursion(&path, scheme_for(&driver), driver.y_grid_index, driver.x_var, 0, v0).last().expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn det(b: f64) -> ProcessSpec {
        ProcessSpec::DeterministicDrift { b }
    }

    #[test]
    fn noiseless_stationary_point() {
        let lambda = 0.7;
        let pair = JointPairSpec::independent(det(lambda), det(1.0));
        let p = simulate_v(&pair, 1.0 / lambda, 10.0, 0.1, &[], &mut RngStream::new(1, 0).rng()).unwrap();
        assert_eq!(p.v[0], 1.0 / lambda);
        for v in &p.v {
            assert!((v - 1.0 / lambda).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn zero_start_zero_noise() {
        let pair = JointPairSpec::independent(ProcessSpec::BrownianDrift { sigma: 1.0, mu: 1.0 }, ProcessSpec::zero());
        let p = simulate_v(&pair, 0.0, 5.0, 0.05, &[], &mut RngStream::new(2, 0).rng()).unwrap();
        assert!(p.v.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn large_xi_stays_finite() {
        // ξ reaches 1000, far past where e^{ξ} overflows; V stays O(1).
        let pair = JointPairSpec::independent(det(100.0), ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.0 });
        let p = simulate_v(&pair, 1.0, 10.0, 0.5, &[], &mut RngStream::new(2, 0).rng()).unwrap();
        assert!(p.v.iter().all(|v| v.is_finite() && v.abs() < 10.0));
    }

    #[test]
    fn cocycle_restart_matches() {
        let pair = JointPairSpec {
            xi_spec: ProcessSpec::BrownianDrift { sigma: 0.8, mu: 0.5 },
            eta_spec: ProcessSpec::CompoundPoissonInteger { rate: 2.0, jump_pmf: BTreeMap::from([(-1, 0.5), (2, 0.5)]) },
            coupling: Coupling::CommonJumps { rate: 1.0, jumps: vec![CommonJump { d_xi: 0.3, d_eta: 1.0, prob: 1.0 }] },
        };
        let p = simulate_v(&pair, 0.4, 8.0, 0.05, &[], &mut RngStream::new(3, 0).rng()).unwrap();
        let u = p.times.len() / 2;
        let restarted = restart_v(&pair, &p, u, p.v[u]);
        for (a, b) in p.v[u..].iter().zip(&restarted) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn l_equals_eta_for_independent_pairs() {
        let pair = JointPairSpec::independent(ProcessSpec::Poisson { rate: 2.0 }, ProcessSpec::Poisson { rate: 3.0 });
        let p = simulate_v(&pair, 0.0, 5.0, 0.1, &[], &mut RngStream::new(4, 0).rng()).unwrap();
        assert_eq!(transform_l(&pair, &p.xi, &p.eta).unwrap(), p.eta);
    }

    #[test]
    fn single_common_jump_by_hand() {
        let pair = JointPairSpec {
            xi_spec: ProcessSpec::zero(),
            eta_spec: ProcessSpec::zero(),
            coupling: Coupling::CommonJumps { rate: 1.0, jumps: vec![CommonJump { d_xi: 2f64.ln(), d_eta: 1.0, prob: 1.0 }] },
        };
        let xi = PathSkeleton { times: vec![0.0, 0.5, 1.0], values: vec![0.0, 0.0, 2f64.ln()], jumps: vec![(0.5, 2f64.ln())] };
        let eta = PathSkeleton { times: vec![0.0, 0.5, 1.0], values: vec![0.0, 0.0, 1.0], jumps: vec![(0.5, 1.0)] };
        let l = transform_l(&pair, &xi, &eta).unwrap();
        assert!((l.value_after(2) - (1.0 - 0.5)).abs() < 1e-15);
        assert_eq!(l.jumps, vec![(0.5, 0.5)]);
    }

    #[test]
    fn zero_xi_jumps_leave_eta_alone() {
        let pair = JointPairSpec {
            xi_spec: ProcessSpec::zero(),
            eta_spec: ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.0 },
            coupling: Coupling::CommonJumps { rate: 3.0, jumps: vec![CommonJump { d_xi: 0.0, d_eta: -2.0, prob: 1.0 }] },
        };
        let p = simulate_v(&pair, 0.0, 4.0, 0.1, &[], &mut RngStream::new(5, 0).rng()).unwrap();
        assert_eq!(transform_l(&pair, &p.xi, &p.eta).unwrap(), p.eta);
    }

    #[test]
    fn l_is_linear_in_eta() {
        let pair = JointPairSpec {
            xi_spec: ProcessSpec::Poisson { rate: 1.0 },
            eta_spec: ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.3 },
            coupling: Coupling::CommonJumps { rate: 2.0, jumps: vec![CommonJump { d_xi: 0.7, d_eta: 1.5, prob: 1.0 }] },
        };
        let p = simulate_v(&pair, 0.0, 4.0, 0.1, &[], &mut RngStream::new(6, 0).rng()).unwrap();
        let scaled = PathSkeleton {
            times: p.eta.times.clone(),
            values: p.eta.values.iter().map(|v| 3.0 * v).collect(),
            jumps: p.eta.jumps.iter().map(|(t, d)| (*t, 3.0 * d)).collect(),
        };
        let l1 = transform_l(&pair, &p.xi, &p.eta).unwrap();
        let l3 = transform_l(&pair, &p.xi, &scaled).unwrap();
        for (a, b) in l1.values.iter().zip(&l3.values) {
            assert!((3.0 * a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn gaussian_cov_must_be_psd() {
        let mut pair = JointPairSpec {
            xi_spec: ProcessSpec::BrownianDrift { sigma: 1.0, mu: 1.0 },
            eta_spec: ProcessSpec::BrownianDrift { sigma: 2.0, mu: 0.0 },
            coupling: Coupling::GaussianCov { a12: 2.0 },
        };
        assert!(pair.validate().is_ok());
        pair.coupling = Coupling::GaussianCov { a12: 2.5 };
        assert!(matches!(pair.validate(), Err(Error::InvalidSpec { path, .. }) if path == "coupling.a12"));
    }

    #[test]
    fn classical_ou_stationary_variance() {
        // ξ = λt, η = B: stationary law N(0, 1/(2λ)).
        let lambda = 1.0;
        let pair = JointPairSpec::independent(det(lambda), ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.0 });
        let cfg = StationarityConfig::new(vec![1.0, 5.0], 20_000);
        let m = sample_marginals(&pair, &cfg, RngStream::new(7, 0)).unwrap();
        for col in &m {
            let n = col.len() as f64;
            let var = col.iter().map(|v| v * v).sum::<f64>() / n;
            let se = (2.0 * 0.25 / n).sqrt();
            assert!((var - 0.5 / lambda).abs() < 4.0 * se, "{var}");
        }
        let r = stationarity_report(&pair, &StationarityConfig::new(vec![1.0, 5.0, 25.0], 5_000), RngStream::new(8, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }
}
