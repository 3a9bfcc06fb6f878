//! Joint path simulation on a mesh made of the regular grid, the checkpoint
//! times and the exact jump times of every finite-activity part.
//!
//! Both the pathwise integrator for `∫ e^{-X_{s-}} dY_s` and the generalized
//! OU recursion run on a [`PairPath`].

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::gou::{Coupling, JointPairSpec};
use crate::levy::sample::{exponential, Components, ContParts};
use crate::levy::ProcessSpec;

/// How the continuous part of the integrator is weighted over one mesh cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationScheme {
    /// Itô left point: `f(t_k) ΔY`.
    LeftPoint,
    /// For each strictly α-stable component (drift α = 1, Brownian α = 2,
    /// stable parts) the weight is `(⟨f^α⟩)^{1/α}`, where `⟨f^α⟩` is the cell
    /// average of `f^α` under log-linear interpolation of the integrand between
    /// the cell ends. This fixes the law of `∫ f dY` over the cell and is exact
    /// when `X` is linear on the cell. Non-stable parts fall back to the left
    /// point. Only valid when the integrand is independent of `Y`.
    #[default]
    StableLogMean,
}

/// `(gl - gr) / ln(gl/gr)` given `d = ln(gl/gr)`.
#[inline]
fn log_mean(gl: f64, d: f64) -> f64 {
    if d.abs() < 1e-5 {
        gl * (1.0 - d / 2.0 + d * d / 6.0)
    } else {
        -gl * (-d).exp_m1() / d
    }
}

#[inline]
pub(crate) fn cell_weight(fl: f64, fr: f64, index: Option<f64>, scheme: IntegrationScheme) -> f64 {
    match (scheme, index) {
        (IntegrationScheme::LeftPoint, _) | (_, None) => fl,
        (IntegrationScheme::StableLogMean, Some(a)) => {
            if fl == fr {
                return fl;
            }
            if fl <= 0.0 || fr <= 0.0 || !fl.is_finite() || !fr.is_finite() {
                return (0.5 * (fl.powf(a) + fr.powf(a))).powf(1.0 / a);
            }
            let d = a * (fl.ln() - fr.ln());
            if a == 1.0 {
                log_mean(fl, d)
            } else {
                log_mean(fl.powf(a), d).powf(1.0 / a)
            }
        }
    }
}

/// [`cell_weight`] times the Brownian-bridge factor `e^{α σ² Δ / 12}`, the
/// first-order mean of `(Δ⁻¹∫ e^{-αB°})^{1/α}` over a bridge of variance rate
/// `x_var` across a cell of length `dt`.
pub(crate) fn bridged_weight(fl: f64, fr: f64, index: Option<f64>, scheme: IntegrationScheme, x_var: f64, dt: f64) -> f64 {
    let w = cell_weight(fl, fr, index, scheme);
    match (scheme, index) {
        (IntegrationScheme::StableLogMean, Some(a)) if x_var > 0.0 => w * (a * x_var * dt / 12.0).exp(),
        _ => w,
    }
}

/// Grid `0, h, 2h, …, T` plus `extra` points, sorted and deduplicated.
pub(crate) fn mesh(horizon: f64, step: f64, extra: &[f64]) -> Vec<f64> {
    let n = (horizon / step).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| k as f64 * step).filter(|t| *t < horizon * (1.0 - 1e-12)).collect();
    pts.push(horizon);
    pts.extend(extra.iter().copied().filter(|t| *t > 0.0 && *t <= horizon));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct PairPath {
    pub times: Vec<f64>,
    /// `X_{t_i-}`.
    pub x_left: Vec<f64>,
    pub x_jump: Vec<f64>,
    pub y_left: Vec<f64>,
    pub y_jump: Vec<f64>,
    /// Continuous increment of `Y` over `(t_{i-1}, t_i]`; entry 0 is unused.
    pub y_cont: Vec<ContParts>,
}

impl PairPath {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            x_left: Vec::with_capacity(n),
            x_jump: Vec::with_capacity(n),
            y_left: Vec::with_capacity(n),
            y_jump: Vec::with_capacity(n),
            y_cont: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, xl: f64, dx: f64, yl: f64, dy: f64, c: ContParts) {
        self.times.push(t);
        self.x_left.push(xl);
        self.x_jump.push(dx);
        self.y_left.push(yl);
        self.y_jump.push(dy);
        self.y_cont.push(c);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// `X_{t_i}` after any jump at `t_i`.
    #[inline]
    pub fn x_after(&self, i: usize) -> f64 {
        self.x_left[i] + self.x_jump[i]
    }
}

#[derive(Clone, Debug)]
struct CommonJumps {
    rate: f64,
    pairs: Vec<(f64, f64)>,
    index: WeightedIndex<f64>,
}

/// Precomputed simulation plan for a pair `(X, Y)`.
#[derive(Clone, Debug)]
pub(crate) struct PairDriver {
    x: Components,
    y: Components,
    common: Option<CommonJumps>,
    /// Correlation of the Brownian parts.
    rho: f64,
    pub y_grid_index: Option<f64>,
    /// Variance rate of the Brownian part of X.
    pub x_var: f64,
}

impl PairDriver {
    pub fn independent(x: &ProcessSpec, y: &ProcessSpec) -> Self {
        let yc = Components::of(y);
        let y_grid_index = yc.grid.and_then(|g| g.stable_index());
        let xc = Components::of(x);
        let x_var = xc.sigma * xc.sigma;
        Self { x: xc, y: yc, common: None, rho: 0.0, y_grid_index, x_var }
    }

    pub fn for_pair(pair: &JointPairSpec) -> Self {
        let mut d = Self::independent(&pair.xi_spec, &pair.eta_spec);
        match &pair.coupling {
            Coupling::Independent => {}
            Coupling::CommonJumps { rate, jumps } => {
                let pairs = jumps.iter().map(|j| (j.d_xi, j.d_eta)).collect();
                let index = WeightedIndex::new(jumps.iter().map(|j| j.prob)).expect("validated common-jump pmf");
                d.common = Some(CommonJumps { rate: *rate, pairs, index });
            }
            Coupling::GaussianCov { a12 } => {
                let s = d.x.sigma * d.y.sigma;
                d.rho = if s > 0.0 { a12 / s } else { 0.0 };
            }
        }
        d
    }

    pub fn is_correlated(&self) -> bool {
        self.rho != 0.0
    }

    fn events<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> Vec<(f64, f64, f64)> {
        let mut ev = Vec::new();
        if let Some(j) = &self.x.jumps {
            let mut t = exponential(j.rate(), rng);
            while t < horizon {
                ev.push((t, j.size(rng), 0.0));
                t += exponential(j.rate(), rng);
            }
        }
        if let Some(j) = &self.y.jumps {
            let mut t = exponential(j.rate(), rng);
            while t < horizon {
                ev.push((t, 0.0, j.size(rng)));
                t += exponential(j.rate(), rng);
            }
        }
        if let Some(c) = &self.common {
            let mut t = exponential(c.rate, rng);
            while t < horizon {
                let (dx, dy) = c.pairs[c.index.sample(rng)];
                ev.push((t, dx, dy));
                t += exponential(c.rate, rng);
            }
        }
        ev.sort_by(|a, b| a.0.total_cmp(&b.0));
        ev
    }

    fn step<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> (f64, ContParts) {
        if self.rho == 0.0 {
            let dx = self.x.continuous_increment(dt, rng).total();
            (dx, self.y.continuous_increment(dt, rng))
        } else {
            let n1: f64 = rng.sample(StandardNormal);
            let n2: f64 = rng.sample(StandardNormal);
            let sq = dt.sqrt();
            let mut xc = self.x.continuous_increment_without_gauss(dt, rng);
            xc.gauss = self.x.sigma * sq * n1;
            let mut yc = self.y.continuous_increment_without_gauss(dt, rng);
            yc.gauss = self.y.sigma * sq * (self.rho * n1 + (1.0 - self.rho * self.rho).max(0.0).sqrt() * n2);
            (xc.total(), yc)
        }
    }

    /// Simulates both paths on `grid` (which must start at 0) refined by the
    /// jump times.
    pub fn simulate<R: Rng + ?Sized>(&self, grid: &[f64], rng: &mut R) -> PairPath {
        let horizon = *grid.last().expect("nonempty grid");
        let events = self.events(horizon, rng);
        let mut path = PairPath::with_capacity(grid.len() + events.len());
        path.push(0.0, 0.0, 0.0, 0.0, 0.0, ContParts::default());
        let (mut t, mut x, mut y) = (0.0, 0.0, 0.0);
        let mut e = 0;
        for &g in &grid[1..] {
            while e < events.len() && events[e].0 < g {
                let (te, dx, dy) = events[e];
                let (cx, cy) = self.step(te - t, rng);
                x += cx;
                y += cy.total();
                path.push(te, x, dx, y, dy, cy);
                x += dx;
                y += dy;
                t = te;
                e += 1;
            }
            let (cx, cy) = self.step(g - t, rng);
            x += cx;
            y += cy.total();
            path.push(g, x, 0.0, y, 0.0, cy);
            t = g;
        }
        path
    }
}

impl PairDriver {
    /// Like [`PairDriver::simulate`] on `[0, horizon]`, but the grid is built
    /// on the fly: the local step is `step · e^{X_t/2}`, clamped to
    /// `[step, max_step]`, so cells stretch once `e^{-X}` has decayed. Every
    /// checkpoint lands on the mesh; their indices are returned.
    pub fn simulate_adaptive<R: Rng + ?Sized>(
        &self,
        horizon: f64,
        step: f64,
        max_step: f64,
        checkpoints: &[f64],
        rng: &mut R,
    ) -> (PairPath, Vec<usize>) {
        let events = self.events(horizon, rng);
        let mut path = PairPath::with_capacity(((horizon / max_step) as usize).max(16) + events.len());
        path.push(0.0, 0.0, 0.0, 0.0, 0.0, ContParts::default());
        let mut marks = Vec::with_capacity(checkpoints.len());
        let mut cps = checkpoints.iter().copied().filter(|c| *c <= horizon).peekable();
        while cps.peek() == Some(&0.0) {
            marks.push(0);
            cps.next();
        }
        let (mut t, mut x, mut y): (f64, f64, f64) = (0.0, 0.0, 0.0);
        let mut e = 0;
        while t < horizon {
            let local = (step * (0.5 * x).exp()).clamp(step, max_step);
            let next_cp = cps.peek().copied().unwrap_or(horizon);
            let g = if t + local >= next_cp * (1.0 - 1e-12) { next_cp } else { t + local };
            while e < events.len() && events[e].0 < g {
                let (te, dx, dy) = events[e];
                let (cx, cy) = self.step(te - t, rng);
                x += cx;
                y += cy.total();
                path.push(te, x, dx, y, dy, cy);
                x += dx;
                y += dy;
                t = te;
                e += 1;
            }
            let (cx, cy) = self.step(g - t, rng);
            x += cx;
            y += cy.total();
            path.push(g, x, 0.0, y, 0.0, cy);
            t = g;
            if cps.peek() == Some(&g) {
                marks.push(path.len() - 1);
                cps.next();
            }
        }
        (path, marks)
    }
}

impl Components {
    fn continuous_increment_without_gauss<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> ContParts {
        let grid = self.grid.map_or(0.0, |g| g.increment(dt, rng));
        ContParts { drift: self.drift * dt, gauss: 0.0, grid }
    }
}

/// Running values of `∫₀^t e^{-X_{s-}} dL_s` on `path`, returned at each index
/// in `marks` (ascending). `L = Y` unless `l_transform` carries the Gaussian
/// covariance `a¹²`, in which case the L-transformation of `Y` is integrated.
pub(crate) fn integrate_functional(
    path: &PairPath,
    scheme: IntegrationScheme,
    y_grid_index: Option<f64>,
    x_var: f64,
    l_transform: Option<f64>,
    marks: &[usize],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(marks.len());
    let mut m = 0;
    let mut z = 0.0;
    let a12 = l_transform.unwrap_or(0.0);
    while m < marks.len() && marks[m] == 0 {
        out.push(0.0);
        m += 1;
    }
    for i in 1..path.len() {
        let xl = path.x_after(i - 1);
        let xr = path.x_left[i];
        let fl = (-xl).exp();
        let fr = (-xr).exp();
        let c = &path.y_cont[i];
        let dt = path.times[i] - path.times[i - 1];
        let w = |index| bridged_weight(fl, fr, index, scheme, x_var, dt);
        let mut dz = w(Some(1.0)) * (c.drift - a12 * dt);
        if c.gauss != 0.0 {
            dz += w(Some(2.0)) * c.gauss;
        }
        if c.grid != 0.0 {
            dz += w(y_grid_index) * c.grid;
        }
        z += dz;
        let dy = path.y_jump[i];
        if dy != 0.0 {
            let dl = if l_transform.is_some() { (-path.x_jump[i]).exp() * dy } else { dy };
            z += fr * dl;
        }
        while m < marks.len() && marks[m] == i {
            out.push(z);
            m += 1;
        }
    }
    out
}

/// Generalized OU recursion `V_t = e^{-(ξ_t-ξ_u)} (V_u + ∫_u^t e^{ξ_{s-}-ξ_u} dη_s)`
/// started at mesh index `start` with value `v_start`; returns V at every mesh
/// index from `start` on. Working with increments of ξ keeps the arithmetic
/// in range however far ξ wanders.
pub(crate) fn gou_recursion(
    path: &PairPath,
    scheme: IntegrationScheme,
    y_grid_index: Option<f64>,
    x_var: f64,
    start: usize,
    v_start: f64,
) -> Vec<f64> {
    let mut v = v_start;
    let mut out = Vec::with_capacity(path.len() - start);
    out.push(v);
    for i in start + 1..path.len() {
        let delta = path.x_left[i] - path.x_after(i - 1);
        let fr = delta.exp();
        let c = &path.y_cont[i];
        let dt = path.times[i] - path.times[i - 1];
        let w = |index| bridged_weight(1.0, fr, index, scheme, x_var, dt);
        let mut inc = w(Some(1.0)) * c.drift;
        if c.gauss != 0.0 {
            inc += w(Some(2.0)) * c.gauss;
        }
        if c.grid != 0.0 {
            inc += w(y_grid_index) * c.grid;
        }
        v = (-delta).exp() * (v + inc);
        let (dx, dy) = (path.x_jump[i], path.y_jump[i]);
        if dx != 0.0 || dy != 0.0 {
            v = (-dx).exp() * (v + dy);
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn mesh_contains_grid_and_extras() {
        let m = mesh(1.0, 0.25, &[0.5, 0.3]);
        assert_eq!(m, vec![0.0, 0.25, 0.3, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn weights_reduce_to_left_point_for_constant_integrand() {
        for idx in [Some(0.5), Some(1.0), Some(1.5), Some(2.0), None] {
            assert_eq!(cell_weight(0.3, 0.3, idx, IntegrationScheme::StableLogMean), 0.3);
        }
        assert_eq!(cell_weight(0.3, 0.9, Some(2.0), IntegrationScheme::LeftPoint), 0.3);
    }

    #[test]
    fn jumps_land_on_mesh_with_left_limits() {
        let d = PairDriver::independent(&ProcessSpec::Poisson { rate: 3.0 }, &ProcessSpec::Poisson { rate: 2.0 });
        let grid = mesh(5.0, 0.5, &[]);
        let p = d.simulate(&grid, &mut RngStream::new(9, 0).rng());
        let mut x = 0.0;
        for i in 0..p.len() {
            assert_eq!(p.x_left[i], x);
            x += p.x_jump[i];
            assert!(p.x_jump[i] == 0.0 || p.y_jump[i] == 0.0);
        }
        assert!(p.x_jump.iter().filter(|v| **v != 0.0).count() > 0);
        assert!(p.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adaptive_mesh_hits_checkpoints_and_stretches() {
        let d = PairDriver::independent(&ProcessSpec::DeterministicDrift { b: 1.0 }, &ProcessSpec::Poisson { rate: 1.0 });
        let (p, marks) = d.simulate_adaptive(40.0, 0.01, 1.0, &[10.0, 20.0, 40.0], &mut RngStream::new(3, 0).rng());
        assert_eq!(marks.len(), 3);
        for (m, t) in marks.iter().zip([10.0, 20.0, 40.0]) {
            assert_eq!(p.times[*m], t);
        }
        assert!(p.len() < 1000, "{}", p.len());
        assert!(p.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn drift_integral_is_exact_for_linear_x() {
        // X = t, Y = t: linear X makes the log-mean weight exact.
        let d = PairDriver::independent(&ProcessSpec::DeterministicDrift { b: 1.0 }, &ProcessSpec::DeterministicDrift { b: 1.0 });
        let (p, marks) = d.simulate_adaptive(40.0, 0.01, 1.0, &[40.0], &mut RngStream::new(3, 0).rng());
        let z = integrate_functional(&p, IntegrationScheme::StableLogMean, None, 0.0, None, &marks);
        assert!((z[0] - (1.0 - (-40f64).exp())).abs() < 1e-12, "{}", z[0]);
    }
}
