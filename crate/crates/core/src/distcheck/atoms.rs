//! Atoms of the Lévy measure of `Z = Σ_n e^{-n} W_n` when `X` is a Poisson
//! process and `Y` is compound Poisson on the integers.
//!
//! `W₀ = Y(T₁)` with `T₁ ~ Exp(a)` has Lévy measure
//! `ν⁽⁰⁾({m}) = ∫₀^∞ P(Y_s = m) s⁻¹ e^{-as} ds`, and `e^{-n}W_n` carries the
//! same masses at the points `e^{-n} m`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::report::TestReport;
use crate::error::{Error, Result};
use crate::levy::ProcessSpec;
use crate::quad::{integrate, QuadResult, Tolerance};

/// Poisson tail cut for the number of jumps.
const POISSON_TAIL: f64 = 1e-14;
/// Masses above this count when locating the jump unit `p`.
const UNIT_MASS_FLOOR: f64 = 1e-12;
const FLAG_ERROR: f64 = 1e-8;
const ATOM_REL_TOL: f64 = 1e-11;
/// Width in `log s` of the region below `s*` that is integrated.
const LOG_DEPTH: f64 = 40.0;

/// `q^{*j}` for `j = 0, 1, …` on integer windows, extended on demand.
#[derive(Clone, Debug)]
pub struct ConvolutionPowers {
    rate: f64,
    lo: i64,
    hi: i64,
    q: Vec<f64>,
    /// `powers[j][i]` is `q^{*j}(j·lo + i)`.
    powers: Vec<Vec<f64>>,
}

impl ConvolutionPowers {
    pub fn new(spec_y: &ProcessSpec) -> Result<Self> {
        spec_y.validate()?;
        let (rate, pmf) = match spec_y {
            ProcessSpec::Poisson { rate } => (*rate, BTreeMap::from([(1, 1.0)])),
            ProcessSpec::CompoundPoissonInteger { rate, jump_pmf } => (*rate, jump_pmf.clone()),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "needs an integer-valued compound Poisson process, got {}",
                    other.family_name()
                )))
            }
        };
        let pmf: BTreeMap<i64, f64> = pmf.into_iter().filter(|(_, p)| *p > 0.0).collect();
        let lo = *pmf.keys().next().expect("nonempty pmf");
        let hi = *pmf.keys().last().expect("nonempty pmf");
        let mut q = vec![0.0; (hi - lo) as usize + 1];
        for (k, p) in &pmf {
            q[(k - lo) as usize] = *p;
        }
        Ok(Self { rate, lo, hi, q, powers: vec![vec![1.0]] })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn ensure(&mut self, j: usize) {
        while self.powers.len() <= j {
            let prev = self.powers.last().expect("q^0");
            let mut next = vec![0.0; prev.len() + self.q.len() - 1];
            for (i, a) in prev.iter().enumerate() {
                if *a == 0.0 {
                    continue;
                }
                for (l, b) in self.q.iter().enumerate() {
                    next[i + l] += a * b;
                }
            }
            self.powers.push(next);
        }
    }

    /// `q^{*j}(m)`.
    pub fn get(&mut self, j: usize, m: i64) -> f64 {
        self.ensure(j);
        let off = m - j as i64 * self.lo;
        let v = &self.powers[j];
        if off < 0 || off as usize >= v.len() {
            0.0
        } else {
            v[off as usize]
        }
    }

    /// Fewest jumps that can reach `m` (`None` if the sign is unreachable).
    fn min_jumps(&self, m: i64) -> Option<usize> {
        if m == 0 {
            return Some(0);
        }
        let step = if m > 0 { self.hi } else { self.lo };
        if step == 0 || step.signum() != m.signum() {
            return None;
        }
        Some(((m.abs() + step.abs() - 1) / step.abs()) as usize)
    }
}

fn ln_poisson(mean: f64, j: usize) -> f64 {
    if mean == 0.0 {
        return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    j as f64 * mean.ln() - mean - ln_gamma(j as f64 + 1.0)
}

/// Smallest `J` with `P(N > J) < POISSON_TAIL` for `N ~ Poisson(mean)`.
fn poisson_cut(mean: f64) -> usize {
    let mut j = mean.floor() as usize;
    loop {
        // Tail beyond j is at most pmf(j+1) / (1 - mean/(j+2)).
        let next = ln_poisson(mean, j + 1).exp();
        let ratio = mean / (j as f64 + 2.0);
        if ratio < 1.0 && next / (1.0 - ratio) < POISSON_TAIL {
            return j;
        }
        j += 1;
    }
}

/// `P(Y_s = m)` for an integer compound Poisson `Y`.
pub fn pmf_compound_poisson(spec_y: &ProcessSpec, s: f64, m: i64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("s must be > 0, got {s}")));
    }
    let mut conv = ConvolutionPowers::new(spec_y)?;
    Ok(pmf_with(&mut conv, s, m))
}

pub(crate) fn pmf_with(conv: &mut ConvolutionPowers, s: f64, m: i64) -> f64 {
    let mean = conv.rate * s;
    let j_max = poisson_cut(mean);
    (0..=j_max).map(|j| ln_poisson(mean, j).exp() * conv.get(j, m)).sum()
}

/// `P(Y_s = m)` summed over the jump counts that matter at this `s`.
fn pmf_window(conv: &mut ConvolutionPowers, s: f64, m: i64, j_lo: usize) -> f64 {
    let mean = conv.rate * s;
    let spread = 12.0 * mean.sqrt() + 12.0;
    let lo = j_lo.max((mean - spread).floor().max(0.0) as usize);
    let hi = (lo + 40).max((mean + spread + 40.0).ceil() as usize);
    let mut total = 0.0;
    for j in lo..=hi {
        let c = conv.get(j, m);
        if c != 0.0 {
            total += ln_poisson(mean, j).exp() * c;
        }
    }
    total
}

/// `ν⁽⁰⁾({m}) = Σ_j q^{*j}(m) ρ^j / j` with `ρ = λ/(λ+a)`, from integrating
/// each jump-count term in closed form. Independent of [`nu0_mass`].
pub fn nu0_series(conv: &mut ConvolutionPowers, a: f64, m: i64) -> f64 {
    let rho = conv.rate / (conv.rate + a);
    let Some(j_lo) = conv.min_jumps(m) else { return 0.0 };
    let j_lo = j_lo.max(1);
    let mut total = 0.0;
    let mut j = j_lo;
    loop {
        let term = conv.get(j, m) * (j as f64 * rho.ln()).exp() / j as f64;
        total += term;
        // Remaining terms are bounded by ρ^j / (j (1-ρ)).
        let rest = ((j + 1) as f64 * rho.ln()).exp() / ((j + 1) as f64 * (1.0 - rho));
        if rest <= 1e-17 * total || j > j_lo + 100_000 {
            return total;
        }
        j += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nu0 {
    pub mass: f64,
    pub quadrature_error: f64,
    pub converged: bool,
}

/// `ν⁽⁰⁾({m})` for `m ≠ 0` by quadrature of `s ↦ P(Y_s = m) s⁻¹ e^{-as}`.
///
/// `[0, ∞)` is split at `s* = 1/(a+λ)`; below `s*` the substitution
/// `u = log s` absorbs the `s⁻¹` factor, above it the range is cut into
/// doubling intervals until their contribution is negligible.
pub fn nu0_mass(conv: &mut ConvolutionPowers, a: f64, m: i64) -> Nu0 {
    assert!(m != 0, "the origin carries no Lévy mass");
    let Some(j_lo) = conv.min_jumps(m) else {
        return Nu0 { mass: 0.0, quadrature_error: 0.0, converged: true };
    };
    let lambda = conv.rate;
    let s_star = 1.0 / (a + lambda);
    let tol = Tolerance { abs: 0.0, rel: ATOM_REL_TOL, max_intervals: 4000 };
    let mut pieces: Vec<QuadResult> = Vec::new();
    {
        let conv = std::cell::RefCell::new(&mut *conv);
        let f = |u: f64| {
            let s = u.exp();
            pmf_window(&mut conv.borrow_mut(), s, m, j_lo) * (-a * s).exp()
        };
        pieces.push(integrate(f, s_star.ln() - LOG_DEPTH, s_star.ln(), tol));
    }
    let peak = j_lo as f64 / lambda + 1.0 / a;
    let mut left = s_star;
    let mut total = pieces[0].value;
    for _ in 0..80 {
        let right = 2.0 * left;
        let conv_cell = std::cell::RefCell::new(&mut *conv);
        let g = |s: f64| pmf_window(&mut conv_cell.borrow_mut(), s, m, j_lo) * (-a * s).exp() / s;
        let piece = integrate(g, left, right, tol);
        total += piece.value;
        pieces.push(piece);
        left = right;
        if (left > 2.0 * peak && piece.value <= 1e-16 * total) || a * left > 800.0 {
            break;
        }
    }
    Nu0 {
        mass: total,
        quadrature_error: pieces.iter().map(|p| p.abs_error).sum(),
        converged: pieces.iter().all(|p| p.converged),
    }
}

/// Support of the Lévy measure of `Z` for the given `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `(0, ∞)`: `Y` increasing.
    Positive,
    /// `(-∞, 0)`: `Y` decreasing.
    Negative,
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub n: u32,
    /// Integer atom `m` of `ν⁽⁰⁾`; the entry sits at `e^{-n} m`.
    pub k: i64,
    pub point: f64,
    pub mass: f64,
    pub quadrature_error: f64,
    /// Set when the quadrature missed its tolerance or its error exceeds 1e-8.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomTable {
    pub a: f64,
    pub spec_y: ProcessSpec,
    pub n_max: u32,
    pub k_max: u32,
    /// Smallest positive integer carrying `ν⁽⁰⁾` mass above 1e-12.
    pub p: Option<i64>,
    /// Same for the negative side, as a positive number.
    pub p_minus: Option<i64>,
    pub domain: Domain,
    pub entries: Vec<AtomEntry>,
}

impl AtomTable {
    /// `ν⁽⁰⁾({m})` from the `n = 0` row.
    pub fn nu0(&self, m: i64) -> Option<f64> {
        self.entries.iter().find(|e| e.n == 0 && e.k == m).map(|e| e.mass)
    }
}

pub fn levy_atoms(a: f64, spec_y: &ProcessSpec, n_max: u32, k_max: u32) -> Result<AtomTable> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("a must be > 0, got {a}")));
    }
    if spec_y.is_zero() {
        return Err(Error::InvalidArgument("Y must not be the zero process".into()));
    }
    let mut conv = ConvolutionPowers::new(spec_y)?;
    let k_max_i = k_max as i64;
    let mut nu0 = Vec::new();
    for m in (-k_max_i..=k_max_i).filter(|m| *m != 0) {
        nu0.push((m, nu0_mass(&mut conv, a, m)));
    }
    let p = nu0.iter().filter(|(m, r)| *m > 0 && r.mass > UNIT_MASS_FLOOR).map(|(m, _)| *m).min();
    let p_minus = nu0.iter().filter(|(m, r)| *m < 0 && r.mass > UNIT_MASS_FLOOR).map(|(m, _)| -*m).min();
    let domain = if spec_y.is_increasing() {
        Domain::Positive
    } else if spec_y.is_decreasing() {
        Domain::Negative
    } else {
        Domain::Real
    };
    let mut entries = Vec::with_capacity(nu0.len() * (n_max as usize + 1));
    for n in 0..=n_max {
        let scale = (-(n as f64)).exp();
        for (m, r) in &nu0 {
            entries.push(AtomEntry {
                n,
                k: *m,
                point: scale * *m as f64,
                mass: r.mass.max(0.0),
                quadrature_error: r.quadrature_error,
                flagged: !r.converged || r.quadrature_error > FLAG_ERROR,
            });
        }
    }
    entries.sort_by(|x, y| x.point.total_cmp(&y.point));
    Ok(AtomTable { a, spec_y: spec_y.clone(), n_max, k_max, p, p_minus, domain, entries })
}

/// Checks that every window of width `eps` inside `[lo, hi]` holds an atom of
/// positive mass. The statistic is the largest gap between consecutive
/// positive-mass points (and the interval ends).
pub fn density_report(atoms: &AtomTable, interval: (f64, f64), eps: f64) -> TestReport {
    let (lo, hi) = interval;
    let provenance = serde_json::json!({
        "a": atoms.a,
        "spec_y": atoms.spec_y,
        "n_max": atoms.n_max,
        "k_max": atoms.k_max,
        "interval": [lo, hi],
        "eps": eps,
    });
    if atoms.entries.is_empty() {
        return TestReport::compare("density_report", f64::INFINITY, eps, provenance)
            .with_details(serde_json::json!({ "reason": "empty atom table" }));
    }
    // Granularity e^{-n} of the rows must reach eps near the interval.
    let n_needed = (1.0 / eps).ln().ceil().max(0.0) as u32;
    if n_needed > atoms.n_max {
        return TestReport::inconclusive(
            "density_report",
            format!("eps = {eps} needs rows up to n = {n_needed}, table has n_max = {}", atoms.n_max),
            provenance,
        );
    }
    let mut pts: Vec<f64> = atoms
        .entries
        .iter()
        .filter(|e| e.mass > 0.0 && e.point >= lo && e.point <= hi)
        .map(|e| e.point)
        .collect();
    pts.sort_by(f64::total_cmp);
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(lo);
    edges.extend(pts);
    edges.push(hi);
    let mut gaps: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
    let worst = gaps.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
    gaps.retain(|(a, b)| b - a > eps);
    gaps.sort_by(|x, y| (y.1 - y.0).total_cmp(&(x.1 - x.0)));
    gaps.truncate(20);
    TestReport::compare("density_report", worst, eps, provenance)
        .with_details(serde_json::json!({ "witness_gaps": gaps }))
}
