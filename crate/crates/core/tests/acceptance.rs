//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Criteria 1 to 9 run on one worker thread; criterion 10 reruns all of them
//! on 4 and 16 workers and compares digests of every sample and report.

use std::time::{Duration, Instant};

use exlevy::cli::{verify, Theorem};
use exlevy::distcheck::{density_report, ks_two_sample, levy_atoms, Domain, TestReport, Verdict};
use exlevy::exfunc::{sample_set, SampleSet, SamplerConfig};
use exlevy::existence::{existence_verdict, Verdict as Existence};
use exlevy::gou::{simulate_v, stationarity_report, transform_l, InitialLaw, JointPairSpec, StationarityConfig};
use exlevy::levy::ProcessSpec;
use exlevy::rng::{with_threads, RngStream};
use serde_json::json;
use sha2::{Digest, Sha256};

const KS_LEVEL: f64 = 0.01;
const KS_SEEDS: u64 = 20;
const KS_MIN_PASSES: usize = 18;
const KS_N: usize = 10_000;
const MOMENT_N: usize = 1_000_000;
const MOMENT_SE: f64 = 4.0;
const ATOM_TOL: f64 = 1e-8;
const EXISTENCE_SEEDS: u64 = 50;

struct Outcome {
    pass: bool,
    summary: String,
    digest: Vec<u8>,
}

#[derive(Default)]
struct Trace(Sha256);

impl Trace {
    fn samples(&mut self, s: &SampleSet) {
        for v in &s.values {
            self.0.update(v.to_bits().to_le_bytes());
        }
    }

    fn floats(&mut self, xs: &[f64]) {
        for v in xs {
            self.0.update(v.to_bits().to_le_bytes());
        }
    }

    fn json<T: serde::Serialize>(&mut self, v: &T) {
        self.0.update(serde_json::to_vec(v).unwrap());
    }

    fn finish(self) -> Vec<u8> {
        self.0.finalize().to_vec()
    }
}

fn bm(sigma: f64, mu: f64) -> ProcessSpec {
    ProcessSpec::BrownianDrift { sigma, mu }
}

fn stable(alpha: f64, scale: f64) -> ProcessSpec {
    ProcessSpec::SymmetricStable { alpha, scale }
}

fn poisson(rate: f64) -> ProcessSpec {
    ProcessSpec::Poisson { rate }
}

fn symmetric_walk() -> ProcessSpec {
    ProcessSpec::CompoundPoissonInteger { rate: 1.0, jump_pmf: [(-1, 0.5), (1, 0.5)].into_iter().collect() }
}

fn euler(x: ProcessSpec, y: ProcessSpec) -> SamplerConfig {
    SamplerConfig::Euler { x, y, euler: Default::default() }
}

fn draw(cfg: &SamplerConfig, n: usize, seed: u64, stream_id: u64, trace: &mut Trace) -> SampleSet {
    let s = sample_set(cfg, n, RngStream::new(seed, stream_id)).unwrap();
    trace.samples(&s);
    s
}

fn ks(a: &SampleSet, b: &SampleSet, trace: &mut Trace) -> bool {
    let r = ks_two_sample(a, b, KS_LEVEL);
    trace.json(&r);
    r.verdict == Verdict::Pass
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

/// Sample variance and its standard error `sqrt((m₄ - s⁴) / n)`.
fn var_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (m, sd) = mean_sd(xs);
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    let v = sd * sd;
    (v, ((m4 - v * v) / n).sqrt())
}

fn dufresne_identity() -> Outcome {
    let mut t = Trace::default();
    let start = Instant::now();
    let b = 1.5;
    let x = euler(bm(1.0, b), ProcessSpec::DeterministicDrift { b: 1.0 });
    let d = SamplerConfig::Dufresne { a_coef: 1.0, b_coef: b };
    let passes = (0..KS_SEEDS)
        .filter(|&seed| ks(&draw(&x, KS_N, seed, 1, &mut t), &draw(&d, KS_N, seed, 2, &mut t), &mut t))
        .count();
    let big = draw(&x, MOMENT_N, 1000, 1, &mut t);
    let (m, sd) = mean_sd(&big.values);
    let se = sd / (MOMENT_N as f64).sqrt();
    let target = 1.0 / (b - 0.5);
    let elapsed = start.elapsed();
    let pass = passes >= KS_MIN_PASSES && (m - target).abs() <= MOMENT_SE * se && elapsed <= Duration::from_secs(120);
    Outcome {
        pass,
        summary: format!(
            "ks passes {passes}/{KS_SEEDS}; mean {m:.5} vs {target} (se {se:.2e}); unconverged {}; {:.1}s",
            big.unconverged,
            elapsed.as_secs_f64()
        ),
        digest: t.finish(),
    }
}

fn type_g_chain() -> Outcome {
    let mut t = Trace::default();
    let start = Instant::now();
    let (alpha, lambda, c) = (1.5, 1.0, 1.0);
    let mix = SamplerConfig::TypeGMixture { alpha, lambda, c };
    let sub = SamplerConfig::TypeGSubordinated { alpha, lambda, c };
    let eul = euler(bm(1.0, lambda), stable(alpha, c));
    let mut counts = [0usize; 3];
    for seed in 0..KS_SEEDS {
        let a = draw(&mix, KS_N, seed, 1, &mut t);
        let b = draw(&sub, KS_N, seed, 2, &mut t);
        let e = draw(&eul, KS_N, seed, 3, &mut t);
        counts[0] += ks(&a, &b, &mut t) as usize;
        counts[1] += ks(&a, &e, &mut t) as usize;
        counts[2] += ks(&b, &e, &mut t) as usize;
    }
    let elapsed = start.elapsed();
    let pass = counts.iter().all(|&k| k >= KS_MIN_PASSES) && elapsed <= Duration::from_secs(300);
    Outcome {
        pass,
        summary: format!(
            "mixture/subordinated {}/{KS_SEEDS}, mixture/euler {}/{KS_SEEDS}, subordinated/euler {}/{KS_SEEDS}; {:.1}s",
            counts[0],
            counts[1],
            counts[2],
            elapsed.as_secs_f64()
        ),
        digest: t.finish(),
    }
}

fn factorization() -> Outcome {
    let mut t = Trace::default();
    let settings = |b: f64| json!({ "a": 1.0, "y": { "family": "poisson", "params": { "rate": 1.0 } }, "n": 100_000, "b": b });
    let run = |b: f64, t: &mut Trace| {
        let (bundle, _) = verify(Theorem::SemiSelfdecomposable, &settings(b), 7).unwrap();
        t.json(&bundle);
        bundle.reports[0].clone()
    };
    let good = run((-1.0f64).exp(), &mut t);
    let bad = run(0.5, &mut t);
    let pass = good.verdict == Verdict::Pass && bad.verdict == Verdict::Fail;
    Outcome {
        pass,
        summary: format!(
            "b=e^-1 {:?} ({:.3e} vs {:.3e}); b=0.5 {:?} ({:.3e} vs {:.3e})",
            good.verdict, good.statistic, good.threshold, bad.verdict, bad.statistic, bad.threshold
        ),
        digest: t.finish(),
    }
}

fn atoms() -> Outcome {
    let mut t = Trace::default();
    let table = levy_atoms(1.0, &poisson(1.0), 8, 256).unwrap();
    let worst = (1..=20)
        .map(|k| (table.nu0(k).unwrap() - 0.5f64.powi(k as i32) / k as f64).abs())
        .fold(0.0, f64::max);
    let density: TestReport = density_report(&table, (0.1, 10.0), 0.05);
    let walk = levy_atoms(1.0, &symmetric_walk(), 8, 20).unwrap();
    let positive = walk.entries.iter().any(|e| e.point > 0.0 && e.mass > 0.0);
    let negative = walk.entries.iter().any(|e| e.point < 0.0 && e.mass > 0.0);
    t.json(&table);
    t.json(&density);
    t.json(&walk);
    let pass = worst <= ATOM_TOL && density.verdict == Verdict::Pass && positive && negative && walk.domain == Domain::Real;
    Outcome {
        pass,
        summary: format!(
            "max |nu0(k) - 2^-k/k| over k<=20 = {worst:.2e}; density {:?} (max gap {:.4}); walk domain {:?}, atoms +{positive} -{negative}",
            density.verdict, density.statistic, walk.domain
        ),
        digest: t.finish(),
    }
}

fn series_vs_euler() -> Outcome {
    let mut t = Trace::default();
    let series = SamplerConfig::PoissonSeries { a: 1.0, y: bm(1.0, 0.0), n_terms: 40 };
    let eul = euler(poisson(1.0), bm(1.0, 0.0));
    let passes = (0..KS_SEEDS)
        .filter(|&seed| ks(&draw(&series, KS_N, seed, 1, &mut t), &draw(&eul, KS_N, seed, 2, &mut t), &mut t))
        .count();
    let target = 1.0 / (1.0 - (-2.0f64).exp());
    let (ve, se_e) = var_se(&draw(&eul, MOMENT_N, 1000, 2, &mut t).values);
    let (vs, se_s) = var_se(&draw(&series, MOMENT_N, 1000, 1, &mut t).values);
    let pass = passes >= KS_MIN_PASSES && (ve - target).abs() <= MOMENT_SE * se_e && (vs - target).abs() <= MOMENT_SE * se_s;
    Outcome {
        pass,
        summary: format!(
            "ks passes {passes}/{KS_SEEDS}; var euler {ve:.5} (se {se_e:.1e}), series {vs:.5} (se {se_s:.1e}) vs {target:.5}"
        ),
        digest: t.finish(),
    }
}

fn existence_matrix() -> Outcome {
    let mut t = Trace::default();
    let rows = [("bm(+0.5)", bm(1.0, 0.5), Existence::Exists), ("bm(-0.5)", bm(1.0, -0.5), Existence::Diverges), ("poisson", poisson(1.0), Existence::Exists)];
    let cols = [("stable", stable(1.5, 1.0)), ("poisson", poisson(1.0)), ("walk", symmetric_walk())];
    let mut bad = Vec::new();
    for (rn, x, expected) in &rows {
        for (cn, y) in &cols {
            let v = existence_verdict(x, y).unwrap();
            let settings = json!({ "x": x, "y": y, "seeds": EXISTENCE_SEEDS });
            let (bundle, _) = verify(Theorem::Existence, &settings, 11).unwrap();
            t.json(&v);
            t.json(&bundle);
            if v.verdict != *expected || bundle.overall != Verdict::Pass {
                bad.push(format!("{rn}x{cn}: {:?}, {} disagreements", v.verdict, bundle.reports[0].statistic));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        summary: if bad.is_empty() {
            format!("9/9 cells match, simulation agrees on {EXISTENCE_SEEDS}/{EXISTENCE_SEEDS} seeds per cell")
        } else {
            bad.join("; ")
        },
        digest: t.finish(),
    }
}

fn stationarity() -> Outcome {
    let mut t = Trace::default();
    let pair = JointPairSpec::independent(bm(1.0, 1.0), stable(1.5, 1.0));
    let cfg = StationarityConfig::new(vec![1.0, 5.0, 25.0], 10_000);
    let ok = stationarity_report(&pair, &cfg, RngStream::new(5, 0)).unwrap();
    let zero_cfg = StationarityConfig { initial: InitialLaw::Constant { value: 0.0 }, ..cfg };
    let zero = stationarity_report(&pair, &zero_cfg, RngStream::new(5, 0)).unwrap();
    t.json(&ok);
    t.json(&zero);
    Outcome {
        pass: ok.verdict == Verdict::Pass && zero.verdict == Verdict::Fail,
        summary: format!(
            "stationary V0 {:?} (D {:.4} vs {:.4}); V0=0 {:?} (D {:.4})",
            ok.verdict, ok.statistic, ok.threshold, zero.verdict, zero.statistic
        ),
        digest: t.finish(),
    }
}

fn l_reduction() -> Outcome {
    let mut t = Trace::default();
    let pairs = [
        JointPairSpec::independent(bm(1.0, 1.0), stable(1.5, 1.0)),
        JointPairSpec::independent(poisson(2.0), symmetric_walk()),
        JointPairSpec::independent(ProcessSpec::GammaSubordinator { shape: 1.0, rate: 2.0 }, bm(0.7, -0.3)),
        JointPairSpec::independent(bm(0.5, 0.2), poisson(3.0)),
    ];
    let mut checked = 0;
    let mut identical = 0;
    for (i, pair) in pairs.iter().enumerate() {
        for seed in 0..5u64 {
            let path = simulate_v(pair, 0.0, 10.0, 0.01, &[], &mut RngStream::new(seed, i as u64).rng()).unwrap();
            let l = transform_l(pair, &path.xi, &path.eta).unwrap();
            t.floats(&l.values);
            checked += 1;
            identical += (l == path.eta) as usize;
        }
    }
    Outcome { pass: identical == checked, summary: format!("{identical}/{checked} paths identical"), digest: t.finish() }
}

fn selfdec_screen() -> Outcome {
    let mut t = Trace::default();
    let settings = json!({ "a_coef": 1.0, "b_coef": 1.5, "n": 100_000, "b_list": [0.3, 0.5, 0.8] });
    let (bundle, _) = verify(Theorem::Selfdecomposable, &settings, 3).unwrap();
    t.json(&bundle);
    let r = &bundle.reports[0];
    Outcome {
        pass: r.verdict == Verdict::Pass,
        summary: format!("{:?}: min-eig violation {:.3e} vs tau {:.3e}", r.verdict, r.statistic, r.threshold),
        digest: t.finish(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 9] = [
    ("1 dufresne identity", dufresne_identity),
    ("2 type G chain", type_g_chain),
    ("3 e^-1 factorization", factorization),
    ("4 atoms and density", atoms),
    ("5 series vs pathwise", series_vs_euler),
    ("6 existence matrix", existence_matrix),
    ("7 gou stationarity", stationarity),
    ("8 L reduces to eta", l_reduction),
    ("9 selfdec screen", selfdec_screen),
];

fn line(name: &str, pass: bool, summary: &str) {
    println!("{} criterion {name}: {summary}", if pass { "PASS" } else { "FAIL" });
}

fn main() {
    let mut failures = 0;
    let mut digests = Vec::new();
    for (name, run) in CRITERIA {
        let o = with_threads(1, run);
        line(name, o.pass, &o.summary);
        failures += !o.pass as usize;
        digests.push(o.digest);
    }
    let mut mismatched = Vec::new();
    for threads in [4, 16] {
        for ((name, run), reference) in CRITERIA.iter().zip(&digests) {
            if with_threads(threads, run).digest != *reference {
                mismatched.push(format!("{name} at {threads} threads"));
            }
        }
    }
    let pass = mismatched.is_empty();
    let summary = if pass { "criteria 1-9 identical at 1, 4 and 16 threads".to_string() } else { mismatched.join(", ") };
    line("10 determinism", pass, &summary);
    failures += !pass as usize;
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
