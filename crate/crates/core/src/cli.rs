//! Run orchestration behind the `exlevy` binary: configuration, dispatch,
//! report bundles and atomic artifact output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distcheck::atoms::nu0_series;
use crate::distcheck::{
    default_z_grid, density_report, factorization_residual, ks_two_sample, levy_atoms, selfdec_screen, AtomTable,
    TestReport, Verdict,
};
use crate::error::{Error, Result};
use crate::existence::{existence_verdict, ExistenceVerdict, Verdict as Existence};
use crate::exfunc::{sample_set, sample_z_euler, sample_y_at_exp_time, EulerConfig, SampleSet, SamplerConfig, DEFAULT_SERIES_TERMS};
use crate::gou::{stationarity_report, JointPairSpec, StationarityConfig};
use crate::levy::ProcessSpec;
use crate::rng::{sample_batch, with_threads, RngStream};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// Existence criterion against the pathwise convergence diagnostic.
    #[serde(rename = "2.1")]
    Existence,
    /// Selfdecomposability screen on the Brownian exponential functional.
    #[serde(rename = "3.1")]
    Selfdecomposable,
    /// `Z = W₀ + e^{-1} Z'` for a Poisson `X`.
    #[serde(rename = "3.2i")]
    SemiSelfdecomposable,
    /// Two-level factorization for strictly stable or Brownian `Y`.
    #[serde(rename = "3.2ii")]
    ClassL1,
    /// Discrete Lévy measure with atoms dense in the domain.
    #[serde(rename = "3.2iii")]
    Atoms,
    /// Type G representation.
    #[serde(rename = "4.1")]
    TypeG,
    #[serde(rename = "stationarity")]
    Stationarity,
}

impl Theorem {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::spec("theorem", format!("unknown theorem `{s}` (expected 2.1, 3.1, 3.2i, 3.2ii, 3.2iii, 4.1, stationarity)")))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Theorem::Existence => "2.1",
            Theorem::Selfdecomposable => "3.1",
            Theorem::SemiSelfdecomposable => "3.2i",
            Theorem::ClassL1 => "3.2ii",
            Theorem::Atoms => "3.2iii",
            Theorem::TypeG => "4.1",
            Theorem::Stationarity => "stationarity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Check { x: ProcessSpec, y: ProcessSpec },
    Sample { sampler: SamplerConfig, n: usize, out: PathBuf },
    Gou { pair: JointPairSpec, stationarity: StationarityConfig },
    Verify { theorem: Theorem, settings: serde_json::Value },
    Atoms { a: f64, y: ProcessSpec, n_max: u32, k_max: u32, out: PathBuf },
}

/// Everything that determines a run's outputs. Thread count and output
/// directory are deliberately absent: they never change the bytes written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub seed: u64,
}

impl RunConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("serializable config");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub summary: String,
}

/// Machine-readable bundle of reports with the worst verdict on top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub overall: Verdict,
    pub reports: Vec<TestReport>,
}

pub fn report_bundle(reports: Vec<TestReport>) -> ReportBundle {
    ReportBundle { overall: Verdict::worst(reports.iter().map(|r| r.verdict)), reports }
}

impl ReportBundle {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<28} {:>14} {:>14}  verdict", "check", "statistic", "threshold");
        for r in &self.reports {
            let _ = writeln!(s, "{:<28} {:>14.6e} {:>14.6e}  {:?}", r.name, r.statistic, r.threshold, r.verdict);
            if let Some(reason) = &r.reason {
                let _ = writeln!(s, "    reason: {reason}");
            }
        }
        let _ = writeln!(s, "overall: {:?}", self.overall);
        s
    }

    pub fn exit_code(&self) -> i32 {
        verdict_code(self.overall)
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Parses JSON into `T`, reporting failures with the offending path.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, root: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (root.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => root.to_string(),
            (false, p) => format!("{root}.{p}"),
        };
        Error::spec(path, e.into_inner().to_string())
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp.{}", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn json_artifact<T: Serialize>(cfg: &RunConfig, result: &T) -> Result<Vec<u8>> {
    let doc = serde_json::json!({
        "toolkit_version": VERSION,
        "config_hash": cfg.hash(),
        "config": cfg,
        "result": result,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn csv_header(cfg: &RunConfig) -> String {
    format!("# exlevy {VERSION} config_hash={}\n", cfg.hash())
}

pub fn samples_csv(cfg: &RunConfig, set: &SampleSet) -> Vec<u8> {
    let mut s = csv_header(cfg);
    s.push_str("value\n");
    for v in &set.values {
        let _ = writeln!(s, "{v:?}");
    }
    s.into_bytes()
}

pub fn atoms_csv(cfg: &RunConfig, table: &AtomTable) -> Vec<u8> {
    let mut s = csv_header(cfg);
    s.push_str("n,k,point,mass,quadrature_error,flagged\n");
    for e in &table.entries {
        let _ = writeln!(s, "{},{},{:?},{:?},{:?},{}", e.n, e.k, e.point, e.mass, e.quadrature_error, e.flagged);
    }
    s.into_bytes()
}

fn resolve(opts: &RunOptions, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        opts.out_dir.join(p)
    }
}

/// Validates and executes `cfg`, writing its artifacts under `opts.out_dir`.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<Outcome> {
    with_threads(opts.threads, || run_inner(cfg, opts))
}

fn run_inner(cfg: &RunConfig, opts: &RunOptions) -> Result<Outcome> {
    match &cfg.command {
        Command::Check { x, y } => {
            let v: ExistenceVerdict = existence_verdict(x, y)?;
            let path = resolve(opts, Path::new("check.json"));
            write_atomic(&path, &json_artifact(cfg, &v)?)?;
            let code = if v.verdict == Existence::Undetermined { EXIT_INCONCLUSIVE } else { EXIT_OK };
            Ok(Outcome { exit_code: code, artifacts: vec![path], summary: format!("{:?}\n", v.verdict).to_lowercase() })
        }
        Command::Sample { sampler, n, out } => {
            if *n == 0 {
                return Err(Error::spec("n", "must be >= 1"));
            }
            let set = sample_set(sampler, *n, RngStream::new(cfg.seed, 0))?;
            let path = resolve(opts, out);
            write_atomic(&path, &samples_csv(cfg, &set))?;
            let summary = format!("{} values written, {} unconverged\n", set.n, set.unconverged);
            Ok(Outcome { exit_code: EXIT_OK, artifacts: vec![path], summary })
        }
        Command::Gou { pair, stationarity } => {
            let report = stationarity_report(pair, stationarity, RngStream::new(cfg.seed, 0))?;
            let bundle = report_bundle(vec![report]);
            let path = resolve(opts, Path::new("gou_report.json"));
            write_atomic(&path, &json_artifact(cfg, &bundle)?)?;
            Ok(Outcome { exit_code: bundle.exit_code(), artifacts: vec![path], summary: bundle.table() })
        }
        Command::Verify { theorem, settings } => {
            let (bundle, side) = verify(*theorem, settings, cfg.seed)?;
            let path = resolve(opts, Path::new(&format!("verify_{}.json", theorem.label())));
            write_atomic(&path, &json_artifact(cfg, &bundle)?)?;
            let mut artifacts = vec![path];
            if let Some(table) = side {
                let p = resolve(opts, Path::new(&format!("atoms_{}.csv", theorem.label())));
                write_atomic(&p, &atoms_csv(cfg, &table))?;
                artifacts.push(p);
            }
            Ok(Outcome { exit_code: bundle.exit_code(), artifacts, summary: bundle.table() })
        }
        Command::Atoms { a, y, n_max, k_max, out } => {
            let table = levy_atoms(*a, y, *n_max, *k_max)?;
            let path = resolve(opts, out);
            write_atomic(&path, &atoms_csv(cfg, &table))?;
            let flagged = table.entries.iter().filter(|e| e.flagged).count();
            let summary = format!("{} entries, p = {:?}, {} flagged\n", table.entries.len(), table.p, flagged);
            Ok(Outcome { exit_code: EXIT_OK, artifacts: vec![path], summary })
        }
    }
}

fn settings<T: for<'de> Deserialize<'de> + Default>(value: &serde_json::Value) -> Result<T> {
    if value.is_null() {
        return Ok(T::default());
    }
    parse_json(&value.to_string(), "settings")
}

fn stable(alpha: f64, scale: f64) -> ProcessSpec {
    ProcessSpec::SymmetricStable { alpha, scale }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExistenceSettings {
    pub x: ProcessSpec,
    pub y: ProcessSpec,
    pub seeds: u64,
    pub euler: EulerConfig,
}

impl Default for ExistenceSettings {
    fn default() -> Self {
        Self { x: ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.5 }, y: stable(1.5, 1.0), seeds: 50, euler: EulerConfig::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfdecSettings {
    pub a_coef: f64,
    pub b_coef: f64,
    pub n: usize,
    pub b_list: Vec<f64>,
    pub z_grid: Vec<f64>,
}

impl Default for SelfdecSettings {
    fn default() -> Self {
        Self { a_coef: 1.0, b_coef: 1.5, n: 100_000, b_list: vec![0.3, 0.5, 0.8], z_grid: default_z_grid() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorizationSettings {
    /// Rate of the Poisson process `X`.
    pub a: f64,
    pub y: ProcessSpec,
    pub n: usize,
    pub b: f64,
    pub n_terms: usize,
    pub z_grid: Vec<f64>,
}

impl Default for FactorizationSettings {
    fn default() -> Self {
        Self {
            a: 1.0,
            y: ProcessSpec::Poisson { rate: 1.0 },
            n: 100_000,
            b: (-1.0f64).exp(),
            n_terms: DEFAULT_SERIES_TERMS,
            z_grid: default_z_grid(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomSettings {
    pub a: f64,
    pub y: ProcessSpec,
    pub n_max: u32,
    pub k_max: u32,
    pub interval: (f64, f64),
    pub eps: f64,
    /// Atoms `1..=oracle_k` are compared with the jump-count series.
    pub oracle_k: i64,
}

impl Default for AtomSettings {
    fn default() -> Self {
        Self { a: 1.0, y: ProcessSpec::Poisson { rate: 1.0 }, n_max: 8, k_max: 256, interval: (0.1, 10.0), eps: 0.05, oracle_k: 20 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TypeGSettings {
    pub alpha: f64,
    pub lambda: f64,
    pub c: f64,
    pub n: usize,
    pub level: f64,
    pub euler: EulerConfig,
}

impl Default for TypeGSettings {
    fn default() -> Self {
        Self { alpha: 1.5, lambda: 1.0, c: 1.0, n: 10_000, level: 0.01, euler: EulerConfig::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaritySettings {
    pub pair: JointPairSpec,
    pub stationarity: StationarityConfig,
}

impl Default for StationaritySettings {
    fn default() -> Self {
        Self {
            pair: JointPairSpec::independent(ProcessSpec::BrownianDrift { sigma: 1.0, mu: 1.0 }, stable(1.5, 1.0)),
            stationarity: StationarityConfig::new(vec![1.0, 5.0, 25.0], 10_000),
        }
    }
}

/// Runs a pre-wired verification; returns its bundle and, for the atom
/// check, the table as a side artifact.
pub fn verify(theorem: Theorem, raw: &serde_json::Value, seed: u64) -> Result<(ReportBundle, Option<AtomTable>)> {
    let stream = RngStream::new(seed, 0);
    match theorem {
        Theorem::Existence => {
            let s: ExistenceSettings = settings(raw)?;
            s.euler.validate()?;
            let v = existence_verdict(&s.x, &s.y)?;
            let diag = sample_batch(s.seeds as usize, stream, |rng| sample_z_euler(&s.x, &s.y, &s.euler, rng).1);
            let expected = v.verdict == Existence::Exists;
            let disagreements = diag.iter().filter(|d| d.converged != expected).count();
            let provenance = serde_json::to_value(&s)?;
            let report = if v.verdict == Existence::Undetermined {
                TestReport::inconclusive("existence_vs_simulation", "existence verdict undetermined", provenance)
            } else {
                TestReport::compare("existence_vs_simulation", disagreements as f64, 0.0, provenance)
                    .with_details(serde_json::json!({ "verdict": v, "runs": s.seeds }))
            };
            Ok((report_bundle(vec![report]), None))
        }
        Theorem::Selfdecomposable => {
            let s: SelfdecSettings = settings(raw)?;
            let set = sample_set(&SamplerConfig::Dufresne { a_coef: s.a_coef, b_coef: s.b_coef }, s.n, stream)?;
            let mut r = selfdec_screen(&set.values, &s.b_list, &s.z_grid);
            r.provenance = serde_json::json!({ "settings": s, "samples": set.provenance(), "screen": r.provenance });
            Ok((report_bundle(vec![r]), None))
        }
        Theorem::SemiSelfdecomposable => {
            let s: FactorizationSettings = settings(raw)?;
            let (z, w0) = series_and_w0(&s, stream)?;
            let mut r = factorization_residual(&z.values, &w0, s.b, &s.z_grid);
            r.provenance = serde_json::json!({ "settings": s, "samples": z.provenance(), "check": r.provenance });
            Ok((report_bundle(vec![r]), None))
        }
        Theorem::ClassL1 => {
            let mut s: FactorizationSettings = settings(raw)?;
            if raw.get("y").is_none() {
                s.y = ProcessSpec::BrownianDrift { sigma: 1.0, mu: 0.0 };
            }
            let (z, w0) = series_and_w0(&s, stream)?;
            let mut first = factorization_residual(&z.values, &w0, s.b, &s.z_grid);
            first.name = "factorization_residual_z".into();
            // Second level: ρ_b is the law of W₀, screened for its own
            // b-factorization.
            let mut second = selfdec_screen(&w0, &[s.b], &s.z_grid);
            second.name = "selfdec_screen_w0".into();
            let prov = serde_json::to_value(&s)?;
            first.provenance = serde_json::json!({ "settings": prov, "check": first.provenance });
            second.provenance = serde_json::json!({ "settings": prov, "check": second.provenance });
            Ok((report_bundle(vec![first, second]), None))
        }
        Theorem::Atoms => {
            let s: AtomSettings = settings(raw)?;
            let table = levy_atoms(s.a, &s.y, s.n_max, s.k_max)?;
            let mut worst = 0.0f64;
            let mut conv = crate::distcheck::ConvolutionPowers::new(&s.y)?;
            for m in (1..=s.oracle_k.min(s.k_max as i64)).chain((-s.oracle_k.min(s.k_max as i64)..=-1).rev()) {
                let q = table.nu0(m).unwrap_or(0.0);
                worst = worst.max((q - nu0_series(&mut conv, s.a, m)).abs());
            }
            let prov = serde_json::to_value(&s)?;
            let oracle = TestReport::compare("atoms_vs_series", worst, 1e-8, prov.clone());
            let density = density_report(&table, s.interval, s.eps);
            let flagged = table.entries.iter().filter(|e| e.flagged).count();
            let quad = TestReport::compare("atom_quadrature_flags", flagged as f64, 0.0, prov);
            Ok((report_bundle(vec![oracle, density, quad]), Some(table)))
        }
        Theorem::TypeG => {
            let s: TypeGSettings = settings(raw)?;
            let mix = sample_set(&SamplerConfig::TypeGMixture { alpha: s.alpha, lambda: s.lambda, c: s.c }, s.n, stream.substream(0))?;
            let sub =
                sample_set(&SamplerConfig::TypeGSubordinated { alpha: s.alpha, lambda: s.lambda, c: s.c }, s.n, stream.substream(1))?;
            let euler_cfg = SamplerConfig::Euler {
                x: ProcessSpec::BrownianDrift { sigma: 1.0, mu: s.lambda },
                y: stable(s.alpha, s.c),
                euler: s.euler,
            };
            let eul = sample_set(&euler_cfg, s.n, stream.substream(2))?;
            let mut r1 = ks_two_sample(&mix, &sub, s.level);
            r1.name = "ks_mixture_vs_subordinated".into();
            let mut r2 = ks_two_sample(&mix, &eul, s.level);
            r2.name = "ks_mixture_vs_euler".into();
            Ok((report_bundle(vec![r1, r2]), None))
        }
        Theorem::Stationarity => {
            let s: StationaritySettings = settings(raw)?;
            Ok((report_bundle(vec![stationarity_report(&s.pair, &s.stationarity, stream)?]), None))
        }
    }
}

/// Series draws of `Z` and independent draws of `W₀ = Y(T₁)`.
fn series_and_w0(s: &FactorizationSettings, stream: RngStream) -> Result<(SampleSet, Vec<f64>)> {
    if !(s.b > 0.0 && s.b < 1.0) {
        return Err(Error::spec("settings.b", "must lie in (0, 1)"));
    }
    let z = sample_set(&SamplerConfig::PoissonSeries { a: s.a, y: s.y.clone(), n_terms: s.n_terms }, s.n, stream.substream(0))?;
    let w0 = sample_batch(s.n, stream.substream(1), |rng| sample_y_at_exp_time(&s.y, s.a, rng));
    Ok((z, w0))
}

/// Maps an error to the exit-code contract.
pub fn error_code(_e: &Error) -> i32 {
    EXIT_USAGE
}
