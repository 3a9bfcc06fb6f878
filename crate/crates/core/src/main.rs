use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use exlevy::cli::{self, Command, RunConfig, RunOptions, Theorem, EXIT_USAGE};
use exlevy::gou::{InitialLaw, JointPairSpec, StationarityConfig};
use exlevy::levy::ProcessSpec;
use exlevy::{Error, Result};

#[derive(Parser)]
#[command(name = "exlevy", version, about = "Exponential functionals of Lévy processes: sampling and verification")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "EXLEVY_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Existence verdict for Z given X and Y.
    Check {
        /// JSON file with `{"x": <spec>, "y": <spec>}`.
        #[arg(long)]
        config: PathBuf,
    },
    /// Draw samples of Z (or of a GOU marginal) to CSV.
    Sample {
        #[arg(long)]
        method: String,
        /// JSON file with the method's parameters.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stationarity check of a generalized OU process.
    Gou {
        /// JSON file with a joint pair spec.
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,5,25")]
        times: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Start every path at this value instead of the stationary law.
        #[arg(long)]
        v0: Option<f64>,
    },
    /// Run a pre-wired verification.
    Verify {
        #[arg(long)]
        theorem: String,
        /// Optional JSON file overriding the default settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Tabulate Lévy-measure atoms of Z for a Poisson X.
    Atoms {
        #[arg(long)]
        a: f64,
        /// JSON file with the spec of Y.
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        nmax: u32,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn build(cli: &Cli) -> Result<RunConfig> {
    let command = match &cli.command {
        Sub::Check { config } => {
            #[derive(serde::Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Pair {
                x: ProcessSpec,
                y: ProcessSpec,
            }
            let p: Pair = cli::parse_json(&read(config)?, "")?;
            p.x.validate().map_err(|e| e.within("x"))?;
            p.y.validate().map_err(|e| e.within("y"))?;
            Command::Check { x: p.x, y: p.y }
        }
        Sub::Sample { method, config, n, out } => {
            let mut value: serde_json::Value = cli::parse_json(&read(config)?, "")?;
            let obj = value.as_object_mut().ok_or_else(|| Error::spec("", "config must be a JSON object"))?;
            match obj.get("method") {
                Some(m) if m.as_str() != Some(method.as_str()) => {
                    return Err(Error::spec("method", format!("config says {m}, command line says {method}")))
                }
                _ => {
                    obj.insert("method".into(), serde_json::Value::String(method.clone()));
                }
            }
            let sampler = cli::parse_json(&value.to_string(), "")?;
            Command::Sample { sampler, n: *n, out: out.clone() }
        }
        Sub::Gou { pair, times, n, v0 } => {
            let pair: JointPairSpec = cli::parse_json(&read(pair)?, "")?;
            let mut st = StationarityConfig::new(times.clone(), *n);
            if let Some(v) = v0 {
                st.initial = InitialLaw::Constant { value: *v };
            }
            Command::Gou { pair, stationarity: st }
        }
        Sub::Verify { theorem, config } => {
            let theorem = Theorem::parse(theorem)?;
            let settings = match config {
                Some(p) => cli::parse_json(&read(p)?, "settings")?,
                None => serde_json::Value::Null,
            };
            Command::Verify { theorem, settings }
        }
        Sub::Atoms { a, y, nmax, kmax, out } => {
            let y: ProcessSpec = cli::parse_json(&read(y)?, "y")?;
            Command::Atoms { a: *a, y, n_max: *nmax, k_max: *kmax, out: out.clone() }
        }
    };
    Ok(RunConfig { command, seed: cli.seed })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let opts = RunOptions { threads: cli.threads, out_dir: cli.out_dir.clone() };
    let result = build(&cli).and_then(|cfg| cli::run(&cfg, &opts));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for a in &outcome.artifacts {
                eprintln!("wrote {}", a.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::error_code(&e) as u8)
        }
    }
}
