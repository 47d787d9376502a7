use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use traplab_cli::config::{normalize_key, parse_config_text, ConfigError, RawConfig};
use traplab_cli::{run, Experiment, ExperimentConfig, EXIT_CHECK, EXIT_CONFIG, EXIT_OK, WORKERS_ENV};

#[derive(Parser)]
#[command(name = "traplab", version, about = "Numerical experiments on surfaces with a degenerate trapped geodesic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its reports.
    Run(RunArgs),
    /// List experiments and configuration keys.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// spectrum, lower-bound, microlocal-resolvent, full-resolvent, quasimode, smoothing or saturation.
    experiment: String,
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Threshold on a summary quantity, `name=target±tolerance`. Repeatable.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Degeneracy exponent of the profile.
    #[arg(long)]
    m: Option<String>,
    /// Scan of h, e.g. `2^-4:2^-9:dyadic` or `0.1,0.05`.
    #[arg(long)]
    h: Option<String>,
    /// Scan of λ, e.g. `8:128:dyadic`.
    #[arg(long)]
    lambda: Option<String>,
    /// Fourier modes, e.g. `16,32,64`.
    #[arg(long)]
    k: Option<String>,
    /// Spectral parameter of the microlocal probe.
    #[arg(long)]
    z: Option<String>,
    /// Half-width L of the computational interval.
    #[arg(long)]
    half_length: Option<String>,
    /// Grid intervals for the quasimode samples.
    #[arg(long)]
    n: Option<String>,
    /// Imaginary shift ε as a multiple of h^{2m/(m+1)}.
    #[arg(long)]
    epsilon_factor: Option<String>,
    /// Strength of the absorbing boundary layer.
    #[arg(long)]
    layer_strength: Option<String>,
    /// Radius of the spatial cutoff.
    #[arg(long)]
    radius: Option<String>,
    /// Scale of the frequency cutoff, or `none`.
    #[arg(long)]
    frequency_scale: Option<String>,
    /// Real part of the quasimode energy coefficient.
    #[arg(long)]
    alpha: Option<String>,
    /// Imaginary part of the quasimode energy coefficient.
    #[arg(long)]
    beta: Option<String>,
    /// Time-scale divisor `A` of the saturation window.
    #[arg(long)]
    a: Option<String>,
    /// Radius of the cutoff in the saturation integral, in units of γ.
    #[arg(long)]
    chi_radius: Option<String>,
    /// Base seed for random initial data.
    #[arg(long)]
    seed: Option<String>,
    /// Number of random initial data.
    #[arg(long)]
    data_count: Option<String>,
    /// Final time of smoothing runs.
    #[arg(long)]
    time: Option<String>,
    /// Use data supported away from the trapped set.
    #[arg(long)]
    away: Option<String>,
    /// Largest Fourier mode in the full resolvent sum.
    #[arg(long)]
    k_max: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Also write a log-log SVG plot.
    #[arg(long)]
    svg: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("m", &self.m),
            ("h", &self.h),
            ("lambda", &self.lambda),
            ("k", &self.k),
            ("z", &self.z),
            ("half_length", &self.half_length),
            ("n", &self.n),
            ("epsilon_factor", &self.epsilon_factor),
            ("layer_strength", &self.layer_strength),
            ("radius", &self.radius),
            ("frequency_scale", &self.frequency_scale),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("a", &self.a),
            ("chi_radius", &self.chi_radius),
            ("seed", &self.seed),
            ("data_count", &self.data_count),
            ("time", &self.time),
            ("away", &self.away),
            ("k_max", &self.k_max),
            ("out", &self.out),
            ("svg", &self.svg),
        ]
    }

    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let experiment: Experiment = self.experiment.parse()?;
        let mut raw = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
                parse_config_text(&text)?
            }
            None => RawConfig::new(),
        };
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                raw.insert(normalize_key(key), v.clone());
            }
        }
        ExperimentConfig::resolve(experiment, &raw, &self.checks)
    }
}

fn configure_workers() -> Result<(), String> {
    let Ok(text) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = text.trim().parse().map_err(|_| format!("{WORKERS_ENV}={text} is not a worker count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot start {n} workers: {e}"))
}

fn execute(args: &RunArgs) -> i32 {
    let config = match args.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = match run(&config).and_then(|r| r.write().map(|paths| (r, paths))) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let (report, paths) = report;
    for (name, value) in &report.summary {
        println!("{name} = {value:.6}");
    }
    for p in paths {
        println!("wrote {}", p.display());
    }
    for c in &report.checks {
        let value = c.value.map_or("missing".to_string(), |v| format!("{v:.6}"));
        println!(
            "check {}={}±{}: {} ({value})",
            c.check.name,
            c.check.target,
            c.check.tolerance,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    if report.all_checks_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let code = match cli.command {
        Command::Run(args) => execute(&args),
        Command::List => {
            for e in Experiment::ALL {
                println!("{e}");
            }
            println!("keys: {}", traplab_cli::config::KEYS.join(", "));
            EXIT_OK
        }
    };
    ExitCode::from(code as u8)
}
