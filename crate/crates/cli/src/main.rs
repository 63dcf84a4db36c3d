use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use polylab::experiment::{with_workers, ConfigOverrides, ExperimentConfig, ExperimentKind, ExperimentReport};
use polylab::{run_experiment, Error};

const WORKERS_ENV: &str = "POLYLAB_WORKERS";

#[derive(Parser)]
#[command(name = "polylab", version, about = "Monte Carlo experiments on random polytopes in smooth convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance of standardized V_j(K_N) to the standard Gaussian.
    Clt(Common),
    /// Variance of V_j(K_N) across the N grid.
    VarianceScan(Common),
    /// Monte Carlo gamma_1..gamma_4 and the normal-approximation bound.
    GammaScan(GammaArgs),
    /// Moments of the first difference D_1 V_j.
    D1Scan(Common),
    /// Angle measure, floating-body containment, wet part and visible diameter.
    GeometryChecks(GeometryArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat `key = value` configuration file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Space dimension.
    #[arg(long)]
    n: Option<String>,
    /// Intrinsic-volume index, or `all`.
    #[arg(long)]
    j: Option<String>,
    /// Comma-separated point counts, strictly increasing.
    #[arg(long = "N-grid", value_name = "LIST")]
    n_grid: Option<String>,
    /// Replications per grid point.
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `ball`, `ball:<r>` or `ellipsoid:<a1>,<a2>,...`.
    #[arg(long)]
    body: Option<String>,
    /// Rescale the body to unit volume.
    #[arg(long)]
    normalize: bool,
    /// Haar subspaces for Kubota estimates of the middle indices.
    #[arg(long)]
    kubota_subspaces: Option<String>,
}

#[derive(Args, Clone)]
struct GammaArgs {
    #[command(flatten)]
    common: Common,
    /// Replications used for Var W.
    #[arg(long)]
    variance_reps: Option<String>,
    /// Random mixed recombinations per replication.
    #[arg(long)]
    mixed_patterns: Option<String>,
}

#[derive(Args, Clone)]
struct GeometryArgs {
    #[command(flatten)]
    common: Common,
    /// Checks to run (repeatable); all four when omitted.
    #[arg(long = "check", value_name = "NAME")]
    checks: Vec<String>,
    /// Monte Carlo samples per replication (angle draws, visible-region points).
    #[arg(long)]
    samples: Option<String>,
    /// Floating-body multiplier c in t = c vol(K) log N / N.
    #[arg(long)]
    c: Option<String>,
    /// Replications of the containment calibration run.
    #[arg(long)]
    calibration_reps: Option<String>,
}

fn config_error(location: &str, message: impl Into<String>) -> Error {
    Error::Config {
        location: location.to_string(),
        message: message.into(),
    }
}

impl Common {
    fn overrides(&self, extra: &[(&str, &Option<String>)]) -> Result<ConfigOverrides, Error> {
        let mut o = ConfigOverrides::default();
        let fields = [
            ("n", &self.n),
            ("j", &self.j),
            ("N_grid", &self.n_grid),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("body", &self.body),
            ("kubota_subspaces", &self.kubota_subspaces),
        ];
        for (key, value) in fields.iter().chain(extra) {
            if let Some(v) = value {
                o.set(key, v).map_err(|m| config_error(&format!("--{key}"), m))?;
            }
        }
        if self.normalize {
            o.normalize = Some(true);
        }
        o.output_dir = self.out.clone();
        Ok(o)
    }

    fn file(&self) -> Result<ConfigOverrides, Error> {
        match &self.config {
            Some(path) => ConfigOverrides::from_file(path),
            None => Ok(ConfigOverrides::default()),
        }
    }

    fn resolve(&self, kind: ExperimentKind, extra: &[(&str, &Option<String>)]) -> Result<ExperimentConfig, Error> {
        let mut cli = self.overrides(extra)?;
        cli.experiment = Some(kind);
        ExperimentConfig::resolve(self.file()?, cli)
    }
}

fn worker_cap() -> Result<Option<usize>, Error> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(Some(w)),
            _ => Err(config_error(WORKERS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn print_report(report: &ExperimentReport, cfg: &ExperimentConfig) {
    println!("{} (n = {}, seed = {})", report.kind, cfg.n, cfg.seed);
    let mut last = None;
    for row in &report.summary {
        let key = (row.j, row.big_n);
        if last != Some(key) {
            print!("\n  j={:<2} N={:<7}", row.j, row.big_n);
            last = Some(key);
        }
        print!(" {}={:.6e}", row.statistic, row.value);
    }
    println!();
    for f in &report.fits {
        println!(
            "  fit {} (j={}): exponent {:.4}, r^2 {:.4}",
            f.label, f.j, f.fit.exponent, f.fit.r_squared
        );
    }
}

fn run_one(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<()> {
    let report = with_workers(workers, || run_experiment(cfg))??;
    print_report(&report, cfg);
    let files = report
        .write(&cfg.output_dir)
        .with_context(|| format!("writing results for {}", cfg.experiment))?;
    for f in files {
        println!("  wrote {}", f.display());
    }
    Ok(())
}

fn configs(command: &Command) -> Result<Vec<ExperimentConfig>, Error> {
    Ok(match command {
        Command::Clt(c) => vec![c.resolve(ExperimentKind::Clt, &[])?],
        Command::VarianceScan(c) => vec![c.resolve(ExperimentKind::VarianceScan, &[])?],
        Command::D1Scan(c) => vec![c.resolve(ExperimentKind::D1MomentScan, &[])?],
        Command::GammaScan(g) => vec![g.common.resolve(
            ExperimentKind::GammaScan,
            &[("variance_reps", &g.variance_reps), ("mixed_patterns", &g.mixed_patterns)],
        )?],
        Command::GeometryChecks(g) => {
            let kinds: Vec<ExperimentKind> = if g.checks.is_empty() {
                ExperimentKind::ALL.into_iter().filter(|k| k.is_geometry_check()).collect()
            } else {
                g.checks
                    .iter()
                    .map(|s| match s.parse::<ExperimentKind>() {
                        Ok(k) if k.is_geometry_check() => Ok(k),
                        Ok(k) => Err(config_error("--check", format!("`{k}` is not a geometry check"))),
                        Err(m) => Err(config_error("--check", m)),
                    })
                    .collect::<Result<_, _>>()?
            };
            let extra = [("samples", &g.samples), ("c", &g.c), ("calibration_reps", &g.calibration_reps)];
            kinds
                .into_iter()
                .map(|k| g.common.resolve(k, &extra))
                .collect::<Result<_, _>>()?
        }
    })
}

/// 2 for configuration problems, 3 for numerical failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Config { .. }) => 2,
        Some(e) if e.is_numerical() => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<()> {
        let workers = worker_cap()?;
        for cfg in configs(&cli.command)? {
            run_one(&cfg, workers)?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
