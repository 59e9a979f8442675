//! `unimodal`: fit, benchmark and audit single-peak model families.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 fit failure,
//! 3 degraded benchmark table, 4 entropy audit failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use unimodal::bench::{cross_compare, render_csv, render_grid, BenchConfig};
use unimodal::data::{denormalize_fit, load_series, normalize, write_fit, DomainTransform};
use unimodal::entropy::{constraint_integrals, entropy_of, perturbation_audit, QuadratureSpec};
use unimodal::plot::render_plot;
use unimodal::{fit, mode, Error, FitConfig, FitResult, ModelKind, ShapeParams};

const EXIT_USAGE: u8 = 1;
const EXIT_FIT_FAILURE: u8 = 2;
const EXIT_DEGRADED: u8 = 3;
const EXIT_AUDIT_FAILURE: u8 = 4;

/// Points per fitted curve in plots.
const PLOT_GRID: usize = 201;

#[derive(Debug, Parser)]
#[command(name = "unimodal", version, about = "Fit single-peak time series with maximum entropy and reference models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one family, or all five, to a `time,value` file
    Fit(FitArgs),
    /// Cross-fit every family to synthetic series from every family
    Bench(BenchArgs),
    /// Check the entropy characterization of a MaxEnt or Beta shape
    Audit(AuditArgs),
    /// Describe the available model families
    ListModels,
}

#[derive(Debug, Clone, Copy)]
enum ModelChoice {
    All,
    One(ModelKind),
}

impl ModelChoice {
    fn kinds(self) -> Vec<ModelKind> {
        match self {
            ModelChoice::All => ModelKind::ALL.to_vec(),
            ModelChoice::One(k) => vec![k],
        }
    }
}

fn parse_model_choice(s: &str) -> Result<ModelChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ModelChoice::All);
    }
    s.parse().map(ModelChoice::One).map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Input file with `time,value` rows
    #[arg(long)]
    input: PathBuf,
    /// richards, skewnormal, gengamma, maxent, beta, or all
    #[arg(long, default_value = "all", value_parser = parse_model_choice)]
    model: ModelChoice,
    /// Write the fit document here (a directory of `<model>.json` files with --model all)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG plot of the data and fitted curves here
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Optimizer starts per family
    #[arg(long, default_value_t = 16)]
    starts: usize,
    /// Seed for the start design
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of the unit interval left empty at each end
    #[arg(long, default_value_t = 0.02)]
    padding: f64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Synthetic series per generator family
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Points per synthetic series
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Standard deviation of additive Gaussian noise
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Benchmark seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV table
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// maxent or beta
    #[arg(long)]
    model: ModelKind,
    /// First shape exponent
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Second shape exponent
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    /// Random constraint-preserving perturbations to try
    #[arg(long, default_value_t = 200)]
    perturbations: usize,
    /// Perturbation seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Fit(args) => run_fit(&args),
        Command::Bench(args) => run_bench(&args),
        Command::Audit(args) => run_audit(&args),
        Command::ListModels => list_models(),
    }
}

fn run_fit(args: &FitArgs) -> ExitCode {
    let raw = match load_series(&args.input) {
        Ok(raw) => raw,
        Err(e) => return usage_error(e),
    };
    let (series, transform) = match normalize(&raw, args.padding) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    let config = FitConfig {
        starts: args.starts,
        seed: args.seed,
        ..FitConfig::default()
    };

    let kinds = args.model.kinds();
    let mut fits: Vec<(ModelKind, FitResult)> = Vec::new();
    let mut failed = false;
    for kind in &kinds {
        match fit(&series, *kind, &config) {
            Ok(result) => {
                println!(
                    "{:<10}  rms={:.6e}  rms_units={:.6e}  converged={}",
                    kind.name(),
                    result.rms,
                    result.rms * transform.y_scale,
                    result.converged
                );
                fits.push((*kind, result));
            }
            Err(e @ Error::FitFailure { .. }) => {
                eprintln!("error: {e}");
                failed = true;
            }
            Err(e) => return usage_error(e),
        }
    }

    if let Some(out) = &args.out {
        if let Err(e) = write_documents(out, matches!(args.model, ModelChoice::All), &fits, &transform) {
            return usage_error(e);
        }
    }
    if let Some(plot) = &args.plot {
        let curves: Result<Vec<_>, _> = fits
            .iter()
            .map(|(k, r)| denormalize_fit(r, &transform, PLOT_GRID).map(|c| (*k, c)))
            .collect();
        if let Err(e) = curves.and_then(|c| render_plot(Some(&raw), &c, plot)) {
            return usage_error(e);
        }
    }
    if failed {
        ExitCode::from(EXIT_FIT_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_documents(
    out: &Path,
    as_directory: bool,
    fits: &[(ModelKind, FitResult)],
    transform: &DomainTransform,
) -> Result<(), Error> {
    if !as_directory {
        return match fits.first() {
            Some((_, result)) => write_fit(result, transform, out),
            None => Ok(()),
        };
    }
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    for (kind, result) in fits {
        write_fit(result, transform, out.join(format!("{}.json", kind.slug())))?;
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> ExitCode {
    let config = BenchConfig {
        trials_per_cell: args.trials,
        grid_size: args.grid,
        noise_sigma: args.noise,
        seed: args.seed,
        ..BenchConfig::default()
    };
    let table = match cross_compare(&config) {
        Ok(t) => t,
        Err(e) => return usage_error(e),
    };
    if let Err(source) = fs::write(&args.out, render_csv(&table)) {
        return usage_error(Error::Io {
            path: args.out.clone(),
            source,
        });
    }
    print!("{}", render_grid(&table));
    let ranking: Vec<&str> = table.generalization_ranking().iter().map(|k| k.name()).collect();
    println!("off-diagonal mean, best first: {}", ranking.join(", "));
    if table.is_degraded() {
        eprintln!("warning: more than half of the fits failed in at least one cell");
        return ExitCode::from(EXIT_DEGRADED);
    }
    ExitCode::SUCCESS
}

fn run_audit(args: &AuditArgs) -> ExitCode {
    if !matches!(args.model, ModelKind::MaxEnt | ModelKind::Beta) {
        return usage_error(Error::UnsupportedFamily(args.model));
    }
    let params = match ShapeParams::new(args.model, &[args.a, args.b]) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let quad = QuadratureSpec::default();
    let (entropy, constraints) = match (entropy_of(&params, &quad), constraint_integrals(&params, &quad)) {
        (Ok(h), Ok(c)) => (h, c),
        (Err(e), _) | (_, Err(e)) => return usage_error(e),
    };
    println!("model          {params}");
    println!("mode           {:.6}", mode(&params));
    println!("H              {entropy:.9}");
    println!("C1             {:.9}", constraints.mass);
    println!("C2             {:.9}", constraints.left);
    println!("C3             {:.9}", constraints.right);
    if !params.is_interior() {
        println!("perturbations  not audited (the shape does not vanish at both ends)");
        return ExitCode::SUCCESS;
    }
    match perturbation_audit(&params, &quad, args.perturbations, args.seed) {
        Ok(report) => {
            println!(
                "perturbations  trials={} failures={} skipped={} max_dH={:.3e}",
                report.perturbation_trials,
                report.perturbation_failures,
                report.perturbation_skipped,
                report.max_entropy_change
            );
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_AUDIT_FAILURE)
            }
        }
        Err(e) => usage_error(e),
    }
}

fn list_models() -> ExitCode {
    for kind in ModelKind::ALL {
        let (bounds, shape) = match kind {
            ModelKind::Richards => ("k > 0, nu > 0", "k e^(-k(x-t0)) (1 + nu e^(-k(x-t0)))^-(1+1/nu)"),
            ModelKind::Skewnormal => ("omega > 0", "phi(z) Phi(alpha z), z = (x-xi)/omega"),
            ModelKind::GenGamma => ("alpha > 0, d > 1, p > 0", "x^(d-1) exp(-(x/alpha)^p)"),
            ModelKind::MaxEnt => ("a > 0, b > 0", "exp(-a/x - b/(1-x))"),
            ModelKind::Beta => ("a >= 1, b >= 1", "x^(a-1) (1-x)^(b-1)"),
        };
        println!(
            "{:<10}  {:<12}  params: {:<16} bounds: {:<24} shape: {shape}",
            kind.name(),
            kind.slug(),
            kind.param_names().join(", "),
            bounds
        );
    }
    ExitCode::SUCCESS
}
