use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use zeta_moments::correlation::{ShiftedCorrelation, SignalComponent, DEFAULT_CORR_TOL, DEFAULT_RHO_STEP, DEFAULT_SEGMENT};
use zeta_moments::harness::{
    self, cache_warm, load_config, periodicity_report, suite::acceptance_suite, CacheGrid, CacheOrigin,
    ExperimentConfig, HarnessError,
};
use zeta_moments::oracles::PredictionKind;
use zeta_moments::zeta;

/// Moment integrals of the Riemann zeta function: traces, verification,
/// periodicity and shifted-segment correlation.
#[derive(Parser)]
#[command(name = "zmoments", version)]
struct Cli {
    /// Experiment config file (defaults to the built-in suite).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Panel tolerance for traces, integral tolerance for correlations.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate ζ (or a derivative) at σ + it.
    Zeta {
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Derivative order (0, 1 or 2).
        #[arg(long, default_value_t = 0)]
        derivative: u32,
    },
    /// Run one experiment and write its trace as CSV.
    Trace {
        /// Experiment id from the config (or the built-in suite).
        id: String,
    },
    /// Run a suite and print the summary table; exits nonzero on any mismatch.
    Verify {
        /// Only run these experiment ids.
        #[arg(long = "only")]
        only: Vec<String>,
    },
    /// Crossings, closest approaches and period of an experiment's trace.
    Periodicity {
        #[arg(default_value = "sighalf-s0.5-r2.1")]
        id: String,
    },
    /// Shifted-segment correlation at one ρ.
    Correlate {
        #[command(flatten)]
        segment: SegmentArgs,
        #[arg(long)]
        rho: f64,
    },
    /// Correlation over a grid of ρ with peak detection.
    RhoScan {
        #[command(flatten)]
        segment: SegmentArgs,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = DEFAULT_RHO_STEP)]
        step: f64,
    },
    /// Zeta sample cache management.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Compute (or load, if compatible) a grid of ζ(σ + it) samples.
    Warm {
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        path: PathBuf,
    },
}

#[derive(Args)]
struct SegmentArgs {
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// abs, abs_sq, re or im.
    #[arg(long, default_value = "abs")]
    component: SignalComponent,
    #[arg(long, default_value_t = 0.0)]
    l1: f64,
    #[arg(long, default_value_t = DEFAULT_SEGMENT)]
    seg_len: f64,
    /// Interpolate from this cache file (must be at the same σ).
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn suite(cli: &Cli) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let mut suite = match &cli.config {
        Some(path) => load_config(path)?,
        None => acceptance_suite(),
    };
    if let Some(tol) = cli.tol {
        for cfg in &mut suite {
            cfg.panel_tol = tol;
        }
    }
    Ok(suite)
}

fn find(cli: &Cli, id: &str) -> Result<ExperimentConfig, HarnessError> {
    suite(cli)?.into_iter().find(|c| c.experiment_id == id).ok_or_else(|| {
        io::Error::new(io::ErrorKind::NotFound, format!("no experiment `{id}` in the suite")).into()
    })
}

fn out_file(cli: &Cli, name: &str) -> Result<Option<PathBuf>, HarnessError> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(Some(dir.join(name)))
        }
        None => Ok(None),
    }
}

fn load_cache(path: &Option<PathBuf>) -> Result<Option<CacheGrid>, HarnessError> {
    path.as_deref().map(|p| CacheGrid::load(p).map_err(Into::into)).transpose()
}

fn run(cli: &Cli) -> Result<ExitCode, HarnessError> {
    match &cli.command {
        Command::Zeta { sigma, t, derivative } => {
            let s = Complex64::new(*sigma, *t);
            let z = match derivative {
                0 => zeta::zeta(s)?,
                m => zeta::zeta_derivative(s, *m)?,
            };
            println!("{:.16e} {:+.16e}i", z.re, z.im);
        }
        Command::Trace { id } => {
            let cfg = find(cli, id)?;
            let outcome = harness::run_experiment(&cfg)?;
            let name = cfg.output_path.clone().unwrap_or_else(|| format!("{id}.csv"));
            match out_file(cli, &name)? {
                Some(path) => {
                    harness::write_trace_csv(&outcome.trace, io::BufWriter::new(fs::File::create(&path)?))?;
                    eprintln!("wrote {}", path.display());
                }
                None => harness::write_trace_csv(&outcome.trace, io::stdout().lock())?,
            }
            eprintln!(
                "{id}: final mean {:.6}, {:?}, verdict {} ({})",
                outcome.trace.final_mean(),
                outcome.classification.verdict,
                outcome.verdict,
                outcome.note
            );
        }
        Command::Verify { only } => {
            let mut suite = suite(cli)?;
            if !only.is_empty() {
                suite.retain(|c| only.contains(&c.experiment_id));
            }
            let table = harness::verify_with(&suite, |cfg, result| {
                let status = match result {
                    Ok(o) => o.verdict.to_string(),
                    Err(_) => "Error".into(),
                };
                eprintln!("  {} ... {status}", cfg.experiment_id);
            });
            println!("{table}");
            if let Some(path) = out_file(cli, "verify.txt")? {
                fs::write(&path, format!("{table}\n"))?;
            }
            return Ok(if table.success() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Periodicity { id } => {
            let cfg = find(cli, id)?;
            let prediction = harness::resolve_prediction(&cfg)?;
            let asymptote = match prediction.kind {
                PredictionKind::Finite(v) => v,
                PredictionKind::Indeterminate { candidate: Some(c) } => c,
                _ => {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidInput,
                        format!("`{id}` has no finite asymptote to cross"),
                    )
                    .into())
                }
            };
            let trace = harness::compute_trace(&cfg)?;
            print!("{}", periodicity_report(&trace, asymptote, cfg.integrand.r));
        }
        Command::Correlate { segment, rho } => {
            let grid = load_cache(&segment.cache)?;
            let setup = correlation_setup(cli, segment, grid.as_ref())?;
            let r = setup.at(segment.l1, segment.seg_len, *rho)?;
            println!("rho,cor,cov,var_f,var_g,e_f,e_g");
            println!("{},{},{},{},{},{},{}", r.rho, r.cor, r.cov, r.var_f, r.var_g, r.e_f, r.e_g);
        }
        Command::RhoScan { segment, from, to, step } => {
            let grid = load_cache(&segment.cache)?;
            let setup = correlation_setup(cli, segment, grid.as_ref())?;
            let scan = setup.scan(segment.l1, segment.seg_len, *from, *to, *step)?;
            let name = format!("rho-scan-s{}-{}-l{}.csv", segment.sigma, segment.component, segment.l1);
            match out_file(cli, &name)? {
                Some(path) => {
                    harness::write_scan_csv(&scan, io::BufWriter::new(fs::File::create(&path)?))?;
                    eprintln!("wrote {}", path.display());
                }
                None => harness::write_scan_csv(&scan, io::stdout().lock())?,
            }
            let mut err = io::stderr().lock();
            writeln!(err, "local maxima:")?;
            for p in &scan.local_maxima {
                let mark = if scan.peaks.contains(p) { "  (> 0.5)" } else { "" };
                writeln!(err, "  rho = {:9.4}  cor = {:.4}{mark}", p.rho, p.cor)?;
            }
        }
        Command::Cache { action: CacheAction::Warm { sigma, t0, dt, count, path } } => {
            let (grid, origin) = cache_warm(*sigma, *t0, *dt, *count, path)?;
            let how = match origin {
                CacheOrigin::Loaded => "loaded",
                CacheOrigin::Computed => "computed",
            };
            println!("{how} {} samples at σ = {} on [{}, {}]: {}", grid.count, grid.sigma, grid.t_start, grid.t_end(), path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn correlation_setup<'a>(
    cli: &Cli,
    segment: &SegmentArgs,
    grid: Option<&'a CacheGrid>,
) -> Result<ShiftedCorrelation<'a>, HarnessError> {
    let mut setup = ShiftedCorrelation::new(segment.sigma, segment.component).with_tol(cli.tol.unwrap_or(DEFAULT_CORR_TOL));
    if let Some(g) = grid {
        setup = setup.with_cache(g)?;
    }
    Ok(setup)
}
