//! Command-line workflows for the calibration toolkit: generate synthetic
//! logits, split them, fit a temperature with or without labels, apply a
//! temperature, and evaluate calibration quality.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 optimization error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tempcal::io::{read_logits_csv, split, write_atomic, write_logits_csv, write_probs_csv};
use tempcal::{
    evaluate, fit_ts, fit_uts, generate, tempered_softmax, CalibrationReport, Error, FitReport,
    OptimizerConfig, SynthConfig, Temperature,
};

#[derive(Parser)]
#[command(
    name = "tempcal",
    version,
    about = "Post-hoc confidence calibration for classifier logits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OptimizerArgs {
    /// Lower end of the temperature search bracket
    #[arg(long, default_value_t = 0.05)]
    t_min: f64,
    /// Upper end of the temperature search bracket
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
    /// Log-spaced grid points scanned before refinement
    #[arg(long, default_value_t = 200)]
    grid_points: usize,
    /// Absolute tolerance on the refined temperature
    #[arg(long, default_value_t = 1e-4)]
    refine_tol: f64,
    /// Cap on refinement iterations
    #[arg(long, default_value_t = 200)]
    max_refine_iters: usize,
}

impl From<&OptimizerArgs> for OptimizerConfig {
    fn from(a: &OptimizerArgs) -> Self {
        Self {
            t_min: a.t_min,
            t_max: a.t_max,
            grid_points: a.grid_points,
            refine_tol: a.refine_tol,
            max_refine_iters: a.max_refine_iters,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled synthetic logits CSV with a known ground-truth temperature
    Synth {
        /// Number of samples
        #[arg(long)]
        n: usize,
        /// Number of classes
        #[arg(long)]
        k: usize,
        /// Ground-truth temperature the logits are scaled by
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
        /// Standard deviation of the base logits
        #[arg(long, default_value_t = tempcal::synth::DEFAULT_LOGIT_SCALE)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a logits CSV into calibration and test parts by seeded shuffle
    Split {
        /// Input CSV path
        #[arg(long = "in")]
        input: PathBuf,
        /// Fraction of samples for the calibration part
        #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
        frac: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path for the calibration part
        #[arg(long)]
        out_calib: PathBuf,
        /// Output path for the test part
        #[arg(long)]
        out_test: PathBuf,
        /// Input carries a trailing integer label column
        #[arg(long)]
        labels: bool,
        /// Skip the first input line
        #[arg(long)]
        header: bool,
    },
    /// Fit a temperature on labelled logits by minimizing NLL
    FitTs {
        /// Input CSV path (must carry a trailing label column)
        #[arg(long = "in")]
        input: PathBuf,
        /// Output JSON path for the fit report
        #[arg(long)]
        out_json: PathBuf,
        /// Skip the first input line
        #[arg(long)]
        header: bool,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Fit a temperature without labels via per-class confidence subsets
    FitUts {
        /// Input CSV path
        #[arg(long = "in")]
        input: PathBuf,
        /// Output JSON path for the fit report
        #[arg(long)]
        out_json: PathBuf,
        /// Input carries a trailing label column (ignored by the fit)
        #[arg(long)]
        labels: bool,
        /// Skip the first input line
        #[arg(long)]
        header: bool,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Apply a temperature and write calibrated probabilities as CSV
    Apply {
        /// Input CSV path
        #[arg(long = "in")]
        input: PathBuf,
        /// Temperature to apply
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Output CSV path for the probabilities
        #[arg(long)]
        out: PathBuf,
        /// Input carries a trailing label column (dropped from the output)
        #[arg(long)]
        labels: bool,
        /// Skip the first input line
        #[arg(long)]
        header: bool,
    },
    /// Evaluate calibration of labelled logits at a fixed temperature
    Evaluate {
        /// Input CSV path (must carry a trailing label column)
        #[arg(long = "in")]
        input: PathBuf,
        /// Temperature to evaluate at
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Number of reliability bins
        #[arg(long, default_value_t = 15)]
        bins: usize,
        /// Output JSON path for the calibration report
        #[arg(long)]
        out_json: PathBuf,
        /// Skip the first input line
        #[arg(long)]
        header: bool,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::MissingLabels
        | Error::NonPositiveTemperature(_)
        | Error::InvalidFraction(_)
        | Error::InvalidConfig { .. } => 1,
        Error::ObjectiveNonFinite { .. } | Error::NoUsableSubsets => 3,
        _ => 2,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Synth {
            n,
            k,
            t0,
            sigma,
            seed,
            out,
        } => {
            let data = generate(&SynthConfig {
                n_samples: n,
                n_classes: k,
                true_temperature: t0,
                logit_scale: sigma,
                seed,
            })?;
            write_logits_csv(&out, &data)?;
            println!(
                "wrote {n} samples x {k} classes (t0 {t0}, sigma {sigma}, seed {seed}) to {}",
                out.display()
            );
        }
        Command::Split {
            input,
            frac,
            seed,
            out_calib,
            out_test,
            labels,
            header,
        } => {
            let data = read_logits_csv(&input, labels, header)?;
            let (calib, test) = split(&data, frac, seed)?;
            write_logits_csv(&out_calib, &calib)?;
            write_logits_csv(&out_test, &test)?;
            println!(
                "split {} samples into {} calibration / {} test (seed {seed})",
                data.n_samples(),
                calib.n_samples(),
                test.n_samples()
            );
        }
        Command::FitTs {
            input,
            out_json,
            header,
            optimizer,
        } => {
            let data = read_logits_csv(&input, true, header)?;
            let fit = fit_ts(&data, &OptimizerConfig::from(&optimizer))?;
            let report = FitReport::supervised(&fit);
            write_atomic(&out_json, report.to_json()?.as_bytes())?;
            print_fit(&fit.temperature, &fit.warnings, &out_json);
        }
        Command::FitUts {
            input,
            out_json,
            labels,
            header,
            optimizer,
        } => {
            let data = read_logits_csv(&input, labels, header)?;
            let fit = fit_uts(&data, &OptimizerConfig::from(&optimizer))?;
            let report = FitReport::unsupervised(&fit);
            write_atomic(&out_json, report.to_json()?.as_bytes())?;
            print_fit(&fit.temperature, &fit.warnings, &out_json);
        }
        Command::Apply {
            input,
            t,
            out,
            labels,
            header,
        } => {
            let temperature = Temperature::fixed(t)?;
            let data = read_logits_csv(&input, labels, header)?;
            let probs = tempered_softmax(&data, temperature.value)?;
            write_probs_csv(&out, &probs)?;
            println!(
                "wrote calibrated probabilities for {} samples at T = {t} to {}",
                data.n_samples(),
                out.display()
            );
        }
        Command::Evaluate {
            input,
            t,
            bins,
            out_json,
            header,
        } => {
            let temperature = Temperature::fixed(t)?;
            let data = read_logits_csv(&input, true, header)?;
            let report = evaluate(&data, &temperature, bins, Vec::new())?;
            write_atomic(&out_json, report.to_json()?.as_bytes())?;
            print_report(&report, &out_json);
        }
    }
    Ok(())
}

fn print_fit(t: &Temperature, warnings: &[String], out: &std::path::Path) {
    println!(
        "fitted T = {:.6} ({}, loss {:.6}, {} evaluations) -> {}",
        t.value,
        t.method,
        t.loss_at_optimum,
        t.evaluations,
        out.display()
    );
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn print_report(report: &CalibrationReport, out: &std::path::Path) {
    println!(
        "accuracy {:.4}  nll(mean) {:.6}  ece {:.6} ({:.4}%)  T = {} -> {}",
        report.accuracy,
        report.nll_mean,
        report.ece_fraction,
        report.ece_percent,
        report.temperature.value,
        out.display()
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version are successful outcomes, anything else is misuse
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
