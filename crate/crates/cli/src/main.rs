//! Command-line driver for the coupled fixed-point machinery.
//!
//! Subcommands mirror the library pipeline. `verify` runs the sampled
//! hypothesis checks on a configured system and reports the evidence;
//! `solve` gates a coupled solve on those same checks; `classify` answers
//! reducibility questions about sign patterns; `pbvs` discretizes and
//! solves a periodic boundary value problem end to end.
//!
//! Exit codes separate failure kinds: 2 for configuration problems, 3 for
//! refuted monotonicity or starting bounds, 4 for a run that stopped
//! without converging, and 5 for a failed contraction certification.

mod config;
mod log;
mod registry;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use mfix_core::applications::pbvs::{solve_pbvs, CoupledLowerUpperSolution, PbvsOptions};
use mfix_core::verify::BoundSide;
use mfix_core::{
    classify_reducibility, count_reducible, solve, verify_contraction, verify_coupled_bounds,
    ComparisonFunction, ContractionReport, CoupledBoundsReport, Error as CoreError,
    MonotoneSignature, PartiallyMonotoneSystem, ProductPoint, SolveConfig, SolveStatus,
};

use config::{BoundsSection, FileConfig};
use report::Report;

const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;
const EXIT_UNCERTIFIED: u8 = 5;

/// A failed run: the process exit code and the message printed to stderr.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn from_core(error: CoreError) -> Self {
        let code = match &error {
            CoreError::MonotonicityViolation { .. } | CoreError::BoundsNotSatisfied(_) => {
                EXIT_VALIDATION
            }
            CoreError::ContractionUncertified { .. } => EXIT_UNCERTIFIED,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            message: error.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mfix",
    version,
    about = "Coupled fixed-point solver for coordinate-wise monotone systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sampled hypothesis checks for a configured system.
    Verify(VerifyArgs),
    /// Solve a configured system after checking its hypotheses.
    Solve(SolveArgs),
    /// Classify sign patterns: a single signature, a census by order, or both.
    Classify(ClassifyArgs),
    /// Discretize and solve a periodic boundary value problem.
    Pbvs(PbvsArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem description in TOML.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the verification sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the verification seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report to this file as well as stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem description in TOML.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the verification sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the verification seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the iteration cap.
    #[arg(long = "max-iter", value_name = "N")]
    max_iter: Option<usize>,
    /// Write the report to this file as well as stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Census order: count reducible sign patterns among all of this order.
    #[arg(long, value_name = "ORDER")]
    count: Option<usize>,
    /// Signature literal such as "+-/-+" to classify.
    #[arg(long, value_name = "SIGNATURE")]
    signature: Option<String>,
    /// Write the report to this file as well as stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PbvsArgs {
    /// Problem description in TOML.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the verification sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the verification seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the iteration cap.
    #[arg(long = "max-iter", value_name = "N")]
    max_iter: Option<usize>,
    /// Write the report to this file as well as stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Solve(args) => run_solve(args),
        Command::Classify(args) => run_classify(args),
        Command::Pbvs(args) => run_pbvs(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("mfix: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn verification_settings(
    file: &FileConfig,
    samples: Option<usize>,
    seed: Option<u64>,
) -> (usize, u64) {
    let section = file.verify.as_ref();
    let samples = samples
        .or_else(|| section.and_then(|s| s.samples))
        .unwrap_or(200);
    let seed = seed.or_else(|| section.and_then(|s| s.seed)).unwrap_or(1);
    (samples, seed)
}

fn build_solve_config(
    file: &FileConfig,
    phi: &ComparisonFunction,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> Result<SolveConfig, Failure> {
    let section = file.solve.as_ref();
    let tolerance = tol
        .or_else(|| section.and_then(|s| s.tolerance))
        .unwrap_or(1e-10);
    let cap = max_iter
        .or_else(|| section.and_then(|s| s.max_iterations))
        .unwrap_or(500);
    let config = SolveConfig::new(tolerance, cap)
        .and_then(|c| c.with_phi(phi.clone()))
        .map_err(Failure::from_core)?;
    Ok(match section.and_then(|s| s.track_bracket) {
        Some(track) => config.with_bracket_tracking(track),
        None => config,
    })
}

fn witness_label(witness: &[i8]) -> String {
    witness
        .iter()
        .map(|&e| if e > 0 { '+' } else { '-' })
        .collect()
}

fn status_label(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIterationsReached => "max-iterations-reached",
        SolveStatus::Diverged => "diverged",
    }
}

fn side_label(side: BoundSide) -> &'static str {
    match side {
        BoundSide::Lower => "lower",
        BoundSide::Upper => "upper",
    }
}

fn contraction_lines(report: &mut Report, contraction: &ContractionReport) {
    report.line("certified", contraction.certified);
    report.float("max-ratio", contraction.max_ratio);
    report.line("violations", contraction.violations.len());
    for (k, v) in contraction.violations.iter().take(5).enumerate() {
        report.line(
            &format!("violation {k}"),
            format!(
                "sample {} operator {} lhs {} rhs {}",
                v.sample,
                v.operator,
                report::fmt(v.lhs),
                report::fmt(v.rhs)
            ),
        );
    }
}

fn bounds_lines(report: &mut Report, check: &CoupledBoundsReport) {
    report.line(
        "bounds",
        if check.satisfied {
            "admissible"
        } else {
            "refuted"
        },
    );
    report.line("bounds-failures", check.failures);
    if let Some(f) = check.first_failure {
        report.line(
            "bounds-first-failure",
            format!(
                "component {} entry {} side {} start {} image {}",
                f.component,
                f.entry,
                side_label(f.side),
                report::fmt(f.start),
                report::fmt(f.image)
            ),
        );
    }
}

fn bounds_failure(check: &CoupledBoundsReport) -> Failure {
    let detail = match check.first_failure {
        Some(f) => format!(
            "starting bounds refuted at {} entries, first at component {} entry {} on the {} side",
            check.failures,
            f.component,
            f.entry,
            side_label(f.side)
        ),
        None => "starting bounds refuted".into(),
    };
    Failure::from_core(CoreError::BoundsNotSatisfied(detail))
}

fn check_bounds_section(
    system: &PartiallyMonotoneSystem,
    section: &BoundsSection,
) -> Result<(CoupledBoundsReport, ProductPoint, ProductPoint), Failure> {
    let lower = ProductPoint::new(section.lower.clone()).map_err(Failure::from_core)?;
    let upper = ProductPoint::new(section.upper.clone()).map_err(Failure::from_core)?;
    let check = verify_coupled_bounds(system, &lower, &upper).map_err(Failure::from_core)?;
    Ok((check, lower, upper))
}

fn resolve_starts(
    file: &FileConfig,
    system: &PartiallyMonotoneSystem,
) -> Result<(ProductPoint, ProductPoint), Failure> {
    if let Some(section) = &file.bounds {
        let (check, lower, upper) = check_bounds_section(system, section)?;
        if !check.satisfied {
            return Err(bounds_failure(&check));
        }
        log::info("starting from the admissible coupled bounds");
        return Ok((lower, upper));
    }
    if let Some(start) = file.solve.as_ref().and_then(|s| s.start.clone()) {
        let point = ProductPoint::new(start).map_err(Failure::from_core)?;
        system.check_point(&point).map_err(Failure::from_core)?;
        return Ok((point.clone(), point));
    }
    let center = system.region().center();
    Ok((center.clone(), center))
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let file = config::load(&args.config)?;
    let section = file.system()?;
    let system = registry::build_system(section)?;
    let phi = registry::build_phi(file.phi.as_ref())?;
    let (samples, seed) = verification_settings(&file, args.samples, args.seed);

    log::info(format!(
        "checking declared directions on {samples} samples (seed {seed})"
    ));
    system.validate(samples, seed).map_err(Failure::from_core)?;
    log::info("certifying the contraction inequality");
    let contraction =
        verify_contraction(&system, &phi, samples, seed).map_err(Failure::from_core)?;
    let verdict = classify_reducibility(system.signature());
    let bounds_check = match &file.bounds {
        Some(section) => Some(check_bounds_section(&system, section)?.0),
        None => None,
    };

    let mut report = Report::new("verify");
    report.line("system", &section.kind);
    report.line("order", system.order());
    report.line("signature", system.signature());
    report.line("phi", registry::phi_label(&phi));
    report.line("samples", samples);
    report.line("seed", seed);
    report.line("monotonicity", "confirmed on all samples");
    contraction_lines(&mut report, &contraction);
    report.line("reducible", verdict.reducible);
    report.line(
        "witness",
        verdict
            .witness
            .as_deref()
            .map_or_else(|| "none".to_string(), witness_label),
    );
    if let Some(check) = &bounds_check {
        bounds_lines(&mut report, check);
    }
    report.line("caveat", contraction.caveat);
    report.emit(args.out.as_deref())?;

    if !contraction.certified {
        return Err(Failure {
            code: EXIT_UNCERTIFIED,
            message: format!(
                "contraction refuted on {} sampled pairs (max ratio {})",
                contraction.violations.len(),
                report::fmt(contraction.max_ratio)
            ),
        });
    }
    if let Some(check) = &bounds_check {
        if !check.satisfied {
            return Err(bounds_failure(check));
        }
    }
    Ok(())
}

fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let file = config::load(&args.config)?;
    let section = file.system()?;
    let system = registry::build_system(section)?;
    let phi = registry::build_phi(file.phi.as_ref())?;
    let (samples, seed) = verification_settings(&file, args.samples, args.seed);
    let solve_config = build_solve_config(&file, &phi, args.tol, args.max_iter)?;

    log::info(format!(
        "checking declared directions on {samples} samples (seed {seed})"
    ));
    system.validate(samples, seed).map_err(Failure::from_core)?;
    log::info("certifying the contraction inequality");
    let contraction =
        verify_contraction(&system, &phi, samples, seed).map_err(Failure::from_core)?;
    if !contraction.certified {
        return Err(Failure::from_core(CoreError::ContractionUncertified {
            violations: contraction.violations.len(),
            samples: contraction.samples,
            max_ratio: contraction.max_ratio,
        }));
    }

    let (start_u, start_v) = resolve_starts(&file, &system)?;
    log::info(format!(
        "iterating with tolerance {} and cap {}",
        report::fmt(solve_config.tolerance),
        solve_config.max_iterations
    ));
    let result =
        solve(Arc::clone(&system), start_u, start_v, &solve_config).map_err(Failure::from_core)?;
    if log::level() >= log::Level::Trace {
        for record in &result.history {
            log::trace(format!(
                "iteration {} residual {} gap {}",
                record.iteration,
                report::fmt(record.residual),
                report::fmt(record.gap)
            ));
        }
    }
    log::info(format!(
        "{} after {} iterations",
        status_label(result.status),
        result.iterations
    ));

    let mut report = Report::new("solve");
    report.line("system", &section.kind);
    report.line("order", system.order());
    report.line("signature", system.signature());
    report.line("phi", registry::phi_label(&phi));
    report.float("tolerance", solve_config.tolerance);
    report.line("max-iterations", solve_config.max_iterations);
    report.line("samples", samples);
    report.line("seed", seed);
    contraction_lines(&mut report, &contraction);
    report.line("status", status_label(result.status));
    report.line("iterations", result.iterations);
    report.float("residual", result.residual);
    report.float("gap", result.gap);
    report.float("defect", result.defect);
    report.line("bracket-valid", result.bracket_valid);
    for (i, component) in result.solution.components().iter().enumerate() {
        report.floats(&format!("solution {i}"), component);
    }
    report.emit(args.out.as_deref())?;

    if result.status != SolveStatus::Converged {
        return Err(Failure {
            code: EXIT_NO_CONVERGENCE,
            message: format!(
                "stopped after {} iterations with residual {}: {}",
                result.iterations,
                report::fmt(result.residual),
                status_label(result.status)
            ),
        });
    }
    Ok(())
}

fn run_classify(args: &ClassifyArgs) -> Result<(), Failure> {
    if args.count.is_none() && args.signature.is_none() {
        return Err(Failure::config("classify needs --signature and/or --count"));
    }
    let mut report = Report::new("classify");
    if let Some(text) = &args.signature {
        let signature: MonotoneSignature = text.parse().map_err(Failure::from_core)?;
        let verdict = classify_reducibility(&signature);
        report.line("signature", &signature);
        report.line("order", signature.order());
        report.line("reducible", verdict.reducible);
        report.line(
            "witness",
            verdict
                .witness
                .as_deref()
                .map_or_else(|| "none".to_string(), witness_label),
        );
    }
    if let Some(order) = args.count {
        log::info(format!("enumerating every sign pattern of order {order}"));
        let (total, reducible) = count_reducible(order).map_err(Failure::from_core)?;
        report.line("census-order", order);
        report.line("total", total);
        report.line("reducible-count", reducible);
        report.line("counts", format!("{total} {reducible}"));
    }
    report.emit(args.out.as_deref())
}

fn run_pbvs(args: &PbvsArgs) -> Result<(), Failure> {
    let file = config::load(&args.config)?;
    let section = file.pbvs()?;
    let phi = registry::build_phi(file.phi.as_ref())?;
    let problem = registry::build_pbvs(section, phi)?;
    let (samples, seed) = verification_settings(&file, args.samples, args.seed);
    let solve_config = build_solve_config(&file, problem.phi(), args.tol, args.max_iter)?;
    let options = PbvsOptions {
        verification_samples: samples,
        seed,
        ..PbvsOptions::default()
    };
    let bounds = match (section.lower, section.upper) {
        (Some(lo), Some(hi)) => Some(
            CoupledLowerUpperSolution::constant(problem.grid_size(), lo, hi)
                .map_err(Failure::from_core)?,
        ),
        (None, None) => None,
        _ => {
            return Err(Failure::config(
                "pbvs starting bounds need both lower and upper",
            ))
        }
    };

    log::info(format!(
        "discretizing on {} nodes and certifying on {samples} samples (seed {seed})",
        problem.grid_size()
    ));
    let solution = solve_pbvs(&problem, bounds.as_ref(), &options, &solve_config)
        .map_err(Failure::from_core)?;
    log::info(format!(
        "{} after {} iterations",
        status_label(solution.result.status),
        solution.result.iterations
    ));

    let mut report = Report::new("pbvs");
    report.line("rhs", &section.rhs);
    report.float("lambda", problem.lambda());
    report.float("period", problem.period());
    report.line("grid-size", problem.grid_size());
    report.line("phi", registry::phi_label(problem.phi()));
    report.float("tolerance", solve_config.tolerance);
    report.line("max-iterations", solve_config.max_iterations);
    report.line("samples", samples);
    report.line("seed", seed);
    contraction_lines(&mut report, &solution.certification);
    report.line("status", status_label(solution.result.status));
    report.line("iterations", solution.result.iterations);
    report.float("residual", solution.result.residual);
    report.float("defect", solution.defect);
    report.floats("times", &solution.times);
    report.floats("x", &solution.x);
    report.floats("y", &solution.y);
    report.floats("z", &solution.z);
    report.emit(args.out.as_deref())?;

    if solution.result.status != SolveStatus::Converged {
        return Err(Failure {
            code: EXIT_NO_CONVERGENCE,
            message: format!(
                "stopped after {} iterations with residual {}: {}",
                solution.result.iterations,
                report::fmt(solution.result.residual),
                status_label(solution.result.status)
            ),
        });
    }
    Ok(())
}
