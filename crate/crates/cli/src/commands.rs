//! Subcommand bodies shared by the binary and the integration tests.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Diagnostic, ScenarioConfig};
use crate::output::{self, write_atomic};
use crate::pipeline::{self, SolverFailure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Validate,
    Spectrum,
    Scaling,
    Convergence,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub quiet: bool,
}

#[derive(Debug)]
pub enum Failure {
    Config { path: PathBuf, diagnostics: Vec<Diagnostic> },
    Solver(SolverFailure),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config { .. } => 2,
            Failure::Solver(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config { path, diagnostics } => {
                for (i, d) in diagnostics.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    match d.line {
                        Some(l) => write!(f, "{}:{l}: {}", path.display(), d.message)?,
                        None => write!(f, "{}: {}", path.display(), d.message)?,
                    }
                }
                Ok(())
            }
            Failure::Solver(s) => {
                write!(f, "solver error: {}", s.error)?;
                if let Some(c) = s.condition {
                    write!(f, "\nconditioning: estimated condition number {c:.3e}")?;
                }
                Ok(())
            }
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<SolverFailure> for Failure {
    fn from(s: SolverFailure) -> Self {
        Failure::Solver(s)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

pub fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    ScenarioConfig::load(path)
        .map(|(c, _)| c)
        .map_err(|diagnostics| Failure::Config { path: path.to_path_buf(), diagnostics })
}

fn say(opts: &Options, msg: impl fmt::Display) {
    if !opts.quiet {
        eprintln!("{msg}");
    }
}

pub fn execute(cmd: Command, opts: &Options) -> Result<(), Failure> {
    let config = load(&opts.config)?;
    match cmd {
        Command::Validate => {
            say(opts, format_args!("{}: ok", opts.config.display()));
            Ok(())
        }
        Command::Run => run(&config, opts),
        Command::Spectrum => {
            let values = pipeline::spectrum(&config, opts.seed)?;
            let path = opts.out.join(&config.output.spectrum);
            write_atomic(&path, &output::spectrum_csv(&values)?)?;
            say(opts, format_args!("wrote {} singular values to {}", values.len(), path.display()));
            Ok(())
        }
        Command::Scaling => scaling(&config, opts),
        Command::Convergence => convergence(&config, opts),
    }
}

fn run(config: &ScenarioConfig, opts: &Options) -> Result<(), Failure> {
    let result = pipeline::run(config, opts.seed)?;
    let out = &opts.out;
    write_atomic(&out.join(&config.output.field), &output::field_csv(&result.field)?)?;
    write_atomic(&out.join(&config.output.spectrum), &output::spectrum_csv(&result.spectrum)?)?;
    if let Some(h) = &config.output.heatmap {
        write_atomic(&out.join(h), &output::pgm(&result.field))?;
    }
    if let (Some(c), Some(contour)) = (&config.output.contour, &result.contour) {
        write_atomic(&out.join(c), &output::contour_csv(contour)?)?;
    }
    write_atomic(&out.join(&config.output.metadata), &output::metadata(&result.report)?)?;

    let name = if config.scenario.name.is_empty() { "scenario" } else { config.scenario.name.as_str() };
    if let Some(rank) = result.report.rank {
        say(opts, format_args!("{name}: rank {rank}"));
    }
    for p in &result.report.peaks {
        say(opts, format_args!("peak ({:.4}, {:.4})  W = {:.4e}", p.x, p.y, p.value));
    }
    if let Some(c) = &result.report.contour {
        say(
            opts,
            format_args!(
                "{name}: contour W = {} with {} segments, centroid ({:.4}, {:.4}), mean radius {:.4}",
                c.level, c.segments, c.centroid[0], c.centroid[1], c.mean_radius
            ),
        );
    }
    say(opts, format_args!("outputs in {}", out.display()));
    Ok(())
}

#[derive(Serialize)]
struct ScalingCsvRow {
    scale: f64,
    born: f64,
    full_minus_born: f64,
    full_minus_asymptotic: f64,
}

fn scaling(config: &ScenarioConfig, opts: &Options) -> Result<(), Failure> {
    let rows = pipeline::scaling(config)?;
    let spec = config.scaling.as_ref().expect("validated");
    let csv = output::rows_csv(rows.iter().map(|r| ScalingCsvRow {
        scale: r.scale,
        born: r.born,
        full_minus_born: r.full_minus_born,
        full_minus_asymptotic: r.full_minus_asymptotic,
    }))?;
    write_atomic(&opts.out.join(&spec.output), &csv)?;
    let scales: Vec<f64> = rows.iter().map(|r| r.scale).collect();
    let slope = |f: fn(&robin_eit_core::bie::ScalingRow) -> f64| {
        pipeline::log_log_slope(&scales, &rows.iter().map(f).collect::<Vec<_>>())
    };
    say(
        opts,
        format_args!(
            "log-log slopes: born {:.4}, full - born {:.4}, full - asymptotic {:.4}",
            slope(|r| r.born),
            slope(|r| r.full_minus_born),
            slope(|r| r.full_minus_asymptotic)
        ),
    );
    Ok(())
}

#[derive(Serialize)]
struct ConvergenceCsvRow {
    order: usize,
    error: f64,
    bound: f64,
    ratio: f64,
}

fn convergence(config: &ScenarioConfig, opts: &Options) -> Result<(), Failure> {
    let rows = pipeline::convergence(config)?;
    let spec = config.convergence.as_ref().expect("validated");
    let csv = output::rows_csv(rows.iter().map(|r| ConvergenceCsvRow {
        order: r.order,
        error: r.error,
        bound: r.bound,
        ratio: r.ratio(),
    }))?;
    write_atomic(&opts.out.join(&spec.output), &csv)?;
    for r in &rows {
        say(opts, format_args!("N = {:>2}: error {:.3e}, bound {:.3e}, ratio {:.3}", r.order, r.error, r.bound, r.ratio()));
    }
    Ok(())
}
