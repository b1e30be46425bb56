use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use revival::config::JobConfig;
use revival::eigensolve::{verify_design, Stencil};
use revival::evolve::UnitaryOptions;
use revival::pipeline::{wavefunction_csv, Job, RunMeta};
use revival::potential::SampledPotential;
use revival::spectra::{format_rational, RationalLevelSet};
use revival::Error;

#[derive(Parser)]
#[command(name = "revival", version, about = "Design potentials with prescribed rational spectra and study wave-packet revivals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a family's level set and its revival parameters.
    Levels(Common),
    /// Build the potential and write potential.csv, levels.txt and potential.json.
    Design(Common),
    /// Compare the eigenvalues of a potential with its target levels (report.csv).
    Verify(VerifyArgs),
    /// Evolve the configured packet to t_max (state.csv, coefficients.csv, autocorr.csv).
    Evolve(Common),
    /// Write the quantum carpet (carpet.pgm) and autocorrelation (autocorr.csv).
    Carpet(Common),
}

#[derive(Args)]
struct Common {
    /// Job description (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Verification tolerance in energy units.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Number of grid points (odd).
    #[arg(long)]
    grid_points: Option<usize>,
    /// Grid half-width L; the grid spans [−L, L].
    #[arg(long)]
    half_width: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Tabulated potential (`x,V` CSV) instead of designing from the config.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Target levels, one rational per line; overrides the config's family.
    #[arg(long)]
    levels: Option<PathBuf>,
    /// Finite-difference stencil when no config is given.
    #[arg(long, value_parser = ["three_point", "five_point"])]
    stencil: Option<String>,
}

enum Failure {
    Tolerance,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Levels(c) => levels(&c),
        Command::Design(c) => design(&c),
        Command::Verify(v) => verify(&v),
        Command::Evolve(c) => evolve(&c),
        Command::Carpet(c) => carpet(&c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance) => ExitCode::from(2),
        Err(Failure::Error(e)) => {
            let mut msg = format!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                msg.push_str(&format!("\n  caused by: {s}"));
                source = s.source();
            }
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn load_config(c: &Common) -> Result<JobConfig, Failure> {
    let path = c
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--config is required for this command".into()))?;
    let mut cfg = JobConfig::load(path)?;
    if let Some(t) = c.tolerance {
        cfg.tolerance = t;
    }
    if let Some(n) = c.grid_points {
        cfg.grid.n_points = Some(n);
    }
    if let Some(l) = c.half_width {
        cfg.grid.half_width = Some(l);
    }
    Ok(cfg)
}

fn load_job(c: &Common) -> Result<Job, Failure> {
    Ok(Job::from_config(&load_config(c)?)?)
}

fn out_dir(c: &Common, cfg: Option<&JobConfig>) -> Result<PathBuf, Failure> {
    let dir = c
        .out
        .clone()
        .or_else(|| cfg.and_then(|cfg| cfg.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn levels(c: &Common) -> Result<(), Failure> {
    let job = load_job(c)?;
    print!("{}", job.levels_text());
    let p = &job.revival;
    println!(
        "# a = {}, b = {}, T_rev = {} (2π × {})",
        format_rational(p.a),
        format_rational(p.b),
        p.t_rev(),
        format_rational(p.t_rev_over_two_pi())
    );
    Ok(())
}

fn design(c: &Common) -> Result<(), Failure> {
    let job = load_job(c)?;
    let dir = out_dir(c, Some(&job.config))?;
    info!("adding {} levels on a {}-point grid", job.to_add.len(), job.grid.len());
    let v = job.design()?;
    std::fs::write(dir.join("potential.csv"), v.to_csv())?;
    std::fs::write(dir.join("levels.txt"), job.levels_text())?;
    let mut meta = RunMeta::new(&job);
    meta.potential = Some(v.metadata());
    meta.write(&dir.join("potential.json"))?;
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let c = &args.common;
    let job = match &c.config {
        Some(_) => Some(load_job(c)?),
        None => None,
    };
    let dir = out_dir(c, job.as_ref().map(|j| &j.config))?;
    let target = match (&args.levels, &job) {
        (Some(path), _) => RationalLevelSet::parse_text(&std::fs::read_to_string(path)?)?,
        (None, Some(job)) => job.target.clone(),
        (None, None) => {
            return Err(Error::InvalidArgument("give --config or --levels".into()).into())
        }
    };
    let potential = match (&args.potential, &job) {
        (Some(path), _) => SampledPotential::read(path)?,
        (None, Some(job)) => job.design()?,
        (None, None) => {
            return Err(Error::InvalidArgument("give --config or --potential".into()).into())
        }
    };
    let tolerance = c
        .tolerance
        .or(job.as_ref().map(|j| j.config.tolerance))
        .unwrap_or(revival::eigensolve::DEFAULT_TOLERANCE);
    let stencil = match (args.stencil.as_deref(), &job) {
        (Some("three_point"), _) => Stencil::ThreePoint,
        (Some(_), _) => Stencil::FivePoint,
        (None, Some(job)) => job.stencil,
        (None, None) => Stencil::default(),
    };
    let report = verify_design(&potential, &target, tolerance, stencil)?;
    std::fs::write(dir.join("report.csv"), report.to_csv())?;
    println!(
        "max |error| = {:e} over {} levels (tolerance {:e}): {}",
        report.max_error,
        report.entries.len(),
        tolerance,
        if report.passed { "PASS" } else { "FAIL" }
    );
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Tolerance)
    }
}

fn evolve(c: &Common) -> Result<(), Failure> {
    let job = load_job(c)?;
    let dir = out_dir(c, Some(&job.config))?;
    let v = job.design()?;
    let evo = job.evolve(&v)?;
    let t_max = job.t_max();
    let rows = job.config.evolution.rows.max(2);
    let final_state = evo.state_at(t_max)?;
    std::fs::write(dir.join("state.csv"), wavefunction_csv(&final_state))?;
    std::fs::write(dir.join("coefficients.csv"), evo.coefficients_csv())?;
    let carpet = evo.carpet(t_max, rows)?;
    std::fs::write(dir.join("autocorr.csv"), carpet.autocorrelation_csv())?;
    let mut meta = RunMeta::new(&job);
    meta.residual_norm = Some(evo.discarded_residual);
    meta.t_max = Some(t_max);
    let steps = job.config.evolution.unitary_steps;
    if steps > 0 {
        let opts = UnitaryOptions { stencil: job.stencil, scheme: job.config.evolution.scheme, reference_energy: None };
        let unitary = evo.unitary_state_at(&v, t_max, steps, &opts)?;
        std::fs::write(dir.join("state_unitary.csv"), wavefunction_csv(&unitary))?;
        meta.unitary_distance = Some(unitary.distance(&final_state)?);
    }
    meta.write(&dir.join("evolve.json"))?;
    report_endpoint(&carpet.autocorrelation);
    Ok(())
}

fn carpet(c: &Common) -> Result<(), Failure> {
    let job = load_job(c)?;
    let dir = out_dir(c, Some(&job.config))?;
    let v = job.design()?;
    let evo = job.evolve(&v)?;
    let t_max = job.t_max();
    let carpet = evo.carpet(t_max, job.config.evolution.rows.max(2))?;
    carpet.write(&dir.join("carpet.pgm"), &dir.join("autocorr.csv"))?;
    let mut meta = RunMeta::new(&job);
    meta.residual_norm = Some(evo.discarded_residual);
    meta.t_max = Some(t_max);
    meta.write(&dir.join("carpet.json"))?;
    report_endpoint(&carpet.autocorrelation);
    Ok(())
}

fn report_endpoint(a: &[num_complex::Complex64]) {
    if let Some(last) = a.last() {
        println!("|A(t_max)| = {:.12}", last.norm());
    }
}
