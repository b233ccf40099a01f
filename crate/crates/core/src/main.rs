use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rarewave::energy::{gronwall_verify, GronwallInstance};
use rarewave::gas::PolytropicGas;
use rarewave::harness::{emit_plots, parse_config, parse_study, run_study, StudyKind, StudyReport, StudySpec};
use rarewave::riemann::{solve_riemann, RiemannProblem1D, State1D};
use rarewave::Error;

/// Rarefaction-wave laboratory: runs, studies and exact 1D oracles.
///
/// Exit codes: 0 all checks pass, 1 analysis failure, 2 configuration error.
#[derive(Parser)]
#[command(name = "rarewave", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute one run and its analyses.
    Run { config: PathBuf },
    /// Execute a ladder of runs and compare them.
    Study { spec: PathBuf, config: PathBuf },
    /// Solve a 1D Riemann problem and print the wave fan as JSON.
    Riemann1d {
        /// Left state as `v,c`.
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        /// Right state as `v,c`.
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.5)]
        k0: f64,
    },
    /// Check a Gronwall instance given as JSON.
    VerifyGronwall { instance: PathBuf },
}

enum Failure {
    Analysis(String),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() || matches!(e, Error::Domain(_)) {
            Failure::Config(e.to_string())
        } else {
            Failure::Analysis(e.to_string())
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn state(s: &str) -> Result<State1D, Failure> {
    let parts: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| Failure::Config(format!("cannot parse state '{s}'")))?;
    match parts[..] {
        [v, c] => Ok(State1D::new(v, c)),
        _ => Err(Failure::Config(format!("state '{s}' must be v,c"))),
    }
}

fn summarize(report: &StudyReport) -> Result<(), Failure> {
    for r in &report.runs {
        let note = if r.reused { " (reused)" } else { "" };
        match &r.error {
            Some(e) => println!("run {}: failed: {e}", r.label),
            None => println!("run {}: complete{note} in {}", r.label, r.dir.display()),
        }
    }
    for c in &report.checks {
        println!("{} {} = {:.4e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value);
    }
    for f in &report.fits {
        println!("fit {}: slope {:.3}, R^2 {:.3}", f.name, f.slope, f.r2);
    }
    let files = emit_plots(report)?;
    println!("{} plot data files written", files.len());
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Analysis("some checks failed".into()))
    }
}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Run { config } => {
            let cfg = parse_config(&read(&config)?)?;
            let spec = StudySpec { kind: StudyKind::Single, ladder: vec![], workers: 1 };
            summarize(&run_study(&spec, &cfg)?)
        }
        Cmd::Study { spec, config } => {
            let spec = parse_study(&read(&spec)?)?;
            let cfg = parse_config(&read(&config)?)?;
            summarize(&run_study(&spec, &cfg)?)
        }
        Cmd::Riemann1d { left, right, gamma, k0 } => {
            let gas = PolytropicGas::new(gamma, k0)?;
            let fan = solve_riemann(RiemannProblem1D { gas, left: state(&left)?, right: state(&right)? })?;
            println!("{}", serde_json::to_string_pretty(&fan).map_err(Error::from)?);
            Ok(())
        }
        Cmd::VerifyGronwall { instance } => {
            let inst: GronwallInstance =
                serde_json::from_str(&read(&instance)?).map_err(|e| Failure::Config(format!("bad instance: {e}")))?;
            match gronwall_verify(&inst) {
                Ok(v) => {
                    println!("{}", serde_json::to_string_pretty(&v).map_err(Error::from)?);
                    if v.pass {
                        Ok(())
                    } else {
                        Err(Failure::Analysis(format!("conclusion fails: ratio {}", v.max_ratio)))
                    }
                }
                Err(e @ Error::Hypothesis { .. }) => Err(Failure::Analysis(e.to_string())),
                Err(e) => Err(Failure::Config(e.to_string())),
            }
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Analysis(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
