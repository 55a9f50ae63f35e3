//! Command-line front-end.
//!
//! Exit codes: 0 ok, 1 property failure, 2 input error, 3 the commuting
//! hypothesis is violated, 4 numerical blow-up.

mod check;
mod system_file;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use check::{run_checks, Outcome, PropertyReport};
pub use system_file::{array, num, NormalFormDoc, SystemFile, DEFAULT_DT, DEFAULT_T, DEFAULT_U0};

use crate::integrate::{simulate, IntegrateError, Trajectory};
use crate::linalg3::Vec3;
use crate::normalform::{normal_form, NormalFormError, DEFAULT_TOL};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("property check failed: {0}")]
    PropertyFailure(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("numerical blow-up: non-finite state at step {step}")]
    Blowup { step: usize },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::PropertyFailure(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Blowup { .. } => 4,
        }
    }
}

impl From<NormalFormError> for CliError {
    fn from(e: NormalFormError) -> Self {
        match e {
            NormalFormError::NotCommuting { .. } => CliError::Hypothesis(e.to_string()),
            NormalFormError::Linalg(inner) => CliError::Input(inner.to_string()),
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::NonFinite { step } => CliError::Blowup { step },
            IntegrateError::InvalidStep(msg) => CliError::Input(format!(
                "{msg}\nusage: quadham simulate <FILE> --u0 x,y,z --dt D --T T --out path.csv"
            )),
            IntegrateError::NormalForm(inner) => inner.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "quadham",
    version,
    about = "Quadratic Hamiltonian systems u' = (Ku+k) x (Au+a)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the orthogonal normal form of a commuting-pair system.
    NormalForm {
        file: PathBuf,
        /// Relative commutativity tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Integrate the system with fixed-step RK4 and write a CSV trajectory.
    Simulate {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        u0: Option<Vec<f64>>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "T")]
        t_end: Option<f64>,
        /// CSV destination; omit to print only the drift summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the pointwise invariant suite on random samples.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Print the structure matrix Π(u) with Π_ij = {x_i, x_j}.
    Bracket {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        at: Vec<f64>,
    },
}

fn parse_point(name: &str, values: &[f64]) -> Result<Vec3, CliError> {
    Vec3::checked(values)
        .map_err(|_| CliError::Input(format!("--{name}: expected three finite numbers x,y,z")))
}

/// Executes one command, writing its normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::NormalForm { file, tol } => {
            let sys = SystemFile::load(&file)?.system()?;
            let nf = normal_form(&sys, tol)?;
            out.write_all(NormalFormDoc::render(&nf).as_bytes())?;
        }
        Command::Simulate {
            file,
            u0,
            dt,
            t_end,
            out: csv_path,
        } => {
            let doc = SystemFile::load(&file)?;
            let sys = doc.system()?;
            let u0 = match u0 {
                Some(v) => parse_point("u0", &v)?,
                None => doc.u0(),
            };
            let traj = simulate(
                &sys,
                u0,
                dt.unwrap_or(doc.dt()),
                t_end.unwrap_or(doc.t_end()),
            )?;
            if let Some(path) = csv_path {
                write_csv(&traj, std::fs::File::create(&path)?)?;
            }
            writeln!(out, "driftH={:e} driftC={:e}", traj.drift_h, traj.drift_c)?;
        }
        Command::Check {
            file,
            samples,
            seed,
            tol,
        } => {
            let sys = SystemFile::load(&file)?.system()?;
            let reports = run_checks(&sys, samples, seed, tol);
            for r in &reports {
                writeln!(out, "{}", r.line())?;
            }
            let failed: Vec<&str> = reports
                .iter()
                .filter(|r| !r.passed())
                .map(|r| r.name)
                .collect();
            if !failed.is_empty() {
                return Err(CliError::PropertyFailure(failed.join(", ")));
            }
        }
        Command::Bracket { file, at } => {
            let sys = SystemFile::load(&file)?.system()?;
            let u = parse_point("at", &at)?;
            let pi = sys.structure_matrix(u);
            let rows: Vec<String> = pi.0.iter().map(|row| array(row)).collect();
            writeln!(out, "Pi = [\n  {},\n]", rows.join(",\n  "))?;
        }
    }
    Ok(())
}

/// Writes `t,x1,x2,x3,H,C` rows with 17 significant digits.
pub fn write_csv(traj: &Trajectory, sink: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["t", "x1", "x2", "x3", "H", "C"])
        .map_err(csv_err)?;
    for i in 0..traj.len() {
        let u = traj.states[i];
        let row = [
            traj.times[i],
            u[0],
            u[1],
            u[2],
            traj.hamiltonian[i],
            traj.casimir[i],
        ];
        w.write_record(row.map(num)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
