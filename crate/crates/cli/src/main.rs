mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncqm_core::report::Figure;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "ncqm", version, about = "Spectra and self-consistent states with noncommuting two-particle coordinates and momenta")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file overriding physical constants.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Experimental dataset (z,quantity,value_ev,source) replacing the bundled one.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground-state energies against experiment.
    Table1(OmegaArg),
    /// 1s-2s gaps against experiment.
    Table2(OmegaArg),
    /// Tabulated figure data.
    Fig {
        /// fig1, fig2, fig3 or fig4.
        figure: Figure,
        /// Number of samples.
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        #[command(flatten)]
        omega: OmegaArg,
    },
    /// Self-consistent ground state in a central potential.
    Solve(SolveArgs),
    /// Calibrate Ω for a mass ratio μ/M.
    Calibrate {
        /// μ/M in [0, 1/4]; fractions such as 1/4 are accepted.
        #[arg(long, value_parser = parse_number)]
        ratio: f64,
    },
    /// Centre-of-mass decoupling for random N-body systems.
    NbodyCheck {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
    },
    /// Operator-identity and decoupling suites.
    Selftest,
}

#[derive(Debug, Args)]
struct OmegaArg {
    /// Calibration constant Ω; fractions such as 32/729 are parsed exactly.
    #[arg(long, value_parser = parse_number, default_value = "32/729")]
    omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PotentialKind {
    Coulomb,
    Yukawa,
    Hulthen,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    potential: PotentialKind,
    /// Nuclear charge; the coupling becomes αZ.
    #[arg(long = "Z", value_name = "Z", conflicts_with = "coupling", required_unless_present = "coupling")]
    z: Option<f64>,
    /// Dimensionless coupling g of −g/r at the origin.
    #[arg(long, value_parser = parse_number)]
    coupling: Option<f64>,
    /// Screening length in units of ħ/μc.
    #[arg(long, value_parser = parse_number)]
    screening: Option<f64>,
    /// Mass of particle 1: eV, a particle name, or inf.
    #[arg(long, default_value = "inf")]
    m1: String,
    /// Mass of particle 2: eV, a particle name, or inf.
    #[arg(long, default_value = "electron")]
    m2: String,
    /// Ω; defaults to the calibrated value for the mass ratio.
    #[arg(long, value_parser = parse_number)]
    omega: Option<f64>,
}

/// A decimal number or an exact ratio `p/q`.
fn parse_number(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("invalid numerator in '{s}'"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("invalid denominator in '{s}'"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            p / q
        }
        None => s.trim().parse().map_err(|_| format!("invalid number '{s}'"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    commands::run(cli)
}
