use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use hfb_cli::spec::parse_hamiltonian;
use hfb_cli::{certify_report, load_report, minimize_report, verify_report, MinimizeSettings};
use hfb_core::variational::Mode;

#[derive(Parser)]
#[command(name = "hfb", version, about = "Gaussian-state minimization of ladder-operator Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize a Hamiltonian over Gaussian states and write a report.
    Minimize {
        spec: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        /// Gradient tolerance; defaults to the file's `options.tol`, then 1e-8.
        #[arg(long)]
        tol: Option<f64>,
        /// Starting per-mode occupation cutoff for the Fock-space oracle;
        /// defaults to the file's `options.cutoff`, then 10.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-3)]
        fd_step: f64,
        /// Add the conjugate of every term whose conjugate is missing.
        #[arg(long)]
        hermitian_complete: bool,
        /// Output path; the report goes to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-run the oracle comparison for a report.
    Verify { report: PathBuf },
    /// Run the certification battery for a report.
    Certify {
        report: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        fd_step: f64,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Minimize {
            spec,
            mode,
            tol,
            cutoff,
            seed,
            max_iterations,
            fd_step,
            hermitian_complete,
            report,
        } => {
            let (parsed, h) = parse_hamiltonian(&spec, hermitian_complete)?;
            let defaults = MinimizeSettings::default();
            let settings = MinimizeSettings {
                mode,
                tol: tol.or(parsed.options.tol).unwrap_or(defaults.tol),
                cutoff: cutoff.or(parsed.options.cutoff).unwrap_or(defaults.cutoff),
                seed,
                max_iterations,
                fd_step,
            };
            let out = minimize_report(&parsed, &h, &settings);
            let json = out.to_json();
            match report {
                Some(path) => {
                    std::fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
                    match out.energy {
                        Some(e) => eprintln!("{}: {}, energy {e}", path.display(), out.status),
                        None => eprintln!("{}: {}", path.display(), out.status),
                    }
                }
                None => println!("{json}"),
            }
            Ok(out.status == "converged")
        }
        Command::Verify { report } => {
            let r = load_report(&report)?;
            let v = verify_report(&r)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(v.consistent)
        }
        Command::Certify { report, fd_step } => {
            let r = load_report(&report)?;
            let c = certify_report(&r, fd_step)?;
            println!("{}", serde_json::to_string_pretty(&c)?);
            Ok(c.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version land here too
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
