//! Library side of the `hfb` command-line tool: Hamiltonian files, reports
//! and the three subcommands.

pub mod report;
pub mod spec;

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use hfb_core::fock_oracle::DEFAULT_DIM_CAP;
use hfb_core::variational::{
    certify, minimize, oracle_compare, CertifyOptions, MinimizationResult, Mode, Options, Status,
};
use hfb_core::wick_poly::WickPolynomial;
use serde::Serialize;

use report::{matrix_rows, CertificationReport, MapReport, OracleReport, Report, TraceSummary};
use spec::HamiltonianSpec;

/// Tail weight accepted for oracle state vectors.
pub const ORACLE_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}:{line}:{column}: {message}")]
    Malformed {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("Hamiltonian is not Hermitian (defect {defect:.3e}); pass --hermitian-complete to add conjugate terms")]
    NotHermitian { defect: f64 },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] hfb_core::Error),
}

#[derive(Debug, Clone)]
pub struct MinimizeSettings {
    pub mode: Mode,
    pub tol: f64,
    pub cutoff: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub fd_step: f64,
}

impl Default for MinimizeSettings {
    fn default() -> Self {
        MinimizeSettings {
            mode: Mode::BoseEven,
            tol: 1e-8,
            cutoff: hfb_core::fock_oracle::DEFAULT_CUTOFF,
            seed: 42,
            max_iterations: 5000,
            fd_step: 1e-3,
        }
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn empty_report(spec: &HamiltonianSpec, settings: &MinimizeSettings) -> Report {
    Report {
        status: String::new(),
        error: None,
        energy: None,
        d: None,
        d_spectrum: None,
        residual_k: None,
        residual_o: None,
        iterations: None,
        trace: None,
        certification: None,
        oracle: None,
        mode: settings.mode.to_string(),
        seed: settings.seed,
        tol: settings.tol,
        cutoff: settings.cutoff,
        map: None,
        hamiltonian: spec.clone(),
        timestamp: now(),
    }
}

/// Runs the minimizer, certification and oracle comparison. Failures of
/// the core library are recorded in the report as status `error`.
pub fn minimize_report(spec: &HamiltonianSpec, h: &WickPolynomial, settings: &MinimizeSettings) -> Report {
    let mut report = empty_report(spec, settings);
    let opts = Options {
        tol_grad: settings.tol,
        max_iterations: settings.max_iterations,
        seed: settings.seed,
        ..Options::default()
    };
    let result = match minimize(h, settings.mode, &opts) {
        Ok(r) => r,
        Err(e) => {
            report.status = "error".into();
            report.error = Some(e.to_string());
            return report;
        }
    };
    fill_result(&mut report, &result);
    if result.status == Status::Converged {
        match run_certification(&result, h, settings.mode, settings.fd_step, settings.seed, settings.cutoff) {
            Ok(c) => report.certification = Some(c),
            Err(e) => report.error = Some(format!("certification: {e}")),
        }
    }
    if result.status != Status::UnboundedBelow {
        // skipped quietly when the truncated space would exceed the cap
        if let Ok(o) = oracle_compare(h, &result.map, settings.cutoff, ORACLE_TAIL_TOL, DEFAULT_DIM_CAP) {
            report.oracle = Some(OracleReport::from(&o));
        }
    }
    report
}

fn fill_result(report: &mut Report, r: &MinimizationResult) {
    report.status = r.status.to_string();
    report.energy = Some(r.energy);
    report.d = Some(matrix_rows(&r.blocks.d));
    report.d_spectrum = Some(r.d_spectrum.clone());
    report.residual_k = Some(r.blocks.k_norm());
    report.residual_o = Some(r.blocks.o_norm());
    report.iterations = Some(r.iterations);
    report.trace = Some(TraceSummary {
        initial_energy: r.trace[0],
        final_energy: *r.trace.last().unwrap_or(&r.energy),
        accepted_steps: r.trace.len() - 1,
        start: r.start,
    });
    report.map = Some(MapReport::from_map(&r.map));
}

fn run_certification(
    result: &MinimizationResult,
    h: &WickPolynomial,
    mode: Mode,
    fd_step: f64,
    seed: u64,
    cutoff: usize,
) -> Result<CertificationReport, CliError> {
    let opts = CertifyOptions {
        fd_step,
        seed,
        cutoff,
        ..CertifyOptions::default()
    };
    let c = certify(result, h, mode, &opts)?;
    Ok(CertificationReport::new(&c, fd_step))
}

/// Hamiltonian, mode and map stored in a report.
pub struct ReportContext {
    pub h: WickPolynomial,
    pub mode: Mode,
    pub result: MinimizationResult,
}

pub fn load_report(path: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Report::from_json(&text, &path.display().to_string())
}

pub fn report_context(report: &Report) -> Result<ReportContext, CliError> {
    let h = report.hamiltonian.to_polynomial(false)?;
    let mode: Mode = report.mode.parse()?;
    let map = report
        .map
        .as_ref()
        .ok_or_else(|| CliError::Field {
            field: "map".into(),
            message: "report has no map (the run ended in an error)".into(),
        })?
        .to_map(h.stats())?;
    let result = MinimizationResult::at(&h, map, report.tol)?;
    Ok(ReportContext { h, mode, result })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub consistent: bool,
    pub reported_energy: Option<f64>,
    pub engine_energy: f64,
    pub oracle: OracleReport,
    /// `|engine − oracle expectation|`.
    pub engine_oracle_difference: f64,
}

/// Recomputes the engine energy from the stored map and compares it with the
/// report and with the truncated-space oracle.
pub fn verify_report(report: &Report) -> Result<Verification, CliError> {
    let ctx = report_context(report)?;
    let engine = ctx.result.energy;
    let o = oracle_compare(&ctx.h, &ctx.result.map, report.cutoff, ORACLE_TAIL_TOL, DEFAULT_DIM_CAP)?;
    let difference = (engine - o.expectation).abs();
    let matches_report = report.energy.is_none_or(|e| (e - engine).abs() <= 1e-10 * (1.0 + e.abs()));
    Ok(Verification {
        consistent: matches_report && difference < 1e-6,
        reported_energy: report.energy,
        engine_energy: engine,
        oracle: OracleReport::from(&o),
        engine_oracle_difference: difference,
    })
}

/// Runs the certification battery on the map stored in a report.
pub fn certify_report(report: &Report, fd_step: f64) -> Result<CertificationReport, CliError> {
    let ctx = report_context(report)?;
    if ctx.result.status != Status::Converged {
        return Err(hfb_core::Error::NotConverged.into());
    }
    run_certification(&ctx.result, &ctx.h, ctx.mode, fd_step, report.seed, report.cutoff)
}
