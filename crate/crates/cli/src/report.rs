//! Machine-readable run reports.

use hfb_core::bogoliubov::{BogoliubovMap, MapParity};
use hfb_core::variational::{Certification, Check, OracleComparison};
use hfb_core::wick_poly::Statistics;
use hfb_core::{CMatrix, CVector, C64};
use serde::{Deserialize, Serialize};

use crate::spec::HamiltonianSpec;
use crate::CliError;

pub type ComplexPair = [f64; 2];

fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<ComplexPair>], field: &str) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Field {
            field: field.into(),
            message: "must be a square matrix".into(),
        });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapReport {
    pub p: Vec<Vec<ComplexPair>>,
    pub q: Vec<Vec<ComplexPair>>,
    pub xi: Vec<ComplexPair>,
    pub parity: String,
}

impl MapReport {
    pub fn from_map(map: &BogoliubovMap) -> Self {
        MapReport {
            p: matrix_rows(map.p()),
            q: matrix_rows(map.q()),
            xi: map.xi().iter().map(|z| pair(*z)).collect(),
            parity: match map.parity() {
                MapParity::Even => "even".into(),
                MapParity::Odd => "odd".into(),
            },
        }
    }

    pub fn to_map(&self, stats: Statistics) -> Result<BogoliubovMap, CliError> {
        let p = matrix_from_rows(&self.p, "map.p")?;
        let q = matrix_from_rows(&self.q, "map.q")?;
        let xi = CVector::from_iterator(self.xi.len(), self.xi.iter().map(|z| C64::new(z[0], z[1])));
        let parity = match self.parity.as_str() {
            "even" => MapParity::Even,
            "odd" => MapParity::Odd,
            other => {
                return Err(CliError::Field {
                    field: "map.parity".into(),
                    message: format!("expected \"even\" or \"odd\", got {other:?}"),
                })
            }
        };
        Ok(BogoliubovMap::new(stats, p, q, xi, parity)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
}

impl From<&Check> for CheckReport {
    fn from(c: &Check) -> Self {
        CheckReport {
            passed: c.passed,
            max_error: c.max_error,
            tolerance: c.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub passed: bool,
    pub fd_step: f64,
    pub residual_k: f64,
    pub residual_o: f64,
    pub fd_check: CheckReport,
    /// Absent for fermionic runs.
    pub quadratic_check: Option<CheckReport>,
    pub gauge_check: CheckReport,
}

impl CertificationReport {
    pub fn new(c: &Certification, fd_step: f64) -> Self {
        CertificationReport {
            passed: c.passed(),
            fd_step,
            residual_k: c.residual_k,
            residual_o: c.residual_o,
            fd_check: (&c.fd_check).into(),
            quadratic_check: c.quadratic_check.as_ref().map(Into::into),
            gauge_check: (&c.gauge_check).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub expectation: f64,
    pub ground_energy: f64,
    pub gap: f64,
    pub cutoff: usize,
    pub tail: f64,
}

impl From<&OracleComparison> for OracleReport {
    fn from(o: &OracleComparison) -> Self {
        OracleReport {
            expectation: o.expectation,
            ground_energy: o.ground_energy,
            gap: o.gap,
            cutoff: o.cutoff,
            tail: o.tail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub initial_energy: f64,
    pub final_energy: f64,
    pub accepted_steps: usize,
    /// Which multistart candidate produced the result.
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub energy: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<Vec<Vec<ComplexPair>>>,
    #[serde(rename = "D_spectrum")]
    pub d_spectrum: Option<Vec<f64>>,
    #[serde(rename = "residual_K")]
    pub residual_k: Option<f64>,
    #[serde(rename = "residual_O")]
    pub residual_o: Option<f64>,
    pub iterations: Option<usize>,
    pub trace: Option<TraceSummary>,
    pub certification: Option<CertificationReport>,
    pub oracle: Option<OracleReport>,
    pub mode: String,
    pub seed: u64,
    pub tol: f64,
    pub cutoff: usize,
    pub map: Option<MapReport>,
    pub hamiltonian: HamiltonianSpec,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Malformed {
            file: source.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}
