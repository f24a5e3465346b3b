//! JSON Hamiltonian specifications. Mode indices are 1-based in files.

use std::path::Path;

use hfb_core::variational::HERMITIAN_TOL;
use hfb_core::wick_poly::{Statistics, WickPolynomial};
use hfb_core::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsName {
    Bose,
    Fermi,
}

impl From<StatisticsName> for Statistics {
    fn from(s: StatisticsName) -> Self {
        match s {
            StatisticsName::Bose => Statistics::Bose,
            StatisticsName::Fermi => Statistics::Fermi,
        }
    }
}

impl From<Statistics> for StatisticsName {
    fn from(s: Statistics) -> Self {
        match s {
            Statistics::Bose => StatisticsName::Bose,
            Statistics::Fermi => StatisticsName::Fermi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    #[serde(default)]
    pub creation: Vec<usize>,
    #[serde(default)]
    pub annihilation: Vec<usize>,
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermitian_complete: Option<bool>,
}

impl SpecOptions {
    fn is_empty(&self) -> bool {
        *self == SpecOptions::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub statistics: StatisticsName,
    pub modes: usize,
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "SpecOptions::is_empty")]
    pub options: SpecOptions,
}

impl HamiltonianSpec {
    pub fn from_json(text: &str, source: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Malformed {
            file: source.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs always serialize")
    }

    /// Canonical polynomial. Conjugate terms are added when `hermitian_complete`
    /// is set here or in the file's options; the result must be Hermitian.
    pub fn to_polynomial(&self, hermitian_complete: bool) -> Result<WickPolynomial, CliError> {
        if self.modes == 0 {
            return Err(CliError::Field {
                field: "modes".into(),
                message: "must be a positive integer".into(),
            });
        }
        let stats = Statistics::from(self.statistics);
        let mut poly = WickPolynomial::new(self.modes, stats)?;
        for (t, term) in self.terms.iter().enumerate() {
            let creation = self.zero_based(t, "creation", &term.creation)?;
            let annihilation = self.zero_based(t, "annihilation", &term.annihilation)?;
            let coeff = C64::new(term.coeff[0], term.coeff[1]);
            if !coeff.re.is_finite() || !coeff.im.is_finite() {
                return Err(CliError::Field {
                    field: format!("terms[{t}].coeff"),
                    message: "must be finite".into(),
                });
            }
            poly.add_term(&creation, &annihilation, coeff).map_err(|e| CliError::Field {
                field: format!("terms[{t}]"),
                message: e.to_string(),
            })?;
        }
        if hermitian_complete || self.options.hermitian_complete.unwrap_or(false) {
            poly = poly.hermitian_completion();
        }
        let defect = poly.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(CliError::NotHermitian { defect });
        }
        Ok(poly)
    }

    fn zero_based(&self, t: usize, side: &str, indices: &[usize]) -> Result<Vec<usize>, CliError> {
        let mut out = Vec::with_capacity(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            if i == 0 || i > self.modes {
                return Err(CliError::Field {
                    field: format!("terms[{t}].{side}[{k}]"),
                    message: format!("index {i} outside 1..={}", self.modes),
                });
            }
            if self.statistics == StatisticsName::Fermi && out.contains(&(i - 1)) {
                return Err(CliError::Field {
                    field: format!("terms[{t}].{side}"),
                    message: format!("repeated fermionic index {i}"),
                });
            }
            out.push(i - 1);
        }
        Ok(out)
    }

    /// Spec listing the canonical terms of `poly`.
    pub fn from_polynomial(poly: &WickPolynomial, options: SpecOptions) -> Self {
        let one_based = |v: &[usize]| v.iter().map(|i| i + 1).collect();
        HamiltonianSpec {
            statistics: poly.stats().into(),
            modes: poly.n_modes(),
            terms: poly
                .terms()
                .map(|(k, v)| TermSpec {
                    creation: one_based(k.creation()),
                    annihilation: one_based(k.annihilation()),
                    coeff: [v.re, v.im],
                })
                .collect(),
            options,
        }
    }
}

/// Reads and validates a Hamiltonian file.
pub fn parse_hamiltonian(path: &Path, hermitian_complete: bool) -> Result<(HamiltonianSpec, WickPolynomial), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let spec = HamiltonianSpec::from_json(&text, &path.display().to_string())?;
    let poly = spec.to_polynomial(hermitian_complete)?;
    Ok((spec, poly))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<WickPolynomial, CliError> {
        HamiltonianSpec::from_json(text, "test")?.to_polynomial(false)
    }

    #[test]
    fn single_number_term() {
        let p = parse(r#"{"statistics":"bose","modes":1,"terms":[{"creation":[1],"annihilation":[1],"coeff":[1,0]}]}"#)
            .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&[0], &[0]).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn completion_adds_conjugate() {
        let text = r#"{"statistics":"bose","modes":1,"terms":[{"creation":[1,1],"coeff":[0.3,0]}]}"#;
        let spec = HamiltonianSpec::from_json(text, "test").unwrap();
        assert!(matches!(spec.to_polynomial(false), Err(CliError::NotHermitian { .. })));
        let p = spec.to_polynomial(true).unwrap();
        assert_eq!(p.coeff(&[], &[0, 0]).unwrap(), C64::new(0.3, 0.0));
    }

    #[test]
    fn repeated_fermion_index_rejected() {
        let err = parse(r#"{"statistics":"fermi","modes":2,"terms":[{"creation":[1,1],"coeff":[1,0]}]}"#).unwrap_err();
        assert!(err.to_string().contains("terms[0].creation"), "{err}");
    }

    #[test]
    fn index_out_of_range() {
        let err = parse(r#"{"statistics":"bose","modes":1,"terms":[{"creation":[2],"annihilation":[1],"coeff":[1,0]}]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("terms[0].creation[0]"), "{err}");
        let err = parse(r#"{"statistics":"bose","modes":1,"terms":[{"creation":[0],"annihilation":[1],"coeff":[1,0]}]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("outside 1..=1"), "{err}");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse("{\n  \"statistics\": \"bose\",\n  \"modes\": x\n}").unwrap_err();
        match err {
            CliError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse(r#"{"statistics":"boson","modes":1,"terms":[]}"#).unwrap_err();
        assert!(matches!(err, CliError::Malformed { .. }));
    }
}
