//! Machine-readable run reports. The JSON layout is described by
//! `schema/report.schema.json`; unknown fields are rejected on input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::certificate::{ErrorBound, Mode, SpectralCertificate};
use crate::error::{Error, Result};
use crate::harness::TrialRecord;

pub const SCHEMA_VERSION: u32 = 1;

/// The published schema, embedded for tooling.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub family: String,
    pub n: u32,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// seed length in bits, `log₂ |D|`
    pub d: f64,
    pub mode: Mode,
    /// `|D|`
    pub seeds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// qubits of side information
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateValues {
    pub lambda1_diff: f64,
    pub lambda2_psi: f64,
    pub balanced: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum_error_bound: Option<f64>,
}

impl CertificateValues {
    pub fn new(cert: &SpectralCertificate, bound: Option<ErrorBound>) -> Self {
        Self {
            lambda1_diff: cert.lambda1_diff,
            lambda2_psi: cert.lambda2_psi,
            balanced: cert.balanced,
            epsilon: bound.map(|b| b.epsilon),
            quantum_error_bound: bound.map(|b| b.quantum_error),
        }
    }
}

/// A named inequality `value ≤ limit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.to_string(), value, limit, pass: value <= limit }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractorReport {
    pub schema_version: u32,
    pub command: String,
    pub parameters: Parameters,
    pub rng_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateValues>,
    pub trials: Vec<TrialRecord>,
    /// failed trials plus failed checks
    pub violations: usize,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, f64>,
    /// seconds; only present when timing was requested, so that reports are
    /// otherwise byte-reproducible
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl ExtractorReport {
    pub fn new(command: &str, parameters: Parameters, rng_seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            parameters,
            rng_seed,
            certificate: None,
            trials: Vec::new(),
            violations: 0,
            checks: Vec::new(),
            values: BTreeMap::new(),
            wall_time: None,
        }
    }

    pub fn value(&mut self, name: &str, v: f64) -> &mut Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        if !c.pass {
            self.violations += 1;
        }
        self.checks.push(c);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {}", r.schema_version)));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExtractorReport {
        let p = Parameters {
            family: "perm".into(),
            n: 3,
            m: 1,
            k: Some(-2.0),
            d: (56f64).log2(),
            mode: Mode::Weak,
            seeds: 56,
            trials: Some(2),
            r: None,
            kind: None,
        };
        let mut r = ExtractorReport::new("verify", p, 7);
        r.trials.push(TrialRecord { index: 0, error: 0.1 + 0.2, hmin: Some(1.0 / 3.0), decoupling_error: None });
        r.check(Check::at_most("bound", 0.3, 0.25)).value("x", 1e-300);
        r
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let r = sample();
        let back = ExtractorReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
        assert_eq!(r.violations, 1);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r = sample();
        let text = r.to_json().unwrap().replacen("\"rng_seed\"", "\"extra\": 1, \"rng_seed\"", 1);
        assert!(ExtractorReport::from_json(&text).is_err());
    }

    #[test]
    fn wall_time_is_omitted_unless_set() {
        let r = sample();
        assert!(!r.to_json().unwrap().contains("wall_time"));
    }
}
