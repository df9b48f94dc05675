use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use shadowsim_core::shadow::ShadowHamiltonian;
use shadowsim_core::C64;

use crate::CliError;

/// One line of `series.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub time: f64,
    pub label: String,
    pub value: C64,
}

impl Row {
    pub fn new(time: f64, label: impl Into<String>, value: C64) -> Self {
        Self { time, label: label.into(), value }
    }

    pub fn real(time: f64, label: impl Into<String>, value: f64) -> Self {
        Self::new(time, label, C64::new(value, 0.0))
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Bounds {
    pub hs_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsity_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifyPoint {
    pub time: f64,
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Verification {
    pub threshold: f64,
    pub max_error: f64,
    pub points: Vec<VerifyPoint>,
}

/// Contents of `report.json`. Field order is fixed and maps are sorted, so
/// the file is byte-identical across runs with the same inputs.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub status: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub tol: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set_size: Option<usize>,
    #[serde(rename = "normA", skip_serializing_if = "Option::is_none")]
    pub norm_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leakage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermitian_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<Verification>,
}

impl Report {
    pub fn new(scenario: &str, tol: f64, seed: u64, shots: Option<u64>) -> Self {
        Self {
            scenario: scenario.into(),
            status: "ok".into(),
            exit_code: crate::exit::OK,
            error: None,
            tol,
            seed,
            shots,
            set_size: None,
            norm_a: None,
            leakage: None,
            hermitian_defect: None,
            sparsity: None,
            bounds: None,
            details: BTreeMap::new(),
            verify: None,
        }
    }

    /// Records the size diagnostics of `H_S`.
    pub fn hamiltonian(&mut self, sh: &ShadowHamiltonian) {
        self.set_size = Some(sh.dim());
        self.leakage = Some(sh.leakage());
        self.hermitian_defect = Some(sh.hermitian_defect());
        self.sparsity = Some(sh.sparsity());
        let bounds = self.bounds.get_or_insert_with(Bounds::default);
        bounds.hs_max = sh.max_abs();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serialisable");
        s.push('\n');
        s
    }
}

pub fn write_series(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io { path: path.display().to_string(), source: e.into() };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["time", "label", "re", "im"]).map_err(io)?;
    for r in rows {
        w.write_record([r.time.to_string(), r.label.clone(), r.value.re.to_string(), r.value.im.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

pub fn write_report(path: &Path, report: &Report) -> Result<(), CliError> {
    fs::write(path, report.to_json()).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optional_fields_are_omitted() {
        let mut r = Report::new("qubit", 1e-10, 7, None);
        r.norm_a = Some(2.0);
        let json = r.to_json();
        assert!(json.contains("\"normA\": 2.0"));
        assert!(!json.contains("leakage"));
        assert!(!json.contains("shots"));
    }
}
