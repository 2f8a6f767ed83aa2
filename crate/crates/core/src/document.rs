//! Serialized form of a solution plus its verification report.
//!
//! Numbers are written by `serde_json` in shortest round-trip form, so
//! parsing a document reproduces every field bit for bit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::RootSet;
use crate::error::{QesError, Result};
use crate::families::{FamilyProblem, QesSolution, WaveForm};
use crate::oracle::VerificationReport;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

/// `Vec<Complex64>` as a list of `{re, im}` objects.
pub mod complex_list {
    use super::ComplexValue;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<ComplexValue> = v.iter().map(|z| ComplexValue { re: z.re, im: z.im }).collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let list = Vec::<ComplexValue>::deserialize(d)?;
        Ok(list.into_iter().map(|c| Complex64::new(c.re, c.im)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub schema_version: String,
    pub problem: FamilyProblem,
    #[serde(with = "complex_list")]
    pub roots: Vec<Complex64>,
    pub derived: BTreeMap<String, f64>,
    pub energy: f64,
    pub waveform: WaveForm,
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

impl SolutionDocument {
    pub fn new(sol: &QesSolution, verification: Option<VerificationReport>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            problem: sol.problem.clone(),
            roots: sol.roots.roots.clone(),
            derived: sol.derived.clone(),
            energy: sol.energy,
            waveform: sol.waveform.clone(),
            diagnostics: sol.diagnostics.clone(),
            verification,
        }
    }

    /// Rebuilds the solution; root diagnostics are recomputed, nothing else is.
    pub fn to_solution(&self) -> Result<QesSolution> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(QesError::InvalidArgument(format!("unsupported schema_version {:?}", self.schema_version)));
        }
        self.problem.validate()?;
        if self.roots.len() != self.problem.n {
            return Err(QesError::InvalidArgument(format!(
                "{} roots for degree n = {}",
                self.roots.len(),
                self.problem.n
            )));
        }
        let mut sol = QesSolution {
            problem: self.problem.clone(),
            roots: RootSet::empty(self.waveform.poly_variable),
            derived: self.derived.clone(),
            energy: self.energy,
            waveform: self.waveform.clone(),
            diagnostics: self.diagnostics.clone(),
        };
        let front = crate::families::front(&sol.problem, Some(sol.omega()))?;
        sol.roots = RootSet::from_roots(&front.ode(), self.roots.clone(), self.waveform.poly_variable);
        Ok(sol)
    }
}

/// A single document or a list of them; errors carry line and column.
pub fn parse_documents(text: &str) -> std::result::Result<Vec<SolutionDocument>, serde_json::Error> {
    if text.trim_start().starts_with('[') {
        serde_json::from_str(text)
    } else {
        serde_json::from_str(text).map(|d| vec![d])
    }
}
