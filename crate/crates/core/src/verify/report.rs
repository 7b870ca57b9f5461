use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub statistic: f64,
    pub reference: f64,
    pub tolerance_or_alpha: f64,
    pub n_samples: u64,
    pub passed: bool,
    pub details: BTreeMap<String, Value>,
}

impl VerificationReport {
    pub(crate) fn new(check_name: &str) -> Self {
        Self {
            check_name: check_name.to_string(),
            statistic: 0.0,
            reference: 0.0,
            tolerance_or_alpha: 0.0,
            n_samples: 0,
            passed: false,
            details: BTreeMap::new(),
        }
    }

    pub(crate) fn detail<V: Serialize>(mut self, key: &str, value: V) -> Self {
        self.details
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One-line summary for logs and test output.
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {}: statistic={:.6e} reference={:.6e} tol/alpha={:.3e} n={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check_name,
            self.statistic,
            self.reference,
            self.tolerance_or_alpha,
            self.n_samples
        )
    }
}

/// Writes `check_name,statistic,reference,tolerance,passed` rows.
pub fn write_summary_csv<W: Write>(reports: &[VerificationReport], mut w: W) -> Result<()> {
    writeln!(w, "check_name,statistic,reference,tolerance,passed")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.check_name, r.statistic, r.reference, r.tolerance_or_alpha, r.passed
        )?;
    }
    Ok(())
}
