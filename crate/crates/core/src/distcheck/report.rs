use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    /// `fail > inconclusive > pass`; the empty set passes.
    pub fn worst<I: IntoIterator<Item = Verdict>>(it: I) -> Verdict {
        it.into_iter().max().unwrap_or(Verdict::Pass)
    }
}

/// Outcome of one check. Unless inconclusive, the verdict is `pass` exactly
/// when `statistic <= threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub provenance: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl TestReport {
    pub fn compare(name: &str, statistic: f64, threshold: f64, provenance: serde_json::Value) -> Self {
        let verdict = if statistic <= threshold { Verdict::Pass } else { Verdict::Fail };
        Self { name: name.into(), statistic, threshold, verdict, provenance, reason: None, details: serde_json::Value::Null }
    }

    pub fn inconclusive(name: &str, reason: impl Into<String>, provenance: serde_json::Value) -> Self {
        Self {
            name: name.into(),
            statistic: f64::NAN,
            threshold: f64::NAN,
            verdict: Verdict::Inconclusive,
            provenance,
            reason: Some(reason.into()),
            details: serde_json::Value::Null,
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = details;
        self
    }

    /// Checks the verdict against statistic and threshold.
    pub fn is_consistent(&self) -> bool {
        match self.verdict {
            Verdict::Inconclusive => self.reason.is_some(),
            Verdict::Pass => self.statistic <= self.threshold,
            Verdict::Fail => !(self.statistic <= self.threshold),
        }
    }
}

/// Asymptotic two-sample KS constant `c(level) = sqrt(-ln(level/2) / 2)`.
pub fn ks_critical_value(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}
