use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use eplab_core::classify::ClassificationReport;
use eplab_core::douglas::DouglasReport;
use eplab_core::opzoo::SweepRow;
use eplab_core::perturb::PerturbationReport;
use eplab_core::pinv::PenroseReport;
use eplab_core::TolerancePolicy;

pub const TOOL_VERSION: &str = concat!("eplab ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Report {
    Classification(ClassificationReport),
    Perturbation(PerturbationReport),
    Douglas(DouglasReport),
    Penrose(PenroseReport),
    Sweep(Vec<SweepRow>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    /// Hex SHA-256 over the input bytes, each input prefixed by its length.
    pub input_digest: String,
    pub tolerance: TolerancePolicy,
    pub report: Report,
}

impl ReportDocument {
    pub fn new(inputs: &[&[u8]], tolerance: TolerancePolicy, report: Report) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            input_digest: digest(inputs),
            tolerance,
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports hold finite numbers");
        s.push('\n');
        s
    }
}

pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// `n,gamma,rank` with gamma at ten decimals, trailing zeros dropped.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,gamma,rank\n");
    for r in rows {
        let g = format!("{:.10}", r.gamma);
        let g = g.trim_end_matches('0').trim_end_matches('.');
        out.push_str(&format!("{},{},{}\n", r.n, g, r.rank));
    }
    out
}
