use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of a run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub t: u64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub communities: usize,
    pub iters: usize,
    pub updated: usize,
    pub ms: u64,
}

/// Per-snapshot records, ordered by time index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub records: Vec<RunRecord>,
}

impl RunReport {
    /// CSV with header `t,Q,communities,iters,updated,ms`. Floats are written
    /// in shortest round-trip form, so [`from_csv`](Self::from_csv) recovers
    /// the report exactly.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        if self.records.is_empty() {
            w.write_record(["t", "Q", "communities", "iters", "updated", "ms"])?;
        }
        for r in &self.records {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn from_csv(text: &str) -> Result<RunReport> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let records = r.deserialize().collect::<std::result::Result<Vec<RunRecord>, _>>()?;
        Ok(RunReport { records })
    }

    pub fn mean_q(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.q).sum::<f64>() / self.records.len() as f64
    }
}
