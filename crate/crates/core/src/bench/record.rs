//! Per-trial JSON-lines records.
//!
//! A record file holds one `header` line, one `row` line per iteration
//! (row 0 is the initial design) and one closing `archive` line with every
//! evaluated point. Each line carries `schema_version` and `kind`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::metrics::coverage_from_volumes;
use super::SCHEMA_VERSION;
use crate::engine::{Algorithm, EngineParams, IterationRow, RunTrace};
use crate::error::{Error, Result};
use crate::hypervolume::{hv_exact, ReferenceVector};

/// Result-affecting settings and the metric anchors of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub problem: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub params: EngineParams,
    /// Fixed reporting reference for `hv`.
    pub reference: Vec<f64>,
    /// Hypervolume of the initial design's front; absent if the design failed.
    pub hv_initial: Option<f64>,
    /// Hypervolume of the ideal front.
    pub hv_ideal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    #[serde(flatten)]
    pub trace: IterationRow,
    pub hv: f64,
    /// Hypervolume coverage; absent when the metric is undefined.
    pub hc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchivePoint {
    pub id: usize,
    pub decision: Vec<f64>,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TrialStatus {
    Completed,
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordArchive {
    #[serde(flatten)]
    pub status: TrialStatus,
    pub points: Vec<ArchivePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub header: RecordHeader,
    pub rows: Vec<RecordRow>,
    pub archive: RecordArchive,
}

#[derive(Serialize, Deserialize)]
struct Line<T> {
    schema_version: u32,
    kind: String,
    #[serde(flatten)]
    body: T,
}

fn line<T: Serialize>(kind: &str, body: &T) -> Result<String> {
    Ok(serde_json::to_string(&Line {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        body,
    })?)
}

fn unline<T: DeserializeOwned>(value: serde_json::Value, kind: &str, n: usize) -> Result<T> {
    let line: Line<T> = serde_json::from_value(value)?;
    if line.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "line {n}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
            line.schema_version
        )));
    }
    if line.kind != kind {
        return Err(Error::Config(format!("line {n}: expected a `{kind}` line, found `{}`", line.kind)));
    }
    Ok(line.body)
}

impl RunRecord {
    /// Builds the record of a (possibly partial) trace.
    pub fn from_trace(
        problem: &str,
        trace: &RunTrace,
        reference: &ReferenceVector,
        hv_ideal: f64,
        status: TrialStatus,
    ) -> Result<Self> {
        let points = trace.archive.points();
        let mut rows = Vec::with_capacity(trace.rows.len());
        let mut hv_initial = None;
        for row in &trace.rows {
            let front: Vec<&[f64]> = row
                .pareto_ids
                .iter()
                .map(|&id| &points[id].objectives[..])
                .collect();
            let hv = hv_exact(&front, reference)?;
            let init = *hv_initial.get_or_insert(hv);
            rows.push(RecordRow {
                trace: row.clone(),
                hv,
                hc: coverage_from_volumes(hv, init, hv_ideal).ok(),
            });
        }
        Ok(Self {
            header: RecordHeader {
                problem: problem.to_string(),
                algorithm: trace.algorithm,
                seed: trace.seed,
                params: trace.params.clone(),
                reference: reference.to_vec(),
                hv_initial,
                hv_ideal,
            },
            rows,
            archive: RecordArchive {
                status,
                points: points
                    .iter()
                    .map(|p| ArchivePoint {
                        id: p.id,
                        decision: p.decision.to_vec(),
                        objectives: p.objectives.to_vec(),
                    })
                    .collect(),
            },
        })
    }

    pub fn is_completed(&self) -> bool {
        self.archive.status == TrialStatus::Completed
    }

    /// `"mopls N=4"` style label.
    pub fn label(&self) -> String {
        let algo = match self.header.algorithm {
            Algorithm::Mopls => "mopls",
            Algorithm::RandomSearch => "random-search",
        };
        format!("{algo} N={}", self.header.params.population)
    }

    pub fn final_hc(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.hc)
    }

    /// Objectives of the stored front after `row`.
    pub fn front_at(&self, row: usize) -> Result<Vec<Vec<f64>>> {
        let r = self
            .rows
            .get(row)
            .ok_or_else(|| Error::Config(format!("record has no row {row}")))?;
        r.trace
            .pareto_ids
            .iter()
            .map(|&id| {
                self.archive
                    .points
                    .get(id)
                    .map(|p| p.objectives.clone())
                    .ok_or(Error::UnknownId(id))
            })
            .collect()
    }

    /// Coverage per row recomputed from the stored archive alone.
    pub fn recompute_hc(&self) -> Result<Vec<Option<f64>>> {
        let reference = ReferenceVector::new(self.header.reference.clone());
        let mut hvs = Vec::with_capacity(self.rows.len());
        for i in 0..self.rows.len() {
            hvs.push(hv_exact(&self.front_at(i)?, &reference)?);
        }
        let Some(&init) = hvs.first() else {
            return Ok(Vec::new());
        };
        Ok(hvs
            .into_iter()
            .map(|hv| coverage_from_volumes(hv, init, self.header.hv_ideal).ok())
            .collect())
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = line("header", &self.header)?;
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line("row", row)?);
            out.push('\n');
        }
        out.push_str(&line("archive", &self.archive)?);
        out.push('\n');
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut values = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| -> Result<_> { Ok((n + 1, serde_json::from_str::<serde_json::Value>(l)?)) });
        let truncated = || Error::Config("record is truncated".into());
        let (n, first) = values.next().ok_or_else(truncated)??;
        let header: RecordHeader = unline(first, "header", n)?;
        let mut rows = Vec::new();
        let mut archive = None;
        for item in values {
            let (n, value) = item?;
            if archive.is_some() {
                return Err(Error::Config(format!("line {n}: content after the archive line")));
            }
            if value.get("kind").and_then(|k| k.as_str()) == Some("row") {
                rows.push(unline(value, "row", n)?);
            } else {
                archive = Some(unline(value, "archive", n)?);
            }
        }
        Ok(Self {
            header,
            rows,
            archive: archive.ok_or_else(truncated)?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(self.to_jsonl()?.as_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_jsonl(&fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
