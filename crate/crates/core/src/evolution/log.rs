//! Episode logs, stored as JSON lines.
//!
//! Three record kinds are written, each tagged by `kind`: one `generation`
//! record per completed generation, one `interaction` record per consumed
//! rating, and a final `halt` record.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::reward::{Stars, Weights};
use crate::genome::CandidateDesign;
use crate::metrics::{Elegance, MetricVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub gen: usize,
    pub best: MetricVector,
    pub mean: MetricVector,
    pub weights: Weights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub generation: usize,
    pub chosen_measure: Elegance,
    pub candidate: CandidateDesign,
    pub candidate_metrics: MetricVector,
    pub stars: Stars,
    pub mean_rewards_after: [f64; 4],
    pub weights_after: Weights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    Designer,
    GenerationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSummary {
    pub best: MetricVector,
    pub mean: MetricVector,
    pub mean_rewards: [f64; 4],
    pub weights: Weights,
    pub interactions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaltRecord {
    pub gen: usize,
    pub reason: HaltReason,
    pub final_population_summary: PopulationSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogRecord {
    Generation(GenerationRecord),
    Interaction(InteractionRecord),
    Halt(HaltRecord),
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EpisodeLog {
    pub records: Vec<LogRecord>,
}

impl EpisodeLog {
    pub fn push(&mut self, record: LogRecord) {
        self.records.push(record);
    }

    pub fn generations(&self) -> impl Iterator<Item = &GenerationRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Generation(g) => Some(g),
            _ => None,
        })
    }

    pub fn interactions(&self) -> impl Iterator<Item = &InteractionRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Interaction(i) => Some(i),
            _ => None,
        })
    }

    pub fn halt(&self) -> Option<&HaltRecord> {
        self.records.iter().rev().find_map(|r| match r {
            LogRecord::Halt(h) => Some(h),
            _ => None,
        })
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), LogError> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Reads a log, skipping blank lines.
    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, LogError> {
        let mut records = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(&line).map_err(|source| LogError::Parse { line: i + 1, source })?;
            records.push(record);
        }
        Ok(Self { records })
    }
}
