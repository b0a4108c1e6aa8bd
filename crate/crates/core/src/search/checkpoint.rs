use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConfigEcho, SearchError, SearchReport};
use crate::enumerate::{EnumerationNode, PartialMachine};
use crate::machine::parse_machine;
use crate::sim::{Configuration, Step};

pub const CHECKPOINT_VERSION: u32 = 1;

/// An unexplored subtree root: its partial machine and the step at which
/// its configuration sits. The configuration is rebuilt by replaying the
/// machine from the blank tape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingRoot {
    pub machine: String,
    pub resume_step: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: ConfigEcho,
    /// Merged report over everything already walked.
    pub report: SearchReport,
    pub pending: Vec<PendingRoot>,
}

impl Checkpoint {
    pub(crate) fn new<'a>(
        report: &SearchReport,
        pending: impl Iterator<Item = &'a EnumerationNode>,
    ) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            config: report.config.clone(),
            report: report.clone(),
            pending: pending
                .map(|n| PendingRoot {
                    machine: n.machine.table.to_string(),
                    resume_step: n.config.steps,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    /// Writes through a temporary file so an interrupted save leaves the
    /// previous checkpoint intact.
    pub fn save(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_json())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SearchError> {
        let text = fs::read_to_string(path)?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| SearchError::CorruptCheckpoint(e.to_string()))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(SearchError::CorruptCheckpoint(format!(
                "unsupported version {}",
                cp.version
            )));
        }
        if cp.report.config != cp.config {
            return Err(SearchError::CorruptCheckpoint(
                "report and header disagree".into(),
            ));
        }
        Ok(cp)
    }

    pub(crate) fn restore_pending(
        &self,
        n_states: usize,
        n_symbols: usize,
    ) -> Result<VecDeque<EnumerationNode>, SearchError> {
        self.pending
            .iter()
            .map(|p| restore(p, n_states, n_symbols))
            .collect()
    }
}

fn restore(
    p: &PendingRoot,
    n_states: usize,
    n_symbols: usize,
) -> Result<EnumerationNode, SearchError> {
    let corrupt = |msg: String| SearchError::CorruptCheckpoint(format!("{}: {msg}", p.machine));
    let table = parse_machine(&p.machine).map_err(|e| corrupt(e.to_string()))?;
    if table.n_states() != n_states || table.n_symbols() != n_symbols {
        return Err(corrupt("wrong machine class".into()));
    }
    let mut config = Configuration::start();
    while config.steps < p.resume_step {
        match config.step(&table) {
            Step::Continue => {}
            Step::Halted if config.steps == p.resume_step => {}
            _ => {
                return Err(corrupt(format!(
                    "replay stops before step {}",
                    p.resume_step
                )))
            }
        }
    }
    Ok(EnumerationNode {
        machine: PartialMachine::from_table(table),
        config,
    })
}
