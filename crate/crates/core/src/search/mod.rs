//! Exhaustive searches over one (states, symbols) class.
//!
//! The enumeration tree is first split breadth-first into a fixed frontier
//! of subtree roots. The split does not depend on the worker count, and
//! reports merge associatively and commutatively, so the final report is the
//! same however the roots are scheduled.

mod checkpoint;
mod report;
mod table;

use std::collections::VecDeque;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{Checkpoint, PendingRoot, CHECKPOINT_VERSION};
pub use report::{merge_reports, ChampionRecord, SearchReport, UnknownList, UNKNOWN_CAP};
pub use table::{emit_table, TableCell, TableDocument};

use crate::deciders::{DeciderLimits, Decision};
use crate::enumerate::{
    process_node, root_nodes, walk_limited, EnumerationNode, Mode, NodeOutcome, WalkStats,
};
use crate::machine::{TransitionTable, MAX_STATES, MAX_SYMBOLS};

/// Frontier size the tree is split into before the parallel phase.
pub const FRONTIER_TARGET: usize = 256;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n_states: usize,
    pub n_symbols: usize,
    pub limits: DeciderLimits,
    pub mode: Mode,
    /// Turns off every heuristic decider.
    pub strict: bool,
    pub workers: usize,
    /// Checkpoint file, rewritten after every batch of subtree roots.
    pub checkpoint: Option<PathBuf>,
    /// Per-subtree node budget for sampled runs.
    pub node_budget: Option<u64>,
}

impl SearchConfig {
    pub fn new(n_states: usize, n_symbols: usize) -> Self {
        SearchConfig {
            n_states,
            n_symbols,
            limits: DeciderLimits::default(),
            mode: Mode::Default,
            strict: false,
            workers: 1,
            checkpoint: None,
            node_budget: None,
        }
    }

    /// Limits actually handed to the deciders.
    pub fn effective_limits(&self) -> DeciderLimits {
        if self.strict {
            self.limits.clone().strict()
        } else {
            self.limits.clone()
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if !(1..=MAX_STATES).contains(&self.n_states)
            || !(2..=MAX_SYMBOLS).contains(&self.n_symbols)
        {
            return Err(SearchError::InvalidConfig(format!(
                "unsupported class ({}, {})",
                self.n_states, self.n_symbols
            )));
        }
        if self.workers == 0 {
            return Err(SearchError::InvalidConfig(
                "worker count must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The part of the configuration that determines the report.
    pub fn echo(&self) -> ConfigEcho {
        let limits = self.effective_limits();
        ConfigEcho {
            n_states: self.n_states,
            n_symbols: self.n_symbols,
            max_steps: limits.max_steps,
            backward_depth: limits.backward_depth,
            escape_enabled: limits.escape_enabled,
            translated_enabled: limits.translated_enabled,
            cycler_memory: limits.cycler_memory,
            known_bounds: limits.known_bounds.iter().collect(),
            mode: self.mode,
            strict: self.strict,
            node_budget: self.node_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n_states: usize,
    pub n_symbols: usize,
    pub max_steps: u64,
    pub backward_depth: usize,
    pub escape_enabled: bool,
    pub translated_enabled: bool,
    pub cycler_memory: usize,
    pub known_bounds: Vec<(usize, usize, u64)>,
    pub mode: Mode,
    pub strict: bool,
    pub node_budget: Option<u64>,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("reports belong to different search configurations")]
    ConfigMismatch,
    #[error("checkpoint was written for a different search configuration")]
    CheckpointMismatch,
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint I/O: {0}")]
    Io(#[from] io::Error),
}

/// A search in progress: the merged report so far plus the subtree roots
/// still to walk.
pub struct Search {
    config: SearchConfig,
    limits: DeciderLimits,
    pending: VecDeque<EnumerationNode>,
    report: SearchReport,
    /// Records of leaves met while splitting, written before any others.
    frontier_records: String,
    pool: rayon::ThreadPool,
    started: Instant,
}

impl Search {
    /// Splits the tree into its frontier; leaves met on the way are recorded.
    pub fn new(config: SearchConfig) -> Result<Self, SearchError> {
        config.validate()?;
        let limits = config.effective_limits();
        let mut report = SearchReport::empty(config.echo());
        let mut stats = WalkStats::default();
        let mut lines = String::new();
        let mut queue: VecDeque<EnumerationNode> =
            root_nodes(config.n_states, config.n_symbols, config.mode).into();
        while queue.len() < FRONTIER_TARGET {
            let Some(node) = queue.pop_front() else { break };
            let (table, outcome) = process_node(node, &limits, &mut stats);
            match outcome {
                NodeOutcome::Leaf(d) => {
                    lines.push_str(&record_line(&table, d));
                    report.record(&table, d);
                }
                NodeOutcome::Children(children) => queue.extend(children),
            }
        }
        report.add_stats(&stats);
        let mut search = Self::assemble(config, limits, queue, report)?;
        search.frontier_records = lines;
        Ok(search)
    }

    fn assemble(
        config: SearchConfig,
        limits: DeciderLimits,
        pending: VecDeque<EnumerationNode>,
        report: SearchReport,
    ) -> Result<Self, SearchError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
        Ok(Search {
            config,
            limits,
            pending,
            report,
            frontier_records: String::new(),
            pool,
            started: Instant::now(),
        })
    }

    /// Continues from a checkpoint file written for the same configuration.
    pub fn resume(config: SearchConfig, path: &Path) -> Result<Self, SearchError> {
        config.validate()?;
        let cp = Checkpoint::load(path)?;
        if cp.config != config.echo() {
            return Err(SearchError::CheckpointMismatch);
        }
        let limits = config.effective_limits();
        let pending = cp.restore_pending(config.n_states, config.n_symbols)?;
        let mut report = cp.report;
        report.wall_time = Default::default();
        Self::assemble(config, limits, pending, report)
    }

    /// Subtree roots not yet walked.
    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    pub fn report(&self) -> &SearchReport {
        &self.report
    }

    /// Walks up to `max` pending subtree roots, in parallel.
    pub fn run_roots(&mut self, max: usize) {
        self.run_roots_with(max, None)
            .expect("no record sink, no I/O");
    }

    /// Like [`Search::run_roots`], also writing one record per machine to
    /// `records`, in a fixed order.
    pub fn run_roots_with(
        &mut self,
        max: usize,
        mut records: Option<&mut dyn Write>,
    ) -> io::Result<()> {
        let parts = self.walk_batch(max, records.is_some());
        let echo = self.report.config.clone();
        let mut merged = std::mem::replace(&mut self.report, SearchReport::empty(echo));
        if let Some(w) = records.as_deref_mut() {
            w.write_all(std::mem::take(&mut self.frontier_records).as_bytes())?;
        }
        for (part, lines) in parts {
            if let Some(w) = records.as_deref_mut() {
                w.write_all(lines.as_bytes())?;
            }
            merged = merge_reports(merged, part).expect("parts share the configuration");
        }
        self.report = merged;
        Ok(())
    }

    /// Walks up to `max` pending roots and hands back one report per root
    /// instead of merging them into the running report.
    pub fn take_root_reports(&mut self, max: usize) -> Vec<SearchReport> {
        self.walk_batch(max, false)
            .into_iter()
            .map(|(r, _)| r)
            .collect()
    }

    fn walk_batch(&mut self, max: usize, verbose: bool) -> Vec<(SearchReport, String)> {
        let take = max.min(self.pending.len());
        let batch: Vec<EnumerationNode> = self.pending.drain(..take).collect();
        let echo = &self.report.config;
        let limits = &self.limits;
        let budget = self.config.node_budget.unwrap_or(u64::MAX);
        self.pool.install(|| {
            batch
                .into_par_iter()
                .map(|node| {
                    let mut part = SearchReport::empty(echo.clone());
                    let mut lines = String::new();
                    let mut stats = WalkStats::default();
                    let done =
                        walk_limited(node, limits, &mut stats, budget, &mut |t, d: Decision| {
                            if verbose {
                                lines.push_str(&record_line(t, d));
                            }
                            part.record(t, d);
                        });
                    part.add_stats(&stats);
                    part.complete = done;
                    part.finalize();
                    (part, lines)
                })
                .collect()
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(&self.report, self.pending.iter())
    }

    /// Walks everything left and returns the final report.
    pub fn finish(mut self) -> SearchReport {
        let n = self.pending.len();
        self.run_roots(n);
        self.into_report()
    }

    fn into_report(mut self) -> SearchReport {
        self.report.finalize();
        self.report.wall_time += self.started.elapsed();
        self.report
    }
}

/// One verbose record: machine, verdict kind, steps or reason.
pub fn record_line(table: &TransitionTable, d: Decision) -> String {
    format!("{table}\t{}\t{}\n", d.kind(), d.detail())
}

/// Runs a full search. With a checkpoint path, an existing checkpoint is
/// resumed and progress is saved after every batch of roots.
pub fn run_search(config: SearchConfig) -> Result<SearchReport, SearchError> {
    run_search_with(config, None)
}

pub fn run_search_with(
    config: SearchConfig,
    mut records: Option<&mut dyn Write>,
) -> Result<SearchReport, SearchError> {
    let path = config.checkpoint.clone();
    let mut search = match &path {
        Some(p) if p.exists() => Search::resume(config, p)?,
        _ => Search::new(config)?,
    };
    let batch = search.config.workers.max(1) * 4;
    // at least one batch, so leaves met while splitting are written out
    loop {
        search.run_roots_with(batch, records.as_mut().map(|w| &mut **w as &mut dyn Write))?;
        if let Some(p) = &path {
            search.checkpoint().save(p)?;
        }
        if search.pending() == 0 {
            break;
        }
    }
    Ok(search.into_report())
}
