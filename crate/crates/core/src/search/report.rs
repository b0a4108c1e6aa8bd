use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ConfigEcho, SearchError};
use crate::deciders::{Decision, Reason};
use crate::enumerate::{Mode, WalkStats};
use crate::machine::TransitionTable;

/// Stored unknown machine strings are capped at this many.
pub const UNKNOWN_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChampionRecord {
    pub machine: String,
    pub steps: u64,
    /// Strict mode, default enumeration, whole tree walked, no unknowns.
    pub proven: bool,
}

/// The lexicographically smallest unknown machines plus the full count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownList {
    pub total: u64,
    pub machines: Vec<String>,
}

impl UnknownList {
    fn push(&mut self, machine: String) {
        self.total += 1;
        self.machines.push(machine);
        if self.machines.len() >= 2 * UNKNOWN_CAP {
            self.compact();
        }
    }

    fn compact(&mut self) {
        self.machines.sort_unstable();
        self.machines.truncate(UNKNOWN_CAP);
    }

    fn merge(&mut self, other: &UnknownList) {
        self.total += other.total;
        self.machines.extend(other.machines.iter().cloned());
        self.compact();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: ConfigEcho,
    pub champion: Option<ChampionRecord>,
    /// Machines emitted per verdict kind.
    pub counts: BTreeMap<String, u64>,
    /// Conclusive non-halting verdicts per `kind/reason`.
    pub reasons: BTreeMap<String, u64>,
    pub unknown: UnknownList,
    /// Enumeration nodes simulated, leaves included.
    pub nodes: u64,
    pub pruned_equivalent: u64,
    /// False when a node budget cut the walk short.
    pub complete: bool,
    /// Not part of the persisted report, which must be reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SearchReport {
    /// The identity for [`merge_reports`].
    pub fn empty(config: ConfigEcho) -> Self {
        SearchReport {
            config,
            champion: None,
            counts: BTreeMap::new(),
            reasons: BTreeMap::new(),
            unknown: UnknownList::default(),
            nodes: 0,
            pruned_equivalent: 0,
            complete: true,
            wall_time: Duration::ZERO,
        }
    }

    /// Machines emitted, i.e. the sum of all verdict counts.
    pub fn emitted(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn record(&mut self, table: &TransitionTable, decision: Decision) {
        bump(&mut self.counts, decision.kind());
        match decision {
            Decision::HaltsBlank(steps) => {
                let beaten = self.champion.as_ref().is_some_and(|c| steps < c.steps);
                if !beaten {
                    self.offer_champion(table.to_string(), steps);
                }
            }
            Decision::NonHalting(r) | Decision::NoBlankHalt(r) => {
                bump(&mut self.reasons, reason_key(decision.kind(), r));
            }
            Decision::Unknown(_) => self.unknown.push(table.to_string()),
            Decision::HaltsDirty(_) => {}
        }
    }

    pub fn add_stats(&mut self, stats: &WalkStats) {
        self.nodes += stats.nodes;
        self.pruned_equivalent += stats.pruned_equivalent;
    }

    fn offer_champion(&mut self, machine: String, steps: u64) {
        let better = match &self.champion {
            None => true,
            Some(c) => steps > c.steps || (steps == c.steps && machine < c.machine),
        };
        if better {
            self.champion = Some(ChampionRecord {
                machine,
                steps,
                proven: false,
            });
        }
        self.refresh_proven();
    }

    /// Whether the report establishes its champion as the class maximum.
    pub fn is_proven(&self) -> bool {
        self.config.strict
            && self.config.mode == Mode::Default
            && self.complete
            && self.unknown.total == 0
    }

    /// Compacts the unknown list and settles the proven flag.
    pub fn finalize(&mut self) {
        self.unknown.compact();
        self.refresh_proven();
    }

    fn refresh_proven(&mut self) {
        let proven = self.is_proven();
        if let Some(c) = &mut self.champion {
            c.proven = proven;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let mut r: SearchReport = serde_json::from_str(text)?;
        r.unknown.compact();
        Ok(r)
    }
}

/// Adds one to `key` without allocating when the key is already present.
fn bump(map: &mut BTreeMap<String, u64>, key: &str) {
    match map.get_mut(key) {
        Some(v) => *v += 1,
        None => {
            map.insert(key.to_owned(), 1);
        }
    }
}

/// The `kind/reason` key of a flagged verdict.
fn reason_key(kind: &str, reason: Reason) -> &'static str {
    static KEYS: OnceLock<Vec<String>> = OnceLock::new();
    let keys = KEYS.get_or_init(|| {
        ["non-halting", "no-blank-halt"]
            .iter()
            .flat_map(|k| Reason::ALL.iter().map(move |r| format!("{k}/{r}")))
            .collect()
    });
    let k = usize::from(kind != "non-halting");
    &keys[k * Reason::ALL.len() + reason as usize]
}

/// Combines reports over disjoint parts of the same search.
pub fn merge_reports(a: SearchReport, b: SearchReport) -> Result<SearchReport, SearchError> {
    if a.config != b.config {
        return Err(SearchError::ConfigMismatch);
    }
    let mut out = a;
    for (k, v) in b.counts {
        *out.counts.entry(k).or_default() += v;
    }
    for (k, v) in b.reasons {
        *out.reasons.entry(k).or_default() += v;
    }
    out.unknown.merge(&b.unknown);
    out.nodes += b.nodes;
    out.pruned_equivalent += b.pruned_equivalent;
    out.complete &= b.complete;
    out.wall_time = out.wall_time.max(b.wall_time);
    if let Some(c) = b.champion {
        out.offer_champion(c.machine, c.steps);
    }
    out.refresh_proven();
    Ok(out)
}
