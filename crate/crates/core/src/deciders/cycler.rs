//! Exact configuration repeats, found with power-of-two snapshots.

use crate::machine::{StateId, TransitionTable};
use crate::sim::{Configuration, Step};

/// Upper limit on retained snapshots.
pub const MAX_SNAPSHOTS: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Snapshot {
    steps: u64,
    state: StateId,
    head: i64,
    nonblank: usize,
    fingerprint: u64,
}

impl Snapshot {
    fn of(c: &Configuration) -> Self {
        Snapshot {
            steps: c.steps,
            state: c.state,
            head: c.head,
            nonblank: c.tape.nonblank_count(),
            fingerprint: c.tape.fingerprint(),
        }
    }

    #[inline]
    fn matches(&self, c: &Configuration) -> bool {
        self.state == c.state
            && self.head == c.head
            && self.fingerprint == c.tape.fingerprint()
            && self.nonblank == c.tape.nonblank_count()
    }
}

/// Watches a single run for repeated configurations (state, head position,
/// tape content).
///
/// A snapshot is taken at the first observed configuration and then whenever
/// the number of observed steps reaches a power of two; every observation is
/// compared against the newest `budget` snapshots. Once the snapshot spacing
/// exceeds both the pre-period and the period, a repeat is caught within one
/// more spacing. Snapshots hold only a fingerprint of the tape, so a match is
/// a candidate that the caller confirms.
#[derive(Clone, Debug)]
pub struct CyclerDetector {
    budget: usize,
    /// Ring buffer; `len` live entries ending just before `head`.
    snapshots: [Snapshot; MAX_SNAPSHOTS],
    len: usize,
    head: usize,
    observed: u64,
    next_snapshot: u64,
}

impl CyclerDetector {
    /// `budget` is clamped to `1..=MAX_SNAPSHOTS`.
    pub fn new(budget: usize) -> Self {
        CyclerDetector {
            budget: budget.clamp(1, MAX_SNAPSHOTS),
            snapshots: [Snapshot::default(); MAX_SNAPSHOTS],
            len: 0,
            head: 0,
            observed: 0,
            next_snapshot: 0,
        }
    }

    /// Feeds the next configuration of the run; returns `(i, j)` step indices
    /// of a candidate repeat.
    #[inline]
    pub fn observe(&mut self, config: &Configuration) -> Option<(u64, u64)> {
        for snap in &self.snapshots[..self.len] {
            if snap.matches(config) {
                return Some((snap.steps, config.steps));
            }
        }
        if self.observed == self.next_snapshot {
            self.snapshots[self.head] = Snapshot::of(config);
            self.head = (self.head + 1) % self.budget;
            self.len = (self.len + 1).min(self.budget);
            self.next_snapshot = (self.next_snapshot * 2).max(1);
        }
        self.observed += 1;
        None
    }
}

/// Confirms that `config` recurs after exactly `period` more steps.
pub fn confirm_period(config: &Configuration, table: &TransitionTable, period: u64) -> bool {
    let mut probe = config.clone();
    for _ in 0..period {
        if probe.step(table) != Step::Continue {
            return false;
        }
    }
    probe.state == config.state && probe.head == config.head && probe.tape == config.tape
}

/// Scans a trace of one run for an exact repeat.
pub fn cycler_check<'a, I>(trace: I, budget: usize) -> Option<(u64, u64)>
where
    I: IntoIterator<Item = &'a Configuration>,
{
    let mut det = CyclerDetector::new(budget);
    let mut kept: Vec<&Configuration> = Vec::new();
    for c in trace {
        if let Some((i, j)) = det.observe(c) {
            let earlier = kept.iter().find(|k| k.steps == i)?;
            if earlier.state == c.state && earlier.head == c.head && earlier.tape == c.tape {
                return Some((i, j));
            }
        }
        if kept.last().map_or(true, |k| k.steps != c.steps) {
            kept.push(c);
        }
    }
    None
}
