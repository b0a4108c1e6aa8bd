//! Translated cyclers: machines that repeat a bounded pattern while drifting
//! off in one direction.
//!
//! At a record step the head stands on a cell never visited before, so
//! everything beyond it is blank. Take two records on the same side, in the
//! same state, at steps `t1 < t2` and cells `p1`, `p2`, and let `m` be the
//! furthest the head fell back between them. If the tape from `m` to `p1` at
//! `t1` equals the tape from `m + (p2 - p1)` to `p2` at `t2`, the run from
//! `t2` replays the run from `t1` shifted by `p2 - p1`, forever.

use crate::sim::Configuration;

/// Longest remembered segment behind a reference record.
pub const SEGMENT: usize = 1024;

#[derive(Clone)]
struct Side {
    /// +1 for right records, -1 for left records.
    sign: i64,
    armed: bool,
    state: u8,
    pos: i64,
    /// `cells[i]` is the cell `pos - sign * i`.
    cells: [u8; SEGMENT],
    len: usize,
    /// Furthest fall-back since the reference, as a distance behind `pos`.
    fallback: i64,
    records: u64,
    limit: u64,
}

impl Side {
    fn new(sign: i64) -> Self {
        Side {
            sign,
            armed: false,
            state: 0,
            pos: 0,
            cells: [0; SEGMENT],
            len: 0,
            fallback: 0,
            records: 0,
            limit: 1,
        }
    }

    #[inline]
    fn track(&mut self, head: i64) {
        if self.armed {
            self.fallback = self.fallback.max(self.sign * (self.pos - head));
        }
    }

    fn record(&mut self, config: &Configuration) -> bool {
        let state = config.state.0;
        if self.armed && state == self.state && (self.fallback as usize) < self.len {
            let matches = (0..=self.fallback as usize)
                .all(|i| config.tape.get(config.head - self.sign * i as i64).0 == self.cells[i]);
            if matches {
                return true;
            }
        }
        self.records += 1;
        if !self.armed || self.records >= self.limit {
            self.arm(config);
        }
        false
    }

    fn arm(&mut self, config: &Configuration) {
        let (lo, hi) = config.tape.window();
        let behind = if self.sign > 0 {
            config.head - lo
        } else {
            hi - config.head
        };
        self.len = (behind as usize + 1).min(SEGMENT);
        for i in 0..self.len {
            self.cells[i] = config.tape.get(config.head - self.sign * i as i64).0;
        }
        self.armed = true;
        self.state = config.state.0;
        self.pos = config.head;
        self.fallback = 0;
        self.records = 0;
        self.limit = self.limit.saturating_mul(2);
    }
}

/// Watches record steps on both sides of the tape.
#[derive(Clone)]
pub struct TranslatedDetector {
    right: Side,
    left: Side,
}

impl Default for TranslatedDetector {
    fn default() -> Self {
        TranslatedDetector::new()
    }
}

impl TranslatedDetector {
    pub fn new() -> Self {
        TranslatedDetector {
            right: Side::new(1),
            left: Side::new(-1),
        }
    }

    /// Feeds the configuration after a step; `window` is the visited window
    /// before that step. Returns true once a translated cycle is proven.
    #[inline]
    pub fn observe(&mut self, config: &Configuration, window: (i64, i64)) -> bool {
        self.right.track(config.head);
        self.left.track(config.head);
        if config.head > window.1 {
            self.right.record(config)
        } else if config.head < window.0 {
            self.left.record(config)
        } else {
            false
        }
    }
}

/// Runs the machine from the blank tape for up to `max_steps` steps looking
/// for a translated cycle.
pub fn translated_cycler_check(table: &crate::machine::TransitionTable, max_steps: u64) -> bool {
    use crate::sim::Step;
    let mut config = Configuration::start();
    let mut detector = TranslatedDetector::new();
    while config.steps < max_steps {
        let window = config.tape.window();
        if config.step(table) != Step::Continue {
            return false;
        }
        if detector.observe(&config, window) {
            return true;
        }
    }
    false
}
