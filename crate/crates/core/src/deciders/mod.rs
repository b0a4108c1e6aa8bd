//! Halting and non-halting analyses. Every verdict other than `Unknown` is
//! sound, except `EscapeHeuristic`, which is only produced when
//! `escape_enabled` is set.

mod backward;
mod bounds;
mod cycler;
mod reach;
mod translated;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use backward::{backward_reasoning, BackwardConfig, NonHaltingProof, ProofNode, Refutation};
pub use bounds::{BoundsError, KnownBounds};
pub use cycler::{confirm_period, cycler_check, CyclerDetector};
pub use reach::{blank_halt_feasible, halt_reachability, halt_reachable_from};
pub use translated::{translated_cycler_check, TranslatedDetector};

use crate::machine::{StateId, Symbol, TransitionTable};
use crate::sim::{Configuration, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    BackwardContradiction,
    HaltUnreachable,
    CyclerRepeat,
    TranslatedCycler,
    EscapeHeuristic,
    KnownBoundExceeded,
}

impl Reason {
    pub const ALL: [Reason; 6] = [
        Reason::BackwardContradiction,
        Reason::HaltUnreachable,
        Reason::CyclerRepeat,
        Reason::TranslatedCycler,
        Reason::EscapeHeuristic,
        Reason::KnownBoundExceeded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Reason::BackwardContradiction => "backward-contradiction",
            Reason::HaltUnreachable => "halt-unreachable",
            Reason::CyclerRepeat => "cycler-repeat",
            Reason::TranslatedCycler => "translated-cycler",
            Reason::EscapeHeuristic => "escape-heuristic",
            Reason::KnownBoundExceeded => "known-bound-exceeded",
        }
    }
}

impl FromStr for Reason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Reason::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown reason {s:?}"))
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict for one machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    HaltsBlank(u64),
    HaltsDirty(u64),
    NonHalting(Reason),
    /// May halt, but never on a blank tape.
    NoBlankHalt(Reason),
    /// Undecided within the given step cap.
    Unknown(u64),
}

impl Decision {
    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Decision::Unknown(_))
    }

    /// Short verdict name used in records and counters.
    pub fn kind(&self) -> &'static str {
        match self {
            Decision::HaltsBlank(_) => "halts-blank",
            Decision::HaltsDirty(_) => "halts-dirty",
            Decision::NonHalting(_) => "non-halting",
            Decision::NoBlankHalt(_) => "no-blank-halt",
            Decision::Unknown(_) => "unknown",
        }
    }

    /// The steps-or-reason field of a record.
    pub fn detail(&self) -> String {
        match self {
            Decision::HaltsBlank(n) | Decision::HaltsDirty(n) | Decision::Unknown(n) => {
                n.to_string()
            }
            Decision::NonHalting(r) | Decision::NoBlankHalt(r) => r.as_str().to_string(),
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind(), self.detail())
    }
}

impl FromStr for Decision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, detail) = s
            .split_once(|c: char| c == ' ' || c == '\t')
            .ok_or_else(|| format!("malformed decision {s:?}"))?;
        let steps = || {
            detail
                .parse::<u64>()
                .map_err(|_| format!("bad step count {detail:?}"))
        };
        Ok(match kind {
            "halts-blank" => Decision::HaltsBlank(steps()?),
            "halts-dirty" => Decision::HaltsDirty(steps()?),
            "unknown" => Decision::Unknown(steps()?),
            "non-halting" => Decision::NonHalting(detail.parse()?),
            "no-blank-halt" => Decision::NoBlankHalt(detail.parse()?),
            _ => return Err(format!("unknown verdict {kind:?}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeciderLimits {
    pub max_steps: u64,
    pub backward_depth: usize,
    pub known_bounds: KnownBounds,
    pub escape_enabled: bool,
    /// Whether the translated-cycler check runs; it is sound, so strict mode
    /// keeps it.
    pub translated_enabled: bool,
    /// Number of retained cycler snapshots.
    pub cycler_memory: usize,
}

impl Default for DeciderLimits {
    fn default() -> Self {
        DeciderLimits {
            max_steps: 100_000,
            backward_depth: 16,
            known_bounds: KnownBounds::builtin(),
            escape_enabled: true,
            translated_enabled: true,
            cycler_memory: 4,
        }
    }
}

impl DeciderLimits {
    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps.max(1);
        self
    }

    /// Strict limits: no heuristic verdicts.
    pub fn strict(mut self) -> Self {
        self.escape_enabled = false;
        self
    }
}

/// The escape rule: the head is more than half the elapsed steps away from
/// the start cell.
#[inline]
pub fn escape_check(config: &Configuration) -> bool {
    config.steps >= 2 && 2 * config.head.unsigned_abs() > config.steps
}

/// `NonHalting(KnownBoundExceeded)` once a machine with a known bound for its
/// (partially) defined state count has run past that bound.
pub fn known_bound_cutoff(
    machine: &TransitionTable,
    steps: u64,
    limits: &DeciderLimits,
) -> Option<Decision> {
    let bound = limits
        .known_bounds
        .lookup(machine.defined_state_count(), machine.n_symbols())?;
    (steps > bound).then_some(Decision::NonHalting(Reason::KnownBoundExceeded))
}

/// Static verdicts that do not need simulation.
pub(crate) fn static_verdict(
    table: &TransitionTable,
    current: StateId,
    limits: &DeciderLimits,
) -> Option<Decision> {
    if !halt_reachable_from(table, current) {
        return Some(Decision::NonHalting(Reason::HaltUnreachable));
    }
    if !blank_halt_feasible(table) {
        return Some(Decision::NoBlankHalt(Reason::BackwardContradiction));
    }
    if backward_reasoning(table, limits.backward_depth).is_some() {
        return Some(Decision::NoBlankHalt(Reason::BackwardContradiction));
    }
    None
}

/// How a monitored run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RunEnd {
    Decided(Decision),
    Undefined(StateId, Symbol),
}

/// Simulates `config` under the in-loop checks until a verdict or an
/// undefined pair.
pub(crate) fn monitored_run(
    config: &mut Configuration,
    table: &TransitionTable,
    limits: &DeciderLimits,
) -> RunEnd {
    let bound = limits
        .known_bounds
        .lookup(table.defined_state_count(), table.n_symbols())
        .unwrap_or(u64::MAX);
    // the entry configuration may come straight from an expansion step
    if config.steps > bound {
        return RunEnd::Decided(Decision::NonHalting(Reason::KnownBoundExceeded));
    }
    if limits.escape_enabled && escape_check(config) {
        return RunEnd::Decided(Decision::NonHalting(Reason::EscapeHeuristic));
    }
    let mut cycler = CyclerDetector::new(limits.cycler_memory);
    cycler.observe(config);
    let mut translated = TranslatedDetector::new();
    while config.steps < limits.max_steps {
        let window = config.tape.window();
        match config.step(table) {
            Step::Continue => {}
            Step::Halted => {
                let d = if config.tape.is_blank() {
                    Decision::HaltsBlank(config.steps)
                } else {
                    Decision::HaltsDirty(config.steps)
                };
                return RunEnd::Decided(d);
            }
            Step::Undefined(s, sym) => return RunEnd::Undefined(s, sym),
        }
        if config.steps > bound {
            return RunEnd::Decided(Decision::NonHalting(Reason::KnownBoundExceeded));
        }
        if limits.escape_enabled && escape_check(config) {
            return RunEnd::Decided(Decision::NonHalting(Reason::EscapeHeuristic));
        }
        if let Some((i, j)) = cycler.observe(config) {
            if confirm_period(config, table, j - i) {
                return RunEnd::Decided(Decision::NonHalting(Reason::CyclerRepeat));
            }
        }
        if limits.translated_enabled && translated.observe(config, window) {
            return RunEnd::Decided(Decision::NonHalting(Reason::TranslatedCycler));
        }
    }
    RunEnd::Decided(Decision::Unknown(limits.max_steps))
}

/// Runs the static checks, then simulates from the blank tape with the
/// in-loop checks. Reaching an undefined pair yields `Unknown`.
pub fn decide(machine: &TransitionTable, limits: &DeciderLimits) -> Decision {
    if let Some(d) = static_verdict(machine, StateId::START, limits) {
        return d;
    }
    let mut config = Configuration::start();
    match monitored_run(&mut config, machine, limits) {
        RunEnd::Decided(d) => d,
        RunEnd::Undefined(..) => Decision::Unknown(limits.max_steps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_machine;
    use crate::tape::Tape;

    fn limits(max_steps: u64) -> DeciderLimits {
        DeciderLimits::default().with_max_steps(max_steps)
    }

    #[test]
    fn decides_champions() {
        let five = parse_machine("0RB0LA_0RC0LZ_1RD1LE_1LA0LD_1RC1RE").unwrap();
        assert_eq!(
            decide(&five, &limits(1000).strict()),
            Decision::HaltsBlank(187)
        );
        let six = parse_machine("1RB1RA_1LB1LC_1RD0RE_0LE0RA_0RZ0RF_0RB0RC").unwrap();
        assert_eq!(
            decide(&six, &limits(1_000_000)),
            Decision::HaltsBlank(438_120)
        );
    }

    #[test]
    fn unreachable_halt() {
        let t = parse_machine("1RA1RA").unwrap();
        assert_eq!(
            decide(&t, &limits(100)),
            Decision::NonHalting(Reason::HaltUnreachable)
        );
    }

    #[test]
    fn dirty_halt_only() {
        let t = parse_machine("1RB1RZ_0LA1LB").unwrap();
        assert_eq!(
            decide(&t, &limits(100)),
            Decision::NoBlankHalt(Reason::BackwardContradiction)
        );
    }

    #[test]
    fn escape_rule_arithmetic() {
        let at = |head, steps| Configuration {
            tape: Tape::new(),
            head,
            state: StateId(0),
            steps,
        };
        assert!(escape_check(&at(3, 4)));
        assert!(!escape_check(&at(2, 4)));
        assert!(escape_check(&at(-3, 4)));
        assert!(!escape_check(&at(1, 1)));
    }

    #[test]
    fn right_runner_flagged_at_first_checked_step() {
        // halt reachable, so only simulation can conclude
        let t = parse_machine("1RA1RB_1RZ1RZ").unwrap();
        let mut c = Configuration::start();
        let end = monitored_run(&mut c, &t, &limits(100));
        assert_eq!(
            end,
            RunEnd::Decided(Decision::NonHalting(Reason::EscapeHeuristic))
        );
        assert_eq!(c.steps, 2);
    }

    #[test]
    fn known_bounds() {
        let l = limits(100);
        let four = parse_machine("1RB1LB_1LA0LC_0RZ0LD_1RD0LB").unwrap();
        let five = parse_machine("1RB1LE_1LC0LB_0RD0LC_0RA0RZ_1RA1RE").unwrap();
        assert_eq!(
            known_bound_cutoff(&four, 108, &l),
            Some(Decision::NonHalting(Reason::KnownBoundExceeded))
        );
        assert_eq!(known_bound_cutoff(&four, 107, &l), None);
        assert_eq!(
            known_bound_cutoff(&five, 47_176_871, &l),
            Some(Decision::NonHalting(Reason::KnownBoundExceeded))
        );
        assert_eq!(known_bound_cutoff(&five, 107, &l), None);
        assert_eq!(known_bound_cutoff(&five, 47_176_870, &l), None);
    }

    #[test]
    fn partial_states_count_as_defined() {
        let t = parse_machine("1RB---_1LC---_---1LD_0RZ---_------").unwrap();
        assert_eq!(t.defined_state_count(), 4);
        assert!(known_bound_cutoff(&t, 108, &limits(10)).is_some());
    }

    #[test]
    fn strict_mode_skips_escape() {
        let t = parse_machine("1RA0RZ_------").unwrap();
        let no_bounds = DeciderLimits {
            known_bounds: KnownBounds::empty(),
            ..limits(1000)
        };
        assert_eq!(
            decide(&t, &no_bounds.clone().strict()),
            Decision::NonHalting(Reason::TranslatedCycler)
        );
        // the escape rule misjudges this blank halter at step 2
        let halter = parse_machine("0RB0LA_0RC0LZ_1RD1LE_1LA0LD_1RC1RE").unwrap();
        assert_eq!(
            decide(&halter, &limits(1000)),
            Decision::NonHalting(Reason::EscapeHeuristic)
        );
        assert_eq!(
            decide(&halter, &limits(1000).strict()),
            Decision::HaltsBlank(187)
        );
    }

    #[test]
    fn decision_text_round_trip() {
        for d in [
            Decision::HaltsBlank(187),
            Decision::HaltsDirty(3),
            Decision::NonHalting(Reason::CyclerRepeat),
            Decision::NoBlankHalt(Reason::BackwardContradiction),
            Decision::Unknown(1000),
        ] {
            assert_eq!(d.to_string().parse::<Decision>().unwrap(), d);
        }
    }
}
