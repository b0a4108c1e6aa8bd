//! Direct step-by-step simulation.

use std::fmt;

use thiserror::Error;

use crate::machine::{StateId, Symbol, Transition, TransitionTable};
use crate::tape::Tape;

/// Complete instantaneous description of a running machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub tape: Tape,
    pub head: i64,
    pub state: StateId,
    pub steps: u64,
}

impl Default for Configuration {
    fn default() -> Self {
        Configuration::start()
    }
}

/// Outcome of a single in-place step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Continue,
    Halted,
    /// No entry for this pair; the configuration is left untouched.
    Undefined(StateId, Symbol),
}

/// Outcome of [`step`] on an immutable configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Next(Configuration),
    Halted(Configuration),
    Undefined,
}

impl Configuration {
    /// Blank tape, head on cell 0, state A.
    pub fn start() -> Self {
        Configuration {
            tape: Tape::new(),
            head: 0,
            state: StateId::START,
            steps: 0,
        }
    }

    #[inline]
    pub fn read(&self) -> Symbol {
        self.tape.get(self.head)
    }

    pub fn is_halted(&self) -> bool {
        self.state.is_halt()
    }

    /// Applies `t` to the current cell: write, move, change state.
    #[inline]
    pub fn apply(&mut self, t: Transition) {
        self.tape.set(self.head, t.write);
        self.head += t.dir.delta();
        self.tape.visit(self.head);
        self.state = t.next;
        self.steps += 1;
    }

    #[inline]
    pub fn step(&mut self, table: &TransitionTable) -> Step {
        debug_assert!(!self.state.is_halt());
        let sym = self.read();
        match table.get(self.state, sym) {
            None => Step::Undefined(self.state, sym),
            Some(t) => {
                self.apply(t);
                if t.next.is_halt() {
                    Step::Halted
                } else {
                    Step::Continue
                }
            }
        }
    }

    /// Runs until halt, an undefined pair, or `steps` reaches `limit`.
    pub fn run(&mut self, table: &TransitionTable, limit: u64) -> Step {
        while self.steps < limit {
            match self.step(table) {
                Step::Continue => {}
                other => return other,
            }
        }
        Step::Continue
    }
}

/// One step without mutating `config`.
pub fn step(config: &Configuration, table: &TransitionTable) -> StepResult {
    let mut next = config.clone();
    match next.step(table) {
        Step::Continue => StepResult::Next(next),
        Step::Halted => StepResult::Halted(next),
        Step::Undefined(..) => StepResult::Undefined,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunKind {
    HaltedBlank,
    HaltedDirty,
    Cutoff,
}

impl RunKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RunKind::HaltedBlank => "halted-blank",
            RunKind::HaltedDirty => "halted-dirty",
            RunKind::Cutoff => "cutoff",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RunResult {
    pub kind: RunKind,
    pub steps: u64,
    pub head: i64,
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.as_str(), self.steps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("undefined transition ({state}, {symbol}) reached at step {step}")]
    UndefinedTransition {
        state: StateId,
        symbol: Symbol,
        step: u64,
    },
}

impl RunResult {
    fn from_config(config: &Configuration) -> Self {
        let kind = if !config.is_halted() {
            RunKind::Cutoff
        } else if config.tape.is_blank() {
            RunKind::HaltedBlank
        } else {
            RunKind::HaltedDirty
        };
        RunResult {
            kind,
            steps: config.steps,
            head: config.head,
        }
    }
}

/// Simulates from the blank tape for at most `max_steps` steps.
pub fn simulate(table: &TransitionTable, max_steps: u64) -> Result<RunResult, SimError> {
    simulate_from(Configuration::start(), table, max_steps)
}

/// Simulates from `config` until `config.steps` reaches `max_steps`.
pub fn simulate_from(
    mut config: Configuration,
    table: &TransitionTable,
    max_steps: u64,
) -> Result<RunResult, SimError> {
    if config.is_halted() {
        return Ok(RunResult::from_config(&config));
    }
    match config.run(table, max_steps) {
        Step::Undefined(state, symbol) => Err(SimError::UndefinedTransition {
            state,
            symbol,
            step: config.steps,
        }),
        _ => Ok(RunResult::from_config(&config)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{parse_machine, Dir};

    fn run(s: &str, cap: u64) -> RunResult {
        simulate(&parse_machine(s).unwrap(), cap).unwrap()
    }

    #[test]
    fn champions_halt_blank() {
        let cases = [
            ("0RZ0RZ", 1),
            ("0RB0RZ_1LA0RZ", 4),
            ("1RB1LB_1LA0LC_0RZ0LD_1RD0LB", 34),
        ];
        for (m, steps) in cases {
            let r = run(m, 10_000);
            assert_eq!(r.kind, RunKind::HaltedBlank, "{m}");
            assert_eq!(r.steps, steps, "{m}");
        }
    }

    #[test]
    fn six_state_candidate() {
        let r = run("1RB1RA_1LB1LC_1RD0RE_0LE0RA_0RZ0RF_0RB0RC", 500_000);
        assert_eq!(r.kind, RunKind::HaltedBlank);
        assert_eq!(r.steps, 438_120);
    }

    #[test]
    fn cutoff_below_halt() {
        let r = run("0RB0RZ_1LA0RZ", 3);
        assert_eq!(r.kind, RunKind::Cutoff);
        assert_eq!(r.steps, 3);
    }

    #[test]
    fn dirty_halt() {
        let r = run("1RZ1RZ", 10);
        assert_eq!(r.kind, RunKind::HaltedDirty);
        assert_eq!(r.steps, 1);
        assert_eq!(r.head, 1);
    }

    #[test]
    fn first_step_of_two_state_champion() {
        let t = parse_machine("0RB0RZ_1LA0RZ").unwrap();
        let StepResult::Next(c) = step(&Configuration::start(), &t) else {
            panic!("expected a regular step");
        };
        assert_eq!(c.head, 1);
        assert_eq!(c.state, StateId(1));
        assert!(c.tape.is_blank());
        assert_eq!(c.steps, 1);
    }

    #[test]
    fn state_a_reading_one_moves_right() {
        let t = parse_machine("1RB1RA_1LB1LC_1RD0RE_0LE0RA_0RZ0RF_0RB0RC").unwrap();
        let mut c = Configuration {
            tape: Tape::from_symbols(0, &[1]),
            ..Configuration::start()
        };
        assert_eq!(
            t.get(StateId(0), Symbol(1)),
            Some(Transition::new(1, Dir::Right, StateId(0)))
        );
        let StepResult::Next(next) = step(&c, &t) else {
            panic!()
        };
        assert_eq!(next.state, StateId(0));
        assert_eq!(next.head, 1);
        assert_eq!(next.tape.get(0), Symbol(1));
        c.steps = 7;
        assert_eq!(step(&c, &t).clone(), {
            let mut e = next.clone();
            e.steps = 8;
            StepResult::Next(e)
        });
    }

    #[test]
    fn undefined_is_a_value_in_step_and_an_error_in_simulate() {
        let t = parse_machine("1RB---_------").unwrap();
        let mut c = Configuration::start();
        assert_eq!(c.step(&t), Step::Continue);
        assert_eq!(step(&c, &t), StepResult::Undefined);
        assert_eq!(
            simulate(&t, 10),
            Err(SimError::UndefinedTransition {
                state: StateId(1),
                symbol: Symbol(0),
                step: 1
            })
        );
    }

    #[test]
    fn halted_step_carries_post_move_config() {
        let t = parse_machine("0LZ0LZ").unwrap();
        let StepResult::Halted(c) = step(&Configuration::start(), &t) else {
            panic!()
        };
        assert_eq!(c.head, -1);
        assert!(c.is_halted());
        assert_eq!(c.steps, 1);
    }
}
