//! Search and verification toolkit for Turing machines that start on a blank
//! tape and halt on a blank tape.

pub mod deciders;
pub mod enumerate;
pub mod machine;
pub mod macro_cert;
pub mod search;
pub mod sim;
pub mod tape;

pub use deciders::{decide, DeciderLimits, Decision, KnownBounds, Reason};
pub use enumerate::{enumerate, Mode};
pub use machine::{
    count_raw_machines, format_machine, parse_machine, Dir, ParseError, StateId, Symbol,
    Transition, TransitionTable,
};
pub use sim::{simulate, Configuration, RunKind, RunResult, SimError};
pub use tape::Tape;
