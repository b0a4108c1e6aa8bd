//! Static checks on the transition graph.

use crate::machine::{StateId, TransitionTable};

/// Whether HALT is reachable from the states reachable from A.
pub fn halt_reachability(table: &TransitionTable) -> bool {
    halt_reachable_from(table, StateId::START)
}

/// Whether HALT is reachable in the state digraph starting at `from`.
/// An undefined entry counts as a possible exit.
pub fn halt_reachable_from(table: &TransitionTable, from: StateId) -> bool {
    if from.is_halt() {
        return true;
    }
    let mut seen: u32 = 1 << from.index();
    let mut todo: u32 = seen;
    while todo != 0 {
        let s = todo.trailing_zeros();
        todo &= todo - 1;
        for t in table.row(StateId(s as u8)) {
            let Some(t) = t else { return true };
            if t.next.is_halt() {
                return true;
            }
            let bit = 1 << t.next.index();
            if seen & bit == 0 {
                seen |= bit;
                todo |= bit;
            }
        }
    }
    false
}

/// False iff no transition into HALT writes blank, so the machine can never
/// halt on a blank tape. Undefined entries may still become a blank-writing
/// halt, so they keep the answer true.
pub fn blank_halt_feasible(table: &TransitionTable) -> bool {
    table.has_undefined()
        || table
            .defined()
            .any(|(_, _, t)| t.next.is_halt() && t.write.is_blank())
}
