//! Backward reasoning from the blank-tape halt.
//!
//! The final tape of a blank halt is known exactly, and every step only
//! changes the cell under the head, so each predecessor configuration is fully
//! concrete: the incoming transition's written symbol must equal the cell it
//! wrote, and that cell held the read symbol before. A machine for which every
//! branch of this predecessor tree dies can never halt on a blank tape.

use std::collections::BTreeMap;

use crate::machine::{StateId, Symbol, TransitionTable};

/// Cap on explored predecessor nodes; beyond it the search gives up.
const NODE_BUDGET: usize = 20_000;

/// A concrete configuration in the predecessor tree. `cells` holds the
/// non-blank cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardConfig {
    pub state: StateId,
    pub head: i64,
    pub cells: BTreeMap<i64, Symbol>,
}

impl BackwardConfig {
    pub fn cell(&self, pos: i64) -> Symbol {
        self.cells.get(&pos).copied().unwrap_or(Symbol::BLANK)
    }

    fn with_cell(&self, pos: i64, sym: Symbol) -> BTreeMap<i64, Symbol> {
        let mut cells = self.cells.clone();
        if sym.is_blank() {
            cells.remove(&pos);
        } else {
            cells.insert(pos, sym);
        }
        cells
    }
}

/// A transition into the node's state whose written symbol disagrees with
/// the cell it would have written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub from: (StateId, Symbol),
    pub cell: i64,
    pub written: Symbol,
    pub found: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub config: BackwardConfig,
    /// Consistent predecessors, each reached through the named transition.
    pub children: Vec<((StateId, Symbol), ProofNode)>,
    /// Transitions into this state ruled out by a cell mismatch.
    pub refutations: Vec<Refutation>,
}

/// The exhausted predecessor tree of the blank halt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonHaltingProof {
    pub root: ProofNode,
}

impl NonHaltingProof {
    /// Longest root-to-leaf path, in steps.
    pub fn depth(&self) -> usize {
        fn go(n: &ProofNode) -> usize {
            n.children.iter().map(|(_, c)| 1 + go(c)).max().unwrap_or(0)
        }
        1 + go(&self.root)
    }

    pub fn leaves(&self) -> Vec<&ProofNode> {
        fn go<'a>(n: &'a ProofNode, out: &mut Vec<&'a ProofNode>) {
            if n.children.is_empty() {
                out.push(n);
            }
            for (_, c) in &n.children {
                go(c, out);
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }

    /// Re-derives every node against `table`: each child must follow from its
    /// transition, and every transition into a leaf's state must be refuted
    /// by a real cell mismatch.
    pub fn replay(&self, table: &TransitionTable) -> bool {
        fn check(n: &ProofNode, table: &TransitionTable) -> bool {
            let cfg = &n.config;
            let mut expected_children = 0;
            let mut expected_refutations = 0;
            for (from_state, read, t) in table.defined() {
                if t.next != cfg.state {
                    continue;
                }
                let pos = cfg.head - t.dir.delta();
                if cfg.cell(pos) == t.write {
                    expected_children += 1;
                    let Some((_, child)) =
                        n.children.iter().find(|(k, _)| *k == (from_state, read))
                    else {
                        return false;
                    };
                    let c = &child.config;
                    if c.state != from_state || c.head != pos || c.cells != cfg.with_cell(pos, read)
                    {
                        return false;
                    }
                } else {
                    expected_refutations += 1;
                    let ok = n.refutations.iter().any(|r| {
                        r.from == (from_state, read)
                            && r.cell == pos
                            && r.written == t.write
                            && r.found == cfg.cell(pos)
                            && r.found != r.written
                    });
                    if !ok {
                        return false;
                    }
                }
            }
            expected_children == n.children.len()
                && expected_refutations == n.refutations.len()
                && !is_start(cfg)
                && n.children.iter().all(|(_, c)| check(c, table))
        }
        !table.has_undefined() && check(&self.root, table)
    }
}

fn is_start(cfg: &BackwardConfig) -> bool {
    cfg.state == StateId::START && cfg.cells.is_empty()
}

/// Explores predecessors of the blank halt up to `depth` steps back. Returns a
/// proof when every branch dies within that depth; `None` when some branch
/// survives, reaches the start configuration, or the table has undefined
/// entries (which could become a halt).
pub fn backward_reasoning(table: &TransitionTable, depth: usize) -> Option<NonHaltingProof> {
    if table.has_undefined() || depth == 0 {
        return None;
    }
    let root = BackwardConfig {
        state: StateId::HALT,
        head: 0,
        cells: BTreeMap::new(),
    };
    let mut budget = NODE_BUDGET;
    let root = expand(table, root, depth, &mut budget)?;
    Some(NonHaltingProof { root })
}

fn expand(
    table: &TransitionTable,
    config: BackwardConfig,
    remaining: usize,
    budget: &mut usize,
) -> Option<ProofNode> {
    if is_start(&config) {
        return None;
    }
    if *budget == 0 {
        return None;
    }
    *budget -= 1;

    let mut children = Vec::new();
    let mut refutations = Vec::new();
    for (from_state, read, t) in table.defined() {
        if t.next != config.state {
            continue;
        }
        let pos = config.head - t.dir.delta();
        let found = config.cell(pos);
        if found != t.write {
            refutations.push(Refutation {
                from: (from_state, read),
                cell: pos,
                written: t.write,
                found,
            });
            continue;
        }
        // a live predecessor at the depth limit survives
        if remaining <= 1 {
            return None;
        }
        let pred = BackwardConfig {
            state: from_state,
            head: pos,
            cells: config.with_cell(pos, read),
        };
        let child = expand(table, pred, remaining - 1, budget)?;
        children.push(((from_state, read), child));
    }
    Some(ProofNode {
        config,
        children,
        refutations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_machine;

    #[test]
    fn dirty_only_halts_refuted_at_depth_one() {
        let t = parse_machine("1RB1RZ_0LA1LB").unwrap();
        let proof = backward_reasoning(&t, 1).expect("proof");
        assert_eq!(proof.depth(), 1);
        assert!(proof.replay(&t));
        assert_eq!(proof.root.refutations.len(), 1);
    }

    #[test]
    fn champions_have_no_proof() {
        for s in [
            "0RZ0RZ",
            "0RB0RZ_1LA0RZ",
            "0RB0LA_1LA0RC_1RB0LZ",
            "1RB1LB_1LA0LC_0RZ0LD_1RD0LB",
        ] {
            let t = parse_machine(s).unwrap();
            for d in 1..=20 {
                assert!(backward_reasoning(&t, d).is_none(), "{s} depth {d}");
            }
        }
    }

    #[test]
    fn partial_tables_are_never_refuted() {
        let t = parse_machine("1RB1RZ_0LA---").unwrap();
        assert!(backward_reasoning(&t, 16).is_none());
    }

    #[test]
    fn tampered_proof_fails_replay() {
        let t = parse_machine("1RB1RZ_0LA1LB").unwrap();
        let mut proof = backward_reasoning(&t, 1).unwrap();
        proof.root.refutations[0].found = Symbol(1);
        assert!(!proof.replay(&t));
        let other = parse_machine("1RB0RZ_0LA1LB").unwrap();
        assert!(!backward_reasoning(&t, 1).unwrap().replay(&other));
    }

    #[test]
    fn contradiction_at_depth_two() {
        // the halt writes blank, but the only way into B writes a 1 behind it
        let t = parse_machine("1RB0RA_0RZ0RA").unwrap();
        assert!(backward_reasoning(&t, 1).is_none());
        let proof = backward_reasoning(&t, 2).expect("proof");
        assert_eq!(proof.depth(), 2);
        assert!(proof.replay(&t));
        let r = crate::sim::simulate(&t, 100).unwrap();
        assert_eq!(r.kind, crate::sim::RunKind::HaltedDirty);
    }

    #[test]
    fn depth_two_proofs_hold_for_all_two_state_tables() {
        use crate::machine::{Dir, StateId, Transition, TransitionTable};
        let mut proofs = 0;
        for mut k in 0..12usize.pow(4) {
            let mut t = TransitionTable::new(2, 2);
            for i in 0..4 {
                let code = k % 12;
                k /= 12;
                let next = match code % 3 {
                    2 => StateId::HALT,
                    s => StateId(s as u8),
                };
                let dir = if (code / 3) % 2 == 0 {
                    Dir::Right
                } else {
                    Dir::Left
                };
                let tr = Transition::new((code / 6) as u8, dir, next);
                t.set(StateId((i / 2) as u8), Symbol((i % 2) as u8), Some(tr));
            }
            if backward_reasoning(&t, 2).is_some() {
                proofs += 1;
                // every halting 2-state table halts within 6 steps
                let r = crate::sim::simulate(&t, 100).unwrap();
                assert_ne!(r.kind, crate::sim::RunKind::HaltedBlank, "{t}");
            }
        }
        assert!(proofs > 0);
    }
}
