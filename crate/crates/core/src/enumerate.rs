//! Tree-normal-form enumeration.
//!
//! Machines grow lazily: a node is simulated until it reaches an undefined
//! `(state, symbol)` pair, and only then is that entry filled in, once per
//! legal action. New states and new symbols are introduced in first-use
//! order, the first move is to the right, and states whose rows turn out to
//! be interchangeable are pruned.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deciders::{monitored_run, static_verdict, DeciderLimits, Decision, RunEnd};
use crate::machine::{Dir, StateId, Symbol, Transition, TransitionTable, MAX_STATES};
use crate::sim::Configuration;

/// Which first writes the roots may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Roots write either blank or the first non-blank symbol.
    #[default]
    Default,
    /// Roots always write the first non-blank symbol.
    WriteOne,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Default => "default",
            Mode::WriteOne => "write-one",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(Mode::Default),
            "write-one" => Ok(Mode::WriteOne),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// A machine under construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMachine {
    pub table: TransitionTable,
    /// States referenced so far: A plus every target.
    pub used_states: usize,
    /// Largest non-blank symbol written so far (0 if none).
    pub used_symbols: usize,
}

impl PartialMachine {
    pub fn from_table(table: TransitionTable) -> Self {
        let mut used_states = 1;
        let mut used_symbols = 0;
        for (s, _, t) in table.defined() {
            used_states = used_states.max(s.index() + 1);
            if !t.next.is_halt() {
                used_states = used_states.max(t.next.index() + 1);
            }
            used_symbols = used_symbols.max(t.write.index());
        }
        PartialMachine {
            table,
            used_states,
            used_symbols,
        }
    }

    fn define(&self, state: StateId, symbol: Symbol, t: Transition) -> PartialMachine {
        let mut table = self.table.clone();
        table.set(state, symbol, Some(t));
        let used_states = if t.next.is_halt() {
            self.used_states
        } else {
            self.used_states.max(t.next.index() + 1)
        };
        PartialMachine {
            table,
            used_states,
            used_symbols: self.used_symbols.max(t.write.index()),
        }
    }

    fn define_in_place(&mut self, state: StateId, symbol: Symbol, t: Transition) {
        self.table.set(state, symbol, Some(t));
        if !t.next.is_halt() {
            self.used_states = self.used_states.max(t.next.index() + 1);
        }
        self.used_symbols = self.used_symbols.max(t.write.index());
    }

    /// Symbols a new transition may write: blank, every symbol used so far,
    /// and the next unused one.
    fn write_choices(&self) -> std::ops::RangeInclusive<u8> {
        let top = (self.used_symbols + 1).min(self.table.n_symbols() - 1);
        0..=top as u8
    }

    /// Target states in order: used states, one fresh state if any remain,
    /// then HALT.
    fn target_choices(&self) -> impl Iterator<Item = StateId> {
        let n = self.table.n_states();
        let limit = if self.used_states < n {
            self.used_states + 1
        } else {
            n
        };
        (0..limit as u8)
            .map(StateId)
            .chain(std::iter::once(StateId::HALT))
    }
}

/// A machine plus the configuration reached when its last entry was defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationNode {
    pub machine: PartialMachine,
    pub config: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("({0}, {1}) is already defined")]
    AlreadyDefined(StateId, Symbol),
}

/// Root machines: only `(A, 0)` defined, moving right, to B (HALT if `n == 1`).
///
/// Panics on an unsupported size.
pub fn root_machines(n: usize, m: usize, mode: Mode) -> Vec<PartialMachine> {
    let next = if n == 1 { StateId::HALT } else { StateId(1) };
    let writes: &[u8] = match mode {
        Mode::Default => &[0, 1],
        Mode::WriteOne => &[1],
    };
    let empty = PartialMachine::from_table(TransitionTable::new(n, m));
    writes
        .iter()
        .map(|&w| {
            empty.define(
                StateId::START,
                Symbol::BLANK,
                Transition::new(w, Dir::Right, next),
            )
        })
        .collect()
}

/// Root nodes: each root with its first transition applied.
pub fn root_nodes(n: usize, m: usize, mode: Mode) -> Vec<EnumerationNode> {
    root_machines(n, m, mode)
        .into_iter()
        .map(|machine| {
            let mut config = Configuration::start();
            let t = machine
                .table
                .get(StateId::START, Symbol::BLANK)
                .expect("root defines (A, 0)");
            config.apply(t);
            EnumerationNode { machine, config }
        })
        .collect()
}

/// One child per legal action for the pending pair, in the canonical order:
/// write ascending, right before left, target ascending, HALT last. Each
/// child's configuration has the new transition applied.
pub fn expand(
    node: &EnumerationNode,
    pending: (StateId, Symbol),
) -> Result<Vec<EnumerationNode>, ExpandError> {
    let (state, symbol) = pending;
    if node.machine.table.get(state, symbol).is_some() {
        return Err(ExpandError::AlreadyDefined(state, symbol));
    }
    let mut children = Vec::new();
    for write in node.machine.write_choices() {
        for dir in [Dir::Right, Dir::Left] {
            for next in node.machine.target_choices() {
                let t = Transition::new(write, dir, next);
                let machine = node.machine.define(state, symbol, t);
                let mut config = node.config.clone();
                config.apply(t);
                children.push(EnumerationNode { machine, config });
            }
        }
    }
    Ok(children)
}

/// A pair of distinct fully defined states that behave identically, found by
/// partition refinement: states start in one block and are split while their
/// rows disagree on write, move, or the block of the target.
pub fn equivalent_states(table: &TransitionTable) -> Option<(StateId, StateId)> {
    const HALT_BLOCK: usize = usize::MAX;
    let n = table.n_states();
    let mut full = [false; MAX_STATES];
    let mut n_full = 0;
    for s in table.states() {
        full[s.index()] = table.row_complete(s);
        n_full += usize::from(full[s.index()]);
    }
    if n_full < 2 {
        return None;
    }
    // a block is named by its lowest member; partial rows are singletons
    let mut block = [0usize; MAX_STATES];
    let first_full = (0..n).find(|&i| full[i]).unwrap_or(0);
    for i in 0..n {
        block[i] = if full[i] { first_full } else { i };
    }
    let mut blocks = 1;
    loop {
        let block_of = |s: StateId| {
            if s.is_halt() {
                HALT_BLOCK
            } else {
                block[s.index()]
            }
        };
        let same_row = |a: usize, b: usize| {
            table
                .row(StateId(a as u8))
                .iter()
                .zip(table.row(StateId(b as u8)))
                .all(|(x, y)| match (x, y) {
                    (Some(x), Some(y)) => {
                        x.write == y.write && x.dir == y.dir && block_of(x.next) == block_of(y.next)
                    }
                    _ => false,
                })
        };
        let mut next = block;
        let mut count = 0;
        for i in 0..n {
            if !full[i] {
                continue;
            }
            next[i] = (0..i)
                .find(|&j| full[j] && next[j] == j && block[j] == block[i] && same_row(i, j))
                .unwrap_or(i);
            count += usize::from(next[i] == i);
        }
        block = next;
        if count == blocks {
            break;
        }
        blocks = count;
    }
    for b in 0..n {
        if full[b] && block[b] != b {
            return Some((StateId(block[b] as u8), StateId(b as u8)));
        }
    }
    None
}

/// Counters from a traversal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStats {
    /// Nodes simulated, leaves included.
    pub nodes: u64,
    /// Children discarded because two states were equivalent.
    pub pruned_equivalent: u64,
}

impl WalkStats {
    pub fn add(&mut self, other: &WalkStats) {
        self.nodes += other.nodes;
        self.pruned_equivalent += other.pruned_equivalent;
    }
}

/// Result of processing one node.
pub enum NodeOutcome {
    Leaf(Decision),
    Children(Vec<EnumerationNode>),
}

/// Decides or expands a single node.
pub fn process_node(
    mut node: EnumerationNode,
    limits: &DeciderLimits,
    stats: &mut WalkStats,
) -> (TransitionTable, NodeOutcome) {
    stats.nodes += 1;
    let table = &node.machine.table;
    if node.config.is_halted() {
        let steps = node.config.steps;
        let d = if node.config.tape.is_blank() {
            Decision::HaltsBlank(steps)
        } else {
            Decision::HaltsDirty(steps)
        };
        return (node.machine.table, NodeOutcome::Leaf(d));
    }
    if let Some(d) = static_verdict(table, node.config.state, limits) {
        return (node.machine.table, NodeOutcome::Leaf(d));
    }
    match monitored_run(&mut node.config, table, limits) {
        RunEnd::Decided(d) => (node.machine.table, NodeOutcome::Leaf(d)),
        RunEnd::Undefined(state, symbol) => {
            let mut children = expand(&node, (state, symbol)).expect("pending pair is undefined");
            let before = children.len();
            if node
                .machine
                .table
                .row(state)
                .iter()
                .filter(|t| t.is_none())
                .count()
                == 1
            {
                // this expansion completes the row of `state`
                children.retain(|c| equivalent_states(&c.machine.table).is_none());
            }
            stats.pruned_equivalent += (before - children.len()) as u64;
            (node.machine.table, NodeOutcome::Children(children))
        }
    }
}

/// Depth-first walk of the subtree under `node`, emitting every leaf.
///
/// Produces the same leaves, in the same order, and the same counters as
/// repeatedly applying [`process_node`], but grows a single table in place.
pub fn walk<F>(node: EnumerationNode, limits: &DeciderLimits, stats: &mut WalkStats, sink: &mut F)
where
    F: FnMut(&TransitionTable, Decision),
{
    walk_limited(node, limits, stats, u64::MAX, sink);
}

/// Like [`walk`], but stops once `stats.nodes` reaches `node_budget`.
/// Returns whether the subtree was walked completely.
pub fn walk_limited<F>(
    node: EnumerationNode,
    limits: &DeciderLimits,
    stats: &mut WalkStats,
    node_budget: u64,
    sink: &mut F,
) -> bool
where
    F: FnMut(&TransitionTable, Decision),
{
    if stats.nodes >= node_budget {
        return false;
    }
    let EnumerationNode {
        mut machine,
        config,
    } = node;
    stats.nodes += 1;
    if config.is_halted() {
        sink(&machine.table, halt_decision(&config));
        return true;
    }
    if let Some(d) = static_verdict(&machine.table, config.state, limits) {
        sink(&machine.table, d);
        return true;
    }
    visit(&mut machine, config, limits, stats, node_budget, sink)
}

fn halt_decision(config: &Configuration) -> Decision {
    if config.tape.is_blank() {
        Decision::HaltsBlank(config.steps)
    } else {
        Decision::HaltsDirty(config.steps)
    }
}

/// Runs a node that passed the halted and static checks, then recurses into
/// its children.
fn visit<F>(
    machine: &mut PartialMachine,
    mut config: Configuration,
    limits: &DeciderLimits,
    stats: &mut WalkStats,
    node_budget: u64,
    sink: &mut F,
) -> bool
where
    F: FnMut(&TransitionTable, Decision),
{
    let (state, symbol) = match monitored_run(&mut config, &machine.table, limits) {
        RunEnd::Decided(d) => {
            sink(&machine.table, d);
            return true;
        }
        RunEnd::Undefined(state, symbol) => (state, symbol),
    };
    let completes_row = machine
        .table
        .row(state)
        .iter()
        .filter(|t| t.is_none())
        .count()
        == 1;
    let saved = (machine.used_states, machine.used_symbols);
    let read_blank = symbol.is_blank();
    let nonblank = config.tape.nonblank_count();
    for write in machine.write_choices() {
        for dir in [Dir::Right, Dir::Left] {
            for next in machine.target_choices() {
                if stats.nodes >= node_budget {
                    return false;
                }
                let t = Transition::new(write, dir, next);
                machine.define_in_place(state, symbol, t);
                let mut finished = true;
                if completes_row && equivalent_states(&machine.table).is_some() {
                    stats.pruned_equivalent += 1;
                } else if next.is_halt() {
                    stats.nodes += 1;
                    let after = nonblank - usize::from(!read_blank) + usize::from(write != 0);
                    let d = if after == 0 {
                        Decision::HaltsBlank(config.steps + 1)
                    } else {
                        Decision::HaltsDirty(config.steps + 1)
                    };
                    sink(&machine.table, d);
                } else if let Some(d) = static_verdict(&machine.table, next, limits) {
                    stats.nodes += 1;
                    sink(&machine.table, d);
                } else {
                    stats.nodes += 1;
                    let mut child = config.clone();
                    child.apply(t);
                    finished = visit(machine, child, limits, stats, node_budget, sink);
                }
                machine.table.set(state, symbol, None);
                (machine.used_states, machine.used_symbols) = saved;
                if !finished {
                    return false;
                }
            }
        }
    }
    true
}

/// Walks the whole tree for `n` states and `m` symbols.
pub fn enumerate<F>(
    n: usize,
    m: usize,
    mode: Mode,
    limits: &DeciderLimits,
    mut sink: F,
) -> WalkStats
where
    F: FnMut(&TransitionTable, Decision),
{
    let mut stats = WalkStats::default();
    for root in root_nodes(n, m, mode) {
        walk(root, limits, &mut stats, &mut sink);
    }
    stats
}
