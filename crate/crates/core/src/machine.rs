//! Machine representation and the compact text format.
//!
//! A machine string lists states in order `A, B, C, ...`, separated by `_`.
//! Each state carries one three-character transition per read symbol, in
//! ascending symbol order: written digit, `L`/`R`, next state letter, with
//! `Z` standing for the halting state. Undefined transitions print as `---`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

/// Largest supported alphabet: symbols are written as single digits.
pub const MAX_SYMBOLS: usize = 10;
/// Largest supported state count: letters `A..=Y`, `Z` is HALT.
pub const MAX_STATES: usize = 25;

/// A tape symbol; `Symbol::BLANK` is `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Symbol(pub u8);

impl Symbol {
    pub const BLANK: Symbol = Symbol(0);

    #[inline]
    pub fn is_blank(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A state index. `StateId::HALT` lies outside every machine's state range.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u8);

impl StateId {
    pub const START: StateId = StateId(0);
    pub const HALT: StateId = StateId(u8::MAX);

    #[inline]
    pub fn is_halt(self) -> bool {
        self == StateId::HALT
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn letter(self) -> char {
        if self.is_halt() {
            'Z'
        } else {
            (b'A' + self.0) as char
        }
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Right,
    Left,
}

impl Dir {
    #[inline]
    pub fn delta(self) -> i64 {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }

    pub fn flipped(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }

    fn letter(self) -> char {
        match self {
            Dir::Left => 'L',
            Dir::Right => 'R',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub write: Symbol,
    pub dir: Dir,
    pub next: StateId,
}

impl Transition {
    pub fn new(write: u8, dir: Dir, next: StateId) -> Self {
        Transition {
            write: Symbol(write),
            dir,
            next,
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.write,
            self.dir.letter(),
            self.next.letter()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty machine string")]
    Empty,
    #[error("state {state}: row length {len} is not a positive multiple of 3")]
    RowLength { state: usize, len: usize },
    #[error("state {state}: has {found} transitions, expected {expected}")]
    InconsistentRows {
        state: usize,
        found: usize,
        expected: usize,
    },
    #[error("malformed transition {triple:?}")]
    MalformedTriple { triple: String },
    #[error("symbol {symbol} out of range for {n_symbols} symbols")]
    SymbolOutOfRange { symbol: u8, n_symbols: usize },
    #[error("state {letter} out of range for {n_states} states")]
    StateOutOfRange { letter: char, n_states: usize },
    #[error("unsupported size: {n_states} states, {n_symbols} symbols")]
    UnsupportedSize { n_states: usize, n_symbols: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("permutation has length {found}, machine has {expected} states")]
    WrongLength { found: usize, expected: usize },
    #[error("permutation is not a bijection")]
    NotBijection,
    #[error("permutation moves the start state")]
    MovesStart,
}

/// The full `(state, symbol) -> transition` map of a machine. Entries may be
/// absent while the enumerator is still growing the table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransitionTable {
    n_states: u8,
    n_symbols: u8,
    entries: Vec<Option<Transition>>,
}

impl TransitionTable {
    /// An all-undefined table.
    ///
    /// Panics if the size is outside `1..=25` states or `2..=10` symbols.
    pub fn new(n_states: usize, n_symbols: usize) -> Self {
        assert!(
            (1..=MAX_STATES).contains(&n_states) && (2..=MAX_SYMBOLS).contains(&n_symbols),
            "unsupported machine size {n_states}x{n_symbols}"
        );
        TransitionTable {
            n_states: n_states as u8,
            n_symbols: n_symbols as u8,
            entries: vec![None; n_states * n_symbols],
        }
    }

    #[inline]
    pub fn n_states(&self) -> usize {
        self.n_states as usize
    }

    #[inline]
    pub fn n_symbols(&self) -> usize {
        self.n_symbols as usize
    }

    #[inline]
    fn slot(&self, state: StateId, symbol: Symbol) -> usize {
        state.index() * self.n_symbols as usize + symbol.index()
    }

    #[inline]
    pub fn get(&self, state: StateId, symbol: Symbol) -> Option<Transition> {
        self.entries[self.slot(state, symbol)]
    }

    pub fn set(&mut self, state: StateId, symbol: Symbol, t: Option<Transition>) {
        let slot = self.slot(state, symbol);
        self.entries[slot] = t;
    }

    /// Row of `state`, indexed by read symbol.
    pub fn row(&self, state: StateId) -> &[Option<Transition>] {
        let m = self.n_symbols();
        &self.entries[state.index() * m..(state.index() + 1) * m]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.n_states).map(StateId)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.n_symbols).map(Symbol)
    }

    /// All defined entries as `(state, symbol, transition)`.
    pub fn defined(&self) -> impl Iterator<Item = (StateId, Symbol, Transition)> + '_ {
        let m = self.n_symbols as usize;
        self.entries
            .iter()
            .enumerate()
            .filter_map(move |(i, t)| t.map(|t| (StateId((i / m) as u8), Symbol((i % m) as u8), t)))
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    pub fn has_undefined(&self) -> bool {
        !self.is_complete()
    }

    /// Whether every transition of `state` is defined.
    pub fn row_complete(&self, state: StateId) -> bool {
        self.row(state).iter().all(Option::is_some)
    }

    /// Number of states with at least one defined transition.
    pub fn defined_state_count(&self) -> usize {
        self.states()
            .filter(|&s| self.row(s).iter().any(Option::is_some))
            .count()
    }

    /// Every Left becomes Right and vice versa.
    pub fn mirror(&self) -> TransitionTable {
        let mut out = self.clone();
        for t in out.entries.iter_mut().flatten() {
            t.dir = t.dir.flipped();
        }
        out
    }

    /// Relabels states: state `i` becomes `perm[i]`. The start state and HALT
    /// must stay fixed.
    pub fn permute_states(&self, perm: &[usize]) -> Result<TransitionTable, PermutationError> {
        let n = self.n_states();
        if perm.len() != n {
            return Err(PermutationError::WrongLength {
                found: perm.len(),
                expected: n,
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(PermutationError::NotBijection);
            }
        }
        if perm[0] != 0 {
            return Err(PermutationError::MovesStart);
        }
        let relabel = |s: StateId| {
            if s.is_halt() {
                s
            } else {
                StateId(perm[s.index()] as u8)
            }
        };
        let mut out = TransitionTable::new(n, self.n_symbols());
        for (state, symbol, mut t) in self.defined() {
            t.next = relabel(t.next);
            out.set(relabel(state), symbol, Some(t));
        }
        Ok(out)
    }
}

impl fmt::Display for TransitionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for state in self.states() {
            if state.index() > 0 {
                f.write_str("_")?;
            }
            for t in self.row(state) {
                match t {
                    Some(t) => write!(f, "{t}")?,
                    None => f.write_str("---")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TransitionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransitionTable({self})")
    }
}

impl FromStr for TransitionTable {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_machine(s)
    }
}

/// Parses the compact machine format.
pub fn parse_machine(text: &str) -> Result<TransitionTable, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseError::Empty);
    }
    let rows: Vec<&[u8]> = text.split('_').map(str::as_bytes).collect();
    let n_states = rows.len();
    let first_len = rows[0].len();
    for (state, row) in rows.iter().enumerate() {
        if row.is_empty() || row.len() % 3 != 0 {
            return Err(ParseError::RowLength {
                state,
                len: row.len(),
            });
        }
        if row.len() != first_len {
            return Err(ParseError::InconsistentRows {
                state,
                found: row.len() / 3,
                expected: first_len / 3,
            });
        }
    }
    let n_symbols = first_len / 3;
    if !(1..=MAX_STATES).contains(&n_states) || !(2..=MAX_SYMBOLS).contains(&n_symbols) {
        return Err(ParseError::UnsupportedSize {
            n_states,
            n_symbols,
        });
    }

    let mut table = TransitionTable::new(n_states, n_symbols);
    for (state, row) in rows.iter().enumerate() {
        for (symbol, triple) in row.chunks_exact(3).enumerate() {
            let t = parse_triple(triple, n_states, n_symbols)?;
            table.set(StateId(state as u8), Symbol(symbol as u8), t);
        }
    }
    Ok(table)
}

fn parse_triple(
    triple: &[u8],
    n_states: usize,
    n_symbols: usize,
) -> Result<Option<Transition>, ParseError> {
    let malformed = || ParseError::MalformedTriple {
        triple: String::from_utf8_lossy(triple).into_owned(),
    };
    if triple == b"---" {
        return Ok(None);
    }
    let (w, d, s) = (triple[0], triple[1], triple[2]);
    if !w.is_ascii_digit() {
        return Err(malformed());
    }
    let write = w - b'0';
    if write as usize >= n_symbols {
        return Err(ParseError::SymbolOutOfRange {
            symbol: write,
            n_symbols,
        });
    }
    let dir = match d {
        b'L' => Dir::Left,
        b'R' => Dir::Right,
        _ => return Err(malformed()),
    };
    let next = match s {
        b'Z' => StateId::HALT,
        b'A'..=b'Y' => {
            let idx = s - b'A';
            if idx as usize >= n_states {
                return Err(ParseError::StateOutOfRange {
                    letter: s as char,
                    n_states,
                });
            }
            StateId(idx)
        }
        _ => return Err(malformed()),
    };
    Ok(Some(Transition {
        write: Symbol(write),
        dir,
        next,
    }))
}

pub fn format_machine(table: &TransitionTable) -> String {
    table.to_string()
}

/// Number of distinct complete machines with `n` states over `m` symbols:
/// `(2 m (n + 1))^(n m)`. For `m = 2` this is `(4n + 4)^(2n)`; larger
/// alphabets use the same per-entry counting.
pub fn count_raw_machines(n: u32, m: u32) -> BigUint {
    let per_entry = BigUint::from(2u32 * m * (n + 1));
    per_entry.pow(n * m)
}
