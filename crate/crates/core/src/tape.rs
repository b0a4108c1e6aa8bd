//! Two-sided growable tape with a visited window.

use std::fmt;

use crate::machine::Symbol;

/// Contribution of a cell to the tape fingerprint. Blank cells contribute 0,
/// so the fingerprint depends only on the non-blank content and its position.
#[inline]
fn cell_hash(pos: i64, sym: u8) -> u64 {
    if sym == 0 {
        return 0;
    }
    let mut z = (pos as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(sym as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Cells outside `cells` are blank. Offsets are signed, the start cell is 0.
#[derive(Clone)]
pub struct Tape {
    cells: Vec<u8>,
    origin: i64,
    lo: i64,
    hi: i64,
    nonblank: usize,
    fingerprint: u64,
}

impl Default for Tape {
    fn default() -> Self {
        Tape::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            cells: vec![0; 16],
            origin: 8,
            lo: 0,
            hi: 0,
            nonblank: 0,
            fingerprint: 0,
        }
    }

    /// Builds a tape whose cell `start + i` holds `symbols[i]`; the visited
    /// window covers exactly those cells plus offset 0.
    pub fn from_symbols(start: i64, symbols: &[u8]) -> Self {
        let mut tape = Tape::new();
        tape.visit(start);
        for (i, &s) in symbols.iter().enumerate() {
            let pos = start + i as i64;
            tape.visit(pos);
            tape.set(pos, Symbol(s));
        }
        tape
    }

    #[inline]
    pub fn get(&self, pos: i64) -> Symbol {
        let idx = pos + self.origin;
        if idx < 0 || idx as usize >= self.cells.len() {
            Symbol::BLANK
        } else {
            Symbol(self.cells[idx as usize])
        }
    }

    /// Marks `pos` as visited, growing the backing storage if needed.
    #[inline]
    pub fn visit(&mut self, pos: i64) {
        if pos < self.lo {
            self.lo = pos;
        } else if pos > self.hi {
            self.hi = pos;
        } else {
            return;
        }
        self.reserve(pos);
    }

    #[inline]
    fn reserve(&mut self, pos: i64) {
        let idx = pos + self.origin;
        if idx < 0 {
            let grow = (self.cells.len() as i64).max(-idx) as usize;
            let mut cells = vec![0; grow + self.cells.len()];
            cells[grow..].copy_from_slice(&self.cells);
            self.cells = cells;
            self.origin += grow as i64;
        } else if idx as usize >= self.cells.len() {
            let need = idx as usize + 1;
            let new_len = need.max(self.cells.len() * 2);
            self.cells.resize(new_len, 0);
        }
    }

    /// Writes `sym` at `pos`; `pos` must already be visited.
    #[inline]
    pub fn set(&mut self, pos: i64, sym: Symbol) {
        debug_assert!(pos >= self.lo && pos <= self.hi);
        let idx = (pos + self.origin) as usize;
        let old = self.cells[idx];
        if old == sym.0 {
            return;
        }
        self.cells[idx] = sym.0;
        match (old == 0, sym.0 == 0) {
            (true, false) => self.nonblank += 1,
            (false, true) => self.nonblank -= 1,
            _ => {}
        }
        self.fingerprint = self
            .fingerprint
            .wrapping_sub(cell_hash(pos, old))
            .wrapping_add(cell_hash(pos, sym.0));
    }

    /// Leftmost and rightmost visited offsets.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn nonblank_count(&self) -> usize {
        self.nonblank
    }

    pub fn is_blank(&self) -> bool {
        self.nonblank == 0
    }

    /// Order-independent hash of the non-blank content.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Contents of the visited window, left to right.
    pub fn window_cells(&self) -> &[u8] {
        let a = (self.lo + self.origin) as usize;
        let b = (self.hi + self.origin) as usize;
        &self.cells[a..=b]
    }

    /// Offset of the first non-blank cell and the content up to the last
    /// non-blank cell; `None` for a blank tape.
    pub fn trimmed(&self) -> Option<(i64, &[u8])> {
        let w = self.window_cells();
        let first = w.iter().position(|&c| c != 0)?;
        let last = w.iter().rposition(|&c| c != 0)?;
        Some((self.lo + first as i64, &w[first..=last]))
    }

    /// Same non-blank content at the same offsets.
    pub fn same_content(&self, other: &Tape) -> bool {
        self.nonblank == other.nonblank
            && self.fingerprint == other.fingerprint
            && self.trimmed() == other.trimmed()
    }
}

impl PartialEq for Tape {
    fn eq(&self, other: &Self) -> bool {
        self.same_content(other)
    }
}

impl Eq for Tape {}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tape[{}..={}: ", self.lo, self.hi)?;
        for c in self.window_cells() {
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}
