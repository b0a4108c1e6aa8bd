//! Trusted maximum halting times, loaded from `states symbols max_steps` lines.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

const DEFAULT_BOUNDS: &str = include_str!("../../known_bounds.txt");

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("line {line}: expected `states symbols max_steps`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// `(states, symbols) -> max halting steps`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct KnownBounds {
    entries: BTreeMap<(usize, usize), u64>,
}

impl KnownBounds {
    pub fn empty() -> Self {
        KnownBounds::default()
    }

    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_BOUNDS).expect("builtin bounds file is well formed")
    }

    pub fn parse(text: &str) -> Result<Self, BoundsError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let malformed = || BoundsError::Malformed {
                line: i + 1,
                text: raw.to_string(),
            };
            let fields: Vec<u64> = line
                .split_whitespace()
                .map(|f| f.parse().map_err(|_| malformed()))
                .collect::<Result<_, _>>()?;
            match fields[..] {
                [n, m, steps] if n >= 1 && m >= 2 => {
                    entries.insert((n as usize, m as usize), steps);
                }
                _ => return Err(malformed()),
            }
        }
        Ok(KnownBounds { entries })
    }

    pub fn load(path: &Path) -> Result<Self, BoundsError> {
        let text = std::fs::read_to_string(path).map_err(|source| BoundsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, states: usize, symbols: usize, max_steps: u64) {
        self.entries.insert((states, symbols), max_steps);
    }

    /// Tightest bound that applies to a machine using `states` states and
    /// `symbols` symbols. A machine of that size is also a machine of every
    /// larger size, so every entry with at least as many states and symbols
    /// applies.
    pub fn lookup(&self, states: usize, symbols: usize) -> Option<u64> {
        self.entries
            .iter()
            .filter(|(&(n, m), _)| n >= states && m >= symbols)
            .map(|(_, &b)| b)
            .min()
    }

    /// Exact entry only.
    pub fn get(&self, states: usize, symbols: usize) -> Option<u64> {
        self.entries.get(&(states, symbols)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.entries.iter().map(|(&(n, m), &b)| (n, m, b))
    }
}
