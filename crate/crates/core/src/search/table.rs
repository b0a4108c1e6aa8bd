use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::SearchReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    pub n_states: usize,
    pub n_symbols: usize,
    /// Longest blank-halting run found, if any machine halts blank.
    pub steps: Option<u64>,
    pub machine: Option<String>,
    pub proven: bool,
}

/// The states × symbols grid of champion step counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDocument {
    pub cells: Vec<TableCell>,
}

/// One cell per report. If a class appears twice, the proven or longer
/// result wins.
pub fn emit_table(reports: &[SearchReport]) -> TableDocument {
    let mut cells: BTreeMap<(usize, usize), TableCell> = BTreeMap::new();
    for r in reports {
        let key = (r.config.n_states, r.config.n_symbols);
        let cell = TableCell {
            n_states: key.0,
            n_symbols: key.1,
            steps: r.champion.as_ref().map(|c| c.steps),
            machine: r.champion.as_ref().map(|c| c.machine.clone()),
            proven: r.champion.as_ref().is_some_and(|c| c.proven),
        };
        let rank = |c: &TableCell| (c.proven, c.steps);
        match cells.get(&key) {
            Some(old) if rank(old) >= rank(&cell) => {}
            _ => {
                cells.insert(key, cell);
            }
        }
    }
    TableDocument {
        cells: cells.into_values().collect(),
    }
}

impl TableDocument {
    pub fn get(&self, n_states: usize, n_symbols: usize) -> Option<&TableCell> {
        self.cells
            .iter()
            .find(|c| c.n_states == n_states && c.n_symbols == n_symbols)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Rows are state counts, columns symbol counts. Proven values carry a
    /// `*`; classes without a report show `—`.
    pub fn render_text(&self) -> String {
        if self.cells.is_empty() {
            return String::new();
        }
        let rows: BTreeSet<usize> = self.cells.iter().map(|c| c.n_states).collect();
        let cols: BTreeSet<usize> = self.cells.iter().map(|c| c.n_symbols).collect();
        let text = |n: usize, m: usize| match self.get(n, m) {
            Some(TableCell {
                steps: Some(s),
                proven,
                ..
            }) => {
                format!("{s}{}", if *proven { "*" } else { "" })
            }
            _ => "—".to_owned(),
        };
        let mut grid = vec![std::iter::once("states".to_owned())
            .chain(cols.iter().map(|m| format!("m={m}")))
            .collect::<Vec<_>>()];
        for &n in &rows {
            grid.push(
                std::iter::once(n.to_string())
                    .chain(cols.iter().map(|&m| text(n, m)))
                    .collect(),
            );
        }
        let widths: Vec<usize> = (0..=cols.len())
            .map(|i| grid.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &grid {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    let pad = w - cell.chars().count();
                    if i == 0 {
                        format!("{cell}{}", " ".repeat(pad))
                    } else {
                        format!("{}{cell}", " ".repeat(pad))
                    }
                })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out.push_str("* proven maximum\n");
        out
    }
}
