use serde::Serialize;

use super::{reprove_entries, HarnessError};
use crate::knowledge::CorpusEntry;
use crate::search::SearchConfig;

/// Values to try per configuration key, in file order.
pub type Grid = Vec<(String, Vec<String>)>;

/// Parses lines `key = v1, v2, ...`. Every value is checked against a
/// default configuration before any run starts.
pub fn parse_grid(text: &str) -> Result<Grid, HarnessError> {
    let mut grid = Grid::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, vs) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Grid(format!("line {}: expected `key = v1, v2, ...`", i + 1)))?;
        let key = k.trim().to_string();
        let values: Vec<String> = vs.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        if values.is_empty() {
            return Err(HarnessError::Grid(format!("line {}: no values for `{key}`", i + 1)));
        }
        for v in &values {
            let mut c = SearchConfig::default();
            c.set(&key, v)?;
            c.validate()?;
        }
        grid.push((key, values));
    }
    Ok(grid)
}

/// `(key, value)` pairs of one grid cell, in grid order.
pub type Assignment = Vec<(String, String)>;

/// Cartesian product of the grid over `base`, first key varying slowest.
pub fn grid_configs(base: &SearchConfig, grid: &Grid) -> Result<Vec<(Assignment, SearchConfig)>, HarnessError> {
    let mut out = vec![(Vec::new(), base.clone())];
    for (key, values) in grid {
        let mut next = Vec::new();
        for (assign, cfg) in &out {
            for v in values {
                let mut c = cfg.clone();
                c.set(key, v)?;
                c.validate()?;
                let mut a = assign.clone();
                a.push((key.clone(), v.clone()));
                next.push((a, c));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Training slice: every third theorem of the first half of the corpus.
pub fn tune_slice(entries: &[CorpusEntry]) -> Vec<usize> {
    (0..entries.len() / 2).step_by(3).map(|i| entries[i].index).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuneRow {
    pub assignment: Assignment,
    pub solved: usize,
    pub attempted: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuneTable {
    pub rows: Vec<TuneRow>,
    /// Row with the most solved theorems, the first one on ties.
    pub best: Option<usize>,
}

impl TuneTable {
    pub fn from_rows(rows: Vec<TuneRow>) -> TuneTable {
        let mut best: Option<usize> = None;
        for (i, r) in rows.iter().enumerate() {
            if best.is_none_or(|b| r.solved > rows[b].solved) {
                best = Some(i);
            }
        }
        TuneTable { rows, best }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let keys: Vec<&str> = self.rows.first().map(|r| r.assignment.iter().map(|(k, _)| k.as_str()).collect()).unwrap_or_default();
        for k in &keys {
            s.push_str(k);
            s.push(',');
        }
        s.push_str("solved,attempted\n");
        for r in &self.rows {
            for (_, v) in &r.assignment {
                s.push_str(v);
                s.push(',');
            }
            s.push_str(&format!("{},{}\n", r.solved, r.attempted));
        }
        s
    }
}

/// Re-proves the training slice once per grid cell.
pub fn tune(entries: &[CorpusEntry], base: &SearchConfig, grid: &Grid) -> Result<TuneTable, HarnessError> {
    let slice = tune_slice(entries);
    let mut rows = Vec::new();
    for (assignment, cfg) in grid_configs(base, grid)? {
        let report = reprove_entries(entries, &cfg, |e| slice.contains(&e.index));
        rows.push(TuneRow {
            assignment,
            solved: report.solved,
            attempted: report.attempted,
        });
    }
    Ok(TuneTable::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_validation() {
        let g = parse_grid("c_policy = 0.4, 0.5, 0.6\n# note\nevaluation = on,off").unwrap();
        let cells = grid_configs(&SearchConfig::default(), &g).unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[1].1.c_policy, 0.4);
        assert!(!cells[1].1.evaluation);
        assert!(parse_grid("c_policy = 0.5, 2").is_err());
        assert!(parse_grid("bogus = 1").is_err());
    }

    #[test]
    fn best_row_prefers_first_on_ties() {
        let row = |s| TuneRow {
            assignment: vec![],
            solved: s,
            attempted: 5,
        };
        let t = TuneTable::from_rows(vec![row(2), row(3), row(3)]);
        assert_eq!(t.best, Some(1));
    }
}
