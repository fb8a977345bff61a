use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::goalsys::TheoremEnv;
use crate::knowledge::CorpusEntry;
use crate::search::{SearchConfig, SearchStatus};

/// Outcome of one re-proving attempt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremRun {
    pub index: usize,
    pub name: String,
    pub status: String,
    /// Search time; proof post-processing is excluded.
    pub wall_ms: u64,
    pub steps: usize,
    pub nodes: usize,
    pub proof_units: Option<usize>,
    pub script: Option<String>,
    pub extracted: Option<String>,
    /// Replay results of the extracted, minimized and final scripts.
    pub replays: Option<[bool; 3]>,
}

impl TheoremRun {
    pub fn new(e: &CorpusEntry, status: &SearchStatus, env: &TheoremEnv) -> TheoremRun {
        let proof = status.proof();
        TheoremRun {
            index: e.index,
            name: format!("{}.{}", e.theory, e.name),
            status: status.label().to_string(),
            wall_ms: status.stats.wall_ms,
            steps: status.stats.steps,
            nodes: status.stats.nodes,
            proof_units: proof.map(|p| p.script.unit_count()),
            script: proof.map(|p| p.script.text.clone()),
            extracted: proof.map(|p| p.extracted.text.clone()),
            replays: proof.map(|p| {
                [
                    p.extracted.replays(&e.statement, env),
                    p.minimized.replays(&e.statement, env),
                    p.script.replays(&e.statement, env),
                ]
            }),
        }
    }

    pub fn is_proved(&self) -> bool {
        self.status == "proved"
    }
}

/// Per-theorem results of a run plus the aggregates plotted from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SearchConfig,
    pub theorems: Vec<TheoremRun>,
    pub attempted: usize,
    pub solved: usize,
    pub solve_rate: f64,
    /// `(seconds, solved within that time)`, one point per solved theorem.
    pub curve: Vec<(f64, usize)>,
    /// Proof length in units to number of proofs.
    pub histogram: BTreeMap<usize, usize>,
}

impl RunReport {
    pub fn new(config: SearchConfig, theorems: Vec<TheoremRun>) -> RunReport {
        let solved = theorems.iter().filter(|t| t.is_proved()).count();
        let attempted = theorems.len();
        let mut times: Vec<u64> = theorems.iter().filter(|t| t.is_proved()).map(|t| t.wall_ms).collect();
        times.sort_unstable();
        let curve = times.iter().enumerate().map(|(i, &ms)| (ms as f64 / 1000.0, i + 1)).collect();
        let mut histogram = BTreeMap::new();
        for u in theorems.iter().filter_map(|t| t.proof_units) {
            *histogram.entry(u).or_insert(0) += 1;
        }
        RunReport {
            config,
            theorems,
            attempted,
            solved,
            solve_rate: if attempted == 0 { 0.0 } else { solved as f64 / attempted as f64 },
            curve,
            histogram,
        }
    }

    pub fn solved_names(&self) -> Vec<&str> {
        self.theorems.iter().filter(|t| t.is_proved()).map(|t| t.name.as_str()).collect()
    }

    /// The report with timing fields zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> RunReport {
        let theorems = self.theorems.iter().map(|t| TheoremRun { wall_ms: 0, ..t.clone() }).collect();
        let mut r = RunReport::new(self.config.clone(), theorems);
        r.curve.iter_mut().for_each(|p| p.0 = 0.0);
        r
    }

    pub fn curve_csv(&self) -> String {
        let mut s = String::from("seconds,solved\n");
        for (t, n) in &self.curve {
            writeln!(s, "{t:.3},{n}").unwrap();
        }
        s
    }

    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("units,proofs\n");
        for (u, n) in &self.histogram {
            writeln!(s, "{u},{n}").unwrap();
        }
        s
    }

    /// Writes `report.json`, `curve.csv` and `histogram.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        fs::write(dir.join("curve.csv"), self.curve_csv())?;
        fs::write(dir.join("histogram.csv"), self.histogram_csv())
    }
}
