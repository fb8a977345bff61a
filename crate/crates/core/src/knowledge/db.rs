use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::goalsys::{Goal, GoalKey, TacticCode, ThmRef, TheoremEnv, BASE_DEFINITIONS, BASE_THEORY};
use crate::predict::{goal_features, goal_list_features, FeatureDb, FeatureRecord, Query, ScoredPredictions, SimKind};

/// One recorded tactic application. `tactic` is the stored (possibly
/// abstracted) code and is what coverage counts; `applied` is the concrete
/// code that produced `output` on `goal`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalTacticPair {
    pub goal: Goal,
    pub tactic: TacticCode,
    pub applied: TacticCode,
    pub output: Vec<Goal>,
    pub theory: String,
    pub seq: usize,
    /// Index of the corpus theorem whose proof produced the pair.
    pub theorem: usize,
}

/// Recorded goal-tactic pairs with coverage bookkeeping.
#[derive(Clone, Debug, Default)]
pub struct TacticDb {
    pairs: Vec<GoalTacticPair>,
    coverage: HashMap<TacticCode, BTreeSet<GoalKey>>,
    first_seen: HashMap<TacticCode, usize>,
    keys: Vec<GoalKey>,
    features: FeatureDb,
}

impl TacticDb {
    pub fn new() -> TacticDb {
        TacticDb::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[GoalTacticPair] {
        &self.pairs
    }

    pub fn get(&self, id: usize) -> &GoalTacticPair {
        &self.pairs[id]
    }

    /// Goal key of a stored pair.
    pub fn key(&self, id: usize) -> &GoalKey {
        &self.keys[id]
    }

    /// Appends a pair; its `seq` is overwritten with its index.
    pub fn insert(&mut self, mut pair: GoalTacticPair) -> usize {
        let id = self.pairs.len();
        pair.seq = id;
        let key = pair.goal.key();
        self.coverage.entry(pair.tactic.clone()).or_default().insert(key.clone());
        self.first_seen.entry(pair.tactic.clone()).or_insert(id);
        self.features.insert(&goal_features(&pair.goal));
        self.keys.push(key);
        self.pairs.push(pair);
        id
    }

    /// Number of distinct goals (up to alpha-equivalence) stored with `t`.
    pub fn coverage(&self, t: &TacticCode) -> usize {
        self.coverage.get(t).map_or(0, BTreeSet::len)
    }

    pub fn coverage_map(&self) -> BTreeMap<TacticCode, usize> {
        self.coverage.iter().map(|(t, s)| (t.clone(), s.len())).collect()
    }

    pub fn contains(&self, t: &TacticCode, key: &GoalKey) -> bool {
        self.coverage.get(t).is_some_and(|s| s.contains(key))
    }

    /// Index of the first pair stored with `t`.
    pub fn first_seen(&self, t: &TacticCode) -> Option<usize> {
        self.first_seen.get(t).copied()
    }

    pub fn features(&self) -> &FeatureDb {
        &self.features
    }

    pub fn predict(&self, query: &Query, k: usize, keep: impl Fn(usize) -> bool) -> ScoredPredictions {
        self.features.predict(query, k, SimKind::Sim1, keep)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub theory: String,
    pub name: String,
    pub statement: Goal,
    /// Qualified theorems referenced by the recorded proof.
    pub dependencies: Vec<ThmRef>,
    pub seq: usize,
}

impl TheoremRecord {
    pub fn reference(&self) -> ThmRef {
        ThmRef::qualified(self.theory.clone(), self.name.clone())
    }
}

#[derive(Clone, Debug, Default)]
pub struct TheoremDb {
    records: Vec<TheoremRecord>,
    index: HashMap<ThmRef, usize>,
    features: FeatureDb,
}

impl TheoremDb {
    pub fn new() -> TheoremDb {
        TheoremDb::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[TheoremRecord] {
        &self.records
    }

    pub fn get(&self, id: usize) -> &TheoremRecord {
        &self.records[id]
    }

    pub fn id_of(&self, r: &ThmRef) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn insert(&mut self, mut rec: TheoremRecord) -> usize {
        let id = self.records.len();
        rec.seq = id;
        self.index.insert(rec.reference(), id);
        self.features.insert(&goal_features(&rec.statement));
        self.records.push(rec);
        id
    }

    pub fn features(&self) -> &FeatureDb {
        &self.features
    }

    pub fn predict(&self, query: &Query, k: usize, keep: impl Fn(usize) -> bool) -> ScoredPredictions {
        self.features.predict(query, k, SimKind::Sim1, keep)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalListRecord {
    pub goals: Vec<Goal>,
    pub origin_goal: Goal,
    pub label: Label,
    pub seq: usize,
}

#[derive(Clone, Debug, Default)]
pub struct GoalListDb {
    records: Vec<GoalListRecord>,
    origin_keys: Vec<GoalKey>,
    features: FeatureDb,
}

impl GoalListDb {
    pub fn new() -> GoalListDb {
        GoalListDb::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[GoalListRecord] {
        &self.records
    }

    pub fn get(&self, id: usize) -> &GoalListRecord {
        &self.records[id]
    }

    pub fn origin_key(&self, id: usize) -> &GoalKey {
        &self.origin_keys[id]
    }

    pub fn insert(&mut self, mut rec: GoalListRecord) -> usize {
        let id = self.records.len();
        rec.seq = id;
        self.origin_keys.push(rec.origin_goal.key());
        self.features.insert(&goal_list_features(&rec.goals));
        self.records.push(rec);
        id
    }

    pub fn features(&self) -> &FeatureDb {
        &self.features
    }

    pub fn predict(&self, query: &Query, k: usize, keep: impl Fn(usize) -> bool) -> ScoredPredictions {
        self.features.predict(query, k, SimKind::Sim2, keep)
    }
}

/// Everything learned from the proofs seen so far.
#[derive(Clone, Debug)]
pub struct Knowledge {
    pub env: TheoremEnv,
    pub tactics: TacticDb,
    pub theorems: TheoremDb,
    pub goal_lists: GoalListDb,
    /// Number of corpus theorems recorded so far.
    pub recorded: usize,
}

impl Default for Knowledge {
    fn default() -> Self {
        Knowledge::new()
    }
}

impl Knowledge {
    /// Only the base definitions are known.
    pub fn new() -> Knowledge {
        let env = TheoremEnv::new();
        let mut theorems = TheoremDb::new();
        for (name, _) in BASE_DEFINITIONS {
            let r = ThmRef::qualified(BASE_THEORY, name);
            let statement = env.resolve(&r).expect("base theorem").clone();
            theorems.insert(TheoremRecord {
                theory: BASE_THEORY.to_string(),
                name: name.to_string(),
                statement,
                dependencies: Vec::new(),
                seq: 0,
            });
        }
        Knowledge {
            env,
            tactics: TacticDb::new(),
            theorems,
            goal_lists: GoalListDb::new(),
            recorded: 0,
        }
    }

    /// Writes `tactics.jsonl`, `theorems.jsonl`, `goallists.jsonl` and
    /// `features.jsonl` into `dir`.
    pub fn save(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        write_jsonl(&dir.join("tactics.jsonl"), self.tactics.pairs())?;
        write_jsonl(&dir.join("theorems.jsonl"), self.theorems.records())?;
        write_jsonl(&dir.join("goallists.jsonl"), self.goal_lists.records())?;
        let mut feats = self.tactics.features().records("tactic");
        feats.extend(self.theorems.features().records("theorem"));
        feats.extend(self.goal_lists.features().records("goal_list"));
        write_jsonl(&dir.join("features.jsonl"), &feats)
    }

    /// Inverse of [`Knowledge::save`]. Feature sets and frequencies are
    /// recomputed from the stored objects.
    pub fn load(dir: &Path) -> io::Result<Knowledge> {
        let mut k = Knowledge {
            env: TheoremEnv::new(),
            tactics: TacticDb::new(),
            theorems: TheoremDb::new(),
            goal_lists: GoalListDb::new(),
            recorded: 0,
        };
        for rec in read_jsonl::<TheoremRecord>(&dir.join("theorems.jsonl"))? {
            if rec.theory != BASE_THEORY {
                k.env.add(&rec.theory, &rec.name, rec.statement.clone());
                k.recorded += 1;
            }
            k.theorems.insert(rec);
        }
        for pair in read_jsonl::<GoalTacticPair>(&dir.join("tactics.jsonl"))? {
            k.tactics.insert(pair);
        }
        for rec in read_jsonl::<GoalListRecord>(&dir.join("goallists.jsonl"))? {
            k.goal_lists.insert(rec);
        }
        Ok(k)
    }
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> io::Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> io::Result<Vec<T>> {
    let file = io::BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in file.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Features of every stored object, as persisted.
pub fn read_feature_records(dir: &Path) -> io::Result<Vec<FeatureRecord>> {
    read_jsonl(&dir.join("features.jsonl"))
}
