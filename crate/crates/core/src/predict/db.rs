use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::features::FeatureSet;

/// Which similarity a dataset is ranked with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimKind {
    /// Sum of shared feature weights.
    Sim1,
    /// `Sim1` damped by the total feature count of both sides.
    Sim2,
}

/// Weight of a feature occurring in `df` of `n` objects: `ln(n/df)^6`.
pub fn idf6(n: usize, df: usize) -> f64 {
    if df == 0 || n == 0 {
        return 0.0;
    }
    (n as f64 / df as f64).ln().powi(6)
}

/// A query encoded against a database: known feature ids (sorted) and the
/// size of the original set, unknown features included.
#[derive(Clone, Debug, Default)]
pub struct Query {
    ids: Vec<u32>,
    len: usize,
}

impl Query {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Descending by score, ties by ascending object id.
pub type ScoredPredictions = Vec<(usize, f64)>;

/// Interned feature sets of one dataset plus document frequencies.
/// Object ids are insertion indices.
#[derive(Clone, Debug, Default)]
pub struct FeatureDb {
    names: Vec<String>,
    index: HashMap<String, u32>,
    df: Vec<usize>,
    entries: Vec<Vec<u32>>,
}

impl FeatureDb {
    pub fn new() -> FeatureDb {
        FeatureDb::default()
    }

    /// Number of objects.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, features: &FeatureSet) -> usize {
        let mut ids: Vec<u32> = features
            .iter()
            .map(|f| match self.index.get(f) {
                Some(&id) => id,
                None => {
                    let id = self.names.len() as u32;
                    self.names.push(f.clone());
                    self.index.insert(f.clone(), id);
                    self.df.push(0);
                    id
                }
            })
            .collect();
        ids.sort_unstable();
        for &id in &ids {
            self.df[id as usize] += 1;
        }
        self.entries.push(ids);
        self.entries.len() - 1
    }

    pub fn df(&self, feature: &str) -> usize {
        self.index.get(feature).map_or(0, |&id| self.df[id as usize])
    }

    /// Features of a stored object.
    pub fn features(&self, id: usize) -> FeatureSet {
        self.entries[id].iter().map(|&f| self.names[f as usize].clone()).collect()
    }

    /// Unknown features weigh 0, like a feature present in every object.
    pub fn weight(&self, feature: &str) -> f64 {
        let df = self.df(feature);
        if df == 0 {
            log::debug!("weight requested for unknown feature `{feature}`");
            return 0.0;
        }
        idf6(self.n(), df)
    }

    fn weight_id(&self, id: u32) -> f64 {
        idf6(self.n(), self.df[id as usize])
    }

    pub fn encode(&self, features: &FeatureSet) -> Query {
        let mut ids: Vec<u32> = features.iter().filter_map(|f| self.index.get(f).copied()).collect();
        ids.sort_unstable();
        Query {
            ids,
            len: features.len(),
        }
    }

    pub fn sim1(&self, a: &FeatureSet, b: &FeatureSet) -> f64 {
        ordered_sum(a.intersection(b).map(|f| self.weight(f)).collect())
    }

    pub fn sim2(&self, a: &FeatureSet, b: &FeatureSet) -> f64 {
        self.sim1(a, b) / (std::f64::consts::E + (a.len() + b.len()) as f64).ln()
    }

    fn shared_weight(&self, q: &Query, id: usize) -> f64 {
        let e = &self.entries[id];
        let (mut i, mut j, mut shared) = (0, 0, Vec::new());
        while i < q.ids.len() && j < e.len() {
            match q.ids[i].cmp(&e[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared.push(self.weight_id(e[j]));
                    i += 1;
                    j += 1;
                }
            }
        }
        ordered_sum(shared)
    }

    /// Similarity between an encoded query and a stored object.
    pub fn score(&self, q: &Query, id: usize, kind: SimKind) -> f64 {
        let s1 = self.shared_weight(q, id);
        match kind {
            SimKind::Sim1 => s1,
            SimKind::Sim2 => s1 / (std::f64::consts::E + (q.len + self.entries[id].len()) as f64).ln(),
        }
    }

    /// The `k` objects accepted by `keep` that are most similar to `q`.
    pub fn predict(&self, q: &Query, k: usize, kind: SimKind, keep: impl Fn(usize) -> bool) -> ScoredPredictions {
        let mut scored: ScoredPredictions =
            (0..self.n()).filter(|&id| keep(id)).map(|id| (id, self.score(q, id, kind))).collect();
        sort_predictions(&mut scored);
        scored.truncate(k);
        scored
    }

    /// Scores every object (no truncation), in ranking order.
    pub fn rank_all(&self, q: &Query, kind: SimKind) -> ScoredPredictions {
        self.predict(q, usize::MAX, kind, |_| true)
    }
}

/// Sums in ascending order, so equal multisets of weights give
/// bit-identical scores and tie exactly.
fn ordered_sum(mut ws: Vec<f64>) -> f64 {
    ws.sort_unstable_by(f64::total_cmp);
    ws.into_iter().sum()
}

/// Orders by descending score, then ascending id.
pub fn sort_predictions(p: &mut ScoredPredictions) {
    p.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Serialized form of one stored object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub id: usize,
    pub kind: String,
    pub features: Vec<String>,
}

impl FeatureDb {
    pub fn records(&self, kind: &str) -> Vec<FeatureRecord> {
        (0..self.n())
            .map(|id| FeatureRecord {
                id,
                kind: kind.to_string(),
                features: self.features(id).into_iter().collect(),
            })
            .collect()
    }

    /// Rebuilds from records in id order; frequencies are recounted.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a FeatureRecord>) -> FeatureDb {
        let mut db = FeatureDb::new();
        for r in records {
            db.insert(&r.features.iter().cloned().collect());
        }
        db
    }
}
