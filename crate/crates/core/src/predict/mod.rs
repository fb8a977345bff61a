//! Feature extraction, TF-IDF similarity, nearest-neighbour prediction and
//! conjecture-time preselection.

mod db;
mod features;
mod preselect;

pub use db::{idf6, sort_predictions, FeatureDb, FeatureRecord, Query, ScoredPredictions, SimKind};
pub use features::{goal_features, goal_list_features, term_features, FeatureSet};
pub use preselect::{
    dependency_closure_pairs, dependency_scores, pair_parents, preselect, theorem_parents, PreselectedContext,
};

/// Which dataset a prediction runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dataset {
    Tactic,
    Theorem,
    GoalList,
}

impl Dataset {
    /// Goal lists are compared with `Sim2`, the other datasets with `Sim1`.
    pub fn sim_kind(self) -> SimKind {
        match self {
            Dataset::GoalList => SimKind::Sim2,
            _ => SimKind::Sim1,
        }
    }
}

/// The `k` objects of `db` most similar to `query`, ranked with the
/// similarity of `dataset`; ties go to the earlier object.
pub fn predict_k(db: &FeatureDb, dataset: Dataset, query: &FeatureSet, k: usize) -> ScoredPredictions {
    db.predict(&db.encode(query), k, dataset.sim_kind(), |_| true)
}

/// `sim1` of two sets under the weights of `db`.
pub fn sim1(db: &FeatureDb, a: &FeatureSet, b: &FeatureSet) -> f64 {
    db.sim1(a, b)
}

pub fn sim2(db: &FeatureDb, a: &FeatureSet, b: &FeatureSet) -> f64 {
    db.sim2(a, b)
}

/// `ln(N/df)^6` for a stored feature, 0 for an unknown one.
pub fn tfidf_weight(db: &FeatureDb, feature: &str) -> f64 {
    db.weight(feature)
}
