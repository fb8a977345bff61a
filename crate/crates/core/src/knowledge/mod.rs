//! Turning proof scripts into learned knowledge: script parsing,
//! globalization, proof recording, orthogonalization and abstraction.

mod db;
mod globalize;
mod ortho;
mod record;
mod script;

pub use db::{
    read_feature_records, read_jsonl, write_jsonl, GoalListDb, GoalListRecord, GoalTacticPair, Knowledge, Label,
    TacticDb, TheoremDb, TheoremRecord,
};
pub use globalize::{
    abstract_tactic, fill_holes, globalize, inline_aliases, instantiate_with, qualify_refs, split_tactic_units,
    AbstractedTactic, Globalized,
};
pub use ortho::{
    compete, instantiate, orthogonalize, predict_theorems, subsumes_tactic, Candidate, Competition, Origin,
    RecordSettings,
};
pub use record::{
    build_knowledge, corpus_entries, load_corpus, trace_proof, CorpusEntry, CorpusError, RecordReport, UnitEvent,
};
pub use script::{parse_script, Decl, ScriptError};
